//! File formats: matrix files, sweep CSVs and run configurations.

pub mod config;
pub mod matrix_file;
pub mod sweep_csv;
