use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use entcap::bounds::BoundSelector;
use entcap::capability::{self, BoundChoice, EstimateConfig, IntervalMethod, SweepRow};
use entcap::criteria::{faithful_witness, ppt_witness, validate_witness_alpha, CriterionSpec, Witness};
use entcap::io::config::{parse_k_list, RunConfig};
use entcap::io::{matrix_file, sweep_csv};
use entcap::quantum::hermitian_eigs;
use entcap::sampler::{random_max_entangled, random_pure_state};
use entcap::{selftest, Error, HermitianObservable, PureStateVector, SeedSpec, Split};

#[derive(Parser)]
#[command(name = "entcap", version, about = "Detection capabilities of entanglement criteria on random states")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Estimate one capability and print it as a CSV row.
    Estimate(EstimateArgs),
    /// Run every section of a sweep configuration file.
    Sweep(SweepArgs),
    /// Evaluate a closed-form bound over a range of k.
    Bound(BoundArgs),
    /// Report alpha, the inner-ball check and the spectrum of a witness.
    CheckWitness(CheckWitnessArgs),
    /// Run the fast invariant suite.
    Selftest(SelftestArgs),
}

#[derive(Args)]
struct EstimateArgs {
    /// Criterion descriptor, e.g. `ppt` or `fisher(pairs=5)`.
    #[arg(long)]
    criterion: String,
    #[arg(long)]
    da: usize,
    #[arg(long)]
    db: usize,
    #[arg(long)]
    k: usize,
    #[arg(long, default_value_t = capability::DEFAULT_SAMPLES)]
    samples: u64,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long, default_value_t = capability::DEFAULT_CI_LEVEL)]
    ci: f64,
    /// wilson, clopper_pearson or auto.
    #[arg(long, default_value = "wilson")]
    interval: String,
    /// `auto` or a bound selector such as `ew alpha=1`.
    #[arg(long)]
    bound: Option<String>,
    #[arg(long, default_value = "estimate")]
    experiment_id: String,
}

#[derive(Args)]
struct SweepArgs {
    config: PathBuf,
    /// Directory that relative output paths are written under.
    #[arg(long, default_value = ".")]
    out_dir: PathBuf,
}

#[derive(Args)]
struct BoundArgs {
    #[arg(long = "type", value_parser = BoundSelector::TYPES)]
    kind: String,
    #[arg(long)]
    alpha: Option<f64>,
    /// Number of witnesses (ewset).
    #[arg(long)]
    n: Option<u64>,
    /// Comma-separated witness eigenvalues (spectrum).
    #[arg(long, allow_hyphen_values = true)]
    eigenvalues: Option<String>,
    /// Parameter, observable or query count.
    #[arg(long)]
    m: Option<u64>,
    /// Lipschitz constant.
    #[arg(long)]
    l: Option<f64>,
    #[arg(long)]
    d: Option<usize>,
    #[arg(long)]
    eps: Option<f64>,
    /// Inclusive range `a:b` or list `a,b,c`.
    #[arg(long)]
    k_range: String,
}

#[derive(Args)]
struct CheckWitnessArgs {
    /// ppt or faithful.
    #[arg(long, conflicts_with = "file", required_unless_present = "file")]
    kind: Option<String>,
    #[arg(long)]
    da: Option<usize>,
    #[arg(long)]
    db: Option<usize>,
    /// Draw the defining state at random; otherwise the canonical maximally
    /// entangled state is used.
    #[arg(long)]
    seed: Option<u64>,
    /// Plain-text complex matrix file.
    #[arg(long)]
    file: Option<PathBuf>,
}

#[derive(Args)]
struct SelftestArgs {
    #[arg(long, hide = true)]
    corrupt_tolerances: bool,
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Io(_) | Error::Csv(_) | Error::InsufficientData(_) | Error::NoThreshold => 1,
        _ => 2,
    }
}

fn run_estimate(args: EstimateArgs) -> Result<ExitCode, Error> {
    let interval = IntervalMethod::from_name(&args.interval)
        .ok_or_else(|| Error::InvalidInput(format!("unknown interval '{}'", args.interval)))?;
    let bound = args.bound.as_deref().map(BoundChoice::parse).transpose()?;
    let split = Split::new(args.da, args.db)?;
    let spec = CriterionSpec::parse(&args.criterion, split)?;
    let cfg = EstimateConfig::new(spec, args.k, args.samples, args.seed)?
        .with_ci_level(args.ci)?
        .with_interval(interval);
    let bound = bound
        .map(|b| b.resolve(&cfg.criterion))
        .transpose()?
        .flatten();
    let mut est = capability::estimate(&cfg)?;
    if let Some(sel) = bound {
        est.bound_value = Some(sel.evaluate(split.dim(), cfg.k)?.value);
    }
    let row = SweepRow::from_estimate(&args.experiment_id, &cfg, &est);
    print!("{}", sweep_csv::rows_to_string(&[row])?);
    Ok(ExitCode::SUCCESS)
}

fn run_sweep(args: SweepArgs) -> Result<ExitCode, Error> {
    let config = RunConfig::read(&args.config).map_err(|e| match e {
        Error::Io(io) => Error::InvalidInput(format!("cannot read {}: {io}", args.config.display())),
        other => other,
    })?;
    let workers = capability::workers_from_env()?;
    let mut any_ok = false;
    for section in &config.sections {
        let rows = capability::sweep_with_workers(
            &section.experiment_id,
            &section.grid(),
            section.bound.as_ref(),
            workers,
        )?;
        let ok = rows.iter().filter(|r| r.succeeded()).count();
        any_ok |= ok > 0;
        let path = section.output_in(&args.out_dir);
        sweep_csv::write_file(&path, &rows)?;
        eprintln!(
            "[{}] {} of {} points succeeded -> {}",
            section.name,
            ok,
            rows.len(),
            path.display()
        );
        for row in rows.iter().filter(|r| r.error.is_some()) {
            eprintln!("[{}] k={}: {}", section.name, row.k, row.error.as_deref().unwrap_or(""));
        }
    }
    Ok(if any_ok { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

fn bound_selector(args: &BoundArgs) -> Result<BoundSelector, Error> {
    let need = |name: &str| Error::InvalidBound(format!("--type {} needs --{name}", args.kind));
    let eps = args.eps.unwrap_or(entcap::bounds::DEFAULT_EPS);
    let alpha = args.alpha.unwrap_or(1.0);
    Ok(match args.kind.as_str() {
        "ew" => BoundSelector::Ew { alpha },
        "ewset" => BoundSelector::EwSet {
            n: args.n.ok_or_else(|| need("n"))?,
            alpha_min: alpha,
        },
        "spectrum" => {
            let raw = args.eigenvalues.as_deref().ok_or_else(|| need("eigenvalues"))?;
            let values = raw
                .split(',')
                .map(|s| {
                    s.trim()
                        .parse::<f64>()
                        .map_err(|_| Error::InvalidBound(format!("eigenvalue '{s}' is not a number")))
                })
                .collect::<Result<Vec<_>, _>>()?;
            BoundSelector::Spectrum(entcap::Spectrum::new(values)?)
        }
        "param" => BoundSelector::Param {
            m: args.m.ok_or_else(|| need("m"))?,
            lipschitz: args.l.ok_or_else(|| need("l"))?,
            d: Some(args.d.ok_or_else(|| need("d"))?),
            alpha_min: alpha,
            eps,
        },
        "posmap" => BoundSelector::PosMap {
            d: Some(args.d.ok_or_else(|| need("d"))?),
            lipschitz: args.l.unwrap_or(std::f64::consts::SQRT_2),
            alpha_min: alpha,
        },
        "faithful" => BoundSelector::Faithful {
            d: Some(args.d.ok_or_else(|| need("d"))?),
        },
        "singlecopy" => BoundSelector::SingleCopy {
            m: args.m.ok_or_else(|| need("m"))?,
            d: Some(args.d.ok_or_else(|| need("d"))?),
            eps,
        },
        "adaptive" => BoundSelector::Adaptive { m: args.m.unwrap_or(0) },
        other => return Err(Error::InvalidBound(format!("unknown bound type '{other}'"))),
    })
}

fn run_bound(args: BoundArgs) -> Result<ExitCode, Error> {
    let selector = bound_selector(&args)?;
    let ks = parse_k_list(&args.k_range).map_err(Error::InvalidInput)?;
    let mut out = String::from("k,bound_value\n");
    for k in ks {
        // every selector built above carries its own dimension
        let b = selector.evaluate(0, k)?;
        out.push_str(&format!("{k},{}\n", sweep_csv::format_float(b.value)));
    }
    print!("{out}");
    Ok(ExitCode::SUCCESS)
}

fn run_check_witness(args: CheckWitnessArgs) -> Result<ExitCode, Error> {
    let witness = if let Some(path) = &args.file {
        let m = matrix_file::read_matrix(path)?;
        if let (Some(da), Some(db)) = (args.da, args.db) {
            if da * db != m.nrows() {
                return Err(Error::DimensionMismatch {
                    expected: da * db,
                    actual: m.nrows(),
                });
            }
        }
        Witness::custom(HermitianObservable::new(m)?)
    } else {
        let kind = args.kind.as_deref().unwrap_or_default();
        let (da, db) = match (args.da, args.db) {
            (Some(a), Some(b)) => (a, b),
            _ => return Err(Error::InvalidInput("--kind needs --da and --db".into())),
        };
        let split = Split::new(da, db)?;
        let canonical = || {
            if da != db {
                return Err(Error::InvalidInput(
                    "the canonical maximally entangled state needs da = db; pass --seed".into(),
                ));
            }
            PureStateVector::max_entangled_canonical(da)
        };
        match kind {
            "ppt" => {
                let phi = match args.seed {
                    Some(s) => random_pure_state(split.dim(), SeedSpec::new(s, 0))?,
                    None => canonical()?,
                };
                ppt_witness(&phi, split)?
            }
            "faithful" => {
                let psi = match args.seed {
                    Some(s) => random_max_entangled(da, db, SeedSpec::new(s, 0))?,
                    None => canonical()?,
                };
                faithful_witness(&psi, split)?
            }
            other => {
                return Err(Error::InvalidInput(format!(
                    "unknown witness kind '{other}' (expected ppt or faithful)"
                )))
            }
        }
    };
    let check = validate_witness_alpha(&witness);
    let spectrum = hermitian_eigs(witness.observable())?;
    let values: Vec<String> = spectrum.values().iter().map(|v| format!("{v:.12e}")).collect();
    println!("dimension = {}", witness.observable().dim());
    println!("alpha = {:.15}", check.alpha);
    println!("trace = {:.15}", witness.observable().trace());
    println!("inner_ball_value = {:.15e}", check.inner_ball_value);
    println!("inner_ball = {}", if check.passes_inner_ball { "pass" } else { "FAIL" });
    println!("spectrum = {}", values.join(" "));
    if check.passes_inner_ball {
        Ok(ExitCode::SUCCESS)
    } else {
        eprintln!("not a witness: tr(W rho0) < 0 for a separable rho0");
        Ok(ExitCode::from(1))
    }
}

fn run_selftest(args: SelftestArgs) -> Result<ExitCode, Error> {
    let tol = if args.corrupt_tolerances {
        selftest::corrupted_tolerances()
    } else {
        entcap::tolerance::TOLERANCES
    };
    let report = selftest::run(&tol);
    println!("{report}");
    Ok(if report.all_passed() { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Estimate(a) => run_estimate(a),
        Command::Sweep(a) => run_sweep(a),
        Command::Bound(a) => run_bound(a),
        Command::CheckWitness(a) => run_check_witness(a),
        Command::Selftest(a) => run_selftest(a),
    };
    result.unwrap_or_else(|e| {
        eprintln!("error: {e}");
        ExitCode::from(exit_code(&e))
    })
}
