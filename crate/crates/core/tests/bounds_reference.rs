//! Bound evaluations against reference values computed independently at
//! high precision from the closed forms.

use entcap::bounds::*;
use entcap::Spectrum;

fn rel(got: f64, want: f64) -> f64 {
    ((got - want) / want).abs()
}

fn assert_rel(got: f64, want: f64, tol: f64, what: &str) {
    assert!(rel(got, want) <= tol, "{what}: got {got:.17e}, want {want:.17e}");
}

#[test]
fn rate_identity() {
    let lhs = 3.0 - 2.0 * 2f64.sqrt();
    let rhs = (2f64.sqrt() - 1.0).powi(2);
    assert!((lhs - rhs).abs() <= 4.0 * f64::EPSILON);
    assert!((MIN_RATE - rhs).abs() <= 4.0 * f64::EPSILON);
    assert_eq!(ew_bound(1.0, 7).unwrap().exponent_rate, (2f64.sqrt() - 1.0).powi(2));
}

#[test]
fn single_witness_values() {
    let b = ew_bound(1.0, 10).unwrap();
    assert_rel(b.value, 0.359_665_238_941_720_77, 1e-12, "ew(1, 10)");
    assert!(!b.vacuous);
    let b = ew_bound(3f64.sqrt(), 10).unwrap();
    assert_rel(b.value, 0.028_169_149_492_548_890, 1e-12, "ew(√3, 10)");
    assert_rel(b.exponent_rate * 10.0, 4.262_675_070_067_383, 1e-12, "exponent at √3");
    assert!(ew_bound(0.999, 10).is_err());
}

#[test]
fn witness_set_values() {
    let b = ew_set_bound(10, 1.0, 50).unwrap();
    assert_rel(b.value, 0.003_761_597_709_344_153, 1e-12, "ewset(10, 1, 50)");
    // n = e^k witnesses: ln n = k outgrows the 0.1716 k decay
    for k in 1..=40usize {
        let n = (k as f64).exp().round() as u64;
        let b = ew_set_bound(n, 1.0, k).unwrap();
        assert!(b.value > 2.0 * 0.99 && b.vacuous, "k={k}: {}", b.value);
    }
}

#[test]
fn bell_spectrum_values() {
    let spec = Spectrum::new(vec![0.5, 0.5, 0.5, -0.5]).unwrap();
    let b = spectrum_bound(&spec, 10).unwrap();
    let root = 0.326_908_559_423_943_16;
    assert_rel((b.exponent_rate / 2.0).sqrt(), root, 1e-12, "balanced root");
    assert_rel(b.exponent_rate, 0.213_738_412_449_275_55, 1e-12, "rate");
    assert_rel(b.value, 0.235_926_032_679_469_95, 1e-12, "value at k = 10");
    assert!(b.exponent_rate > ew_bound(1.0, 10).unwrap().exponent_rate);
}

#[test]
fn parameterized_values() {
    let b = param_ew_bound(2, 1.0, 4, 1.0, 1000, 0.5).unwrap();
    assert_rel(b.prefactor_log - std::f64::consts::LN_2, 6.238_324_625_039_508, 1e-12, "C1");
    assert_rel(b.exponent_rate, 0.050_510_257_216_821_902, 1e-12, "C2");
    assert_rel(b.value, 1.185_697_673_875_309_3e-19, 1e-10, "value");
}

#[test]
fn positive_map_values() {
    for d in [4usize, 9, 16, 25] {
        let l = 2f64.sqrt();
        let b = positive_map_bound(d, l, 1.0, 1).unwrap();
        let df = d as f64;
        let c1 = 2.0 * df * (2f64.powf(2.5) * df.powf(1.5) * l).ln();
        assert_rel(b.prefactor_log - std::f64::consts::LN_2, c1, 1e-12, "C1 closed form");
        for k in [0usize, 10, 1000] {
            let direct = param_ew_bound(2 * d as u64, l, d, 1.0, k, 0.5).unwrap();
            assert_eq!(positive_map_bound(d, l, 1.0, k).unwrap(), direct);
        }
    }
    let b = positive_map_bound(4, 2f64.sqrt(), 1.0, 1000).unwrap();
    assert_rel(b.prefactor_log - std::f64::consts::LN_2, 33.271_064_666_877_37, 1e-12, "C1 at d = 4");
    assert_rel(b.value, 6.518_441_897_264_29e-8, 1e-10, "value at k = 1000");
    let c1_over_c2 = (b.prefactor_log - std::f64::consts::LN_2) / b.exponent_rate;
    assert_rel(c1_over_c2, 658.699_173_2, 1e-9, "C1/C2");
}

#[test]
fn faithful_ratio_values() {
    let b = faithful_ratio_bound(4, 1).unwrap();
    assert_rel(b.prefactor_log - std::f64::consts::LN_2, 12.0 * 16f64.ln(), 1e-14, "C1 d=4");
    assert_rel(b.exponent_rate, 0.050_510_257_216_821_9, 1e-12, "C2 d=4");
    let b = faithful_ratio_bound(9, 1).unwrap();
    assert_rel(b.exponent_rate, 0.244_040_896_227_298_565, 1e-12, "C2 d=9");
    assert!(faithful_ratio_bound(8, 1).is_err());
}

#[test]
fn single_copy_values_and_threshold() {
    let b = single_copy_bound(1, 4, 500, 0.5).unwrap();
    assert_rel(b.prefactor_log - std::f64::consts::LN_2, 6.238_324_625_039_508, 1e-12, "C1");
    assert_rel(b.value, 1.101_886_753_731_216e-8, 1e-10, "value at k = 500");
    let k_star = b.threshold_k();
    assert_rel(k_star, 137.228_994_416_8, 1e-10, "closed-form threshold");
    // bisection on the continuous bound as the root-finding oracle
    let f = |k: f64| (b.prefactor_log - b.exponent_rate * k).exp() - 1.0;
    let (mut lo, mut hi) = (0.0, 1000.0);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if f(mid) > 0.0 {
            lo = mid
        } else {
            hi = mid
        }
    }
    assert!((k_star - lo).abs() <= 1e-9, "{k_star} vs {lo}");
}

#[test]
fn adaptive_values() {
    assert_rel(adaptive_bound(10, 100).value, 7.244_604_071_394_906_4e-5, 1e-12, "adaptive(10, 100)");
    for k in 0..60usize {
        let a = adaptive_bound(0, k);
        let e = ew_bound(1.0, k).unwrap();
        assert!(rel(a.value, e.value) <= 1e-13, "k={k}");
    }
    assert_eq!(adaptive_bound(0, 0).value, 2.0);
}

#[test]
fn results_reconstruct_their_value() {
    let spec = Spectrum::new(vec![0.7, 0.4, -0.1]).unwrap();
    for k in [0usize, 1, 5, 50, 500] {
        for b in [
            ew_bound(1.3, k).unwrap(),
            ew_set_bound(7, 1.1, k).unwrap(),
            spectrum_bound(&spec, k).unwrap(),
            param_ew_bound(3, 1.5, 9, 1.2, k, 0.3).unwrap(),
            positive_map_bound(9, 2f64.sqrt(), 1.0, k).unwrap(),
            faithful_ratio_bound(16, k).unwrap(),
            single_copy_bound(4, 9, k, 0.5).unwrap(),
            adaptive_bound(3, k),
        ] {
            let rebuilt = (b.prefactor_log - b.exponent_rate * k as f64).exp();
            assert!(rel(b.value, rebuilt) <= 1e-14);
            assert_eq!(b.k, k);
            assert_eq!(b.vacuous, b.value >= 1.0);
        }
    }
}

#[test]
fn all_positive_spectrum_never_detects() {
    let b = spectrum_bound(&Spectrum::new(vec![0.25; 4]).unwrap(), 3).unwrap();
    assert_eq!(b.value, 0.0);
    assert_eq!(b.prefactor_log, f64::NEG_INFINITY);
}
