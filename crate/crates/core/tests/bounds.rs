mod support;

use drovar_core::solver::{mean_bound, variance_bound, variance_bound_with, Parameterization, Status};
use drovar_core::{EmpiricalMeasure, FDivergenceFamily, ProblemData, SolverConfig};
use support::*;

fn cfg() -> SolverConfig {
    SolverConfig::default()
}

#[test]
fn bound_is_nondecreasing_in_eta() {
    let mut r = rng(51);
    for i in 0..12 {
        let n = 2 + i % 4;
        let family = families()[i % 3];
        let p = random_measure(&mut r, n);
        let data = random_data(&mut r, n);
        let top = match family.alpha_below_one() {
            Some(_) => 3.0,
            None => 1.0,
        };
        let mut last = f64::NEG_INFINITY;
        for k in 1..=20 {
            let eta = top * k as f64 / 20.0;
            let v = variance_bound(&data, &p, &family, eta, &cfg()).unwrap().value;
            assert!(v >= last - 1e-9, "{family} eta={eta}: {v} < {last}");
            last = v;
        }
    }
}

#[test]
fn bound_dominates_nominal_value() {
    let mut r = rng(52);
    for i in 0..60 {
        let n = 2 + i % 5;
        let family = families()[i % 3];
        let p = random_measure(&mut r, n);
        let data = random_data(&mut r, n);
        let nominal = p.expect(data.rho()).unwrap() + p.mean_var(data.phi()).unwrap().1;
        for eta in [0.01, 0.3] {
            let v = variance_bound(&data, &p, &family, eta, &cfg()).unwrap().value;
            assert!(v >= nominal - 1e-8, "{family}: {v} < {nominal}");
        }
    }
}

#[test]
fn shifts_of_rho_and_phi() {
    let mut r = rng(53);
    for i in 0..15 {
        let n = 2 + i % 3;
        let family = families()[i % 3];
        let p = random_measure(&mut r, n);
        let data = random_data(&mut r, n);
        let base = variance_bound(&data, &p, &family, 0.2, &cfg()).unwrap().value;
        let c = 0.7;
        let rho_up = ProblemData::new(data.rho().iter().map(|x| x + c).collect(), data.phi().to_vec()).unwrap();
        let phi_up = ProblemData::new(data.rho().to_vec(), data.phi().iter().map(|x| x + c).collect()).unwrap();
        let a = variance_bound(&rho_up, &p, &family, 0.2, &cfg()).unwrap().value;
        let b = variance_bound(&phi_up, &p, &family, 0.2, &cfg()).unwrap().value;
        assert!((a - base - c).abs() < 1e-7, "{family}: {a} vs {base} + {c}");
        assert!((b - base).abs() < 1e-7, "{family}: {b} vs {base}");
    }
}

#[test]
fn constant_phi_reduces_to_mean_bound() {
    let mut r = rng(54);
    for i in 0..30 {
        let n = 2 + i % 4;
        let family = families()[i % 3];
        let p = random_measure(&mut r, n);
        let data = random_data(&mut r, n);
        let flat = ProblemData::new(data.rho().to_vec(), vec![0.0; n]).unwrap();
        let v = variance_bound(&flat, &p, &family, 0.2, &cfg()).unwrap().value;
        let m = mean_bound(data.rho(), &p, &family, 0.2, &cfg()).unwrap().value;
        assert!((v - m).abs() <= 1e-8, "{family}: {v} vs {m}");
    }
}

/// Largest `q` with `KL((q, 1-q) || (1/2, 1/2)) <= eta`, by bisection.
fn kl_root(eta: f64) -> f64 {
    let d = |q: f64| q * (2.0 * q).ln() + (1.0 - q) * (2.0 * (1.0 - q)).ln();
    let (mut lo, mut hi) = (0.5, 1.0 - 1e-15);
    for _ in 0..200 {
        let m = 0.5 * (lo + hi);
        if d(m) <= eta {
            lo = m;
        } else {
            hi = m;
        }
    }
    lo
}

#[test]
fn two_point_kl_mean_bound() {
    let p = EmpiricalMeasure::uniform(2).unwrap();
    let v = mean_bound(&[0.0, 1.0], &p, &FDivergenceFamily::kl(), 0.1, &cfg()).unwrap().value;
    let root = kl_root(0.1);
    assert!((v - root).abs() < 1e-6, "{v} vs {root}");
    assert!((v - 0.7198).abs() < 1e-3);
}

#[test]
fn reduced_and_generic_parameterizations_agree() {
    let mut r = rng(55);
    let kl = FDivergenceFamily::kl();
    for i in 0..30 {
        let n = 2 + i % 4;
        let p = random_measure(&mut r, n);
        let data = random_data(&mut r, n);
        let a = variance_bound_with(&data, &p, &kl, 0.2, &cfg(), Parameterization::KlReduced).unwrap();
        let b = variance_bound_with(&data, &p, &kl, 0.2, &cfg(), Parameterization::Generic).unwrap();
        assert!((a.value - b.value).abs() <= 1e-7, "{} vs {}", a.value, b.value);
    }
    let half = FDivergenceFamily::alpha(0.5).unwrap();
    for i in 0..30 {
        let n = 2 + i % 4;
        let p = random_measure(&mut r, n);
        let data = random_data(&mut r, n);
        let a = variance_bound_with(&data, &p, &half, 0.2, &cfg(), Parameterization::AlphaReduced).unwrap();
        let b = variance_bound_with(&data, &p, &half, 0.2, &cfg(), Parameterization::Generic).unwrap();
        assert!((a.value - b.value).abs() <= 1e-6, "{} vs {}", a.value, b.value);
    }
}

#[test]
fn symmetric_two_point_kl_is_a_boundary_case() {
    let p = EmpiricalMeasure::uniform(2).unwrap();
    let data = ProblemData::new(vec![0.0, 0.0], vec![0.0, 1.0]).unwrap();
    let b = variance_bound(&data, &p, &FDivergenceFamily::kl(), 0.1, &cfg()).unwrap();
    assert!((b.value - 0.25).abs() <= 1e-4);
    assert_eq!(b.status, Status::BoundaryLambda);
    assert!(b.diagnostics.boundary_flag);
}

#[test]
fn repeated_solves_are_bit_identical() {
    let mut r = rng(56);
    for family in families() {
        let p = random_measure(&mut r, 5);
        let data = random_data(&mut r, 5);
        let a = variance_bound(&data, &p, &family, 0.2, &cfg()).unwrap();
        let b = variance_bound(&data, &p, &family, 0.2, &cfg()).unwrap();
        assert_eq!(a.value.to_bits(), b.value.to_bits());
        assert_eq!(a, b);
    }
}

#[test]
fn larger_sample_spaces() {
    let mut r = rng(57);
    for family in families() {
        let p = random_measure(&mut r, 200);
        let data = random_data(&mut r, 200);
        let b = variance_bound(&data, &p, &family, 0.1, &cfg()).unwrap();
        let nominal = p.expect(data.rho()).unwrap() + p.mean_var(data.phi()).unwrap().1;
        assert!(b.value >= nominal);
        if b.status == Status::Converged {
            assert!(b.diagnostics.identities_hold(0.1), "{family}: {:?}", b.diagnostics);
        }
    }
}
