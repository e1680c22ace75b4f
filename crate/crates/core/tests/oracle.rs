mod support;

use drovar_core::measures::divergence_of;
use drovar_core::oracle::{primal_sup_grid, primal_value, simplex_grid};
use drovar_core::{ExtReal, OracleConfig};
use support::*;

fn naive_max(data: &drovar_core::ProblemData, p: &drovar_core::EmpiricalMeasure, family: &drovar_core::FDivergenceFamily, eta: f64, steps: usize) -> f64 {
    simplex_grid(p.len(), steps)
        .into_iter()
        .filter(|q| divergence_of(q, p, family).unwrap() <= ExtReal::Finite(eta))
        .map(|q| primal_value(&q, data).unwrap())
        .fold(f64::NEG_INFINITY, f64::max)
}

// Per-atom KL terms are negative below the baseline weight, so the sweep must
// not discard a row on a single term exceeding eta.
#[test]
fn three_atom_sweep_dominates_plain_grid() {
    let mut r = rng(14);
    for family in families() {
        for _ in 0..4 {
            let p = random_measure(&mut r, 3);
            let data = random_data(&mut r, 3);
            for eta in [0.05, 0.3] {
                let oracle = primal_sup_grid(&data, &p, &family, eta, &OracleConfig::for_atoms(3)).unwrap();
                let naive = naive_max(&data, &p, &family, eta, 300);
                assert!(oracle.value >= naive - 1e-12, "{family}: {} < {naive}", oracle.value);
            }
        }
    }
}

#[test]
fn argmax_is_feasible_and_value_matches() {
    let mut r = rng(3);
    for n in [2, 3] {
        for family in families() {
            let p = random_measure(&mut r, n);
            let data = random_data(&mut r, n);
            let oracle = primal_sup_grid(&data, &p, &family, 0.2, &OracleConfig::for_atoms(n)).unwrap();
            assert!(divergence_of(&oracle.argmax, &p, &family).unwrap() <= ExtReal::Finite(0.2));
            assert_eq!(oracle.value, primal_value(&oracle.argmax, &data).unwrap());
            assert!((oracle.argmax.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        }
    }
}

// The primal objective is concave in q, so it is unimodal on the segment from
// the baseline to the maximizer.
#[test]
fn primal_is_unimodal_toward_argmax() {
    let mut r = rng(4);
    for family in families() {
        let p = random_measure(&mut r, 3);
        let data = random_data(&mut r, 3);
        let oracle = primal_sup_grid(&data, &p, &family, 0.3, &OracleConfig::for_atoms(3)).unwrap();
        let values: Vec<f64> = (0..=200)
            .map(|k| {
                let t = k as f64 / 200.0;
                let q: Vec<f64> = p.weights().iter().zip(&oracle.argmax).map(|(a, b)| (1.0 - t) * a + t * b).collect();
                primal_value(&q, &data).unwrap()
            })
            .collect();
        let peak = values.iter().cloned().enumerate().fold((0, f64::MIN), |b, (i, v)| if v > b.1 { (i, v) } else { b }).0;
        assert!(values[..=peak].windows(2).all(|w| w[1] >= w[0] - 1e-12));
        assert!(values[peak..].windows(2).all(|w| w[1] <= w[0] + 1e-12));
    }
}

#[test]
fn oracle_is_deterministic() {
    let mut r = rng(9);
    let p = random_measure(&mut r, 3);
    let data = random_data(&mut r, 3);
    let family = families()[1];
    let a = primal_sup_grid(&data, &p, &family, 0.1, &OracleConfig::for_atoms(3)).unwrap();
    let b = primal_sup_grid(&data, &p, &family, 0.1, &OracleConfig::for_atoms(3)).unwrap();
    assert_eq!(a, b);
}
