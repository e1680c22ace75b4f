mod support;

use drovar_core::measures::divergence_of;
use drovar_core::oracle::{primal_sup_grid, primal_value};
use drovar_core::solver::{variance_bound, Status};
use drovar_core::{ExtReal, OracleConfig, SolverConfig};
use support::*;

#[test]
fn dual_bound_matches_primal_grid() {
    let cfg = SolverConfig::default();
    let mut worst = 0.0f64;
    for n in [2usize, 3] {
        let mut r = rng(11 + n as u64);
        for family in families() {
            for _ in 0..6 {
                let p = random_measure(&mut r, n);
                let data = random_data(&mut r, n);
                for eta in [0.05, 0.2, 0.5] {
                    let bound = variance_bound(&data, &p, &family, eta, &cfg).unwrap();
                    let oracle = primal_sup_grid(&data, &p, &family, eta, &OracleConfig::for_atoms(n)).unwrap();
                    let gap = (bound.value - oracle.value).abs();
                    worst = worst.max(gap);
                    assert!(
                        gap <= 1e-4,
                        "{family} n={n} eta={eta}: dual {} oracle {} ({:?})",
                        bound.value,
                        oracle.value,
                        bound.status
                    );
                    assert!(oracle.value <= bound.value + 1e-8);
                    let d = divergence_of(&oracle.argmax, &p, &family).unwrap();
                    assert!(d <= ExtReal::Finite(eta + 1e-9));
                }
            }
        }
    }
    eprintln!("largest duality gap {worst:e}");
}

#[test]
fn feasible_points_never_beat_the_bound() {
    let cfg = SolverConfig::default();
    let mut r = rng(5);
    for i in 0..9 {
        let n = 2 + i % 4;
        let family = families()[i % 3];
        let p = random_measure(&mut r, n);
        let data = random_data(&mut r, n);
        let eta = 0.3;
        let bound = variance_bound(&data, &p, &family, eta, &cfg).unwrap().value;
        let mut checked = 0;
        while checked < 300 {
            let q = random_simplex_point(&mut r, n);
            // Pull toward p so that a good share of the draws is feasible.
            let t: f64 = rand::Rng::gen_range(&mut r, 0.0..1.0);
            let q: Vec<f64> = q.iter().zip(p.weights()).map(|(a, b)| t * a + (1.0 - t) * b).collect();
            if divergence_of(&q, &p, &family).unwrap() <= ExtReal::Finite(eta) {
                assert!(primal_value(&q, &data).unwrap() <= bound + 1e-8);
                checked += 1;
            }
        }
    }
}

#[test]
fn identities_at_interior_optima() {
    let cfg = SolverConfig::default();
    let mut r = rng(21);
    let mut converged = 0;
    for i in 0..60 {
        let n = 2 + i % 3;
        let family = families()[i % 3];
        let p = random_measure(&mut r, n);
        let data = random_data(&mut r, n);
        let bound = variance_bound(&data, &p, &family, 0.2, &cfg).unwrap();
        if bound.status == Status::Converged {
            converged += 1;
            let d = &bound.diagnostics;
            assert!((d.normalization - 1.0).abs() <= 1e-6, "{family}: {d:?}");
            assert!((d.achieved_divergence.to_f64() - 0.2).abs() <= 1e-5, "{family}: {d:?}");
            assert!(d.mean_condition_gap.unwrap().abs() <= 1e-6, "{family}: {d:?}");
        }
    }
    assert!(converged > 20, "only {converged} interior optima");
}

#[test]
fn tilt_matches_oracle_argmax() {
    let cfg = SolverConfig::default();
    let mut r = rng(8);
    for i in 0..12 {
        let n = 2 + i % 2;
        let family = families()[i % 3];
        let p = random_measure(&mut r, n);
        let data = random_data(&mut r, n);
        let bound = variance_bound(&data, &p, &family, 0.2, &cfg).unwrap();
        if bound.status != Status::Converged {
            continue;
        }
        let oracle = primal_sup_grid(&data, &p, &family, 0.2, &OracleConfig::for_atoms(n)).unwrap();
        for (a, b) in oracle.argmax.iter().zip(&bound.tilt.weights) {
            assert!((a - b).abs() <= 1e-2, "{family}: {:?} vs {:?}", oracle.argmax, bound.tilt.weights);
        }
    }
}
