mod common;

use common::*;
use pflow_core::sensing::io::{load_ensemble, save_ensemble};
use pflow_core::sensing::*;
use pflow_core::Mat;
use proptest::prelude::*;

#[test]
fn adjoint_identity() {
    for seed in 0..100u64 {
        let (n1, n2, m) = (2 + (seed % 4) as usize, 3 + (seed % 3) as usize, 5 + (seed % 7) as usize);
        let op = gaussian_ensemble(n1, n2, m, seed).unwrap();
        let x = gaussian(n1, n2, seed, 0);
        let z = gaussian(m, 1, seed, 1).into_vec();
        let lhs = vec_dot(&op.apply(&x).unwrap(), &z);
        let rhs = x.frob_dot(&op.adjoint(&z).unwrap());
        assert!((lhs - rhs).abs() <= 1e-10, "seed {seed}: {lhs} vs {rhs}");
    }
}

#[test]
fn apply_matches_entrywise_trace() {
    for seed in 0..10u64 {
        let op = spiked_gaussian_ensemble(5, 12, seed).unwrap();
        let x = gaussian(5, 5, seed, 2);
        let fast = op.apply(&x).unwrap();
        for (a, b) in fast.iter().zip(naive_apply(&op, &x)) {
            assert!((a - b).abs() < 1e-13);
        }
    }
}

#[test]
fn adjoint_of_unit_vector_is_sensing_matrix() {
    let op = gaussian_ensemble(3, 2, 4, 8).unwrap();
    for k in 0..4 {
        let mut e = vec![0.0; 4];
        e[k] = 1.0;
        assert_eq!(op.adjoint(&e).unwrap(), op.matrix(k));
    }
    assert_eq!(op.adjoint(&[0.0; 4]).unwrap(), Mat::zeros(3, 2));
    assert!(op.adjoint(&[0.0; 3]).is_err());
}

#[test]
fn ensembles_are_bitwise_deterministic() {
    let a = gaussian_ensemble(4, 3, 6, 42).unwrap();
    let b = gaussian_ensemble(4, 3, 6, 42).unwrap();
    assert!(a.matrices().zip(b.matrices()).all(|(x, y)| x.as_slice() == y.as_slice()));
    let c = gaussian_ensemble(4, 3, 6, 43).unwrap();
    assert!(a.matrices().zip(c.matrices()).any(|(x, y)| x != y));
    let s1 = spiked_gaussian_ensemble(4, 6, 1).unwrap();
    let s2 = spiked_gaussian_ensemble(4, 6, 1).unwrap();
    assert!(s1.matrices().zip(s2.matrices()).all(|(x, y)| x.as_slice() == y.as_slice()));
}

// Regression baseline: 20 seeds, 20 trials each, rank 2 on 20x20 with
// m = 20·(n1+n2)·rank = 1600.
#[test]
fn probe_regression_at_large_m() {
    let seeds = 20;
    let good = (0..seeds)
        .filter(|&seed| {
            let op = gaussian_ensemble(20, 20, 1600, seed).unwrap();
            probe_rip(&op, 2, 20, seed).unwrap().delta_hat < 0.5
        })
        .count();
    assert!(good as f64 >= 0.95 * seeds as f64, "{good}/{seeds}");
}

#[test]
fn pair_defects_never_exceed_probe() {
    for seed in 0..5u64 {
        for symmetric in [false, true] {
            let op = if symmetric {
                spiked_gaussian_ensemble(8, 40, seed).unwrap()
            } else {
                gaussian_ensemble(8, 7, 40, seed).unwrap()
            };
            let trials = 15;
            let report = probe_rip(&op, 2, trials, seed).unwrap();
            assert_eq!(report.pair_rank_probed, 4);
            for t in 0..trials {
                let (ix, i1, i2) = trial_indices(t);
                let x = probe_matrix(op.n1(), op.n2(), 2, symmetric, seed, ix);
                let p = probe_matrix(op.n1(), op.n2(), 4, symmetric, seed, i1);
                let q = probe_matrix(op.n1(), op.n2(), 4, symmetric, seed, i2);
                let delta = (vec_dot(&op.apply(&x).unwrap(), &op.apply(&x).unwrap()) - 1.0).abs();
                let pair = (vec_dot(&op.apply(&p).unwrap(), &op.apply(&q).unwrap()) - p.frob_dot(&q)).abs();
                assert!(delta <= report.delta_hat);
                assert!(2.0 * pair <= report.rho_hat);
            }
        }
    }
}

#[test]
fn ensemble_files_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let op = gaussian_ensemble(3, 4, 5, 9).unwrap();
    for full in [true, false] {
        let path = dir.path().join(format!("e{full}.txt"));
        save_ensemble(&path, &op, full).unwrap();
        let back = load_ensemble(&path).unwrap();
        assert!(op.matrices().zip(back.matrices()).all(|(a, b)| a == b));
    }
}

#[test]
fn memory_guard_refuses_huge_ensembles() {
    let err = gaussian_ensemble(1000, 1000, 200, 0).unwrap_err();
    assert!(matches!(err, pflow_core::Error::MemoryGuard { .. }));
}

proptest! {
    #[test]
    fn apply_is_linear(seed in 0u64..500, a in -3.0f64..3.0, b in -3.0f64..3.0) {
        let op = gaussian_ensemble(4, 3, 7, seed).unwrap();
        let x = gaussian(4, 3, seed, 3);
        let y = gaussian(4, 3, seed, 4);
        let combo = &x.scale(a) + &y.scale(b);
        let lhs = op.apply(&combo).unwrap();
        let ax = op.apply(&x).unwrap();
        let ay = op.apply(&y).unwrap();
        for k in 0..7 {
            prop_assert!((lhs[k] - (a * ax[k] + b * ay[k])).abs() < 1e-12);
        }
    }

    #[test]
    fn probe_constants_are_nonnegative(seed in 0u64..200, rank in 1usize..4) {
        let op = gaussian_ensemble(5, 4, 10, seed).unwrap();
        let rep = probe_rip(&op, rank, 3, seed).unwrap();
        prop_assert!(rep.delta_hat >= 0.0 && rep.rho_hat >= 0.0);
        prop_assert_eq!(rep.rank_probed, rank);
    }
}
