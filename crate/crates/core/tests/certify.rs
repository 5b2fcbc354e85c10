mod common;

use common::*;
use pflow_core::certify::*;
use pflow_core::harness::{gen_problem, ProblemParams};
use pflow_core::linalg::spectral_norm;
use pflow_core::sensing::gaussian_ensemble;
use pflow_core::solver::{gd_phase, init_phase, Mode, Phase, SolverConfig};
use pflow_core::{FactorPair, Mat};

fn near(x: &Mat, scale: f64, seed: u64, index: u64) -> Mat {
    let e = gaussian(x.rows(), x.cols(), seed, index);
    x + &e.scale(scale / e.frob_norm())
}

#[test]
fn dist_bounds_sweep() {
    for seed in 0..100u64 {
        let x = gaussian(7, 2, seed, 0);
        let radius = spectral_norm(&x) / 4.0;
        let u = near(&x, radius * (0.05 + 0.9 * (seed % 10) as f64 / 10.0), seed, 1);
        let rep = check_dist_bounds(&u, &x).unwrap();
        assert!(!rep.failed(), "seed {seed}: {rep:?}");
        assert_eq!(rep.item("dist_upper_bound").unwrap().verdict, Verdict::Pass);
        assert_eq!(rep.item("gap_by_dist").unwrap().verdict, Verdict::Pass);
    }
    let x = gaussian(4, 2, 0, 0);
    let rep = check_dist_bounds(&x, &x).unwrap();
    assert!(rep.items.iter().all(|i| i.lhs.abs() < 1e-12 && i.verdict == Verdict::Pass));
    let deficient = Mat::from_fn(4, 2, |i, _| i as f64);
    let rep = check_dist_bounds(&x, &deficient).unwrap();
    assert_eq!(rep.item("dist_upper_bound").unwrap().verdict, Verdict::Skip);
}

#[test]
fn product_dist_bound_sweep() {
    for seed in 0..100u64 {
        let truth = FactorPair::rect(gaussian(6, 2, seed, 2), gaussian(5, 2, seed, 3)).unwrap();
        let z = truth.stacked();
        let w = near(&z, spectral_norm(&z) / 4.0 * 0.95, seed, 4);
        let pair = FactorPair::rect(w.row_block(0, 6), w.row_block(6, 11)).unwrap();
        let rep = check_product_dist_bound(&pair, &truth).unwrap();
        assert!(rep.passed(), "seed {seed}: {rep:?}");
    }
    let truth = FactorPair::rect(gaussian(3, 1, 0, 0), gaussian(3, 1, 0, 1)).unwrap();
    let rep = check_product_dist_bound(&truth, &truth).unwrap();
    assert!(rep.passed() && rep.items[0].lhs == 0.0);
    let far = FactorPair::rect(truth.u().scale(10.0), truth.v().scale(10.0)).unwrap();
    assert_eq!(check_product_dist_bound(&far, &truth).unwrap().verdict, Verdict::Skip);
}

#[test]
fn factor_perturbation_sweep() {
    for seed in 0..100u64 {
        let m1 = gaussian(6, 2, seed, 5).matmul_t(&gaussian(5, 2, seed, 6));
        let sr = oracle_singular_values(&m1)[1];
        // Rank-preserving perturbation: move the factors, rescale to 0.1·σ_r.
        let m2_dir = &gaussian(6, 2, seed, 7).matmul_t(&gaussian(5, 2, seed, 6)) - &m1;
        let m2 = &m1 + &m2_dir.scale(0.1 * sr / spectral_norm(&m2_dir));
        let rep = check_factor_perturbation(&m1, &m2, 2).unwrap();
        assert!(rep.passed(), "seed {seed}: {rep:?}");
    }
    let m1 = gaussian(5, 2, 1, 0).matmul_t(&gaussian(4, 2, 1, 1));
    let rep = check_factor_perturbation(&m1, &m1, 2).unwrap();
    assert!(rep.passed() && rep.items[0].lhs < 1e-20);
    // ‖m2 − m1‖ = 0.9 σ_r(m1) along the leading singular direction.
    let sv = pflow_core::linalg::svd(&m1).unwrap();
    let u1 = Mat::column_vector(&sv.left.column(0));
    let v1 = Mat::column_vector(&sv.right.column(0));
    let m2 = &m1 + &u1.matmul_t(&v1).scale(0.9 * sv.singular_values[1]);
    assert_eq!(check_factor_perturbation(&m1, &m2, 2).unwrap().verdict, Verdict::Skip);
}

#[test]
fn lifted_gradient_sweep() {
    for seed in 0..100u64 {
        let op = gaussian_ensemble(5, 4, 30, seed).unwrap();
        let m = gaussian(5, 2, seed, 8).matmul_t(&gaussian(4, 2, seed, 9));
        let b = op.apply(&m).unwrap();
        let pair = FactorPair::rect(gaussian(5, 2, seed, 10), gaussian(4, 2, seed, 11)).unwrap();
        let rep = check_lifted_gradient(&op, &b, &pair, &m).unwrap();
        assert!(rep.passed(), "seed {seed}: {rep:?}");
    }
}

#[test]
fn lifted_gradient_at_balanced_truth_is_zero() {
    let p = gen_problem(&ProblemParams::rect(5, 4, 2, 2.0, 30, 0)).unwrap();
    let rep = check_lifted_gradient(&p.op, &p.b, &p.truth_factors, &p.truth_m).unwrap();
    assert!(rep.passed());
    let mut wrong = p.b.clone();
    wrong[0] += 1e-3;
    assert!(check_lifted_gradient(&p.op, &wrong, &p.truth_factors, &p.truth_m).is_err());
}

#[test]
fn lifted_objects() {
    let p = gen_problem(&ProblemParams::rect(5, 4, 2, 3.0, 12, 1)).unwrap();
    let lp = LiftedPair::new(&p.truth_factors, &p.truth_factors).unwrap();
    assert!(lp.z.t_matmul(&lp.z_tilde).max_abs() < 1e-10);
    let lifted = LiftedOperator::new(&p.op);
    let x = gaussian(9, 9, 1, 0);
    let bx = lifted.apply(&x).unwrap();
    for (k, a) in p.op.matrices().enumerate() {
        // ⟨Sym(A), X⟩ = ⟨A, X₁₂⟩ + ⟨Aᵀ, X₂₁⟩
        let mut expected = 0.0;
        for i in 0..5 {
            for j in 0..4 {
                expected += a[(i, j)] * (x[(i, 5 + j)] + x[(5 + j, i)]);
            }
        }
        assert!((bx[k] - expected).abs() < 1e-12);
    }
    let z = gaussian(12, 1, 1, 1).into_vec();
    let lhs = vec_dot(&bx, &z);
    let rhs = x.frob_dot(&lifted.adjoint(&z).unwrap());
    assert!((lhs - rhs).abs() < 1e-10);
    let block = gaussian(9, 9, 2, 0);
    assert_eq!(&p_diag(&block, 5) + &p_off(&block, 5), block);
}

#[test]
fn regularity_gates_and_truth() {
    let p = gen_problem(&ProblemParams::psd(10, 2, 2.0, 200, 0)).unwrap();
    let rep = check_regularity(&p.op, &p.b, &p.truth_factors, &p.truth_factors).unwrap();
    assert!(rep.passed());
    assert!(rep.items[0].lhs.abs() < 1e-20 && rep.items[0].rhs.abs() < 1e-20);
    let far = FactorPair::psd(p.truth_factors.u().scale(3.0));
    assert_eq!(check_regularity(&p.op, &p.b, &far, &p.truth_factors).unwrap().verdict, Verdict::Skip);
}

#[test]
fn regularity_along_trajectories() {
    for (mode, seed) in [(Mode::Psd, 0u64), (Mode::Psd, 1), (Mode::Rect, 0)] {
        let params = match mode {
            Mode::Psd => ProblemParams::psd(20, 2, 2.0, 600, seed),
            Mode::Rect => ProblemParams::rect(15, 12, 2, 2.0, 540, seed),
        };
        let p = gen_problem(&params).unwrap();
        let mut cfg = SolverConfig::new(2, mode);
        cfg.max_gd_iters = 40;
        let init = init_phase(&p.op, &p.b, &cfg, None).unwrap();
        let mut point = pflow_core::linalg::extract_factors(&init.mtilde, 2, mode == Mode::Psd).unwrap();
        let mut in_basin = 0;
        for _ in 0..40 {
            let rep = check_regularity(&p.op, &p.b, &point, &p.truth_factors).unwrap();
            assert!(!rep.failed(), "{mode:?} seed {seed}: {rep:?}");
            in_basin += usize::from(rep.passed());
            let mut step = cfg.clone();
            step.max_gd_iters = 1;
            point = gd_phase(&p.op, &p.b, point, &step, None, Default::default()).unwrap().factors;
        }
        assert!(in_basin > 0);
    }
}

#[test]
fn certify_solution_reports_serialize() {
    let p = gen_problem(&ProblemParams::rect(8, 6, 2, 2.0, 200, 3)).unwrap();
    let mut cfg = SolverConfig::new(2, Mode::Rect);
    cfg.max_gd_iters = 300;
    let sol = pflow_core::solver::procrustes_flow(&p.op, &p.b, &cfg, None).unwrap();
    assert!(sol.trace.phase_rows(Phase::Gd).count() > 1);
    let reports = certify_solution(&p.op, &p.b, &sol.factors, &p.truth_factors).unwrap();
    assert!(reports.iter().all(|r| !r.failed()));
    let json = serde_json::to_string(&reports).unwrap();
    assert!(json.contains("\"verdict\":\"pass\""));
}
