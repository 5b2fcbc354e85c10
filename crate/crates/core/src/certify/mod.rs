//! Runtime checks of the inequalities and identities behind the convergence
//! guarantees. Each checker returns a [`Report`] with a pass, fail or skip
//! verdict and the numeric slack; a skip means the hypothesis of the
//! inequality does not hold at the given input.

mod checks;
mod lifted;
mod report;

pub use checks::{
    certify_solution, check_dist_bounds, check_factor_perturbation, check_lifted_gradient,
    check_product_dist_bound, check_regularity,
};
pub use lifted::{p_diag, p_off, sym, LiftedOperator, LiftedPair};
pub use report::{tolerance, Inequality, Report, Verdict};

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{FactorPair, Mat};

    #[test]
    fn scalar_dist_bounds() {
        let r = check_dist_bounds(&Mat::diag(&[2.0]), &Mat::diag(&[1.0])).unwrap();
        let upper = r.item("dist_upper_bound").unwrap();
        assert_eq!(upper.lhs, 1.0);
        assert!((upper.rhs - 9.0 / (2.0 * (2f64.sqrt() - 1.0))).abs() < 1e-12);
        assert!(r.passed());
        // dist 1 > ||x||/4, so the second bound does not apply.
        assert_eq!(r.item("gap_by_dist").unwrap().verdict, Verdict::Skip);
    }

    #[test]
    fn scalar_product_bound() {
        let s = |x: f64| Mat::diag(&[x]);
        let pair = FactorPair::rect(s(1.1), s(1.1)).unwrap();
        let truth = FactorPair::rect(s(1.0), s(1.0)).unwrap();
        let r = check_product_dist_bound(&pair, &truth).unwrap();
        let item = &r.items[0];
        assert!((item.lhs - 0.21).abs() < 1e-12);
        // (9/(4√2))·√2·(√2·0.1)
        assert!((item.rhs - 9.0 / 4.0 * 2f64.sqrt() * 0.1).abs() < 1e-12);
        assert!(r.passed());
    }

    #[test]
    fn projections_partition_blocks() {
        let x = Mat::from_fn(5, 5, |i, j| (i * 5 + j) as f64 + 1.0);
        let sum = &p_diag(&x, 2) + &p_off(&x, 2);
        assert_eq!(sum, x);
        assert_eq!(p_diag(&x, 2)[(0, 3)], 0.0);
        assert_eq!(p_off(&x, 2)[(0, 3)], x[(0, 3)]);
    }

    #[test]
    fn perturbation_gate() {
        let m1 = Mat::diag(&[2.0, 1.0, 0.0]);
        let m2 = Mat::diag(&[2.0, 1.9, 0.0]);
        let r = check_factor_perturbation(&m1, &m2, 2).unwrap();
        assert_eq!(r.verdict, Verdict::Skip);
        let same = check_factor_perturbation(&m1, &m1, 2).unwrap();
        assert!(same.passed());
        assert!(check_factor_perturbation(&m1, &Mat::diag(&[2.0, 1.0, 0.5]), 2).is_err());
    }
}
