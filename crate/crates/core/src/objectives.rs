//! Losses and gradients.
//!
//! * `f(U) = ¼‖A(UUᵀ) − b‖²` with `∇f(U) = A*(A(UUᵀ) − b) U`,
//! * `g(U, V) = ½‖A(UVᵀ) − b‖² + (1/16)‖UᵀU − VᵀV‖_F²` with
//!   `∇_U g = A*(r) V + ¼ U(UᵀU − VᵀV)` and
//!   `∇_V g = A*(r)ᵀ U + ¼ V(VᵀV − UᵀU)`,
//! * the truth-referenced `F(W) = ¼‖WWᵀ − ZZᵀ‖_F²` with
//!   `∇F(W) = (WWᵀ − ZZᵀ) W`, where `W` is `U` (PSD) or `[U; V]`.
//!
//! Gradients use a single adjoint call on the residual followed by a right
//! multiply, which equals the summed forms `Σ_k r_k A_k U`.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::linalg::{FactorPair, Mat};
use crate::sensing::MeasurementOp;

/// Value, gradient and residual at one point.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Evaluation {
    pub value: f64,
    /// Shaped like the evaluation point: PSD for `f`, rectangular for `g`.
    /// For `F` it is PSD-shaped in PSD mode and `(∇_U, ∇_V)` otherwise.
    pub gradient: FactorPair,
    /// `A(·) − b` for `f` and `g`; the row-major entries of `WWᵀ − ZZᵀ` for `F`.
    pub residual: Vec<f64>,
}

fn sq_norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum()
}

fn check_factor(op: &MeasurementOp, u: &Mat, rows: usize, name: &str) -> Result<()> {
    if u.rows() != rows {
        return Err(invalid(format!(
            "{name} has {} rows but the operator acts on {}x{} matrices",
            u.rows(),
            op.n1(),
            op.n2()
        )));
    }
    Ok(())
}

/// The PSD loss `f` at `u`.
pub fn f_eval(op: &MeasurementOp, b: &[f64], u: &Mat) -> Result<Evaluation> {
    if op.n1() != op.n2() {
        return Err(invalid("PSD objective needs a square operator"));
    }
    check_factor(op, u, op.n1(), "u")?;
    op.check_measurements(b)?;
    Ok(f_eval_unchecked(op, b, u))
}

pub(crate) fn f_eval_unchecked(op: &MeasurementOp, b: &[f64], u: &Mat) -> Evaluation {
    let residual = residual_of(op, &u.matmul_t(u), b);
    let gradient = op.adjoint_unchecked(&residual).matmul(u);
    Evaluation {
        value: 0.25 * sq_norm(&residual),
        gradient: FactorPair::psd(gradient),
        residual,
    }
}

/// The balanced rectangular loss `g` at `pair`. A PSD pair is treated as
/// `V = U`.
pub fn g_eval(op: &MeasurementOp, b: &[f64], pair: &FactorPair) -> Result<Evaluation> {
    check_factor(op, pair.u(), op.n1(), "u")?;
    check_factor(op, pair.v(), op.n2(), "v")?;
    op.check_measurements(b)?;
    Ok(g_eval_unchecked(op, b, pair))
}

pub(crate) fn g_eval_unchecked(op: &MeasurementOp, b: &[f64], pair: &FactorPair) -> Evaluation {
    let (u, v) = (pair.u(), pair.v());
    let residual = residual_of(op, &u.matmul_t(v), b);
    let s = op.adjoint_unchecked(&residual);
    let imbalance = &u.t_matmul(u) - &v.t_matmul(v);
    let mut gu = s.matmul(v);
    gu.axpy(0.25, &u.matmul(&imbalance));
    let mut gv = s.t_matmul(u);
    gv.axpy(-0.25, &v.matmul(&imbalance));
    let value = 0.5 * sq_norm(&residual) + imbalance.frob_norm().powi(2) / 16.0;
    Evaluation {
        value,
        gradient: FactorPair::rect(gu, gv).expect("gradient ranks agree"),
        residual,
    }
}

fn residual_of(op: &MeasurementOp, x: &Mat, b: &[f64]) -> Vec<f64> {
    let mut r = op.apply_unchecked(x);
    for (ri, bi) in r.iter_mut().zip(b) {
        *ri -= bi;
    }
    r
}

/// The truth-referenced surrogate `F` at `point`. Both arguments must be in
/// the same mode with matching shapes.
pub fn ref_f_eval(point: &FactorPair, truth: &FactorPair) -> Result<Evaluation> {
    if point.is_psd() != truth.is_psd() {
        return Err(invalid("point and truth must both be PSD or both rectangular"));
    }
    let w = point.dist_variable();
    let z = truth.dist_variable();
    if w.shape() != z.shape() || point.dims() != truth.dims() {
        return Err(invalid(format!(
            "point is {}x{} but truth is {}x{}",
            w.rows(),
            w.cols(),
            z.rows(),
            z.cols()
        )));
    }
    let diff = &w.matmul_t(&w) - &z.matmul_t(&z);
    let grad = diff.matmul(&w);
    let gradient = if point.is_psd() {
        FactorPair::psd(grad)
    } else {
        let n1 = point.u().rows();
        FactorPair::rect(grad.row_block(0, n1), grad.row_block(n1, grad.rows()))?
    };
    Ok(Evaluation {
        value: 0.25 * diff.frob_norm().powi(2),
        gradient,
        residual: diff.into_vec(),
    })
}
