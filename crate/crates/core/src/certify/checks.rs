use super::lifted::{p_diag, p_off, sym, LiftedOperator};
use super::report::{tolerance, Inequality, Report};
use crate::error::{invalid, Result};
use crate::linalg::{procrustes_align, project_rank_factored, singular_values, spectral_norm, FactorPair, Mat};
use crate::objectives::{f_eval, g_eval};
use crate::sensing::MeasurementOp;

const SQRT2: f64 = std::f64::consts::SQRT_2;

fn sigma_at(s: &[f64], k: usize) -> f64 {
    s.get(k).copied().unwrap_or(0.0)
}

/// Two bounds relating `dist(U, X)` to `‖UUᵀ − XXᵀ‖_F`:
///
/// * `dist² ≤ ‖UUᵀ − XXᵀ‖_F² / (2(√2 − 1) σ_r²(X))`, skipped when `X` is
///   rank deficient;
/// * `‖UUᵀ − XXᵀ‖_F ≤ (9/4)‖X‖ dist` when `dist ≤ ‖X‖/4`.
pub fn check_dist_bounds(u: &Mat, x: &Mat) -> Result<Report> {
    let align = procrustes_align(u, x)?;
    let d = align.distance;
    let gap = (&u.matmul_t(u) - &x.matmul_t(x)).frob_norm();
    let s = singular_values(x)?;
    let r = x.cols();
    let (s1, sr) = (sigma_at(&s, 0), sigma_at(&s, r.saturating_sub(1)));
    let mut items = Vec::new();
    if r > 0 && sr > 1e-12 * s1.max(f64::MIN_POSITIVE) {
        let rhs = gap * gap / (2.0 * (SQRT2 - 1.0) * sr * sr);
        items.push(Inequality::check("dist_upper_bound", d * d, rhs, tolerance(rhs)));
    } else {
        items.push(Inequality::skip("dist_upper_bound", "x is rank deficient"));
    }
    if d <= s1 / 4.0 {
        let rhs = 2.25 * s1 * d;
        items.push(Inequality::check("gap_by_dist", gap, rhs, tolerance(rhs)));
    } else {
        items.push(Inequality::skip("gap_by_dist", "dist exceeds ||x||/4"));
    }
    Ok(Report::new("dist_bounds", items))
}

/// The regularity inequality at `point`, measured against `truth`.
///
/// PSD: `⟨∇f, H⟩ ≥ (σ_r²(X)/4)‖H‖² + (32/425)‖∇f‖²/‖X‖²` with
/// `H = U − XR`, on `dist ≤ σ_r(X)/4`.
///
/// Rect: `⟨∇g, H⟩ ≥ (σ_r(M)/8)‖H‖² + 16‖∇g‖²/(1683‖M‖)` with
/// `H = W − ZR` on the stacked factors, on `dist ≤ σ_r(M)^{1/2}/(2√2)`.
///
/// Outside the radius the verdict is Skip. The tolerance is `1e-9` times the
/// magnitude of the terms.
pub fn check_regularity(op: &MeasurementOp, b: &[f64], point: &FactorPair, truth: &FactorPair) -> Result<Report> {
    if point.is_psd() != truth.is_psd() || point.dims() != truth.dims() || point.rank() != truth.rank() {
        return Err(invalid("point and truth must share mode and shape"));
    }
    let w = point.dist_variable();
    let z = truth.dist_variable();
    let align = procrustes_align(&w, &z)?;
    let h = &align.difference;
    let m_sv = singular_values(&truth.product())?;
    let r = truth.rank();
    let (m1, mr) = (sigma_at(&m_sv, 0), sigma_at(&m_sv, r - 1));
    let (name, radius) = if point.is_psd() {
        ("regularity_psd", mr.sqrt() / 4.0)
    } else {
        ("regularity_rect", mr.sqrt() / (2.0 * SQRT2))
    };
    if align.distance > radius {
        return Ok(Report::new(
            "regularity",
            vec![Inequality::skip(name, format!("dist {:.3e} exceeds radius {radius:.3e}", align.distance))],
        ));
    }
    let (grad, curvature, smoothness) = if point.is_psd() {
        let e = f_eval(op, b, point.u())?;
        // σ_r²(X) = σ_r(M), ‖X‖² = ‖M‖.
        (e.gradient.u().clone(), mr / 4.0, 32.0 / (425.0 * m1))
    } else {
        let e = g_eval(op, b, point)?;
        (e.gradient.stacked(), mr / 8.0, 16.0 / (1683.0 * m1))
    };
    let inner = grad.frob_dot(h);
    let a = curvature * h.frob_norm().powi(2);
    let c = if m1 > 0.0 {
        smoothness * grad.frob_norm().powi(2)
    } else {
        0.0
    };
    let scale = inner.abs() + a + c;
    Ok(Report::new(
        "regularity",
        vec![Inequality::check(name, a + c, inner, 1e-9 * scale.max(1.0))],
    ))
}

/// The lifted representation of the rectangular gradient,
/// `∇g(W) = ½B*B(WWᵀ − Sym(M))W + ¼(P_diag − P_off)(WWᵀ)W`, compared with
/// the direct gradient. Needs `b = A(m_truth)`.
pub fn check_lifted_gradient(op: &MeasurementOp, b: &[f64], pair: &FactorPair, m_truth: &Mat) -> Result<Report> {
    let expected = op.apply(m_truth)?;
    op.check_measurements(b)?;
    let bnorm = b.iter().map(|x| x * x).sum::<f64>().sqrt();
    let mismatch = expected
        .iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max);
    if mismatch > 1e-12 * (1.0 + bnorm) {
        return Err(invalid(format!(
            "measurements differ from A(m_truth) by {mismatch:e}"
        )));
    }
    let direct = g_eval(op, b, pair)?.gradient.stacked();
    let lifted = LiftedOperator::new(op);
    let n1 = op.n1();
    let w = pair.stacked();
    let wwt = w.matmul_t(&w);
    let delta = &wwt - &sym(m_truth);
    let data = lifted.adjoint(&lifted.apply(&delta)?)?.matmul(&w).scale(0.5);
    let reg = (&p_diag(&wwt, n1) - &p_off(&wwt, n1)).matmul(&w).scale(0.25);
    let assembled = &data + &reg;
    let diff = (&direct - &assembled).max_abs();
    let bound = 1e-10 * (1.0 + direct.frob_norm());
    Ok(Report::new(
        "lifted_gradient",
        vec![Inequality::check("lifted_gradient_identity", diff, 0.0, bound)],
    ))
}

/// Stability of balanced factors under perturbation: with `X_ℓ = U_ℓΣ_ℓ^{1/2}`,
/// `Y_ℓ = V_ℓΣ_ℓ^{1/2}` from the SVD of `M_ℓ`,
/// `dist²([X₂;Y₂], [X₁;Y₁]) ≤ (2/(√2−1))‖M₂ − M₁‖_F²/σ_r(M₁)` whenever
/// `‖M₂ − M₁‖ ≤ σ_r(M₁)/2`. Both matrices must have rank `r`.
pub fn check_factor_perturbation(m1: &Mat, m2: &Mat, r: usize) -> Result<Report> {
    if m1.shape() != m2.shape() {
        return Err(invalid("m1 and m2 shapes differ"));
    }
    if r == 0 || r > m1.rows().min(m1.cols()) {
        return Err(invalid("rank out of range"));
    }
    for (name, m) in [("m1", m1), ("m2", m2)] {
        let s = singular_values(m)?;
        let s1 = sigma_at(&s, 0);
        if sigma_at(&s, r - 1) <= 1e-8 * s1 || sigma_at(&s, r) > 1e-8 * s1 {
            return Err(invalid(format!("{name} does not have rank {r}")));
        }
    }
    let s1 = singular_values(m1)?;
    let sr = s1[r - 1];
    let diff = m2 - m1;
    if spectral_norm(&diff) > sr / 2.0 {
        return Ok(Report::new(
            "factor_perturbation",
            vec![Inequality::skip("factor_perturbation", "||m2 - m1|| exceeds sigma_r(m1)/2")],
        ));
    }
    let (_, f1) = project_rank_factored(m1, r)?;
    let (_, f2) = project_rank_factored(m2, r)?;
    let d = procrustes_align(&f2.stacked(), &f1.stacked())?.distance;
    let rhs = 2.0 / (SQRT2 - 1.0) * diff.frob_norm().powi(2) / sr;
    Ok(Report::new(
        "factor_perturbation",
        vec![Inequality::check("factor_perturbation", d * d, rhs, tolerance(rhs))],
    ))
}

/// `‖UVᵀ − XYᵀ‖_F ≤ (9/(4√2))‖Z‖ dist(W, Z)` when `dist(W, Z) ≤ ‖Z‖/4`,
/// with `W = [U; V]` and `Z = [X; Y]`.
pub fn check_product_dist_bound(pair: &FactorPair, truth: &FactorPair) -> Result<Report> {
    if pair.dims() != truth.dims() || pair.rank() != truth.rank() {
        return Err(invalid("pair and truth shapes differ"));
    }
    let w = pair.stacked();
    let z = truth.stacked();
    let d = procrustes_align(&w, &z)?.distance;
    let zn = spectral_norm(&z);
    if d > zn / 4.0 {
        return Ok(Report::new(
            "product_dist_bound",
            vec![Inequality::skip("product_dist_bound", "dist exceeds ||Z||/4")],
        ));
    }
    let lhs = (&pair.product() - &truth.product()).frob_norm();
    let rhs = 9.0 / (4.0 * SQRT2) * zn * d;
    Ok(Report::new(
        "product_dist_bound",
        vec![Inequality::check("product_dist_bound", lhs, rhs, tolerance(rhs))],
    ))
}

/// Every checker that applies to a solved instance with known truth.
pub fn certify_solution(op: &MeasurementOp, b: &[f64], solution: &FactorPair, truth: &FactorPair) -> Result<Vec<Report>> {
    let mut out = Vec::new();
    if solution.is_psd() {
        out.push(check_dist_bounds(solution.u(), truth.u())?);
    } else {
        out.push(check_dist_bounds(&solution.stacked(), &truth.stacked())?);
        out.push(check_lifted_gradient(op, b, solution, &truth.product())?);
        out.push(check_product_dist_bound(solution, truth)?);
        let r = truth.rank();
        let m_hat = solution.product();
        let s = singular_values(&m_hat)?;
        if sigma_at(&s, r - 1) > 1e-8 * sigma_at(&s, 0) {
            out.push(check_factor_perturbation(&truth.product(), &m_hat, r)?);
        }
    }
    out.push(check_regularity(op, b, solution, truth)?);
    Ok(out)
}
