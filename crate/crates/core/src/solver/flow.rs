use serde::{Deserialize, Serialize};

use super::config::{theory_t_init, InitSchedule, Mode, SolverConfig, STOP_RATIO};
use super::trace::{Phase, SolveTrace, TraceRow};
use crate::error::{invalid, Error, Result};
use crate::linalg::{
    dist, extract_factors, factored_singular_values, project_rank_factored,
    project_rank_psd_factored, spectral_norm, FactorPair, Mat,
};
use crate::objectives::{f_eval_unchecked, g_eval_unchecked};
use crate::sensing::MeasurementOp;

/// Outcome of the residual stop test on one initialization iterate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StopVerdict {
    pub passed: bool,
    /// `e_τ = ‖A(M̃_τ) − b‖`.
    pub residual: f64,
    pub sigma_r: f64,
    /// `(3/20) σ_r − e_τ`; nonnegative exactly when the test passes.
    pub margin: f64,
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn residual_of(op: &MeasurementOp, x: &Mat, b: &[f64]) -> Vec<f64> {
    let mut r = op.apply_unchecked(x);
    for (ri, bi) in r.iter_mut().zip(b) {
        *ri -= bi;
    }
    r
}

fn verdict(residual: f64, sigma_r: f64) -> StopVerdict {
    let margin = STOP_RATIO * sigma_r - residual;
    StopVerdict {
        passed: sigma_r > 0.0 && margin >= 0.0,
        residual,
        sigma_r,
        margin,
    }
}

/// Tests `‖A(M̃) − b‖ ≤ (3/20) σ_r(M̃)` for `M̃ = UVᵀ` given by `factors`,
/// with `σ_r` taken from the factors. A rank-deficient iterate fails.
pub fn check_init_complete(op: &MeasurementOp, b: &[f64], factors: &FactorPair) -> Result<StopVerdict> {
    op.check_measurements(b)?;
    if factors.dims() != (op.n1(), op.n2()) {
        return Err(invalid("factors do not match the operator shape"));
    }
    let res = norm(&residual_of(op, &factors.product(), b));
    let sigma_r = factored_singular_values(factors).last().copied().unwrap_or(0.0);
    Ok(verdict(res, sigma_r))
}

/// Result of the initialization phase.
#[derive(Debug, Clone)]
pub struct InitOutput {
    /// The handed-off iterate `M̃_{T₀}`.
    pub mtilde: Mat,
    /// Factors of `mtilde` as produced by the projection.
    pub factors: FactorPair,
    pub trace: SolveTrace,
}

/// One projected-gradient update `P_r(M̃ − α A*(A(M̃) − b))`, given the
/// residual of `current`.
fn projected_step(
    op: &MeasurementOp,
    current: &Mat,
    residual: &[f64],
    alpha: f64,
    r: usize,
    mode: Mode,
) -> Result<Option<(Mat, FactorPair)>> {
    let mut y = current.clone();
    y.axpy(-alpha, &op.adjoint_unchecked(residual));
    if !y.is_finite() {
        return Ok(None);
    }
    Ok(Some(match mode {
        Mode::Psd => project_rank_psd_factored(&y, r)?,
        Mode::Rect => project_rank_factored(&y, r)?,
    }))
}

fn zero_factors(op: &MeasurementOp, r: usize, mode: Mode) -> FactorPair {
    match mode {
        Mode::Psd => FactorPair::psd(Mat::zeros(op.n1(), r)),
        Mode::Rect => FactorPair::rect(Mat::zeros(op.n1(), r), Mat::zeros(op.n2(), r))
            .expect("equal ranks"),
    }
}

fn init_row(
    iter: usize,
    residual: f64,
    factors: &FactorPair,
    truth: Option<&FactorPair>,
    prev_dist: Option<f64>,
) -> (TraceRow, StopVerdict) {
    let sv = factored_singular_values(factors);
    let v = verdict(residual, sv.last().copied().unwrap_or(0.0));
    let d = truth.map(|t| distance(factors, t));
    let rel_error = truth.map(|t| relative_error(&factors.product(), &t.product()));
    (
        TraceRow {
            phase: Phase::Init,
            iter,
            residual,
            objective: None,
            sigma_r: Some(v.sigma_r),
            dist: d,
            contraction: ratio(d, prev_dist),
            stop_test: Some(v.passed),
            rel_error,
        },
        v,
    )
}

fn ratio(cur: Option<f64>, prev: Option<f64>) -> Option<f64> {
    match (cur, prev) {
        (Some(c), Some(p)) if p > 0.0 => Some(c / p),
        _ => None,
    }
}

fn distance(pair: &FactorPair, truth: &FactorPair) -> f64 {
    dist(&pair.dist_variable(), &truth.dist_variable()).unwrap_or(f64::NAN)
}

pub(crate) fn relative_error(x: &Mat, m: &Mat) -> f64 {
    let diff = (x - m).frob_norm();
    let scale = m.frob_norm();
    if scale > 0.0 {
        diff / scale
    } else {
        diff
    }
}

fn check_truth(op: &MeasurementOp, cfg: &SolverConfig, truth: Option<&FactorPair>) -> Result<()> {
    if let Some(t) = truth {
        if t.dims() != (op.n1(), op.n2()) || t.rank() != cfg.r {
            return Err(invalid("truth factors do not match the operator shape and rank"));
        }
        if t.is_psd() != (cfg.mode == Mode::Psd) {
            return Err(invalid("truth factors are in the wrong mode"));
        }
    }
    Ok(())
}

/// Projected-gradient initialization from `M̃₀ = 0`.
///
/// Runs the schedule in `cfg.t_init`. Under AUTO, when no iterate passes the
/// stop test within `init_cap` steps, the iterate with the smallest
/// `e_τ / σ_r(M̃_τ)` is returned and `trace.init_completed` is `false`. A
/// non-finite update also ends the phase at that best iterate.
pub fn init_phase(
    op: &MeasurementOp,
    b: &[f64],
    cfg: &SolverConfig,
    truth: Option<&FactorPair>,
) -> Result<InitOutput> {
    cfg.check_op(op, b)?;
    check_truth(op, cfg, truth)?;
    let alpha = cfg.alpha_for(op);
    let r = cfg.r;
    let mut trace = SolveTrace {
        stop_test_heuristic: cfg.mode == Mode::Rect && cfg.t_init == InitSchedule::Auto,
        ..SolveTrace::default()
    };
    let mut current = Mat::zeros(op.n1(), op.n2());
    let mut factors = zero_factors(op, r, cfg.mode);
    let mut res = residual_of(op, &current, b);
    let (row, _) = init_row(0, norm(&res), &factors, truth, None);
    let mut prev_dist = row.dist;
    trace.push(row);

    let mut target = match cfg.t_init {
        InitSchedule::Fixed(t) => Some(t),
        InitSchedule::Theory => None,
        InitSchedule::Auto => Some(cfg.init_cap),
    };
    // Best iterate by e/σ_r, used when AUTO never passes.
    let mut best: Option<(f64, usize, Mat, FactorPair)> = None;
    let mut passed = false;
    let mut tau = 0;
    while target.map_or(true, |t| tau < t) {
        let Some((next, next_factors)) = projected_step(op, &current, &res, alpha, r, cfg.mode)? else {
            log::warn!("initialization produced a non-finite iterate at step {}", tau + 1);
            break;
        };
        tau += 1;
        trace.svd_count += 1;
        current = next;
        factors = next_factors;
        res = residual_of(op, &current, b);
        let (row, v) = init_row(tau, norm(&res), &factors, truth, prev_dist);
        prev_dist = row.dist;
        trace.push(row);
        if target.is_none() {
            let sv = factored_singular_values(&factors);
            let kappa = match (sv.first(), sv.last()) {
                (Some(&s1), Some(&sr)) if sr > 0.0 => s1 / sr,
                _ => f64::INFINITY,
            };
            let t0 = if kappa.is_finite() {
                theory_t_init(cfg.mode, r, kappa).clamp(1, cfg.init_cap.max(1))
            } else {
                cfg.init_cap.max(1)
            };
            log::debug!("estimated condition number {kappa:.3}, T0 = {t0}");
            target = Some(t0);
        }
        if cfg.t_init == InitSchedule::Auto {
            if v.passed {
                passed = true;
                break;
            }
            if v.sigma_r > 0.0 {
                let score = v.residual / v.sigma_r;
                if best.as_ref().map_or(true, |(s, ..)| score < *s) {
                    best = Some((score, tau, current.clone(), factors.clone()));
                }
            }
        }
    }
    if cfg.t_init == InitSchedule::Auto {
        trace.init_completed = Some(passed);
        if !passed {
            if let Some((_, t, m, f)) = best {
                log::warn!("initialization stop test never passed; using iterate {t}");
                current = m;
                factors = f;
                tau = t;
            }
        }
    }
    trace.init_steps = tau;
    Ok(InitOutput {
        mtilde: current,
        factors,
        trace,
    })
}

/// A solved instance.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Solution {
    pub factors: FactorPair,
    /// `U Vᵀ` (or `U Uᵀ`).
    pub m_hat: Mat,
    pub trace: SolveTrace,
    /// Whether the final relative residual is at most `residual_tol`.
    pub converged: bool,
    pub relative_residual: f64,
}

/// Factored gradient descent from `start`.
///
/// PSD: `U ← U − (μ/‖U₀‖²) ∇f(U)`. Rect: `U ← U − (μ/‖U₀‖²) ∇_U g`,
/// `V ← V − (μ/‖V₀‖²) ∇_V g`. The operator norms of the starting factors are
/// frozen at entry. `trace` is extended with one GD row per iterate,
/// including the start.
pub fn gd_phase(
    op: &MeasurementOp,
    b: &[f64],
    start: FactorPair,
    cfg: &SolverConfig,
    truth: Option<&FactorPair>,
    mut trace: SolveTrace,
) -> Result<Solution> {
    cfg.check_op(op, b)?;
    check_truth(op, cfg, truth)?;
    if start.is_psd() != (cfg.mode == Mode::Psd) {
        return Err(invalid("starting factors are in the wrong mode"));
    }
    if start.dims() != (op.n1(), op.n2()) || start.rank() != cfg.r {
        return Err(invalid("starting factors do not match the operator shape and rank"));
    }
    let mu = cfg.mu();
    let nu = spectral_norm(start.u()).powi(2);
    let nv = spectral_norm(start.v()).powi(2);
    let bnorm = norm(b);
    let truth_m = truth.map(FactorPair::product);
    let (mut u, mut v) = start.into_parts();
    let mut prev_dist = None;
    let mut iter = 0;
    loop {
        let pair = match &v {
            None => FactorPair::psd(u.clone()),
            Some(v) => FactorPair::rect(u.clone(), v.clone())?,
        };
        let eval = match cfg.mode {
            Mode::Psd => f_eval_unchecked(op, b, &u),
            Mode::Rect => g_eval_unchecked(op, b, &pair),
        };
        let res = norm(&eval.residual);
        if !res.is_finite() || !eval.gradient.is_finite() {
            return Err(Error::Diverged {
                iteration: iter,
                trace: Box::new(trace),
            });
        }
        let rel_res = if bnorm > 0.0 { res / bnorm } else { res };
        let d = truth.map(|t| distance(&pair, t));
        let rel_error = truth_m.as_ref().map(|m| relative_error(&pair.product(), m));
        trace.push(TraceRow {
            phase: Phase::Gd,
            iter,
            residual: res,
            objective: Some(eval.value),
            sigma_r: None,
            dist: d,
            contraction: ratio(d, prev_dist),
            stop_test: None,
            rel_error,
        });
        prev_dist = d;
        let converged = rel_res <= cfg.residual_tol;
        let reached = matches!((rel_error, cfg.target_error), (Some(e), Some(t)) if e <= t);
        if converged || reached || iter >= cfg.max_gd_iters || nu == 0.0 {
            return Ok(Solution {
                m_hat: pair.product(),
                factors: pair,
                trace,
                converged,
                relative_residual: rel_res,
            });
        }
        u.axpy(-mu / nu, eval.gradient.u());
        if let Some(v) = v.as_mut() {
            v.axpy(-mu / nv, eval.gradient.v());
        }
        iter += 1;
        if !u.is_finite() || v.as_ref().is_some_and(|v| !v.is_finite()) {
            return Err(Error::Diverged {
                iteration: iter,
                trace: Box::new(trace),
            });
        }
    }
}

/// Procrustes Flow: initialization, factor extraction and gradient descent.
pub fn procrustes_flow(
    op: &MeasurementOp,
    b: &[f64],
    cfg: &SolverConfig,
    truth: Option<&FactorPair>,
) -> Result<Solution> {
    if cfg.mode == Mode::Psd && !op.is_symmetric() {
        log::warn!("PSD mode with a non-symmetric ensemble; using the sensing matrices as given");
    }
    let init = init_phase(op, b, cfg, truth)?;
    let start = extract_factors(&init.mtilde, cfg.r, cfg.mode == Mode::Psd)?;
    gd_phase(op, b, start, cfg, truth, init.trace)
}

/// Iterative hard thresholding: `iters` projected-gradient steps from zero
/// with no factored phase. With a truth `M`, rows record `‖M̃_τ − M‖_F` in
/// `dist`. Stops early once `target_error` is reached or on a non-finite
/// update.
pub fn iht_baseline(
    op: &MeasurementOp,
    b: &[f64],
    cfg: &SolverConfig,
    iters: usize,
    truth: Option<&Mat>,
) -> Result<(Mat, SolveTrace)> {
    cfg.check_op(op, b)?;
    if iters == 0 {
        return Err(invalid("IHT needs at least one iteration"));
    }
    if let Some(m) = truth {
        if m.shape() != (op.n1(), op.n2()) {
            return Err(invalid("truth does not match the operator shape"));
        }
    }
    let alpha = cfg.alpha_for(op);
    let mut trace = SolveTrace::default();
    let mut current = Mat::zeros(op.n1(), op.n2());
    let mut factors = zero_factors(op, cfg.r, cfg.mode);
    let mut res = residual_of(op, &current, b);
    let mut prev = None;
    for tau in 0..=iters {
        let sv = factored_singular_values(&factors);
        let v = verdict(norm(&res), sv.last().copied().unwrap_or(0.0));
        let d = truth.map(|m| (&current - m).frob_norm());
        let rel_error = truth.map(|m| relative_error(&current, m));
        trace.push(TraceRow {
            phase: Phase::Iht,
            iter: tau,
            residual: v.residual,
            objective: None,
            sigma_r: Some(v.sigma_r),
            dist: d,
            contraction: ratio(d, prev),
            stop_test: Some(v.passed),
            rel_error,
        });
        prev = d;
        let reached = matches!((rel_error, cfg.target_error), (Some(e), Some(t)) if e <= t);
        if tau == iters || reached {
            break;
        }
        let Some((next, f)) = projected_step(op, &current, &res, alpha, cfg.r, cfg.mode)? else {
            log::warn!("IHT produced a non-finite iterate at step {}", tau + 1);
            break;
        };
        trace.svd_count += 1;
        current = next;
        factors = f;
        res = residual_of(op, &current, b);
    }
    trace.init_steps = trace.svd_count;
    Ok((current, trace))
}
