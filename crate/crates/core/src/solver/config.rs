use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::sensing::MeasurementOp;

/// Largest gradient step covered by the PSD convergence theorem.
pub const MU_PSD: f64 = 36.0 / 425.0;
/// Largest gradient step covered by the rectangular convergence theorem.
pub const MU_RECT: f64 = 2.0 / 187.0;
/// The initialization stop test passes when `e_τ ≤ STOP_RATIO · σ_r(M̃_τ)`.
pub const STOP_RATIO: f64 = 3.0 / 20.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    /// `M = UUᵀ`, PSD projections, loss `f`.
    Psd,
    /// `M = UVᵀ`, rank-r projections, loss `g`.
    Rect,
}

impl Mode {
    pub fn name(self) -> &'static str {
        match self {
            Mode::Psd => "psd",
            Mode::Rect => "rect",
        }
    }

    pub fn default_mu(self) -> f64 {
        match self {
            Mode::Psd => MU_PSD,
            Mode::Rect => MU_RECT,
        }
    }
}

impl std::str::FromStr for Mode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "psd" => Ok(Mode::Psd),
            "rect" | "rectangular" => Ok(Mode::Rect),
            other => Err(format!("unknown mode {other:?} (expected psd or rect)")),
        }
    }
}

/// How many projected-gradient steps the initialization runs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InitSchedule {
    /// `⌈log(√r κ̂)⌉ + 2` (PSD) or `⌈3 log(√r κ̂) + 5⌉` (rect), with `κ̂`
    /// read off the first iterate.
    Theory,
    /// Stop at the first iterate passing the residual test
    /// `e_τ ≤ (3/20) σ_r(M̃_τ)`, at most `init_cap` steps.
    Auto,
    Fixed(usize),
}

/// Step count prescribed by the initialization theorems for condition
/// number `kappa`.
pub fn theory_t_init(mode: Mode, r: usize, kappa: f64) -> usize {
    let l = ((r as f64).sqrt() * kappa.max(1.0)).ln();
    match mode {
        Mode::Psd => l.ceil() as usize + 2,
        Mode::Rect => (3.0 * l + 5.0).ceil() as usize,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SolverConfig {
    pub r: usize,
    pub mode: Mode,
    /// Initialization step. `None` uses `d / Σ_k ‖A_k‖_F²`, where `d` is the
    /// dimension the ensemble is isotropic on; this is `1/m` for unit-variance
    /// entries and about 1 for the normalized ensembles in this crate.
    pub alpha: Option<f64>,
    /// Gradient step; `None` uses [`MU_PSD`] or [`MU_RECT`].
    pub mu: Option<f64>,
    pub t_init: InitSchedule,
    pub max_gd_iters: usize,
    /// Stop once `‖A(UVᵀ) − b‖ ≤ residual_tol · ‖b‖`.
    pub residual_tol: f64,
    pub init_cap: usize,
    /// With a known truth, also stop once `‖UVᵀ − M‖_F ≤ target_error · ‖M‖_F`.
    pub target_error: Option<f64>,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            r: 1,
            mode: Mode::Psd,
            alpha: None,
            mu: None,
            t_init: InitSchedule::Theory,
            max_gd_iters: 5000,
            residual_tol: 1e-10,
            init_cap: 200,
            target_error: None,
        }
    }
}

impl SolverConfig {
    pub fn new(r: usize, mode: Mode) -> Self {
        Self {
            r,
            mode,
            ..Self::default()
        }
    }

    pub fn mu(&self) -> f64 {
        self.mu.unwrap_or_else(|| self.mode.default_mu())
    }

    pub fn alpha_for(&self, op: &MeasurementOp) -> f64 {
        self.alpha.unwrap_or_else(|| {
            let energy = op.total_energy();
            if energy > 0.0 {
                op.isotropic_dimension() as f64 / energy
            } else {
                1.0
            }
        })
    }

    pub fn validate(&self) -> Result<()> {
        if self.r == 0 {
            return Err(invalid("rank r must be at least 1"));
        }
        if !(self.mu() > 0.0 && self.mu().is_finite()) {
            return Err(invalid("mu must be positive and finite"));
        }
        if let Some(a) = self.alpha {
            if !(a > 0.0 && a.is_finite()) {
                return Err(invalid("alpha must be positive and finite"));
            }
        }
        if !(self.residual_tol >= 0.0) {
            return Err(invalid("residual_tol must be nonnegative"));
        }
        if self.init_cap == 0 && self.t_init != InitSchedule::Fixed(0) {
            return Err(invalid("init_cap must be at least 1"));
        }
        if let Some(t) = self.target_error {
            if !(t >= 0.0) {
                return Err(invalid("target_error must be nonnegative"));
            }
        }
        Ok(())
    }

    pub(crate) fn check_op(&self, op: &MeasurementOp, b: &[f64]) -> Result<()> {
        self.validate()?;
        op.check_measurements(b)?;
        if b.iter().any(|x| !x.is_finite()) {
            return Err(invalid("measurements must be finite"));
        }
        if self.mode == Mode::Psd && op.n1() != op.n2() {
            return Err(invalid("PSD mode needs a square operator"));
        }
        if self.r > op.n1().min(op.n2()) {
            return Err(invalid(format!(
                "rank {} exceeds min(n1, n2) = {}",
                self.r,
                op.n1().min(op.n2())
            )));
        }
        Ok(())
    }
}
