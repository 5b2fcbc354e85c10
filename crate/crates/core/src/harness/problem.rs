use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::linalg::{orthonormal_columns, FactorPair, Mat};
use crate::rng::{Domain, Stream};
use crate::sensing::{generate, EnsembleKind, MeasurementOp};
use crate::solver::Mode;

/// Parameters of a planted instance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProblemParams {
    pub n1: usize,
    pub n2: usize,
    pub r: usize,
    pub kappa: f64,
    pub sigma1: f64,
    pub m: usize,
    /// Defaults to the spiked ensemble in PSD mode and Gaussian otherwise.
    pub ensemble: Option<EnsembleKind>,
    pub mode: Mode,
    pub seed: u64,
}

impl ProblemParams {
    pub fn psd(n: usize, r: usize, kappa: f64, m: usize, seed: u64) -> Self {
        Self {
            n1: n,
            n2: n,
            r,
            kappa,
            sigma1: 1.0,
            m,
            ensemble: None,
            mode: Mode::Psd,
            seed,
        }
    }

    pub fn rect(n1: usize, n2: usize, r: usize, kappa: f64, m: usize, seed: u64) -> Self {
        Self {
            n1,
            n2,
            r,
            kappa,
            sigma1: 1.0,
            m,
            ensemble: None,
            mode: Mode::Rect,
            seed,
        }
    }

    pub fn ensemble_kind(&self) -> EnsembleKind {
        self.ensemble.unwrap_or(match self.mode {
            Mode::Psd => EnsembleKind::SpikedGaussian,
            Mode::Rect => EnsembleKind::Gaussian,
        })
    }
}

/// A rank-r matrix with prescribed spectrum, its measurements and the
/// operator that produced them.
#[derive(Debug, Clone)]
pub struct PlantedProblem {
    pub params: ProblemParams,
    pub truth_m: Mat,
    /// Balanced factors `X = AΣ^{1/2}`, `Y = BΣ^{1/2}` (PSD pair when `B = A`).
    pub truth_factors: FactorPair,
    pub singular_values: Vec<f64>,
    pub op: MeasurementOp,
    pub b: Vec<f64>,
}

impl PlantedProblem {
    pub fn kappa(&self) -> f64 {
        self.params.kappa
    }

    pub fn sigma_r(&self) -> f64 {
        *self.singular_values.last().expect("rank at least 1")
    }

    /// `‖M̂ − M‖_F / ‖M‖_F`.
    pub fn relative_error(&self, m_hat: &Mat) -> f64 {
        crate::solver::relative_error(m_hat, &self.truth_m)
    }
}

/// Geometric schedule `σ_i = σ₁ κ^{−(i−1)/(r−1)}`, `i = 1..r`.
pub fn geometric_spectrum(r: usize, kappa: f64, sigma1: f64) -> Vec<f64> {
    if r == 1 {
        return vec![sigma1];
    }
    (0..r)
        .map(|i| sigma1 * kappa.powf(-(i as f64) / (r - 1) as f64))
        .collect()
}

/// Draws the singular vectors from stream `(seed, Planted, 0)` (left) and
/// `(seed, Planted, 1)` (right) as QR factors of Gaussian matrices, and the
/// ensemble from `seed`.
pub fn gen_problem(params: &ProblemParams) -> Result<PlantedProblem> {
    let &ProblemParams {
        n1,
        n2,
        r,
        kappa,
        sigma1,
        m,
        mode,
        seed,
        ..
    } = params;
    if !(kappa >= 1.0 && kappa.is_finite()) {
        return Err(invalid(format!("kappa must be at least 1, got {kappa}")));
    }
    if !(sigma1 > 0.0 && sigma1.is_finite()) {
        return Err(invalid("sigma1 must be positive"));
    }
    if r == 0 || r > n1.min(n2) {
        return Err(invalid(format!("rank {r} must lie in 1..=min(n1, n2)")));
    }
    if mode == Mode::Psd && n1 != n2 {
        return Err(invalid("PSD problems need n1 = n2"));
    }
    let op = generate(params.ensemble_kind(), n1, n2, m, seed)?;
    let sigma = geometric_spectrum(r, kappa, sigma1);
    let roots: Vec<f64> = sigma.iter().map(|s| s.sqrt()).collect();
    let gaussian = |rows: usize, index: u64| {
        Mat::new(rows, r, Stream::new(seed, Domain::Planted, index).normals(rows * r, 1.0))
    };
    let a = orthonormal_columns(&gaussian(n1, 0)?)?;
    let x = a.scale_columns(&roots);
    let truth_factors = match mode {
        Mode::Psd => FactorPair::psd(x),
        Mode::Rect => {
            let bq = orthonormal_columns(&gaussian(n2, 1)?)?;
            FactorPair::rect(x, bq.scale_columns(&roots))?
        }
    };
    let truth_m = truth_factors.product();
    let b = op.apply(&truth_m)?;
    Ok(PlantedProblem {
        params: params.clone(),
        truth_m,
        truth_factors,
        singular_values: sigma,
        op,
        b,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spectrum_schedule() {
        assert_eq!(geometric_spectrum(3, 1.0, 2.0), vec![2.0; 3]);
        assert_eq!(geometric_spectrum(1, 9.0, 2.0), vec![2.0]);
        let s = geometric_spectrum(3, 100.0, 1.0);
        assert!((s[1] - 0.1).abs() < 1e-15 && (s[2] - 0.01).abs() < 1e-15);
    }

    #[test]
    fn validation() {
        assert!(gen_problem(&ProblemParams::psd(5, 2, 0.5, 10, 0)).is_err());
        assert!(gen_problem(&ProblemParams::rect(3, 4, 4, 2.0, 10, 0)).is_err());
        let mut p = ProblemParams::psd(5, 2, 2.0, 10, 0);
        p.n2 = 6;
        assert!(gen_problem(&p).is_err());
    }

    #[test]
    fn measurements_are_noiseless() {
        let p = gen_problem(&ProblemParams::psd(6, 2, 3.0, 20, 4)).unwrap();
        assert!(p.op.is_symmetric());
        assert_eq!(p.b, p.op.apply(&p.truth_m).unwrap());
        assert!(p.truth_m.asymmetry() < 1e-15);
    }
}
