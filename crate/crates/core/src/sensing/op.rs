use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::linalg::{dot, Mat};

/// Dense ensembles larger than this many entries are refused.
pub const MAX_DENSE_ENTRIES: u128 = 1 << 27;

/// Random ensembles the crate can (re)generate from a seed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EnsembleKind {
    /// i.i.d. N(0, 1/m) entries.
    Gaussian,
    /// Symmetric; N(0, 1/m) diagonal and N(0, 1/2m) off-diagonal entries.
    SpikedGaussian,
}

impl EnsembleKind {
    pub fn name(self) -> &'static str {
        match self {
            EnsembleKind::Gaussian => "gaussian",
            EnsembleKind::SpikedGaussian => "spiked_gaussian",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        match name {
            "gaussian" => Some(EnsembleKind::Gaussian),
            "spiked_gaussian" | "spiked" => Some(EnsembleKind::SpikedGaussian),
            _ => None,
        }
    }
}

/// Where a generated ensemble came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct EnsembleOrigin {
    pub kind: EnsembleKind,
    pub seed: u64,
}

pub(crate) fn check_memory(n1: usize, n2: usize, m: usize) -> Result<()> {
    let entries = n1 as u128 * n2 as u128 * m as u128;
    if entries > MAX_DENSE_ENTRIES {
        return Err(Error::MemoryGuard {
            entries,
            limit: MAX_DENSE_ENTRIES,
        });
    }
    Ok(())
}

/// The linear map `A: ℝ^{n₁×n₂} → ℝ^m`, `A(X)_k = ⟨A_k, X⟩`, stored densely.
#[derive(Clone)]
pub struct MeasurementOp {
    n1: usize,
    n2: usize,
    m: usize,
    /// `A_1, …, A_m`, each n₁×n₂ row-major, concatenated.
    data: Vec<f64>,
    symmetric: bool,
    origin: Option<EnsembleOrigin>,
}

impl std::fmt::Debug for MeasurementOp {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("MeasurementOp")
            .field("n1", &self.n1)
            .field("n2", &self.n2)
            .field("m", &self.m)
            .field("symmetric", &self.symmetric)
            .field("origin", &self.origin)
            .finish_non_exhaustive()
    }
}

impl MeasurementOp {
    /// Builds an operator from explicit sensing matrices. The symmetric flag
    /// is set when every `A_k` is square with `‖A_k − A_kᵀ‖_F ≤ 1e-12`.
    pub fn from_matrices(n1: usize, n2: usize, matrices: &[Mat]) -> Result<Self> {
        if n1 == 0 || n2 == 0 || matrices.is_empty() {
            return Err(invalid("operator needs n1, n2, m >= 1"));
        }
        check_memory(n1, n2, matrices.len())?;
        let mut data = Vec::with_capacity(n1 * n2 * matrices.len());
        for (k, a) in matrices.iter().enumerate() {
            if a.shape() != (n1, n2) {
                return Err(invalid(format!(
                    "sensing matrix {k} is {:?}, expected ({n1}, {n2})",
                    a.shape()
                )));
            }
            if !a.is_finite() {
                return Err(invalid(format!("sensing matrix {k} is not finite")));
            }
            data.extend_from_slice(a.as_slice());
        }
        let symmetric = n1 == n2 && matrices.iter().all(|a| a.asymmetry() <= 1e-12);
        Ok(Self {
            n1,
            n2,
            m: matrices.len(),
            data,
            symmetric,
            origin: None,
        })
    }

    pub(crate) fn from_raw(
        n1: usize,
        n2: usize,
        m: usize,
        data: Vec<f64>,
        symmetric: bool,
        origin: Option<EnsembleOrigin>,
    ) -> Self {
        debug_assert_eq!(data.len(), n1 * n2 * m);
        Self {
            n1,
            n2,
            m,
            data,
            symmetric,
            origin,
        }
    }

    pub fn n1(&self) -> usize {
        self.n1
    }

    pub fn n2(&self) -> usize {
        self.n2
    }

    /// Number of measurements.
    pub fn m(&self) -> usize {
        self.m
    }

    pub fn is_symmetric(&self) -> bool {
        self.symmetric
    }

    pub fn origin(&self) -> Option<EnsembleOrigin> {
        self.origin
    }

    fn block(&self) -> usize {
        self.n1 * self.n2
    }

    /// Sensing matrix `A_k` (zero-based).
    pub fn matrix(&self, k: usize) -> Mat {
        let b = self.block();
        Mat::from_vec(self.n1, self.n2, self.data[k * b..(k + 1) * b].to_vec())
    }

    pub fn matrices(&self) -> impl Iterator<Item = Mat> + '_ {
        (0..self.m).map(|k| self.matrix(k))
    }

    fn check_input(&self, x: &Mat) -> Result<()> {
        if x.shape() != (self.n1, self.n2) {
            return Err(invalid(format!(
                "operator expects {}x{} input, got {}x{}",
                self.n1,
                self.n2,
                x.rows(),
                x.cols()
            )));
        }
        Ok(())
    }

    /// `A(x)`, with component `k` equal to `Tr(A_kᵀ x)`.
    pub fn apply(&self, x: &Mat) -> Result<Vec<f64>> {
        self.check_input(x)?;
        Ok(self.apply_unchecked(x))
    }

    pub(crate) fn apply_unchecked(&self, x: &Mat) -> Vec<f64> {
        let xs = x.as_slice();
        self.data
            .chunks_exact(self.block())
            .map(|a| dot(a, xs))
            .collect()
    }

    /// `A*(z) = Σ_k z_k A_k`.
    pub fn adjoint(&self, z: &[f64]) -> Result<Mat> {
        if z.len() != self.m {
            return Err(invalid(format!(
                "adjoint expects a vector of length {}, got {}",
                self.m,
                z.len()
            )));
        }
        if z.iter().any(|v| !v.is_finite()) {
            return Err(invalid("adjoint input has non-finite entries"));
        }
        Ok(self.adjoint_unchecked(z))
    }

    pub(crate) fn adjoint_unchecked(&self, z: &[f64]) -> Mat {
        let mut out = Mat::zeros(self.n1, self.n2);
        let acc = out.as_mut_slice();
        for (a, &zk) in self.data.chunks_exact(self.block()).zip(z) {
            if zk == 0.0 {
                continue;
            }
            for (o, &v) in acc.iter_mut().zip(a) {
                *o += zk * v;
            }
        }
        out
    }

    /// `A(x) − b`.
    pub fn residual(&self, x: &Mat, b: &[f64]) -> Result<Vec<f64>> {
        self.check_measurements(b)?;
        let mut r = self.apply(x)?;
        for (ri, bi) in r.iter_mut().zip(b) {
            *ri -= bi;
        }
        Ok(r)
    }

    pub(crate) fn check_measurements(&self, b: &[f64]) -> Result<()> {
        if b.len() != self.m {
            return Err(invalid(format!(
                "expected {} measurements, got {}",
                self.m,
                b.len()
            )));
        }
        Ok(())
    }

    /// Sum of squared entries over all sensing matrices, `Σ_k ‖A_k‖_F²`.
    pub fn total_energy(&self) -> f64 {
        dot(&self.data, &self.data)
    }

    /// Dimension of the space the ensemble is isotropic on: `n(n+1)/2` for
    /// symmetric operators, `n₁n₂` otherwise.
    pub fn isotropic_dimension(&self) -> usize {
        if self.symmetric {
            self.n1 * (self.n1 + 1) / 2
        } else {
            self.n1 * self.n2
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn trace_example() {
        let op = MeasurementOp::from_matrices(2, 2, &[Mat::identity(2)]).unwrap();
        assert!(op.is_symmetric());
        assert_eq!(op.apply(&Mat::diag(&[3.0, 4.0])).unwrap(), vec![7.0]);
        assert_eq!(op.apply(&Mat::zeros(2, 2)).unwrap(), vec![0.0]);
    }

    #[test]
    fn adjoint_examples() {
        let a1 = Mat::from_rows(&[[1.0, 2.0, 0.0], [0.0, -1.0, 3.0]]).unwrap();
        let a2 = Mat::from_rows(&[[0.5, 0.0, 1.0], [2.0, 2.0, -2.0]]).unwrap();
        let op = MeasurementOp::from_matrices(2, 3, &[a1.clone(), a2.clone()]).unwrap();
        assert!(!op.is_symmetric());
        assert_eq!(op.adjoint(&[1.0, 0.0]).unwrap(), a1);
        assert_eq!(op.adjoint(&[0.0, 1.0]).unwrap(), a2);
        assert_eq!(op.adjoint(&[0.0, 0.0]).unwrap(), Mat::zeros(2, 3));
    }

    #[test]
    fn shape_errors() {
        let op = MeasurementOp::from_matrices(2, 3, &[Mat::zeros(2, 3)]).unwrap();
        assert!(op.apply(&Mat::zeros(3, 2)).is_err());
        assert!(op.adjoint(&[1.0, 2.0]).is_err());
        assert!(MeasurementOp::from_matrices(2, 3, &[Mat::zeros(3, 3)]).is_err());
        assert!(MeasurementOp::from_matrices(2, 3, &[]).is_err());
    }
}
