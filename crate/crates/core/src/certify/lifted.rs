use crate::error::{invalid, Result};
use crate::linalg::{FactorPair, Mat};
use crate::sensing::MeasurementOp;

/// Lifted factors `W = [U; V]`, `Z = [X; Y]` and `Z̃ = [X; −Y]`.
#[derive(Debug, Clone)]
pub struct LiftedPair {
    pub w: Mat,
    pub z: Mat,
    pub z_tilde: Mat,
}

impl LiftedPair {
    pub fn new(pair: &FactorPair, truth: &FactorPair) -> Result<Self> {
        if pair.dims() != truth.dims() || pair.rank() != truth.rank() {
            return Err(invalid("pair and truth shapes differ"));
        }
        Ok(Self {
            w: pair.stacked(),
            z: truth.stacked(),
            z_tilde: Mat::vstack(truth.u(), &truth.v().scale(-1.0)),
        })
    }
}

/// `Sym(A) = [[0, A], [Aᵀ, 0]]`.
pub fn sym(a: &Mat) -> Mat {
    let (n1, n2) = a.shape();
    Mat::from_fn(n1 + n2, n1 + n2, |i, j| match (i < n1, j < n1) {
        (true, false) => a[(i, j - n1)],
        (false, true) => a[(j, i - n1)],
        _ => 0.0,
    })
}

fn block_mask(x: &Mat, n1: usize, diag: bool) -> Mat {
    Mat::from_fn(x.rows(), x.cols(), |i, j| {
        if ((i < n1) == (j < n1)) == diag {
            x[(i, j)]
        } else {
            0.0
        }
    })
}

/// Keeps the two diagonal blocks (`n₁×n₁` and `n₂×n₂`) of a lifted matrix.
pub fn p_diag(x: &Mat, n1: usize) -> Mat {
    block_mask(x, n1, true)
}

/// Keeps the two off-diagonal blocks of a lifted matrix.
pub fn p_off(x: &Mat, n1: usize) -> Mat {
    block_mask(x, n1, false)
}

/// The augmented map `B(X)_k = ⟨Sym(A_k), X⟩` on `(n₁+n₂)`-square matrices.
pub struct LiftedOperator<'a> {
    base: &'a MeasurementOp,
}

impl<'a> LiftedOperator<'a> {
    pub fn new(base: &'a MeasurementOp) -> Self {
        Self { base }
    }

    pub fn base(&self) -> &MeasurementOp {
        self.base
    }

    pub fn dim(&self) -> usize {
        self.base.n1() + self.base.n2()
    }

    pub fn apply(&self, x: &Mat) -> Result<Vec<f64>> {
        let d = self.dim();
        if x.shape() != (d, d) {
            return Err(invalid(format!("lifted operator expects {d}x{d} input")));
        }
        Ok(self.base.matrices().map(|a| sym(&a).frob_dot(x)).collect())
    }

    /// `B*(z) = Σ_k z_k Sym(A_k)`.
    pub fn adjoint(&self, z: &[f64]) -> Result<Mat> {
        if z.len() != self.base.m() {
            return Err(invalid("lifted adjoint length mismatch"));
        }
        let d = self.dim();
        let mut out = Mat::zeros(d, d);
        for (a, &zk) in self.base.matrices().zip(z) {
            out.axpy(zk, &sym(&a));
        }
        Ok(out)
    }
}
