use serde::{Deserialize, Serialize};

use super::{svd, Mat};
use crate::error::{invalid, Result};

/// Optimal orthogonal alignment of `u` onto `x`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AlignmentResult {
    /// r×r orthogonal `R` minimizing `‖u − xR‖_F`.
    pub rotation: Mat,
    /// `‖u − x·rotation‖_F`.
    pub distance: f64,
    /// The aligned residual `H = u − x·rotation`.
    pub difference: Mat,
}

/// Solves `min_R ‖u − xR‖_F` over orthogonal `R`.
///
/// With `xᵀu = AΣBᵀ`, the minimizer is `R = ABᵀ`. When `xᵀu = 0` every
/// orthogonal `R` is optimal and the identity is returned.
pub fn procrustes_align(u: &Mat, x: &Mat) -> Result<AlignmentResult> {
    if u.shape() != x.shape() {
        return Err(invalid(format!(
            "procrustes shapes differ: {:?} vs {:?}",
            u.shape(),
            x.shape()
        )));
    }
    let cross = x.t_matmul(u);
    let rotation = if cross.max_abs() == 0.0 {
        Mat::identity(u.cols())
    } else {
        let s = svd(&cross)?;
        s.left.matmul_t(&s.right)
    };
    let difference = u - &x.matmul(&rotation);
    Ok(AlignmentResult {
        distance: difference.frob_norm(),
        rotation,
        difference,
    })
}

/// `dist(u, x) = min_R ‖u − xR‖_F`.
pub fn dist(u: &Mat, x: &Mat) -> Result<f64> {
    Ok(procrustes_align(u, x)?.distance)
}
