use serde::{Deserialize, Serialize};

use super::Mat;
use crate::error::{invalid, Result};

/// Low-rank factors `U` (n₁×r) and `V` (n₂×r) of `M = U Vᵀ`.
///
/// In PSD mode only `U` is stored and `V` aliases it, so `M = U Uᵀ`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FactorPair {
    u: Mat,
    v: Option<Mat>,
}

impl FactorPair {
    pub fn psd(u: Mat) -> Self {
        Self { u, v: None }
    }

    pub fn rect(u: Mat, v: Mat) -> Result<Self> {
        if u.cols() != v.cols() {
            return Err(invalid(format!(
                "factor ranks differ: u has {} columns, v has {}",
                u.cols(),
                v.cols()
            )));
        }
        Ok(Self { u, v: Some(v) })
    }

    pub fn is_psd(&self) -> bool {
        self.v.is_none()
    }

    pub fn u(&self) -> &Mat {
        &self.u
    }

    /// The right factor; equals `u` in PSD mode.
    pub fn v(&self) -> &Mat {
        self.v.as_ref().unwrap_or(&self.u)
    }

    pub fn rank(&self) -> usize {
        self.u.cols()
    }

    /// `(n₁, n₂)` of the represented matrix.
    pub fn dims(&self) -> (usize, usize) {
        (self.u.rows(), self.v().rows())
    }

    /// `U Vᵀ`.
    pub fn product(&self) -> Mat {
        self.u.matmul_t(self.v())
    }

    /// The stacked lifted factor `[U; V]`.
    pub fn stacked(&self) -> Mat {
        Mat::vstack(&self.u, self.v())
    }

    /// The variable the Procrustes distance is measured on: `U` in PSD mode,
    /// `[U; V]` otherwise.
    pub fn dist_variable(&self) -> Mat {
        if self.is_psd() {
            self.u.clone()
        } else {
            self.stacked()
        }
    }

    pub fn is_finite(&self) -> bool {
        self.u.is_finite() && self.v.as_ref().map_or(true, Mat::is_finite)
    }

    pub fn into_parts(self) -> (Mat, Option<Mat>) {
        (self.u, self.v)
    }
}
