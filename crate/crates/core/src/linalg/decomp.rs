use nalgebra::{DMatrix, SymmetricEigen};

use super::mat::dot;
use super::{FactorPair, Mat};
use crate::error::{invalid, Error, Result};

/// Thin singular value decomposition `a = left · diag(σ) · rightᵀ`.
#[derive(Debug, Clone)]
pub struct SvdResult {
    /// rows × k, orthonormal columns.
    pub left: Mat,
    /// Descending, nonnegative.
    pub singular_values: Vec<f64>,
    /// cols × k, orthonormal columns.
    pub right: Mat,
}

impl SvdResult {
    pub fn reconstruct(&self) -> Mat {
        self.left
            .scale_columns(&self.singular_values)
            .matmul_t(&self.right)
    }

    /// Keeps the leading `k` triplets.
    pub fn truncate(&self, k: usize) -> SvdResult {
        let k = k.min(self.singular_values.len());
        SvdResult {
            left: self.left.leading_columns(k),
            singular_values: self.singular_values[..k].to_vec(),
            right: self.right.leading_columns(k),
        }
    }
}

fn to_nalgebra(a: &Mat) -> DMatrix<f64> {
    DMatrix::from_row_slice(a.rows(), a.cols(), a.as_slice())
}

fn from_nalgebra(m: &DMatrix<f64>) -> Mat {
    Mat::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)])
}

/// Flips columns so each column of `primary`'s largest-magnitude entry is
/// nonnegative; the matching column of `secondary` is flipped along with it.
fn fix_signs(primary: &mut Mat, mut secondary: Option<&mut Mat>) {
    for j in 0..primary.cols() {
        let mut best = 0.0f64;
        let mut sign = 1.0;
        for i in 0..primary.rows() {
            let x = primary[(i, j)];
            if x.abs() > best {
                best = x.abs();
                sign = x.signum();
            }
        }
        if sign < 0.0 {
            for i in 0..primary.rows() {
                primary[(i, j)] = -primary[(i, j)];
            }
            if let Some(s) = secondary.as_deref_mut() {
                for i in 0..s.rows() {
                    s[(i, j)] = -s[(i, j)];
                }
            }
        }
    }
}

/// Deterministic thin SVD by one-sided (Hestenes) Jacobi rotations.
///
/// Singular values are sorted descending and each left singular vector is
/// signed so that its largest-magnitude entry is nonnegative. Left vectors
/// belonging to zero singular values are completed to an orthonormal set.
pub fn svd(a: &Mat) -> Result<SvdResult> {
    if !a.is_finite() {
        return Err(invalid("svd input has non-finite entries"));
    }
    if a.rows() < a.cols() {
        let t = svd(&a.transpose())?;
        let (mut left, mut right) = (t.right, t.left);
        fix_signs(&mut left, Some(&mut right));
        return Ok(SvdResult {
            left,
            singular_values: t.singular_values,
            right,
        });
    }
    let (rows, k) = a.shape();
    if k == 0 {
        return Ok(SvdResult {
            left: Mat::zeros(rows, 0),
            singular_values: Vec::new(),
            right: Mat::zeros(0, 0),
        });
    }
    let (cols, vcols) = jacobi_columns(a);
    let norms: Vec<f64> = cols.iter().map(|c| dot(c, c).sqrt()).collect();
    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by(|&i, &j| norms[j].total_cmp(&norms[i]).then(i.cmp(&j)));
    let singular_values: Vec<f64> = order.iter().map(|&i| norms[i]).collect();
    let cutoff = singular_values[0] * f64::EPSILON * rows as f64;
    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(k);
    for (slot, &i) in order.iter().enumerate() {
        if singular_values[slot] > cutoff {
            basis.push(cols[i].iter().map(|x| x / norms[i]).collect());
        } else {
            basis.push(complete_basis(&basis, rows));
        }
    }
    let mut left = Mat::from_fn(rows, k, |i, j| basis[j][i]);
    let mut right = Mat::from_fn(k, k, |i, j| vcols[order[j]][i]);
    fix_signs(&mut left, Some(&mut right));
    Ok(SvdResult {
        left,
        singular_values,
        right,
    })
}

/// Orthogonalizes the columns of a tall `a` by plane rotations; returns the
/// rotated columns (norms are the singular values) and the accumulated right
/// rotation, both column-major.
fn jacobi_columns(a: &Mat) -> (Vec<Vec<f64>>, Vec<Vec<f64>>) {
    let k = a.cols();
    let mut cols: Vec<Vec<f64>> = (0..k).map(|j| a.column(j)).collect();
    let mut v: Vec<Vec<f64>> = (0..k)
        .map(|j| (0..k).map(|i| if i == j { 1.0 } else { 0.0 }).collect())
        .collect();
    for _sweep in 0..80 {
        let mut rotated = false;
        for p in 0..k {
            for q in p + 1..k {
                let alpha = dot(&cols[p], &cols[p]);
                let beta = dot(&cols[q], &cols[q]);
                let gamma = dot(&cols[p], &cols[q]);
                if gamma == 0.0 || gamma.abs() <= 1e-15 * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                rotate(&mut cols, p, q, c, s);
                rotate(&mut v, p, q, c, s);
            }
        }
        if !rotated {
            break;
        }
    }
    (cols, v)
}

fn rotate(cols: &mut [Vec<f64>], p: usize, q: usize, c: f64, s: f64) {
    let (lo, hi) = cols.split_at_mut(q);
    for (x, y) in lo[p].iter_mut().zip(hi[0].iter_mut()) {
        let (xp, yq) = (*x, *y);
        *x = c * xp - s * yq;
        *y = s * xp + c * yq;
    }
}

/// A unit vector orthogonal to `basis`, from the first standard basis vector
/// that survives two Gram–Schmidt passes.
fn complete_basis(basis: &[Vec<f64>], n: usize) -> Vec<f64> {
    let mut best = vec![0.0; n];
    let mut best_norm = -1.0;
    for e in 0..n {
        let mut v = vec![0.0; n];
        v[e] = 1.0;
        for _ in 0..2 {
            for b in basis {
                let d = dot(b, &v);
                for (vi, bi) in v.iter_mut().zip(b) {
                    *vi -= d * bi;
                }
            }
        }
        let norm = dot(&v, &v).sqrt();
        if norm > 0.5 {
            return v.into_iter().map(|x| x / norm).collect();
        }
        if norm > best_norm {
            best_norm = norm;
            best = v;
        }
    }
    best.into_iter().map(|x| x / best_norm).collect()
}

pub fn singular_values(a: &Mat) -> Result<Vec<f64>> {
    if !a.is_finite() {
        return Err(invalid("input has non-finite entries"));
    }
    if a.rows().min(a.cols()) == 0 {
        return Ok(Vec::new());
    }
    let tall = if a.rows() < a.cols() { a.transpose() } else { a.clone() };
    let (cols, _) = jacobi_columns(&tall);
    let mut s: Vec<f64> = cols.iter().map(|c| dot(c, c).sqrt()).collect();
    s.sort_by(|x, y| y.total_cmp(x));
    Ok(s)
}

/// Operator (spectral) norm `σ₁(a)`.
pub fn spectral_norm(a: &Mat) -> f64 {
    singular_values(a)
        .ok()
        .and_then(|s| s.first().copied())
        .unwrap_or(0.0)
}

/// Eigendecomposition of a symmetric matrix, eigenvalues descending.
#[derive(Debug, Clone)]
pub struct SymEigen {
    pub values: Vec<f64>,
    /// Eigenvectors as columns, signed like left singular vectors.
    pub vectors: Mat,
}

/// Eigendecomposition of `(s + sᵀ)/2`.
pub fn sym_eigen(s: &Mat) -> Result<SymEigen> {
    if !s.is_square() {
        return Err(invalid(format!(
            "expected a square matrix, got {}x{}",
            s.rows(),
            s.cols()
        )));
    }
    if !s.is_finite() {
        return Err(invalid("input has non-finite entries"));
    }
    let n = s.rows();
    if n == 0 {
        return Ok(SymEigen {
            values: Vec::new(),
            vectors: Mat::zeros(0, 0),
        });
    }
    let eig = SymmetricEigen::new(to_nalgebra(&s.symmetrized()));
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| {
        eig.eigenvalues[j]
            .total_cmp(&eig.eigenvalues[i])
            .then(i.cmp(&j))
    });
    let mut vectors = Mat::from_fn(n, n, |i, j| eig.eigenvectors[(i, order[j])]);
    fix_signs(&mut vectors, None);
    Ok(SymEigen {
        values: order.iter().map(|&i| eig.eigenvalues[i]).collect(),
        vectors,
    })
}

fn check_rank(r: usize) -> Result<()> {
    if r == 0 {
        return Err(invalid("target rank must be at least 1"));
    }
    Ok(())
}

/// Best rank-`r` approximation in Frobenius norm (Eckart–Young).
///
/// `r` larger than `min(rows, cols)` is clamped, which returns `a` itself up
/// to rounding.
pub fn project_rank(a: &Mat, r: usize) -> Result<Mat> {
    Ok(project_rank_factored(a, r)?.0)
}

/// [`project_rank`] together with balanced factors `U = CΣ^{1/2}`,
/// `V = DΣ^{1/2}` of the result.
pub fn project_rank_factored(a: &Mat, r: usize) -> Result<(Mat, FactorPair)> {
    check_rank(r)?;
    let trunc = svd(a)?.truncate(r);
    let roots: Vec<f64> = trunc.singular_values.iter().map(|s| s.sqrt()).collect();
    let u = trunc.left.scale_columns(&roots);
    let v = trunc.right.scale_columns(&roots);
    let projected = u.matmul_t(&v);
    Ok((projected, FactorPair::rect(u, v)?))
}

/// Projection onto rank-`r` PSD matrices: symmetrize, keep the `r` largest
/// eigenpairs and clamp their eigenvalues at zero.
pub fn project_rank_psd(s: &Mat, r: usize) -> Result<Mat> {
    Ok(project_rank_psd_factored(s, r)?.0)
}

/// [`project_rank_psd`] together with the factor `U = Q Λ^{1/2}`.
pub fn project_rank_psd_factored(s: &Mat, r: usize) -> Result<(Mat, FactorPair)> {
    check_rank(r)?;
    let eig = sym_eigen(s)?;
    let k = r.min(s.rows());
    let roots: Vec<f64> = eig.values[..k].iter().map(|l| l.max(0.0).sqrt()).collect();
    let u = eig.vectors.leading_columns(k).scale_columns(&roots);
    let projected = u.matmul_t(&u);
    Ok((projected, FactorPair::psd(u)))
}

/// Splits a rank-`r` iterate into factors `U = CΣ^{1/2}`, `V = DΣ^{1/2}`
/// from its SVD, or `U = QΛ^{1/2}` in PSD mode.
pub fn extract_factors(mtilde: &Mat, r: usize, psd: bool) -> Result<FactorPair> {
    check_rank(r)?;
    if !psd {
        return Ok(project_rank_factored(mtilde, r)?.1);
    }
    if !mtilde.is_square() {
        return Err(invalid("PSD factor extraction needs a square matrix"));
    }
    let scale = spectral_norm(mtilde);
    if mtilde.asymmetry() > 1e-8 * scale {
        return Err(invalid("PSD factor extraction needs a symmetric matrix"));
    }
    let eig = sym_eigen(mtilde)?;
    let min_eigenvalue = eig.values.last().copied().unwrap_or(0.0);
    if min_eigenvalue < -1e-8 * scale {
        return Err(Error::NotPsd { min_eigenvalue });
    }
    let k = r.min(mtilde.rows());
    let roots: Vec<f64> = eig.values[..k].iter().map(|l| l.max(0.0).sqrt()).collect();
    Ok(FactorPair::psd(
        eig.vectors.leading_columns(k).scale_columns(&roots),
    ))
}

/// The `r` leading singular values of `U Vᵀ`, computed from the factors:
/// with thin QR `U = Q_U R_U`, `V = Q_V R_V`, the nonzero singular values of
/// `UVᵀ` are those of `R_U R_Vᵀ`.
pub fn factored_singular_values(pair: &FactorPair) -> Vec<f64> {
    let r = pair.rank();
    let mut sv = if pair.is_psd() {
        singular_values(pair.u())
            .unwrap_or_default()
            .into_iter()
            .map(|s| s * s)
            .collect::<Vec<_>>()
    } else {
        let ru = triangular_factor(pair.u());
        let rv = triangular_factor(pair.v());
        singular_values(&ru.matmul_t(&rv)).unwrap_or_default()
    };
    sv.resize(r, 0.0);
    sv
}

/// `σ_r(U Vᵀ)` from the factors; zero for a rank-deficient product.
pub fn factored_sigma_r(pair: &FactorPair) -> f64 {
    factored_singular_values(pair).last().copied().unwrap_or(0.0)
}

/// Orthonormal basis for the column space of a full-column-rank `a`: the
/// thin QR factor `Q`, with columns signed so that `diag(R) ≥ 0`.
pub fn orthonormal_columns(a: &Mat) -> Result<Mat> {
    if !a.is_finite() {
        return Err(invalid("input has non-finite entries"));
    }
    if a.cols() > a.rows() {
        return Err(invalid("more columns than rows"));
    }
    let qr = to_nalgebra(a).qr();
    let mut q = from_nalgebra(&qr.q());
    let r = qr.r();
    for j in 0..a.cols() {
        if r[(j, j)] < 0.0 {
            for i in 0..q.rows() {
                q[(i, j)] = -q[(i, j)];
            }
        }
    }
    Ok(q)
}

/// `R` of a thin QR, padded with zero rows to r×r when rows < r.
fn triangular_factor(a: &Mat) -> Mat {
    let r = a.cols();
    let qr = to_nalgebra(a).qr();
    let small = from_nalgebra(&qr.r());
    Mat::from_fn(r, r, |i, j| if i < small.rows() { small[(i, j)] } else { 0.0 })
}
