//! Test-only oracles, written without the library's decompositions.
#![allow(dead_code)]

use pflow_core::rng::{Domain, Stream};
use pflow_core::Mat;

pub fn gaussian(rows: usize, cols: usize, seed: u64, index: u64) -> Mat {
    Mat::new(rows, cols, Stream::new(seed, Domain::Perturbation, index).normals(rows * cols, 1.0)).unwrap()
}

pub fn symmetric(n: usize, seed: u64, index: u64) -> Mat {
    gaussian(n, n, seed, index).symmetrized()
}

/// Modified Gram–Schmidt on the columns of `a`.
pub fn gram_schmidt(a: &Mat) -> Mat {
    let (n, k) = a.shape();
    let mut cols: Vec<Vec<f64>> = (0..k).map(|j| a.column(j)).collect();
    for j in 0..k {
        for i in 0..j {
            let d: f64 = (0..n).map(|t| cols[i][t] * cols[j][t]).sum();
            for t in 0..n {
                cols[j][t] -= d * cols[i][t];
            }
        }
        let norm: f64 = cols[j].iter().map(|x| x * x).sum::<f64>().sqrt();
        for x in &mut cols[j] {
            *x /= norm;
        }
    }
    Mat::from_fn(n, k, |i, j| cols[j][i])
}

/// Random orthogonal `k×k` matrix.
pub fn orthogonal(k: usize, seed: u64, index: u64) -> Mat {
    gram_schmidt(&gaussian(k, k, seed, index))
}

/// Cyclic Jacobi eigenvalues of a symmetric matrix, descending.
pub fn jacobi_eigenvalues(s: &Mat) -> Vec<f64> {
    jacobi(s).0
}

/// Cyclic Jacobi eigendecomposition: (values descending, vectors as columns).
pub fn jacobi(s: &Mat) -> (Vec<f64>, Mat) {
    let n = s.rows();
    let mut a: Vec<Vec<f64>> = (0..n).map(|i| (0..n).map(|j| s[(i, j)]).collect()).collect();
    let mut v: Vec<Vec<f64>> = (0..n).map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect()).collect();
    for _sweep in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[i][j] * a[i][j])
            .sum();
        if off < 1e-30 {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                if a[p][q].abs() < 1e-300 {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let sn = t * c;
                for k in 0..n {
                    let (akp, akq) = (a[k][p], a[k][q]);
                    a[k][p] = c * akp - sn * akq;
                    a[k][q] = sn * akp + c * akq;
                }
                for k in 0..n {
                    let (apk, aqk) = (a[p][k], a[q][k]);
                    a[p][k] = c * apk - sn * aqk;
                    a[q][k] = sn * apk + c * aqk;
                }
                for k in 0..n {
                    let (vkp, vkq) = (v[k][p], v[k][q]);
                    v[k][p] = c * vkp - sn * vkq;
                    v[k][q] = sn * vkp + c * vkq;
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[j][j].total_cmp(&a[i][i]));
    let values = order.iter().map(|&i| a[i][i]).collect();
    let vectors = Mat::from_fn(n, n, |i, j| v[i][order[j]]);
    (values, vectors)
}

/// Singular values from the Jacobi eigenvalues of `aᵀa`, descending.
pub fn oracle_singular_values(a: &Mat) -> Vec<f64> {
    let g = if a.rows() >= a.cols() { a.t_matmul(a) } else { a.matmul_t(a) };
    jacobi_eigenvalues(&g).into_iter().map(|l| l.max(0.0).sqrt()).collect()
}

/// Top eigenpair of a symmetric matrix by power iteration on `s + shift·I`.
pub fn power_iteration(s: &Mat, iters: usize) -> (f64, Vec<f64>) {
    let n = s.rows();
    let shift: f64 = (0..n)
        .map(|i| (0..n).map(|j| s[(i, j)].abs()).sum::<f64>())
        .fold(0.0, f64::max);
    let mut x: Vec<f64> = (0..n).map(|i| 1.0 + 0.01 * i as f64).collect();
    for _ in 0..iters {
        let mut y: Vec<f64> = (0..n).map(|i| (0..n).map(|j| s[(i, j)] * x[j]).sum::<f64>() + shift * x[i]).collect();
        let norm = y.iter().map(|v| v * v).sum::<f64>().sqrt();
        y.iter_mut().for_each(|v| *v /= norm);
        x = y;
    }
    let sx: Vec<f64> = (0..n).map(|i| (0..n).map(|j| s[(i, j)] * x[j]).sum()).collect();
    let lambda = x.iter().zip(&sx).map(|(a, b)| a * b).sum();
    (lambda, x)
}

pub fn vec_dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Sum of `A_k x_k` computed entry by entry from the operator's matrices.
pub fn naive_apply(op: &pflow_core::MeasurementOp, x: &Mat) -> Vec<f64> {
    op.matrices()
        .map(|a| {
            let mut tr = 0.0;
            for i in 0..a.rows() {
                for j in 0..a.cols() {
                    tr += a[(i, j)] * x[(i, j)];
                }
            }
            tr
        })
        .collect()
}
