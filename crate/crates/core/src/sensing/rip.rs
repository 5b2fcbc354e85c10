use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::MeasurementOp;
use crate::error::{invalid, Result};
use crate::linalg::Mat;
use crate::rng::{Domain, Stream};

/// Monte-Carlo estimates of the restricted isometry constants.
///
/// Both numbers are maxima over sampled matrices, so they are lower bounds on
/// the true suprema `δ_rank` and `ρ(A)`; certifying RIP is NP-hard.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RipProbeReport {
    /// Rank of the samples behind `delta_hat`.
    pub rank_probed: usize,
    /// Rank of the pair samples behind `rho_hat` (`min(2·rank, n₁, n₂)`).
    pub pair_rank_probed: usize,
    pub trials: usize,
    /// `max |‖A(X)‖² − 1|` over unit-Frobenius samples.
    pub delta_hat: f64,
    /// `2 · max |⟨A(X), A(Y)⟩ − ⟨X, Y⟩|` over unit-Frobenius pairs.
    pub rho_hat: f64,
    pub seed: u64,
}

/// Probe rank used when none is given: `min(6r, n₁, n₂)`.
pub fn default_probe_rank(r: usize, n1: usize, n2: usize) -> usize {
    (6 * r).min(n1).min(n2)
}

/// A random unit-Frobenius matrix of rank at most `rank`.
///
/// General operators get `G₁G₂ᵀ` with Gaussian n₁×rank and n₂×rank factors.
/// Symmetric operators only see the symmetric part of their input, so they
/// are probed with `G diag(d) Gᵀ` (Gaussian `G`, `d`). Draws come from stream
/// `(seed, Probe, index)`.
pub fn probe_matrix(n1: usize, n2: usize, rank: usize, symmetric: bool, seed: u64, index: u64) -> Mat {
    let mut stream = Stream::new(seed, Domain::Probe, index);
    let x = if symmetric {
        let g = Mat::from_vec(n1, rank, stream.normals(n1 * rank, 1.0));
        let d = stream.normals(rank, 1.0);
        g.scale_columns(&d).matmul_t(&g)
    } else {
        let g1 = Mat::from_vec(n1, rank, stream.normals(n1 * rank, 1.0));
        let g2 = Mat::from_vec(n2, rank, stream.normals(n2 * rank, 1.0));
        g1.matmul_t(&g2)
    };
    let norm = x.frob_norm();
    if norm > 0.0 {
        x.scale(1.0 / norm)
    } else {
        x
    }
}

fn sq_norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum()
}

/// Sample indices used by trial `t`: one matrix for the isometry defect and a
/// pair for the inner-product defect.
pub fn trial_indices(t: usize) -> (u64, u64, u64) {
    let t = t as u64;
    (3 * t, 3 * t + 1, 3 * t + 2)
}

/// Estimates `δ_rank` and `ρ(A)` from `trials` random samples.
///
/// Trials use independent indexed streams and are evaluated in parallel; the
/// result does not depend on scheduling.
pub fn probe_rip(op: &MeasurementOp, rank: usize, trials: usize, seed: u64) -> Result<RipProbeReport> {
    let min_dim = op.n1().min(op.n2());
    if rank == 0 {
        return Err(invalid("probe rank must be at least 1"));
    }
    if rank > min_dim {
        return Err(invalid(format!(
            "probe rank {rank} exceeds min(n1, n2) = {min_dim}"
        )));
    }
    if trials == 0 {
        return Err(invalid("probe needs at least one trial"));
    }
    let pair_rank = (2 * rank).min(min_dim);
    let (n1, n2, sym) = (op.n1(), op.n2(), op.is_symmetric());
    let defects: Vec<(f64, f64)> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let (ix, iy1, iy2) = trial_indices(t);
            let x = probe_matrix(n1, n2, rank, sym, seed, ix);
            let delta = (sq_norm(&op.apply_unchecked(&x)) - 1.0).abs();
            let p = probe_matrix(n1, n2, pair_rank, sym, seed, iy1);
            let q = probe_matrix(n1, n2, pair_rank, sym, seed, iy2);
            let ap = op.apply_unchecked(&p);
            let aq = op.apply_unchecked(&q);
            let cross: f64 = ap.iter().zip(&aq).map(|(a, b)| a * b).sum();
            (delta, (cross - p.frob_dot(&q)).abs())
        })
        .collect();
    let delta_hat = defects.iter().fold(0.0f64, |m, d| m.max(d.0));
    let pair_max = defects.iter().fold(0.0f64, |m, d| m.max(d.1));
    Ok(RipProbeReport {
        rank_probed: rank,
        pair_rank_probed: pair_rank,
        trials,
        delta_hat,
        rho_hat: 2.0 * pair_max,
        seed,
    })
}
