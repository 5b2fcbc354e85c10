//! Shared fixtures for the criterion benches.

use pflow_core::harness::{gen_problem, PlantedProblem, ProblemParams};
use pflow_core::Mat;

/// Deterministic dense test matrix with entries in `[-1, 1)`.
pub fn dense(rows: usize, cols: usize, seed: u64) -> Mat {
    let mut state = seed.wrapping_mul(0x9E37_79B9_7F4A_7C15) | 1;
    Mat::from_fn(rows, cols, |_, _| {
        state ^= state << 13;
        state ^= state >> 7;
        state ^= state << 17;
        (state >> 11) as f64 / (1u64 << 52) as f64 - 1.0
    })
}

pub fn psd_problem(n: usize, r: usize, m: usize) -> PlantedProblem {
    gen_problem(&ProblemParams::psd(n, r, 4.0, m, 0)).expect("valid parameters")
}

pub fn rect_problem(n1: usize, n2: usize, r: usize, m: usize) -> PlantedProblem {
    gen_problem(&ProblemParams::rect(n1, n2, r, 4.0, m, 0)).expect("valid parameters")
}
