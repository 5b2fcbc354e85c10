//! Problem and solution directories.
//!
//! A problem directory holds `problem.json` (the generation parameters and
//! spectrum), `ensemble.txt`, `b.txt` and the truth factors `truth_u.txt`
//! (plus `truth_v.txt` in rectangular mode). A solution directory holds
//! `solution.json` and the factors `u.txt` (plus `v.txt`). Matrices use the
//! plain-text format of [`crate::linalg::io`].

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::problem::{PlantedProblem, ProblemParams};
use crate::error::{invalid, Result};
use crate::linalg::io::{load_mat, save_mat};
use crate::linalg::{FactorPair, Mat};
use crate::sensing::io::{load_ensemble, save_ensemble};
use crate::solver::{Mode, Solution};

#[derive(Debug, Serialize, Deserialize)]
struct ProblemFile {
    params: ProblemParams,
    singular_values: Vec<f64>,
}

pub fn save_problem(dir: impl AsRef<Path>, problem: &PlantedProblem, full_ensemble: bool) -> Result<()> {
    let dir = dir.as_ref();
    fs::create_dir_all(dir)?;
    let meta = ProblemFile {
        params: problem.params.clone(),
        singular_values: problem.singular_values.clone(),
    };
    fs::write(dir.join("problem.json"), serde_json::to_string_pretty(&meta)?)?;
    save_ensemble(dir.join("ensemble.txt"), &problem.op, full_ensemble)?;
    save_mat(dir.join("b.txt"), &Mat::column_vector(&problem.b))?;
    save_factors(dir, "truth_", &problem.truth_factors)
}

pub fn load_problem(dir: impl AsRef<Path>) -> Result<PlantedProblem> {
    let dir = dir.as_ref();
    let meta: ProblemFile = serde_json::from_str(&fs::read_to_string(dir.join("problem.json"))?)?;
    let op = load_ensemble(dir.join("ensemble.txt"))?;
    let b = load_mat(dir.join("b.txt"))?;
    if b.cols() != 1 || b.rows() != op.m() {
        return Err(invalid("b.txt must be an m x 1 column"));
    }
    let truth_factors = load_factors(dir, "truth_", meta.params.mode)?;
    Ok(PlantedProblem {
        truth_m: truth_factors.product(),
        truth_factors,
        singular_values: meta.singular_values,
        params: meta.params,
        op,
        b: b.into_vec(),
    })
}

fn save_factors(dir: &Path, prefix: &str, f: &FactorPair) -> Result<()> {
    save_mat(dir.join(format!("{prefix}u.txt")), f.u())?;
    if !f.is_psd() {
        save_mat(dir.join(format!("{prefix}v.txt")), f.v())?;
    }
    Ok(())
}

fn load_factors(dir: &Path, prefix: &str, mode: Mode) -> Result<FactorPair> {
    let u = load_mat(dir.join(format!("{prefix}u.txt")))?;
    match mode {
        Mode::Psd => Ok(FactorPair::psd(u)),
        Mode::Rect => FactorPair::rect(u, load_mat(dir.join(format!("{prefix}v.txt")))?),
    }
}

/// Summary fields stored next to solution factors.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolutionMeta {
    pub mode: Mode,
    pub converged: bool,
    pub relative_residual: f64,
    pub init_steps: usize,
    pub gd_iterations: usize,
    pub svd_count: usize,
}

pub fn save_solution(dir: impl AsRef<Path>, solution: &Solution) -> Result<()> {
    let dir = dir.as_ref();
    fs::create_dir_all(dir)?;
    let meta = SolutionMeta {
        mode: if solution.factors.is_psd() { Mode::Psd } else { Mode::Rect },
        converged: solution.converged,
        relative_residual: solution.relative_residual,
        init_steps: solution.trace.init_steps,
        gd_iterations: solution.trace.gd_iterations(),
        svd_count: solution.trace.svd_count,
    };
    fs::write(dir.join("solution.json"), serde_json::to_string_pretty(&meta)?)?;
    save_factors(dir, "", &solution.factors)
}

pub fn load_solution(dir: impl AsRef<Path>) -> Result<(FactorPair, SolutionMeta)> {
    let dir = dir.as_ref();
    let meta: SolutionMeta = serde_json::from_str(&fs::read_to_string(dir.join("solution.json"))?)?;
    Ok((load_factors(dir, "", meta.mode)?, meta))
}
