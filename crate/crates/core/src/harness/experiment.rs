use std::collections::HashSet;
use std::io::Write;
use std::path::PathBuf;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::problem::{gen_problem, PlantedProblem, ProblemParams};
use crate::error::{invalid, Error, Result};
use crate::sensing::{EnsembleKind, MAX_DENSE_ENTRIES};
use crate::solver::{iht_baseline, procrustes_flow, Mode, Phase, SolveTrace, SolverConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExperimentKind {
    Convergence,
    PhaseTransition,
    PfVsIht,
}

fn default_kappa() -> Vec<f64> {
    vec![1.0]
}

fn default_sigma1() -> f64 {
    1.0
}

fn default_iht_iters() -> usize {
    1000
}

/// A grid of planted problems and the solver settings to run on each.
///
/// The grid is the product `kappa × m_values × seeds`. `mode` comes from
/// `solver.mode`; PSD experiments need `n1 = n2`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentSpec {
    pub kind: ExperimentKind,
    pub n1: usize,
    pub n2: usize,
    pub r: usize,
    #[serde(default = "default_kappa")]
    pub kappa: Vec<f64>,
    #[serde(default = "default_sigma1")]
    pub sigma1: f64,
    pub m_values: Vec<usize>,
    pub seeds: Vec<u64>,
    #[serde(default)]
    pub ensemble: Option<EnsembleKind>,
    #[serde(default)]
    pub solver: SolverConfig,
    /// Relative Frobenius error counted as success.
    pub success_tol: f64,
    /// Iteration cap for the IHT baseline in `pf_vs_iht`.
    #[serde(default = "default_iht_iters")]
    pub iht_iters: usize,
    /// Output directory for the CLI.
    #[serde(default)]
    pub output: Option<PathBuf>,
    /// Include wall-clock times in records. Off by default so output files
    /// are reproducible byte for byte.
    #[serde(default)]
    pub record_timing: bool,
}

impl ExperimentSpec {
    pub fn validate(&self) -> Result<()> {
        if self.kappa.is_empty() || self.m_values.is_empty() || self.seeds.is_empty() {
            return Err(invalid("kappa, m_values and seeds must be nonempty"));
        }
        let distinct: HashSet<_> = self.seeds.iter().collect();
        if distinct.len() != self.seeds.len() {
            return Err(invalid("seeds must be distinct"));
        }
        if self.solver.mode == Mode::Psd && self.n1 != self.n2 {
            return Err(invalid("PSD experiments need n1 = n2"));
        }
        if self.solver.r != self.r {
            return Err(invalid("solver.r must equal r"));
        }
        if !(self.success_tol >= 0.0) {
            return Err(invalid("success_tol must be nonnegative"));
        }
        for &m in &self.m_values {
            let entries = m as u128 * self.n1 as u128 * self.n2 as u128;
            if entries > MAX_DENSE_ENTRIES {
                return Err(Error::MemoryGuard {
                    entries,
                    limit: MAX_DENSE_ENTRIES,
                });
            }
        }
        self.solver.validate()
    }

    fn params(&self, kappa: f64, m: usize, seed: u64) -> ProblemParams {
        ProblemParams {
            n1: self.n1,
            n2: self.n2,
            r: self.r,
            kappa,
            sigma1: self.sigma1,
            m,
            ensemble: self.ensemble,
            mode: self.solver.mode,
            seed,
        }
    }

    fn grid(&self) -> Vec<(f64, usize, u64)> {
        let mut out = Vec::new();
        for &k in &self.kappa {
            for &m in &self.m_values {
                for &s in &self.seeds {
                    out.push((k, m, s));
                }
            }
        }
        out
    }

    /// Solver settings for trials: stop once the success tolerance is met
    /// unless the spec sets its own target.
    fn trial_config(&self) -> SolverConfig {
        let mut cfg = self.solver.clone();
        cfg.target_error.get_or_insert(self.success_tol);
        cfg
    }
}

/// Outcome of one solver run on one planted problem.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub method: String,
    pub n1: usize,
    pub n2: usize,
    pub r: usize,
    pub kappa: f64,
    pub m: usize,
    pub seed: u64,
    pub success: bool,
    /// Gradient steps (PF) or projected steps (IHT) taken.
    pub iterations: usize,
    pub init_steps: usize,
    pub svd_count: usize,
    /// `‖M̂ − M‖_F / ‖M‖_F`; infinite for diverged runs.
    pub final_rel_error: f64,
    pub diverged: bool,
    pub wall_time_s: Option<f64>,
}

fn pf_method(mode: Mode) -> &'static str {
    match mode {
        Mode::Psd => "pf",
        Mode::Rect => "rpf",
    }
}

struct TrialOutput {
    record: TrialRecord,
    trace: SolveTrace,
}

fn base_record(spec: &ExperimentSpec, method: &str, kappa: f64, m: usize, seed: u64) -> TrialRecord {
    TrialRecord {
        method: method.to_owned(),
        n1: spec.n1,
        n2: spec.n2,
        r: spec.r,
        kappa,
        m,
        seed,
        success: false,
        iterations: 0,
        init_steps: 0,
        svd_count: 0,
        final_rel_error: f64::INFINITY,
        diverged: false,
        wall_time_s: None,
    }
}

fn run_pf_trial(spec: &ExperimentSpec, problem: &PlantedProblem, kappa: f64, m: usize, seed: u64) -> Result<TrialOutput> {
    let cfg = spec.trial_config();
    let mut rec = base_record(spec, pf_method(cfg.mode), kappa, m, seed);
    let start = Instant::now();
    let result = procrustes_flow(&problem.op, &problem.b, &cfg, Some(&problem.truth_factors));
    let elapsed = start.elapsed().as_secs_f64();
    let trace = match result {
        Ok(sol) => {
            rec.final_rel_error = problem.relative_error(&sol.m_hat);
            rec.success = rec.final_rel_error <= spec.success_tol;
            sol.trace
        }
        Err(Error::Diverged { trace, .. }) => {
            rec.diverged = true;
            *trace
        }
        Err(e) => return Err(e),
    };
    rec.iterations = trace.gd_iterations();
    rec.init_steps = trace.init_steps;
    rec.svd_count = trace.svd_count;
    rec.wall_time_s = spec.record_timing.then_some(elapsed);
    Ok(TrialOutput { record: rec, trace })
}

fn run_iht_trial(spec: &ExperimentSpec, problem: &PlantedProblem, kappa: f64, m: usize, seed: u64) -> Result<TrialOutput> {
    let cfg = spec.trial_config();
    let mut rec = base_record(spec, "iht", kappa, m, seed);
    let start = Instant::now();
    let (m_hat, trace) = iht_baseline(&problem.op, &problem.b, &cfg, spec.iht_iters, Some(&problem.truth_m))?;
    rec.wall_time_s = spec.record_timing.then_some(start.elapsed().as_secs_f64());
    rec.final_rel_error = problem.relative_error(&m_hat);
    if !rec.final_rel_error.is_finite() {
        rec.final_rel_error = f64::INFINITY;
        rec.diverged = true;
    }
    rec.success = rec.final_rel_error <= spec.success_tol;
    rec.iterations = trace.svd_count;
    rec.init_steps = trace.svd_count;
    rec.svd_count = trace.svd_count;
    Ok(TrialOutput { record: rec, trace })
}

/// One row of a convergence curve.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub kappa: f64,
    pub m: usize,
    pub seed: u64,
    pub iter: usize,
    pub dist: f64,
    /// `¼(1 − c μ/κ)^{τ/2} σ_r(X)` with `c = 8/25` (PSD) or `4/25` (rect).
    pub envelope: f64,
    pub rel_error: f64,
}

#[derive(Debug, Clone)]
pub struct ConvergenceOutput {
    pub records: Vec<TrialRecord>,
    pub traces: Vec<SolveTrace>,
    pub curves: Vec<CurvePoint>,
}

/// Envelope constant `c` in `(1 − c μ/κ)`.
pub fn rate_constant(mode: Mode) -> f64 {
    match mode {
        Mode::Psd => 8.0 / 25.0,
        Mode::Rect => 4.0 / 25.0,
    }
}

/// Runs PF/RPF with the truth attached on every grid point and pairs each
/// gradient iterate's distance with the theoretical envelope.
pub fn run_convergence(spec: &ExperimentSpec) -> Result<ConvergenceOutput> {
    expect_kind(spec, ExperimentKind::Convergence)?;
    let mu = spec.solver.mu();
    let c = rate_constant(spec.solver.mode);
    let outputs = spec
        .grid()
        .into_par_iter()
        .map(|(kappa, m, seed)| {
            let problem = gen_problem(&spec.params(kappa, m, seed))?;
            let out = run_pf_trial(spec, &problem, kappa, m, seed)?;
            let sigma_r_x = problem.sigma_r().sqrt();
            let curve: Vec<CurvePoint> = out
                .trace
                .phase_rows(Phase::Gd)
                .map(|row| CurvePoint {
                    kappa,
                    m,
                    seed,
                    iter: row.iter,
                    dist: row.dist.unwrap_or(f64::NAN),
                    envelope: 0.25 * (1.0 - c * mu / kappa).powf(row.iter as f64 / 2.0) * sigma_r_x,
                    rel_error: row.rel_error.unwrap_or(f64::NAN),
                })
                .collect();
            Ok((out, curve))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut result = ConvergenceOutput {
        records: Vec::new(),
        traces: Vec::new(),
        curves: Vec::new(),
    };
    for (out, curve) in outputs {
        result.records.push(out.record);
        result.traces.push(out.trace);
        result.curves.extend(curve);
    }
    Ok(result)
}

/// Success counts at one measurement budget.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhaseRow {
    pub m: usize,
    pub trials: usize,
    pub successes: usize,
    pub median_final_error: f64,
}

impl PhaseRow {
    pub fn success_rate(&self) -> f64 {
        self.successes as f64 / self.trials as f64
    }
}

#[derive(Debug, Clone)]
pub struct PhaseOutput {
    pub records: Vec<TrialRecord>,
    pub table: Vec<PhaseRow>,
}

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n == 0 {
        f64::NAN
    } else if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

/// Success rate of PF/RPF over seeds at each `m` (pooled over `kappa`).
pub fn run_phase_transition(spec: &ExperimentSpec) -> Result<PhaseOutput> {
    expect_kind(spec, ExperimentKind::PhaseTransition)?;
    let records = spec
        .grid()
        .into_par_iter()
        .map(|(kappa, m, seed)| {
            let problem = gen_problem(&spec.params(kappa, m, seed))?;
            Ok(run_pf_trial(spec, &problem, kappa, m, seed)?.record)
        })
        .collect::<Result<Vec<_>>>()?;
    let table = spec
        .m_values
        .iter()
        .map(|&m| {
            let at_m: Vec<&TrialRecord> = records.iter().filter(|r| r.m == m).collect();
            PhaseRow {
                m,
                trials: at_m.len(),
                successes: at_m.iter().filter(|r| r.success).count(),
                median_final_error: median(at_m.iter().map(|r| r.final_rel_error).collect()),
            }
        })
        .collect();
    Ok(PhaseOutput { records, table })
}

#[derive(Debug, Clone)]
pub struct CompareOutput {
    /// Alternating PF and IHT records for each grid point.
    pub records: Vec<TrialRecord>,
    pub pf_traces: Vec<SolveTrace>,
    pub iht_traces: Vec<SolveTrace>,
}

/// PF/RPF against hard thresholding on identical problems.
pub fn run_pf_vs_iht(spec: &ExperimentSpec) -> Result<CompareOutput> {
    expect_kind(spec, ExperimentKind::PfVsIht)?;
    let pairs = spec
        .grid()
        .into_par_iter()
        .map(|(kappa, m, seed)| {
            let problem = gen_problem(&spec.params(kappa, m, seed))?;
            let pf = run_pf_trial(spec, &problem, kappa, m, seed)?;
            let iht = run_iht_trial(spec, &problem, kappa, m, seed)?;
            Ok((pf, iht))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut out = CompareOutput {
        records: Vec::new(),
        pf_traces: Vec::new(),
        iht_traces: Vec::new(),
    };
    for (pf, iht) in pairs {
        out.records.push(pf.record);
        out.records.push(iht.record);
        out.pf_traces.push(pf.trace);
        out.iht_traces.push(iht.trace);
    }
    Ok(out)
}

fn expect_kind(spec: &ExperimentSpec, kind: ExperimentKind) -> Result<()> {
    if spec.kind != kind {
        return Err(invalid(format!("expected a {kind:?} spec, got {:?}", spec.kind)));
    }
    spec.validate()
}

/// Writes records as CSV; `wall_time_s` is empty unless timing was recorded.
pub fn write_records_csv<W: Write>(out: W, records: &[TrialRecord]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in records {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_phase_csv<W: Write>(out: W, table: &[PhaseRow]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in table {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_curves_csv<W: Write>(out: W, curves: &[CurvePoint]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in curves {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}
