use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::Result;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Phase {
    Init,
    Gd,
    Iht,
}

impl Phase {
    pub fn name(self) -> &'static str {
        match self {
            Phase::Init => "init",
            Phase::Gd => "gd",
            Phase::Iht => "iht",
        }
    }
}

/// Diagnostics for one iterate.
///
/// Init and IHT rows describe `M̃_τ`: `residual` is `e_τ = ‖A(M̃_τ) − b‖`,
/// `sigma_r` is `σ_r(M̃_τ)` and `stop_test` is the residual-test verdict. For
/// init rows `dist` is the Procrustes distance of the factors of `M̃_τ` to the
/// truth; for IHT rows it is `‖M̃_τ − M‖_F`.
///
/// GD rows describe `(U_τ, V_τ)`: `residual` is `‖A(U_τV_τᵀ) − b‖`,
/// `objective` is `f` or `g`, `dist` is measured on `U` (PSD) or `[U; V]`.
///
/// `contraction` is the ratio of consecutive `dist` values within a phase and
/// `rel_error` is `‖M_τ − M‖_F / ‖M‖_F`. Truth-dependent fields are `None`
/// without a truth.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceRow {
    pub phase: Phase,
    pub iter: usize,
    pub residual: f64,
    pub objective: Option<f64>,
    pub sigma_r: Option<f64>,
    pub dist: Option<f64>,
    pub contraction: Option<f64>,
    pub stop_test: Option<bool>,
    pub rel_error: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct SolveTrace {
    pub rows: Vec<TraceRow>,
    /// Number of projected-gradient steps taken before the handoff.
    pub init_steps: usize,
    /// Under the AUTO schedule, whether the stop test passed within the cap.
    pub init_completed: Option<bool>,
    /// Set when the stop test was applied in rectangular mode, where it is a
    /// heuristic carried over from the PSD case.
    pub stop_test_heuristic: bool,
    /// Rank-r projections (one SVD or eigendecomposition each) performed.
    pub svd_count: usize,
}

pub const CSV_HEADER: [&str; 7] = [
    "phase",
    "iter",
    "residual",
    "objective",
    "sigma_r",
    "dist",
    "contraction",
];

fn field(x: Option<f64>) -> String {
    x.map(|v| v.to_string()).unwrap_or_default()
}

impl SolveTrace {
    pub fn phase_rows(&self, phase: Phase) -> impl Iterator<Item = &TraceRow> {
        self.rows.iter().filter(move |r| r.phase == phase)
    }

    /// Gradient steps taken (GD rows minus the starting row).
    pub fn gd_iterations(&self) -> usize {
        self.phase_rows(Phase::Gd).count().saturating_sub(1)
    }

    pub fn last(&self) -> Option<&TraceRow> {
        self.rows.last()
    }

    pub(crate) fn push(&mut self, row: TraceRow) {
        self.rows.push(row);
    }

    /// Writes `phase,iter,residual,objective,sigma_r,dist,contraction`, with
    /// empty fields for absent values.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(CSV_HEADER)?;
        for r in &self.rows {
            w.write_record([
                r.phase.name().to_owned(),
                r.iter.to_string(),
                r.residual.to_string(),
                field(r.objective),
                field(r.sigma_r),
                field(r.dist),
                field(r.contraction),
            ])?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn save_csv(&self, path: impl AsRef<std::path::Path>) -> Result<()> {
        self.write_csv(std::io::BufWriter::new(std::fs::File::create(path)?))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_leaves_missing_fields_empty() {
        let mut t = SolveTrace::default();
        t.push(TraceRow {
            phase: Phase::Gd,
            iter: 0,
            residual: 0.5,
            objective: Some(0.125),
            sigma_r: None,
            dist: None,
            contraction: None,
            stop_test: None,
            rel_error: None,
        });
        let mut buf = Vec::new();
        t.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(
            text,
            "phase,iter,residual,objective,sigma_r,dist,contraction\ngd,0,0.5,0.125,,,\n"
        );
        assert_eq!(t.gd_iterations(), 0);
    }
}
