//! Planted problems, experiment drivers and their file formats.

mod experiment;
pub mod io;
mod problem;

pub use experiment::{
    rate_constant, run_convergence, run_pf_vs_iht, run_phase_transition, write_curves_csv,
    write_phase_csv, write_records_csv, CompareOutput, ConvergenceOutput, CurvePoint,
    ExperimentKind, ExperimentSpec, PhaseOutput, PhaseRow, TrialRecord,
};
pub use problem::{gen_problem, geometric_spectrum, PlantedProblem, ProblemParams};
