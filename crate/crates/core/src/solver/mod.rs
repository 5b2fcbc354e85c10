//! Procrustes Flow solvers and the hard-thresholding baseline.

mod config;
mod flow;
mod trace;

pub use config::{theory_t_init, InitSchedule, Mode, SolverConfig, MU_PSD, MU_RECT, STOP_RATIO};
pub use flow::{
    check_init_complete, gd_phase, init_phase, iht_baseline, procrustes_flow, InitOutput,
    Solution, StopVerdict,
};
pub(crate) use flow::relative_error;
pub use trace::{Phase, SolveTrace, TraceRow, CSV_HEADER};
