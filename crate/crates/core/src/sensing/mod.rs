//! Linear measurement operators, random ensembles and RIP probes.

mod ensembles;
pub mod io;
mod op;
mod rip;

pub use ensembles::{gaussian_ensemble, generate, spiked_gaussian_ensemble};
pub use op::{EnsembleKind, EnsembleOrigin, MeasurementOp, MAX_DENSE_ENTRIES};
pub use rip::{default_probe_rank, probe_matrix, probe_rip, trial_indices, RipProbeReport};
