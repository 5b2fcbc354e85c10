//! Low-rank matrix recovery from linear measurements by Procrustes Flow.
//!
//! The crate recovers a rank-`r` matrix `M` from `b = A(M)`, where `A` maps
//! `n₁×n₂` matrices to `ℝ^m` through sensing matrices `A_k`. A short run of
//! projected gradient steps produces an initial estimate, which is split into
//! factors `U, V` and refined by gradient descent on the factored loss.
//!
//! Modules:
//!
//! * [`linalg`]: dense matrices, SVD, rank-r projections, Procrustes distance.
//! * [`sensing`]: measurement operators, Gaussian ensembles, RIP probes.
//! * [`objectives`]: the factored losses and their gradients.
//! * [`solver`]: initialization, gradient descent and the IHT baseline.
//! * [`certify`]: runtime checks of the supporting inequalities.
//! * [`harness`]: planted problems and experiment drivers.

pub mod certify;
pub mod error;
pub mod harness;
pub mod linalg;
pub mod objectives;
pub mod rng;
pub mod sensing;
pub mod solver;

pub use error::{Error, Result};
pub use linalg::{FactorPair, Mat};
pub use sensing::{MeasurementOp, RipProbeReport};
pub use solver::{Mode, Solution, SolveTrace, SolverConfig};
