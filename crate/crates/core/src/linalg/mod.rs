//! Dense linear algebra: matrices, SVD, rank-r projections, Procrustes
//! alignment and factor extraction.

mod decomp;
mod factors;
pub mod io;
mod mat;
mod procrustes;

pub use decomp::{
    extract_factors, factored_sigma_r, factored_singular_values, orthonormal_columns, project_rank, project_rank_factored, project_rank_psd,
    project_rank_psd_factored, singular_values, spectral_norm, svd, sym_eigen, SvdResult,
    SymEigen,
};
pub use factors::FactorPair;
pub use mat::Mat;
pub(crate) use mat::dot;
pub use procrustes::{dist, procrustes_align, AlignmentResult};
