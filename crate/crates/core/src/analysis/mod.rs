//! Norm estimates, self-similarity residuals, growth bounds and file formats.

mod bounds;
pub mod io;
mod norm;
mod similarity;

pub use bounds::{check_capacity_bounds, CapacityReport};
pub use norm::{lip_norm_estimate, NormReport, DEFAULT_PAIR_BUDGET};
pub use similarity::{relative_self_similarity, self_similarity_residual};
