//! Test matrices for the quality experiments, a Jacobi SVD oracle for the
//! singular-value floors, and truncation-error evaluation.

mod generators;
mod quality;
mod svd;

pub use generators::{
    fast_decay_profile, gen_bie_single_layer, gen_fast_decay, gen_kahan, gen_s_shape,
    random_orthogonal, s_shape_profile, with_singular_values, Curve, S_SHAPE_FLOOR,
};
pub use quality::{
    k_grid, truncation_errors, QualityReport, EXACT_SPECTRAL_MAX_DIM, EXPLICIT_RESIDUAL_MAX_N,
};
pub use svd::{jacobi_svd_values, spectral_norm, JACOBI_MAX_DIM};
