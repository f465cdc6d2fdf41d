//! Dense column-major storage and the shared numerical plumbing.

pub mod io;
pub mod kernels;
mod matrix;
mod rng;
mod trail;

pub use kernels::FlopCounter;
pub use matrix::{MatMut, MatRef, Matrix};
pub use rng::{gaussian_matrix, GaussianRng};
pub use trail::{Direction, PivotTrail};

use crate::error::Result;

/// `sqrt(Σ a_ij²)`, accumulated with scaling.
pub fn frobenius_norm(a: MatRef<'_>) -> f64 {
    let mut scale = 0.0_f64;
    let mut ssq = 1.0_f64;
    for j in 0..a.cols() {
        for &x in a.col(j) {
            if x != 0.0 {
                let ax = x.abs();
                if scale < ax {
                    ssq = 1.0 + ssq * (scale / ax) * (scale / ax);
                    scale = ax;
                } else {
                    ssq += (ax / scale) * (ax / scale);
                }
            }
        }
    }
    scale * ssq.sqrt()
}

/// Permutes the columns of `a` in place according to `trail`.
pub fn apply_pivot_trail(a: &mut Matrix, trail: &PivotTrail, direction: Direction) -> Result<()> {
    trail.apply_to(a, direction)
}
