//! Dense Householder QR factorizations with classical and randomized
//! column pivoting.
//!
//! The crate is organized bottom-up:
//!
//! * [`matcore`] holds column-major storage, views, BLAS-like kernels with
//!   optional flop counting, pivot trails, seeded Gaussian sampling and
//!   matrix file I/O.
//! * [`householder`] computes reflectors and the unpivoted factorizations
//!   (unblocked with `T` accumulation, and blocked via the UT transform).
//! * [`pivoting`] implements classical column pivoting: weight downdating,
//!   MGS with pivoting, the two unblocked HQRP variants and the blocked
//!   `geqp3`-style driver.
//! * [`randqr`] implements the randomized blocked pivoted QR, selecting a
//!   whole block of pivots from a small Gaussian sketch and downdating that
//!   sketch between panels.
//! * [`testmats`] generates the quality-experiment matrices and evaluates
//!   truncation errors against singular-value floors.

pub mod error;
pub mod householder;
pub mod matcore;
pub mod pivoting;
pub mod randqr;
pub mod testmats;

pub use error::{Error, Result};
pub use householder::{form_q, hqr_blk, hqr_unb, QrFactors};
pub use matcore::{FlopCounter, GaussianRng, MatMut, MatRef, Matrix, PivotTrail};
pub use pivoting::{hqrp_blk, hqrp_unb};
pub use randqr::{hqrrp_blk, SketchMode};
