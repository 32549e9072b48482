//! Executable submajorization bounds for the change of Ritz values of
//! Hermitian matrices.
//!
//! The crate is layered bottom-up:
//!
//! * [`linalg`]: dense complex matrices, a Jacobi Hermitian eigensolver and a
//!   one-sided Jacobi SVD.
//! * [`majorization`]: `≺_w` / `≺` predicates with per-prefix margins.
//! * [`subspace`]: isometries, principal angles, projectors, sums and
//!   compressions of subspaces.
//! * [`bounds`]: Rayleigh quotients, residuals and every Ritz-value bound as a
//!   check producing a [`bounds::BoundReport`].
//! * [`harness`]: seeded instance generation, batch verification, angle sweeps
//!   and JSON matrix I/O.

pub mod bounds;
pub mod error;
pub mod harness;
pub mod linalg;
pub mod majorization;
pub mod subspace;

pub use error::{Error, Result};
