//! Low-rank matrix learning with nonconvex spectral regularizers.
//!
//! The crate solves problems of the form
//!
//! ```text
//!     min_X  f(X) + lambda * r(X),      r(X) = sum_i rhat(sigma_i(X))
//! ```
//!
//! where `rhat` is one of six scalar penalties (nuclear, capped-l1,
//! log-sum, truncated nuclear, SCAD, MCP) applied to the singular values
//! of `X`. Two concrete problems are built in: matrix completion over a
//! partially observed matrix and robust PCA (low-rank plus sparse
//! decomposition of a dense matrix).
//!
//! The solver is a proximal-gradient loop with three accelerations that
//! together avoid any full SVD:
//!
//! * the per-singular-value proximal subproblem is solved in closed form,
//!   and a penalty-specific threshold `gamma` zeroes small singular values
//!   up front so the active rank stays low;
//! * the proximal step is computed on `Q^T Z` where `Q` comes from a few
//!   warm-started power-method rounds, shrinking the SVD to a `k x n`
//!   matrix;
//! * for completion, the iterate map `Z = X - (1/tau) S_Omega(X - O)` is
//!   kept in "low-rank plus sparse" form so products against it cost
//!   `O((m+n)k^2 + |Omega| k)`.
//!
//! Each accepted step must decrease the objective by at least
//! `c1 * ||X_new - X_old||_F^2`; the telescoped consequences of that test
//! (square-summable step norms, a `1/T` rate on the smallest step) are
//! checked at the end of every run and reported in [`solver::RunReport`].
//!
//! The `fancl` binary exposes synthetic data generation, both solvers and
//! metric evaluation; see the README for CLI usage.

pub mod bench;
pub mod error;
pub mod gsvt;
pub mod linalg;
pub mod problems;
pub mod regularizers;
pub mod solver;

pub use error::{Error, Result};
pub use regularizers::{RegKind, RegularizerSpec};
