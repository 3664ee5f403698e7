//! Kernel positivity, operator compressions and sub-Hardy space structure for
//! bounded analytic symbols on the unit disk.
//!
//! The crate decides membership of a symbol `f` in the Schur class, its
//! inverse class, and the two Bergman-defect classes by two independent
//! routes (sampled modulus and kernel Gram positivity), builds exact finite
//! compressions of Toeplitz and Bergman multiplication operators, and
//! checks the structure of the spaces `K(φ)`, `L(φ)` and `H(1/φ)` on finite
//! kernel sections.

pub mod classify;
pub mod cli;
pub mod error;
pub mod hermit;
pub mod kernels;
pub mod opcomp;
pub mod points;
pub mod report;
pub mod subhardy;
pub mod symbol;

pub use error::{Error, Result};
pub use hermit::{CMatrix, HermitianMatrix, Verdict};
pub use points::PointSet;
pub use symbol::{DiskPoint, Expr, Symbol};
