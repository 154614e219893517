//! Numerical laboratory for complex eigenvalues of semiclassical Schrödinger
//! operators `-ħ²Δ + V` with compactly supported complex potentials.
//!
//! The crate has two eigenvalue solvers and a layer of analysis tools on top:
//!
//! * [`secular`] — exact solver for piecewise-constant potentials. Eigenvalues
//!   are the zeros of an analytic matching determinant built from 2×2 transfer
//!   matrices, located by argument-principle winding counts plus Newton
//!   refinement.
//! * [`gridsolve`] — finite-difference solver for general sampled potentials,
//!   with spectral-pollution filtering and a radial reduction for `d ≥ 2`.
//! * [`functionals`] — eigenvalue-sum functionals (Riesz means, cone sums,
//!   distance-weighted sums, scale-invariant truncated sums) and the
//!   semiclassical phase-space constant.
//! * [`sweeps`] — reproducible ħ-sweeps over potential families with growth
//!   rate fits and CSV/JSON/SVG output.
//! * [`search`] — derivative-free search over parameterized potential
//!   families for bound-violation candidates.

pub mod eigen;
pub mod error;
pub mod functionals;
pub mod gridsolve;
pub mod potentials;
pub mod quad;
pub mod search;
pub mod secular;
pub mod sweeps;
pub mod util;

pub use eigen::{EigenSet, Eigenvalue, SolverTag};
pub use error::{Error, Result};

/// Double-precision complex scalar used throughout.
pub type C64 = num_complex::Complex64;
