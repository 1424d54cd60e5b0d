//! Characteristic-function certainty relations for phase and number.
//!
//! The Weyl form of the commutation relations between the exponential of a
//! phase and the exponential of a number (or `j_3`) operator makes the Gram
//! matrix of three vectors `psi`, `shift(psi)`, `boost(psi)` positive
//! semi-definite. Its determinant bounds the characteristic functions
//! `Phi` (number side) and `PhiT` (phase side) from above.
//!
//! * [`spin`]: finite-dimensional pairs `E`, `F` and the qubit case.
//! * [`fock`]: single-mode Susskind-Glogower phase with truncated states.
//! * [`families`]: phase-coherent, Gaussian, Bessel and intermediate states,
//!   with closed-form characteristic functions for cross-validation.
//! * [`analysis`]: parameter scans, extremum search and figure datasets.
//! * [`verify`]: randomized invariant suites.
//! * [`cli`] and [`output`]: the `weyl-uncert` command line and its CSV/JSON
//!   formats.

// NaN must fail the range checks, hence `!(x <= y)` throughout.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod cli;
pub mod error;
pub mod families;
pub mod fock;
pub mod numerics;
pub mod output;
pub mod relations;
pub mod spin;
pub mod verify;

pub use error::{Error, Result};
pub use num_complex::Complex64;
