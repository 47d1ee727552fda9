//! Spectral geometry of the double-layer boundary operator on closed
//! surfaces in R^3.
//!
//! The pipeline: build a quadrature node set over a parametric chart or a
//! triangle mesh ([`surface`]), integrate the Willmore energy and check
//! Gauss–Bonnet ([`invariants`]), assemble the dense Nyström matrix of the
//! kernel <y-x, n(y)>/(4π|x-y|^3) ([`nystrom`]), extract ordered
//! eigenvalues and singular values and fit the j^{-1/2} decay constant
//! ([`spectrum`]), and cross-check the constant against the principal-symbol
//! densities ([`symbol`]). The [`cli`] module wires the same steps into the
//! `npweyl` binary.

pub mod cli;
pub mod error;
pub mod invariants;
pub mod io;
pub mod mobius;
pub mod nystrom;
pub mod spectrum;
pub mod surface;
pub mod symbol;

pub use error::{Error, Result};
