//! Spectral Navier–Stokes toolkit for the periodic box `[0, L]^3`.
//!
//! Fields are stored as Fourier coefficients on a cube of modes `|k_i| <= m`.
//! On top of that representation the crate provides homogeneous Sobolev norms,
//! fractional powers of the Stokes operator, alias-free quadratic products,
//! an integrating-factor Galerkin solver, estimators for the Sobolev–Poincaré
//! and parabolic interpolation constants, and checkers that turn the
//! quantitative stability and regularity criteria into machine-readable
//! certificates.
//!
//! All results are floating point and rely on estimated constants; every
//! certificate says so in its caveat list.

pub mod certify;
pub mod cli;
pub mod constants;
mod error;
pub mod solver;
pub mod spectral;

pub use error::{Error, Result};
pub use num_complex::Complex64;
