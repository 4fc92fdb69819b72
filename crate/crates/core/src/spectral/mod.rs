//! Fourier representation of zero-mean periodic vector fields on `[0, L]^3`.

mod box_spec;
pub mod fft3;
mod field;
mod modes;
pub mod physical;
mod product;
pub mod snapshot;

pub use box_spec::BoxSpec;
pub(crate) use box_spec::{check_alpha, lambda_unit};
pub use field::{GradientField, ScalarField, SpectralField, Vec3c};
pub use modes::{Coefficient, HalfSpace, ModeCube, Slot, Wave};
pub use physical::{PhysicalSample, Transform};
pub use product::{
    nonlinear_term, product_grid, tensor_product_coefficients, tensor_product_norm, Convection,
};
