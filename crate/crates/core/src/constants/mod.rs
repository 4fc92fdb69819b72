//! Sobolev and interpolation constants and the derived constants `K₂ … K₅`.

mod bundle;
mod interp;
mod sobolev;
mod table;

pub use bundle::{
    assemble_bundle, assemble_bundle_with, assemble_from_values, k5, BundleInputs, ConstantBundle, K2Variant,
    SobolevValues,
};
pub use interp::{
    estimate_interp_constant, estimate_interp_constant_with, interp_ratio, InterpEstimate, InterpSearch,
    PiecewiseLinearField,
};
pub use sobolev::{
    estimate_sobolev_constant, estimate_sobolev_constant_with, sobolev_ratio, SobolevEstimate, SobolevSearch,
};
pub use table::{beta_key, beta_star, Provenance, SobolevConstantTable, SobolevEntry};

/// Safety factor applied to estimated lower bounds by default.
pub const DEFAULT_SAFETY: f64 = 1.5;

/// Estimates every `C_S(β)` missing from `table` and records it with `safety`.
pub fn fill_missing(
    table: &mut SobolevConstantTable,
    betas: &[f64],
    budget: usize,
    seed: u64,
    safety: f64,
) -> crate::Result<()> {
    for &beta in betas {
        if table.get(beta).is_none() {
            let v = estimate_sobolev_constant(beta, budget, seed)?;
            table.record_estimate(beta, v, safety)?;
        }
    }
    Ok(())
}
