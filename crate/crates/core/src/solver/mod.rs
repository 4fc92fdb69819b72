//! Galerkin time integration with an exponential integrating factor.

mod config;
mod forcing;
mod integrate;
mod trajectory;

pub use config::SolverConfig;
pub use forcing::{ForcedMode, Forcing};
pub use integrate::integrate;
pub use trajectory::{difference_trajectory, DiagnosticsSample, RunManifest, RunStatus, Trajectory, TrajectoryKind};

use crate::spectral::{nonlinear_term, SpectralField};
use crate::{Error, Result};

/// Exact heat flow `u_k(t) = u_k(0) exp(-ν λ_k t)`.
pub fn heat_evolve(u0: &SpectralField, t: f64, nu: f64) -> Result<SpectralField> {
    if !(t.is_finite() && t >= 0.0) {
        return Err(Error::invalid(format!("time must be nonnegative, got {t}")));
    }
    if !(nu.is_finite() && nu > 0.0) {
        return Err(Error::invalid(format!("viscosity must be positive, got {nu}")));
    }
    if t == 0.0 {
        return Ok(u0.clone());
    }
    let mut out = u0.map_modes(|k, v| {
        let d = (-nu * u0.stokes_eigenvalue(k) * t).exp();
        v.map(|c| c * d)
    });
    if u0.is_divergence_free() {
        out.mark_divergence_free(1e-10)?;
    }
    Ok(out)
}

/// Tail `B(u_n, u_n) - P_n B(u_n, u_n)`, exact on all of its modes `<= 2n`.
pub fn galerkin_residual(u_n: &SpectralField, n: usize) -> Result<SpectralField> {
    if n == 0 {
        return Err(Error::invalid("truncation must be at least 1"));
    }
    let outside = u_n
        .modes()
        .iter()
        .any(|(k, v)| k.iter().any(|c| c.unsigned_abs() as usize > n) && v.iter().any(|c| c.norm_sqr() > 0.0));
    if outside {
        return Err(Error::invalid(format!("field has modes beyond the truncation {n}")));
    }
    let u = u_n.resized(n)?;
    Ok(nonlinear_term(&u, &u, 2 * n)?.high_pass(n))
}
