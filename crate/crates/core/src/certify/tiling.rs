use std::f64::consts::{PI, SQRT_2};

use super::report::{check_bundle, CertificateReport, Criterion, EpsilonBudget, ReportInputs};
use crate::constants::ConstantBundle;
use crate::spectral::{BoxSpec, HalfSpace, ModeCube, SpectralField};
use crate::{Error, Result};

/// The `L0`-periodic field `u` seen on the box of side `r L0`: coefficient
/// `u_k` moves to `r k`, every other coefficient is zero.
pub fn tile(u: &SpectralField, r: usize) -> Result<SpectralField> {
    if r == 0 {
        return Err(Error::invalid("tiling factor must be positive"));
    }
    let m = u.truncation();
    let cube = ModeCube::new(r * m);
    let mut modes = HalfSpace::zeros(cube);
    let ri = r as i32;
    for (k, v) in u.modes().iter() {
        modes.set([k[0] * ri, k[1] * ri, k[2] * ri], *v);
    }
    Ok(SpectralField::from_modes(
        u.side() * r as f64,
        modes,
        u.is_divergence_free(),
    ))
}

/// Integer `L / L0`, or an error.
pub fn tiling_factor(l0: f64, l: f64) -> Result<usize> {
    let r = l / l0;
    let n = r.round();
    if !(n >= 1.0 && (r - n).abs() <= 1e-9 * n) {
        return Err(Error::invalid(format!("L / L0 = {r} is not a positive integer")));
    }
    Ok(n as usize)
}

/// Smallness of an `L0`-periodic datum, unforced:
/// `L0 |u0|_{α,L0} < 2π ν̄ / (√2 C_S(1-α) C_S(1) C_S(α-½))`.
/// Also tiles the datum to side `l` and checks the mode embedding.
pub fn check_corollary2(
    u0: &SpectralField,
    l: f64,
    nu: f64,
    bundle: &ConstantBundle,
    budget: &EpsilonBudget,
) -> Result<(CertificateReport, SpectralField)> {
    let l0 = u0.side();
    let spec = BoxSpec::new(l0, nu, bundle.alpha())?;
    budget.check_small_data(nu)?;
    check_bundle(bundle, &spec, budget)?;
    let r = tiling_factor(l0, l)?;
    let alpha = spec.alpha;
    let tiled = tile(u0, r)?;

    let ri = r as i32;
    let mut embedding_error: f64 = 0.0;
    for (k, v) in tiled.modes().iter() {
        let on_lattice = k.iter().all(|c| c % ri == 0);
        let expected = if on_lattice {
            u0.coefficient([k[0] / ri, k[1] / ri, k[2] / ri])
        } else {
            [num_complex::Complex64::new(0.0, 0.0); 3]
        };
        for c in 0..3 {
            embedding_error = embedding_error.max((v[c] - expected[c]).norm());
        }
    }

    let cs = bundle.c_s;
    let lhs = l0 * u0.hs_norm(alpha);
    let rhs = 2.0 * PI * budget.nu_bar / (SQRT_2 * cs.one_minus_alpha * cs.one * cs.alpha_minus_half);
    let a4_threshold = budget.nu_bar / bundle.k2_closed_form;
    let mut inputs = ReportInputs::new(spec, *budget, bundle);
    inputs.extra.insert("L".into(), l.into());
    inputs.extra.insert("tiling_factor".into(), r.into());
    let report = CertificateReport::new(Criterion::Corollary2, lhs, rhs, inputs)
        .detail("embedding_max_error", embedding_error)
        .detail("tiled_norm_alpha", tiled.hs_norm(alpha))
        .detail("closed_form_k2_threshold", a4_threshold)
        .detail("threshold_identity_error", (a4_threshold - rhs / l0).abs() / a4_threshold);
    Ok((report, tiled))
}
