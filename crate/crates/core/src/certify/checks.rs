use serde::{Deserialize, Serialize};

use super::quadrature::{adaptive_simpson, cumulative_trapezoid, trapezoid_upto};
use super::report::{
    check_bundle, CertificateReport, Criterion, EpsilonBudget, ReportInputs, CAVEAT_GALERKIN, CAVEAT_LIFETIME,
    CAVEAT_TRAPEZOID,
};
use crate::constants::ConstantBundle;
use crate::solver::{Forcing, RunStatus, Trajectory};
use crate::spectral::{lambda_unit, BoxSpec, SpectralField};
use crate::{Error, Result};

/// `∫_0^T |f(t) - g(t)|²_{s,L} dt` by adaptive Simpson.
pub fn forcing_integral(f: &Forcing, g: Option<&Forcing>, t_end: f64, s: f64) -> Result<f64> {
    let zero = Forcing::Zero;
    let g = g.unwrap_or(&zero);
    if f.is_zero() && g.is_zero() {
        return Ok(0.0);
    }
    let m = f.truncation().max(g.truncation()).max(1);
    let mut failure = None;
    let mut eval = |t: f64| match f.difference_at(g, t, m) {
        Ok(h) => h.map_or(0.0, |h| h.hs_norm_sq(s)),
        Err(e) => {
            failure.get_or_insert(e);
            0.0
        }
    };
    let scale = [0.0, 0.5 * t_end, t_end]
        .iter()
        .map(|&t| eval(t))
        .fold(0.0, f64::max)
        .max(f64::MIN_POSITIVE);
    let v = adaptive_simpson(&mut eval, 0.0, t_end, 1e-13 * scale * t_end);
    match failure {
        Some(e) => Err(e),
        None => Ok(v),
    }
}

fn check_horizon(traj: &Trajectory, t_end: f64) -> Result<()> {
    if !(t_end.is_finite() && t_end > 0.0) {
        return Err(Error::invalid("T must be positive"));
    }
    match traj.status {
        RunStatus::Completed => {}
        RunStatus::NormExceeded { t, .. } | RunStatus::StepFailure { t } => {
            if t_end >= t {
                return Err(Error::invalid(format!(
                    "T = {t_end} is not below the observed horizon {t} of the reference run"
                )));
            }
        }
    }
    if t_end > traj.horizon() * (1.0 + 1e-12) {
        return Err(Error::invalid(format!(
            "T = {t_end} lies beyond the last sample {} of the reference run",
            traj.horizon()
        )));
    }
    Ok(())
}

fn integrate_samples(traj: &Trajectory, t_end: f64, f: impl Fn(&crate::solver::DiagnosticsSample) -> f64) -> Result<f64> {
    let times = traj.times();
    let values: Vec<f64> = traj.samples.iter().map(f).collect();
    trapezoid_upto(&times, &values, t_end).ok_or_else(|| Error::invalid("T beyond the sampled range"))
}

fn sup_samples(traj: &Trajectory, t_end: f64, f: impl Fn(&crate::solver::DiagnosticsSample) -> f64) -> f64 {
    traj.samples
        .iter()
        .filter(|s| s.t <= t_end * (1.0 + 1e-12))
        .map(f)
        .fold(0.0, f64::max)
}

/// Smallness condition of the small-data theorem:
/// `|u0|²_{α,L} + K₄ ∫_0^T |f|²_{α-1,L} < (ν̄/K₂)²`.
pub fn check_smallness_a4(
    u0: &SpectralField,
    forcing: &Forcing,
    t_end: f64,
    bundle: &ConstantBundle,
    budget: &EpsilonBudget,
    spec: &BoxSpec,
) -> Result<CertificateReport> {
    spec.validate()?;
    budget.check_small_data(spec.nu)?;
    check_bundle(bundle, spec, budget)?;
    if u0.side() != spec.l {
        return Err(Error::BoxMismatch {
            left: spec.l,
            right: u0.side(),
        });
    }
    forcing.validate(spec.l)?;
    let initial = u0.hs_norm_sq(spec.alpha);
    let force = forcing_integral(forcing, None, t_end, spec.alpha - 1.0)?;
    let lhs = initial + bundle.k4 * force;
    let rhs = (budget.nu_bar / bundle.k2).powi(2);
    let mut inputs = ReportInputs::new(*spec, *budget, bundle);
    inputs.t_end = Some(t_end);
    inputs.quadrature = Some("adaptive Simpson on the forcing representation".into());
    Ok(CertificateReport::new(Criterion::A4, lhs, rhs, inputs)
        .detail("initial_term", initial)
        .detail("forcing_integral", force)
        .detail("dissipation_coefficient", spec.nu - budget.nu_bar - budget.eps2))
}

/// A-priori bound of the small-data theorem on a computed run:
/// `sup_t |u|²_{α,L} + (ν - ν̄ - ε₂) ∫_0^T |u|²_{α+1,L} <= (ν̄/K₂)²`.
pub fn check_small_data_bound(
    traj: &Trajectory,
    t_end: f64,
    bundle: &ConstantBundle,
    budget: &EpsilonBudget,
) -> Result<CertificateReport> {
    let spec = traj.box_spec;
    budget.check_small_data(spec.nu)?;
    check_bundle(bundle, &spec, budget)?;
    check_horizon(traj, t_end)?;
    let sup = sup_samples(traj, t_end, |s| s.norm_alpha * s.norm_alpha);
    let diss = integrate_samples(traj, t_end, |s| s.norm_alpha_plus_1 * s.norm_alpha_plus_1)?;
    let coeff = spec.nu - budget.nu_bar - budget.eps2;
    let lhs = sup + coeff * diss;
    let rhs = (budget.nu_bar / bundle.k2).powi(2);
    let running = running_bound(traj, |s| s.norm_alpha * s.norm_alpha, |s| s.norm_alpha_plus_1.powi(2), coeff);
    let mut inputs = ReportInputs::new(spec, *budget, bundle);
    inputs.t_end = Some(t_end);
    inputs.quadrature = Some("trapezoid on the sample grid".into());
    inputs.trajectory = Some(traj.manifest(None));
    Ok(CertificateReport::new(Criterion::SmallDataBound, lhs, rhs, inputs)
        .caveat(CAVEAT_TRAPEZOID)
        .caveat(CAVEAT_GALERKIN)
        .detail("sup_norm_alpha_sq", sup)
        .detail("dissipation_integral", diss)
        .detail("max_running_value", running.iter().cloned().fold(0.0, f64::max)))
}

/// `sup_{s<=t} a(s) + c ∫_0^t b` at every sample.
fn running_bound(
    traj: &Trajectory,
    a: impl Fn(&crate::solver::DiagnosticsSample) -> f64,
    b: impl Fn(&crate::solver::DiagnosticsSample) -> f64,
    c: f64,
) -> Vec<f64> {
    let times = traj.times();
    let bs: Vec<f64> = traj.samples.iter().map(b).collect();
    let cum = cumulative_trapezoid(&times, &bs);
    let mut sup: f64 = 0.0;
    traj.samples
        .iter()
        .zip(cum)
        .map(|(s, i)| {
            sup = sup.max(a(s));
            sup + c * i
        })
        .collect()
}

/// Data of the perturbed problem.
#[derive(Clone, Debug)]
pub struct PerturbedData<'a> {
    pub v0: &'a SpectralField,
    pub g: &'a Forcing,
}

fn proximity_data(
    u_traj: &Trajectory,
    v: &PerturbedData,
    t_end: f64,
    bundle: &ConstantBundle,
    budget: &EpsilonBudget,
) -> Result<(f64, f64, f64)> {
    let spec = u_traj.box_spec;
    budget.check_stability(spec.nu)?;
    check_bundle(bundle, &spec, budget)?;
    check_horizon(u_traj, t_end)?;
    if v.v0.side() != spec.l {
        return Err(Error::BoxMismatch {
            left: spec.l,
            right: v.v0.side(),
        });
    }
    v.g.validate(spec.l)?;
    let m = u_traj.initial.truncation().max(v.v0.truncation());
    let v0 = v.v0.leray_project().resized(m)?;
    let initial = u_traj.initial.resized(m)?.try_sub(&v0)?.hs_norm_sq(spec.alpha);
    let force = forcing_integral(&u_traj.forcing, Some(v.g), t_end, spec.alpha - 1.0)?;
    Ok((initial, force, initial + bundle.k4 * force))
}

/// Proximity condition of the stability theorem:
/// `(|u0 - v0|²_{α,L} + K₄ ∫|f - g|²_{α-1,L}) exp(K₃ ∫_0^T U) < (ν̄/K₂)²`.
pub fn check_proximity_a1(
    u_traj: &Trajectory,
    v: &PerturbedData,
    t_end: f64,
    bundle: &ConstantBundle,
    budget: &EpsilonBudget,
) -> Result<CertificateReport> {
    let (initial, force, data) = proximity_data(u_traj, v, t_end, bundle, budget)?;
    let spec = u_traj.box_spec;
    let int_u = integrate_samples(u_traj, t_end, |s| s.u)?;
    let lhs = data * (bundle.k3 * int_u).exp();
    let rhs = (budget.nu_bar / bundle.k2).powi(2);
    let mut inputs = ReportInputs::new(spec, *budget, bundle);
    inputs.t_end = Some(t_end);
    inputs.quadrature = Some("trapezoid on the sample grid for U, adaptive Simpson for forcing".into());
    inputs.oversample = Some(u_traj.config.oversample);
    inputs.trajectory = Some(u_traj.manifest(None));
    let report = CertificateReport::new(Criterion::A1, lhs, rhs, inputs)
        .caveat(CAVEAT_TRAPEZOID)
        .caveat(CAVEAT_LIFETIME)
        .detail("initial_term", initial)
        .detail("forcing_integral", force)
        .detail("u_integral", int_u)
        .detail("exponent", bundle.k3 * int_u);
    Ok(if report.passed {
        report
            .detail("p1_threshold", rhs)
            .detail("p1_dissipation_coefficient", spec.nu - (budget.nu_bar + budget.eps1 + budget.eps2))
    } else {
        report
    })
}

/// Cruder proximity condition with `∫U` replaced by
/// `C_I⁴ (4π²/L²)^{2(α-1)} |u|²_{L^∞ Ḣ^α} |u|²_{L² Ḣ^{1+α}}`.
pub fn check_proximity_a2(
    u_traj: &Trajectory,
    v: &PerturbedData,
    t_end: f64,
    bundle: &ConstantBundle,
    budget: &EpsilonBudget,
) -> Result<CertificateReport> {
    let c_i = bundle
        .c_i
        .ok_or_else(|| Error::invalid("the constant bundle has no interpolation constant"))?;
    let (initial, force, data) = proximity_data(u_traj, v, t_end, bundle, budget)?;
    let spec = u_traj.box_spec;
    let alpha = spec.alpha;
    let sup = sup_samples(u_traj, t_end, |s| s.norm_alpha * s.norm_alpha);
    let l2 = integrate_samples(u_traj, t_end, |s| s.norm_alpha_plus_1 * s.norm_alpha_plus_1)?;
    let scale = lambda_unit(spec.l).powf(2.0 * (alpha - 1.0));
    let interp = c_i.powi(4) * scale * sup * l2;
    let lhs = data * (bundle.k3 * interp).exp();
    let rhs = (budget.nu_bar / bundle.k2).powi(2);
    let int_u = integrate_samples(u_traj, t_end, |s| s.u)?;
    let observed = if sup * l2 > 0.0 {
        (int_u / (scale * sup * l2)).powf(0.25)
    } else {
        0.0
    };
    let mut inputs = ReportInputs::new(spec, *budget, bundle);
    inputs.t_end = Some(t_end);
    inputs.quadrature = Some("trapezoid on the sample grid, sup over samples".into());
    inputs.trajectory = Some(u_traj.manifest(None));
    let mut report = CertificateReport::new(Criterion::A2, lhs, rhs, inputs)
        .caveat(CAVEAT_TRAPEZOID)
        .caveat(CAVEAT_LIFETIME)
        .detail("initial_term", initial)
        .detail("forcing_integral", force)
        .detail("sup_norm_alpha_sq", sup)
        .detail("l2_norm_alpha_plus_1_sq", l2)
        .detail("interpolation_bound", interp)
        .detail("observed_interp_ratio", observed);
    if observed > c_i {
        report = report.caveat(format!(
            "interpolation constant {c_i} is below the ratio {observed} observed on this trajectory"
        ));
    }
    Ok(report)
}

/// Closeness estimate of the stability theorem on a difference run:
/// `sup_t |w|²_{α,L} + (ν - ν̄ - ε₁ - ε₂) ∫_0^T |w|²_{α+1,L} <= (ν̄/K₂)²`.
pub fn check_p1(diff: &Trajectory, t_end: f64, bundle: &ConstantBundle, budget: &EpsilonBudget) -> Result<CertificateReport> {
    let spec = diff.box_spec;
    let mu = budget.check_stability(spec.nu)?;
    check_bundle(bundle, &spec, budget)?;
    check_horizon(diff, t_end)?;
    let sup = sup_samples(diff, t_end, |s| s.norm_alpha * s.norm_alpha);
    let diss = integrate_samples(diff, t_end, |s| s.norm_alpha_plus_1 * s.norm_alpha_plus_1)?;
    let lhs = sup + mu * diss;
    let rhs = (budget.nu_bar / bundle.k2).powi(2);
    let running = running_bound(diff, |s| s.norm_alpha * s.norm_alpha, |s| s.norm_alpha_plus_1.powi(2), mu);
    let mut inputs = ReportInputs::new(spec, *budget, bundle);
    inputs.t_end = Some(t_end);
    inputs.quadrature = Some("trapezoid on the sample grid".into());
    inputs.trajectory = Some(diff.manifest(None));
    Ok(CertificateReport::new(Criterion::P1, lhs, rhs, inputs)
        .caveat(CAVEAT_TRAPEZOID)
        .caveat(CAVEAT_GALERKIN)
        .detail("sup_norm_alpha_sq", sup)
        .detail("dissipation_integral", diss)
        .detail("running", running))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GronwallReport {
    pub times: Vec<f64>,
    /// `X(t) + μ ∫_0^t Y`.
    pub observed: Vec<f64>,
    /// `(X(0) + K₄ ∫_0^t H) exp(K₃ ∫_0^t U)`.
    pub envelope: Vec<f64>,
    pub mu: f64,
    pub tolerance: f64,
    /// Sample indices where `observed > envelope (1 + tolerance)`.
    pub violations: Vec<usize>,
    pub caveats: Vec<String>,
}

/// Compares a difference run with its Grönwall envelope, `μ = ν - ε₁ - ε₂ - ν̄`.
pub fn gronwall_envelope(
    diff: &Trajectory,
    bundle: &ConstantBundle,
    budget: &EpsilonBudget,
    tolerance: f64,
) -> Result<GronwallReport> {
    let spec = diff.box_spec;
    let mu = budget.check_stability(spec.nu)?;
    check_bundle(bundle, &spec, budget)?;
    if diff.samples.is_empty() {
        return Err(Error::invalid("empty trajectory"));
    }
    let times = diff.times();
    let col = |f: fn(&crate::solver::DiagnosticsSample) -> f64| -> Vec<f64> { diff.samples.iter().map(f).collect() };
    let int_h = cumulative_trapezoid(&times, &col(|s| s.h));
    let int_u = cumulative_trapezoid(&times, &col(|s| s.u));
    let int_y = cumulative_trapezoid(&times, &col(|s| s.y));
    let x0 = diff.samples[0].x;
    let mut observed = Vec::with_capacity(times.len());
    let mut envelope = Vec::with_capacity(times.len());
    let mut violations = Vec::new();
    for (i, s) in diff.samples.iter().enumerate() {
        let env = (x0 + bundle.k4 * int_h[i]) * (bundle.k3 * int_u[i]).exp();
        let obs = s.x + mu * int_y[i];
        if obs > env * (1.0 + tolerance) {
            violations.push(i);
        }
        observed.push(obs);
        envelope.push(env);
    }
    Ok(GronwallReport {
        times,
        observed,
        envelope,
        mu,
        tolerance,
        violations,
        caveats: vec![CAVEAT_TRAPEZOID.into(), CAVEAT_GALERKIN.into()],
    })
}

impl GronwallReport {
    /// CSV series `t, observed, envelope`.
    pub fn write_csv<W: std::io::Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(["t", "observed", "envelope"])
            .map_err(|e| Error::Format(e.to_string()))?;
        for i in 0..self.times.len() {
            out.write_record([
                self.times[i].to_string(),
                self.observed[i].to_string(),
                self.envelope[i].to_string(),
            ])
            .map_err(|e| Error::Format(e.to_string()))?;
        }
        out.flush()?;
        Ok(())
    }
}
