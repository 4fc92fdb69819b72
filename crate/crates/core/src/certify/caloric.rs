//! Lower bound on the strong-solution lifetime from the heat flow of the
//! low-frequency part of the datum.

use serde::{Deserialize, Serialize};

use super::quadrature::adaptive_simpson;
use super::report::{check_bundle, CertificateReport, Criterion, EpsilonBudget, ReportInputs, CAVEAT_GALERKIN, CAVEAT_TRAPEZOID};
use crate::constants::ConstantBundle;
use crate::solver::{heat_evolve, Trajectory};
use crate::spectral::{lambda_unit, tensor_product_norm, BoxSpec, SpectralField, Transform};
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CaloricOptions {
    /// Initial low-frequency cutoff.
    pub k0: usize,
    /// Raise `k0` until `μ > 0`.
    pub auto_raise: bool,
    pub t_max: f64,
    /// Number of coarse grid intervals on `[0, T_max]`.
    pub grid: usize,
    /// Bisection stops once `hi - lo <= rel_tol * lo`.
    pub rel_tol: f64,
    /// Physical grid oversampling for `|∇u^Lo|_{L^p}`.
    pub oversample: usize,
}

impl Default for CaloricOptions {
    fn default() -> Self {
        CaloricOptions {
            k0: 1,
            auto_raise: true,
            t_max: 10.0,
            grid: 64,
            rel_tol: 1e-4,
            oversample: 4,
        }
    }
}

/// Both sides of the caloric condition as functions of `T0`.
pub struct CaloricProblem {
    spec: BoxSpec,
    budget: EpsilonBudget,
    bundle: ConstantBundle,
    options: CaloricOptions,
    low: SpectralField,
    transform: Transform,
    pub k0: usize,
    /// `ν - (ε₁ + ε₂ + K₂ |u0 - P_{k0} u0|_{α,L} / √2)`.
    pub mu: f64,
    /// `ν - ε₁ - ε₂ - σμ`.
    pub c: f64,
    /// `((1-σ)μ/c - 1)²`.
    pub offset: f64,
    nodes: Vec<f64>,
    cum_tensor: Vec<f64>,
    cum_gradient: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CaloricBound {
    pub t0: f64,
    pub k0: usize,
    pub mu: f64,
    pub c: f64,
    pub offset: f64,
    /// `∫_0^{T0} |u^Lo ⊗ u^Lo|²_{1+α,L}`.
    pub tensor_integral: f64,
    /// `∫_0^{T0} |∇u^Lo|⁴_{L^{3/(2-α)}}`.
    pub gradient_integral: f64,
    pub report: CertificateReport,
}

impl CaloricProblem {
    pub fn new(
        u0: &SpectralField,
        spec: &BoxSpec,
        bundle: &ConstantBundle,
        budget: &EpsilonBudget,
        options: CaloricOptions,
    ) -> Result<Self> {
        spec.validate()?;
        budget.check_caloric(spec.nu)?;
        check_bundle(bundle, spec, budget)?;
        if u0.side() != spec.l {
            return Err(Error::BoxMismatch {
                left: spec.l,
                right: u0.side(),
            });
        }
        if !(options.t_max.is_finite() && options.t_max > 0.0) {
            return Err(Error::invalid("T_max must be positive"));
        }
        if options.grid == 0 || !(options.rel_tol > 0.0 && options.rel_tol < 1.0) || options.oversample < 2 {
            return Err(Error::invalid("grid >= 1, rel_tol in (0, 1) and oversample >= 2 required"));
        }
        if options.k0 == 0 {
            return Err(Error::invalid("k0 must be at least 1"));
        }
        let u0 = u0.leray_project();
        let m = u0.truncation();
        let mu_at = |k0: usize| budget.caloric_mu(spec.nu, bundle.k2, u0.high_pass(k0).hs_norm(spec.alpha));
        let mut k0 = options.k0.min(m.max(1));
        while mu_at(k0) <= 0.0 && options.auto_raise && k0 < m {
            k0 += 1;
        }
        let mu = mu_at(k0);
        if mu <= 0.0 {
            return Err(Error::invalid(format!(
                "mu = {mu} is not positive for any k0 <= {}",
                if options.auto_raise { m } else { k0 }
            )));
        }
        let c = spec.nu - budget.eps1 - budget.eps2 - budget.sigma * mu;
        let offset = ((1.0 - budget.sigma) * mu / c - 1.0).powi(2);
        let low = u0.low_pass(k0).resized(k0.min(m))?;
        let transform = Transform::new(options.oversample * (2 * low.truncation() + 1));
        let mut problem = CaloricProblem {
            spec: *spec,
            budget: *budget,
            bundle: bundle.clone(),
            low,
            transform,
            k0,
            mu,
            c,
            offset,
            nodes: vec![0.0],
            cum_tensor: vec![0.0],
            cum_gradient: vec![0.0],
            options,
        };
        let n = problem.options.grid;
        for j in 1..=n {
            let (a, b) = (problem.nodes[j - 1], problem.options.t_max * j as f64 / n as f64);
            let (it, ig) = problem.integrals_between(a, b)?;
            problem.cum_tensor.push(problem.cum_tensor[j - 1] + it);
            problem.cum_gradient.push(problem.cum_gradient[j - 1] + ig);
            problem.nodes.push(b);
        }
        Ok(problem)
    }

    fn tensor_integrand(&self, t: f64) -> Result<f64> {
        let u = heat_evolve(&self.low, t, self.spec.nu)?;
        Ok(tensor_product_norm(&u, 1.0 + self.spec.alpha).powi(2))
    }

    fn gradient_integrand(&self, t: f64) -> Result<f64> {
        let u = heat_evolve(&self.low, t, self.spec.nu)?;
        Ok(u.gradient_lp_norm_on(&self.transform, self.spec.gradient_exponent())?.powi(4))
    }

    fn integrate(&self, g: impl Fn(&Self, f64) -> Result<f64>, a: f64, b: f64) -> Result<f64> {
        if b <= a {
            return Ok(0.0);
        }
        let mut failure = None;
        let mut eval = |t: f64| match g(self, t) {
            Ok(v) => v,
            Err(e) => {
                failure.get_or_insert(e);
                0.0
            }
        };
        let scale = eval(a).max(eval(b)).max(f64::MIN_POSITIVE);
        let v = adaptive_simpson(&mut eval, a, b, 1e-13 * scale * (b - a));
        match failure {
            Some(e) => Err(e),
            None => Ok(v),
        }
    }

    fn integrals_between(&self, a: f64, b: f64) -> Result<(f64, f64)> {
        Ok((
            self.integrate(Self::tensor_integrand, a, b)?,
            self.integrate(Self::gradient_integrand, a, b)?,
        ))
    }

    /// `(∫_0^T |u^Lo⊗u^Lo|²_{1+α,L}, ∫_0^T |∇u^Lo|⁴_{L^p})` for `T <= T_max`.
    pub fn heat_integrals(&self, t: f64) -> Result<(f64, f64)> {
        if !(t >= 0.0 && t <= self.options.t_max * (1.0 + 1e-12)) {
            return Err(Error::invalid(format!("T0 = {t} outside [0, T_max]")));
        }
        let j = self.nodes.partition_point(|&x| x <= t).saturating_sub(1);
        let (it, ig) = self.integrals_between(self.nodes[j], t)?;
        Ok((self.cum_tensor[j] + it, self.cum_gradient[j] + ig))
    }

    fn sides_from(&self, t: f64, tensor: f64, gradient: f64) -> (f64, f64) {
        let alpha = self.spec.alpha;
        let lam = lambda_unit(self.spec.l);
        let lhs = (self.bundle.k2 / self.c).powi(2) / (2.0 * self.budget.delta) * lam.powf(2.0 * alpha + 1.0) * tensor;
        let rhs = (-self.bundle.k3 * (gradient + self.budget.delta * t)).exp() - self.offset;
        (lhs, rhs)
    }

    /// `(lhs(T0), rhs(T0))`.
    pub fn sides(&self, t: f64) -> Result<(f64, f64)> {
        let (a, b) = self.heat_integrals(t)?;
        Ok(self.sides_from(t, a, b))
    }

    fn admissible(&self, t: f64) -> Result<bool> {
        let (l, r) = self.sides(t)?;
        Ok(l <= r)
    }

    /// Largest admissible `T0 <= T_max`: coarse grid, then bisection.
    pub fn solve(&self) -> Result<CaloricBound> {
        let mut t0 = 0.0;
        let mut iterations = 0usize;
        if self.admissible(0.0)? {
            let mut hi = None;
            for &t in &self.nodes[1..] {
                if self.admissible(t)? {
                    t0 = t;
                } else {
                    hi = Some(t);
                    break;
                }
            }
            if let Some(mut hi) = hi {
                let mut lo = t0;
                while hi - lo > self.options.rel_tol * lo && iterations < 200 {
                    let mid = 0.5 * (lo + hi);
                    if self.admissible(mid)? {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                    iterations += 1;
                }
                t0 = lo;
            }
        }
        let (tensor, gradient) = self.heat_integrals(t0)?;
        let (lhs, rhs) = self.sides_from(t0, tensor, gradient);
        let mut inputs = ReportInputs::new(self.spec, self.budget, &self.bundle);
        inputs.t_end = Some(t0);
        inputs.quadrature = Some("adaptive Simpson on the heat flow of the low-frequency datum".into());
        inputs.oversample = Some(self.options.oversample);
        let mut report = CertificateReport::new(Criterion::A3, lhs, rhs, inputs)
            .detail("T0", t0)
            .detail("T_max", self.options.t_max)
            .detail("k0", self.k0)
            .detail("mu", self.mu)
            .detail("c", self.c)
            .detail("offset", self.offset)
            .detail("tensor_integral", tensor)
            .detail("gradient_integral", gradient)
            .detail("grid", self.options.grid)
            .detail("bisection_rel_tol", self.options.rel_tol)
            .detail("bisection_iterations", iterations)
            .detail("moreover_threshold", (self.c / self.bundle.k2).powi(2));
        if t0 == 0.0 {
            report = report.caveat("no admissible T0 > 0 at the grid resolution");
        }
        Ok(CaloricBound {
            t0,
            k0: self.k0,
            mu: self.mu,
            c: self.c,
            offset: self.offset,
            tensor_integral: tensor,
            gradient_integral: gradient,
            report,
        })
    }
}

pub fn caloric_lower_bound(
    u0: &SpectralField,
    spec: &BoxSpec,
    bundle: &ConstantBundle,
    budget: &EpsilonBudget,
    options: CaloricOptions,
) -> Result<CaloricBound> {
    CaloricProblem::new(u0, spec, bundle, budget, options)?.solve()
}

/// The bound that accompanies the caloric condition, on a caloric-mode run:
/// `sup_{t<=T0} ½|w|²_{α,L} + σ(4π²/L²) ∫_0^{T0} |w|²_{α+1,L} <= (c/K₂)²`
/// with `w = u - u^Lo`. The same quantity for `u` itself is reported in the details.
pub fn check_caloric_bound(
    traj: &Trajectory,
    bound: &CaloricBound,
    bundle: &ConstantBundle,
    budget: &EpsilonBudget,
) -> Result<CertificateReport> {
    let spec = traj.box_spec;
    check_bundle(bundle, &spec, budget)?;
    if !traj.config.caloric || traj.config.k0 != bound.k0 {
        return Err(Error::invalid(format!(
            "need a caloric-mode run with k0 = {}",
            bound.k0
        )));
    }
    let t0 = bound.t0;
    if t0 <= 0.0 || traj.horizon() < t0 * (1.0 - 1e-12) {
        return Err(Error::invalid(format!(
            "run horizon {} does not reach T0 = {t0}",
            traj.horizon()
        )));
    }
    let within: Vec<_> = traj.samples.iter().filter(|s| s.t <= t0 * (1.0 + 1e-12)).collect();
    let times: Vec<f64> = within.iter().map(|s| s.t).collect();
    let integral = |f: &dyn Fn(&crate::solver::DiagnosticsSample) -> f64| {
        let v: Vec<f64> = within.iter().map(|s| f(s)).collect();
        super::quadrature::trapezoid_upto(&times, &v, t0).unwrap_or(0.0)
    };
    let lam = lambda_unit(spec.l);
    let sup_x = within.iter().map(|s| s.x).fold(0.0, f64::max);
    let int_y = integral(&|s| s.y);
    let lhs = sup_x + budget.sigma * int_y;
    let sup_u = within.iter().map(|s| 0.5 * s.norm_alpha * s.norm_alpha).fold(0.0, f64::max);
    let full = sup_u + budget.sigma * lam * integral(&|s| s.norm_alpha_plus_1 * s.norm_alpha_plus_1);
    let rhs = (bound.c / bundle.k2).powi(2);
    let mut inputs = ReportInputs::new(spec, *budget, bundle);
    inputs.t_end = Some(t0);
    inputs.quadrature = Some("trapezoid on the sample grid".into());
    inputs.trajectory = Some(traj.manifest(None));
    Ok(CertificateReport::new(Criterion::CaloricBound, lhs, rhs, inputs)
        .caveat(CAVEAT_TRAPEZOID)
        .caveat(CAVEAT_GALERKIN)
        .detail("sup_X", sup_x)
        .detail("integral_Y", int_y)
        .detail("full_field_value", full)
        .detail("full_field_passed", full <= rhs))
}
