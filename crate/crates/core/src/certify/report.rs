use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::constants::{ConstantBundle, K2Variant, Provenance};
use crate::solver::RunManifest;
use crate::spectral::BoxSpec;
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Criterion {
    A1,
    A2,
    A3,
    A4,
    C,
    P1,
    /// A-priori bound of the small-data theorem along a computed run.
    SmallDataBound,
    /// Bound on `[0, T0]` that accompanies the caloric lower bound.
    CaloricBound,
    /// Smallness of an `L0`-periodic datum tiled to a larger box.
    Corollary2,
}

/// Viscosity split `ν̄ + ε₁ + ε₂ < ν` plus the caloric parameters.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EpsilonBudget {
    pub nu_bar: f64,
    pub eps1: f64,
    pub eps2: f64,
    pub sigma: f64,
    pub delta: f64,
}

impl EpsilonBudget {
    /// `ε₁ = ε₂ = ν/10`, `ν̄ = ν/2`, `σ = ½`, `δ = ν/10`.
    pub fn default_for(nu: f64) -> Self {
        EpsilonBudget {
            nu_bar: nu / 2.0,
            eps1: nu / 10.0,
            eps2: nu / 10.0,
            sigma: 0.5,
            delta: nu / 10.0,
        }
    }

    fn check_positive(&self) -> Result<()> {
        let ok = |x: f64| x.is_finite() && x > 0.0;
        if !(ok(self.nu_bar) && ok(self.eps1) && ok(self.eps2) && ok(self.delta)) {
            return Err(Error::invalid("nu_bar, eps1, eps2 and delta must be positive"));
        }
        if !(self.sigma > 0.0 && self.sigma < 1.0) {
            return Err(Error::invalid(format!("sigma must lie in (0, 1), got {}", self.sigma)));
        }
        Ok(())
    }

    /// Requires `ν̄ + ε₁ + ε₂ < ν`; returns `μ = ν - ε₁ - ε₂ - ν̄`.
    pub fn check_stability(&self, nu: f64) -> Result<f64> {
        self.check_positive()?;
        let mu = nu - self.eps1 - self.eps2 - self.nu_bar;
        if mu <= 0.0 {
            return Err(Error::invalid(format!(
                "need nu_bar + eps1 + eps2 < nu, got {} + {} + {} >= {nu}",
                self.nu_bar, self.eps1, self.eps2
            )));
        }
        Ok(mu)
    }

    /// Requires `ν̄ + ε₂ < ν`.
    pub fn check_small_data(&self, nu: f64) -> Result<()> {
        self.check_positive()?;
        if self.nu_bar + self.eps2 >= nu {
            return Err(Error::invalid(format!(
                "need nu_bar + eps2 < nu, got {} + {} >= {nu}",
                self.nu_bar, self.eps2
            )));
        }
        Ok(())
    }

    /// `μ = ν - (ε₁ + ε₂ + K₂ |u0 - P_{k0} u0|_{α,L} / √2)`.
    pub fn caloric_mu(&self, nu: f64, k2: f64, high_norm: f64) -> f64 {
        nu - (self.eps1 + self.eps2 + k2 * high_norm / std::f64::consts::SQRT_2)
    }

    pub(crate) fn check_caloric(&self, nu: f64) -> Result<()> {
        self.check_positive()?;
        if self.eps1 + self.eps2 >= nu {
            return Err(Error::invalid("need eps1 + eps2 < nu"));
        }
        Ok(())
    }
}

/// Provenance of a certificate.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReportInputs {
    #[serde(rename = "box")]
    pub box_spec: BoxSpec,
    pub budget: EpsilonBudget,
    pub bundle: ConstantBundle,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t_end: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub quadrature: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub oversample: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trajectory: Option<RunManifest>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub extra: BTreeMap<String, Value>,
}

impl ReportInputs {
    pub fn new(box_spec: BoxSpec, budget: EpsilonBudget, bundle: &ConstantBundle) -> Self {
        ReportInputs {
            box_spec,
            budget,
            bundle: bundle.clone(),
            t_end: None,
            quadrature: None,
            oversample: None,
            trajectory: None,
            extra: BTreeMap::new(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CertificateReport {
    pub criterion: Criterion,
    pub lhs: f64,
    pub rhs: f64,
    /// `rhs - lhs`, also on failure.
    pub margin: f64,
    /// `lhs < rhs`; ties fail.
    pub passed: bool,
    pub caveats: Vec<String>,
    pub inputs: ReportInputs,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub details: BTreeMap<String, Value>,
}

pub const CAVEAT_FLOAT: &str = "non-rigorous: floating-point arithmetic throughout";
pub const CAVEAT_TRAPEZOID: &str = "time integrals of sampled diagnostics use the trapezoid rule on the sample grid";
pub const CAVEAT_LIFETIME: &str = "T < T_* replaced by the absence of a blow-up flag before T";
pub const CAVEAT_GALERKIN: &str = "solutions are replaced by Galerkin approximations";

impl CertificateReport {
    pub fn new(criterion: Criterion, lhs: f64, rhs: f64, inputs: ReportInputs) -> Self {
        let mut caveats = vec![CAVEAT_FLOAT.to_string()];
        let table = &inputs.bundle.table;
        if table.is_empty() {
            caveats.push("Sobolev constants supplied directly, no table provenance".into());
        } else if table.entries().values().any(|e| e.provenance == Provenance::Estimated) {
            caveats.push(
                "Sobolev constants are estimated lower bounds times a safety factor; the certificate holds only if the true constants do not exceed the table values"
                    .into(),
            );
        }
        if inputs.bundle.variant == K2Variant::Conservative {
            caveats.push("K2 is the larger of its closed form and its assembled form, which differ by (2π)^-3".into());
        }
        CertificateReport {
            criterion,
            lhs,
            rhs,
            margin: rhs - lhs,
            passed: lhs < rhs,
            caveats,
            inputs,
            details: BTreeMap::new(),
        }
    }

    pub fn caveat(mut self, text: impl Into<String>) -> Self {
        self.caveats.push(text.into());
        self
    }

    pub fn detail(mut self, key: &str, value: impl Serialize) -> Self {
        self.details
            .insert(key.to_string(), serde_json::to_value(value).unwrap_or(Value::Null));
        self
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

/// Checks that the bundle was assembled for this box and budget.
pub(crate) fn check_bundle(bundle: &ConstantBundle, spec: &BoxSpec, budget: &EpsilonBudget) -> Result<()> {
    let close = |a: f64, b: f64| (a - b).abs() <= 1e-12 * a.abs().max(b.abs());
    let i = &bundle.inputs;
    if !close(i.alpha, spec.alpha) || !close(i.l, spec.l) {
        return Err(Error::invalid(format!(
            "constant bundle was assembled for alpha = {}, L = {} but the box has alpha = {}, L = {}",
            i.alpha, i.l, spec.alpha, spec.l
        )));
    }
    if !close(i.eps1, budget.eps1) || !close(i.eps2, budget.eps2) {
        return Err(Error::invalid("constant bundle eps1/eps2 differ from the epsilon budget"));
    }
    Ok(())
}
