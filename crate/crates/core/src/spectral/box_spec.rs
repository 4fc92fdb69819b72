use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Periodic box `[0, L]^3` together with the viscosity and the regularity index.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoxSpec {
    #[serde(rename = "L")]
    pub l: f64,
    pub nu: f64,
    pub alpha: f64,
}

impl BoxSpec {
    pub fn new(l: f64, nu: f64, alpha: f64) -> Result<Self> {
        let spec = BoxSpec { l, nu, alpha };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.l.is_finite() && self.l > 0.0) {
            return Err(Error::invalid(format!("box side L must be positive, got {}", self.l)));
        }
        if !(self.nu.is_finite() && self.nu > 0.0) {
            return Err(Error::invalid(format!("viscosity must be positive, got {}", self.nu)));
        }
        check_alpha(self.alpha)
    }

    /// `4π²/L²`, the first Stokes eigenvalue per unit `|k|^2`.
    pub fn lambda_unit(&self) -> f64 {
        lambda_unit(self.l)
    }

    /// Exponent `3 / (2 - α)` of the gradient Lebesgue norm in the diagnostics.
    pub fn gradient_exponent(&self) -> f64 {
        3.0 / (2.0 - self.alpha)
    }
}

pub(crate) fn lambda_unit(l: f64) -> f64 {
    let w = 2.0 * std::f64::consts::PI / l;
    w * w
}

pub(crate) fn check_alpha(alpha: f64) -> Result<()> {
    if (0.5..=1.0).contains(&alpha) {
        Ok(())
    } else {
        Err(Error::invalid(format!("alpha must lie in [1/2, 1], got {alpha}")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_out_of_range() {
        assert!(BoxSpec::new(1.0, 1.0, 0.49).is_err());
        assert!(BoxSpec::new(1.0, 1.0, 1.01).is_err());
        assert!(BoxSpec::new(0.0, 1.0, 0.5).is_err());
        assert!(BoxSpec::new(1.0, -1.0, 0.5).is_err());
        assert!(BoxSpec::new(1.0, 1.0, 0.5).is_ok());
        assert!(BoxSpec::new(1.0, 1.0, 1.0).is_ok());
    }

    #[test]
    fn serializes_side_as_capital_l() {
        let b = BoxSpec::new(2.0, 0.5, 0.75).unwrap();
        let s = serde_json::to_string(&b).unwrap();
        assert!(s.contains("\"L\":2.0"));
    }
}
