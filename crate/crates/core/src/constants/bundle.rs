use std::f64::consts::{PI, SQRT_2};

use serde::{Deserialize, Serialize};

use super::table::SobolevConstantTable;
use crate::spectral::{check_alpha, lambda_unit, tensor_product_norm, SpectralField};
use crate::{Error, Result};

/// Which expression for `K₂` the certificates use.
///
/// The closed form `√2 C_S(1-α) C_S(1) C_S(α-½) (2π/L)^{-1}` and the product
/// `√2 K_{2.8} K_{2.9} (4π²/L²)^{-α/2}` differ by exactly `(2π)^{-3}`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum K2Variant {
    ClosedForm,
    Assembled,
    /// The larger of the two.
    #[default]
    Conservative,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BundleInputs {
    pub alpha: f64,
    #[serde(rename = "L")]
    pub l: f64,
    pub eps1: f64,
    pub eps2: f64,
}

/// Effective `C_S` values at `β = 1-α, 1, α-½`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SobolevValues {
    pub one_minus_alpha: f64,
    pub one: f64,
    pub alpha_minus_half: f64,
}

impl SobolevValues {
    pub fn betas(alpha: f64) -> [f64; 3] {
        [1.0 - alpha, 1.0, alpha - 0.5]
    }

    pub fn from_table(table: &SobolevConstantTable, alpha: f64) -> Result<Self> {
        let [a, b, c] = Self::betas(alpha);
        Ok(SobolevValues {
            one_minus_alpha: table.require(a)?,
            one: table.require(b)?,
            alpha_minus_half: table.require(c)?,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConstantBundle {
    pub inputs: BundleInputs,
    pub c_s: SobolevValues,
    pub k_28: f64,
    pub k_29: f64,
    /// `K₂` selected by `variant`.
    pub k2: f64,
    pub k2_closed_form: f64,
    pub k2_assembled: f64,
    pub variant: K2Variant,
    pub k3: f64,
    pub k3_closed_form: f64,
    pub k4: f64,
    pub k4_closed_form: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c_i: Option<f64>,
    pub table: SobolevConstantTable,
}

fn check_inputs(inputs: &BundleInputs) -> Result<()> {
    check_alpha(inputs.alpha)?;
    if !(inputs.l.is_finite() && inputs.l > 0.0) {
        return Err(Error::invalid(format!("box side must be positive, got {}", inputs.l)));
    }
    if !(inputs.eps1.is_finite() && inputs.eps1 > 0.0 && inputs.eps2.is_finite() && inputs.eps2 > 0.0) {
        return Err(Error::invalid("eps1 and eps2 must be positive"));
    }
    Ok(())
}

/// Looks up the three `C_S` values in `table` and assembles the bundle.
pub fn assemble_bundle(
    alpha: f64,
    l: f64,
    eps1: f64,
    eps2: f64,
    table: &SobolevConstantTable,
) -> Result<ConstantBundle> {
    assemble_bundle_with(alpha, l, eps1, eps2, table, K2Variant::default())
}

pub fn assemble_bundle_with(
    alpha: f64,
    l: f64,
    eps1: f64,
    eps2: f64,
    table: &SobolevConstantTable,
    variant: K2Variant,
) -> Result<ConstantBundle> {
    let inputs = BundleInputs { alpha, l, eps1, eps2 };
    check_inputs(&inputs)?;
    let c_s = SobolevValues::from_table(table, alpha)?;
    let mut bundle = assemble_from_values(inputs, c_s, variant)?;
    bundle.table = table.snapshot(&SobolevValues::betas(alpha));
    Ok(bundle)
}

/// Bundle from explicit `C_S` values; the embedded table is empty.
pub fn assemble_from_values(inputs: BundleInputs, c_s: SobolevValues, variant: K2Variant) -> Result<ConstantBundle> {
    check_inputs(&inputs)?;
    for v in [c_s.one_minus_alpha, c_s.one, c_s.alpha_minus_half] {
        if !(v.is_finite() && v > 0.0) {
            return Err(Error::invalid("Sobolev constants must be positive"));
        }
    }
    let BundleInputs { alpha, l, eps1, eps2 } = inputs;
    let two_pi = 2.0 * PI;
    let w = two_pi / l;
    let lam = lambda_unit(l);

    let k_28 = w * two_pi.powi(-3) * c_s.one_minus_alpha * c_s.one;
    let k_29 = w.powf(alpha - 2.0) * c_s.alpha_minus_half;

    let k2_assembled = SQRT_2 * k_28 * k_29 * lam.powf(-alpha / 2.0);
    let k2_closed_form = SQRT_2 * c_s.one_minus_alpha * c_s.one * c_s.alpha_minus_half / w;

    let k3 = eps1.powi(-3) * (27.0 / 128.0) * k_28.powi(4) * lam.powf(-2.0 * alpha - 1.0)
        * (1.0 + k_29 * l.powf(alpha - 2.0)).powi(4);
    let k3_closed_form = eps1.powi(-3)
        * (27.0 / 128.0)
        * two_pi.powi(-12)
        * c_s.one_minus_alpha.powi(4)
        * c_s.one.powi(4)
        * w.powf(2.0 * (1.0 - 2.0 * alpha))
        * (1.0 + c_s.alpha_minus_half * two_pi.powf(alpha - 2.0)).powi(4);

    let k4 = 1.0 / (4.0 * eps2) / lam;
    let k4_closed_form = 1.0 / (4.0 * eps2) * w.powi(-2);

    let k2 = match variant {
        K2Variant::ClosedForm => k2_closed_form,
        K2Variant::Assembled => k2_assembled,
        K2Variant::Conservative => k2_closed_form.max(k2_assembled),
    };
    Ok(ConstantBundle {
        inputs,
        c_s,
        k_28,
        k_29,
        k2,
        k2_closed_form,
        k2_assembled,
        variant,
        k3,
        k3_closed_form,
        k4,
        k4_closed_form,
        c_i: None,
        table: SobolevConstantTable::new(),
    })
}

impl ConstantBundle {
    pub fn with_interp_constant(mut self, c_i: f64) -> Result<Self> {
        if !(c_i.is_finite() && c_i > 0.0) {
            return Err(Error::invalid("interpolation constant must be positive"));
        }
        self.c_i = Some(c_i);
        Ok(self)
    }

    pub fn alpha(&self) -> f64 {
        self.inputs.alpha
    }

    pub fn side(&self) -> f64 {
        self.inputs.l
    }
}

/// `K₅(u) = √2 (4π²/L²)^{α+½} |u ⊗ u|_{1+α,L}`.
pub fn k5(u_lo: &SpectralField, alpha: f64) -> Result<f64> {
    check_alpha(alpha)?;
    let lam = lambda_unit(u_lo.side());
    Ok(SQRT_2 * lam.powf(alpha + 0.5) * tensor_product_norm(u_lo, 1.0 + alpha))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn values() -> SobolevValues {
        SobolevValues {
            one_minus_alpha: 2.1,
            one: 3.3,
            alpha_minus_half: 1.7,
        }
    }

    fn bundle(alpha: f64, l: f64) -> ConstantBundle {
        let inputs = BundleInputs { alpha, l, eps1: 0.1, eps2: 0.2 };
        assemble_from_values(inputs, values(), K2Variant::Conservative).unwrap()
    }

    #[test]
    fn k4_unit_case() {
        let inputs = BundleInputs {
            alpha: 0.75,
            l: 2.0 * PI,
            eps1: 1.0,
            eps2: 0.25,
        };
        let b = assemble_from_values(inputs, values(), K2Variant::Conservative).unwrap();
        assert!((b.k4 - 1.0).abs() < 1e-15);
    }

    #[test]
    fn k2_variants_differ_by_two_pi_cubed() {
        let b = bundle(0.7, 3.0);
        let ratio = b.k2_assembled / b.k2_closed_form;
        assert!((ratio - (2.0 * PI).powi(-3)).abs() < 1e-13 * ratio);
        assert_eq!(b.k2, b.k2_closed_form);
    }

    #[test]
    fn rejects_bad_inputs() {
        let c = values();
        let mk = |alpha, l, eps1, eps2| assemble_from_values(BundleInputs { alpha, l, eps1, eps2 }, c, K2Variant::Assembled);
        assert!(mk(0.4, 1.0, 0.1, 0.1).is_err());
        assert!(mk(0.5, 1.0, 0.0, 0.1).is_err());
        assert!(mk(0.5, 1.0, 0.1, -1.0).is_err());
        assert!(mk(0.5, -1.0, 0.1, 0.1).is_err());
    }

    #[test]
    fn missing_table_entry_is_an_error() {
        let mut t = SobolevConstantTable::new();
        t.record_estimate(1.0, 3.0, 1.5).unwrap();
        assert!(assemble_bundle(0.75, 1.0, 0.1, 0.1, &t).is_err());
    }
}
