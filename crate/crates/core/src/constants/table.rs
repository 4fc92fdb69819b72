use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Where a Sobolev–Poincaré constant came from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Provenance {
    Estimated,
    User,
    Literature,
}

/// One row of the table: `C_S(β)` in the 2π-normalised inequality
/// `|f|_{L^{β*}(Q_{2π})} <= C_S(β) |f|_{β,2π}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SobolevEntry {
    /// Best ratio found by the estimator; a lower bound for the true constant.
    pub estimate: f64,
    pub safety: f64,
    #[serde(rename = "override", default, skip_serializing_if = "Option::is_none")]
    pub override_value: Option<f64>,
    pub provenance: Provenance,
    /// `β* = 6 / (3 - 2β)`.
    #[serde(default)]
    pub beta_star: f64,
}

impl SobolevEntry {
    /// `override` when present, otherwise `estimate × safety`.
    pub fn effective(&self) -> f64 {
        self.override_value.unwrap_or(self.estimate * self.safety)
    }

    fn validate(&self, key: &str) -> Result<()> {
        if !(self.estimate.is_finite() && self.estimate > 0.0) {
            return Err(Error::invalid(format!("C_S({key}): estimate must be positive")));
        }
        if !(self.safety.is_finite() && self.safety >= 1.0) {
            return Err(Error::invalid(format!("C_S({key}): safety factor must be >= 1")));
        }
        if let Some(v) = self.override_value {
            if !(v.is_finite() && v >= self.estimate) {
                return Err(Error::invalid(format!(
                    "C_S({key}): override {v} is below the estimated lower bound {}",
                    self.estimate
                )));
            }
        }
        Ok(())
    }
}

/// Lebesgue exponent `β* = 6 / (3 - 2β)` paired with `Ḣ^β`.
pub fn beta_star(beta: f64) -> f64 {
    6.0 / (3.0 - 2.0 * beta)
}

pub(crate) fn check_beta(beta: f64) -> Result<()> {
    if (0.0..2.0).contains(&beta) {
        Ok(())
    } else {
        Err(Error::invalid(format!("beta must lie in [0, 2), got {beta}")))
    }
}

/// Canonical table key for `β`.
pub fn beta_key(beta: f64) -> String {
    let rounded = (beta * 1e12).round() / 1e12;
    format!("{}", rounded + 0.0)
}

const KEY_TOL: f64 = 1e-9;

/// Table of Sobolev–Poincaré constants keyed by `β` (as a string).
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SobolevConstantTable {
    entries: BTreeMap<String, SobolevEntry>,
}

impl SobolevConstantTable {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn entries(&self) -> &BTreeMap<String, SobolevEntry> {
        &self.entries
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, beta: f64) -> Option<&SobolevEntry> {
        self.entries.iter().find_map(|(k, e)| {
            let b: f64 = k.parse().ok()?;
            ((b - beta).abs() <= KEY_TOL).then_some(e)
        })
    }

    pub fn effective(&self, beta: f64) -> Option<f64> {
        self.get(beta).map(SobolevEntry::effective)
    }

    /// Effective value or an error naming the missing `β`.
    pub fn require(&self, beta: f64) -> Result<f64> {
        self.effective(beta)
            .ok_or_else(|| Error::invalid(format!("constant table has no entry for beta = {}", beta_key(beta))))
    }

    fn key_for(&self, beta: f64) -> String {
        self.entries
            .keys()
            .find(|k| k.parse::<f64>().map(|b| (b - beta).abs() <= KEY_TOL).unwrap_or(false))
            .cloned()
            .unwrap_or_else(|| beta_key(beta))
    }

    /// Records an estimator result. A larger estimate than the stored one
    /// replaces it; an existing override is kept if it still dominates.
    pub fn record_estimate(&mut self, beta: f64, estimate: f64, safety: f64) -> Result<()> {
        check_beta(beta)?;
        let key = self.key_for(beta);
        let entry = match self.entries.get(&key) {
            Some(old) => {
                let estimate = estimate.max(old.estimate);
                let override_value = old.override_value.filter(|v| *v >= estimate);
                SobolevEntry {
                    estimate,
                    safety,
                    provenance: if override_value.is_some() { old.provenance } else { Provenance::Estimated },
                    override_value,
                    beta_star: beta_star(beta),
                }
            }
            None => SobolevEntry {
                estimate,
                safety,
                override_value: None,
                provenance: Provenance::Estimated,
                beta_star: beta_star(beta),
            },
        };
        entry.validate(&key)?;
        self.entries.insert(key, entry);
        Ok(())
    }

    /// Sets a user or literature value. It must not undercut the estimated lower bound.
    pub fn set_override(&mut self, beta: f64, value: f64, provenance: Provenance) -> Result<()> {
        check_beta(beta)?;
        let key = self.key_for(beta);
        let entry = match self.entries.get(&key) {
            Some(old) => SobolevEntry {
                override_value: Some(value),
                provenance,
                ..old.clone()
            },
            None => SobolevEntry {
                estimate: value,
                safety: 1.0,
                override_value: Some(value),
                provenance,
                beta_star: beta_star(beta),
            },
        };
        entry.validate(&key)?;
        self.entries.insert(key, entry);
        Ok(())
    }

    /// Subset of the table holding only the listed `β` values.
    pub fn snapshot(&self, betas: &[f64]) -> Self {
        let entries = self
            .entries
            .iter()
            .filter(|(k, _)| {
                k.parse::<f64>()
                    .map(|b| betas.iter().any(|x| (x - b).abs() <= KEY_TOL))
                    .unwrap_or(false)
            })
            .map(|(k, e)| (k.clone(), e.clone()))
            .collect();
        SobolevConstantTable { entries }
    }

    pub fn validate(&self) -> Result<()> {
        for (k, e) in &self.entries {
            let beta: f64 = k
                .parse()
                .map_err(|_| Error::invalid(format!("table key {k:?} is not a number")))?;
            check_beta(beta)?;
            e.validate(k)?;
        }
        Ok(())
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let mut table: SobolevConstantTable = serde_json::from_str(text)?;
        for (k, e) in table.entries.iter_mut() {
            if e.beta_star == 0.0 {
                if let Ok(b) = k.parse::<f64>() {
                    e.beta_star = beta_star(b);
                }
            }
        }
        table.validate()?;
        Ok(table)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}
