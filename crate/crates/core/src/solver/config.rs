use serde::{Deserialize, Serialize};

use crate::{Error, Result};

fn default_oversample() -> usize {
    2
}

fn default_k0() -> usize {
    1
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    /// Galerkin truncation `|k_i| <= m`.
    pub m: usize,
    /// Low-frequency cutoff used by the caloric split.
    #[serde(default = "default_k0")]
    pub k0: usize,
    pub dt: f64,
    pub t_end: f64,
    /// Relative local error tolerance; enables step doubling when set.
    #[serde(default)]
    pub adapt: Option<f64>,
    #[serde(default = "default_oversample")]
    pub oversample: usize,
    /// Time between diagnostic samples; every step is sampled when unset.
    #[serde(default)]
    pub sample_every: Option<f64>,
    /// Stop once `|u|_{α,L}` exceeds this; defaults to `1000 |u0|_{α,L}`, unbounded for a zero datum.
    #[serde(default)]
    pub blowup_threshold: Option<f64>,
    /// Drops the nonlinear term.
    #[serde(default)]
    pub linear_only: bool,
    /// Keeps the state at every sample time.
    #[serde(default)]
    pub store_snapshots: bool,
    /// Tracks `u - u^Lo` against the heat flow of `P_{k0} u0` instead of `u`.
    #[serde(default)]
    pub caloric: bool,
}

impl SolverConfig {
    pub fn new(m: usize, dt: f64, t_end: f64) -> Self {
        SolverConfig {
            m,
            k0: 1,
            dt,
            t_end,
            adapt: None,
            oversample: 2,
            sample_every: None,
            blowup_threshold: None,
            linear_only: false,
            store_snapshots: false,
            caloric: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.k0 < 1 || self.m < self.k0 {
            return Err(Error::invalid(format!(
                "need m >= k0 >= 1, got m = {}, k0 = {}",
                self.m, self.k0
            )));
        }
        let positive = |x: f64| x.is_finite() && x > 0.0;
        if !positive(self.dt) {
            return Err(Error::invalid(format!("dt must be positive, got {}", self.dt)));
        }
        if !positive(self.t_end) {
            return Err(Error::invalid(format!("t_end must be positive, got {}", self.t_end)));
        }
        if self.oversample < 2 {
            return Err(Error::invalid("oversample must be at least 2"));
        }
        if let Some(s) = self.sample_every {
            if !positive(s) {
                return Err(Error::invalid("sample_every must be positive"));
            }
        }
        if let Some(a) = self.adapt {
            if !positive(a) {
                return Err(Error::invalid("adapt tolerance must be positive"));
            }
        }
        if let Some(b) = self.blowup_threshold {
            if !positive(b) {
                return Err(Error::invalid("blowup_threshold must be positive"));
            }
        }
        Ok(())
    }
}
