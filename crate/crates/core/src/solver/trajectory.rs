use std::io::Write;

use serde::{Deserialize, Serialize};

use super::config::SolverConfig;
use super::forcing::Forcing;
use crate::constants::SobolevConstantTable;
use crate::spectral::{lambda_unit, BoxSpec, SpectralField};
use crate::{Error, Result};

/// Diagnostics at one sample time. `X`, `Y` refer to the tracked field,
/// `U` to the reference field and `H` to the forcing.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiagnosticsSample {
    pub t: f64,
    /// `½|w|²_{α,L}`.
    #[serde(rename = "X")]
    pub x: f64,
    /// `(4π²/L²)|w|²_{α+1,L}`.
    #[serde(rename = "Y")]
    pub y: f64,
    /// `|∇u|⁴_{L^{3/(2-α)}}`.
    #[serde(rename = "U")]
    pub u: f64,
    /// `|h|²_{α-1,L}`, plus `K₅ X^{1/2}` in caloric mode.
    #[serde(rename = "H")]
    pub h: f64,
    /// `½ d/dt |u|²_0 + ν(4π²/L²)|u|²_1 - ⟨f, u⟩` of the Galerkin state.
    pub energy_residual: Option<f64>,
    pub norm_alpha: f64,
    pub norm_alpha_plus_1: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum RunStatus {
    Completed,
    NormExceeded { threshold: f64, t: f64 },
    StepFailure { t: f64 },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TrajectoryKind {
    Galerkin,
    Difference,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Trajectory {
    pub kind: TrajectoryKind,
    pub config: SolverConfig,
    pub box_spec: BoxSpec,
    /// `P_m` of the projected datum (or the datum difference).
    pub initial: SpectralField,
    /// Zero for difference trajectories; their `H` column carries `f - g`.
    pub forcing: Forcing,
    pub samples: Vec<DiagnosticsSample>,
    pub snapshots: Vec<(f64, SpectralField)>,
    pub status: RunStatus,
    pub final_state: SpectralField,
    pub steps: usize,
}

impl Trajectory {
    pub fn times(&self) -> Vec<f64> {
        self.samples.iter().map(|s| s.t).collect()
    }

    /// Last sampled time.
    pub fn horizon(&self) -> f64 {
        self.samples.last().map_or(0.0, |s| s.t)
    }

    pub fn is_completed(&self) -> bool {
        self.status == RunStatus::Completed
    }

    /// Writes the CSV series `t, X, Y, U, H, energy_residual, norm_alpha, norm_alpha_plus_1`.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        for s in &self.samples {
            out.serialize(s).map_err(|e| Error::Format(e.to_string()))?;
        }
        out.flush()?;
        Ok(())
    }

    pub fn manifest(&self, table: Option<&SobolevConstantTable>) -> RunManifest {
        RunManifest {
            kind: self.kind,
            config: self.config.clone(),
            box_spec: self.box_spec,
            status: self.status.clone(),
            steps: self.steps,
            samples: self.samples.len(),
            horizon: self.horizon(),
            initial_norm_alpha: self.initial.hs_norm(self.box_spec.alpha),
            constants: table.cloned(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub kind: TrajectoryKind,
    pub config: SolverConfig,
    #[serde(rename = "box")]
    pub box_spec: BoxSpec,
    pub status: RunStatus,
    pub steps: usize,
    pub samples: usize,
    pub horizon: f64,
    pub initial_norm_alpha: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub constants: Option<SobolevConstantTable>,
}

const TIME_TOL: f64 = 1e-12;

/// Diagnostics of `w = u - v` at the shared sample times. `U` is taken from
/// `u` and `H` is `|f - g|²_{α-1,L}`. Both runs must have stored snapshots.
pub fn difference_trajectory(u: &Trajectory, v: &Trajectory) -> Result<Trajectory> {
    if u.box_spec != v.box_spec {
        return Err(Error::BoxMismatch {
            left: u.box_spec.l,
            right: v.box_spec.l,
        });
    }
    if u.snapshots.len() != u.samples.len() || v.snapshots.len() != v.samples.len() {
        return Err(Error::invalid("difference trajectories need snapshots at every sample"));
    }
    let n = u.samples.len().min(v.samples.len());
    if n == 0 {
        return Err(Error::invalid("empty trajectory"));
    }
    for i in 0..n {
        let (a, b) = (u.samples[i].t, v.samples[i].t);
        if (a - b).abs() > TIME_TOL * a.abs().max(1.0) {
            return Err(Error::invalid(format!("sample grids differ at index {i}: {a} vs {b}")));
        }
    }
    let spec = u.box_spec;
    let lam = lambda_unit(spec.l);
    let m = u.config.m.max(v.config.m);
    let mut samples = Vec::with_capacity(n);
    let mut snapshots = Vec::with_capacity(n);
    for i in 0..n {
        let t = u.samples[i].t;
        let w = u.snapshots[i].1.resized(m)?.try_sub(&v.snapshots[i].1.resized(m)?)?;
        let h = u
            .forcing
            .difference_at(&v.forcing, t, m)?
            .map_or(0.0, |h| h.hs_norm_sq(spec.alpha - 1.0));
        samples.push(DiagnosticsSample {
            t,
            x: 0.5 * w.hs_norm_sq(spec.alpha),
            y: lam * w.hs_norm_sq(spec.alpha + 1.0),
            u: u.samples[i].u,
            h,
            energy_residual: None,
            norm_alpha: w.hs_norm(spec.alpha),
            norm_alpha_plus_1: w.hs_norm(spec.alpha + 1.0),
        });
        snapshots.push((t, w));
    }
    let status = match (&u.status, &v.status) {
        (RunStatus::Completed, s) | (s, RunStatus::Completed) => s.clone(),
        (s, _) => s.clone(),
    };
    let initial = snapshots[0].1.clone();
    let final_state = snapshots[n - 1].1.clone();
    let mut config = u.config.clone();
    config.m = m;
    Ok(Trajectory {
        kind: TrajectoryKind::Difference,
        config,
        box_spec: spec,
        initial,
        forcing: Forcing::Zero,
        samples,
        snapshots,
        status,
        final_state,
        steps: u.steps.max(v.steps),
    })
}
