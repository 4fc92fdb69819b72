use serde::{Deserialize, Serialize};

use crate::spectral::{SpectralField, Vec3c, Wave};
use crate::{Error, Result};

/// One forced mode `f_k(t) = Σ_p c_p t^p` (and its conjugate at `-k`).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ForcedMode {
    pub k: Wave,
    pub coefficients: Vec<Vec3c>,
}

/// Time-dependent body force.
#[derive(Clone, Debug, PartialEq, Default)]
pub enum Forcing {
    #[default]
    Zero,
    Constant(SpectralField),
    Modes { side: f64, modes: Vec<ForcedMode> },
    /// Piecewise-linear interpolation between fields at increasing times,
    /// held constant outside the covered interval.
    Snapshots { times: Vec<f64>, fields: Vec<SpectralField> },
}

impl Forcing {
    pub fn is_zero(&self) -> bool {
        matches!(self, Forcing::Zero)
    }

    pub fn validate(&self, side: f64) -> Result<()> {
        let check = |s: f64| {
            if s == side {
                Ok(())
            } else {
                Err(Error::BoxMismatch { left: side, right: s })
            }
        };
        match self {
            Forcing::Zero => Ok(()),
            Forcing::Constant(f) => check(f.side()),
            Forcing::Modes { side: s, modes } => {
                check(*s)?;
                if modes.iter().any(|m| m.k == [0, 0, 0]) {
                    return Err(Error::invalid("forcing may not act on the mean mode"));
                }
                Ok(())
            }
            Forcing::Snapshots { times, fields } => {
                if times.is_empty() || times.len() != fields.len() {
                    return Err(Error::invalid("snapshot forcing needs one time per field"));
                }
                if times.windows(2).any(|w| w[1] <= w[0]) {
                    return Err(Error::invalid("snapshot times must increase strictly"));
                }
                fields.iter().try_for_each(|f| check(f.side()))
            }
        }
    }

    /// Smallest cube holding every forced mode.
    pub fn truncation(&self) -> usize {
        match self {
            Forcing::Zero => 0,
            Forcing::Constant(f) => f.truncation(),
            Forcing::Modes { modes, .. } => modes
                .iter()
                .map(|m| m.k.iter().map(|c| c.unsigned_abs() as usize).max().unwrap_or(0))
                .max()
                .unwrap_or(0),
            Forcing::Snapshots { fields, .. } => fields.iter().map(|f| f.truncation()).max().unwrap_or(0),
        }
    }

    /// `f(t)` on the cube of truncation `m`; `None` for zero forcing.
    pub fn at(&self, t: f64, m: usize) -> Result<Option<SpectralField>> {
        Ok(match self {
            Forcing::Zero => None,
            Forcing::Constant(f) => Some(f.resized(m)?),
            Forcing::Modes { side, modes } => {
                let mut f = SpectralField::zeros(*side, m)?;
                for mode in modes {
                    if !f.cube().contains(mode.k) {
                        continue;
                    }
                    let mut v = f.coefficient(mode.k);
                    let mut tp = 1.0;
                    for c in &mode.coefficients {
                        for i in 0..3 {
                            v[i] += c[i] * tp;
                        }
                        tp *= t;
                    }
                    f.set_coefficient(mode.k, v)?;
                }
                Some(f)
            }
            Forcing::Snapshots { times, fields } => {
                let last = times.len() - 1;
                let f = if t <= times[0] {
                    fields[0].clone()
                } else if t >= times[last] {
                    fields[last].clone()
                } else {
                    let i = times.partition_point(|&s| s <= t) - 1;
                    let theta = (t - times[i]) / (times[i + 1] - times[i]);
                    fields[i].linear_combination(1.0 - theta, &fields[i + 1], theta)?
                };
                Some(f.resized(m)?)
            }
        })
    }

    /// `|f(t)|^2_{s,L}` on modes `<= m`.
    pub fn norm_sq(&self, t: f64, s: f64, m: usize) -> Result<f64> {
        Ok(self.at(t, m)?.map_or(0.0, |f| f.hs_norm_sq(s)))
    }

    /// `f(t) - g(t)` on the cube `m`; `None` when both vanish.
    pub fn difference_at(&self, other: &Forcing, t: f64, m: usize) -> Result<Option<SpectralField>> {
        match (self.at(t, m)?, other.at(t, m)?) {
            (None, None) => Ok(None),
            (Some(f), None) => Ok(Some(f)),
            (None, Some(g)) => Ok(Some(g.scaled(-1.0))),
            (Some(f), Some(g)) => Ok(Some(f.try_sub(&g)?)),
        }
    }
}
