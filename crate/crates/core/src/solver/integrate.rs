use num_complex::Complex64;

use super::config::SolverConfig;
use super::forcing::Forcing;
use super::trajectory::{DiagnosticsSample, RunStatus, Trajectory, TrajectoryKind};
use super::heat_evolve;
use crate::constants::k5;
use crate::spectral::{lambda_unit, BoxSpec, Convection, HalfSpace, SpectralField, Transform, Vec3c};
use crate::{Error, Result};

type Modes = Vec<Vec3c>;

fn axpy(y: &mut Modes, a: f64, x: &Modes) {
    for (u, v) in y.iter_mut().zip(x) {
        for c in 0..3 {
            u[c] += v[c] * a;
        }
    }
}

fn decayed(x: &Modes, decay: &[f64]) -> Modes {
    x.iter().zip(decay).map(|(v, d)| v.map(|c| c * *d)).collect()
}

fn all_finite(x: &Modes) -> bool {
    x.iter().all(|v| v.iter().all(|c| c.re.is_finite() && c.im.is_finite()))
}

struct Stepper<'a> {
    side: f64,
    nu: f64,
    cube: crate::spectral::ModeCube,
    lambda: Vec<f64>,
    convection: Option<Convection>,
    forcing: &'a Forcing,
}

impl Stepper<'_> {
    fn field(&self, modes: Modes) -> SpectralField {
        SpectralField::from_modes(self.side, HalfSpace::from_vec(self.cube, modes).expect("cube size"), true)
    }

    fn decay(&self, h: f64) -> Vec<f64> {
        self.lambda.iter().map(|l| (-self.nu * l * h).exp()).collect()
    }

    fn forcing_at(&self, t: f64) -> Result<Option<SpectralField>> {
        Ok(self
            .forcing
            .at(t, self.cube.truncation())?
            .map(|f| f.leray_project()))
    }

    /// Everything but the viscous term: `P_m(f - Leray B(u, u))`.
    fn nonlinear(&self, u: &Modes, t: f64) -> Result<Modes> {
        let mut out = match &self.convection {
            Some(conv) => {
                let b = conv.apply(&self.field(u.clone()));
                b.modes().as_slice().iter().map(|v| v.map(|c| -c)).collect()
            }
            None => vec![[Complex64::new(0.0, 0.0); 3]; u.len()],
        };
        if let Some(f) = self.forcing_at(t)? {
            axpy(&mut out, 1.0, &f.modes().as_slice().to_vec());
        }
        Ok(out)
    }

    fn step(&self, u: &Modes, t: f64, h: f64) -> Result<Modes> {
        let e_half = self.decay(h / 2.0);
        let e_full = self.decay(h);
        let k1 = self.nonlinear(u, t)?;
        let mut a = u.clone();
        axpy(&mut a, h / 2.0, &k1);
        let a = decayed(&a, &e_half);
        let k2 = self.nonlinear(&a, t + h / 2.0)?;
        let mut b = decayed(u, &e_half);
        axpy(&mut b, h / 2.0, &k2);
        let k3 = self.nonlinear(&b, t + h / 2.0)?;
        let mut c = decayed(u, &e_full);
        axpy(&mut c, h, &decayed(&k3, &e_half));
        let k4 = self.nonlinear(&c, t + h)?;

        let mut out = decayed(u, &e_full);
        axpy(&mut out, h / 6.0, &decayed(&k1, &e_full));
        let mut mid = k2;
        axpy(&mut mid, 1.0, &k3);
        axpy(&mut out, h / 3.0, &decayed(&mid, &e_half));
        axpy(&mut out, h / 6.0, &k4);
        Ok(self.field(out).leray_project().modes().as_slice().to_vec())
    }
}

struct Diagnostics<'a> {
    spec: BoxSpec,
    config: &'a SolverConfig,
    transform: Transform,
    low: Option<SpectralField>,
}

impl Diagnostics<'_> {
    fn sample(&self, stepper: &Stepper, u: &Modes, t: f64) -> Result<DiagnosticsSample> {
        let alpha = self.spec.alpha;
        let lam = lambda_unit(self.spec.l);
        let p = self.spec.gradient_exponent();
        let field = stepper.field(u.clone());
        let f = stepper.forcing_at(t)?;
        let f_norm = f.as_ref().map_or(0.0, |f| f.hs_norm_sq(alpha - 1.0));

        let (x, y, big_u, h) = match &self.low {
            None => {
                let x = 0.5 * field.hs_norm_sq(alpha);
                let y = lam * field.hs_norm_sq(alpha + 1.0);
                let g = field.gradient_lp_norm_on(&self.transform, p)?;
                (x, y, g.powi(4), f_norm)
            }
            Some(low0) => {
                let low = heat_evolve(low0, t, self.spec.nu)?;
                let w = field.try_sub(&low.resized(self.config.m)?)?;
                let x = 0.5 * w.hs_norm_sq(alpha);
                let y = lam * w.hs_norm_sq(alpha + 1.0);
                let g = low.resized(self.config.m)?.gradient_lp_norm_on(&self.transform, p)?;
                (x, y, g.powi(4), f_norm + k5(&low, alpha)? * x.sqrt())
            }
        };

        let n = stepper.nonlinear(u, t)?;
        let d_energy = stepper.field(n).duality_inner(&field, 0.0, 0.0)? - self.spec.nu * lam * field.hs_norm_sq(1.0);
        let f_u = match &f {
            Some(f) => f.duality_inner(&field, -1.0, 1.0)?,
            None => 0.0,
        };
        let residual = d_energy + self.spec.nu * lam * field.hs_norm_sq(1.0) - f_u;

        Ok(DiagnosticsSample {
            t,
            x,
            y,
            u: big_u,
            h,
            energy_residual: Some(residual),
            norm_alpha: field.hs_norm(alpha),
            norm_alpha_plus_1: field.hs_norm(alpha + 1.0),
        })
    }
}

/// Integrates the Galerkin system `u' + ν A u + P_m B(u, u) = P_m f` from `P_m Leray u0`.
pub fn integrate(u0: &SpectralField, forcing: &Forcing, config: &SolverConfig, spec: &BoxSpec) -> Result<Trajectory> {
    config.validate()?;
    spec.validate()?;
    if u0.side() != spec.l {
        return Err(Error::BoxMismatch {
            left: spec.l,
            right: u0.side(),
        });
    }
    forcing.validate(spec.l)?;

    let initial = u0.leray_project().resized(config.m)?;
    let cube = initial.cube();
    let stepper = Stepper {
        side: spec.l,
        nu: spec.nu,
        cube,
        lambda: cube.waves().map(|k| initial.stokes_eigenvalue(k)).collect(),
        convection: (!config.linear_only).then(|| Convection::new(spec.l, config.m)),
        forcing,
    };
    let diag = Diagnostics {
        spec: *spec,
        config,
        transform: Transform::new(config.oversample * (2 * config.m + 1)),
        low: config.caloric.then(|| initial.low_pass(config.k0)),
    };
    let threshold = config.blowup_threshold.unwrap_or_else(|| match initial.hs_norm(spec.alpha) {
        n if n > 0.0 => 1e3 * n,
        _ => f64::INFINITY,
    });

    let mut u: Modes = initial.modes().as_slice().to_vec();
    let mut t = 0.0;
    let mut samples = vec![diag.sample(&stepper, &u, 0.0)?];
    let mut snapshots = Vec::new();
    if config.store_snapshots {
        snapshots.push((0.0, stepper.field(u.clone())));
    }
    let mut status = RunStatus::Completed;
    let mut steps = 0usize;
    let mut h_try = config.dt;
    let mut next_sample = 1usize;
    let target_at = |j: usize| -> f64 {
        match config.sample_every {
            Some(s) => (j as f64 * s).min(config.t_end),
            None => config.t_end,
        }
    };
    let time_eps = 1e-12 * config.t_end;

    while t < config.t_end - time_eps {
        let target = target_at(next_sample);
        let land = target - t <= h_try * (1.0 + 1e-12);
        let h = if land { target - t } else { h_try };
        let (next, h_used, accepted_h) = match config.adapt {
            None => (stepper.step(&u, t, h)?, h, h_try),
            Some(tol) => {
                let full = stepper.step(&u, t, h)?;
                let half = stepper.step(&u, t, h / 2.0)?;
                let half = stepper.step(&half, t + h / 2.0, h / 2.0)?;
                let scale = half.iter().map(|v| v.iter().map(|c| c.norm_sqr()).sum::<f64>()).sum::<f64>().sqrt();
                let err = full
                    .iter()
                    .zip(&half)
                    .map(|(a, b)| (0..3).map(|c| (a[c] - b[c]).norm_sqr()).sum::<f64>())
                    .sum::<f64>()
                    .sqrt()
                    / scale.max(f64::MIN_POSITIVE);
                let factor = if err == 0.0 { 2.0 } else { (0.9 * (tol / err).powf(0.2)).clamp(0.2, 2.0) };
                if err > tol && all_finite(&full) && all_finite(&half) && h > 1e-14 * config.t_end {
                    h_try = h * factor;
                    continue;
                }
                (half, h, if land { h_try } else { h * factor })
            }
        };
        if !all_finite(&next) {
            status = RunStatus::StepFailure { t };
            break;
        }
        u = next;
        steps += 1;
        h_try = accepted_h;
        t = if land { target } else { t + h_used };
        let norm = stepper.field(u.clone()).hs_norm(spec.alpha);
        let exceeded = norm > threshold;
        let sample_now = config.sample_every.is_none() || land || exceeded;
        if sample_now {
            samples.push(diag.sample(&stepper, &u, t)?);
            if config.store_snapshots {
                snapshots.push((t, stepper.field(u.clone())));
            }
            if land {
                next_sample += 1;
            }
        }
        if exceeded {
            status = RunStatus::NormExceeded { threshold, t };
            break;
        }
    }

    Ok(Trajectory {
        kind: TrajectoryKind::Galerkin,
        config: config.clone(),
        box_spec: *spec,
        initial,
        forcing: forcing.clone(),
        samples,
        snapshots,
        status,
        final_state: stepper.field(u),
        steps,
    })
}
