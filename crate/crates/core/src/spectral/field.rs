use std::f64::consts::PI;

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use super::box_spec::lambda_unit;
use super::modes::{wave_norm_sq, HalfSpace, ModeCube, Wave};
use super::physical::{lp_from_squares, PhysicalSample, Transform};
use crate::{Error, Result};

pub type Vec3c = [Complex64; 3];

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Real, zero-mean, periodic vector field on `[0, L]^3` stored by its Fourier
/// coefficients `u_k`, `|k_i| <= m`, `u_{-k} = conj(u_k)`.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectralField {
    side: f64,
    modes: HalfSpace<Vec3c>,
    divergence_free: bool,
}

/// Scalar spectral field, e.g. a divergence.
#[derive(Clone, Debug, PartialEq)]
pub struct ScalarField {
    pub side: f64,
    pub modes: HalfSpace<Complex64>,
}

/// Spectral gradient; entry `3 * i + j` holds the coefficient of `∂_j u_i`.
#[derive(Clone, Debug, PartialEq)]
pub struct GradientField {
    pub side: f64,
    pub modes: HalfSpace<[Complex64; 9]>,
}

fn check_side(side: f64) -> Result<()> {
    if side.is_finite() && side > 0.0 {
        Ok(())
    } else {
        Err(Error::invalid(format!("box side must be positive, got {side}")))
    }
}

fn dot(k: Wave, v: &Vec3c) -> Complex64 {
    v[0] * k[0] as f64 + v[1] * k[1] as f64 + v[2] * k[2] as f64
}

fn hs_weight(k: Wave, s: f64) -> f64 {
    let k2 = wave_norm_sq(k);
    if s == 0.0 {
        1.0
    } else if s == 1.0 {
        k2
    } else {
        k2.powf(s)
    }
}

impl SpectralField {
    pub fn zeros(side: f64, m: usize) -> Result<Self> {
        check_side(side)?;
        if m == 0 {
            return Err(Error::invalid("truncation must be at least 1"));
        }
        Ok(SpectralField {
            side,
            modes: HalfSpace::zeros(ModeCube::new(m)),
            divergence_free: true,
        })
    }

    /// Field whose coefficient at each stored `k` is `f(k)`; the divergence-free
    /// flag is set if every coefficient satisfies `k·u_k = 0` to rounding.
    pub fn from_fn(side: f64, m: usize, f: impl Fn(Wave) -> Vec3c) -> Result<Self> {
        let mut field = Self::zeros(side, m)?;
        let cube = field.cube();
        for (i, slot) in field.modes.as_mut_slice().iter_mut().enumerate() {
            *slot = f(cube.wave(i));
        }
        field.divergence_free = field.is_solenoidal(1e-13);
        Ok(field)
    }

    pub(crate) fn from_modes(side: f64, modes: HalfSpace<Vec3c>, divergence_free: bool) -> Self {
        SpectralField {
            side,
            modes,
            divergence_free,
        }
    }

    /// Random field with independent Gaussian coefficients scaled by `amplitude(k)`.
    pub fn random<R: Rng + ?Sized>(
        side: f64,
        m: usize,
        rng: &mut R,
        amplitude: impl Fn(Wave) -> f64,
    ) -> Result<Self> {
        let mut field = Self::zeros(side, m)?;
        let cube = field.cube();
        for (i, slot) in field.modes.as_mut_slice().iter_mut().enumerate() {
            let a = amplitude(cube.wave(i));
            for c in slot.iter_mut() {
                *c = Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)) * a;
            }
        }
        field.divergence_free = false;
        Ok(field)
    }

    pub fn side(&self) -> f64 {
        self.side
    }

    pub fn truncation(&self) -> usize {
        self.modes.cube().truncation()
    }

    pub fn cube(&self) -> ModeCube {
        self.modes.cube()
    }

    pub fn modes(&self) -> &HalfSpace<Vec3c> {
        &self.modes
    }

    pub fn is_divergence_free(&self) -> bool {
        self.divergence_free
    }

    /// Sets the flag after checking `|k·u_k| <= tol·|k||u_k|` for every mode.
    pub fn mark_divergence_free(&mut self, tol: f64) -> Result<()> {
        if self.is_solenoidal(tol) {
            self.divergence_free = true;
            Ok(())
        } else {
            Err(Error::invalid("field is not divergence-free"))
        }
    }

    fn is_solenoidal(&self, tol: f64) -> bool {
        self.modes.iter().all(|(k, v)| {
            let scale = wave_norm_sq(k).sqrt() * v.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
            dot(k, v).norm() <= tol * scale
        })
    }

    /// `max_k |k·u_k|`.
    pub fn max_divergence(&self) -> f64 {
        self.modes
            .iter()
            .map(|(k, v)| dot(k, v).norm())
            .fold(0.0, f64::max)
    }

    pub fn coefficient(&self, k: Wave) -> Vec3c {
        self.modes.get(k)
    }

    /// Sets `u_k` (and `u_{-k}` by conjugation). Clears the divergence-free flag
    /// when the new coefficient is not transverse to `k`.
    pub fn set_coefficient(&mut self, k: Wave, value: Vec3c) -> Result<()> {
        if !self.modes.set(k, value) {
            return Err(Error::invalid(format!(
                "wave vector {k:?} is zero or outside the truncation cube"
            )));
        }
        let scale = wave_norm_sq(k).sqrt() * value.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        if dot(k, &value).norm() > 1e-13 * scale {
            self.divergence_free = false;
        }
        Ok(())
    }

    fn check_box(&self, other: &SpectralField) -> Result<()> {
        if self.side != other.side {
            return Err(Error::BoxMismatch {
                left: self.side,
                right: other.side,
            });
        }
        Ok(())
    }

    /// Same field stored on a cube of truncation `m` (zero padded or cut).
    pub fn resized(&self, m: usize) -> Result<Self> {
        if m == 0 {
            return Err(Error::invalid("truncation must be at least 1"));
        }
        Ok(SpectralField {
            side: self.side,
            modes: self.modes.resized(ModeCube::new(m)),
            divergence_free: self.divergence_free,
        })
    }

    pub fn map_modes(&self, f: impl Fn(Wave, &Vec3c) -> Vec3c) -> Self {
        let cube = self.cube();
        let data = self
            .modes
            .as_slice()
            .iter()
            .enumerate()
            .map(|(i, v)| f(cube.wave(i), v))
            .collect();
        let mut out = SpectralField {
            side: self.side,
            modes: HalfSpace::from_vec(cube, data).expect("same cube"),
            divergence_free: false,
        };
        out.divergence_free = self.divergence_free && out.is_solenoidal(1e-12);
        out
    }

    pub fn scaled(&self, c: f64) -> Self {
        let mut out = self.clone();
        out.modes
            .as_mut_slice()
            .iter_mut()
            .for_each(|v| v.iter_mut().for_each(|x| *x *= c));
        out
    }

    /// `a·self + b·other` on the larger of the two cubes.
    pub fn linear_combination(&self, a: f64, other: &SpectralField, b: f64) -> Result<Self> {
        self.check_box(other)?;
        let m = self.truncation().max(other.truncation());
        let x = self.resized(m)?;
        let y = other.resized(m)?;
        let mut out = x.clone();
        for ((o, u), v) in out
            .modes
            .as_mut_slice()
            .iter_mut()
            .zip(x.modes.as_slice())
            .zip(y.modes.as_slice())
        {
            for c in 0..3 {
                o[c] = u[c] * a + v[c] * b;
            }
        }
        out.divergence_free = x.divergence_free && y.divergence_free;
        Ok(out)
    }

    pub fn try_sub(&self, other: &SpectralField) -> Result<Self> {
        self.linear_combination(1.0, other, -1.0)
    }

    pub fn try_add(&self, other: &SpectralField) -> Result<Self> {
        self.linear_combination(1.0, other, 1.0)
    }

    /// `|u|_{s,L}^2 = Σ_{k≠0} |k|^{2s} |u_k|^2`.
    pub fn hs_norm_sq(&self, s: f64) -> f64 {
        self.modes.weighted_norm_sq(|k| hs_weight(k, s))
    }

    /// Homogeneous Sobolev norm `|u|_{s,L}`.
    pub fn hs_norm(&self, s: f64) -> f64 {
        self.hs_norm_sq(s).sqrt()
    }

    /// `⟨a, b⟩_{s,L} = Σ |k|^{2s} a_k·conj(b_k)`, real by the reality of both fields.
    pub fn hs_inner(&self, other: &SpectralField, s: f64) -> Result<f64> {
        self.duality_inner(other, s, s)
    }

    /// `⟨a, b⟩_{α,β;L} = Σ (|k|^α a_k)·(|k|^β conj(b_k))`.
    pub fn duality_inner(&self, other: &SpectralField, alpha: f64, beta: f64) -> Result<f64> {
        self.check_box(other)?;
        let m = self.truncation().min(other.truncation());
        let cube = ModeCube::new(m);
        let sum: f64 = cube
            .waves()
            .map(|k| {
                let a = self.modes.get(k);
                let b = other.modes.get(k);
                let k2 = wave_norm_sq(k);
                let w = k2.powf(alpha / 2.0) * k2.powf(beta / 2.0);
                let d: Complex64 = (0..3).map(|c| a[c] * b[c].conj()).sum();
                w * d.re
            })
            .sum();
        Ok(2.0 * sum)
    }

    /// Stokes eigenvalue `λ_k = 4π²|k|²/L²`.
    pub fn stokes_eigenvalue(&self, k: Wave) -> f64 {
        lambda_unit(self.side) * wave_norm_sq(k)
    }

    /// `A^a u`: multiplies every coefficient by `λ_k^a`.
    pub fn stokes_power(&self, a: f64) -> Self {
        let unit = lambda_unit(self.side);
        let mut out = self.map_modes(|k, v| {
            let f = (unit * wave_norm_sq(k)).powf(a);
            v.map(|c| c * f)
        });
        out.divergence_free = self.divergence_free;
        out
    }

    /// Leray projection `u_k - (k·u_k) k / |k|^2`.
    pub fn leray_project(&self) -> Self {
        let mut out = self.map_modes(|k, v| {
            let k2 = wave_norm_sq(k);
            let d = dot(k, v) / k2;
            [
                v[0] - d * k[0] as f64,
                v[1] - d * k[1] as f64,
                v[2] - d * k[2] as f64,
            ]
        });
        out.divergence_free = true;
        out
    }

    /// Keeps modes with `|k_i| <= k0` for every component.
    pub fn low_pass(&self, k0: usize) -> Self {
        let k0 = k0 as i32;
        let mut out = self.map_modes(|k, v| {
            if k.iter().all(|c| c.abs() <= k0) {
                *v
            } else {
                [ZERO; 3]
            }
        });
        out.divergence_free = self.divergence_free;
        out
    }

    /// Complement of [`low_pass`](Self::low_pass).
    pub fn high_pass(&self, k0: usize) -> Self {
        let k0 = k0 as i32;
        let mut out = self.map_modes(|k, v| {
            if k.iter().all(|c| c.abs() <= k0) {
                [ZERO; 3]
            } else {
                *v
            }
        });
        out.divergence_free = self.divergence_free;
        out
    }

    /// The dilated field on `[0, δL]^3`; its coefficients are unchanged since
    /// `ω_{L,k}(x) = ω_{δL,k}(δx)`.
    pub fn dilate(&self, delta: f64) -> Result<Self> {
        if !(delta.is_finite() && delta > 0.0) {
            return Err(Error::invalid(format!("dilation factor must be positive, got {delta}")));
        }
        let mut out = self.clone();
        out.side = self.side * delta;
        Ok(out)
    }

    /// Same coefficients reinterpreted on a box of side `side`.
    pub fn with_side(&self, side: f64) -> Result<Self> {
        check_side(side)?;
        let mut out = self.clone();
        out.side = side;
        Ok(out)
    }

    /// Exact spectral divergence, symbol `i 2π k / L`.
    pub fn divergence(&self) -> ScalarField {
        let w = 2.0 * PI / self.side;
        let cube = self.cube();
        let data = self
            .modes
            .as_slice()
            .iter()
            .enumerate()
            .map(|(i, v)| Complex64::new(0.0, w) * dot(cube.wave(i), v))
            .collect();
        ScalarField {
            side: self.side,
            modes: HalfSpace::from_vec(cube, data).expect("same cube"),
        }
    }

    /// Exact spectral gradient `∂_j u_i`.
    pub fn gradient(&self) -> GradientField {
        let w = 2.0 * PI / self.side;
        let cube = self.cube();
        let data = self
            .modes
            .as_slice()
            .iter()
            .enumerate()
            .map(|(h, v)| gradient_coefficient(w, cube.wave(h), v))
            .collect();
        GradientField {
            side: self.side,
            modes: HalfSpace::from_vec(cube, data).expect("same cube"),
        }
    }

    fn check_grid(&self, n: usize) -> Result<()> {
        if n < 2 * self.truncation() + 2 {
            return Err(Error::invalid(format!(
                "grid size {n} too small for truncation {} (need >= 2m+2)",
                self.truncation()
            )));
        }
        Ok(())
    }

    /// Values on the uniform `n^3` grid.
    pub fn to_physical(&self, n: usize) -> Result<PhysicalSample<3>> {
        self.check_grid(n)?;
        let tr = Transform::new(n);
        let data = self.modes.as_slice();
        let comps = tr.synthesize(self.cube(), 3, |c, h| data[h][c]);
        let values = (0..tr.len())
            .map(|j| [comps[0][j], comps[1][j], comps[2][j]])
            .collect();
        Ok(PhysicalSample {
            n,
            side: self.side,
            values,
        })
    }

    /// Gradient values on the uniform `n^3` grid.
    pub fn gradient_to_physical(&self, n: usize) -> Result<PhysicalSample<9>> {
        self.check_grid(n)?;
        let grad = self.gradient();
        let tr = Transform::new(n);
        let data = grad.modes.as_slice();
        let comps = tr.synthesize(self.cube(), 9, |c, h| data[h][c]);
        let values = (0..tr.len())
            .map(|j| std::array::from_fn(|c| comps[c][j]))
            .collect();
        Ok(PhysicalSample {
            n,
            side: self.side,
            values,
        })
    }

    fn lp_grid(&self, oversample: usize) -> Result<usize> {
        if oversample < 2 {
            return Err(Error::invalid("oversample must be at least 2"));
        }
        Ok(oversample * (2 * self.truncation() + 1))
    }

    /// `|u|_{L^p(Q_L)}` by quadrature on `N = oversample·(2m+1)` points per axis.
    pub fn lp_norm(&self, p: f64, oversample: usize) -> Result<f64> {
        check_exponent(p)?;
        let n = self.lp_grid(oversample)?;
        let tr = Transform::new(n);
        let mut acc = vec![0.0; tr.len()];
        let data = self.modes.as_slice();
        tr.accumulate_squares(self.cube(), 3, |c, h| data[h][c], &mut acc);
        Ok(lp_from_squares(&acc, p, self.side, n))
    }

    /// `|∇u|_{L^p(Q_L)}` with the Frobenius norm of `∇u` at each grid point.
    pub fn gradient_lp_norm(&self, p: f64, oversample: usize) -> Result<f64> {
        let n = self.lp_grid(oversample)?;
        self.gradient_lp_norm_on(&Transform::new(n), p)
    }

    /// As [`gradient_lp_norm`](Self::gradient_lp_norm) on a caller-provided grid.
    pub fn gradient_lp_norm_on(&self, tr: &Transform, p: f64) -> Result<f64> {
        check_exponent(p)?;
        self.check_grid(tr.n())?;
        let w = 2.0 * PI / self.side;
        let cube = self.cube();
        let data = self.modes.as_slice();
        let mut acc = vec![0.0; tr.len()];
        tr.accumulate_squares(
            cube,
            9,
            |c, h| {
                let k = cube.wave(h);
                Complex64::new(0.0, w * k[c % 3] as f64) * data[h][c / 3]
            },
            &mut acc,
        );
        Ok(lp_from_squares(&acc, p, self.side, tr.n()))
    }
}

fn gradient_coefficient(w: f64, k: Wave, v: &Vec3c) -> [Complex64; 9] {
    std::array::from_fn(|e| Complex64::new(0.0, w * k[e % 3] as f64) * v[e / 3])
}

fn check_exponent(p: f64) -> Result<()> {
    if p.is_finite() && p >= 1.0 {
        Ok(())
    } else {
        Err(Error::invalid(format!("Lebesgue exponent must be >= 1, got {p}")))
    }
}

impl ScalarField {
    pub fn hs_norm(&self, s: f64) -> f64 {
        self.modes.weighted_norm_sq(|k| hs_weight(k, s)).sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.modes.as_slice().iter().map(|c| c.norm()).fold(0.0, f64::max)
    }
}

impl GradientField {
    /// `∂_j u_i` coefficient at `k` as a 3×3 matrix indexed `[i][j]`.
    pub fn coefficient(&self, k: Wave) -> [[Complex64; 3]; 3] {
        let v = self.modes.get(k);
        std::array::from_fn(|i| std::array::from_fn(|j| v[3 * i + j]))
    }
}
