//! Alias-free quadratic products.
//!
//! A product of fields of degrees `ma` and `mb` has degree `ma + mb`. On a grid
//! of `N` points its aliases land at `q - N`, so every mode `|k_i| <= out` is
//! exact as soon as `N >= ma + mb + out + 1`.

use std::f64::consts::PI;

use num_complex::Complex64;

use super::fft3::smooth_size;
use super::field::{SpectralField, Vec3c};
use super::modes::{wave_norm_sq, HalfSpace, ModeCube};
use super::physical::Transform;
use crate::{Error, Result};

const SYM_PAIRS: [(usize, usize); 6] = [(0, 0), (0, 1), (0, 2), (1, 1), (1, 2), (2, 2)];

/// Grid size for an exact product of degree-`ma` and degree-`mb` fields on modes `<= out`.
pub fn product_grid(ma: usize, mb: usize, out: usize) -> usize {
    smooth_size((ma + mb + out + 1).max(2 * ma.max(mb).max(out) + 2))
}

/// Exact Fourier coefficients of `B(a, b) = a·∇b` on every mode `|k_i| <= out_truncation`.
pub fn nonlinear_term(a: &SpectralField, b: &SpectralField, out_truncation: usize) -> Result<SpectralField> {
    if a.side() != b.side() {
        return Err(Error::BoxMismatch {
            left: a.side(),
            right: b.side(),
        });
    }
    if out_truncation == 0 {
        return Err(Error::invalid("output truncation must be at least 1"));
    }
    let n = product_grid(a.truncation(), b.truncation(), out_truncation);
    let tr = Transform::new(n);
    let a_data = a.modes().as_slice();
    let a_phys = tr.synthesize(a.cube(), 3, |c, h| a_data[h][c]);

    let w = 2.0 * PI / b.side();
    let b_cube = b.cube();
    let b_data = b.modes().as_slice();
    let mut prod = vec![vec![0.0; tr.len()]; 3];
    tr.synthesize_with(
        b_cube,
        9,
        |c, h| Complex64::new(0.0, w * b_cube.wave(h)[c % 3] as f64) * b_data[h][c / 3],
        |c, grad| {
            let (i, j) = (c / 3, c % 3);
            for ((p, aj), g) in prod[i].iter_mut().zip(&a_phys[j]).zip(grad) {
                *p += aj * g;
            }
        },
    );
    let out = ModeCube::new(out_truncation);
    let coeffs = tr.analyze(out, 3, |c, j| prod[c][j]);
    Ok(assemble_vector(a.side(), out, &coeffs))
}

fn assemble_vector(side: f64, cube: ModeCube, comps: &[Vec<Complex64>]) -> SpectralField {
    let data: Vec<Vec3c> = (0..cube.half_len())
        .map(|h| [comps[0][h], comps[1][h], comps[2][h]])
        .collect();
    let mut f = SpectralField::from_modes(side, HalfSpace::from_vec(cube, data).expect("cube size"), false);
    if f.max_divergence() == 0.0 {
        let _ = f.mark_divergence_free(0.0);
    }
    f
}

/// Coefficients of the nine products `u_i u_j` (row-major) on the cube `2m`,
/// which holds their full support except the mean.
pub fn tensor_product_coefficients(u: &SpectralField) -> HalfSpace<[Complex64; 9]> {
    let m = u.truncation();
    let out = ModeCube::new(2 * m);
    let tr = Transform::new(product_grid(m, m, 2 * m));
    let data = u.modes().as_slice();
    let phys = tr.synthesize(u.cube(), 3, |c, h| data[h][c]);
    let sym = tr.analyze(out, 6, |c, j| {
        let (p, q) = SYM_PAIRS[c];
        phys[p][j] * phys[q][j]
    });
    let values = (0..out.half_len())
        .map(|h| {
            std::array::from_fn(|e| {
                let (i, j) = (e / 3, e % 3);
                let (p, q) = if i <= j { (i, j) } else { (j, i) };
                let idx = SYM_PAIRS.iter().position(|&x| x == (p, q)).expect("pair");
                sym[idx][h]
            })
        })
        .collect();
    HalfSpace::from_vec(out, values).expect("cube size")
}

/// `|u ⊗ u|_{s,L}`: the Ḣ^s norm of the nine-component field `u_i u_j`. The
/// mean block at `k = 0` is excluded, as for every homogeneous norm.
pub fn tensor_product_norm(u: &SpectralField, s: f64) -> f64 {
    tensor_product_coefficients(u)
        .weighted_norm_sq(|k| wave_norm_sq(k).powf(s))
        .sqrt()
}

/// `P_m` Leray projection of `div(u ⊗ u)` for divergence-free `u` on its own
/// cube, reusing one transform plan across calls.
#[derive(Debug)]
pub struct Convection {
    side: f64,
    cube: ModeCube,
    transform: Transform,
}

impl Convection {
    pub fn new(side: f64, m: usize) -> Self {
        Convection {
            side,
            cube: ModeCube::new(m),
            transform: Transform::new(product_grid(m, m, m)),
        }
    }

    pub fn grid(&self) -> usize {
        self.transform.n()
    }

    /// Returns `P_m Leray(u·∇u)`, using `u·∇u = div(u ⊗ u)` when `div u = 0`.
    pub fn apply(&self, u: &SpectralField) -> SpectralField {
        debug_assert_eq!(u.cube(), self.cube);
        let tr = &self.transform;
        let data = u.modes().as_slice();
        let phys = tr.synthesize(self.cube, 3, |c, h| data[h][c]);
        let sym = tr.analyze(self.cube, 6, |c, j| {
            let (p, q) = SYM_PAIRS[c];
            phys[p][j] * phys[q][j]
        });
        let w = 2.0 * PI / self.side;
        let idx = |i: usize, j: usize| {
            let (p, q) = if i <= j { (i, j) } else { (j, i) };
            SYM_PAIRS.iter().position(|&x| x == (p, q)).expect("pair")
        };
        let lookup: [[usize; 3]; 3] = std::array::from_fn(|i| std::array::from_fn(|j| idx(i, j)));
        let values: Vec<Vec3c> = self
            .cube
            .waves()
            .enumerate()
            .map(|(h, k)| {
                let kf = k.map(f64::from);
                let mut b: Vec3c = std::array::from_fn(|i| {
                    let s: Complex64 = (0..3).map(|j| sym[lookup[i][j]][h] * kf[j]).sum();
                    Complex64::new(0.0, w) * s
                });
                let k2 = wave_norm_sq(k);
                let d = (b[0] * kf[0] + b[1] * kf[1] + b[2] * kf[2]) / k2;
                for i in 0..3 {
                    b[i] -= d * kf[i];
                }
                b
            })
            .collect();
        SpectralField::from_modes(
            self.side,
            HalfSpace::from_vec(self.cube, values).expect("cube size"),
            true,
        )
    }
}
