#![allow(dead_code)]

use std::f64::consts::PI;

use nscert::constants::{assemble_from_values, BundleInputs, ConstantBundle, K2Variant, SobolevValues};
use nscert::spectral::{ModeCube, SpectralField, Vec3c, Wave};
use nscert::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const TWO_PI: f64 = 2.0 * PI;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn knorm(k: Wave) -> f64 {
    ((k[0] * k[0] + k[1] * k[1] + k[2] * k[2]) as f64).sqrt()
}

/// Gaussian coefficients with amplitude `(1 + |k|)^{-2}`.
pub fn random_field(r: &mut ChaCha8Rng, side: f64, m: usize) -> SpectralField {
    SpectralField::random(side, m, r, |k| (1.0 + knorm(k)).powi(-2)).unwrap()
}

pub fn random_solenoidal(r: &mut ChaCha8Rng, side: f64, m: usize) -> SpectralField {
    random_field(r, side, m).leray_project()
}

pub fn random_side(r: &mut ChaCha8Rng) -> f64 {
    r.gen_range(0.5..4.0) * PI
}

pub fn rel(a: f64, b: f64) -> f64 {
    if a == b {
        0.0
    } else {
        (a - b).abs() / a.abs().max(b.abs())
    }
}

pub fn single_mode(side: f64, m: usize, k: Wave, u: Vec3c) -> SpectralField {
    let mut f = SpectralField::zeros(side, m).unwrap();
    f.set_coefficient(k, u).unwrap();
    f
}

fn waves(m: usize) -> Vec<Wave> {
    let m = m as i32;
    let mut out = Vec::new();
    for a in -m..=m {
        for b in -m..=m {
            for c in -m..=m {
                out.push([a, b, c]);
            }
        }
    }
    out
}

fn sub(a: Wave, b: Wave) -> Wave {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

/// `(a·∇b)_k = Σ_{p+q=k} (a_p · i(2π/L)q) b_q` by brute force over all pairs.
pub fn direct_nonlinear(a: &SpectralField, b: &SpectralField, out: usize) -> Vec<(Wave, Vec3c)> {
    let w = TWO_PI / a.side();
    let cube = ModeCube::new(out);
    let pa = waves(a.truncation());
    cube.waves()
        .map(|k| {
            let mut acc = [c(0.0, 0.0); 3];
            for &p in &pa {
                let q = sub(k, p);
                let ap = a.coefficient(p);
                let bq = b.coefficient(q);
                let adv: Complex64 = (0..3).map(|j| ap[j] * c(0.0, w * q[j] as f64)).sum();
                for i in 0..3 {
                    acc[i] += adv * bq[i];
                }
            }
            (k, acc)
        })
        .collect()
}

/// `Σ_{k≠0} |k|^{2s} |(u_i u_j)_k|²` by brute-force convolution.
pub fn direct_tensor_norm_sq(u: &SpectralField, s: f64) -> f64 {
    let m = u.truncation();
    let pa = waves(m);
    let mut total = 0.0;
    for k in waves(2 * m) {
        if k == [0, 0, 0] {
            continue;
        }
        let mut t = [[c(0.0, 0.0); 3]; 3];
        for &p in &pa {
            let up = u.coefficient(p);
            let uq = u.coefficient(sub(k, p));
            for i in 0..3 {
                for j in 0..3 {
                    t[i][j] += up[i] * uq[j];
                }
            }
        }
        let mag: f64 = t.iter().flatten().map(|z| z.norm_sqr()).sum();
        total += knorm(k).powf(2.0 * s) * mag;
    }
    total
}

/// Bundle from explicit Sobolev constants, all equal to `cs`.
pub fn bundle_with(alpha: f64, side: f64, eps: f64, cs: f64) -> ConstantBundle {
    assemble_from_values(
        BundleInputs {
            alpha,
            l: side,
            eps1: eps,
            eps2: eps,
        },
        SobolevValues {
            one_minus_alpha: cs,
            one: cs,
            alpha_minus_half: cs,
        },
        K2Variant::Conservative,
    )
    .unwrap()
}
