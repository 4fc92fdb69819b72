//! Randomised lower bounds for `C_S(β)`, the best constant in
//! `|f|_{L^{β*}(Q_{2π})} <= C_S(β) |f|_{β,2π}` over zero-mean fields.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::table::{beta_star, check_beta};
use crate::spectral::{Slot, SpectralField, Transform, Wave};
use crate::{Error, Result};

const TWO_PI: f64 = 2.0 * PI;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SobolevSearch {
    /// Mode truncation of the trial fields.
    pub truncation: usize,
    /// Quadrature grid is `oversample · (2m + 1)` points per axis.
    pub oversample: usize,
    /// Ascent steps per start; the budget is split into starts of this length.
    pub iterations_per_start: usize,
}

impl Default for SobolevSearch {
    fn default() -> Self {
        SobolevSearch {
            truncation: 4,
            oversample: 3,
            iterations_per_start: 100,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SobolevEstimate {
    pub beta: f64,
    pub beta_star: f64,
    pub value: f64,
    pub budget: usize,
    pub seed: u64,
    pub search: SobolevSearch,
}

/// Ratio `|f|_{L^{β*}} / |f|_{β}` of `f` placed on `Q_{2π}`.
pub fn sobolev_ratio(f: &SpectralField, beta: f64, oversample: usize) -> Result<f64> {
    check_beta(beta)?;
    let f = f.with_side(TWO_PI)?;
    let denom = f.hs_norm(beta);
    if denom == 0.0 {
        return Err(Error::invalid("ratio undefined for the zero field"));
    }
    Ok(f.lp_norm(beta_star(beta), oversample)? / denom)
}

/// Best ratio found with `budget` ascent steps. See [`estimate_sobolev_constant_with`].
pub fn estimate_sobolev_constant(beta: f64, budget: usize, seed: u64) -> Result<f64> {
    Ok(estimate_sobolev_constant_with(beta, budget, seed, &SobolevSearch::default())?.value)
}

/// Splits `budget` into starts of `iterations_per_start` steps, each driven by its
/// own stream derived from `seed`, and returns the maximum. A larger budget
/// only adds steps or starts, so the result never decreases with the budget.
pub fn estimate_sobolev_constant_with(
    beta: f64,
    budget: usize,
    seed: u64,
    search: &SobolevSearch,
) -> Result<SobolevEstimate> {
    check_beta(beta)?;
    if search.truncation == 0 || search.oversample < 2 || search.iterations_per_start == 0 {
        return Err(Error::invalid("search needs truncation >= 1, oversample >= 2, iterations >= 1"));
    }
    let budget = budget.max(1);
    let per = search.iterations_per_start;
    let starts = budget.div_ceil(per);
    let value = (0..starts)
        .into_par_iter()
        .map(|s| {
            let iters = per.min(budget - s * per);
            run_start(beta, search, start_seed(seed, s as u64), s, iters)
        })
        .reduce(|| 0.0, f64::max);
    Ok(SobolevEstimate {
        beta,
        beta_star: beta_star(beta),
        value,
        budget,
        seed,
        search: search.clone(),
    })
}

pub(crate) fn start_seed(seed: u64, start: u64) -> u64 {
    seed ^ start.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15)
}

/// Trial field for start `s`: even starts are a coherent bump (all phases
/// aligned at the origin), odd starts a Gaussian random field.
pub(crate) fn initial_field(rng: &mut ChaCha8Rng, m: usize, beta: f64, start: usize) -> SpectralField {
    let decay = beta + rng.gen_range(0.5..3.0);
    let width = rng.gen_range(0.5..1.5) * m as f64;
    let profile = move |k: Wave| {
        let k2 = (k[0] * k[0] + k[1] * k[1] + k[2] * k[2]) as f64;
        k2.powf(-decay / 2.0) * (-k2 / (width * width)).exp()
    };
    if start % 2 == 0 {
        let dir: [f64; 3] = std::array::from_fn(|_| rng.sample(StandardNormal));
        let bump = SpectralField::from_fn(TWO_PI, m, |k| dir.map(|d| Complex64::new(d * profile(k), 0.0)))
            .expect("valid side");
        let noise = SpectralField::random(TWO_PI, m, rng, |k| 0.05 * profile(k)).expect("valid side");
        bump.try_add(&noise).expect("same box")
    } else {
        SpectralField::random(TWO_PI, m, rng, profile).expect("valid side")
    }
}

fn run_start(beta: f64, search: &SobolevSearch, seed: u64, start: usize, iters: usize) -> f64 {
    ascend(beta, search, seed, start, iters).0
}

fn ascend(
    beta: f64,
    search: &SobolevSearch,
    seed: u64,
    start: usize,
    iters: usize,
) -> (f64, SpectralField) {
    let m = search.truncation;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let field = initial_field(&mut rng, m, beta, start);
    let p = beta_star(beta);
    let n = search.oversample * (2 * m + 1);
    let tr = Transform::new(n);
    let data = field.modes().as_slice();
    let mut phys = tr.synthesize(field.cube(), 3, |c, h| data[h][c]);
    let mut coeffs: Vec<[Complex64; 3]> = data.to_vec();
    let cube = field.cube();
    let weights: Vec<f64> = cube
        .waves()
        .map(|k| ((k[0] * k[0] + k[1] * k[1] + k[2] * k[2]) as f64).powf(beta))
        .collect();
    let mut norm_sq = field.hs_norm_sq(beta);
    let phase: Vec<Complex64> = (0..n)
        .map(|j| Complex64::from_polar(1.0, TWO_PI * j as f64 / n as f64))
        .collect();
    let cell = (TWO_PI / n as f64).powi(3);
    let ratio_of = |comps: [&[f64]; 3], norm_sq: f64| -> f64 {
        let sum: f64 = (0..comps[0].len())
            .map(|j| {
                let s = comps[0][j] * comps[0][j] + comps[1][j] * comps[1][j] + comps[2][j] * comps[2][j];
                if p == 2.0 {
                    s
                } else {
                    s.powf(p / 2.0)
                }
            })
            .sum();
        (sum * cell).powf(1.0 / p) / norm_sq.sqrt()
    };
    let mut best = ratio_of([&phys[0], &phys[1], &phys[2]], norm_sq);
    let mut step = 0.5;
    let mut candidate = vec![0.0; tr.len()];
    for _ in 1..iters {
        let h = rng.gen_range(0..cube.half_len());
        let c = rng.gen_range(0..3);
        let k = cube.wave(h);
        let scale = (norm_sq / (2.0 * 3.0 * cube.half_len() as f64) / weights[h]).sqrt();
        let delta = Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)) * (step * scale);
        let old = coeffs[h][c];
        let new = old + delta;
        let new_norm_sq = norm_sq + 2.0 * weights[h] * (new.norm_sqr() - old.norm_sqr());
        if new_norm_sq <= 0.0 {
            step *= 0.85;
            continue;
        }
        let idx = |x: i32| x.rem_euclid(n as i32) as usize;
        for j0 in 0..n {
            let p0 = phase[idx(k[0] * j0 as i32)];
            for j1 in 0..n {
                let p01 = p0 * phase[idx(k[1] * j1 as i32)];
                let base = (j0 * n + j1) * n;
                for j2 in 0..n {
                    let z = p01 * phase[idx(k[2] * j2 as i32)];
                    candidate[base + j2] = phys[c][base + j2] + 2.0 * (delta * z).re;
                }
            }
        }
        let comps: [&[f64]; 3] = std::array::from_fn(|i| if i == c { &candidate[..] } else { &phys[i][..] });
        let r = ratio_of(comps, new_norm_sq);
        if r > best {
            best = r;
            norm_sq = new_norm_sq;
            coeffs[h][c] = new;
            std::mem::swap(&mut phys[c], &mut candidate);
            step = (step * 1.3).min(4.0);
        } else {
            step = (step * 0.85).max(1e-3);
        }
    }
    let last = SpectralField::from_fn(TWO_PI, m, |k| match cube.locate(k) {
        Some(Slot::Direct(i)) => coeffs[i],
        _ => [Complex64::new(0.0, 0.0); 3],
    })
    .expect("valid side");
    (best, last)
}
