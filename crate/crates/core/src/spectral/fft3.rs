//! Three-dimensional complex FFT on an `n^3` cube built from 1-D `rustfft` plans.
//!
//! Each pass transforms the contiguous axis and then rotates the axes
//! `(i0, i1, i2) -> (i2, i0, i1)`; three passes transform every axis and
//! restore the original layout.

use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::{Fft, FftPlanner};

pub struct Fft3 {
    n: usize,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl std::fmt::Debug for Fft3 {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Fft3").field("n", &self.n).finish()
    }
}

impl Fft3 {
    pub fn new(n: usize) -> Self {
        assert!(n > 0);
        let mut planner = FftPlanner::new();
        Fft3 {
            n,
            forward: planner.plan_fft_forward(n),
            inverse: planner.plan_fft_inverse(n),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.n * self.n * self.n
    }

    /// Unnormalised `Σ_j x_j e^{-2πi k·j/n}`.
    pub fn forward(&self, data: &mut Vec<Complex64>, scratch: &mut Vec<Complex64>) {
        self.run(&self.forward, data, scratch);
    }

    /// Unnormalised `Σ_k x_k e^{+2πi k·j/n}`.
    pub fn inverse(&self, data: &mut Vec<Complex64>, scratch: &mut Vec<Complex64>) {
        self.run(&self.inverse, data, scratch);
    }

    fn run(&self, fft: &Arc<dyn Fft<f64>>, data: &mut Vec<Complex64>, scratch: &mut Vec<Complex64>) {
        let n = self.n;
        assert_eq!(data.len(), self.len());
        scratch.resize(self.len(), Complex64::new(0.0, 0.0));
        let work = fft.get_inplace_scratch_len();
        for _ in 0..3 {
            data.par_chunks_mut(n * n).for_each_init(
                || vec![Complex64::new(0.0, 0.0); work],
                |buf, plane| fft.process_with_scratch(plane, buf),
            );
            rotate(n, data, scratch);
            std::mem::swap(data, scratch);
        }
    }
}

fn rotate(n: usize, src: &[Complex64], dst: &mut [Complex64]) {
    dst.par_chunks_mut(n).enumerate().for_each(|(row, out)| {
        let a = row / n;
        let b = row % n;
        let base = b * n * n + a;
        for (c, o) in out.iter_mut().enumerate() {
            *o = src[base + c * n];
        }
    });
}

/// Smallest `n' >= n` whose prime factors are all in `{2, 3, 5, 7}`.
pub fn smooth_size(n: usize) -> usize {
    let mut candidate = n.max(1);
    loop {
        let mut r = candidate;
        for p in [2, 3, 5, 7] {
            while r % p == 0 {
                r /= p;
            }
        }
        if r == 1 {
            return candidate;
        }
        candidate += 1;
    }
}
