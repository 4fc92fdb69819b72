//! Transforms between half-space coefficients and values on the uniform grid.
//!
//! Real fields are transformed two at a time: the pair `(a, b)` is packed into
//! the complex field `a + i b`, which halves the number of 3-D FFTs.

use num_complex::Complex64;

use super::fft3::Fft3;
use super::modes::{ModeCube, Wave};

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Grid transform of size `n^3` on the box `[0, L)^3` with nodes `x_j = j L / n`.
#[derive(Debug)]
pub struct Transform {
    fft: Fft3,
}

impl Transform {
    pub fn new(n: usize) -> Self {
        Transform { fft: Fft3::new(n) }
    }

    pub fn n(&self) -> usize {
        self.fft.n()
    }

    pub fn len(&self) -> usize {
        self.fft.len()
    }

    fn slot(&self, k: Wave) -> usize {
        let n = self.n() as i32;
        let w = k.map(|c| c.rem_euclid(n) as usize);
        (w[0] * self.n() + w[1]) * self.n() + w[2]
    }

    /// Evaluates `count` real fields on the grid. `coef(c, h)` is the coefficient of
    /// component `c` at half-space index `h` of `cube`. The sink receives the
    /// component index and its grid values.
    pub fn synthesize_with(
        &self,
        cube: ModeCube,
        count: usize,
        coef: impl Fn(usize, usize) -> Complex64,
        mut sink: impl FnMut(usize, &[f64]),
    ) {
        assert!(self.n() > 2 * cube.truncation(), "grid too small for the mode cube");
        let zero = Complex64::new(0.0, 0.0);
        let mut buf = vec![zero; self.len()];
        let mut scratch = Vec::new();
        let mut values = vec![0.0; self.len()];
        let mut c = 0;
        while c < count {
            let paired = c + 1 < count;
            buf.iter_mut().for_each(|z| *z = zero);
            for (h, k) in cube.waves().enumerate() {
                let a = coef(c, h);
                let b = if paired { coef(c + 1, h) } else { zero };
                buf[self.slot(k)] = a + I * b;
                buf[self.slot([-k[0], -k[1], -k[2]])] = a.conj() + I * b.conj();
            }
            self.fft.inverse(&mut buf, &mut scratch);
            values.iter_mut().zip(&buf).for_each(|(v, z)| *v = z.re);
            sink(c, &values);
            if paired {
                values.iter_mut().zip(&buf).for_each(|(v, z)| *v = z.im);
                sink(c + 1, &values);
            }
            c += 2;
        }
    }

    pub fn synthesize(
        &self,
        cube: ModeCube,
        count: usize,
        coef: impl Fn(usize, usize) -> Complex64,
    ) -> Vec<Vec<f64>> {
        let mut out = vec![Vec::new(); count];
        self.synthesize_with(cube, count, coef, |c, v| out[c] = v.to_vec());
        out
    }

    /// Adds `Σ_c f_c(x)^2` over the synthesized components into `acc`.
    pub fn accumulate_squares(
        &self,
        cube: ModeCube,
        count: usize,
        coef: impl Fn(usize, usize) -> Complex64,
        acc: &mut [f64],
    ) {
        assert_eq!(acc.len(), self.len());
        self.synthesize_with(cube, count, coef, |_, v| {
            acc.iter_mut().zip(v).for_each(|(a, x)| *a += x * x);
        });
    }

    /// Fourier coefficients on `out` of `count` real grid fields given pointwise by
    /// `value(c, j)`. Returns one half-space vector per component.
    pub fn analyze(
        &self,
        out: ModeCube,
        count: usize,
        value: impl Fn(usize, usize) -> f64,
    ) -> Vec<Vec<Complex64>> {
        assert!(self.n() > 2 * out.truncation(), "grid too small for the output cube");
        let zero = Complex64::new(0.0, 0.0);
        let scale = 1.0 / self.len() as f64;
        let mut buf = vec![zero; self.len()];
        let mut scratch = Vec::new();
        let mut result = vec![Vec::new(); count];
        let mut c = 0;
        while c < count {
            let paired = c + 1 < count;
            for (j, z) in buf.iter_mut().enumerate() {
                let b = if paired { value(c + 1, j) } else { 0.0 };
                *z = Complex64::new(value(c, j), b);
            }
            self.fft.forward(&mut buf, &mut scratch);
            let mut a_out = Vec::with_capacity(out.half_len());
            let mut b_out = Vec::with_capacity(if paired { out.half_len() } else { 0 });
            for k in out.waves() {
                let zk = buf[self.slot(k)] * scale;
                let zm = buf[self.slot([-k[0], -k[1], -k[2]])].conj() * scale;
                a_out.push((zk + zm) * 0.5);
                if paired {
                    b_out.push((zk - zm) * (-0.5 * I));
                }
            }
            result[c] = a_out;
            if paired {
                result[c + 1] = b_out;
            }
            c += 2;
        }
        result
    }
}

/// Values of a real field (`C = 3`) or its gradient (`C = 9`, row-major `∂_j u_i`)
/// on the uniform `n^3` grid of `[0, L)^3`.
#[derive(Clone, Debug, PartialEq)]
pub struct PhysicalSample<const C: usize> {
    pub n: usize,
    pub side: f64,
    pub values: Vec<[f64; C]>,
}

impl<const C: usize> PhysicalSample<C> {
    /// `(∫ |f|^p)^{1/p}` by the grid rule with weight `(L/n)^3`; `|·|` is the
    /// Euclidean (Frobenius for matrices) norm of each sample.
    pub fn lp_norm(&self, p: f64) -> f64 {
        let weight = (self.side / self.n as f64).powi(3);
        let sum: f64 = self
            .values
            .iter()
            .map(|v| v.iter().map(|x| x * x).sum::<f64>().powf(p / 2.0))
            .sum();
        (sum * weight).powf(1.0 / p)
    }

    pub fn grid_point(&self, j: usize) -> [f64; 3] {
        let n = self.n;
        let h = self.side / n as f64;
        [(j / (n * n)) as f64 * h, ((j / n) % n) as f64 * h, (j % n) as f64 * h]
    }
}

/// `(Σ_x s(x)^{p/2} (L/n)^3)^{1/p}` for pointwise squared magnitudes `s`.
pub(crate) fn lp_from_squares(squares: &[f64], p: f64, side: f64, n: usize) -> f64 {
    let weight = (side / n as f64).powi(3);
    let half = p / 2.0;
    let sum: f64 = if half == 1.0 {
        squares.iter().sum()
    } else {
        squares.iter().map(|s| s.powf(half)).sum()
    };
    (sum * weight).powf(1.0 / p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::modes::HalfSpace;

    #[test]
    fn synthesize_then_analyze_round_trips() {
        let cube = ModeCube::new(3);
        let mut a = HalfSpace::<Complex64>::zeros(cube);
        let mut b = HalfSpace::<Complex64>::zeros(cube);
        let mut c = HalfSpace::<Complex64>::zeros(cube);
        for (i, k) in cube.waves().enumerate() {
            let t = i as f64;
            a.set(k, Complex64::new(t.sin(), (2.0 * t).cos()));
            b.set(k, Complex64::new((0.5 * t).cos(), t.sin() * 0.3));
            c.set(k, Complex64::new(1.0 / (1.0 + t), -0.2));
        }
        let comps = [a.as_slice(), b.as_slice(), c.as_slice()];
        let tr = Transform::new(8);
        let phys = tr.synthesize(cube, 3, |c, h| comps[c][h]);
        let back = tr.analyze(cube, 3, |c, j| phys[c][j]);
        for c in 0..3 {
            for (x, y) in back[c].iter().zip(comps[c]) {
                assert!((x - y).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn single_mode_synthesizes_a_cosine() {
        let cube = ModeCube::new(1);
        let mut a = HalfSpace::<Complex64>::zeros(cube);
        a.set([1, 0, 0], Complex64::new(0.5, 0.0));
        let tr = Transform::new(6);
        let phys = tr.synthesize(cube, 1, |_, h| a.as_slice()[h]);
        for j in 0..tr.len() {
            let j0 = j / 36;
            let want = (2.0 * std::f64::consts::PI * j0 as f64 / 6.0).cos();
            assert!((phys[0][j] - want).abs() < 1e-14);
        }
    }
}
