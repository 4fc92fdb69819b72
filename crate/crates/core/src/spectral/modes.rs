//! Half-space storage of Fourier coefficients on the cube `|k_i| <= m`.
//!
//! Wave vectors of the full cube are ordered lexicographically by
//! `(k1, k2, k3)`. The zero mode sits exactly in the middle of that order and
//! the reflection `k -> -k` reverses it, so the modes after the centre form a
//! half-space whose conjugate partners are the modes before it. Only that
//! upper half is stored.

use num_complex::Complex64;

/// Integer wave vector `k ∈ Z^3`.
pub type Wave = [i32; 3];

pub(crate) fn wave_norm_sq(k: Wave) -> f64 {
    let [a, b, c] = k.map(f64::from);
    a * a + b * b + c * c
}

/// Cube of modes `|k_i| <= m`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct ModeCube {
    m: usize,
}

/// Location of a wave vector inside half-space storage.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Slot {
    /// `k` itself is stored at this index.
    Direct(usize),
    /// `-k` is stored at this index; the value for `k` is its conjugate.
    Conjugate(usize),
}

impl ModeCube {
    pub fn new(m: usize) -> Self {
        ModeCube { m }
    }

    pub fn truncation(&self) -> usize {
        self.m
    }

    /// Number of modes per axis, `2m + 1`.
    pub fn side(&self) -> usize {
        2 * self.m + 1
    }

    /// Number of stored modes, `((2m+1)^3 - 1) / 2`.
    pub fn half_len(&self) -> usize {
        let n = self.side();
        (n * n * n - 1) / 2
    }

    fn center(&self) -> usize {
        self.half_len()
    }

    pub fn contains(&self, k: Wave) -> bool {
        let m = self.m as i32;
        k.iter().all(|&c| c.abs() <= m)
    }

    pub fn locate(&self, k: Wave) -> Option<Slot> {
        if !self.contains(k) || k == [0, 0, 0] {
            return None;
        }
        let n = self.side();
        let m = self.m as i32;
        let full = ((k[0] + m) as usize * n + (k[1] + m) as usize) * n + (k[2] + m) as usize;
        let c = self.center();
        Some(if full > c {
            Slot::Direct(full - c - 1)
        } else {
            Slot::Conjugate(c - 1 - full)
        })
    }

    /// Wave vector stored at half-space index `idx`.
    pub fn wave(&self, idx: usize) -> Wave {
        let n = self.side();
        let m = self.m as i32;
        let full = idx + self.center() + 1;
        let k3 = (full % n) as i32 - m;
        let k2 = ((full / n) % n) as i32 - m;
        let k1 = (full / (n * n)) as i32 - m;
        [k1, k2, k3]
    }

    /// Stored wave vectors in lexicographic order.
    pub fn waves(&self) -> impl Iterator<Item = Wave> + '_ {
        (0..self.half_len()).map(move |i| self.wave(i))
    }
}

/// Values that can serve as a Fourier coefficient of a real field.
pub trait Coefficient: Copy + Send + Sync + PartialEq + std::fmt::Debug {
    fn zero() -> Self;
    fn conj(self) -> Self;
    fn norm_sqr(&self) -> f64;
}

impl Coefficient for Complex64 {
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn conj(self) -> Self {
        Complex64::conj(&self)
    }
    fn norm_sqr(&self) -> f64 {
        Complex64::norm_sqr(self)
    }
}

impl<const N: usize> Coefficient for [Complex64; N] {
    fn zero() -> Self {
        [Complex64::new(0.0, 0.0); N]
    }
    fn conj(self) -> Self {
        self.map(|c| c.conj())
    }
    fn norm_sqr(&self) -> f64 {
        self.iter().map(|c| c.norm_sqr()).sum()
    }
}

/// Coefficients of a real, zero-mean periodic field on a mode cube.
#[derive(Clone, Debug, PartialEq)]
pub struct HalfSpace<T> {
    cube: ModeCube,
    data: Vec<T>,
}

impl<T: Coefficient> HalfSpace<T> {
    pub fn zeros(cube: ModeCube) -> Self {
        HalfSpace {
            cube,
            data: vec![T::zero(); cube.half_len()],
        }
    }

    pub fn from_vec(cube: ModeCube, data: Vec<T>) -> Option<Self> {
        (data.len() == cube.half_len()).then_some(HalfSpace { cube, data })
    }

    pub fn cube(&self) -> ModeCube {
        self.cube
    }

    pub fn as_slice(&self) -> &[T] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [T] {
        &mut self.data
    }

    /// Value at `k`, reconstructing by conjugation; zero outside the cube and at `k = 0`.
    pub fn get(&self, k: Wave) -> T {
        match self.cube.locate(k) {
            Some(Slot::Direct(i)) => self.data[i],
            Some(Slot::Conjugate(i)) => self.data[i].conj(),
            None => T::zero(),
        }
    }

    /// Sets the value at `k` (and implicitly its conjugate at `-k`).
    /// Returns `false` when `k` is zero or outside the cube.
    pub fn set(&mut self, k: Wave, value: T) -> bool {
        match self.cube.locate(k) {
            Some(Slot::Direct(i)) => {
                self.data[i] = value;
                true
            }
            Some(Slot::Conjugate(i)) => {
                self.data[i] = value.conj();
                true
            }
            None => false,
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (Wave, &T)> + '_ {
        self.data
            .iter()
            .enumerate()
            .map(move |(i, v)| (self.cube.wave(i), v))
    }

    /// Copies into a cube of a different size, dropping modes that no longer fit.
    pub fn resized(&self, cube: ModeCube) -> Self {
        if cube == self.cube {
            return self.clone();
        }
        let mut out = HalfSpace::zeros(cube);
        for (i, v) in self.data.iter().enumerate() {
            let k = self.cube.wave(i);
            if cube.contains(k) {
                out.set(k, *v);
            }
        }
        out
    }

    /// `Σ_{k≠0} w(k) |u_k|^2` over the full cube (both halves).
    pub fn weighted_norm_sq(&self, weight: impl Fn(Wave) -> f64) -> f64 {
        2.0 * self
            .iter()
            .map(|(k, v)| weight(k) * v.norm_sqr())
            .sum::<f64>()
    }
}
