//! Uniform 1D grids and complex wavefunction samples on them.
//!
//! Sample counts are powers of two so every spectral transform is a plain
//! radix-2 FFT. The right endpoint is excluded: x_j = min + j*step for
//! j = 0..n-1, which is the periodic convention the transforms assume.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::model::{EffectiveParams, QuadraticModel};

/// Relative tail magnitude above which a state is considered to have leaked
/// off the grid. Keeps quadrature errors below the 1e-8 tolerances used by
/// the verification checks.
pub const EDGE_LEAK_THRESHOLD: f64 = 1e-12;

/// Looser tail threshold for the *output* of composed spectral operators
/// (repeated ladder raises, intertwiners): each FFT pass deposits roundoff
/// of order 1e-14 at the edges and position weighting amplifies it, so the
/// strict threshold would flag pure noise. A genuine leak sits orders of
/// magnitude above this.
pub const EDGE_NOISE_THRESHOLD: f64 = 1e-9;

/// Scaled coordinate zeta = x sqrt(Omega/(hbar mu)) at which the nu-th
/// Hermite-Gaussian |H_nu(zeta)| exp(-zeta^2/2) has dropped to ~1e-13 of its
/// peak: solves zeta^2/2 - nu ln(2 zeta) = 29 by fixed-point iteration.
fn tail_zeta(nu: usize) -> f64 {
    let mut z: f64 = 58f64.sqrt();
    for _ in 0..6 {
        z = (58.0 + 2.0 * nu as f64 * (2.0 * z).ln().max(0.0)).sqrt();
    }
    z
}

/// Uniform spatial grid metadata.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    min: f64,
    step: f64,
    n: usize,
}

impl Grid {
    pub fn new(min: f64, step: f64, n: usize) -> Result<Self> {
        if n < 2 || !n.is_power_of_two() {
            return Err(Error::InvalidGrid(format!("sample count {n} is not a power of two >= 2")));
        }
        if !(step > 0.0) || !step.is_finite() || !min.is_finite() {
            return Err(Error::InvalidGrid(format!("bad extent: min = {min}, step = {step}")));
        }
        Ok(Self { min, step, n })
    }

    /// Symmetric grid on [-half_width, half_width) with `n` samples.
    pub fn symmetric(half_width: f64, n: usize) -> Result<Self> {
        if !(half_width > 0.0) {
            return Err(Error::InvalidGrid(format!("half width must be > 0, got {half_width}")));
        }
        let step = 2.0 * half_width / n as f64;
        Self::new(-half_width, step, n)
    }

    /// Grid wide and fine enough for the solution families of a model: the
    /// domain reaches `orbit_extent` plus the point where the widest
    /// requested Hermite-Gaussian has decayed safely below the edge-leak
    /// threshold, and the step resolves the germ width sqrt(hbar mu / Omega)
    /// with at least 16 points. The domain is kept as tight as the tail
    /// target allows: oversizing amplifies the roundoff that repeated
    /// position-weighted spectral operators deposit at the edges.
    pub fn for_model(
        model: &QuadraticModel,
        eff: &EffectiveParams,
        max_nu: usize,
        orbit_extent: f64,
    ) -> Result<Self> {
        let width = eff.gaussian_width(model);
        let half_width = orbit_extent.abs() + width * (tail_zeta(max_nu) + 0.5);
        let min_points = (2.0 * half_width / (width / 16.0)).ceil() as usize;
        let n = min_points.next_power_of_two().max(64);
        Self::symmetric(half_width, n)
    }

    pub fn min(&self) -> f64 {
        self.min
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn point(&self, j: usize) -> f64 {
        self.min + self.step * j as f64
    }

    pub fn points(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.n).map(move |j| self.point(j))
    }
}

/// Complex-valued samples on a uniform grid.
#[derive(Debug, Clone, PartialEq)]
pub struct WaveFunction {
    grid: Grid,
    samples: Vec<Complex64>,
}

impl WaveFunction {
    pub fn new(grid: Grid, samples: Vec<Complex64>) -> Result<Self> {
        if samples.len() != grid.len() {
            return Err(Error::InvalidGrid(format!(
                "sample count {} does not match grid size {}",
                samples.len(),
                grid.len()
            )));
        }
        if samples.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::InvalidGrid("non-finite amplitude".into()));
        }
        Ok(Self { grid, samples })
    }

    /// Samples `f` at every grid point.
    pub fn from_fn(grid: Grid, f: impl Fn(f64) -> Complex64) -> Result<Self> {
        let samples = grid.points().map(f).collect();
        Self::new(grid, samples)
    }

    pub fn grid(&self) -> Grid {
        self.grid
    }

    pub fn samples(&self) -> &[Complex64] {
        &self.samples
    }

    pub fn samples_mut(&mut self) -> &mut [Complex64] {
        &mut self.samples
    }

    pub fn into_samples(self) -> Vec<Complex64> {
        self.samples
    }

    /// Trapezoidal integral of `f(x_j, psi_j)` over the grid.
    pub fn integrate(&self, f: impl Fn(f64, Complex64) -> Complex64) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        let n = self.samples.len();
        for (j, &z) in self.samples.iter().enumerate() {
            let v = f(self.grid.point(j), z);
            let w = if j == 0 || j == n - 1 { 0.5 } else { 1.0 };
            acc += w * v;
        }
        acc * self.grid.step
    }

    pub fn norm_sq(&self) -> f64 {
        self.integrate(|_, z| Complex64::new(z.norm_sqr(), 0.0)).re
    }

    pub fn norm(&self) -> f64 {
        self.norm_sq().sqrt()
    }

    /// Hermitian inner product <self, other> = integral conj(self) * other.
    pub fn inner(&self, other: &WaveFunction) -> Complex64 {
        debug_assert_eq!(self.grid, other.grid);
        let mut acc = Complex64::new(0.0, 0.0);
        let n = self.samples.len();
        for j in 0..n {
            let w = if j == 0 || j == n - 1 { 0.5 } else { 1.0 };
            acc += w * self.samples[j].conj() * other.samples[j];
        }
        acc * self.grid.step
    }

    /// L2 distance ||self - other||.
    pub fn distance(&self, other: &WaveFunction) -> f64 {
        debug_assert_eq!(self.grid, other.grid);
        let mut acc = 0.0;
        let n = self.samples.len();
        for j in 0..n {
            let w = if j == 0 || j == n - 1 { 0.5 } else { 1.0 };
            acc += w * (self.samples[j] - other.samples[j]).norm_sqr();
        }
        (acc * self.grid.step).sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.samples.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Relative magnitude of the largest edge sample.
    pub fn edge_tail(&self) -> f64 {
        let peak = self.max_abs();
        if peak == 0.0 {
            return 0.0;
        }
        let first = self.samples[0].norm();
        let last = self.samples[self.samples.len() - 1].norm();
        first.max(last) / peak
    }

    /// Errors with [`Error::EdgeLeak`] unless the state has decayed below
    /// [`EDGE_LEAK_THRESHOLD`] at both grid edges.
    pub fn check_edges(&self) -> Result<()> {
        self.check_edges_with(EDGE_LEAK_THRESHOLD)
    }

    pub fn check_edges_with(&self, threshold: f64) -> Result<()> {
        let tail = self.edge_tail();
        if tail > threshold {
            Err(Error::EdgeLeak { tail, threshold })
        } else {
            Ok(())
        }
    }

    /// Worst pointwise mismatch against `want`, measured relative to the
    /// local magnitude with a peak-scaled floor:
    /// max_j |a_j - b_j| / (|b_j| + floor_frac * max|b|). The floor keeps the
    /// metric meaningful where |b| sits at the double-precision noise level.
    pub fn pointwise_mismatch(&self, want: &WaveFunction, floor_frac: f64) -> f64 {
        debug_assert_eq!(self.grid, want.grid);
        let floor = floor_frac * want.max_abs();
        self.samples
            .iter()
            .zip(&want.samples)
            .map(|(a, b)| (a - b).norm() / (b.norm() + floor))
            .fold(0.0, f64::max)
    }

    pub fn scale(&mut self, factor: Complex64) {
        for z in &mut self.samples {
            *z *= factor;
        }
    }
}
