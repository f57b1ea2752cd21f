//! Hamilton-Ehrenfest moment dynamics: the closed ODE system for the first
//! moments z = (p, x) and second centered moments Delta^(2), its analytic 1D
//! solution, a fixed-step numeric integrator (which also accepts the matrix
//! form of the system), moment extraction from grid wavefunctions, and the
//! algebraic fit of integration constants to initial moments.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::WaveFunction;
use crate::model::{EffectiveParams, QuadraticModel};
use crate::ode;
use crate::spectral::Spectral;

/// First and second centered moments at one time.
///
/// Index 1 is momentum, index 2 is position, so `d22` is the position
/// variance, `d11` the momentum variance and `d12` the symmetrized cross
/// moment.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentState {
    pub p: f64,
    pub x: f64,
    pub d11: f64,
    pub d12: f64,
    pub d22: f64,
}

impl MomentState {
    pub fn new(p: f64, x: f64, d11: f64, d12: f64, d22: f64) -> Self {
        Self { p, x, d11, d12, d22 }
    }

    /// Covariance determinant d11*d22 - d12^2.
    pub fn covariance_det(&self) -> f64 {
        self.d11 * self.d22 - self.d12 * self.d12
    }

    /// Checks covariance positivity (up to a small rounding slack).
    pub fn validate_covariance(&self) -> Result<()> {
        let slack = 1e-12 * (1.0 + self.d11.abs().max(self.d22.abs())).powi(2);
        if self.d11 < -slack || self.d22 < -slack || self.covariance_det() < -slack {
            return Err(Error::InvalidConfig(format!(
                "covariance not positive semidefinite: d11={}, d22={}, det={}",
                self.d11,
                self.d22,
                self.covariance_det()
            )));
        }
        Ok(())
    }

    fn to_array(self) -> [f64; 5] {
        [self.p, self.x, self.d11, self.d12, self.d22]
    }

    fn from_array(y: [f64; 5]) -> Self {
        Self { p: y[0], x: y[1], d11: y[2], d12: y[3], d22: y[4] }
    }
}

/// Integration constants C = (C1..C5) labeling a phase orbit of the moment
/// system: C1, C2 parameterize the first-moment ellipse, C3..C5 the
/// second-moment oscillation and its stationary offset.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ParamSet {
    pub c1: f64,
    pub c2: f64,
    pub c3: f64,
    pub c4: f64,
    pub c5: f64,
}

impl ParamSet {
    pub fn new(c1: f64, c2: f64, c3: f64, c4: f64, c5: f64) -> Self {
        Self { c1, c2, c3, c4, c5 }
    }

    /// Stationary orbit: first moments at rest, widths pinned by `c5`.
    pub fn stationary(c5: f64) -> Self {
        Self::new(0.0, 0.0, 0.0, 0.0, c5)
    }
}

/// Right-hand side of the moment system,
/// (dp, dx, dD11, dD21, dD22) =
/// (-rho p - sigma0 x, mu p + rho x,
///  -2 rho D11 - 2 sigma_tilde D21, mu D11 - sigma_tilde D22,
///  2 mu D21 + 2 rho D22).
pub fn hes_rhs(state: &MomentState, eff: &EffectiveParams, model: &QuadraticModel) -> MomentState {
    MomentState {
        p: -model.rho * state.p - eff.sigma0 * state.x,
        x: model.mu * state.p + model.rho * state.x,
        d11: -2.0 * model.rho * state.d11 - 2.0 * eff.sigma_tilde * state.d12,
        d12: model.mu * state.d11 - eff.sigma_tilde * state.d22,
        d22: 2.0 * model.mu * state.d12 + 2.0 * model.rho * state.d22,
    }
}

/// The same dynamics in matrix form: dz = J M1 z, dDelta = J M Delta - Delta M J
/// with M1 = Hzz + kt (Wzz + Wzw) and M = Hzz + kt Wzz. This is the shape the
/// general (2n-dimensional) system takes; here n = 1 and the blocks are 2x2.
#[derive(Debug, Clone, Copy)]
pub struct MatrixHes {
    pub hzz: [[f64; 2]; 2],
    pub wzz: [[f64; 2]; 2],
    pub wzw: [[f64; 2]; 2],
    pub kappa_tilde: f64,
}

impl MatrixHes {
    pub fn from_model(model: &QuadraticModel, eff: &EffectiveParams) -> Self {
        Self {
            hzz: [[model.mu, model.rho], [model.rho, model.sigma]],
            wzz: [[0.0, 0.0], [0.0, model.a]],
            wzw: [[0.0, 0.0], [0.0, model.b]],
            kappa_tilde: eff.kappa_tilde,
        }
    }

    /// (dz, dDelta) for z = (p, x) and symmetric Delta.
    pub fn rhs(&self, z: [f64; 2], delta: [[f64; 2]; 2]) -> ([f64; 2], [[f64; 2]; 2]) {
        let kt = self.kappa_tilde;
        let m1 = add(&self.hzz, &add(&scale(&self.wzz, kt), &scale(&self.wzw, kt)));
        let m = add(&self.hzz, &scale(&self.wzz, kt));
        let j = [[0.0, -1.0], [1.0, 0.0]];
        let dz_mat = mul(&j, &m1);
        let dz = [
            dz_mat[0][0] * z[0] + dz_mat[0][1] * z[1],
            dz_mat[1][0] * z[0] + dz_mat[1][1] * z[1],
        ];
        let jm = mul(&j, &m);
        let mj = mul(&m, &j);
        let ddelta = sub(&mul(&jm, &delta), &mul(&delta, &mj));
        (dz, ddelta)
    }
}

fn add(a: &[[f64; 2]; 2], b: &[[f64; 2]; 2]) -> [[f64; 2]; 2] {
    [[a[0][0] + b[0][0], a[0][1] + b[0][1]], [a[1][0] + b[1][0], a[1][1] + b[1][1]]]
}

fn sub(a: &[[f64; 2]; 2], b: &[[f64; 2]; 2]) -> [[f64; 2]; 2] {
    [[a[0][0] - b[0][0], a[0][1] - b[0][1]], [a[1][0] - b[1][0], a[1][1] - b[1][1]]]
}

fn scale(a: &[[f64; 2]; 2], s: f64) -> [[f64; 2]; 2] {
    [[s * a[0][0], s * a[0][1]], [s * a[1][0], s * a[1][1]]]
}

fn mul(a: &[[f64; 2]; 2], b: &[[f64; 2]; 2]) -> [[f64; 2]; 2] {
    let mut out = [[0.0; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            out[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    out
}

/// General analytic solution of the moment system.
///
/// First moments rotate at Omega_bar; centered second moments oscillate at
/// 2 Omega around the stationary widths set by C5.
pub fn hes_analytic_1d(
    t: f64,
    c: &ParamSet,
    eff: &EffectiveParams,
    model: &QuadraticModel,
) -> MomentState {
    let (ob, o) = (eff.omega_bar, eff.omega);
    let (mu, rho) = (model.mu, model.rho);
    let (s1, c1) = (ob * t).sin_cos();
    let (s2, c2) = (2.0 * o * t).sin_cos();

    let x = c.c1 * s1 + c.c2 * c1;
    let p = (ob * c.c1 - rho * c.c2) / mu * c1 - (ob * c.c2 + rho * c.c1) / mu * s1;

    let d22 = c.c3 * s2 + c.c4 * c2 + c.c5;
    let d12 = (o * c.c3 - rho * c.c4) / mu * c2 - (o * c.c4 + rho * c.c3) / mu * s2
        - rho / mu * c.c5;
    let mu2 = mu * mu;
    let d11 = ((rho * rho - o * o) * c.c3 + 2.0 * rho * o * c.c4) / mu2 * s2
        + ((rho * rho - o * o) * c.c4 - 2.0 * rho * o * c.c3) / mu2 * c2
        + eff.sigma_tilde / mu * c.c5;

    MomentState { p, x, d11, d12, d22 }
}

/// The stationary moment state belonging to `ParamSet::stationary(c5)`.
pub fn stationary_state(c5: f64, eff: &EffectiveParams, model: &QuadraticModel) -> MomentState {
    MomentState {
        p: 0.0,
        x: 0.0,
        d11: eff.sigma_tilde / model.mu * c5,
        d12: -model.rho / model.mu * c5,
        d22: c5,
    }
}

/// Fixed-step RK4 trajectory of the moment system from `initial` at t = 0,
/// with dense output exactly at the (sorted, non-negative) `times`.
pub fn integrate_hes_numeric(
    initial: &MomentState,
    times: &[f64],
    step: f64,
    eff: &EffectiveParams,
    model: &QuadraticModel,
) -> Result<Vec<(f64, MomentState)>> {
    if !(step > 0.0) {
        return Err(Error::InvalidConfig(format!("RK4 step must be > 0, got {step}")));
    }
    let f = |_t: f64, y: &[f64; 5]| hes_rhs(&MomentState::from_array(*y), eff, model).to_array();
    let states = ode::integrate_to_times(&f, 0.0, initial.to_array(), times, step);
    Ok(times
        .iter()
        .zip(states)
        .map(|(&t, y)| (t, MomentState::from_array(y)))
        .collect())
}

/// Default RK4 step for a model: min(1e-3, 0.01/Omega).
pub fn default_hes_step(eff: &EffectiveParams) -> f64 {
    (1e-3f64).min(0.01 / eff.omega)
}

/// RK4 trajectory of the *matrix-form* system: the state is the pair
/// (z, Delta) with the full (not symmetry-reduced) 2x2 second-moment block.
/// Returns (z, Delta) at each requested time.
pub fn integrate_matrix_hes(
    mat: &MatrixHes,
    z0: [f64; 2],
    delta0: [[f64; 2]; 2],
    times: &[f64],
    step: f64,
) -> Result<Vec<([f64; 2], [[f64; 2]; 2])>> {
    if !(step > 0.0) {
        return Err(Error::InvalidConfig(format!("RK4 step must be > 0, got {step}")));
    }
    let f = |_t: f64, y: &[f64; 6]| {
        let (dz, dd) = mat.rhs([y[0], y[1]], [[y[2], y[3]], [y[4], y[5]]]);
        [dz[0], dz[1], dd[0][0], dd[0][1], dd[1][0], dd[1][1]]
    };
    let y0 = [z0[0], z0[1], delta0[0][0], delta0[0][1], delta0[1][0], delta0[1][1]];
    let states = ode::integrate_to_times(&f, 0.0, y0, times, step);
    Ok(states
        .into_iter()
        .map(|y| ([y[0], y[1]], [[y[2], y[3]], [y[4], y[5]]]))
        .collect())
}

/// Extracts (moments, squared norm) from a grid wavefunction.
///
/// Position moments use trapezoidal quadrature; momentum moments go through
/// discrete Fourier differentiation so the residuals stay near machine
/// precision for smooth decaying states.
pub fn moments_from_wavefunction(
    psi: &WaveFunction,
    model: &QuadraticModel,
) -> Result<(MomentState, f64)> {
    psi.check_edges()?;
    let norm_sq = psi.norm_sq();
    if norm_sq <= 0.0 {
        return Err(Error::InvalidConfig("cannot take moments of the zero function".into()));
    }
    let sp = Spectral::for_wavefunction(psi);
    Ok(moments_with_spectral(psi, model, &sp, norm_sq))
}

/// Same as [`moments_from_wavefunction`] but with a prebuilt FFT plan and
/// norm, for use inside stepping loops. Skips the edge check.
pub fn moments_with_spectral(
    psi: &WaveFunction,
    model: &QuadraticModel,
    sp: &Spectral,
    norm_sq: f64,
) -> (MomentState, f64) {
    let x_mean = psi.integrate(|x, z| Complex64::new(x * z.norm_sqr(), 0.0)).re / norm_sq;
    let x2_mean = psi.integrate(|x, z| Complex64::new(x * x * z.norm_sqr(), 0.0)).re / norm_sq;

    let p_psi = sp.momentum(psi, model.hbar);
    let p_mean = psi.inner(&p_psi).re / norm_sq;
    let p2_mean = p_psi.norm_sq() / norm_sq;
    // <(x p + p x)/2> = Re <psi| x p |psi>
    let xp_mean = {
        let grid = psi.grid();
        let mut acc = Complex64::new(0.0, 0.0);
        let n = grid.len();
        for j in 0..n {
            let w = if j == 0 || j == n - 1 { 0.5 } else { 1.0 };
            acc += w * psi.samples()[j].conj() * grid.point(j) * p_psi.samples()[j];
        }
        (acc * grid.step()).re / norm_sq
    };

    let state = MomentState {
        p: p_mean,
        x: x_mean,
        d11: p2_mean - p_mean * p_mean,
        d12: xp_mean - x_mean * p_mean,
        d22: x2_mean - x_mean * x_mean,
    };
    (state, norm_sq)
}

/// Inverts the analytic solution at t = 0, recovering the integration
/// constants that reproduce the given initial moments:
///
/// ```text
/// C2 = x(0)                     C1 = (mu p(0) + rho x(0)) / Omega_bar
/// C3 = (mu D12 + rho D22) / Omega
/// C5 = mu (mu D11 + sigma_tilde D22 + 2 rho D12) / (2 Omega^2)
/// C4 = D22 - C5
/// ```
pub fn fit_constants(
    initial: &MomentState,
    eff: &EffectiveParams,
    model: &QuadraticModel,
) -> Result<ParamSet> {
    if !(eff.omega > 0.0) || !(eff.omega_bar > 0.0) {
        return Err(Error::SingularFit);
    }
    initial.validate_covariance()?;
    let (mu, rho) = (model.mu, model.rho);
    let c2 = initial.x;
    let c1 = (mu * initial.p + rho * initial.x) / eff.omega_bar;
    let c3 = (mu * initial.d12 + rho * initial.d22) / eff.omega;
    let c5 = mu * (mu * initial.d11 + eff.sigma_tilde * initial.d22 + 2.0 * rho * initial.d12)
        / (2.0 * eff.omega * eff.omega);
    let c4 = initial.d22 - c5;
    Ok(ParamSet { c1, c2, c3, c4, c5 })
}
