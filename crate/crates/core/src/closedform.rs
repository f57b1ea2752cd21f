//! Closed-form machinery of the 1D theory: the Cauchy matrix of the germ
//! system, the normalized ladder frame (B(t), C(t)), the action phase S(t, C),
//! Hermite polynomials, and the explicit solution families built from them.
//!
//! The families come in two flavors:
//!   * solutions of the *associated linear equation* at arbitrary constants C
//!     ([`ale_solution`], [`ground_state`], [`fock_state`]), and
//!   * the self-consistent members whose moments reproduce their own orbit,
//!     which solve the full nonlinear equation ([`exact_psi_nu`]).

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::{Grid, WaveFunction};
use crate::model::{EffectiveParams, QuadraticModel};
use crate::moments::{hes_analytic_1d, ParamSet};
use crate::quad::adaptive_simpson;

/// Largest quantum number with a numerically safe Hermite recurrence under
/// Gaussian damping.
pub const MAX_NU: usize = 64;

/// Absolute tolerance of the adaptive action quadrature.
pub const ACTION_TOL: f64 = 1e-14;

/// Hermite polynomial H_nu(zeta) by the three-term recurrence
/// H_{nu+1} = 2 zeta H_nu - 2 nu H_{nu-1}, seeded with H_0 = 1, H_1 = 2 zeta.
/// Supports complex arguments (displaced states need them).
pub fn hermite(nu: usize, zeta: Complex64) -> Result<Complex64> {
    if nu > MAX_NU {
        return Err(Error::OverflowRisk { nu, max: MAX_NU });
    }
    if nu == 0 {
        return Ok(Complex64::new(1.0, 0.0));
    }
    let mut h_prev = Complex64::new(1.0, 0.0);
    let mut h = 2.0 * zeta;
    for k in 1..nu {
        let next = 2.0 * zeta * h - 2.0 * k as f64 * h_prev;
        h_prev = h;
        h = next;
    }
    Ok(h)
}

/// Fundamental matrix of the germ system (dB = -rho B - sigma_tilde C,
/// dC = mu B + rho C), equal to the identity at t = 0:
///
/// ```text
/// | cos Wt - (rho/W) sin Wt       -((W^2+rho^2)/(mu W)) sin Wt |
/// | (mu/W) sin Wt                  cos Wt + (rho/W) sin Wt     |
/// ```
pub fn cauchy_matrix(t: f64, eff: &EffectiveParams, model: &QuadraticModel) -> [[f64; 2]; 2] {
    let w = eff.omega;
    let rho = model.rho;
    let (s, c) = (w * t).sin_cos();
    [
        [c - rho / w * s, -(w * w + rho * rho) / (model.mu * w) * s],
        [model.mu / w * s, c + rho / w * s],
    ]
}

/// The complex germ amplitudes (B(t), C(t)) normalized by
/// B C* - C B* = 2i.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LadderFrame {
    pub b: Complex64,
    pub c: Complex64,
}

impl LadderFrame {
    /// |B C* - C B* - 2i|, zero in exact arithmetic.
    pub fn normalization_defect(&self) -> f64 {
        (self.b * self.c.conj() - self.c * self.b.conj() - Complex64::new(0.0, 2.0)).norm()
    }
}

/// Closed-form ladder frame
/// B(t) = e^{i W t} (-rho + i W)/sqrt(W mu), C(t) = e^{i W t} sqrt(mu/W).
pub fn ladder_frame(t: f64, eff: &EffectiveParams, model: &QuadraticModel) -> LadderFrame {
    let w = eff.omega;
    let rot = Complex64::from_polar(1.0, w * t);
    LadderFrame {
        b: rot * Complex64::new(-model.rho, w) / (w * model.mu).sqrt(),
        c: rot * (model.mu / w).sqrt(),
    }
}

/// Instantaneous action rate dS/dt = P dX/dt - H_kappa(t, C) along the orbit,
/// with
/// H_kappa = (mu/2) P^2 + (1/2)(sigma0 + kt(b+c)) X^2 + rho P X + (kt c/2) D22.
pub fn action_rate(t: f64, c: &ParamSet, eff: &EffectiveParams, model: &QuadraticModel) -> f64 {
    let st = hes_analytic_1d(t, c, eff, model);
    let kt = eff.kappa_tilde;
    let x_dot = model.mu * st.p + model.rho * st.x;
    let h_kappa = 0.5 * model.mu * st.p * st.p
        + 0.5 * (eff.sigma0 + kt * (model.b + model.c)) * st.x * st.x
        + model.rho * st.p * st.x
        + 0.5 * kt * model.c * st.d22;
    st.p * x_dot - h_kappa
}

/// Action phase S(t, C) = integral_0^t { P dX/dt - H_kappa } dtau by adaptive
/// Simpson quadrature. One code path for every C; the stationary closed forms
/// serve as cross-checks in the tests.
pub fn action_phase(t: f64, c: &ParamSet, eff: &EffectiveParams, model: &QuadraticModel) -> f64 {
    adaptive_simpson(|tau| action_rate(tau, c, eff, model), 0.0, t, ACTION_TOL)
}

/// Self-consistent stationary width constant of the ground family,
/// C5 = hbar mu / (2 Omega).
pub fn ground_c5(eff: &EffectiveParams, model: &QuadraticModel) -> f64 {
    model.hbar * model.mu / (2.0 * eff.omega)
}

/// Self-consistent width constant of the nu-th family member,
/// C5' = (hbar mu / Omega)(nu + 1/2).
pub fn fock_c5(nu: usize, eff: &EffectiveParams, model: &QuadraticModel) -> f64 {
    model.hbar * model.mu / eff.omega * (nu as f64 + 0.5)
}

/// Total phase rate of the nu-th exact solution,
/// (nu + 1/2)(kappa_tilde c mu / (2 Omega) + Omega).
pub fn psi_nu_phase_rate(nu: usize, eff: &EffectiveParams, model: &QuadraticModel) -> f64 {
    (nu as f64 + 0.5) * (eff.kappa_tilde * model.c * model.mu / (2.0 * eff.omega) + eff.omega)
}

fn factorial(nu: usize) -> f64 {
    (1..=nu).fold(1.0, |acc, k| acc * k as f64)
}

/// Centered Hermite-Gaussian factor of the nu-th family member:
/// prefactor i^nu / sqrt(nu!) 2^{-nu/2} (1/(pi hbar))^{1/4} (Omega/mu)^{1/4},
/// envelope H_nu(sqrt(Omega/hbar mu) u) exp{-(i rho + Omega) u^2/(2 hbar mu)},
/// and oscillator phase e^{-i Omega (nu + 1/2) t}.
fn centered_fock(
    nu: usize,
    u: f64,
    t: f64,
    eff: &EffectiveParams,
    model: &QuadraticModel,
) -> Result<Complex64> {
    let (hbar, mu, rho) = (model.hbar, model.mu, model.rho);
    let w = eff.omega;
    let norm = (1.0 / (std::f64::consts::PI * hbar)).powf(0.25) * (w / mu).powf(0.25)
        / factorial(nu).sqrt()
        / 2f64.powi(nu as i32).sqrt();
    let i_pow = Complex64::new(0.0, 1.0).powu(nu as u32);
    let zeta = (w / (hbar * mu)).sqrt() * u;
    let herm = hermite(nu, Complex64::new(zeta, 0.0))?;
    let gauss = (-0.5 * w / (hbar * mu) * u * u).exp();
    let phase = -0.5 * rho / (hbar * mu) * u * u - w * (nu as f64 + 0.5) * t;
    Ok(i_pow * norm * herm * gauss * Complex64::from_polar(1.0, phase))
}

/// General solution of the associated linear equation at constants C:
/// Phi(x, t, C) = e^{(i/hbar)(S(t,C) + P(t,C)(x - X(t,C)))} phi_nu(x - X, t).
///
/// Valid for arbitrary admissible C; the moments of this state need not match
/// the orbit of C (that extra condition is what upgrades it to a solution of
/// the nonlinear equation).
pub fn ale_solution(
    nu: usize,
    t: f64,
    c: &ParamSet,
    eff: &EffectiveParams,
    model: &QuadraticModel,
    grid: Grid,
) -> Result<WaveFunction> {
    if nu > MAX_NU {
        return Err(Error::OverflowRisk { nu, max: MAX_NU });
    }
    let orbit = hes_analytic_1d(t, c, eff, model);
    let action = action_phase(t, c, eff, model);
    let hbar = model.hbar;
    let psi = WaveFunction::from_fn(grid, |x| {
        let u = x - orbit.x;
        let core = centered_fock(nu, u, t, eff, model).expect("nu already validated");
        core * Complex64::from_polar(1.0, (action + orbit.p * u) / hbar)
    })?;
    psi.check_edges()?;
    Ok(psi)
}

/// Ground state of the associated linear equation on the stationary orbit
/// with width constant `c5_0`: a fixed Gaussian times the phase
/// e^{-(i/2) Omega t - (i/(2 hbar)) kappa_tilde c C5 t}.
pub fn ground_state(
    t: f64,
    c5_0: f64,
    eff: &EffectiveParams,
    model: &QuadraticModel,
    grid: Grid,
) -> Result<WaveFunction> {
    ale_solution(0, t, &ParamSet::stationary(c5_0), eff, model, grid)
}

/// nu-th member of the Fock family of the associated linear equation on the
/// stationary orbit with width constant `c5_0p`.
pub fn fock_state(
    nu: usize,
    t: f64,
    c5_0p: f64,
    eff: &EffectiveParams,
    model: &QuadraticModel,
    grid: Grid,
) -> Result<WaveFunction> {
    ale_solution(nu, t, &ParamSet::stationary(c5_0p), eff, model, grid)
}

/// nu-th exact solution of the full nonlinear equation: the Fock member at
/// the self-consistent width constant C5' = (hbar mu/Omega)(nu + 1/2). Its
/// density is stationary and its total phase advances at
/// (nu + 1/2)(kappa_tilde c mu/(2 Omega) + Omega).
pub fn exact_psi_nu(
    nu: usize,
    t: f64,
    eff: &EffectiveParams,
    model: &QuadraticModel,
    grid: Grid,
) -> Result<WaveFunction> {
    fock_state(nu, t, fock_c5(nu, eff, model), eff, model, grid)
}
