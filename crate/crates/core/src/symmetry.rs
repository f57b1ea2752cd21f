//! Intertwining and symmetry operators: the germ vector b(t), the fundamental
//! intertwiner between two associated linear equations, the ladder symmetry
//! operators that climb the exact family, and the displacement operator that
//! produces solutions localized around a moving phase orbit.
//!
//! Operator conventions. With K(t, C) = exp[-X d/dx] exp{(i/hbar)(S + P x)}
//! the fundamental intertwiner from constants `C` to constants `C'` is
//!
//! ```text
//! D(t, C', C) = exp{(i/(2 hbar)) dX0 dP0} K(t, C') exp{(i/hbar) b(t)} K^{-1}(t, C)
//! ```
//!
//! which is the identity at t = 0 whenever the first-moment constants agree.
//! Spatial translations are realized as spectral phase ramps, exact for
//! band-limited data.

use num_complex::Complex64;

use crate::closedform::{
    action_phase, cauchy_matrix, fock_c5, ground_c5, hermite, ladder_frame, MAX_NU,
};
use crate::error::{Error, Result};
use crate::grid::{Grid, WaveFunction};
use crate::model::{EffectiveParams, QuadraticModel};
use crate::moments::{hes_analytic_1d, ParamSet};
use crate::spectral::Spectral;

/// Solution of the germ system with initial value equal to the first-moment
/// offset between two orbits.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GermVector {
    pub b_p: f64,
    pub b_x: f64,
}

/// First-moment offsets at t = 0 between two constant sets:
/// dX0 = X0(C') - X0(C), dP0 = P0(C') - P0(C).
fn initial_offsets(
    c_from: &ParamSet,
    c_to: &ParamSet,
    eff: &EffectiveParams,
    model: &QuadraticModel,
) -> (f64, f64) {
    let dc1 = c_to.c1 - c_from.c1;
    let dc2 = c_to.c2 - c_from.c2;
    let dx0 = dc2;
    let dp0 = (eff.omega_bar * dc1 - model.rho * dc2) / model.mu;
    (dx0, dp0)
}

/// Germ vector b(t) = (1/mu) Cauchy(t) (Obar dC1 - rho dC2, mu dC2)^T, the
/// solution of db = J[Hzz + kt Wzz] b with b(0) = (dP0, dX0).
pub fn germ_vector(
    t: f64,
    c_from: &ParamSet,
    c_to: &ParamSet,
    eff: &EffectiveParams,
    model: &QuadraticModel,
) -> GermVector {
    let dc1 = c_to.c1 - c_from.c1;
    let dc2 = c_to.c2 - c_from.c2;
    let v = [(eff.omega_bar * dc1 - model.rho * dc2) / model.mu, dc2];
    let x = cauchy_matrix(t, eff, model);
    GermVector {
        b_p: x[0][0] * v[0] + x[0][1] * v[1],
        b_x: x[1][0] * v[0] + x[1][1] * v[1],
    }
}

/// Applies K(t, C): translate by X after impressing the action and momentum
/// phases.
fn apply_k(
    psi: &mut WaveFunction,
    sp: &Spectral,
    t: f64,
    c: &ParamSet,
    eff: &EffectiveParams,
    model: &QuadraticModel,
) {
    let orbit = hes_analytic_1d(t, c, eff, model);
    let action = action_phase(t, c, eff, model);
    let hbar = model.hbar;
    let grid = psi.grid();
    for (j, z) in psi.samples_mut().iter_mut().enumerate() {
        let x = grid.point(j);
        *z *= Complex64::from_polar(1.0, (action + orbit.p * x) / hbar);
    }
    sp.translate(psi, orbit.x);
}

/// Applies K^{-1}(t, C): undo the translation, then strip the phases.
fn apply_k_inverse(
    psi: &mut WaveFunction,
    sp: &Spectral,
    t: f64,
    c: &ParamSet,
    eff: &EffectiveParams,
    model: &QuadraticModel,
) {
    let orbit = hes_analytic_1d(t, c, eff, model);
    let action = action_phase(t, c, eff, model);
    let hbar = model.hbar;
    sp.translate(psi, -orbit.x);
    let grid = psi.grid();
    for (j, z) in psi.samples_mut().iter_mut().enumerate() {
        let x = grid.point(j);
        *z *= Complex64::from_polar(1.0, -(action + orbit.p * x) / hbar);
    }
}

/// Fundamental intertwiner: maps solutions of the associated linear equation
/// at `c_from` to solutions at `c_to`. Identity at t = 0 for equal
/// first-moment constants.
pub fn intertwiner_apply(
    phi: &WaveFunction,
    t: f64,
    c_from: &ParamSet,
    c_to: &ParamSet,
    eff: &EffectiveParams,
    model: &QuadraticModel,
) -> Result<WaveFunction> {
    phi.check_edges()?;
    let hbar = model.hbar;
    let sp = Spectral::for_wavefunction(phi);
    let mut out = phi.clone();

    apply_k_inverse(&mut out, &sp, t, c_from, eff, model);

    // exp{(i/hbar) b}: translate by -b_x, ramp by -b_p x/hbar, and the
    // Baker-Campbell-Hausdorff scalar -b_x b_p/(2 hbar).
    let b = germ_vector(t, c_from, c_to, eff, model);
    if b.b_x != 0.0 || b.b_p != 0.0 {
        sp.translate(&mut out, -b.b_x);
        let grid = out.grid();
        for (j, z) in out.samples_mut().iter_mut().enumerate() {
            let x = grid.point(j);
            *z *= Complex64::from_polar(1.0, -(b.b_p * x + 0.5 * b.b_x * b.b_p) / hbar);
        }
    }

    apply_k(&mut out, &sp, t, c_to, eff, model);

    let (dx0, dp0) = initial_offsets(c_from, c_to, eff, model);
    out.scale(Complex64::from_polar(1.0, 0.5 * dx0 * dp0 / hbar));

    out.check_edges_with(crate::grid::EDGE_NOISE_THRESHOLD)?;
    Ok(out)
}

/// Raising operator of the stationary ladder,
/// a+ psi = (1/sqrt(2 hbar)) [C*(t) p psi - B*(t) x psi], applied spectrally.
pub fn raise(
    psi: &WaveFunction,
    sp: &Spectral,
    t: f64,
    eff: &EffectiveParams,
    model: &QuadraticModel,
) -> WaveFunction {
    ladder_apply(psi, sp, t, eff, model, true)
}

/// Lowering operator of the stationary ladder,
/// a psi = (1/sqrt(2 hbar)) [C(t) p psi - B(t) x psi].
pub fn lower(
    psi: &WaveFunction,
    sp: &Spectral,
    t: f64,
    eff: &EffectiveParams,
    model: &QuadraticModel,
) -> WaveFunction {
    ladder_apply(psi, sp, t, eff, model, false)
}

fn ladder_apply(
    psi: &WaveFunction,
    sp: &Spectral,
    t: f64,
    eff: &EffectiveParams,
    model: &QuadraticModel,
    raising: bool,
) -> WaveFunction {
    let frame = ladder_frame(t, eff, model);
    let (cb, cc) = if raising { (frame.b.conj(), frame.c.conj()) } else { (frame.b, frame.c) };
    let scale = 1.0 / (2.0 * model.hbar).sqrt();
    // De-aliased momentum: repeated raises would otherwise amplify FFT
    // roundoff by k_max per pass through the momentum arm.
    let p_psi = sp.momentum_masked(psi, model.hbar, 0.5);
    let grid = psi.grid();
    let samples = (0..grid.len())
        .map(|j| scale * (cc * p_psi.samples()[j] - cb * grid.point(j) * psi.samples()[j]))
        .collect();
    WaveFunction::new(grid, samples).expect("ladder output on same grid")
}

/// Ladder symmetry operator: from the stationary ground solution it produces
/// the nu-th exact solution,
/// psi -> exp{(i/(2 hbar)) kt c (C5 - C5') t} (a+)^nu / sqrt(nu!) psi
/// with C5 = hbar mu/(2 Omega) and C5' = (hbar mu/Omega)(nu + 1/2).
pub fn ladder_symmetry_apply(
    psi: &WaveFunction,
    nu: usize,
    t: f64,
    eff: &EffectiveParams,
    model: &QuadraticModel,
) -> Result<WaveFunction> {
    if nu > MAX_NU {
        return Err(Error::OverflowRisk { nu, max: MAX_NU });
    }
    psi.check_edges()?;
    let sp = Spectral::for_wavefunction(psi);
    let mut out = psi.clone();
    let mut norm = 1.0;
    for k in 1..=nu {
        out = raise(&out, &sp, t, eff, model);
        norm *= k as f64;
    }
    let c5_gap = ground_c5(eff, model) - fock_c5(nu, eff, model);
    let phase = 0.5 * eff.kappa_tilde * model.c * c5_gap * t / model.hbar;
    out.scale(Complex64::from_polar(1.0 / norm.sqrt(), phase));
    out.check_edges_with(crate::grid::EDGE_NOISE_THRESHOLD)?;
    Ok(out)
}

/// Shift-operator data for a displacement alpha: the generator coefficients
/// beta(0), gamma(0) of exp{beta p + gamma x}, from
/// beta = [C*(t) a - C(t) a*]/sqrt(2 hbar), gamma = [B(t) a* - B*(t) a]/sqrt(2 hbar).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DisplacementParams {
    pub alpha: Complex64,
    pub beta0: Complex64,
    pub gamma0: Complex64,
}

/// Displacement data plus the fitted orbit constants of the displaced nu-th
/// family member:
///
/// ```text
/// C1 = sqrt(2 hbar mu Omega) Re(alpha) / Omega_bar
/// C2 = -sqrt(2 hbar mu / Omega) Im(alpha)
/// C5 = (hbar mu / (2 Omega)) (2 nu + 1),   C3 = C4 = 0
/// ```
pub fn displacement_params(
    alpha: Complex64,
    nu: usize,
    eff: &EffectiveParams,
    model: &QuadraticModel,
) -> (DisplacementParams, ParamSet) {
    let frame = ladder_frame(0.0, eff, model);
    let s = 1.0 / (2.0 * model.hbar).sqrt();
    let beta0 = s * (frame.c.conj() * alpha - frame.c * alpha.conj());
    let gamma0 = s * (frame.b * alpha.conj() - frame.b.conj() * alpha);

    let (hbar, mu) = (model.hbar, model.mu);
    let w = eff.omega;
    let c1 = (2.0 * hbar * mu * w).sqrt() * alpha.re / eff.omega_bar;
    let c2 = -(2.0 * hbar * mu / w).sqrt() * alpha.im;
    let c5 = hbar * mu / (2.0 * w) * (2.0 * nu as f64 + 1.0);
    (DisplacementParams { alpha, beta0, gamma0 }, ParamSet::new(c1, c2, 0.0, 0.0, c5))
}

/// Displaced exact solution: the nu-th family member carried around the phase
/// orbit selected by alpha,
///
/// ```text
/// psi(x, t) = e^{(i/(2 hbar)) P(0) X(0)}
///             e^{(i/hbar)(S(t,C) + P(t,C) dx)} phi_nu(dx, t),   dx = x - X(t,C)
/// ```
///
/// with C from [`displacement_params`]. For alpha = 0 this reduces exactly to
/// [`crate::closedform::exact_psi_nu`]. The constant phase pins the t = 0
/// slice to the literal expansion of the shift operator acting on the
/// stationary member.
pub fn displaced_solution(
    nu: usize,
    alpha: Complex64,
    t: f64,
    eff: &EffectiveParams,
    model: &QuadraticModel,
    grid: Grid,
) -> Result<WaveFunction> {
    let (_, c) = displacement_params(alpha, nu, eff, model);
    let mut psi = crate::closedform::ale_solution(nu, t, &c, eff, model, grid)?;
    let at0 = hes_analytic_1d(0.0, &c, eff, model);
    psi.scale(Complex64::from_polar(1.0, 0.5 * at0.p * at0.x / model.hbar));
    Ok(psi)
}

/// Analytic time derivative of [`displaced_solution`], from the chain rule
/// through X(t), P(t) and S(t). Used by the residual evaluator, where a
/// finite-difference derivative would waste most of the 1e-6 budget.
pub fn displaced_time_derivative(
    nu: usize,
    alpha: Complex64,
    t: f64,
    eff: &EffectiveParams,
    model: &QuadraticModel,
    grid: Grid,
) -> Result<WaveFunction> {
    if nu > MAX_NU {
        return Err(Error::OverflowRisk { nu, max: MAX_NU });
    }
    let (_, c) = displacement_params(alpha, nu, eff, model);
    let (hbar, mu, rho) = (model.hbar, model.mu, model.rho);
    let w = eff.omega;

    let orbit = hes_analytic_1d(t, &c, eff, model);
    let at0 = hes_analytic_1d(0.0, &c, eff, model);
    let action = action_phase(t, &c, eff, model);
    let action_dot = crate::closedform::action_rate(t, &c, eff, model);
    let x_dot = mu * orbit.p + rho * orbit.x;
    let p_dot = -rho * orbit.p - eff.sigma0 * orbit.x;

    let kappa_zeta = (w / (hbar * mu)).sqrt();
    let gauss_coef = 0.5 * w / (hbar * mu);
    let norm = (1.0 / (std::f64::consts::PI * hbar)).powf(0.25) * (w / mu).powf(0.25)
        / (1..=nu).fold(1.0, |acc, k| acc * k as f64).sqrt()
        / 2f64.powi(nu as i32).sqrt();
    let constant = Complex64::new(0.0, 1.0).powu(nu as u32)
        * Complex64::from_polar(norm, 0.5 * at0.p * at0.x / hbar);

    WaveFunction::from_fn(grid, |x| {
        let u = x - orbit.x;
        let zeta = Complex64::new(kappa_zeta * u, 0.0);
        let h = hermite(nu, zeta).expect("nu validated");
        let h_prev = if nu == 0 {
            Complex64::new(0.0, 0.0)
        } else {
            hermite(nu - 1, zeta).expect("nu validated")
        };
        let damp = (-gauss_coef * u * u).exp();
        let g = h * damp;
        let g_prime =
            (2.0 * nu as f64 * kappa_zeta * h_prev - 2.0 * gauss_coef * u * h) * damp;
        let phase = -0.5 * rho / (hbar * mu) * u * u - w * (nu as f64 + 0.5) * t
            + (action + orbit.p * u) / hbar;
        let dphase_dt = -w * (nu as f64 + 0.5) + (action_dot + p_dot * u) / hbar;
        let dphase_du = -rho / (hbar * mu) * u + orbit.p / hbar;
        let deriv = -x_dot * g_prime
            + g * Complex64::new(0.0, dphase_dt - x_dot * dphase_du);
        constant * deriv * Complex64::from_polar(1.0, phase)
    })
}

/// Direct expansion of the shift operator on the stationary member at t = 0:
/// exp{-i hbar beta0 gamma0 / 2} e^{gamma0 x} Phi_nu(x - i hbar beta0).
/// Exercises the complex-argument Hermite evaluation; equal to
/// [`displaced_solution`] at t = 0.
pub fn displaced_initial_direct(
    nu: usize,
    alpha: Complex64,
    eff: &EffectiveParams,
    model: &QuadraticModel,
    grid: Grid,
) -> Result<WaveFunction> {
    if nu > MAX_NU {
        return Err(Error::OverflowRisk { nu, max: MAX_NU });
    }
    let (dp, _) = displacement_params(alpha, nu, eff, model);
    let (hbar, mu, rho) = (model.hbar, model.mu, model.rho);
    let w = eff.omega;
    let shift = Complex64::new(0.0, hbar) * dp.beta0; // i hbar beta0, real for real beta vanishing
    let w_cplx = Complex64::new(-rho, w) / mu;
    let norm = (1.0 / (std::f64::consts::PI * hbar)).powf(0.25) * (w / mu).powf(0.25)
        / (1..=nu).fold(1.0, |acc, k| acc * k as f64).sqrt()
        / 2f64.powi(nu as i32).sqrt();
    let i_pow = Complex64::new(0.0, 1.0).powu(nu as u32);
    let front = (Complex64::new(0.0, -0.5 * hbar) * dp.beta0 * dp.gamma0).exp();
    let zeta_scale = (w / (hbar * mu)).sqrt();
    let psi = WaveFunction::from_fn(grid, |x| {
        let u = Complex64::new(x, 0.0) - shift;
        let herm = hermite(nu, zeta_scale * u).expect("nu validated");
        let gauss = (Complex64::new(0.0, 0.5 / hbar) * w_cplx * u * u).exp();
        front * (dp.gamma0 * x).exp() * i_pow * norm * herm * gauss
    })?;
    psi.check_edges()?;
    Ok(psi)
}
