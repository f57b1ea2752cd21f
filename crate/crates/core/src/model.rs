//! Model parameters of the 1D quadratic nonlocal equation and the derived
//! effective quantities that control the localized regime.
//!
//! The one-body part is (1/2)(mu p^2 + rho (x p + p x) + sigma x^2); the
//! nonlocal kernel is (1/2)(a x^2 + 2 b x y + c y^2) weighted by |psi(y)|^2
//! and the coupling kappa. Everything downstream works with the effective
//! combinations
//!
//! ```text
//! kappa_tilde = kappa * ||psi||^2
//! sigma0      = sigma + kappa_tilde (a + b)
//! sigma_tilde = sigma + kappa_tilde a
//! Omega_bar   = sqrt(sigma0 * mu - rho^2)      (first-moment frequency)
//! Omega       = sqrt(sigma_tilde * mu - rho^2) (width/germ frequency)
//! ```
//!
//! Both radicands must be strictly positive for the wave packets to stay
//! localized; otherwise every operation here refuses to run.

use crate::error::{Error, Result};

/// Physical/model parameters of the 1D reduced equation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadraticModel {
    /// Kinetic coefficient mu.
    pub mu: f64,
    /// Cross-term coefficient rho in (x p + p x)/2 units.
    pub rho: f64,
    /// Local quadratic potential coefficient sigma.
    pub sigma: f64,
    /// Nonlocal kernel coefficient of x^2.
    pub a: f64,
    /// Nonlocal kernel coefficient of the cross term x*y.
    pub b: f64,
    /// Nonlocal kernel coefficient of y^2.
    pub c: f64,
    /// Nonlinearity strength kappa.
    pub kappa: f64,
    /// Semiclassical parameter hbar (> 0).
    pub hbar: f64,
}

impl QuadraticModel {
    pub fn new(
        mu: f64,
        rho: f64,
        sigma: f64,
        a: f64,
        b: f64,
        c: f64,
        kappa: f64,
        hbar: f64,
    ) -> Result<Self> {
        if !(hbar > 0.0) || !hbar.is_finite() {
            return Err(Error::InvalidConfig(format!("hbar must be > 0, got {hbar}")));
        }
        if !(mu > 0.0) {
            return Err(Error::InvalidConfig(format!("mu must be > 0, got {mu}")));
        }
        let m = Self { mu, rho, sigma, a, b, c, kappa, hbar };
        for (name, v) in [
            ("mu", mu),
            ("rho", rho),
            ("sigma", sigma),
            ("a", a),
            ("b", b),
            ("c", c),
            ("kappa", kappa),
        ] {
            if !v.is_finite() {
                return Err(Error::InvalidConfig(format!("{name} must be finite, got {v}")));
            }
        }
        Ok(m)
    }

    /// Linear harmonic reference model (mu = sigma = hbar = 1, all couplings off).
    pub fn harmonic() -> Self {
        Self { mu: 1.0, rho: 0.0, sigma: 1.0, a: 0.0, b: 0.0, c: 0.0, kappa: 0.0, hbar: 1.0 }
    }
}

/// Effective quantities derived from a [`QuadraticModel`] and the squared
/// norm of the initial state. All fields are frozen once computed: the norm
/// is conserved by the flow, so `kappa_tilde` never drifts.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EffectiveParams {
    pub kappa_tilde: f64,
    pub sigma0: f64,
    pub sigma_tilde: f64,
    pub omega_bar: f64,
    pub omega: f64,
}

/// Builds the effective parameters, rejecting any non-oscillatory regime.
///
/// Radicands at or below zero are errors, not values to clamp: clamping
/// would silently change the oscillation frequencies.
pub fn derive_effective(model: &QuadraticModel, norm_sq: f64) -> Result<EffectiveParams> {
    if !(norm_sq > 0.0) {
        return Err(Error::InvalidConfig(format!("norm_sq must be > 0, got {norm_sq}")));
    }
    derive_effective_frozen(model, model.kappa * norm_sq)
}

/// Same as [`derive_effective`] but with `kappa_tilde` supplied directly.
/// Used when a previously frozen value must be carried through (or, in
/// diagnostics, deliberately mismatched).
pub fn derive_effective_frozen(model: &QuadraticModel, kappa_tilde: f64) -> Result<EffectiveParams> {
    let sigma0 = model.sigma + kappa_tilde * (model.a + model.b);
    let sigma_tilde = model.sigma + kappa_tilde * model.a;
    let r_bar = sigma0 * model.mu - model.rho * model.rho;
    let r = sigma_tilde * model.mu - model.rho * model.rho;
    if r_bar <= 0.0 {
        return Err(Error::NonOscillatoryRegime { symbol: "Omega_bar", radicand: r_bar });
    }
    if r <= 0.0 {
        return Err(Error::NonOscillatoryRegime { symbol: "Omega", radicand: r });
    }
    Ok(EffectiveParams {
        kappa_tilde,
        sigma0,
        sigma_tilde,
        omega_bar: r_bar.sqrt(),
        omega: r.sqrt(),
    })
}

impl EffectiveParams {
    /// Natural width of the germ Gaussian, sqrt(hbar mu / Omega).
    pub fn gaussian_width(&self, model: &QuadraticModel) -> f64 {
        (model.hbar * model.mu / self.omega).sqrt()
    }
}
