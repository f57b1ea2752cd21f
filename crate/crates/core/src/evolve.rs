//! Independent verification engine: a split-step spectral integrator of the
//! full 1D nonlocal equation, a discrete residual evaluator for candidate
//! solutions, and moment-trajectory comparison.
//!
//! The integrator treats the quadratic one-body part
//! (mu p^2/2 + sigma_tilde x^2/2 + rho(xp+px)/2) *exactly* per step through
//! the lens-drift-lens factorization of its propagator (the cross term rho
//! commutes with neither split half, so it is absorbed into the exact step
//! instead of being sub-split). Only the moment-dependent nonlocal pieces -
//! a phase linear in x and a global scalar - are applied as pointwise
//! half-step phases around it, with the moments refreshed after the exact
//! step so the sandwich stays second-order accurate.

use num_complex::Complex64;

use crate::closedform::cauchy_matrix;
use crate::error::{Error, Result};
use crate::grid::{Grid, WaveFunction};
use crate::model::{EffectiveParams, QuadraticModel};
use crate::moments::{
    fit_constants, hes_analytic_1d, moments_from_wavefunction, moments_with_spectral, ParamSet,
};
use crate::spectral::{lens, Spectral};

/// Norm drift (relative) above which a run aborts: any correct configuration
/// stays below 1e-10, so larger drift signals misconfiguration.
pub const NORM_DRIFT_LIMIT: f64 = 1e-4;

/// Step size, horizon and snapshot cadence of one evolution run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvolutionConfig {
    pub dt: f64,
    pub t_final: f64,
    pub record_every: usize,
}

impl EvolutionConfig {
    /// Checks the structural invariants against the grid the run will use:
    /// positive step and horizon, and the kinetic-phase aliasing guard
    /// dt k_max^2 mu hbar / 2 < pi.
    pub fn validate(
        &self,
        grid: Grid,
        model: &QuadraticModel,
        eff: &EffectiveParams,
    ) -> Result<()> {
        if !(self.dt > 0.0) || !self.dt.is_finite() {
            return Err(Error::InvalidConfig(format!("dt must be > 0, got {}", self.dt)));
        }
        if !(self.t_final >= 0.0) || !self.t_final.is_finite() {
            return Err(Error::InvalidConfig(format!(
                "t_final must be >= 0, got {}",
                self.t_final
            )));
        }
        if self.record_every == 0 {
            return Err(Error::InvalidConfig("record_every must be positive".into()));
        }
        let k_max = std::f64::consts::PI / grid.step();
        let kinetic_phase = self.dt * k_max * k_max * model.mu * model.hbar / 2.0;
        if kinetic_phase >= std::f64::consts::PI {
            return Err(Error::InvalidConfig(format!(
                "kinetic phase per step {kinetic_phase:.3} exceeds pi; shrink dt or coarsen the grid"
            )));
        }
        // the exact quadratic step factorizes only below half an oscillation
        if eff.omega * self.dt >= 0.5 {
            return Err(Error::InvalidConfig(format!(
                "Omega dt = {:.3} too large for the exact quadratic step",
                eff.omega * self.dt
            )));
        }
        Ok(())
    }
}

/// Snapshot sequence plus run diagnostics.
#[derive(Debug, Clone)]
pub struct EvolutionOutput {
    /// (time, state) pairs: t = 0, every `record_every`-th step, and the
    /// final step.
    pub snapshots: Vec<(f64, WaveFunction)>,
    /// Largest relative norm deviation observed over the run.
    pub max_norm_drift: f64,
    pub steps: usize,
    /// Effective parameters the run derived from its own initial state.
    pub eff_used: EffectiveParams,
}

/// Checks a running norm against the initial one; aborts on drift beyond
/// [`NORM_DRIFT_LIMIT`].
pub fn check_norm_drift(norm_sq_initial: f64, norm_sq_now: f64) -> Result<f64> {
    let drift = (norm_sq_now / norm_sq_initial - 1.0).abs();
    if drift > NORM_DRIFT_LIMIT {
        Err(Error::Unstable { drift, limit: NORM_DRIFT_LIMIT })
    } else {
        Ok(drift)
    }
}

/// Strang-split evolution of the full nonlocal equation.
///
/// The run freezes its own interaction strength kappa_tilde = kappa ||psi0||^2
/// (the norm is conserved, so the physical value never changes) - it does not
/// trust any externally frozen value, which is what lets it expose a
/// mismatched one. The nonlocal term is evaluated through the evolving
/// x-moments of the state:
/// V(x) = kt b <x> x + (kt c / 2)(D22 + <x>^2) plus the kt a x^2/2 piece
/// already inside sigma_tilde.
pub fn split_step_evolve(
    psi0: &WaveFunction,
    cfg: &EvolutionConfig,
    model: &QuadraticModel,
) -> Result<EvolutionOutput> {
    psi0.check_edges()?;
    let norm_sq_initial = psi0.norm_sq();
    let eff = &crate::model::derive_effective(model, norm_sq_initial)?;
    cfg.validate(psi0.grid(), model, eff)?;

    let grid = psi0.grid();
    let sp = Spectral::new(grid.len(), grid.step());
    let hbar = model.hbar;
    let steps = (cfg.t_final / cfg.dt).round() as usize;

    // exact one-body quadratic step over dt, factored lens-drift-lens
    let x_matrix = cauchy_matrix(cfg.dt, eff, model);
    let drift_f = x_matrix[1][0];
    let lens_g1 = (1.0 - x_matrix[1][1]) / drift_f;
    let lens_g2 = (1.0 - x_matrix[0][0]) / drift_f;

    let mut psi = psi0.clone();
    let mut max_drift = 0.0f64;
    let mut snapshots = vec![(0.0, psi.clone())];

    let half_phase = |state: &mut WaveFunction, x_mean: f64, d22: f64| {
        let kt = eff.kappa_tilde;
        let scalar = 0.5 * kt * model.c * (d22 + x_mean * x_mean);
        let linear = kt * model.b * x_mean;
        let factor = -0.5 * cfg.dt / hbar;
        let g = state.grid();
        for (j, z) in state.samples_mut().iter_mut().enumerate() {
            let x = g.point(j);
            *z *= Complex64::from_polar(1.0, factor * (linear * x + scalar));
        }
    };

    let x_moments = |state: &WaveFunction| {
        let norm_sq = state.norm_sq();
        let x1 = state.integrate(|x, z| Complex64::new(x * z.norm_sqr(), 0.0)).re / norm_sq;
        let x2 = state.integrate(|x, z| Complex64::new(x * x * z.norm_sqr(), 0.0)).re / norm_sq;
        (x1, x2 - x1 * x1, norm_sq)
    };

    let (mut x_mean, mut d22, _) = x_moments(&psi);
    for step in 1..=steps {
        half_phase(&mut psi, x_mean, d22);
        lens(&mut psi, lens_g1, hbar);
        sp.drift(&mut psi, drift_f, hbar);
        lens(&mut psi, lens_g2, hbar);
        let (x1, v, norm_sq) = x_moments(&psi);
        x_mean = x1;
        d22 = v;
        half_phase(&mut psi, x_mean, d22);

        max_drift = max_drift.max(check_norm_drift(norm_sq_initial, norm_sq)?);
        psi.check_edges()?;
        if step % cfg.record_every == 0 || step == steps {
            snapshots.push((step as f64 * cfg.dt, psi.clone()));
        }
    }

    Ok(EvolutionOutput { snapshots, max_norm_drift: max_drift, steps, eff_used: *eff })
}

/// A candidate solution indexed by time. Closed-form families provide their
/// analytic time derivative; everything else falls back to central
/// differences.
pub trait TimeIndexed {
    fn at(&self, t: f64) -> Result<WaveFunction>;

    fn time_derivative(&self, _t: f64) -> Option<Result<WaveFunction>> {
        None
    }
}

/// The nu-th exact stationary-orbit solution as a residual candidate.
#[derive(Debug, Clone, Copy)]
pub struct ExactFamily {
    pub nu: usize,
    pub eff: EffectiveParams,
    pub model: QuadraticModel,
    pub grid: Grid,
}

impl TimeIndexed for ExactFamily {
    fn at(&self, t: f64) -> Result<WaveFunction> {
        crate::closedform::exact_psi_nu(self.nu, t, &self.eff, &self.model, self.grid)
    }

    fn time_derivative(&self, t: f64) -> Option<Result<WaveFunction>> {
        // the whole time dependence is one linear phase
        let rate = crate::closedform::psi_nu_phase_rate(self.nu, &self.eff, &self.model);
        Some(self.at(t).map(|mut psi| {
            psi.scale(Complex64::new(0.0, -rate));
            psi
        }))
    }
}

/// The displaced family member as a residual candidate.
#[derive(Debug, Clone, Copy)]
pub struct DisplacedFamily {
    pub nu: usize,
    pub alpha: Complex64,
    pub eff: EffectiveParams,
    pub model: QuadraticModel,
    pub grid: Grid,
}

impl TimeIndexed for DisplacedFamily {
    fn at(&self, t: f64) -> Result<WaveFunction> {
        crate::symmetry::displaced_solution(self.nu, self.alpha, t, &self.eff, &self.model, self.grid)
    }

    fn time_derivative(&self, t: f64) -> Option<Result<WaveFunction>> {
        Some(crate::symmetry::displaced_time_derivative(
            self.nu, self.alpha, t, &self.eff, &self.model, self.grid,
        ))
    }
}

/// A time-independent state (negative controls): d psi/dt = 0.
#[derive(Debug, Clone)]
pub struct StaticState(pub WaveFunction);

impl TimeIndexed for StaticState {
    fn at(&self, _t: f64) -> Result<WaveFunction> {
        Ok(self.0.clone())
    }

    fn time_derivative(&self, _t: f64) -> Option<Result<WaveFunction>> {
        let mut zero = self.0.clone();
        for z in zero.samples_mut() {
            *z = Complex64::new(0.0, 0.0);
        }
        Some(Ok(zero))
    }
}

impl<F> TimeIndexed for F
where
    F: Fn(f64) -> Result<WaveFunction>,
{
    fn at(&self, t: f64) -> Result<WaveFunction> {
        self(t)
    }
}

/// Finite-difference step of the fallback time derivative.
pub const FD_TIME_STEP: f64 = 1e-6;

fn time_derivative_of(candidate: &dyn TimeIndexed, t: f64) -> Result<WaveFunction> {
    if let Some(d) = candidate.time_derivative(t) {
        return d;
    }
    let plus = candidate.at(t + FD_TIME_STEP)?;
    let minus = candidate.at(t - FD_TIME_STEP)?;
    let scale = 0.5 / FD_TIME_STEP;
    let samples = plus
        .samples()
        .iter()
        .zip(minus.samples())
        .map(|(p, m)| (p - m) * scale)
        .collect();
    WaveFunction::new(plus.grid(), samples)
}

/// Applies the full nonlinear spatial operator H psi + kappa V(psi) psi with
/// the nonlocal term evaluated from the candidate's own raw moments
/// (integral dy (a x^2 + 2 b x y + c y^2) |psi(y)|^2).
pub fn gpe_apply(psi: &WaveFunction, model: &QuadraticModel, sp: &Spectral) -> WaveFunction {
    let hbar = model.hbar;
    let i0 = psi.norm_sq();
    let i1 = psi.integrate(|x, z| Complex64::new(x * z.norm_sqr(), 0.0)).re;
    let i2 = psi.integrate(|x, z| Complex64::new(x * x * z.norm_sqr(), 0.0)).re;

    let p_psi = sp.momentum(psi, hbar);
    let p2_psi = sp.momentum_sq(psi, hbar);
    let grid = psi.grid();
    let samples = (0..grid.len())
        .map(|j| {
            let x = grid.point(j);
            let z = psi.samples()[j];
            let kinetic = 0.5 * model.mu * p2_psi.samples()[j];
            // rho (x p + p x)/2 = rho (x p - i hbar/2)
            let cross = model.rho
                * (x * p_psi.samples()[j] - Complex64::new(0.0, 0.5 * hbar) * z);
            let local = 0.5 * model.sigma * x * x * z;
            let nonlocal = 0.5
                * model.kappa
                * (model.a * x * x * i0 + 2.0 * model.b * x * i1 + model.c * i2)
                * z;
            kinetic + cross + local + nonlocal
        })
        .collect();
    WaveFunction::new(grid, samples).expect("same grid")
}

/// Applies the associated linear operator at constants C:
/// mu p^2/2 + sigma_tilde x^2/2 + rho(xp+px)/2 + kt b x X(t,C)
/// + (kt c/2)(X^2(t,C) + D22(t,C)).
pub fn ale_apply(
    psi: &WaveFunction,
    t: f64,
    c: &ParamSet,
    eff: &EffectiveParams,
    model: &QuadraticModel,
    sp: &Spectral,
) -> WaveFunction {
    let hbar = model.hbar;
    let orbit = hes_analytic_1d(t, c, eff, model);
    let kt = eff.kappa_tilde;
    let scalar = 0.5 * kt * model.c * (orbit.x * orbit.x + orbit.d22);
    let linear = kt * model.b * orbit.x;

    let p_psi = sp.momentum(psi, hbar);
    let p2_psi = sp.momentum_sq(psi, hbar);
    let grid = psi.grid();
    let samples = (0..grid.len())
        .map(|j| {
            let x = grid.point(j);
            let z = psi.samples()[j];
            0.5 * model.mu * p2_psi.samples()[j]
                + model.rho * (x * p_psi.samples()[j] - Complex64::new(0.0, 0.5 * hbar) * z)
                + (0.5 * eff.sigma_tilde * x * x + linear * x + scalar) * z
        })
        .collect();
    WaveFunction::new(grid, samples).expect("same grid")
}

/// Per-component absolute moment errors.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentErrors {
    pub p: f64,
    pub x: f64,
    pub d11: f64,
    pub d12: f64,
    pub d22: f64,
}

impl MomentErrors {
    pub fn zero() -> Self {
        Self { p: 0.0, x: 0.0, d11: 0.0, d12: 0.0, d22: 0.0 }
    }

    pub fn max(&self) -> f64 {
        self.p.max(self.x).max(self.d11).max(self.d12).max(self.d22)
    }

    fn update(&mut self, got: &crate::moments::MomentState, want: &crate::moments::MomentState) {
        self.p = self.p.max((got.p - want.p).abs());
        self.x = self.x.max((got.x - want.x).abs());
        self.d11 = self.d11.max((got.d11 - want.d11).abs());
        self.d12 = self.d12.max((got.d12 - want.d12).abs());
        self.d22 = self.d22.max((got.d22 - want.d22).abs());
    }
}

/// Residual diagnostics of one candidate at one time.
#[derive(Debug, Clone, Copy)]
pub struct ResidualReport {
    /// || -i hbar dpsi/dt + H psi + kappa V(psi) psi || / ||psi||.
    pub relative_residual: f64,
    /// Relative norm deviation from the t = 0 slice.
    pub norm_drift: f64,
    /// Moments at t against the analytic orbit fitted at t = 0.
    pub moment_errors: MomentErrors,
}

/// Evaluates the discrete residual of a candidate solution at time `t`.
pub fn residual(
    candidate: &dyn TimeIndexed,
    t: f64,
    model: &QuadraticModel,
    eff: &EffectiveParams,
) -> Result<ResidualReport> {
    let psi = candidate.at(t)?;
    psi.check_edges()?;
    let sp = Spectral::for_wavefunction(&psi);
    let dpsi = time_derivative_of(candidate, t)?;
    let h_psi = gpe_apply(&psi, model, &sp);

    let grid = psi.grid();
    let mut defect = 0.0;
    let n = grid.len();
    for j in 0..n {
        let f = Complex64::new(0.0, -model.hbar) * dpsi.samples()[j] + h_psi.samples()[j];
        let w = if j == 0 || j == n - 1 { 0.5 } else { 1.0 };
        defect += w * f.norm_sqr();
    }
    let norm = psi.norm();
    let relative_residual = (defect * grid.step()).sqrt() / norm;

    let psi0 = candidate.at(0.0)?;
    let norm_sq0 = psi0.norm_sq();
    let norm_drift = (psi.norm_sq() / norm_sq0 - 1.0).abs();

    let (m0, _) = moments_from_wavefunction(&psi0, model)?;
    let c = fit_constants(&m0, eff, model)?;
    let want = hes_analytic_1d(t, &c, eff, model);
    let (got, _) = moments_from_wavefunction(&psi, model)?;
    let mut moment_errors = MomentErrors::zero();
    moment_errors.update(&got, &want);

    Ok(ResidualReport { relative_residual, norm_drift, moment_errors })
}

/// Relative residual of a candidate against the associated linear equation at
/// constants C. The time derivative falls back to central differences, so
/// intertwined images need no analytic derivative.
pub fn ale_residual(
    candidate: &dyn TimeIndexed,
    t: f64,
    c: &ParamSet,
    eff: &EffectiveParams,
    model: &QuadraticModel,
) -> Result<f64> {
    let psi = candidate.at(t)?;
    let sp = Spectral::for_wavefunction(&psi);
    let dpsi = time_derivative_of(candidate, t)?;
    let h_psi = ale_apply(&psi, t, c, eff, model, &sp);
    let grid = psi.grid();
    let mut defect = 0.0;
    let n = grid.len();
    for j in 0..n {
        let f = Complex64::new(0.0, -model.hbar) * dpsi.samples()[j] + h_psi.samples()[j];
        let w = if j == 0 || j == n - 1 { 0.5 } else { 1.0 };
        defect += w * f.norm_sqr();
    }
    Ok((defect * grid.step()).sqrt() / psi.norm())
}

/// Max per-component deviation of the evolved moments from the analytic
/// orbit at constants C, over all recorded snapshots.
pub fn compare_moments(
    snapshots: &[(f64, WaveFunction)],
    c: &ParamSet,
    eff: &EffectiveParams,
    model: &QuadraticModel,
) -> Result<MomentErrors> {
    let mut errors = MomentErrors::zero();
    if snapshots.is_empty() {
        return Ok(errors);
    }
    let sp = Spectral::for_wavefunction(&snapshots[0].1);
    for (t, psi) in snapshots {
        let norm_sq = psi.norm_sq();
        let (got, _) = moments_with_spectral(psi, model, &sp, norm_sq);
        let want = hes_analytic_1d(*t, c, eff, model);
        errors.update(&got, &want);
    }
    Ok(errors)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::closedform::exact_psi_nu;
    use crate::model::derive_effective;
    use crate::moments::integrate_hes_numeric;
    use crate::symmetry::{displaced_solution, displacement_params};
    use approx::assert_abs_diff_eq;

    fn generic_model() -> (QuadraticModel, EffectiveParams) {
        let m = QuadraticModel::new(1.0, 0.2, 1.3, 0.4, 0.3, 0.8, 0.5, 1.0).unwrap();
        let eff = derive_effective(&m, 1.0).unwrap();
        (m, eff)
    }

    #[test]
    fn config_validation_guards_kinetic_phase() {
        let (m, eff) = generic_model();
        let grid = Grid::for_model(&m, &eff, 0, 0.0).unwrap();
        let bad = EvolutionConfig { dt: 1.0, t_final: 1.0, record_every: 1 };
        assert!(matches!(bad.validate(grid, &m, &eff), Err(Error::InvalidConfig(_))));
        let good = EvolutionConfig { dt: 2e-4, t_final: 1.0, record_every: 100 };
        good.validate(grid, &m, &eff).unwrap();
    }

    #[test]
    fn norm_drift_guard_fires() {
        assert!(check_norm_drift(1.0, 1.0 + 2e-5).is_ok());
        assert!(matches!(
            check_norm_drift(1.0, 1.001),
            Err(Error::Unstable { .. })
        ));
    }

    #[test]
    fn displaced_analytic_derivative_matches_finite_differences() {
        let (m, eff) = generic_model();
        let alpha = Complex64::new(0.4, -0.5);
        let nu = 2usize;
        let (_, c) = displacement_params(alpha, nu, &eff, &m);
        let orbit_amp = (c.c1 * c.c1 + c.c2 * c.c2).sqrt();
        let grid = Grid::for_model(&m, &eff, nu, orbit_amp).unwrap();
        let t = 0.9;
        let h = 1e-6;
        let plus = displaced_solution(nu, alpha, t + h, &eff, &m, grid).unwrap();
        let minus = displaced_solution(nu, alpha, t - h, &eff, &m, grid).unwrap();
        let analytic =
            crate::symmetry::displaced_time_derivative(nu, alpha, t, &eff, &m, grid).unwrap();
        for (j, a) in analytic.samples().iter().enumerate() {
            let fd = (plus.samples()[j] - minus.samples()[j]) / (2.0 * h);
            assert!((a - fd).norm() <= 1e-7, "j={j}: analytic {a}, fd {fd}");
        }
    }

    #[test]
    fn exact_family_residual_is_small() {
        let (m, eff) = generic_model();
        let grid = Grid::for_model(&m, &eff, 3, 0.0).unwrap();
        for nu in 0..=3usize {
            let fam = ExactFamily { nu, eff, model: m, grid };
            for &t in &[0.0, 0.7, 2.9] {
                let rep = residual(&fam, t, &m, &eff).unwrap();
                assert!(
                    rep.relative_residual <= 1e-6,
                    "nu={nu} t={t}: residual {}",
                    rep.relative_residual
                );
                assert!(rep.norm_drift <= 1e-10);
                assert!(rep.moment_errors.max() <= 1e-7);
            }
        }
    }

    #[test]
    fn displaced_family_residual_is_small() {
        let (m, eff) = generic_model();
        let alpha = Complex64::new(0.5, 0.5);
        for nu in 0..=2usize {
            let (_, c) = displacement_params(alpha, nu, &eff, &m);
            let orbit_amp = (c.c1 * c.c1 + c.c2 * c.c2).sqrt();
            let grid = Grid::for_model(&m, &eff, nu, orbit_amp).unwrap();
            let fam = DisplacedFamily { nu, alpha, eff, model: m, grid };
            for &t in &[0.0, 0.9, 2.3] {
                let rep = residual(&fam, t, &m, &eff).unwrap();
                assert!(
                    rep.relative_residual <= 1e-6,
                    "nu={nu} t={t}: residual {}",
                    rep.relative_residual
                );
            }
        }
    }

    #[test]
    fn negative_control_has_large_residual() {
        let (m, eff) = generic_model();
        let grid = Grid::for_model(&m, &eff, 0, 1.0).unwrap();
        // off-center, wrong-width Gaussian: not a solution
        let psi = WaveFunction::from_fn(grid, |x| {
            Complex64::new((-1.7 * (x - 0.4) * (x - 0.4)).exp(), 0.0)
        })
        .unwrap();
        let rep = residual(&StaticState(psi), 0.0, &m, &eff).unwrap();
        assert!(rep.relative_residual > 1e-2, "residual {}", rep.relative_residual);
    }

    #[test]
    fn stationary_family_keeps_density_and_norm() {
        let (m, eff) = generic_model();
        let grid = Grid::for_model(&m, &eff, 0, 0.0).unwrap();
        let psi0 = exact_psi_nu(0, 0.0, &eff, &m, grid).unwrap();
        let horizon = 10.0 / eff.omega;
        let cfg = EvolutionConfig { dt: 2e-4, t_final: horizon, record_every: 5000 };
        let out = split_step_evolve(&psi0, &cfg, &m).unwrap();
        assert!(out.max_norm_drift <= 1e-10, "norm drift {}", out.max_norm_drift);
        for (t, psi) in &out.snapshots {
            for (a, b) in psi.samples().iter().zip(psi0.samples()) {
                assert!(
                    (a.norm_sqr() - b.norm_sqr()).abs() <= 1e-6,
                    "density drift at t={t}"
                );
            }
        }
    }

    #[test]
    fn evolved_moments_follow_the_analytic_orbit() {
        let (m, eff) = generic_model();
        // an admissible state that is no family member: displaced squeezed
        // Gaussian with a width 30% off the stationary one
        let w = eff.gaussian_width(&m);
        // wider than any family member: size the box for the fat tail
        let grid = Grid::symmetric(12.0, 512).unwrap();
        let width = 1.3 * w;
        let psi0 = WaveFunction::from_fn(grid, |x| {
            let u = x - 0.6;
            Complex64::from_polar(
                (-0.5 * u * u / (width * width)).exp(),
                0.4 * x / m.hbar,
            )
        })
        .unwrap();
        let (m0, norm_sq) = moments_from_wavefunction(&psi0, &m).unwrap();
        // effective parameters belong to this state's norm, not unit norm
        let eff_run = derive_effective(&m, norm_sq).unwrap();
        let c = fit_constants(&m0, &eff_run, &m).unwrap();
        let cfg = EvolutionConfig { dt: 2e-4, t_final: 6.0, record_every: 400 };
        let out = split_step_evolve(&psi0, &cfg, &m).unwrap();
        assert!((out.eff_used.kappa_tilde - eff_run.kappa_tilde).abs() <= 1e-12);
        let errs = compare_moments(&out.snapshots, &c, &eff_run, &m).unwrap();
        assert!(errs.max() <= 1e-5, "moment errors {errs:?}");

        // and the numeric HES integrator agrees with the same snapshots
        let times: Vec<f64> = out.snapshots.iter().map(|(t, _)| *t).collect();
        let numeric = integrate_hes_numeric(&m0, &times, 1e-3, &eff_run, &m).unwrap();
        let sp = Spectral::for_wavefunction(&psi0);
        for ((_, psi), (_, want)) in out.snapshots.iter().zip(numeric) {
            let (got, _) = moments_with_spectral(psi, &m, &sp, psi.norm_sq());
            assert_abs_diff_eq!(got.p, want.p, epsilon = 1e-5);
            assert_abs_diff_eq!(got.x, want.x, epsilon = 1e-5);
            assert_abs_diff_eq!(got.d22, want.d22, epsilon = 1e-5);
        }
    }

    #[test]
    fn squeezed_widths_oscillate_at_twice_omega_without_coupling() {
        // kappa = 0: second moments of a squeezed Gaussian follow the
        // analytic 2-Omega oscillation
        let m = QuadraticModel::harmonic();
        let grid = Grid::symmetric(13.0, 512).unwrap();
        let width = 1.4;
        let psi0 = WaveFunction::from_fn(grid, |x| {
            Complex64::new((-0.5 * x * x / (width * width)).exp(), 0.0)
        })
        .unwrap();
        let (m0, norm_sq) = moments_from_wavefunction(&psi0, &m).unwrap();
        let eff_run = derive_effective(&m, norm_sq).unwrap();
        let c = fit_constants(&m0, &eff_run, &m).unwrap();
        // squeezing present: the oscillating constants are nonzero
        assert!(c.c4.abs() > 1e-3);
        let cfg = EvolutionConfig { dt: 2e-4, t_final: std::f64::consts::PI, record_every: 300 };
        let out = split_step_evolve(&psi0, &cfg, &m).unwrap();
        let errs = compare_moments(&out.snapshots, &c, &eff_run, &m).unwrap();
        assert!(errs.max() <= 1e-5, "moment errors {errs:?}");
    }

    #[test]
    fn split_step_converges_at_second_order() {
        let (m, eff) = generic_model();
        let alpha = Complex64::new(0.4, 0.3);
        let (_, c) = displacement_params(alpha, 0, &eff, &m);
        let orbit_amp = (c.c1 * c.c1 + c.c2 * c.c2).sqrt();
        let grid = Grid::for_model(&m, &eff, 0, orbit_amp).unwrap();
        let psi0 = displaced_solution(0, alpha, 0.0, &eff, &m, grid).unwrap();
        let t_final = 1.2;
        let run = |dt: f64| {
            let cfg = EvolutionConfig { dt, t_final, record_every: usize::MAX };
            split_step_evolve(&psi0, &cfg, &m).unwrap().snapshots.pop().unwrap().1
        };
        let reference = run(7.5e-5);
        let err = |dt: f64| run(dt).distance(&reference);
        let ratio = err(6e-4) / err(3e-4);
        assert!(
            ratio > 3.0 && ratio < 5.5,
            "second-order convergence ratio {ratio}"
        );
    }

    #[test]
    fn packet_walking_off_the_grid_raises_edge_leak() {
        let (m, _) = generic_model();
        let eff = derive_effective(&m, 1.0).unwrap();
        // real alpha: the packet starts centered with a momentum kick and
        // swings out to an amplitude the grid does not cover
        let alpha = Complex64::new(1.5, 0.0);
        let (_, c) = displacement_params(alpha, 0, &eff, &m);
        let orbit_amp = (c.c1 * c.c1 + c.c2 * c.c2).sqrt();
        let grid = Grid::for_model(&m, &eff, 0, 0.3 * orbit_amp).unwrap();
        let psi0 = displaced_solution(0, alpha, 0.0, &eff, &m, grid).unwrap();
        let cfg = EvolutionConfig { dt: 2e-4, t_final: 6.0, record_every: 1000 };
        match split_step_evolve(&psi0, &cfg, &m) {
            Err(Error::EdgeLeak { .. }) => {}
            other => panic!("expected EdgeLeak, got {other:?}"),
        }
    }
}
