//! Solver toolkit for a 1D Gross-Pitaevskii equation with a quadratic
//! nonlocal interaction kernel.
//!
//! The equation's first and second moments close on themselves, so exact
//! solution families can be built from the moment dynamics, ladder operators
//! and intertwining operators; an independent split-step spectral integrator
//! of the full nonlocal equation cross-validates every family.
//!
//! Modules follow that structure:
//! - [`model`]: parameters and the derived effective frequencies.
//! - [`moments`]: Hamilton-Ehrenfest moment dynamics (analytic + RK4).
//! - [`closedform`]: Cauchy matrix, ladder frame, action phase, Hermite
//!   polynomials and the explicit solution families.
//! - [`symmetry`]: intertwining operators, ladder symmetry operators, the
//!   displacement operator and the displaced (squeezed coherent) family.
//! - [`evolve`]: split-step spectral integrator and residual diagnostics.
//! - [`suite`]: the verification checklist used by tests and the CLI.

pub mod closedform;
pub mod error;
pub mod evolve;
pub mod grid;
pub mod model;
pub mod moments;
pub mod ode;
pub mod io;
pub mod quad;
pub mod symmetry;
pub mod spectral;
pub mod suite;

pub use error::{Error, Result};
pub use grid::{Grid, WaveFunction};
pub use model::{derive_effective, EffectiveParams, QuadraticModel};
pub use moments::{MomentState, ParamSet};
