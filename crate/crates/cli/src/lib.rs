//! Command-line front end: configuration parsing and the four pipelines
//! (exact solution export, split-step evolution, the verification checklist,
//! and parameter sweeps).

pub mod config;
pub mod workflows;
