//! Numerical laboratory for spreading speeds of a cooperative
//! Lotka-Volterra reaction-diffusion system in one space dimension.
//!
//! The crate simulates the system (and the scalar Fisher and cubic
//! equations) on a truncated grid, extracts front positions, fits
//! asymptotic speeds, and compares them with the closed-form bounds in
//! [`theory`]. [`verify`] turns the ordering and convergence statements
//! into executable checks, and [`cli`] provides presets, config files,
//! run output and parameter sweeps.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod fronts;
pub mod model;
pub mod solver;
pub mod theory;
pub mod verify;

pub use fronts::{Direction, FitWindow, FrontTrace, SpeedEstimate};
pub use model::{CoopParams, CubicParams, FisherParams, Model};
pub use solver::{FieldState, Grid1D, InitialCondition, StepControl};
