//! Solver for the linear fractionally damped oscillator
//! `x'' + lambda D^nu x + omega^2 x = 0` with a Caputo derivative of order
//! `0 <= nu <= 1`.
//!
//! - [`polefinder`] locates the complex pole pair,
//! - [`analytic`] evaluates the residue part and the branch-cut decay integral,
//! - [`freqanalysis`] studies the oscillation frequency as a function of `nu`,
//! - [`oracle`] is an independent L1 time-stepping integrator for validation.

pub mod acceptance;
pub mod analytic;
pub mod error;
pub mod freqanalysis;
pub mod model;
pub mod oracle;
pub mod polefinder;
pub mod quadrature;

pub use analytic::{evaluate, DecayQuadratureConfig, Solution};
pub use error::{Error, Result};
pub use model::{
    InitialSlope, NineCase, OscillatorParams, Pole, SolutionParts, TerminalDamping, Trajectory,
    TrajectorySource,
};
pub use polefinder::find_pole;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
