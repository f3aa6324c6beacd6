//! Numerical asymptotics of Colombeau-type generalized functions.
//!
//! A generalized function is represented by one concrete ε-parametrized net of
//! smooth functions ([`nets::GeneralizedNet`]). Every asymptotic statement is
//! estimated on a finite geometric ladder of ε values ([`nets::EpsLadder`]):
//!
//! * [`asymptotics`] fits valuations and sorts nets into regularity classes
//!   (moderate, negligible, `G^∞`, `G^R`, slow scale);
//! * [`local_spectrum`] decides local convergence of `a(r)·u_ε` in `C^p` or
//!   `D'` and derives singular supports and singular parametric spectra;
//! * [`frequential`] classifies decay of windowed Fourier transforms in the
//!   two cones of ℝ∖0 and assembles wave front estimates;
//! * [`experiments`] reproduces the delta-power, transport, blow-up,
//!   strength and sum-law examples.

// `!(a <= b)` style checks are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod asymptotics;
pub mod corpus;
pub mod error;
pub mod experiments;
pub mod frequential;
pub mod local_spectrum;
pub mod nets;
pub mod quadrature;
pub mod stats;

pub use error::{Error, Result};
