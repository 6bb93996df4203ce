//! Numerical laboratory for maximal estimates of fractional Schrödinger
//! propagators with concave phase `|ξ|^m`, `0 < m < 1`.
//!
//! The crate evaluates the propagator as a frequency-side oscillatory
//! integral, builds maximal functions along curves and line families,
//! constructs the explicit counterexample data, and fits λ-ladders in
//! log–log coordinates.

// `!(a < b)` guards are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod experiment;
pub mod exponents;
pub mod factory;
pub mod geometry;
pub mod maximal;
pub mod phase;
pub mod quadrature;
pub mod regression;
pub mod spectral;

pub use error::{Error, Result};
pub use experiment::{run_experiment, Outcome, Report, RunConfig};
pub use exponents::Kappa;
pub use geometry::{AlphaMeasure, CantorSet, Curve, XGrid};
pub use maximal::{GridSpec, MaximalEngine, Path};
pub use phase::{EnvelopeParams, Variant};
pub use quadrature::{Estimate, Interval, QuadratureSpec};
pub use regression::LogLogFit;
pub use spectral::{FourierDatum, PropagatorPlan};
