//! Blow-up criteria for the one-dimensional nonlinear Schrödinger equation
//!
//! ```text
//! i u_t + u_xx + N(u) u = 0,   N(u) = Σ c_j |u|^{β_j}
//! ```
//!
//! with combined power nonlinearities or the exponential series `e^{|u|}`.
//! Focusing terms have `c_j > 0`.
//!
//! The crate evaluates the sufficient conditions for finite-time collapse on
//! sampled initial data, scans the parameter regions of the standard data
//! families, and checks the criteria against split-step Fourier evolution.

// Negated comparisons reject NaN along with out-of-range values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod constants;
pub mod criteria;
pub mod error;
pub mod field;
pub mod nonlinearity;
pub mod observables;
pub mod profiles;
pub mod solver;
pub mod verify;

pub use error::{Error, Result};
pub use field::{FieldProfile, Grid};
pub use nonlinearity::{NonlinearTerm, Nonlinearity};
pub use observables::Observables;
