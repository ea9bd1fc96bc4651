//! Minimum control power for open quantum systems.
//!
//! Given a Lindblad model of a system's noise and a target state the system
//! must be held in, this crate computes the minimum rate of work a controller
//! coupled to a thermal reservoir has to supply, along with per-channel
//! entropy and energy flows, entropy-production bookkeeping and three worked
//! applications (qubit cooling, resolved-sideband cooling, error cost of a
//! quantum computer).
//!
//! Units are natural throughout: `ħ = k_B = 1`, energies, temperatures and
//! rates in rad/s. Conversions from SI live in [`units`].

// `!(x > 0.0)` is used on purpose so NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod density;
pub mod error;
pub mod lindblad;
pub mod linalg;
pub mod models;
pub mod operators;
pub mod optimize;
pub mod strong;
pub mod thermo;
pub mod units;

pub use density::{gibbs_state, DensityMatrix};
pub use error::{Error, Result};
pub use lindblad::{Dissipator, Jump, OpenSystem};
pub use linalg::{ComplexMatrix, C64};
