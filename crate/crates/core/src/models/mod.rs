//! Worked applications: qubit cooling, resolved-sideband cooling of a
//! mechanical resonator, and the error-correction energy cost of a quantum
//! computer.

pub mod qc;
pub mod qubit;
pub mod sideband;

pub use qc::{qc_computation_cost, qc_free_energy_loss, QcLoss, QcMode, QcNoise};
pub use qubit::{qubit_cool_power, QubitCoolMode};
pub use sideband::{
    sideband_efficiency_curve, sideband_min_power_consistency, sideband_steady_state,
    SidebandModel, SidebandSteadyState,
};
