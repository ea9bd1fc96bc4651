//! Energy cost of keeping quantum-computer qubits fresh. Each qubit suffers
//! zero-temperature amplitude damping (rate γ) and depolarizing noise (rate
//! β) for one gate time τ; the free energy lost in that window is the
//! minimum work an error-correcting refresh must supply.
//!
//! With `p_β = βτ` and `p_γ = γτ/2`, the leading-log estimate of the loss
//! averaged over pure states is
//!
//! ```text
//! −ΔF ≈ p_γ E − T (p_β ln p_β + p_γ ln p_γ)
//! ```
//!
//! returned here as the positive work to restore.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::density::DensityMatrix;
use crate::error::{Error, Result};
use crate::lindblad::{amplitude_damping_dissipator, depolarizing_dissipator, propagate, OpenSystem};
use crate::linalg::{haar_random_vector, ComplexMatrix};
use crate::operators::qubit_hamiltonian;
use crate::thermo::free_energy;

/// Error probabilities above this make the leading-log formula unreliable.
pub const FORMULA_VALIDITY_LIMIT: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QcNoise {
    pub gamma: f64,
    pub beta: f64,
    pub gate_time: f64,
    pub gap: f64,
    pub temperature: f64,
}

impl QcNoise {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("gamma", self.gamma),
            ("beta", self.beta),
            ("tau", self.gate_time),
            ("E", self.gap),
        ] {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(Error::InvalidParameter(format!(
                    "{name} must be non-negative, got {v}"
                )));
            }
        }
        if !(self.temperature > 0.0 && self.temperature.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "T must be positive, got {}",
                self.temperature
            )));
        }
        Ok(())
    }

    pub fn p_beta(&self) -> f64 {
        self.beta * self.gate_time
    }

    pub fn p_gamma(&self) -> f64 {
        0.5 * self.gamma * self.gate_time
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QcMode {
    Formula,
    MonteCarlo { samples: usize, seed: u64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct QcLoss {
    /// `−ΔF`, per qubit per gate.
    pub work_to_restore: f64,
    pub p_beta: f64,
    pub p_gamma: f64,
    /// Error probabilities within the formula's validity range.
    pub valid: bool,
    /// Standard error of the Monte-Carlo mean.
    pub std_error: Option<f64>,
}

fn xlnx(x: f64) -> f64 {
    if x > 0.0 {
        x * x.ln()
    } else {
        0.0
    }
}

/// Free energy lost by one qubit in one gate time.
pub fn qc_free_energy_loss(noise: &QcNoise, mode: QcMode) -> Result<QcLoss> {
    noise.validate()?;
    let (p_beta, p_gamma) = (noise.p_beta(), noise.p_gamma());
    let valid = p_beta < FORMULA_VALIDITY_LIMIT && p_gamma < FORMULA_VALIDITY_LIMIT;
    match mode {
        QcMode::Formula => {
            let delta_f = (xlnx(p_beta) + xlnx(p_gamma)) * noise.temperature - p_gamma * noise.gap;
            Ok(QcLoss {
                work_to_restore: -delta_f,
                p_beta,
                p_gamma,
                valid,
                std_error: None,
            })
        }
        QcMode::MonteCarlo { samples, seed } => {
            let (mean, std_error) = monte_carlo_loss(noise, samples, seed)?;
            Ok(QcLoss {
                work_to_restore: mean,
                p_beta,
                p_gamma,
                valid,
                std_error: Some(std_error),
            })
        }
    }
}

/// Mean and standard error of `F(ρ(0)) − F(ρ(τ))` over Haar-random pure
/// initial states. Sample `k` draws from its own ChaCha stream, so results
/// do not depend on thread scheduling.
///
/// The noise generators commute with the free qubit Hamiltonian and the
/// free energy is invariant under that rotation, so the state is propagated
/// in the rotating frame (`H = 0`).
fn monte_carlo_loss(noise: &QcNoise, samples: usize, seed: u64) -> Result<(f64, f64)> {
    if samples < 2 {
        return Err(Error::InvalidParameter("need at least two Monte-Carlo samples".into()));
    }
    let mut dissipators = Vec::new();
    if noise.gamma > 0.0 {
        dissipators.push(amplitude_damping_dissipator(noise.gamma)?);
    }
    if noise.beta > 0.0 {
        dissipators.push(depolarizing_dissipator(noise.beta)?);
    }
    let sys = OpenSystem::new(ComplexMatrix::zeros(2, 2), dissipators)?;
    let h = qubit_hamiltonian(noise.gap);
    let t = noise.temperature;
    let tau = noise.gate_time;
    // Integration step well inside the propagator's stability bound.
    let bound = sys.spectral_bound();
    let dt = if bound > 0.0 { tau.min(0.05 / bound) } else { tau };

    let losses = (0..samples)
        .into_par_iter()
        .map(|k| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(k as u64);
            let psi = haar_random_vector(2, &mut rng);
            let rho0 = DensityMatrix::pure(&psi)?;
            let rho = if tau > 0.0 && dt > 0.0 {
                propagate(&sys, &rho0, tau, dt)?
            } else {
                rho0.clone()
            };
            Ok(free_energy(&rho0, &h, t)? - free_energy(&rho, &h, t)?)
        })
        .collect::<Result<Vec<f64>>>()?;
    let n = losses.len() as f64;
    let mean = losses.iter().sum::<f64>() / n;
    let var = losses.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    Ok((mean, (var / n).sqrt()))
}

/// Minimum energy for a computation that injects `qubits` fresh qubits.
pub fn qc_computation_cost(per_qubit: f64, qubits: u64) -> f64 {
    per_qubit * qubits as f64
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    fn noise(gamma: f64, beta: f64, gap: f64) -> QcNoise {
        QcNoise {
            gamma,
            beta,
            gate_time: 1.0,
            gap,
            temperature: 1.0,
        }
    }

    #[test]
    fn noiseless_costs_nothing() {
        let n = noise(0.0, 0.0, 3.0);
        let f = qc_free_energy_loss(&n, QcMode::Formula).unwrap();
        assert_eq!(f.work_to_restore, 0.0);
        let mc = qc_free_energy_loss(&n, QcMode::MonteCarlo { samples: 10, seed: 1 }).unwrap();
        assert!(mc.work_to_restore.abs() < 1e-15);
    }

    #[test]
    fn entropy_only_cost() {
        let n = noise(2e-3, 0.0, 0.0);
        let f = qc_free_energy_loss(&n, QcMode::Formula).unwrap();
        let p: f64 = 1e-3;
        assert!((f.work_to_restore + p * p.ln()).abs() < 1e-18);
        assert!(f.valid);
        assert!(!qc_free_energy_loss(&noise(0.2, 0.0, 0.0), QcMode::Formula).unwrap().valid);
    }

    #[test]
    fn energy_term_dominates_for_cold_qubits() {
        for gap_over_t in [50.0, 200.0, 1000.0] {
            let n = noise(2e-6, 1e-6, gap_over_t);
            let f = qc_free_energy_loss(&n, QcMode::Formula).unwrap();
            let energy = n.p_gamma() * n.gap;
            assert!(energy > 0.5 * f.work_to_restore);
        }
    }

    #[test]
    fn monte_carlo_is_deterministic() {
        let n = noise(2e-4, 1e-4, 2.0);
        let mode = QcMode::MonteCarlo { samples: 200, seed: 7 };
        let a = qc_free_energy_loss(&n, mode).unwrap();
        let b = qc_free_energy_loss(&n, mode).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn monte_carlo_energy_loss_for_pure_damping() {
        // Without depolarizing and at E ≫ T the mean energy lost is p_γ E.
        let n = QcNoise {
            gamma: 2e-6,
            beta: 0.0,
            gate_time: 1.0,
            gap: 1e4,
            temperature: 1.0,
        };
        let mc = qc_free_energy_loss(&n, QcMode::MonteCarlo { samples: 4000, seed: 3 }).unwrap();
        let energy = n.p_gamma() * n.gap;
        assert!((mc.work_to_restore - energy).abs() < 0.05 * energy, "{} vs {energy}", mc.work_to_restore);
    }

    #[test]
    fn cost_is_linear_in_qubit_count() {
        assert_eq!(qc_computation_cost(3.5, 0), 0.0);
        assert_eq!(qc_computation_cost(3.5, 1), 3.5);
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        for _ in 0..100 {
            let c = rng.random_range(0.0..10.0);
            let (m1, m2) = (rng.random_range(0..1_000_000u64), rng.random_range(0..1_000_000u64));
            let lhs = qc_computation_cost(c, m1 + m2);
            let rhs = qc_computation_cost(c, m1) + qc_computation_cost(c, m2);
            assert!((lhs - rhs).abs() <= 1e-12 * lhs.abs());
        }
    }
}
