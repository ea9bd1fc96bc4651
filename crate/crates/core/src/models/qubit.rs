//! Holding a qubit colder than its bath.

use crate::error::{Error, Result};
use crate::operators::bose_occupation;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QubitCoolMode {
    /// Ground-state regime, `T_c ≪ E`: `γ n_T E (T/T_c − 1)`.
    Approx,
    /// Exact for a Gibbs target at `T_c`.
    Full,
}

/// Minimum power to hold a qubit of gap `E` at temperature `T_c` against a
/// bath at `T` with damping rate `γ`. `T_c = 0` gives `+∞`.
///
/// The full form replaces `n_T` by `(w − z)/[(z − 1)(w + 1)]` with
/// `z = e^{E/T}`, `w = e^{E/T_c}`, which is the net upward population flux
/// per unit `γ` at the target.
pub fn qubit_cool_power(
    gap: f64,
    temperature: f64,
    cold_temperature: f64,
    gamma: f64,
    mode: QubitCoolMode,
) -> Result<f64> {
    for (name, v) in [("E", gap), ("T", temperature), ("gamma", gamma)] {
        if !(v > 0.0 && v.is_finite()) {
            return Err(Error::InvalidParameter(format!("{name} must be positive, got {v}")));
        }
    }
    if !(cold_temperature >= 0.0) {
        return Err(Error::InvalidParameter(format!(
            "T_c must be non-negative, got {cold_temperature}"
        )));
    }
    if cold_temperature == 0.0 {
        return Ok(f64::INFINITY);
    }
    let cop_ideal = temperature / cold_temperature - 1.0;
    let occupation = match mode {
        QubitCoolMode::Approx => bose_occupation(gap, temperature),
        QubitCoolMode::Full => {
            // (w − z)/[(z − 1)(w + 1)] rewritten to survive w → ∞.
            let z_over_w = (gap / temperature - gap / cold_temperature).exp();
            let inv_w = (-gap / cold_temperature).exp();
            (1.0 - z_over_w) / ((gap / temperature).exp_m1() * (1.0 + inv_w))
        }
    };
    Ok(gamma * occupation * gap * cop_ideal)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::density::gibbs_state;
    use crate::lindblad::thermal_qubit_system;
    use crate::thermo::min_work_rate;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn equal_temperatures_cost_nothing() {
        for mode in [QubitCoolMode::Approx, QubitCoolMode::Full] {
            assert_eq!(qubit_cool_power(1.0, 0.4, 0.4, 0.1, mode).unwrap(), 0.0);
        }
    }

    #[test]
    fn zero_cold_temperature_diverges() {
        let p = qubit_cool_power(1.0, 0.4, 0.0, 0.1, QubitCoolMode::Full).unwrap();
        assert_eq!(p, f64::INFINITY);
        assert!(qubit_cool_power(-1.0, 0.4, 0.1, 0.1, QubitCoolMode::Full).is_err());
    }

    #[test]
    fn full_form_matches_general_cost() {
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        for _ in 0..100 {
            let e: f64 = rng.random_range(0.1..5.0);
            let t: f64 = rng.random_range(0.05f64..5.0).max(e / 20.0);
            // Keep the excited population above the 1e-14 support floor.
            let tc = rng.random_range((e / 25.0).max(0.01 * t)..t);
            let gamma = rng.random_range(1e-3..1.0);
            let sys = thermal_qubit_system(e, t, gamma).unwrap();
            let rho = gibbs_state(sys.hamiltonian(), tc).unwrap();
            let general = min_work_rate(&sys, &rho, t).unwrap().min_work_rate;
            let full = qubit_cool_power(e, t, tc, gamma, QubitCoolMode::Full).unwrap();
            assert!((general - full).abs() <= 1e-10 * full.abs(), "{general} vs {full}");
        }
    }

    #[test]
    fn approx_approaches_full_deep_in_ground_state() {
        let (e, t, gamma) = (1.0, 0.5, 0.1);
        let ratio = |tc: f64| {
            qubit_cool_power(e, t, tc, gamma, QubitCoolMode::Approx).unwrap()
                / qubit_cool_power(e, t, tc, gamma, QubitCoolMode::Full).unwrap()
        };
        let errors: Vec<f64> = [0.3, 0.1, 0.05, 0.02].iter().map(|&tc| (ratio(tc) - 1.0).abs()).collect();
        assert!(errors.windows(2).all(|w| w[1] < w[0]));
        assert!(errors[3] < 1e-9);
    }

    #[test]
    fn full_form_is_finite_for_huge_gap_ratio() {
        let p = qubit_cool_power(1.0, 0.5, 1e-4, 0.1, QubitCoolMode::Full).unwrap();
        let a = qubit_cool_power(1.0, 0.5, 1e-4, 0.1, QubitCoolMode::Approx).unwrap();
        assert!(p.is_finite() && (p - a).abs() < 1e-12 * a);
    }
}
