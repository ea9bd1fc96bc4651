//! Minimum control power when the controller's auxiliary couples strongly
//! enough to reshape the system's spectrum, and with it the noise.
//!
//! The cost is evaluated on the joint space `S ⊗ A`:
//!
//! ```text
//! Ẇ(𝓗, τ) = −Σ_i Tr[D_i(τ)(T ln τ + 𝓗)],   Tr_A τ = ρ*
//! ```
//!
//! and minimized over a caller-supplied family of joint Hamiltonians `𝓗` and
//! joint states `τ`. The allowed interaction set is given operationally by
//! the family's parameter box.

use crate::density::{gibbs_state, DensityMatrix};
use crate::error::{Error, Result};
use crate::lindblad::{dressed_thermal_dissipator, Dissipator, OpenSystem};
use crate::linalg::{kron, partial_trace, ComplexMatrix, Subsystem};
use crate::operators::{energy_sigma_z, qubit_hamiltonian, sigma_x};
use crate::optimize::minimize_boxed;
use crate::thermo::{min_work_rate, ControlCostReport};

/// Tolerance on `‖Tr_A τ − ρ*‖_max` for every evaluated joint state.
pub const CONSTRAINT_TOL: f64 = 1e-10;

/// Parametrized joint Hamiltonians `𝓗(p)` and the noise they imply.
pub trait InteractionFamily: Sync {
    fn parameter_names(&self) -> Vec<String>;
    /// Box `[lo, hi]` per parameter; this is the allowed interaction set.
    fn bounds(&self) -> Vec<(f64, f64)>;
    /// `(dim S, dim A)`.
    fn dims(&self) -> (usize, usize);
    fn hamiltonian(&self, params: &[f64]) -> Result<ComplexMatrix>;
    /// Channels through which the environment acts on the dressed system.
    fn dissipators(&self, hamiltonian: &ComplexMatrix) -> Result<Vec<Dissipator>>;
}

/// Joint states `τ` whose reduced state on `S` is the target.
pub trait JointStateParametrization: Sync {
    /// Bounds on the state's own parameters (may be empty).
    fn bounds(&self) -> Vec<(f64, f64)>;
    /// Target `ρ*` for the given Hamiltonian parameters. Most targets ignore
    /// them; a target defined relative to the dressed spectrum does not.
    fn target(&self, family_params: &[f64]) -> Result<DensityMatrix>;
    fn joint_state(&self, family_params: &[f64], state_params: &[f64]) -> Result<DensityMatrix>;
}

/// System Hamiltonian as a function of the family parameters.
pub type HamiltonianFn = Box<dyn Fn(&[f64]) -> Result<ComplexMatrix> + Send + Sync>;

/// How the system target is chosen.
pub enum TargetState {
    Fixed(DensityMatrix),
    /// Gibbs state at `temperature` of a system Hamiltonian that depends on
    /// the family parameters (e.g. the dressed qubit gap).
    DressedGibbs {
        temperature: f64,
        hamiltonian: HamiltonianFn,
    },
}

/// State of the auxiliary in a product `τ = ρ* ⊗ σ_A`.
pub enum AuxiliaryState {
    Fixed(DensityMatrix),
    /// `σ_A = Gibbs(H_A, t)` with `t` a free parameter in `[t_min, t_max]`.
    Thermal {
        hamiltonian: ComplexMatrix,
        t_min: f64,
        t_max: f64,
    },
}

/// Product states `ρ* ⊗ σ_A`. Correlated perturbations are not searched.
pub struct ProductStates {
    pub target: TargetState,
    pub auxiliary: AuxiliaryState,
}

impl JointStateParametrization for ProductStates {
    fn bounds(&self) -> Vec<(f64, f64)> {
        match &self.auxiliary {
            AuxiliaryState::Fixed(_) => vec![],
            AuxiliaryState::Thermal { t_min, t_max, .. } => vec![(*t_min, *t_max)],
        }
    }

    fn target(&self, family_params: &[f64]) -> Result<DensityMatrix> {
        match &self.target {
            TargetState::Fixed(rho) => Ok(rho.clone()),
            TargetState::DressedGibbs {
                temperature,
                hamiltonian,
            } => gibbs_state(&hamiltonian(family_params)?, *temperature),
        }
    }

    fn joint_state(&self, family_params: &[f64], state_params: &[f64]) -> Result<DensityMatrix> {
        let rho = self.target(family_params)?;
        let sigma = match &self.auxiliary {
            AuxiliaryState::Fixed(s) => s.clone(),
            AuxiliaryState::Thermal { hamiltonian, .. } => {
                let t = *state_params.first().ok_or_else(|| {
                    Error::InvalidParameter("thermal auxiliary needs a temperature".into())
                })?;
                gibbs_state(hamiltonian, t)?
            }
        };
        Ok(DensityMatrix::from_matrix_unchecked(kron(
            rho.as_matrix(),
            sigma.as_matrix(),
        )))
    }
}

fn check_bounds(params: &[f64], bounds: &[(f64, f64)]) -> Result<()> {
    if params.len() != bounds.len() {
        return Err(Error::DimensionMismatch {
            context: "interaction parameters",
            expected: bounds.len(),
            found: params.len(),
        });
    }
    for (k, (&p, &(lo, hi))) in params.iter().zip(bounds).enumerate() {
        if !(lo..=hi).contains(&p) {
            return Err(Error::InvalidParameter(format!(
                "parameter {k} = {p} outside the allowed range [{lo}, {hi}]"
            )));
        }
    }
    Ok(())
}

/// Cost of holding the joint state `tau` under the family's Hamiltonian at
/// `params`, with heat dumped at `temperature`.
pub fn strong_objective(
    family: &dyn InteractionFamily,
    params: &[f64],
    tau: &DensityMatrix,
    temperature: f64,
) -> Result<ControlCostReport> {
    check_bounds(params, &family.bounds())?;
    let h = family.hamiltonian(params)?;
    let dissipators = family.dissipators(&h)?;
    let sys = OpenSystem::new(h, dissipators)?;
    min_work_rate(&sys, tau, temperature)
}

fn constraint_violation(
    tau: &DensityMatrix,
    target: &DensityMatrix,
    dims: (usize, usize),
) -> Result<f64> {
    let reduced = partial_trace(tau, dims, Subsystem::System)?;
    Ok((reduced.as_matrix() - target.as_matrix()).max_abs())
}

#[derive(Debug, Clone)]
pub struct StrongMinimum {
    pub params: Vec<f64>,
    pub state_params: Vec<f64>,
    pub target: DensityMatrix,
    pub tau: DensityMatrix,
    pub report: ControlCostReport,
    pub min_work_rate: f64,
    pub evaluations: usize,
    /// Always true: the search is local and the minimum is not certified.
    pub local: bool,
}

/// Grid-seeded Nelder–Mead search over interaction and state parameters.
pub fn minimize_strong(
    family: &dyn InteractionFamily,
    states: &dyn JointStateParametrization,
    temperature: f64,
    budget: usize,
) -> Result<StrongMinimum> {
    let family_bounds = family.bounds();
    let nf = family_bounds.len();
    let mut bounds = family_bounds;
    bounds.extend(states.bounds());
    let dims = family.dims();

    let evaluate = |x: &[f64]| -> Result<(DensityMatrix, DensityMatrix, ControlCostReport)> {
        let (p, s) = x.split_at(nf);
        let target = states.target(p)?;
        let tau = states.joint_state(p, s)?;
        let violation = constraint_violation(&tau, &target, dims)?;
        if violation > CONSTRAINT_TOL {
            return Err(Error::InvalidDensityMatrix(format!(
                "joint state misses the target by {violation:.3e}"
            )));
        }
        let report = strong_objective(family, p, &tau, temperature)?;
        Ok((target, tau, report))
    };
    let objective = |x: &[f64]| match evaluate(x) {
        Ok((_, _, r)) => r.min_work_rate,
        Err(_) => f64::INFINITY,
    };
    let best = minimize_boxed(&objective, &bounds, budget, 1e-8)?;
    let (target, tau, report) = evaluate(&best.x)?;
    let (p, s) = best.x.split_at(nf);
    Ok(StrongMinimum {
        params: p.to_vec(),
        state_params: s.to_vec(),
        target,
        tau,
        min_work_rate: report.min_work_rate,
        report,
        evaluations: best.evaluations,
        local: true,
    })
}

/// Two qubits, `𝓗 = E σ⁽¹⁾/2 + 𝓔 σ⁽²⁾/2 + g σ⁽¹⁾σ⁽²⁾/2` with `σ = diag(−1, 1)`
/// and `g = −ε`. The system's bath couples through `σ_x ⊗ I` and sees the
/// dressed levels. The single parameter is `ε ∈ [0, ε_max]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GapShiftFamily {
    pub gap: f64,
    pub aux_gap: f64,
    pub max_shift: f64,
    pub bath_temperature: f64,
    pub gamma: f64,
}

impl GapShiftFamily {
    pub fn new(gap: f64, aux_gap: f64, max_shift: f64, bath_temperature: f64, gamma: f64) -> Result<Self> {
        if !(gap > 0.0 && aux_gap > gap) {
            return Err(Error::InvalidParameter(format!(
                "need 0 < E < 𝓔, got E = {gap}, 𝓔 = {aux_gap}"
            )));
        }
        if !(max_shift >= 0.0 && max_shift < aux_gap) {
            return Err(Error::InvalidParameter(format!(
                "need 0 <= ε < 𝓔, got ε = {max_shift}, 𝓔 = {aux_gap}"
            )));
        }
        if !(bath_temperature > 0.0 && gamma >= 0.0) {
            return Err(Error::InvalidParameter(
                "bath temperature must be positive and γ non-negative".into(),
            ));
        }
        Ok(Self {
            gap,
            aux_gap,
            max_shift,
            bath_temperature,
            gamma,
        })
    }

    /// Target: the dressed qubit (gap `E + ε`) at `cold_temperature`, the
    /// auxiliary in its ground state.
    pub fn cold_target(&self, cold_temperature: f64) -> ProductStates {
        let gap = self.gap;
        ProductStates {
            target: TargetState::DressedGibbs {
                temperature: cold_temperature,
                hamiltonian: Box::new(move |p: &[f64]| Ok(qubit_hamiltonian(gap + p[0]))),
            },
            auxiliary: AuxiliaryState::Fixed(DensityMatrix::basis_state(2, 0)),
        }
    }
}

impl InteractionFamily for GapShiftFamily {
    fn parameter_names(&self) -> Vec<String> {
        vec!["epsilon".into()]
    }

    fn bounds(&self) -> Vec<(f64, f64)> {
        vec![(0.0, self.max_shift)]
    }

    fn dims(&self) -> (usize, usize) {
        (2, 2)
    }

    fn hamiltonian(&self, params: &[f64]) -> Result<ComplexMatrix> {
        let eps = params[0];
        let id = ComplexMatrix::identity(2);
        let z = energy_sigma_z();
        let hs = kron(&z, &id).scale_real(self.gap / 2.0);
        let ha = kron(&id, &z).scale_real(self.aux_gap / 2.0);
        let hi = kron(&z, &z).scale_real(-eps / 2.0);
        Ok(&(&hs + &ha) + &hi)
    }

    fn dissipators(&self, hamiltonian: &ComplexMatrix) -> Result<Vec<Dissipator>> {
        let coupling = kron(&sigma_x(), &ComplexMatrix::identity(2));
        Ok(vec![dressed_thermal_dissipator(
            "system bath",
            hamiltonian,
            &coupling,
            self.gamma,
            self.bath_temperature,
        )?])
    }
}

/// Power to hold the dressed qubit at `cold_temperature` with the gap
/// shifted by `shift`, auxiliary frozen in `|0⟩`.
pub fn two_qubit_strong(
    gap: f64,
    aux_gap: f64,
    shift: f64,
    bath_temperature: f64,
    cold_temperature: f64,
    gamma: f64,
) -> Result<f64> {
    if !(cold_temperature > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "cold temperature must be positive, got {cold_temperature}"
        )));
    }
    let family = GapShiftFamily::new(gap, aux_gap, shift, bath_temperature, gamma)?;
    let states = family.cold_target(cold_temperature);
    let tau = states.joint_state(&[shift], &[])?;
    Ok(strong_objective(&family, &[shift], &tau, bath_temperature)?.min_work_rate)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lindblad::thermal_qubit_system;
    use crate::operators::bose_occupation;
    use crate::thermo::min_work_rate;

    /// Power to hold a qubit of gap `e` at `tc` against a bath at `t`,
    /// written in terms of `z = e^{E/T}` and `w = e^{E/T_c}`.
    fn qubit_closed_form(e: f64, t: f64, tc: f64, gamma: f64) -> f64 {
        let (z, w) = ((e / t).exp(), (e / tc).exp());
        gamma * (w - z) / ((z - 1.0) * (w + 1.0)) * e * (t / tc - 1.0)
    }

    #[test]
    fn zero_shift_reduces_to_weak_coupling() {
        let (e, t, tc, gamma) = (1.0, 0.8, 0.2, 0.05);
        let weak_sys = thermal_qubit_system(e, t, gamma).unwrap();
        let rho = gibbs_state(weak_sys.hamiltonian(), tc).unwrap();
        let weak = min_work_rate(&weak_sys, &rho, t).unwrap().min_work_rate;
        let strong = two_qubit_strong(e, 6.0, 0.0, t, tc, gamma).unwrap();
        assert!((strong - weak).abs() < 1e-10 * weak.abs().max(1.0));
    }

    #[test]
    fn product_with_thermal_auxiliary_reduces_to_weak_coupling() {
        // Uncoupled family with a thermal auxiliary: the auxiliary factor adds nothing.
        let (e, t, tc, gamma) = (1.0, 0.8, 0.3, 0.05);
        let family = GapShiftFamily::new(e, 2.5, 0.0, t, gamma).unwrap();
        let rho = gibbs_state(&qubit_hamiltonian(e), tc).unwrap();
        let states = ProductStates {
            target: TargetState::Fixed(rho.clone()),
            auxiliary: AuxiliaryState::Thermal {
                hamiltonian: qubit_hamiltonian(2.5),
                t_min: 0.1,
                t_max: 2.0,
            },
        };
        let tau = states.joint_state(&[0.0], &[t]).unwrap();
        let strong = strong_objective(&family, &[0.0], &tau, t).unwrap().min_work_rate;
        let weak_sys = thermal_qubit_system(e, t, gamma).unwrap();
        let weak = min_work_rate(&weak_sys, &rho, t).unwrap().min_work_rate;
        assert!((strong - weak).abs() < 1e-10);
    }

    #[test]
    fn joint_gibbs_at_bath_temperature_costs_nothing() {
        let t = 0.7;
        let family = GapShiftFamily::new(1.0, 4.0, 2.0, t, 0.3).unwrap();
        let h = family.hamiltonian(&[1.5]).unwrap();
        let tau = gibbs_state(&h, t).unwrap();
        let w = strong_objective(&family, &[1.5], &tau, t).unwrap().min_work_rate;
        assert!(w.abs() < 1e-12);
    }

    #[test]
    fn two_qubit_matches_shifted_closed_form() {
        let (e, cal_e, t, tc, gamma) = (1.0, 8.0, 0.5, 0.2, 0.02);
        for eps in [0.0, 0.5, 1.5, 3.0] {
            let w = two_qubit_strong(e, cal_e, eps, t, tc, gamma).unwrap();
            let oracle = qubit_closed_form(e + eps, t, tc, gamma);
            assert!((w - oracle).abs() < 1e-10 * oracle, "ε={eps}: {w} vs {oracle}");
        }
    }

    #[test]
    fn ground_state_regime_approximation() {
        // Relative error of the approximation is about e^{−(E+ε)(1/T_c − 1/T)}.
        let (e, cal_e, t, tc, gamma) = (1.0, 20.0, 0.5, 0.15, 0.02);
        let eps = 2.0;
        let w = two_qubit_strong(e, cal_e, eps, t, tc, gamma).unwrap();
        let approx = gamma * bose_occupation(e + eps, t) * (e + eps) * (t / tc - 1.0);
        let tol = 2.0 * (-(e + eps) * (1.0 / tc - 1.0 / t)).exp();
        assert!(tol < 2e-6);
        assert!((w - approx).abs() < tol * approx);
    }

    #[test]
    fn power_decreases_with_shift() {
        let (e, cal_e, t, tc, gamma) = (1.0, 10.0, 0.6, 0.4, 0.02);
        let powers: Vec<f64> = (0..20)
            .map(|k| two_qubit_strong(e, cal_e, 0.3 * k as f64, t, tc, gamma).unwrap())
            .collect();
        assert!(powers.windows(2).all(|w| w[1] < w[0]));
    }

    #[test]
    fn ordering_violations_rejected() {
        assert!(two_qubit_strong(1.0, 0.5, 0.1, 1.0, 0.1, 0.1).is_err());
        assert!(two_qubit_strong(1.0, 3.0, 3.5, 1.0, 0.1, 0.1).is_err());
        assert!(two_qubit_strong(1.0, 3.0, -0.1, 1.0, 0.1, 0.1).is_err());
    }

    #[test]
    fn minimizer_sits_at_shift_bound() {
        let (e, cal_e, t, tc, gamma, eps_max) = (1.0, 8.0, 0.5, 0.2, 0.02, 2.5);
        let family = GapShiftFamily::new(e, cal_e, eps_max, t, gamma).unwrap();
        let states = family.cold_target(tc);
        let best = minimize_strong(&family, &states, t, 200).unwrap();
        assert_eq!(best.params, vec![eps_max]);
        let oracle = qubit_closed_form(e + eps_max, t, tc, gamma);
        assert!((best.min_work_rate - oracle).abs() < 1e-6 * oracle);
        assert!(best.min_work_rate < qubit_closed_form(e, t, tc, gamma));
        assert!(best.local);
    }

    /// Family whose only parameter does nothing.
    struct NoOp(GapShiftFamily);

    impl InteractionFamily for NoOp {
        fn parameter_names(&self) -> Vec<String> {
            vec!["unused".into()]
        }
        fn bounds(&self) -> Vec<(f64, f64)> {
            vec![(-1.0, 1.0)]
        }
        fn dims(&self) -> (usize, usize) {
            (2, 2)
        }
        fn hamiltonian(&self, _: &[f64]) -> Result<ComplexMatrix> {
            self.0.hamiltonian(&[0.0])
        }
        fn dissipators(&self, h: &ComplexMatrix) -> Result<Vec<Dissipator>> {
            self.0.dissipators(h)
        }
    }

    #[test]
    fn no_op_family_returns_weak_value() {
        let (e, t, tc, gamma) = (1.0, 0.5, 0.15, 0.1);
        let family = NoOp(GapShiftFamily::new(e, 5.0, 0.0, t, gamma).unwrap());
        let rho = gibbs_state(&qubit_hamiltonian(e), tc).unwrap();
        let states = ProductStates {
            target: TargetState::Fixed(rho),
            auxiliary: AuxiliaryState::Fixed(DensityMatrix::basis_state(2, 0)),
        };
        let best = minimize_strong(&family, &states, t, 100).unwrap();
        let weak = qubit_closed_form(e, t, tc, gamma);
        assert!((best.min_work_rate - weak).abs() < 1e-10 * weak);
        let reduced = partial_trace(&best.tau, (2, 2), Subsystem::System).unwrap();
        assert!((reduced.as_matrix() - best.target.as_matrix()).max_abs() <= CONSTRAINT_TOL);
    }

    #[test]
    fn strong_never_worse_than_weak_with_zero_in_family() {
        for (t, tc) in [(0.3, 0.1), (1.0, 0.4), (2.0, 0.9)] {
            let family = GapShiftFamily::new(1.0, 6.0, 2.0, t, 0.05).unwrap();
            let best = minimize_strong(&family, &family.cold_target(tc), t, 150).unwrap();
            assert!(best.min_work_rate <= qubit_closed_form(1.0, t, tc, 0.05) * (1.0 + 1e-12));
        }
    }
}
