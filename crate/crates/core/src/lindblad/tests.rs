use super::*;
use crate::density::random_density_matrix;
use crate::linalg::{hermitian_eig, C64};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_matrix(n: usize, rng: &mut ChaCha8Rng) -> ComplexMatrix {
    ComplexMatrix::from_fn(n, n, |_, _| {
        C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
    })
}

fn random_dissipator(n: usize, jumps: usize, rng: &mut ChaCha8Rng) -> Dissipator {
    let js = (0..jumps)
        .map(|_| Jump::new(random_matrix(n, rng), rng.random_range(0.1..2.0)))
        .collect();
    Dissipator::new("random", js).unwrap()
}

// Element-wise triple loop evaluation of Σ r (L ρ L† − ½{L†L, ρ}).
fn dissipator_loop_oracle(d: &Dissipator, rho: &ComplexMatrix) -> ComplexMatrix {
    let n = rho.rows();
    let mut out = ComplexMatrix::zeros(n, n);
    for jump in d.jumps() {
        let l = &jump.operator;
        for i in 0..n {
            for j in 0..n {
                let mut acc = ZERO;
                for k in 0..n {
                    for m in 0..n {
                        acc += l[(i, k)] * rho[(k, m)] * l[(j, m)].conj();
                        // (L†L)_{ik} ρ_{kj} and ρ_{ik} (L†L)_{kj}
                        acc -= 0.5 * l[(m, i)].conj() * l[(m, k)] * rho[(k, j)];
                        acc -= 0.5 * rho[(i, k)] * l[(m, k)].conj() * l[(m, j)];
                    }
                }
                out[(i, j)] += acc * jump.rate;
            }
        }
    }
    out
}

#[test]
fn thermal_qubit_fixed_point() {
    let d = thermal_qubit_dissipator(1.3, 0.9, 0.2).unwrap();
    let pi = gibbs_state(&qubit_hamiltonian(1.3), 0.9).unwrap();
    assert!(d.apply(&pi).unwrap().max_abs() < 1e-12);
}

#[test]
fn pure_decay_of_excited_state() {
    let gamma = 0.7;
    let d = Dissipator::new("decay", vec![Jump::new(sigma_minus(), gamma)]).unwrap();
    let out = d.apply(&DensityMatrix::basis_state(2, 1)).unwrap();
    let expected = ComplexMatrix::from_diag(&[gamma, -gamma]);
    assert!((&out - &expected).max_abs() < 1e-15);
}

#[test]
fn dissipator_matches_loop_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    for n in [2, 3, 4] {
        let d = random_dissipator(n, 3, &mut rng);
        let rho = random_density_matrix(n, &mut rng);
        let fast = d.apply(&rho).unwrap();
        let slow = dissipator_loop_oracle(&d, rho.as_matrix());
        assert!((&fast - &slow).max_abs() < 1e-12);
    }
}

#[test]
fn dissipator_dimension_mismatch() {
    let d = thermal_qubit_dissipator(1.0, 1.0, 1.0).unwrap();
    assert!(matches!(
        d.apply(&DensityMatrix::maximally_mixed(3)),
        Err(Error::DimensionMismatch { .. })
    ));
}

#[test]
fn empty_liouvillian_is_zero() {
    let sys = OpenSystem::new(ComplexMatrix::zeros(3, 3), vec![]).unwrap();
    assert_eq!(liouvillian_matrix(&sys).matrix.max_abs(), 0.0);
}

#[test]
fn pure_rotation_spectrum() {
    let e = 1.7;
    let h = sigma_z().scale_real(e / 2.0);
    let sys = OpenSystem::new(h, vec![]).unwrap();
    // L is anti-Hermitian here, so i·L is Hermitian with eigenvalues {−E, 0, 0, E}.
    let il = liouvillian_matrix(&sys).matrix.scale(I);
    let s = hermitian_eig(&il).unwrap();
    let expected = [-e, 0.0, 0.0, e];
    for (l, x) in s.eigenvalues.iter().zip(expected) {
        assert!((l - x).abs() < 1e-12);
    }
}

#[test]
fn liouvillian_matches_direct_action() {
    let mut rng = ChaCha8Rng::seed_from_u64(37);
    let mut h = qubit_hamiltonian(1.1);
    h[(0, 1)] = C64::new(0.3, -0.2);
    h[(1, 0)] = C64::new(0.3, 0.2);
    let sys = OpenSystem::new(h, vec![thermal_qubit_dissipator(1.1, 0.6, 0.4).unwrap()]).unwrap();
    let l = liouvillian_matrix(&sys);
    for _ in 0..20 {
        let x = random_matrix(2, &mut rng);
        let via_matrix = l.apply(&x).unwrap();
        assert!((&via_matrix - &sys.generator_apply(&x)).max_abs() < 1e-11);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(38);
    let d = random_dissipator(3, 2, &mut rng);
    let h = random_matrix(3, &mut rng).hermitian_part();
    let sys = OpenSystem::new(h, vec![d]).unwrap();
    let l = liouvillian_matrix(&sys);
    for _ in 0..20 {
        let x = random_matrix(3, &mut rng);
        assert!((&l.apply(&x).unwrap() - &sys.generator_apply(&x)).max_abs() < 1e-11);
    }
}

#[test]
fn steady_state_of_thermal_qubit_is_gibbs() {
    let (e, t) = (1.0, 0.4);
    let sys = thermal_qubit_system(e, t, 0.05).unwrap();
    let rho = steady_state(&sys).unwrap();
    let x = (-e / t).exp();
    assert!((rho.as_matrix()[(0, 0)].re - 1.0 / (1.0 + x)).abs() < 1e-12);
    assert!((rho.as_matrix()[(1, 1)].re - x / (1.0 + x)).abs() < 1e-12);
}

#[test]
fn steady_state_of_depolarizing_is_maximally_mixed() {
    let sys = OpenSystem::new(
        qubit_hamiltonian(1.0),
        vec![depolarizing_dissipator(0.3).unwrap()],
    )
    .unwrap();
    let rho = steady_state(&sys).unwrap();
    assert!((rho.as_matrix() - DensityMatrix::maximally_mixed(2).as_matrix()).max_abs() < 1e-12);
}

#[test]
fn two_bath_steady_state_against_long_propagation() {
    let e = 1.0;
    let (t_hot, t_cold) = (2.0, 0.3);
    let sys = OpenSystem::new(
        qubit_hamiltonian(e),
        vec![
            thermal_qubit_dissipator(e, t_hot, 0.3).unwrap(),
            thermal_qubit_dissipator(e, t_cold, 0.5).unwrap(),
        ],
    )
    .unwrap();
    let rho = steady_state(&sys).unwrap();
    assert!(sys.residual(&rho) <= 1e-10 * sys.max_rate());
    let excited = |t: f64| {
        let x = (-e / t).exp();
        x / (1.0 + x)
    };
    let p1 = rho.as_matrix()[(1, 1)].re;
    assert!(p1 > excited(t_cold) && p1 < excited(t_hot));

    let dt = 0.05 / sys.spectral_bound();
    let long = propagate(&sys, &DensityMatrix::basis_state(2, 0), 60.0, dt).unwrap();
    assert!((long.as_matrix() - rho.as_matrix()).max_abs() < 1e-9);
}

#[test]
fn degenerate_blocks_report_non_uniqueness() {
    // Two qubits' worth of levels that never talk to each other.
    let mut jumps = Vec::new();
    for (lo, hi) in [(0, 1), (2, 3)] {
        let mut down = ComplexMatrix::zeros(4, 4);
        down[(lo, hi)] = ONE;
        jumps.push(Jump::new(down.adjoint(), 0.2));
        jumps.push(Jump::new(down, 0.5));
    }
    let d = Dissipator::new("blocks", jumps).unwrap();
    let sys = OpenSystem::new(ComplexMatrix::from_diag(&[0.0, 1.0, 5.0, 6.0]), vec![d]).unwrap();
    assert_eq!(steady_state(&sys), Err(Error::NonUniqueSteadyState));
}

#[test]
fn propagate_zero_time_is_identity() {
    let sys = thermal_qubit_system(1.0, 1.0, 1.0).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(41);
    let rho = random_density_matrix(2, &mut rng);
    assert_eq!(propagate(&sys, &rho, 0.0, 0.01).unwrap(), rho);
}

#[test]
fn propagate_exponential_decay() {
    let gamma = 2.0;
    let d = Dissipator::new("decay", vec![Jump::new(sigma_minus(), gamma)]).unwrap();
    let sys = OpenSystem::new(qubit_hamiltonian(3.0), vec![d]).unwrap();
    let rho = propagate(&sys, &DensityMatrix::basis_state(2, 1), 1.0 / gamma, 0.001).unwrap();
    assert!((rho.as_matrix()[(1, 1)].re - (-1.0f64).exp()).abs() < 1e-8);
}

#[test]
fn propagate_rejects_large_steps() {
    let sys = thermal_qubit_system(1.0, 1.0, 1.0).unwrap();
    assert!(matches!(
        propagate(&sys, &DensityMatrix::basis_state(2, 0), 1.0, 0.5),
        Err(Error::StepTooLarge { .. })
    ));
}

#[test]
fn propagation_converges_to_steady_state() {
    let gamma = 0.5;
    let sys = thermal_qubit_system(1.0, 0.7, gamma).unwrap();
    let dt = 0.05 / sys.spectral_bound();
    let mut rng = ChaCha8Rng::seed_from_u64(43);
    let start = random_density_matrix(2, &mut rng);
    let rho = propagate(&sys, &start, 20.0 / gamma, dt).unwrap();
    let ss = steady_state(&sys).unwrap();
    assert!((rho.as_matrix() - ss.as_matrix()).max_abs() < 1e-7);
}

#[test]
fn thermal_qubit_rates() {
    let gamma = 0.3;
    let d = thermal_qubit_dissipator(2f64.ln(), 1.0, gamma).unwrap();
    assert!((d.jumps()[0].rate - 2.0 * gamma).abs() < 1e-15);
    assert!((d.jumps()[1].rate - gamma).abs() < 1e-15);

    let cold = thermal_qubit_dissipator(1.0, 0.0, gamma).unwrap();
    assert_eq!(cold.jumps()[0].rate, gamma);
    assert_eq!(cold.jumps()[1].rate, 0.0);
    assert_eq!(cold.invariant_state().unwrap(), &DensityMatrix::basis_state(2, 0));
}

#[test]
fn thermal_qubit_detailed_balance_random() {
    let mut rng = ChaCha8Rng::seed_from_u64(47);
    for _ in 0..50 {
        let e = rng.random_range(0.1..5.0);
        let t = rng.random_range(0.05..10.0);
        let g = rng.random_range(0.01..3.0);
        let d = thermal_qubit_dissipator(e, t, g).unwrap();
        let pi = gibbs_state(&qubit_hamiltonian(e), t).unwrap();
        assert!(d.apply(&pi).unwrap().max_abs() < 1e-12);
    }
}

#[test]
fn oscillator_at_zero_temperature() {
    let (d, warn) = thermal_oscillator_dissipator(1.0, 0.0, 0.4, 8).unwrap();
    assert_eq!(d.jumps().len(), 1);
    assert_eq!(d.jumps()[0].rate, 0.4);
    assert!(warn.is_none());
    assert_eq!(d.invariant_state().unwrap(), &DensityMatrix::basis_state(8, 0));
}

#[test]
fn oscillator_thermal_fixed_point_and_tail_warning() {
    let t = 1.0 / 1.5f64.ln(); // n̄ = 2 at ω = 1
    let (d, warn) = thermal_oscillator_dissipator(1.0, t, 0.3, 40).unwrap();
    // (2/3)^40 ≈ 9e-8 of the thermal weight lies above the cutoff.
    let tail = warn.unwrap().tail_mass;
    assert!((tail - (2.0f64 / 3.0).powi(40)).abs() < 1e-20);
    let pi = truncated_thermal_state(2.0, 40);
    assert!(d.apply(&pi).unwrap().max_abs() < 1e-12);
    let (_, warn) = thermal_oscillator_dissipator(1.0, t, 0.3, 60).unwrap();
    assert!(warn.is_none());
}

#[test]
fn oscillator_occupation_relaxes_at_gamma() {
    let nbar: f64 = 2.0;
    let gamma = 1.0;
    let n_trunc = 40;
    let t = 1.0 / (1.0 + 1.0 / nbar).ln();
    let (d, _) = thermal_oscillator_dissipator(1.0, t, gamma, n_trunc).unwrap();
    // Rotating frame: H = 0 keeps the step bound set by the dissipator alone.
    let sys = OpenSystem::new(ComplexMatrix::zeros(n_trunc, n_trunc), vec![d]).unwrap();
    let dt = 0.09 / sys.spectral_bound();
    let number_op = number(n_trunc);
    let mut rho = DensityMatrix::basis_state(n_trunc, 0);
    let (mut xs, mut ys) = (Vec::new(), Vec::new());
    let step = 0.1;
    for k in 1..=10 {
        rho = propagate(&sys, &rho, step, dt).unwrap();
        let n = rho.expectation(&number_op).re;
        xs.push(k as f64 * step);
        ys.push((nbar - n).ln());
    }
    let mx = xs.iter().sum::<f64>() / xs.len() as f64;
    let my = ys.iter().sum::<f64>() / ys.len() as f64;
    let slope = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum::<f64>()
        / xs.iter().map(|x| (x - mx).powi(2)).sum::<f64>();
    assert!((-slope - gamma).abs() < 0.01 * gamma, "fitted rate {}", -slope);
}

#[test]
fn depolarizing_examples() {
    let beta = 0.6;
    let d = depolarizing_dissipator(beta).unwrap();
    assert!(d.apply(&DensityMatrix::maximally_mixed(2)).unwrap().max_abs() < 1e-15);

    // Oracle: −(β/4) Σ_j [σ_j, [σ_j, ρ]] evaluated directly.
    let rho = DensityMatrix::basis_state(2, 0);
    let mut oracle = ComplexMatrix::zeros(2, 2);
    for s in [sigma_x(), sigma_y(), sigma_z()] {
        oracle -= &s.commutator(&s.commutator(rho.as_matrix())).scale_real(beta / 4.0);
    }
    let out = d.apply(&rho).unwrap();
    assert!((&out - &oracle).max_abs() < 1e-15);
    // Expanding by hand: 2β(I/2 − |0⟩⟨0|).
    let hand = ComplexMatrix::from_diag(&[-beta, beta]);
    assert!((&out - &hand).max_abs() < 1e-15);
}

#[test]
fn depolarizing_bloch_shrink_rate() {
    let beta = 0.25;
    let sys = OpenSystem::new(
        ComplexMatrix::zeros(2, 2),
        vec![depolarizing_dissipator(beta).unwrap()],
    )
    .unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(53);
    let psi = crate::linalg::haar_random_vector(2, &mut rng);
    let rho0 = DensityMatrix::pure(&psi).unwrap();
    let bloch = |r: &DensityMatrix| {
        let x = r.expectation(&sigma_x()).re;
        let y = r.expectation(&sigma_y()).re;
        let z = r.expectation(&sigma_z()).re;
        (x * x + y * y + z * z).sqrt()
    };
    let t = 1.0;
    let rho = propagate(&sys, &rho0, t, 1e-3).unwrap();
    let rate = -(bloch(&rho) / bloch(&rho0)).ln() / t;
    // Each Pauli at β/2 damps the two transverse Bloch components at 2·(β/2)·2.
    assert!((rate - 2.0 * beta).abs() < 1e-8, "rate {rate}");
}

#[test]
fn invariant_states() {
    let d = thermal_qubit_dissipator(1.0, 0.5, 0.2).unwrap();
    let pi = invariant_state(&d, 2).unwrap();
    assert!((pi.as_matrix() - d.invariant_state().unwrap().as_matrix()).max_abs() < 1e-12);

    let pi = invariant_state(&depolarizing_dissipator(1.0).unwrap(), 2).unwrap();
    assert!((pi.as_matrix() - DensityMatrix::maximally_mixed(2).as_matrix()).max_abs() < 1e-12);

    let mut rng = ChaCha8Rng::seed_from_u64(59);
    let d = random_dissipator(3, 3, &mut rng);
    let pi = invariant_state(&d, 3).unwrap();
    assert!(d.apply(&pi).unwrap().max_abs() <= 1e-10 * d.max_rate());
    assert!(invariant_state(&d, 2).is_err());
}

#[test]
fn dressed_dissipator_reduces_to_thermal_qubit() {
    let (e, t, g) = (1.0, 0.8, 0.3);
    let d = dressed_thermal_dissipator("bath", &qubit_hamiltonian(e), &sigma_x(), g, t).unwrap();
    let reference = thermal_qubit_dissipator(e, t, g).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(61);
    for _ in 0..5 {
        let rho = random_density_matrix(2, &mut rng);
        let diff = &d.apply(&rho).unwrap() - &reference.apply(&rho).unwrap();
        assert!(diff.max_abs() < 1e-14);
    }
    assert!(d.invariant_state().is_some());
}

#[test]
fn dressed_dissipator_joint_gibbs_fixed_point() {
    let h = &kron(&qubit_hamiltonian(1.0), &ComplexMatrix::identity(2))
        + &kron(&ComplexMatrix::identity(2), &qubit_hamiltonian(3.0));
    let mut h = h;
    h[(0, 3)] = C64::new(0.2, 0.0);
    h[(3, 0)] = C64::new(0.2, 0.0);
    let x = kron(&sigma_x(), &ComplexMatrix::identity(2));
    let d = dressed_thermal_dissipator("bath", &h, &x, 0.4, 0.9).unwrap();
    let gibbs = gibbs_state(&h, 0.9).unwrap();
    assert!(d.apply(&gibbs).unwrap().max_abs() < 1e-12);
}

mod props {
    use super::*;
    use proptest::prelude::*;

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn trace_and_hermiticity_preserved(seed in any::<u64>(), n in 2usize..5, k in 1usize..4) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let d = random_dissipator(n, k, &mut rng);
            let rho = random_density_matrix(n, &mut rng);
            let out = d.apply(&rho).unwrap();
            prop_assert!(out.trace().norm() < 1e-12);
            prop_assert!(out.hermitian_deviation() < 1e-12);
        }

        #[test]
        fn propagation_stays_positive(seed in any::<u64>()) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let d = random_dissipator(3, 2, &mut rng);
            let h = random_matrix(3, &mut rng).hermitian_part();
            let sys = OpenSystem::new(h, vec![d]).unwrap();
            let psi = crate::linalg::haar_random_vector(3, &mut rng);
            let rho0 = DensityMatrix::pure(&psi).unwrap();
            let dt = 0.05 / sys.spectral_bound();
            let rho = propagate(&sys, &rho0, 0.5, dt).unwrap();
            let min = hermitian_eig(rho.as_matrix()).unwrap().eigenvalues[0];
            prop_assert!(min >= -1e-8);
        }
    }
}
