//! Standard operators. Qubit basis ordering is `|0⟩` (ground), `|1⟩`
//! (excited); Fock spaces are truncated at `n` levels `|0⟩ … |n−1⟩`.

use crate::linalg::{ComplexMatrix, C64, I, ONE};

pub fn sigma_x() -> ComplexMatrix {
    let mut m = ComplexMatrix::zeros(2, 2);
    m[(0, 1)] = ONE;
    m[(1, 0)] = ONE;
    m
}

pub fn sigma_y() -> ComplexMatrix {
    let mut m = ComplexMatrix::zeros(2, 2);
    m[(0, 1)] = -I;
    m[(1, 0)] = I;
    m
}

/// `diag(1, −1)`.
pub fn sigma_z() -> ComplexMatrix {
    ComplexMatrix::from_diag(&[1.0, -1.0])
}

/// `|0⟩⟨1|`, lowers the excited state to the ground state.
pub fn sigma_minus() -> ComplexMatrix {
    let mut m = ComplexMatrix::zeros(2, 2);
    m[(0, 1)] = ONE;
    m
}

/// `|1⟩⟨0|`.
pub fn sigma_plus() -> ComplexMatrix {
    sigma_minus().adjoint()
}

/// Energy-ordered Pauli z, `diag(−1, 1)`: `E·σ/2` puts `|0⟩` at `−E/2`.
pub fn energy_sigma_z() -> ComplexMatrix {
    ComplexMatrix::from_diag(&[-1.0, 1.0])
}

/// Qubit Hamiltonian `diag(0, E)`.
pub fn qubit_hamiltonian(gap: f64) -> ComplexMatrix {
    ComplexMatrix::from_diag(&[0.0, gap])
}

/// Truncated annihilation operator, `a|k⟩ = √k |k−1⟩`.
pub fn annihilation(n: usize) -> ComplexMatrix {
    let mut m = ComplexMatrix::zeros(n, n);
    for k in 1..n {
        m[(k - 1, k)] = C64::new((k as f64).sqrt(), 0.0);
    }
    m
}

pub fn number(n: usize) -> ComplexMatrix {
    ComplexMatrix::from_diag(&(0..n).map(|k| k as f64).collect::<Vec<_>>())
}

/// Bose–Einstein occupation `1/(e^{ω/T} − 1)`; zero at `T = 0`.
pub fn bose_occupation(frequency: f64, temperature: f64) -> f64 {
    if temperature <= 0.0 {
        return 0.0;
    }
    1.0 / (frequency / temperature).exp_m1()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ladder_commutator() {
        let a = annihilation(6);
        let c = a.matmul(&a.adjoint()).commutator(&ComplexMatrix::identity(6));
        assert_eq!(c.max_abs(), 0.0);
        let comm = &a.matmul(&a.adjoint()) - &a.adjoint().matmul(&a);
        for k in 0..5 {
            assert!((comm[(k, k)] - ONE).norm() < 1e-14);
        }
        assert!((&a.adjoint().matmul(&a) - &number(6)).max_abs() < 1e-14);
    }

    #[test]
    fn bose_occupation_at_ln2() {
        assert!((bose_occupation(2f64.ln(), 1.0) - 1.0).abs() < 1e-15);
        assert_eq!(bose_occupation(1.0, 0.0), 0.0);
    }

    #[test]
    fn pauli_algebra() {
        let xy = sigma_x().matmul(&sigma_y());
        assert!((&xy - &sigma_z().scale(I)).max_abs() < 1e-15);
        assert_eq!(sigma_minus().matmul(&sigma_plus()), ComplexMatrix::from_diag(&[1.0, 0.0]));
    }
}
