use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::linalg::{hermitian_eig, ComplexMatrix, C64, ONE};

/// Tolerance for Hermiticity, unit trace and positivity checks on states.
pub const STATE_TOL: f64 = 1e-10;

/// Hermitian, positive semidefinite, unit-trace matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix(ComplexMatrix);

impl DensityMatrix {
    /// Validates Hermiticity, unit trace and positivity (all to 1e-10) and
    /// stores the Hermitian part.
    pub fn new(m: ComplexMatrix) -> Result<Self> {
        m.require_square("density matrix")?;
        let dev = m.hermitian_deviation();
        if dev > STATE_TOL {
            return Err(Error::InvalidDensityMatrix(format!(
                "not Hermitian (deviation {dev:.3e})"
            )));
        }
        let tr = m.trace();
        if (tr - ONE).norm() > STATE_TOL {
            return Err(Error::InvalidDensityMatrix(format!(
                "trace is {:.12} + {:.3e}i, expected 1",
                tr.re, tr.im
            )));
        }
        let m = m.hermitian_part();
        let min = hermitian_eig(&m)?.eigenvalues[0];
        if min < -STATE_TOL {
            return Err(Error::InvalidDensityMatrix(format!(
                "negative eigenvalue {min:.3e}"
            )));
        }
        Ok(Self(m))
    }

    /// Wraps a matrix the caller already knows to be a state.
    pub fn from_matrix_unchecked(m: ComplexMatrix) -> Self {
        Self(m)
    }

    pub fn from_populations(p: &[f64]) -> Result<Self> {
        Self::new(ComplexMatrix::from_diag(p))
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        Self(ComplexMatrix::identity(dim).scale_real(1.0 / dim as f64))
    }

    /// `|k⟩⟨k|`.
    pub fn basis_state(dim: usize, k: usize) -> Self {
        let mut m = ComplexMatrix::zeros(dim, dim);
        m[(k, k)] = ONE;
        Self(m)
    }

    pub fn pure(psi: &[C64]) -> Result<Self> {
        let norm = psi.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 {
            return Err(Error::InvalidParameter("zero state vector".into()));
        }
        let psi: Vec<C64> = psi.iter().map(|z| z / norm).collect();
        Ok(Self(ComplexMatrix::outer(&psi, &psi)))
    }

    pub fn dim(&self) -> usize {
        self.0.rows()
    }

    pub fn as_matrix(&self) -> &ComplexMatrix {
        &self.0
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.0
    }

    /// `Tr[ρ X]`.
    pub fn expectation(&self, x: &ComplexMatrix) -> C64 {
        self.0.trace_product(x)
    }
}

/// Thermal state `e^{−H/T}/Z` (with `k_B = 1`). `T = 0` gives the
/// projector onto the ground space.
pub fn gibbs_state(h: &ComplexMatrix, temperature: f64) -> Result<DensityMatrix> {
    if !(temperature >= 0.0) {
        return Err(Error::InvalidParameter(format!(
            "temperature must be non-negative, got {temperature}"
        )));
    }
    let spectrum = hermitian_eig(h)?;
    let e0 = spectrum.eigenvalues[0];
    let weight = |e: f64| {
        if temperature == 0.0 {
            if (e - e0).abs() <= 1e-12 * e0.abs().max(1.0) {
                1.0
            } else {
                0.0
            }
        } else {
            (-(e - e0) / temperature).exp()
        }
    };
    let z: f64 = spectrum.eigenvalues.iter().map(|&e| weight(e)).sum();
    let m = spectrum.map(|e| weight(e) / z);
    Ok(DensityMatrix(m.hermitian_part()))
}

/// Random full-rank state `G G† / Tr[G G†]` with complex Ginibre `G`.
pub fn random_density_matrix<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> DensityMatrix {
    let g = ComplexMatrix::from_fn(dim, dim, |_, _| {
        let re: f64 = StandardNormal.sample(rng);
        let im: f64 = StandardNormal.sample(rng);
        C64::new(re, im)
    });
    let m = g.matmul(&g.adjoint());
    let tr = m.trace().re;
    DensityMatrix(m.scale_real(1.0 / tr).hermitian_part())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validates_states() {
        assert!(DensityMatrix::from_populations(&[0.5, 0.5]).is_ok());
        assert!(DensityMatrix::from_populations(&[0.6, 0.5]).is_err());
        assert!(DensityMatrix::from_populations(&[1.2, -0.2]).is_err());
        let mut m = ComplexMatrix::identity(2).scale_real(0.5);
        m[(0, 1)] = C64::new(0.0, 0.1);
        assert!(DensityMatrix::new(m).is_err());
    }

    #[test]
    fn gibbs_qubit_populations() {
        let (e, t) = (1.0, 0.7);
        let rho = gibbs_state(&ComplexMatrix::from_diag(&[0.0, e]), t).unwrap();
        let x = (-e / t).exp();
        assert!((rho.as_matrix()[(0, 0)].re - 1.0 / (1.0 + x)).abs() < 1e-15);
        assert!((rho.as_matrix()[(1, 1)].re - x / (1.0 + x)).abs() < 1e-15);
        let ground = gibbs_state(&ComplexMatrix::from_diag(&[0.0, e]), 0.0).unwrap();
        assert_eq!(ground, DensityMatrix::basis_state(2, 0));
    }

    #[test]
    fn gibbs_handles_degenerate_levels() {
        let rho = gibbs_state(&ComplexMatrix::from_diag(&[0.0, 0.0, 1.0]), 1.0).unwrap();
        let z = 2.0 + (-1.0f64).exp();
        assert!((rho.as_matrix()[(1, 1)].re - 1.0 / z).abs() < 1e-15);
    }
}
