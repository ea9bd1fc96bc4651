//! Sparse Liouvillian restricted to a block of density-matrix elements.
//!
//! For generators with a conserved charge (e.g. total excitation number
//! under a beam-splitter coupling with single-quantum damping) the steady
//! state lives entirely in the charge-diagonal block `{(i, j) : q(i) = q(j)}`.
//! Restricting to that block keeps two 25-level modes (625² elements) down to
//! about 10⁴ unknowns, small enough for matrix-free relaxation.

use crate::error::{Error, Result};
use crate::lindblad::Jump;
use crate::linalg::{ComplexMatrix, C64, I, ONE, ZERO};

const NOT_IN_SECTOR: usize = usize::MAX;

/// CSR matrix of the generator on the selected `ρ_ij` elements.
#[derive(Debug, Clone)]
pub struct SectorLiouvillian {
    dim: usize,
    basis: Vec<(usize, usize)>,
    index: Vec<usize>,
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    values: Vec<C64>,
}

/// Outcome of [`SectorLiouvillian::relax`].
#[derive(Debug, Clone)]
pub struct Relaxation {
    pub state: Vec<C64>,
    /// `‖L(ρ)‖_max` at exit.
    pub residual: f64,
    pub elapsed: f64,
    pub steps: usize,
}

fn nonzeros(m: &ComplexMatrix) -> Vec<(usize, usize, C64)> {
    let mut out = Vec::new();
    for i in 0..m.rows() {
        for j in 0..m.cols() {
            let z = m[(i, j)];
            if z != ZERO {
                out.push((i, j, z));
            }
        }
    }
    out
}

impl SectorLiouvillian {
    /// Builds `−i[H, ·] + Σ D` on the elements `(i, j)` with `in_sector(i, j)`.
    /// Fails if the generator couples the block to anything outside it.
    pub fn build(
        hamiltonian: &ComplexMatrix,
        jumps: &[Jump],
        in_sector: impl Fn(usize, usize) -> bool,
    ) -> Result<Self> {
        let dim = hamiltonian.require_square("sector Hamiltonian")?;
        let mut basis = Vec::new();
        let mut index = vec![NOT_IN_SECTOR; dim * dim];
        for i in 0..dim {
            for j in 0..dim {
                if in_sector(i, j) {
                    index[i * dim + j] = basis.len();
                    basis.push((i, j));
                }
            }
        }

        // Column-wise sparsity: by_col[k] lists (i, X_ik); by_row[l] lists (j, X_lj).
        struct Sparse {
            by_col: Vec<Vec<(usize, C64)>>,
            by_row: Vec<Vec<(usize, C64)>>,
        }
        let sparse = |m: &ComplexMatrix| {
            let mut by_col = vec![Vec::new(); dim];
            let mut by_row = vec![Vec::new(); dim];
            for (i, j, z) in nonzeros(m) {
                by_col[j].push((i, z));
                by_row[i].push((j, z));
            }
            Sparse { by_col, by_row }
        };

        let h = sparse(hamiltonian);
        let mut ops = Vec::new();
        for jump in jumps {
            jump.operator.require_dim(dim, "sector jump operator")?;
            if jump.rate == 0.0 {
                continue;
            }
            let product = jump.operator.adjoint().matmul(&jump.operator);
            ops.push((jump.rate, sparse(&jump.operator), sparse(&product)));
        }

        let mut triplets: Vec<(usize, usize, C64)> = Vec::new();
        let mut push = |row: (usize, usize), col: usize, v: C64| -> Result<()> {
            let r = index[row.0 * dim + row.1];
            if r == NOT_IN_SECTOR {
                return Err(Error::InvalidParameter(format!(
                    "generator maps sector element into ({}, {}) outside the sector",
                    row.0, row.1
                )));
            }
            triplets.push((r, col, v));
            Ok(())
        };

        for (col, &(k, l)) in basis.iter().enumerate() {
            for &(i, hik) in &h.by_col[k] {
                push((i, l), col, -I * hik)?;
            }
            for &(j, hlj) in &h.by_row[l] {
                push((k, j), col, I * hlj)?;
            }
            for (rate, a, m) in &ops {
                // A ρ A†: (i, j) gets A_ik conj(A_jl).
                for &(i, aik) in &a.by_col[k] {
                    for &(j, ajl) in &a.by_col[l] {
                        push((i, j), col, aik * ajl.conj() * *rate)?;
                    }
                }
                for &(i, mik) in &m.by_col[k] {
                    push((i, l), col, mik * (-0.5 * rate))?;
                }
                for &(j, mlj) in &m.by_row[l] {
                    push((k, j), col, mlj * (-0.5 * rate))?;
                }
            }
        }

        triplets.sort_unstable_by_key(|&(r, c, _)| (r, c));
        let mut row_ptr = vec![0usize; basis.len() + 1];
        let mut cols = Vec::with_capacity(triplets.len());
        let mut values: Vec<C64> = Vec::with_capacity(triplets.len());
        let mut last: Option<(usize, usize)> = None;
        for (r, c, v) in triplets {
            if last == Some((r, c)) {
                *values.last_mut().expect("merged entry") += v;
            } else {
                cols.push(c);
                values.push(v);
                row_ptr[r + 1] += 1;
                last = Some((r, c));
            }
        }
        for r in 0..basis.len() {
            row_ptr[r + 1] += row_ptr[r];
        }
        Ok(Self {
            dim,
            basis,
            index,
            row_ptr,
            cols,
            values,
        })
    }

    pub fn len(&self) -> usize {
        self.basis.len()
    }

    pub fn is_empty(&self) -> bool {
        self.basis.is_empty()
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn basis(&self) -> &[(usize, usize)] {
        &self.basis
    }

    /// Position of `ρ_ij` in the sector vector.
    pub fn position(&self, i: usize, j: usize) -> Option<usize> {
        let k = self.index[i * self.dim + j];
        (k != NOT_IN_SECTOR).then_some(k)
    }

    pub fn apply(&self, x: &[C64], y: &mut [C64]) {
        for (r, out) in y.iter_mut().enumerate() {
            let mut acc = ZERO;
            for k in self.row_ptr[r]..self.row_ptr[r + 1] {
                acc += self.values[k] * x[self.cols[k]];
            }
            *out = acc;
        }
    }

    /// Gershgorin bound on the spectral radius.
    pub fn gershgorin_bound(&self) -> f64 {
        (0..self.len())
            .map(|r| {
                self.values[self.row_ptr[r]..self.row_ptr[r + 1]]
                    .iter()
                    .map(|z| z.norm())
                    .sum::<f64>()
            })
            .fold(0.0, f64::max)
    }

    /// Sector vector of a dense matrix (elements outside the sector dropped).
    pub fn restrict(&self, m: &ComplexMatrix) -> Vec<C64> {
        self.basis.iter().map(|&(i, j)| m[(i, j)]).collect()
    }

    pub fn to_dense(&self, x: &[C64]) -> ComplexMatrix {
        let mut m = ComplexMatrix::zeros(self.dim, self.dim);
        for (&(i, j), &z) in self.basis.iter().zip(x) {
            m[(i, j)] = z;
        }
        m
    }

    fn trace(&self, x: &[C64]) -> C64 {
        self.basis
            .iter()
            .zip(x)
            .filter(|((i, j), _)| i == j)
            .map(|(_, &z)| z)
            .sum()
    }

    /// RK4 relaxation from `initial` until `‖L(ρ)‖_max ≤ tol` or `max_time`.
    /// The step is `1/R` with `R` the Gershgorin bound, well inside the RK4
    /// stability region for a dissipative generator.
    pub fn relax(&self, initial: Vec<C64>, tol: f64, max_time: f64) -> Result<Relaxation> {
        if initial.len() != self.len() {
            return Err(Error::DimensionMismatch {
                context: "sector relaxation",
                expected: self.len(),
                found: initial.len(),
            });
        }
        let bound = self.gershgorin_bound();
        if bound == 0.0 {
            return Err(Error::NonUniqueSteadyState);
        }
        let dt = 1.0 / bound;
        let n = self.len();
        let mut x = initial;
        let (mut k1, mut k2, mut k3, mut k4) =
            (vec![ZERO; n], vec![ZERO; n], vec![ZERO; n], vec![ZERO; n]);
        let mut tmp = vec![ZERO; n];
        let mut elapsed = 0.0;
        let mut steps = 0usize;
        loop {
            self.apply(&x, &mut k1);
            let residual = k1.iter().map(|z| z.norm()).fold(0.0, f64::max);
            if residual <= tol || elapsed >= max_time {
                if residual > tol {
                    return Err(Error::SolverFailure(format!(
                        "sector relaxation did not reach residual {tol:.1e} by t = {elapsed:.3e} \
                         (residual {residual:.3e})"
                    )));
                }
                let tr = self.trace(&x);
                x.iter_mut().for_each(|z| *z /= tr);
                return Ok(Relaxation {
                    state: x,
                    residual,
                    elapsed,
                    steps,
                });
            }
            // Check the residual every 50 steps to amortize the extra apply.
            for _ in 0..50 {
                self.apply(&x, &mut k1);
                axpy(&x, 0.5 * dt, &k1, &mut tmp);
                self.apply(&tmp, &mut k2);
                axpy(&x, 0.5 * dt, &k2, &mut tmp);
                self.apply(&tmp, &mut k3);
                axpy(&x, dt, &k3, &mut tmp);
                self.apply(&tmp, &mut k4);
                for i in 0..n {
                    x[i] += (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]) * (dt / 6.0);
                }
                elapsed += dt;
                steps += 1;
            }
            let tr = self.trace(&x);
            if (tr - ONE).norm() > 1e-6 {
                return Err(Error::TraceDrift {
                    drift: (tr - ONE).norm(),
                });
            }
        }
    }
}

fn axpy(x: &[C64], a: f64, y: &[C64], out: &mut [C64]) {
    for ((o, &xi), &yi) in out.iter_mut().zip(x).zip(y) {
        *o = xi + yi * a;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::density::random_density_matrix;
    use crate::lindblad::{thermal_qubit_dissipator, OpenSystem};
    use crate::operators::qubit_hamiltonian;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn full_sector_matches_dense_generator() {
        let d = thermal_qubit_dissipator(1.0, 0.8, 0.3).unwrap();
        let mut h = qubit_hamiltonian(1.0);
        h[(0, 1)] = C64::new(0.2, 0.1);
        h[(1, 0)] = C64::new(0.2, -0.1);
        let sys = OpenSystem::new(h.clone(), vec![d.clone()]).unwrap();
        let sector = SectorLiouvillian::build(&h, d.jumps(), |_, _| true).unwrap();
        assert_eq!(sector.len(), 4);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let rho = random_density_matrix(2, &mut rng);
        let mut y = vec![ZERO; 4];
        sector.apply(&sector.restrict(rho.as_matrix()), &mut y);
        let expected = sys.generator_apply(rho.as_matrix());
        assert!((&sector.to_dense(&y) - &expected).max_abs() < 1e-14);
    }

    #[test]
    fn rejects_non_invariant_sector() {
        let mut h = qubit_hamiltonian(1.0);
        h[(0, 1)] = ONE;
        h[(1, 0)] = ONE;
        let r = SectorLiouvillian::build(&h, &[], |i, j| i == j);
        assert!(r.is_err());
    }

    #[test]
    fn relaxation_reaches_gibbs() {
        let d = thermal_qubit_dissipator(1.0, 0.5, 1.0).unwrap();
        let h = qubit_hamiltonian(1.0);
        let sector = SectorLiouvillian::build(&h, d.jumps(), |i, j| i == j).unwrap();
        let out = sector.relax(vec![ONE, ZERO], 1e-12, 100.0).unwrap();
        let p1 = out.state[1].re;
        let x = (-2.0f64).exp();
        assert!((p1 - x / (1.0 + x)).abs() < 1e-11);
    }
}
