//! Dense complex linear algebra.
//!
//! Everything here works on small (dimension up to a few hundred) row-major
//! matrices: cyclic Jacobi for Hermitian eigenproblems, spectral matrix
//! functions, Kronecker products, partial traces and LU solves with partial
//! pivoting.

use std::fmt;
use std::ops::{Add, AddAssign, Index, IndexMut, Mul, Neg, Sub, SubAssign};

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::density::DensityMatrix;
use crate::error::{Error, Result};

pub type C64 = Complex64;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const I: C64 = C64::new(0.0, 1.0);

/// Default eigenvalue floor used when taking logarithms of density matrices.
pub const DEFAULT_EIG_FLOOR: f64 = 1e-14;

/// Tolerance on `‖A − A†‖_max` (relative to `max(1, ‖A‖_max)`) accepted by
/// [`hermitian_eig`].
pub const HERMITIAN_TOL: f64 = 1e-12;

/// Dense complex matrix stored row-major.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl ComplexMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<C64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch {
                context: "matrix construction",
                expected: rows * cols,
                found: data.len(),
            });
        }
        if data.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::InvalidParameter(
                "matrix entries must be finite".into(),
            ));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![ZERO; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = ONE;
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    /// Square matrix with the given real diagonal.
    pub fn from_diag(diag: &[f64]) -> Self {
        let n = diag.len();
        let mut m = Self::zeros(n, n);
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = C64::new(d, 0.0);
        }
        m
    }

    /// Matrix from real row-major entries.
    pub fn from_real(rows: usize, cols: usize, entries: &[f64]) -> Result<Self> {
        Self::new(
            rows,
            cols,
            entries.iter().map(|&x| C64::new(x, 0.0)).collect(),
        )
    }

    /// Outer product `|u⟩⟨v|`.
    pub fn outer(u: &[C64], v: &[C64]) -> Self {
        Self::from_fn(u.len(), v.len(), |i, j| u[i] * v[j].conj())
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    pub fn into_vec(self) -> Vec<C64> {
        self.data
    }

    pub fn row(&self, i: usize) -> &[C64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<C64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn diagonal(&self) -> Vec<C64> {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).collect()
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn conj(&self) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z.conj()).collect(),
        }
    }

    pub fn scale(&self, s: C64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&z| z * s).collect(),
        }
    }

    pub fn scale_real(&self, s: f64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&z| z * s).collect(),
        }
    }

    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(
            self.cols, other.rows,
            "matmul: inner dimensions {}x{} * {}x{}",
            self.rows, self.cols, other.rows, other.cols
        );
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            let out_row = &mut out.data[i * other.cols..(i + 1) * other.cols];
            for k in 0..self.cols {
                let a = self.data[i * self.cols + k];
                if a == ZERO {
                    continue;
                }
                let b_row = &other.data[k * other.cols..(k + 1) * other.cols];
                for (o, &b) in out_row.iter_mut().zip(b_row) {
                    *o += a * b;
                }
            }
        }
        out
    }

    pub fn trace(&self) -> C64 {
        self.diagonal().into_iter().sum()
    }

    /// `Tr[self · other]` without forming the product.
    pub fn trace_product(&self, other: &Self) -> C64 {
        assert!(self.cols == other.rows && self.rows == other.cols);
        let mut acc = ZERO;
        for i in 0..self.rows {
            for k in 0..self.cols {
                acc += self[(i, k)] * other[(k, i)];
            }
        }
        acc
    }

    /// Largest entry modulus, `‖A‖_max`.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Maximum absolute row sum (induced ∞-norm).
    pub fn inf_norm(&self) -> f64 {
        (0..self.rows)
            .map(|i| self.row(i).iter().map(|z| z.norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    /// `‖A − A†‖_max`.
    pub fn hermitian_deviation(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let mut dev: f64 = 0.0;
        for i in 0..self.rows {
            for j in i..self.cols {
                dev = dev.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        dev
    }

    /// Hermitian part `(A + A†)/2`.
    pub fn hermitian_part(&self) -> Self {
        assert!(self.is_square());
        Self::from_fn(self.rows, self.cols, |i, j| {
            (self[(i, j)] + self[(j, i)].conj()) * 0.5
        })
    }

    pub fn commutator(&self, other: &Self) -> Self {
        &self.matmul(other) - &other.matmul(self)
    }

    pub fn anticommutator(&self, other: &Self) -> Self {
        &self.matmul(other) + &other.matmul(self)
    }

    /// Column-stacking vectorization: `vec(A)[j·rows + i] = A[i, j]`.
    pub fn vectorize(&self) -> Vec<C64> {
        let mut v = Vec::with_capacity(self.data.len());
        for j in 0..self.cols {
            for i in 0..self.rows {
                v.push(self[(i, j)]);
            }
        }
        v
    }

    /// Inverse of [`ComplexMatrix::vectorize`] for an `n × n` matrix.
    pub fn unvectorize(v: &[C64], n: usize) -> Result<Self> {
        if v.len() != n * n {
            return Err(Error::DimensionMismatch {
                context: "unvectorize",
                expected: n * n,
                found: v.len(),
            });
        }
        Ok(Self::from_fn(n, n, |i, j| v[j * n + i]))
    }

    /// Matrix-vector product.
    pub fn apply(&self, v: &[C64]) -> Vec<C64> {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|i| self.row(i).iter().zip(v).map(|(&a, &b)| a * b).sum())
            .collect()
    }

    pub(crate) fn require_square(&self, context: &'static str) -> Result<usize> {
        if self.is_square() {
            Ok(self.rows)
        } else {
            Err(Error::DimensionMismatch {
                context,
                expected: self.rows,
                found: self.cols,
            })
        }
    }

    pub(crate) fn require_dim(&self, n: usize, context: &'static str) -> Result<()> {
        if self.rows == n && self.cols == n {
            Ok(())
        } else {
            Err(Error::DimensionMismatch {
                context,
                expected: n,
                found: if self.rows != n { self.rows } else { self.cols },
            })
        }
    }
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            write!(f, "  ")?;
            for z in self.row(i) {
                write!(f, "{:+.6e}{:+.6e}i  ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = C64;

    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.data[i * self.cols + j]
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert!(self.rows == rhs.rows && self.cols == rhs.cols);
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert!(self.rows == rhs.rows && self.cols == rhs.cols);
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        self.matmul(rhs)
    }
}

impl Neg for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn neg(self) -> ComplexMatrix {
        self.scale_real(-1.0)
    }
}

impl AddAssign<&ComplexMatrix> for ComplexMatrix {
    fn add_assign(&mut self, rhs: &ComplexMatrix) {
        assert!(self.rows == rhs.rows && self.cols == rhs.cols);
        for (a, b) in self.data.iter_mut().zip(&rhs.data) {
            *a += b;
        }
    }
}

impl SubAssign<&ComplexMatrix> for ComplexMatrix {
    fn sub_assign(&mut self, rhs: &ComplexMatrix) {
        assert!(self.rows == rhs.rows && self.cols == rhs.cols);
        for (a, b) in self.data.iter_mut().zip(&rhs.data) {
            *a -= b;
        }
    }
}

/// Eigen-decomposition `A = U Λ U†` of a Hermitian matrix.
#[derive(Debug, Clone)]
pub struct HermitianSpectrum {
    /// Ascending.
    pub eigenvalues: Vec<f64>,
    /// Eigenvectors as columns.
    pub eigenvectors: ComplexMatrix,
}

impl HermitianSpectrum {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    /// `U f(Λ) U†`.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> ComplexMatrix {
        let n = self.dim();
        let u = &self.eigenvectors;
        let fl: Vec<f64> = self.eigenvalues.iter().map(|&l| f(l)).collect();
        ComplexMatrix::from_fn(n, n, |i, j| {
            (0..n).map(|k| u[(i, k)] * fl[k] * u[(j, k)].conj()).sum()
        })
    }

    pub fn reconstruct(&self) -> ComplexMatrix {
        self.map(|l| l)
    }

    /// Diagonal of `U† X U`, i.e. `⟨u_k|X|u_k⟩` for each eigenvector.
    pub fn diagonal_in_eigenbasis(&self, x: &ComplexMatrix) -> Vec<C64> {
        let n = self.dim();
        let u = &self.eigenvectors;
        (0..n)
            .map(|k| {
                let mut acc = ZERO;
                for i in 0..n {
                    let ui = u[(i, k)].conj();
                    if ui == ZERO {
                        continue;
                    }
                    for j in 0..n {
                        acc += ui * x[(i, j)] * u[(j, k)];
                    }
                }
                acc
            })
            .collect()
    }
}

const JACOBI_MAX_SWEEPS: usize = 100;

/// Hermitian eigendecomposition by cyclic complex Jacobi rotations.
///
/// The input is symmetrized before decomposing. Iteration stops once the
/// off-diagonal Frobenius mass drops below `1e-14 · ‖A‖_F`.
pub fn hermitian_eig(a: &ComplexMatrix) -> Result<HermitianSpectrum> {
    let n = a.require_square("hermitian_eig")?;
    let deviation = a.hermitian_deviation();
    if deviation > HERMITIAN_TOL * a.max_abs().max(1.0) {
        return Err(Error::NotHermitian { deviation });
    }
    let mut m = a.hermitian_part();
    let mut v = ComplexMatrix::identity(n);
    let norm = m.frobenius_norm();
    let threshold = 1e-14 * norm;

    let mut converged = n <= 1 || norm == 0.0;
    for _ in 0..JACOBI_MAX_SWEEPS {
        if converged {
            break;
        }
        for p in 0..n - 1 {
            for q in p + 1..n {
                rotate(&mut m, &mut v, p, q);
            }
        }
        converged = off_diagonal_norm(&m) <= threshold;
    }
    if !converged {
        return Err(Error::SolverFailure(format!(
            "Jacobi eigensolver did not converge in {JACOBI_MAX_SWEEPS} sweeps"
        )));
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| m[(i, i)].re.total_cmp(&m[(j, j)].re));
    let eigenvalues = order.iter().map(|&k| m[(k, k)].re).collect();
    let eigenvectors = ComplexMatrix::from_fn(n, n, |i, j| v[(i, order[j])]);
    Ok(HermitianSpectrum {
        eigenvalues,
        eigenvectors,
    })
}

fn off_diagonal_norm(m: &ComplexMatrix) -> f64 {
    let n = m.rows();
    let mut acc = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                acc += m[(i, j)].norm_sqr();
            }
        }
    }
    acc.sqrt()
}

/// One Jacobi rotation annihilating `m[p, q]`, accumulated into `v`.
fn rotate(m: &mut ComplexMatrix, v: &mut ComplexMatrix, p: usize, q: usize) {
    let apq = m[(p, q)];
    let abs = apq.norm();
    if abs == 0.0 {
        return;
    }
    let app = m[(p, p)].re;
    let aqq = m[(q, q)].re;
    // Below this the rotation angle underflows and the entry is negligible.
    if abs < 1e-300 || abs <= f64::EPSILON * 1e-3 * (app.abs() + aqq.abs()) {
        m[(p, q)] = ZERO;
        m[(q, p)] = ZERO;
        return;
    }
    let phase = apq / abs;
    let theta = (aqq - app) / (2.0 * abs);
    let t = if theta == 0.0 {
        1.0
    } else {
        theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
    };
    let c = 1.0 / (t * t + 1.0).sqrt();
    let s = t * c;

    // J = diag(1, conj(phase)) · [[c, s], [-s, c]] acting on (p, q).
    let jpp = C64::new(c, 0.0);
    let jpq = C64::new(s, 0.0);
    let jqp = -phase.conj() * s;
    let jqq = phase.conj() * c;

    let n = m.rows();
    for r in 0..n {
        let arp = m[(r, p)];
        let arq = m[(r, q)];
        m[(r, p)] = arp * jpp + arq * jqp;
        m[(r, q)] = arp * jpq + arq * jqq;
    }
    for r in 0..n {
        let apr = m[(p, r)];
        let aqr = m[(q, r)];
        m[(p, r)] = jpp.conj() * apr + jqp.conj() * aqr;
        m[(q, r)] = jpq.conj() * apr + jqq.conj() * aqr;
    }
    m[(p, q)] = ZERO;
    m[(q, p)] = ZERO;
    m[(p, p)] = C64::new(m[(p, p)].re, 0.0);
    m[(q, q)] = C64::new(m[(q, q)].re, 0.0);

    for r in 0..n {
        let vrp = v[(r, p)];
        let vrq = v[(r, q)];
        v[(r, p)] = vrp * jpp + vrq * jqp;
        v[(r, q)] = vrp * jpq + vrq * jqq;
    }
}

/// Logarithm of a density matrix together with its support diagnostics.
#[derive(Debug, Clone)]
pub struct MatrixLog {
    pub matrix: ComplexMatrix,
    /// Some eigenvalue fell below the floor and was clamped.
    pub support_deficient: bool,
    pub spectrum: HermitianSpectrum,
}

/// `ln ρ` through the spectrum of `ρ`.
///
/// Eigenvalues below `eig_floor` are clamped to it and reported through
/// [`MatrixLog::support_deficient`]; callers decide whether the clamp hides a
/// physical divergence.
pub fn matrix_ln_hermitian(rho: &DensityMatrix, eig_floor: f64) -> Result<MatrixLog> {
    if !(eig_floor > 0.0) {
        return Err(Error::InvalidParameter("eig_floor must be positive".into()));
    }
    let spectrum = hermitian_eig(rho.as_matrix())?;
    let min = spectrum.eigenvalues.first().copied().unwrap_or(0.0);
    if min < -1e-10 {
        return Err(Error::InvalidDensityMatrix(format!(
            "negative eigenvalue {min:.3e}"
        )));
    }
    let support_deficient = min < eig_floor;
    let matrix = spectrum.map(|l| l.max(eig_floor).ln());
    Ok(MatrixLog {
        matrix,
        support_deficient,
        spectrum,
    })
}

/// `exp(A)` for Hermitian `A`.
pub fn matrix_exp_hermitian(a: &ComplexMatrix) -> Result<ComplexMatrix> {
    Ok(hermitian_eig(a)?.map(f64::exp))
}

/// Kronecker product: `(a ⊗ b)[i·rb + k, j·cb + l] = a[i, j] · b[k, l]`.
pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let (ra, ca, rb, cb) = (a.rows(), a.cols(), b.rows(), b.cols());
    let mut out = ComplexMatrix::zeros(ra * rb, ca * cb);
    for i in 0..ra {
        for j in 0..ca {
            let aij = a[(i, j)];
            if aij == ZERO {
                continue;
            }
            for k in 0..rb {
                for l in 0..cb {
                    out[(i * rb + k, j * cb + l)] = aij * b[(k, l)];
                }
            }
        }
    }
    out
}

/// Which factor of a bipartite space `S ⊗ A` to keep in a partial trace.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Subsystem {
    System,
    Auxiliary,
}

/// Partial trace of an operator on `S ⊗ A` (system index major).
pub fn partial_trace_matrix(
    m: &ComplexMatrix,
    dims: (usize, usize),
    keep: Subsystem,
) -> Result<ComplexMatrix> {
    let (ds, da) = dims;
    m.require_dim(ds * da, "partial_trace")?;
    Ok(match keep {
        Subsystem::System => ComplexMatrix::from_fn(ds, ds, |i, j| {
            (0..da).map(|k| m[(i * da + k, j * da + k)]).sum()
        }),
        Subsystem::Auxiliary => ComplexMatrix::from_fn(da, da, |k, l| {
            (0..ds).map(|i| m[(i * da + k, i * da + l)]).sum()
        }),
    })
}

/// Reduced density matrix of one subsystem.
pub fn partial_trace(
    tau: &DensityMatrix,
    dims: (usize, usize),
    keep: Subsystem,
) -> Result<DensityMatrix> {
    let reduced = partial_trace_matrix(tau.as_matrix(), dims, keep)?;
    Ok(DensityMatrix::from_matrix_unchecked(reduced.hermitian_part()))
}

/// Solve `a · x = b` by LU decomposition with partial pivoting.
pub fn solve_linear(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix> {
    let n = a.require_square("solve_linear")?;
    if b.rows() != n {
        return Err(Error::DimensionMismatch {
            context: "solve_linear right-hand side",
            expected: n,
            found: b.rows(),
        });
    }
    let lu = Lu::factor(a)?;
    let mut x = lu.solve(b);
    let bound = |x: &ComplexMatrix| 1e-10 * (a.max_abs() * x.max_abs() + b.max_abs());
    let mut residual = &a.matmul(&x) - b;
    if residual.max_abs() > bound(&x) {
        // One step of iterative refinement.
        let correction = lu.solve(&residual);
        x -= &correction;
        residual = &a.matmul(&x) - b;
        if residual.max_abs() > bound(&x) {
            return Err(Error::Singular {
                condition_estimate: lu.condition_estimate(),
            });
        }
    }
    Ok(x)
}

/// Packed LU factors with the row permutation.
struct Lu {
    n: usize,
    lu: ComplexMatrix,
    perm: Vec<usize>,
}

impl Lu {
    fn factor(a: &ComplexMatrix) -> Result<Self> {
        let n = a.rows();
        let mut lu = a.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        let scale = a.max_abs();
        if scale == 0.0 && n > 0 {
            return Err(Error::Singular {
                condition_estimate: f64::INFINITY,
            });
        }
        let tiny = (n as f64) * f64::EPSILON * scale;
        for k in 0..n {
            let (pivot_row, pivot_abs) = (k..n)
                .map(|i| (i, lu[(i, k)].norm()))
                .fold((k, -1.0), |best, cur| if cur.1 > best.1 { cur } else { best });
            if pivot_abs <= tiny {
                let mut estimate = Self::pivot_ratio(&lu, k);
                if !estimate.is_finite() || pivot_abs == 0.0 {
                    estimate = f64::INFINITY;
                } else {
                    estimate = estimate.max(scale / pivot_abs);
                }
                return Err(Error::Singular {
                    condition_estimate: estimate,
                });
            }
            if pivot_row != k {
                for j in 0..n {
                    let tmp = lu[(k, j)];
                    lu[(k, j)] = lu[(pivot_row, j)];
                    lu[(pivot_row, j)] = tmp;
                }
                perm.swap(k, pivot_row);
            }
            let pivot = lu[(k, k)];
            for i in k + 1..n {
                let factor = lu[(i, k)] / pivot;
                if factor == ZERO {
                    continue;
                }
                lu[(i, k)] = factor;
                for j in k + 1..n {
                    let u = lu[(k, j)];
                    lu[(i, j)] -= factor * u;
                }
            }
        }
        Ok(Self { n, lu, perm })
    }

    fn pivot_ratio(lu: &ComplexMatrix, upto: usize) -> f64 {
        let pivots: Vec<f64> = (0..upto).map(|k| lu[(k, k)].norm()).collect();
        let max = pivots.iter().copied().fold(0.0, f64::max);
        let min = pivots.iter().copied().fold(f64::INFINITY, f64::min);
        max / min
    }

    fn condition_estimate(&self) -> f64 {
        Self::pivot_ratio(&self.lu, self.n)
    }

    fn solve(&self, b: &ComplexMatrix) -> ComplexMatrix {
        let n = self.n;
        let mut x = ComplexMatrix::from_fn(n, b.cols(), |i, j| b[(self.perm[i], j)]);
        for col in 0..b.cols() {
            for i in 0..n {
                let mut acc = x[(i, col)];
                for k in 0..i {
                    acc -= self.lu[(i, k)] * x[(k, col)];
                }
                x[(i, col)] = acc;
            }
            for i in (0..n).rev() {
                let mut acc = x[(i, col)];
                for k in i + 1..n {
                    acc -= self.lu[(i, k)] * x[(k, col)];
                }
                x[(i, col)] = acc / self.lu[(i, i)];
            }
        }
        x
    }
}

/// Normalized vector of i.i.d. standard complex Gaussian entries.
pub fn haar_random_vector<R: rand::Rng + ?Sized>(dim: usize, rng: &mut R) -> Vec<C64> {
    loop {
        let v: Vec<C64> = (0..dim)
            .map(|_| {
                let re: f64 = StandardNormal.sample(rng);
                let im: f64 = StandardNormal.sample(rng);
                C64::new(re, im)
            })
            .collect();
        let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm > 0.0 {
            return v.into_iter().map(|z| z / norm).collect();
        }
    }
}

/// Haar-distributed pure state `|ψ⟩⟨ψ|`, deterministic per seed.
pub fn haar_random_pure_state(dim: usize, seed: u64) -> Result<DensityMatrix> {
    if dim < 2 {
        return Err(Error::InvalidParameter(format!(
            "Haar state dimension must be at least 2, got {dim}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let psi = haar_random_vector(dim, &mut rng);
    Ok(DensityMatrix::from_matrix_unchecked(ComplexMatrix::outer(
        &psi, &psi,
    )))
}
