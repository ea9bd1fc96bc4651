//! Lindblad dissipators, Liouvillians, steady states and propagation.
//!
//! Units: `ħ = k_B = 1`, energies, temperatures and rates all in angular
//! frequency. Every dissipator is in jump-operator form
//!
//! ```text
//! D(ρ) = Σ_k r_k (L_k ρ L_k† − ½{L_k† L_k, ρ})
//! ```

pub mod sector;

use crate::density::{gibbs_state, DensityMatrix};
use crate::error::{Error, Result};
use crate::linalg::{hermitian_eig, kron, solve_linear, ComplexMatrix, I, ONE, ZERO};
use crate::operators::{
    annihilation, bose_occupation, number, qubit_hamiltonian, sigma_minus, sigma_plus, sigma_x,
    sigma_y, sigma_z,
};

/// A jump operator with its (non-negative) rate.
#[derive(Debug, Clone, PartialEq)]
pub struct Jump {
    pub operator: ComplexMatrix,
    pub rate: f64,
}

impl Jump {
    pub fn new(operator: ComplexMatrix, rate: f64) -> Self {
        Self { operator, rate }
    }
}

/// One noise channel.
#[derive(Debug, Clone, PartialEq)]
pub struct Dissipator {
    pub label: String,
    dim: usize,
    jumps: Vec<Jump>,
    // L†L for each jump, cached.
    products: Vec<ComplexMatrix>,
    invariant_state: Option<DensityMatrix>,
    bath_temperature: Option<f64>,
}

impl Dissipator {
    pub fn new(label: impl Into<String>, jumps: Vec<Jump>) -> Result<Self> {
        let label = label.into();
        let dim = match jumps.first() {
            Some(j) => j.operator.require_square("jump operator")?,
            None => {
                return Err(Error::InvalidParameter(format!(
                    "dissipator '{label}' has no jump operators"
                )))
            }
        };
        for j in &jumps {
            j.operator.require_dim(dim, "jump operator")?;
            if !(j.rate >= 0.0) || !j.rate.is_finite() {
                return Err(Error::InvalidParameter(format!(
                    "dissipator '{label}': rate {} must be finite and non-negative",
                    j.rate
                )));
            }
        }
        let products = jumps
            .iter()
            .map(|j| j.operator.adjoint().matmul(&j.operator))
            .collect();
        Ok(Self {
            label,
            dim,
            jumps,
            products,
            invariant_state: None,
            bath_temperature: None,
        })
    }

    /// Attaches `π` after checking `‖D(π)‖_max ≤ 1e-10 · max_rate`.
    pub fn with_invariant_state(mut self, pi: DensityMatrix) -> Result<Self> {
        pi.as_matrix().require_dim(self.dim, "invariant state")?;
        let residual = self.apply_matrix(pi.as_matrix()).max_abs();
        if residual > 1e-10 * self.max_rate().max(f64::MIN_POSITIVE) {
            return Err(Error::InvalidParameter(format!(
                "dissipator '{}': supplied invariant state has residual {residual:.3e}",
                self.label
            )));
        }
        self.invariant_state = Some(pi);
        Ok(self)
    }

    pub fn with_bath_temperature(mut self, t: f64) -> Self {
        self.bath_temperature = Some(t);
        self
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn jumps(&self) -> &[Jump] {
        &self.jumps
    }

    pub fn invariant_state(&self) -> Option<&DensityMatrix> {
        self.invariant_state.as_ref()
    }

    pub fn bath_temperature(&self) -> Option<f64> {
        self.bath_temperature
    }

    pub fn max_rate(&self) -> f64 {
        self.jumps.iter().map(|j| j.rate).fold(0.0, f64::max)
    }

    /// `D(ρ)`.
    pub fn apply(&self, rho: &DensityMatrix) -> Result<ComplexMatrix> {
        rho.as_matrix().require_dim(self.dim, "dissipator_apply")?;
        Ok(self.apply_matrix(rho.as_matrix()))
    }

    /// `D(X)` for an arbitrary square matrix of matching dimension.
    pub fn apply_matrix(&self, x: &ComplexMatrix) -> ComplexMatrix {
        let mut out = ComplexMatrix::zeros(self.dim, self.dim);
        for (jump, prod) in self.jumps.iter().zip(&self.products) {
            if jump.rate == 0.0 {
                continue;
            }
            let l = &jump.operator;
            let sandwich = l.matmul(x).matmul(&l.adjoint());
            let anti = prod.anticommutator(x).scale_real(0.5);
            out += &(&sandwich - &anti).scale_real(jump.rate);
        }
        out
    }

    /// Upper bound on the ∞-norm of this channel's superoperator matrix.
    fn norm_bound(&self) -> f64 {
        self.jumps
            .iter()
            .zip(&self.products)
            .map(|(j, p)| j.rate * (j.operator.inf_norm().powi(2) + 2.0 * p.inf_norm()))
            .sum()
    }
}

/// `D(ρ)` as a free function.
pub fn dissipator_apply(d: &Dissipator, rho: &DensityMatrix) -> Result<ComplexMatrix> {
    d.apply(rho)
}

/// Hamiltonian plus noise channels.
#[derive(Debug, Clone, PartialEq)]
pub struct OpenSystem {
    hamiltonian: ComplexMatrix,
    dissipators: Vec<Dissipator>,
}

impl OpenSystem {
    pub fn new(hamiltonian: ComplexMatrix, dissipators: Vec<Dissipator>) -> Result<Self> {
        let dim = hamiltonian.require_square("Hamiltonian")?;
        let deviation = hamiltonian.hermitian_deviation();
        if deviation > 1e-12 * hamiltonian.max_abs().max(1.0) {
            return Err(Error::NotHermitian { deviation });
        }
        for d in &dissipators {
            if d.dim() != dim {
                return Err(Error::DimensionMismatch {
                    context: "dissipator dimension vs Hamiltonian",
                    expected: dim,
                    found: d.dim(),
                });
            }
        }
        Ok(Self {
            hamiltonian: hamiltonian.hermitian_part(),
            dissipators,
        })
    }

    pub fn dim(&self) -> usize {
        self.hamiltonian.rows()
    }

    pub fn hamiltonian(&self) -> &ComplexMatrix {
        &self.hamiltonian
    }

    pub fn dissipators(&self) -> &[Dissipator] {
        &self.dissipators
    }

    pub fn max_rate(&self) -> f64 {
        self.dissipators
            .iter()
            .map(Dissipator::max_rate)
            .fold(0.0, f64::max)
    }

    /// `−i[H, X] + Σ_i D_i(X)`.
    pub fn generator_apply(&self, x: &ComplexMatrix) -> ComplexMatrix {
        let mut out = self.hamiltonian.commutator(x).scale(-I);
        for d in &self.dissipators {
            out += &d.apply_matrix(x);
        }
        out
    }

    /// Upper bound on `‖L‖_∞` of the Liouvillian without building it.
    pub fn spectral_bound(&self) -> f64 {
        2.0 * self.hamiltonian.inf_norm()
            + self.dissipators.iter().map(Dissipator::norm_bound).sum::<f64>()
    }

    /// `‖L(ρ)‖_max`.
    pub fn residual(&self, rho: &DensityMatrix) -> f64 {
        self.generator_apply(rho.as_matrix()).max_abs()
    }
}

/// Superoperator matrix acting on column-stacked `vec(ρ)`.
#[derive(Debug, Clone)]
pub struct Liouvillian {
    pub matrix: ComplexMatrix,
    dim: usize,
}

impl Liouvillian {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn apply(&self, x: &ComplexMatrix) -> Result<ComplexMatrix> {
        x.require_dim(self.dim, "Liouvillian apply")?;
        ComplexMatrix::unvectorize(&self.matrix.apply(&x.vectorize()), self.dim)
    }
}

/// `L = −i(I⊗H − Hᵀ⊗I) + Σ r [conj(L)⊗L − ½ I⊗L†L − ½ (L†L)ᵀ⊗I]`.
pub fn liouvillian_matrix(sys: &OpenSystem) -> Liouvillian {
    let n = sys.dim();
    let id = ComplexMatrix::identity(n);
    let h = sys.hamiltonian();
    let mut matrix = (&kron(&id, h) - &kron(&h.transpose(), &id)).scale(-I);
    for d in sys.dissipators() {
        for (jump, prod) in d.jumps.iter().zip(&d.products) {
            if jump.rate == 0.0 {
                continue;
            }
            let l = &jump.operator;
            let mut term = kron(&l.conj(), l);
            term -= &kron(&id, prod).scale_real(0.5);
            term -= &kron(&prod.transpose(), &id).scale_real(0.5);
            matrix += &term.scale_real(jump.rate);
        }
    }
    Liouvillian { matrix, dim: n }
}

/// Unique trace-one null vector of `L`, by replacing the first row with the
/// trace constraint and solving with partial pivoting.
pub fn steady_state(sys: &OpenSystem) -> Result<DensityMatrix> {
    let n = sys.dim();
    let liouvillian = liouvillian_matrix(sys);
    let mut a = liouvillian.matrix;
    for j in 0..n * n {
        a[(0, j)] = ZERO;
    }
    for k in 0..n {
        a[(0, k * n + k)] = ONE;
    }
    let mut rhs = ComplexMatrix::zeros(n * n, 1);
    rhs[(0, 0)] = ONE;
    let x = match solve_linear(&a, &rhs) {
        Ok(x) => x,
        Err(Error::Singular { .. }) => return Err(Error::NonUniqueSteadyState),
        Err(e) => return Err(e),
    };
    let rho = ComplexMatrix::unvectorize(x.as_slice(), n)?.hermitian_part();
    let rho = clip_to_state(rho)?;
    let residual = sys.residual(&rho);
    let scale = sys.max_rate();
    if residual > 1e-10 * scale.max(f64::MIN_POSITIVE) {
        return Err(Error::SolverFailure(format!(
            "steady-state residual {residual:.3e} exceeds 1e-10 x max rate {scale:.3e}"
        )));
    }
    Ok(rho)
}

/// Clips eigenvalues in `[−1e-10, 0)` to zero and renormalizes; anything more
/// negative is a solver failure.
fn clip_to_state(m: ComplexMatrix) -> Result<DensityMatrix> {
    let spectrum = hermitian_eig(&m)?;
    let min = spectrum.eigenvalues[0];
    if min < -1e-10 {
        return Err(Error::SolverFailure(format!(
            "steady state has negative eigenvalue {min:.3e}"
        )));
    }
    if min >= 0.0 {
        return Ok(DensityMatrix::from_matrix_unchecked(m));
    }
    let clipped = spectrum.map(|l| l.max(0.0));
    let tr = clipped.trace().re;
    Ok(DensityMatrix::from_matrix_unchecked(
        clipped.scale_real(1.0 / tr).hermitian_part(),
    ))
}

/// Fixed point of a single dissipator (no Hamiltonian).
pub fn invariant_state(d: &Dissipator, dim: usize) -> Result<DensityMatrix> {
    if d.dim() != dim {
        return Err(Error::DimensionMismatch {
            context: "invariant_state",
            expected: dim,
            found: d.dim(),
        });
    }
    let sys = OpenSystem::new(ComplexMatrix::zeros(dim, dim), vec![d.clone()])?;
    steady_state(&sys)
}

/// Classical fourth-order Runge–Kutta integration of the master equation
/// from `0` to `t` with step `dt` (the last step is shortened to land on `t`).
pub fn propagate(sys: &OpenSystem, rho0: &DensityMatrix, t: f64, dt: f64) -> Result<DensityMatrix> {
    rho0.as_matrix().require_dim(sys.dim(), "propagate")?;
    if !(t >= 0.0) || !(dt > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "propagate needs t >= 0 and dt > 0 (got t={t}, dt={dt})"
        )));
    }
    let product = dt * sys.spectral_bound();
    if product >= 0.1 {
        return Err(Error::StepTooLarge { product });
    }
    let mut rho = rho0.as_matrix().clone();
    let mut elapsed = 0.0;
    while elapsed < t {
        let h = dt.min(t - elapsed);
        rho = rk4_step(sys, &rho, h);
        elapsed += h;
        if t - elapsed < 1e-12 * dt {
            break;
        }
    }
    let drift = (rho.trace() - ONE).norm();
    if drift > 1e-6 {
        return Err(Error::TraceDrift { drift });
    }
    Ok(DensityMatrix::from_matrix_unchecked(rho))
}

fn rk4_step(sys: &OpenSystem, rho: &ComplexMatrix, h: f64) -> ComplexMatrix {
    let k1 = sys.generator_apply(rho);
    let k2 = sys.generator_apply(&(rho + &k1.scale_real(0.5 * h)));
    let k3 = sys.generator_apply(&(rho + &k2.scale_real(0.5 * h)));
    let k4 = sys.generator_apply(&(rho + &k3.scale_real(h)));
    let mut incr = k1;
    incr += &k2.scale_real(2.0);
    incr += &k3.scale_real(2.0);
    incr += &k4;
    (rho + &incr.scale_real(h / 6.0)).hermitian_part()
}

/// Qubit in contact with a bath at temperature `T`: `σ₋` at `γ(n_T + 1)`,
/// `σ₊` at `γ n_T`, `n_T = 1/(e^{E/T} − 1)`. Invariant state is the Gibbs
/// state of `diag(0, E)`.
pub fn thermal_qubit_dissipator(gap: f64, temperature: f64, gamma: f64) -> Result<Dissipator> {
    if !(gap > 0.0) || !(temperature >= 0.0) || !(gamma > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "thermal qubit needs E > 0, T >= 0, gamma > 0 (got {gap}, {temperature}, {gamma})"
        )));
    }
    let n = bose_occupation(gap, temperature);
    let d = Dissipator::new(
        "thermal_qubit",
        vec![
            Jump::new(sigma_minus(), gamma * (n + 1.0)),
            Jump::new(sigma_plus(), gamma * n),
        ],
    )?;
    let pi = gibbs_state(&qubit_hamiltonian(gap), temperature)?;
    Ok(d.with_invariant_state(pi)?.with_bath_temperature(temperature))
}

/// Weight of a thermal distribution with occupation `n̄` above level `n_trunc − 1`.
pub fn thermal_tail_mass(nbar: f64, n_trunc: usize) -> f64 {
    if nbar <= 0.0 {
        return 0.0;
    }
    (nbar / (nbar + 1.0)).powi(n_trunc as i32)
}

/// Emitted when a truncated Fock space drops more than 1e-8 of thermal weight.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TruncationWarning {
    pub tail_mass: f64,
}

/// Damped oscillator `H = ω a†a` with a thermal bath, on `n_trunc` Fock levels:
/// `a` at `γ(n̄ + 1)`, `a†` at `γ n̄` (the latter omitted at `T = 0`).
pub fn thermal_oscillator_dissipator(
    omega: f64,
    temperature: f64,
    gamma: f64,
    n_trunc: usize,
) -> Result<(Dissipator, Option<TruncationWarning>)> {
    if !(omega > 0.0) || !(temperature >= 0.0) || !(gamma > 0.0) || n_trunc < 2 {
        return Err(Error::InvalidParameter(format!(
            "thermal oscillator needs omega > 0, T >= 0, gamma > 0, n_trunc >= 2 \
             (got {omega}, {temperature}, {gamma}, {n_trunc})"
        )));
    }
    let nbar = bose_occupation(omega, temperature);
    let a = annihilation(n_trunc);
    let mut jumps = vec![Jump::new(a.clone(), gamma * (nbar + 1.0))];
    if nbar > 0.0 {
        jumps.push(Jump::new(a.adjoint(), gamma * nbar));
    }
    let d = Dissipator::new("thermal_oscillator", jumps)?;
    let pi = truncated_thermal_state(nbar, n_trunc);
    let tail = thermal_tail_mass(nbar, n_trunc);
    let warning = (tail > 1e-8).then_some(TruncationWarning { tail_mass: tail });
    Ok((
        d.with_invariant_state(pi)?.with_bath_temperature(temperature),
        warning,
    ))
}

/// Renormalized thermal state with mean occupation `n̄` on `n_trunc` levels.
pub fn truncated_thermal_state(nbar: f64, n_trunc: usize) -> DensityMatrix {
    let q = if nbar > 0.0 { nbar / (nbar + 1.0) } else { 0.0 };
    let mut p: Vec<f64> = (0..n_trunc).map(|k| q.powi(k as i32)).collect();
    let z: f64 = p.iter().sum();
    p.iter_mut().for_each(|x| *x /= z);
    DensityMatrix::from_matrix_unchecked(ComplexMatrix::from_diag(&p))
}

/// `−(β/4) Σ_j [σ_j, [σ_j, ρ]]`, i.e. each Pauli as a jump at rate `β/2`.
pub fn depolarizing_dissipator(beta: f64) -> Result<Dissipator> {
    if !(beta >= 0.0) {
        return Err(Error::InvalidParameter(format!(
            "depolarizing rate must be non-negative, got {beta}"
        )));
    }
    let d = Dissipator::new(
        "depolarizing",
        vec![
            Jump::new(sigma_x(), beta / 2.0),
            Jump::new(sigma_y(), beta / 2.0),
            Jump::new(sigma_z(), beta / 2.0),
        ],
    )?;
    d.with_invariant_state(DensityMatrix::maximally_mixed(2))
}

/// Zero-temperature amplitude damping `γ(σρσ† − ½{σ†σ, ρ})`.
pub fn amplitude_damping_dissipator(gamma: f64) -> Result<Dissipator> {
    if !(gamma >= 0.0) {
        return Err(Error::InvalidParameter(format!(
            "damping rate must be non-negative, got {gamma}"
        )));
    }
    Dissipator::new("amplitude_damping", vec![Jump::new(sigma_minus(), gamma)])?
        .with_invariant_state(DensityMatrix::basis_state(2, 0))
        .map(|d| d.with_bath_temperature(0.0))
}

/// Thermal channel seen by a system whose spectrum is set by `hamiltonian`.
///
/// The coupling operator `x` is split into Bohr-frequency components
/// `A(ω) = Σ_{ε'−ε=ω} Π_ε x Π_ε'`. Components lowering the energy by `ω > 0`
/// get rate `γ(n(ω) + 1)`, raising components get `γ n(|ω|)`; zero-frequency
/// components are dropped. Detailed balance at the bath temperature then
/// holds on every transition, so the Gibbs state of `hamiltonian` is a fixed
/// point.
pub fn dressed_thermal_dissipator(
    label: impl Into<String>,
    hamiltonian: &ComplexMatrix,
    coupling: &ComplexMatrix,
    gamma: f64,
    temperature: f64,
) -> Result<Dissipator> {
    let n = hamiltonian.require_square("dressed dissipator Hamiltonian")?;
    coupling.require_dim(n, "dressed dissipator coupling")?;
    let deviation = coupling.hermitian_deviation();
    if deviation > 1e-12 * coupling.max_abs().max(1.0) {
        return Err(Error::NotHermitian { deviation });
    }
    let spectrum = hermitian_eig(hamiltonian)?;
    let energies = &spectrum.eigenvalues;
    let u = &spectrum.eigenvectors;
    let tol = 1e-9 * energies.iter().map(|e| e.abs()).fold(1.0, f64::max);

    // Coupling in the energy eigenbasis.
    let x = u.adjoint().matmul(coupling).matmul(u);
    let mut components: Vec<(f64, ComplexMatrix)> = Vec::new();
    for i in 0..n {
        for j in 0..n {
            if x[(i, j)].norm() == 0.0 {
                continue;
            }
            // |i⟩⟨j| takes energy E_j to E_i, lowering by ω = E_j − E_i.
            let omega = energies[j] - energies[i];
            if omega.abs() <= tol {
                continue;
            }
            let slot = components
                .iter()
                .position(|(w, _)| (w - omega).abs() <= tol);
            let k = match slot {
                Some(k) => k,
                None => {
                    components.push((omega, ComplexMatrix::zeros(n, n)));
                    components.len() - 1
                }
            };
            components[k].1[(i, j)] = x[(i, j)];
        }
    }
    let mut jumps = Vec::with_capacity(components.len());
    for (omega, a_eig) in components {
        let occupation = bose_occupation(omega.abs(), temperature);
        let rate = if omega > 0.0 {
            gamma * (occupation + 1.0)
        } else {
            gamma * occupation
        };
        let op = u.matmul(&a_eig).matmul(&u.adjoint());
        jumps.push(Jump::new(op, rate));
    }
    if jumps.is_empty() {
        return Err(Error::InvalidParameter(
            "coupling operator has no transitions between distinct energy levels".into(),
        ));
    }
    let d = Dissipator::new(label, jumps)?.with_bath_temperature(temperature);
    // Attach the Gibbs state when it certifies as the fixed point.
    let gibbs = gibbs_state(hamiltonian, temperature)?;
    Ok(match d.clone().with_invariant_state(gibbs) {
        Ok(with_pi) => with_pi,
        Err(_) => d,
    })
}

/// Thermal qubit as a full [`OpenSystem`] with `H = diag(0, E)`.
pub fn thermal_qubit_system(gap: f64, temperature: f64, gamma: f64) -> Result<OpenSystem> {
    OpenSystem::new(
        qubit_hamiltonian(gap),
        vec![thermal_qubit_dissipator(gap, temperature, gamma)?],
    )
}

/// Thermal oscillator as a full [`OpenSystem`] with `H = ω a†a`.
pub fn thermal_oscillator_system(
    omega: f64,
    temperature: f64,
    gamma: f64,
    n_trunc: usize,
) -> Result<OpenSystem> {
    let (d, _) = thermal_oscillator_dissipator(omega, temperature, gamma, n_trunc)?;
    OpenSystem::new(number(n_trunc).scale_real(omega), vec![d])
}

#[cfg(test)]
mod tests;
