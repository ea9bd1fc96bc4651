//! Thermodynamic accounting: entropies, free energies, per-channel entropy
//! and energy flows, the minimum steady control power, Spohn entropy
//! production and the energy balance of a joint system–auxiliary model.
//!
//! With `k_B = 1` the minimum power to hold `ρ*` against channels `D_i`,
//! dissipating into a reservoir at temperature `T`, is
//!
//! ```text
//! Ẇ_min = Σ_i (T Ṡ_i − Ė_i) = −Σ_i Tr[D_i(ρ*) (T ln ρ* + H)]
//! Ṡ_i = −Tr[D_i(ρ*) ln ρ*],   Ė_i = Tr[D_i(ρ*) H]
//! ```
//!
//! A target outside the support of `ρ*`'s own spectrum (e.g. a pure state)
//! makes `Ṡ_i` infinite whenever the channel pushes weight into the kernel;
//! such costs come back as `+∞` with [`ControlCostReport::divergent`] set.

use crate::density::DensityMatrix;
use crate::error::{Error, Result};
use crate::lindblad::{Dissipator, OpenSystem};
use crate::linalg::{hermitian_eig, ComplexMatrix, HermitianSpectrum, DEFAULT_EIG_FLOOR};

/// Weight in the kernel of `ρ` above `1e-10 × scale` counts as a divergence.
const SUPPORT_TOL: f64 = 1e-10;

/// `Tr[X ln ρ]` evaluated in the eigenbasis of `ρ`. Returns a signed infinity
/// when `X` has diagonal weight on an eigenvector below the floor.
fn trace_with_log(spectrum: &HermitianSpectrum, x: &ComplexMatrix, tol: f64) -> f64 {
    let diag = spectrum.diagonal_in_eigenbasis(x);
    let mut acc = 0.0;
    for (&lambda, xkk) in spectrum.eigenvalues.iter().zip(diag) {
        let w = xkk.re;
        if lambda < DEFAULT_EIG_FLOOR {
            if w.abs() > tol {
                return if w > 0.0 {
                    f64::NEG_INFINITY
                } else {
                    f64::INFINITY
                };
            }
            acc += w * DEFAULT_EIG_FLOOR.ln();
        } else {
            acc += w * lambda.ln();
        }
    }
    acc
}

fn state_spectrum(rho: &DensityMatrix) -> Result<HermitianSpectrum> {
    let spectrum = hermitian_eig(rho.as_matrix())?;
    let min = spectrum.eigenvalues[0];
    if min < -1e-10 {
        return Err(Error::InvalidDensityMatrix(format!(
            "negative eigenvalue {min:.3e}"
        )));
    }
    Ok(spectrum)
}

fn require_temperature(t: f64) -> Result<()> {
    if t > 0.0 && t.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!(
            "reference temperature must be positive, got {t}"
        )))
    }
}

/// `S(ρ) = −Tr[ρ ln ρ]` with `0 ln 0 = 0`.
pub fn von_neumann_entropy(rho: &DensityMatrix) -> Result<f64> {
    let spectrum = state_spectrum(rho)?;
    Ok(entropy_of(&spectrum.eigenvalues))
}

fn entropy_of(eigenvalues: &[f64]) -> f64 {
    eigenvalues
        .iter()
        .filter(|&&l| l > 0.0)
        .map(|&l| -l * l.ln())
        .sum::<f64>()
        .max(0.0)
}

/// Nonequilibrium free energy `F(ρ) = Tr[ρH] − T S(ρ)`.
pub fn free_energy(rho: &DensityMatrix, h: &ComplexMatrix, temperature: f64) -> Result<f64> {
    require_temperature(temperature)?;
    h.require_dim(rho.dim(), "free_energy Hamiltonian")?;
    Ok(rho.expectation(h).re - temperature * von_neumann_entropy(rho)?)
}

/// Entropy and energy a single channel pumps into the state.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelFlows {
    pub label: String,
    /// `Ṡ = −Tr[D(ρ) ln ρ]`; `+∞` when divergent.
    pub entropy_flow: f64,
    /// `Ė = Tr[D(ρ) H]`.
    pub energy_flow: f64,
    /// `Ḟ = Ė − T Ṡ` at the reference temperature (only set by
    /// [`min_work_rate`]; `NaN` from [`channel_flows`]).
    pub free_energy_rate: f64,
    pub divergent: bool,
}

fn flows_with_spectrum(
    d: &Dissipator,
    rho: &DensityMatrix,
    spectrum: &HermitianSpectrum,
    h: &ComplexMatrix,
) -> Result<ChannelFlows> {
    let d_rho = d.apply(rho)?;
    let tol = SUPPORT_TOL * d.max_rate().max(f64::MIN_POSITIVE);
    let entropy_flow = -trace_with_log(spectrum, &d_rho, tol);
    let energy_flow = d_rho.trace_product(h).re;
    Ok(ChannelFlows {
        label: d.label.clone(),
        divergent: entropy_flow.is_infinite(),
        entropy_flow,
        energy_flow,
        free_energy_rate: f64::NAN,
    })
}

/// `(Ṡ, Ė)` of channel `d` at state `rho` with Hamiltonian `h`.
pub fn channel_flows(d: &Dissipator, rho: &DensityMatrix, h: &ComplexMatrix) -> Result<ChannelFlows> {
    h.require_dim(rho.dim(), "channel_flows Hamiltonian")?;
    let spectrum = state_spectrum(rho)?;
    flows_with_spectrum(d, rho, &spectrum, h)
}

/// Per-channel flows and the minimum steady power.
#[derive(Debug, Clone, PartialEq)]
pub struct ControlCostReport {
    pub channels: Vec<ChannelFlows>,
    pub reference_temperature: f64,
    /// `Ẇ_min = −Σ_i Ḟ_i`; `+∞` when [`Self::divergent`].
    pub min_work_rate: f64,
    pub divergent: bool,
}

impl ControlCostReport {
    /// `Σ_i (T Ṡ_i − Ė_i)`, the entropy/energy form of the total.
    pub fn decomposed_total(&self) -> f64 {
        let t = self.reference_temperature;
        self.channels
            .iter()
            .map(|c| t * c.entropy_flow - c.energy_flow)
            .sum()
    }
}

/// Minimum power to hold `rho_star` fixed under `sys`'s channels, with heat
/// dumped into a reservoir at `temperature`.
pub fn min_work_rate(
    sys: &OpenSystem,
    rho_star: &DensityMatrix,
    temperature: f64,
) -> Result<ControlCostReport> {
    require_temperature(temperature)?;
    rho_star
        .as_matrix()
        .require_dim(sys.dim(), "min_work_rate target")?;
    let spectrum = state_spectrum(rho_star)?;
    let mut channels = Vec::with_capacity(sys.dissipators().len());
    for d in sys.dissipators() {
        let mut flows = flows_with_spectrum(d, rho_star, &spectrum, sys.hamiltonian())?;
        flows.free_energy_rate = flows.energy_flow - temperature * flows.entropy_flow;
        channels.push(flows);
    }
    let divergent = channels.iter().any(|c| c.divergent);
    let min_work_rate = if divergent {
        f64::INFINITY
    } else {
        -channels.iter().map(|c| c.free_energy_rate).sum::<f64>()
    };
    Ok(ControlCostReport {
        channels,
        reference_temperature: temperature,
        min_work_rate,
        divergent,
    })
}

/// Minimum total work to steer the system along `path`, sampled on a uniform
/// grid with spacing `dt`, by the trapezoidal rule over `Ẇ_min(ρ*(t))`.
pub fn trajectory_min_work(
    sys: &OpenSystem,
    path: &[DensityMatrix],
    dt: f64,
    temperature: f64,
) -> Result<f64> {
    if path.len() < 2 {
        return Err(Error::InvalidParameter(
            "trajectory needs at least two states".into(),
        ));
    }
    if !(dt > 0.0) {
        return Err(Error::InvalidParameter(format!("dt must be positive, got {dt}")));
    }
    let rates = path
        .iter()
        .map(|rho| min_work_rate(sys, rho, temperature).map(|r| r.min_work_rate))
        .collect::<Result<Vec<_>>>()?;
    let n = rates.len();
    let interior: f64 = rates[1..n - 1].iter().sum();
    Ok(dt * (0.5 * (rates[0] + rates[n - 1]) + interior))
}

/// Spohn entropy production `Σ = −Tr[D(τ)(ln τ − ln π)]` of one channel.
pub fn spohn_entropy_production(
    d: &Dissipator,
    tau: &DensityMatrix,
    pi: &DensityMatrix,
) -> Result<f64> {
    let d_tau = d.apply(tau)?;
    pi.as_matrix().require_dim(tau.dim(), "spohn reference state")?;
    let tau_spec = state_spectrum(tau)?;
    let pi_spec = state_spectrum(pi)?;
    if tau_spec.eigenvalues[0] < DEFAULT_EIG_FLOOR || pi_spec.eigenvalues[0] < DEFAULT_EIG_FLOOR {
        return Err(Error::InvalidDensityMatrix(
            "entropy production needs full-rank states".into(),
        ));
    }
    let tol = SUPPORT_TOL * d.max_rate().max(f64::MIN_POSITIVE);
    Ok(-(trace_with_log(&tau_spec, &d_tau, tol) - trace_with_log(&pi_spec, &d_tau, tol)))
}

/// Quantum relative entropy `S(ρ‖σ) = Tr[ρ(ln ρ − ln σ)]`; `+∞` when the
/// support of `ρ` is not contained in that of `σ`.
pub fn relative_entropy(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    sigma
        .as_matrix()
        .require_dim(rho.dim(), "relative_entropy")?;
    let rho_spec = state_spectrum(rho)?;
    let sigma_spec = state_spectrum(sigma)?;
    let cross = trace_with_log(&sigma_spec, rho.as_matrix(), 1e-12);
    if cross.is_infinite() {
        return Ok(f64::INFINITY);
    }
    Ok(-entropy_of(&rho_spec.eigenvalues) - cross)
}

/// Energy bookkeeping of a joint system–auxiliary model in steady state.
#[derive(Debug, Clone, PartialEq)]
pub struct JointEnergyBalance {
    /// `Ẇ = −Q̇_A − Σ_i Ė_i`; zero for a time-independent joint Hamiltonian.
    pub work_rate: f64,
    /// `Q̇_A = Tr[D_A(τ) H]`, energy flowing in from the auxiliary's reservoir.
    pub heat_rate_aux: f64,
    /// `Ė_i = Tr[D_i(τ) H]` for each system channel, in model order.
    pub energy_flows_system: Vec<f64>,
    /// `−Q̇_A / T`, entropy delivered to the auxiliary's reservoir.
    pub reservoir_entropy_rate: f64,
}

/// Energy balance of `joint` at a steady state `tau`. Channels whose indices
/// appear in `aux_channels` belong to the auxiliary; the rest to the system.
pub fn joint_energy_balance(
    joint: &OpenSystem,
    aux_channels: &[usize],
    tau: &DensityMatrix,
    temperature: f64,
) -> Result<JointEnergyBalance> {
    require_temperature(temperature)?;
    tau.as_matrix()
        .require_dim(joint.dim(), "joint_energy_balance state")?;
    if let Some(&bad) = aux_channels.iter().find(|&&i| i >= joint.dissipators().len()) {
        return Err(Error::InvalidParameter(format!(
            "auxiliary channel index {bad} out of range"
        )));
    }
    let residual = joint.residual(tau);
    let scale = joint.max_rate().max(joint.hamiltonian().max_abs());
    if residual > 1e-8 * scale.max(f64::MIN_POSITIVE) {
        return Err(Error::NotSteady { residual });
    }
    let h = joint.hamiltonian();
    let mut heat_rate_aux = 0.0;
    let mut energy_flows_system = Vec::new();
    for (i, d) in joint.dissipators().iter().enumerate() {
        let flow = d.apply(tau)?.trace_product(h).re;
        if aux_channels.contains(&i) {
            heat_rate_aux += flow;
        } else {
            energy_flows_system.push(flow);
        }
    }
    let work_rate = -heat_rate_aux - energy_flows_system.iter().sum::<f64>();
    Ok(JointEnergyBalance {
        work_rate,
        heat_rate_aux,
        energy_flows_system,
        reservoir_entropy_rate: -heat_rate_aux / temperature,
    })
}

/// One step size of the infinitesimal reset protocol.
#[derive(Debug, Clone, PartialEq)]
pub struct ProtocolRow {
    pub dt: f64,
    /// `[F(ρ*) − F(ρ* + L(ρ*) dt)] / dt`.
    pub work_rate_estimate: f64,
    /// Estimate minus `Ẇ_min`.
    pub error: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProtocolCheck {
    pub rows: Vec<ProtocolRow>,
    pub min_work_rate: f64,
    /// Richardson extrapolation of the two smallest steps to `dt → 0`.
    pub extrapolated_limit: f64,
    /// Log-log slope of `|error|` against `dt`; `None` when every error is
    /// at round-off level (e.g. an equilibrium target).
    pub slope: Option<f64>,
}

impl ProtocolCheck {
    /// First-order convergence: slope within `[0.85, 1.15]`, or no
    /// measurable error at all.
    pub fn first_order(&self) -> bool {
        self.slope.is_none_or(|s| (0.85..=1.15).contains(&s))
    }
}

/// Work per unit time of the reset protocol that lets the noise act for `dt`
/// and then restores `ρ*` reversibly, for each `dt`, compared with `Ẇ_min`.
pub fn protocol_step_check(
    sys: &OpenSystem,
    rho_star: &DensityMatrix,
    temperature: f64,
    dts: &[f64],
) -> Result<ProtocolCheck> {
    if dts.len() < 2 {
        return Err(Error::InvalidParameter(
            "protocol check needs at least two step sizes".into(),
        ));
    }
    if dts.iter().any(|&dt| !(dt > 0.0)) || dts.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::InvalidParameter(
            "step sizes must be positive and strictly decreasing".into(),
        ));
    }
    let report = min_work_rate(sys, rho_star, temperature)?;
    if report.divergent {
        return Err(Error::InvalidParameter(
            "protocol check needs a full-rank target (cost diverges)".into(),
        ));
    }
    let w_min = report.min_work_rate;
    let h = sys.hamiltonian();
    let f0 = free_energy(rho_star, h, temperature)?;
    let drift = sys.generator_apply(rho_star.as_matrix());

    let mut rows = Vec::with_capacity(dts.len());
    for &dt in dts {
        let perturbed = (rho_star.as_matrix() + &drift.scale_real(dt)).hermitian_part();
        let perturbed = DensityMatrix::from_matrix_unchecked(perturbed);
        let min = hermitian_eig(perturbed.as_matrix())?.eigenvalues[0];
        if min < 0.0 {
            return Err(Error::InvalidParameter(format!(
                "dt = {dt:e} pushes the state out of the positive cone"
            )));
        }
        let estimate = (f0 - free_energy(&perturbed, h, temperature)?) / dt;
        rows.push(ProtocolRow {
            dt,
            work_rate_estimate: estimate,
            error: estimate - w_min,
        });
    }

    let n = rows.len();
    let (a, b) = (&rows[n - 2], &rows[n - 1]);
    let extrapolated_limit =
        (b.work_rate_estimate * a.dt - a.work_rate_estimate * b.dt) / (a.dt - b.dt);

    let noise_floor = 1e-9 * (w_min.abs() + sys.max_rate() * h.max_abs().max(temperature));
    let points: Vec<(f64, f64)> = rows
        .iter()
        .filter(|r| r.error.abs() > noise_floor)
        .map(|r| (r.dt.ln(), r.error.abs().ln()))
        .collect();
    let slope = (points.len() >= 2).then(|| {
        let m = points.len() as f64;
        let mx = points.iter().map(|p| p.0).sum::<f64>() / m;
        let my = points.iter().map(|p| p.1).sum::<f64>() / m;
        points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum::<f64>()
            / points.iter().map(|p| (p.0 - mx).powi(2)).sum::<f64>()
    });
    Ok(ProtocolCheck {
        rows,
        min_work_rate: w_min,
        extrapolated_limit,
        slope,
    })
}
