//! Resolved-sideband cooling of a mechanical mode `a` (frequency ω, bath
//! damping γ) through a beam-splitter coupling `g(a†b + ab†)` to a
//! high-frequency auxiliary mode `b` (frequency Ω, damping γ′). Both modes
//! see the same bath temperature `T`.
//!
//! In the frame rotating with the drive the model is linear, so the second
//! moments `n_a = ⟨a†a⟩`, `n_b = ⟨b†b⟩`, `c = ⟨a†b⟩` obey a closed system:
//!
//! ```text
//! ṅ_a = −γ (n_a − n̄)  + 2g Im c
//! ṅ_b = −γ′(n_b − n̄′) − 2g Im c
//! ċ   = −½(γ + γ′) c  + i g (n_b − n_a)
//! ```
//!
//! Each quantum moved from `a` to `b` is up-converted by `Ω − ω`, which the
//! drive supplies as work.

use rayon::prelude::*;

use crate::density::DensityMatrix;
use crate::error::{Error, Result};
use crate::lindblad::{
    sector::SectorLiouvillian, thermal_oscillator_dissipator, truncated_thermal_state, Jump,
    OpenSystem, TruncationWarning,
};
use crate::linalg::{kron, solve_linear, ComplexMatrix, C64};
use crate::operators::{annihilation, bose_occupation, number};
use crate::thermo::min_work_rate;
use crate::units::{hz, kelvin};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SidebandModel {
    pub omega: f64,
    pub big_omega: f64,
    pub g: f64,
    pub gamma: f64,
    pub gamma_prime: f64,
    pub temperature: f64,
}

impl SidebandModel {
    pub fn new(
        omega: f64,
        big_omega: f64,
        g: f64,
        gamma: f64,
        gamma_prime: f64,
        temperature: f64,
    ) -> Result<Self> {
        if !(omega > 0.0 && big_omega > omega) {
            return Err(Error::InvalidParameter(format!(
                "need Ω > ω > 0, got ω = {omega:e}, Ω = {big_omega:e}"
            )));
        }
        if !(gamma > 0.0 && gamma_prime > 0.0) {
            return Err(Error::InvalidParameter("damping rates must be positive".into()));
        }
        if !(g >= 0.0 && g.is_finite()) {
            return Err(Error::InvalidParameter(format!("g must be non-negative, got {g}")));
        }
        if !(temperature > 0.0 && temperature.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "temperature must be positive, got {temperature}"
            )));
        }
        Ok(Self {
            omega,
            big_omega,
            g,
            gamma,
            gamma_prime,
            temperature,
        })
    }

    /// Parameters of Teufel et al. (2011): ω/2π = 10.56 MHz, Ω/2π = 1.54 GHz,
    /// T = 20 mK, γ/2π = 32 Hz, with the given `g/2π` and `γ′/2π` in Hz.
    pub fn teufel(g_hz: f64, gamma_prime_hz: f64) -> Result<Self> {
        Self::new(
            hz(10.56e6),
            hz(1.54e9),
            hz(g_hz),
            hz(32.0),
            hz(gamma_prime_hz),
            kelvin(0.020),
        )
    }

    pub fn with_g(self, g: f64) -> Result<Self> {
        Self::new(self.omega, self.big_omega, g, self.gamma, self.gamma_prime, self.temperature)
    }

    pub fn with_gamma_prime(self, gamma_prime: f64) -> Result<Self> {
        Self::new(self.omega, self.big_omega, self.g, self.gamma, gamma_prime, self.temperature)
    }

    /// Bath occupation of the mechanical mode.
    pub fn nbar(&self) -> f64 {
        bose_occupation(self.omega, self.temperature)
    }

    /// Bath occupation of the auxiliary mode.
    pub fn nbar_prime(&self) -> f64 {
        bose_occupation(self.big_omega, self.temperature)
    }

    /// `g < min(ω, Ω − ω)/10`, where the rotating-wave beam splitter holds.
    pub fn is_weak_coupling(&self) -> bool {
        self.g < self.omega.min(self.big_omega - self.omega) / 10.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SidebandFlag {
    /// `g = 0`: no flow, efficiency undefined.
    Decoupled,
    /// `g` outside the weak-coupling window.
    StrongCoupling,
    /// `ε > 1`: the net-flux work accounting falls below the minimum power.
    BelowMinimumPower,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SidebandSteadyState {
    pub n_a: f64,
    pub n_b: f64,
    pub c: C64,
    pub t_eff: f64,
    /// Heat drawn out of the mechanical mode's bath, `ω γ (n̄ − n_a)`.
    pub q_dot: f64,
    /// Drive power `(Ω − ω) γ (n̄ − n_a)`.
    pub w_dot: f64,
    /// `Q̇ (T/T_eff − 1)`.
    pub w_min: f64,
    pub cop: Option<f64>,
    pub cop_ideal: f64,
    /// `cop / cop_ideal`; `None` when undefined.
    pub efficiency: Option<f64>,
    pub flags: Vec<SidebandFlag>,
}

/// Temperature at which a mode of frequency `omega` has occupation `n`.
pub fn effective_temperature(omega: f64, n: f64) -> f64 {
    if n <= 0.0 {
        0.0
    } else {
        omega / (1.0 / n).ln_1p()
    }
}

/// Steady-state moments and energy flows.
pub fn sideband_steady_state(m: &SidebandModel) -> Result<SidebandSteadyState> {
    let (g, ga, gb) = (m.g, m.gamma, m.gamma_prime);
    let kappa = 0.5 * (ga + gb);
    let (nbar, nbar_p) = (m.nbar(), m.nbar_prime());
    // Unknowns (n_a, n_b, Re c, Im c).
    #[rustfmt::skip]
    let a = ComplexMatrix::from_real(4, 4, &[
        -ga, 0.0, 0.0,  2.0 * g,
        0.0, -gb, 0.0, -2.0 * g,
        0.0, 0.0, -kappa, 0.0,
        -g,  g,   0.0, -kappa,
    ])?;
    let rhs = ComplexMatrix::from_real(4, 1, &[-ga * nbar, -gb * nbar_p, 0.0, 0.0])?;
    let x = solve_linear(&a, &rhs)?;
    let (n_a, n_b) = (x[(0, 0)].re, x[(1, 0)].re);
    let c = C64::new(x[(2, 0)].re, x[(3, 0)].re);

    let flux = ga * (nbar - n_a);
    let t_eff = effective_temperature(m.omega, n_a);
    let q_dot = m.omega * flux;
    let w_dot = (m.big_omega - m.omega) * flux;
    let cop_ideal = m.temperature / t_eff - 1.0;
    let w_min = q_dot * cop_ideal;

    let mut flags = Vec::new();
    if !m.is_weak_coupling() {
        flags.push(SidebandFlag::StrongCoupling);
    }
    let (cop, efficiency) = if g == 0.0 {
        flags.push(SidebandFlag::Decoupled);
        (None, None)
    } else {
        let cop = q_dot / w_dot;
        let eff = cop / cop_ideal;
        if eff > 1.0 {
            flags.push(SidebandFlag::BelowMinimumPower);
        }
        (Some(cop), Some(eff))
    };
    Ok(SidebandSteadyState {
        n_a,
        n_b,
        c,
        t_eff,
        q_dot,
        w_dot,
        w_min,
        cop,
        cop_ideal,
        efficiency,
        flags,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct CurvePoint {
    pub g: f64,
    pub state: SidebandSteadyState,
}

/// Steady states along a grid of coupling rates, in grid order.
pub fn sideband_efficiency_curve(m: &SidebandModel, g_grid: &[f64]) -> Result<Vec<CurvePoint>> {
    if g_grid.iter().any(|&g| !(g > 0.0)) || g_grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidParameter(
            "g grid must be positive and strictly ascending".into(),
        ));
    }
    g_grid
        .par_iter()
        .map(|&g| {
            let state = sideband_steady_state(&m.with_g(g)?)?;
            Ok(CurvePoint { g, state })
        })
        .collect()
}

/// Auxiliary damping rates `γ′/2π` (Hz) of the three preset curves.
pub const TEUFEL_GAMMA_PRIME_HZ: [f64; 3] = [1e5, 1e6, 1e7];

/// Default coupling grid for the Teufel preset, `g/2π` in Hz, log-spaced
/// from 10 Hz to 1 MHz.
pub fn teufel_g_grid_hz(points: usize) -> Vec<f64> {
    let points = points.max(2);
    (0..points)
        .map(|k| 10f64.powf(1.0 + 5.0 * k as f64 / (points - 1) as f64))
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct MinPowerConsistency {
    pub t_eff: f64,
    /// Energy flow of the truncated thermal channel into the target state.
    pub q_dot: f64,
    pub entropy_flow: f64,
    pub w_min: f64,
    /// `|Ẇ_min − Q̇ (T/T_eff − 1)| / max(|Ẇ_min|, tiny)`.
    pub identity_error: f64,
    /// `|Ṡ − Q̇/T_eff| / max(|Ṡ|, tiny)`.
    pub entropy_error: f64,
    pub truncation: Option<TruncationWarning>,
}

/// Cost of holding the mechanical mode in a thermal state of occupation
/// `n_target` against its own bath, from the general expression on a
/// truncated Fock space, compared with the refrigerator identities.
pub fn sideband_min_power_consistency(
    m: &SidebandModel,
    n_target: f64,
    n_trunc: usize,
) -> Result<MinPowerConsistency> {
    if !(n_target > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "target occupation must be positive, got {n_target}"
        )));
    }
    let (d, truncation) = thermal_oscillator_dissipator(m.omega, m.temperature, m.gamma, n_trunc)?;
    let sys = OpenSystem::new(number(n_trunc).scale_real(m.omega), vec![d])?;
    let rho = truncated_thermal_state(n_target, n_trunc);
    let t_eff = effective_temperature(m.omega, n_target);
    let report = min_work_rate(&sys, &rho, m.temperature)?;
    let flows = &report.channels[0];
    let expected_w = flows.energy_flow * (m.temperature / t_eff - 1.0);
    let expected_s = flows.energy_flow / t_eff;
    let rel = |a: f64, b: f64| {
        let scale = a.abs().max(b.abs());
        if scale == 0.0 {
            0.0
        } else {
            (a - b).abs() / scale
        }
    };
    Ok(MinPowerConsistency {
        t_eff,
        q_dot: flows.energy_flow,
        entropy_flow: flows.entropy_flow,
        w_min: report.min_work_rate,
        identity_error: rel(report.min_work_rate, expected_w),
        entropy_error: rel(flows.entropy_flow, expected_s),
        truncation,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct FullLindbladCheck {
    pub n_a: f64,
    pub n_b: f64,
    /// `‖L(ρ)‖_max` of the relaxed state.
    pub residual: f64,
    pub steps: usize,
    pub sector_size: usize,
}

/// Steady state of the full rotating-frame master equation on two
/// truncated Fock spaces, found by relaxation within the block of density
/// matrix elements with equal total excitation number.
pub fn sideband_full_lindblad(m: &SidebandModel, n_trunc: usize) -> Result<FullLindbladCheck> {
    if n_trunc < 2 {
        return Err(Error::InvalidParameter("need at least two Fock levels per mode".into()));
    }
    let n = n_trunc;
    let id = ComplexMatrix::identity(n);
    let a = kron(&annihilation(n), &id);
    let b = kron(&id, &annihilation(n));
    let h = (&a.adjoint().matmul(&b) + &a.matmul(&b.adjoint())).scale_real(m.g);
    let (nbar, nbar_p) = (m.nbar(), m.nbar_prime());
    let jumps = vec![
        Jump::new(a.clone(), m.gamma * (nbar + 1.0)),
        Jump::new(a.adjoint(), m.gamma * nbar),
        Jump::new(b.clone(), m.gamma_prime * (nbar_p + 1.0)),
        Jump::new(b.adjoint(), m.gamma_prime * nbar_p),
    ];
    let charge = |k: usize| k / n + k % n;
    let sector = SectorLiouvillian::build(&h, &jumps, |i, j| charge(i) == charge(j))?;

    let start = kron(
        truncated_thermal_state(nbar, n).as_matrix(),
        truncated_thermal_state(nbar_p, n).as_matrix(),
    );
    let max_rate = jumps.iter().map(|j| j.rate).fold(m.g, f64::max);
    let slowest = m.gamma.min(m.gamma_prime);
    let relaxed = sector.relax(sector.restrict(&start), 1e-12 * max_rate, 200.0 / slowest)?;
    let rho = sector.to_dense(&relaxed.state);
    let state = DensityMatrix::from_matrix_unchecked(rho);
    let n_a = state.expectation(&a.adjoint().matmul(&a)).re;
    let n_b = state.expectation(&b.adjoint().matmul(&b)).re;
    Ok(FullLindbladCheck {
        n_a,
        n_b,
        residual: relaxed.residual,
        steps: relaxed.steps,
        sector_size: sector.len(),
    })
}

/// Scaled-down model for the full master-equation check: `T = 1`,
/// `n̄ = 2`, `n̄′ = 0.1`.
pub fn scaled_test_model(g: f64, gamma: f64, gamma_prime: f64) -> Result<SidebandModel> {
    SidebandModel::new(1.5f64.ln(), 11f64.ln(), g, gamma, gamma_prime, 1.0)
}
