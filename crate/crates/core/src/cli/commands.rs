use std::fmt::Write as _;
use std::path::Path;

use rayon::prelude::*;

use super::model_file::{parse_model, ModelSpecFile, UnitSystem};
use super::output::{num, opt_num, svg_plot, Csv, Header, Series};
use super::quantity::{self, parse_in, Kind, Quantity};
use super::{
    CliError, Command, CostArgs, ProtocolArgs, QcCostArgs, QubitCoolArgs, SidebandArgs, SteadyArgs,
};
use crate::density::{gibbs_state, DensityMatrix};
use crate::lindblad::{steady_state, OpenSystem};
use crate::linalg::hermitian_eig;
use crate::models::qc::{qc_computation_cost, qc_free_energy_loss, QcMode, QcNoise};
use crate::models::qubit::{qubit_cool_power, QubitCoolMode};
use crate::models::sideband::{
    sideband_full_lindblad, sideband_steady_state, teufel_g_grid_hz, SidebandFlag, SidebandModel,
    SidebandSteadyState, TEUFEL_GAMMA_PRIME_HZ,
};
use crate::strong::two_qubit_strong;
use crate::thermo::{min_work_rate, protocol_step_check, ControlCostReport};
use crate::units::{hz, to_joules, to_kelvin, to_watts};

type CliResult<T> = std::result::Result<T, CliError>;

pub(super) fn dispatch(cmd: &Command, command_line: &str) -> CliResult<String> {
    let header = Header::new(command_line);
    match cmd {
        Command::Steady(a) => steady(a, header),
        Command::Cost(a) => cost(a, header),
        Command::Sideband(a) => sideband(a, header),
        Command::QubitCool(a) => qubit_cool(a, header),
        Command::QcCost(a) => qc_cost(a, header),
        Command::ProtocolCheck(a) => protocol_check(a, header),
    }
}

fn input(e: impl std::fmt::Display) -> CliError {
    CliError::Input(e.to_string())
}

fn quantity(h: &mut Header, name: &str, s: &str, kind: Kind, si: bool) -> CliResult<f64> {
    let q = parse_in(s, kind, si).map_err(|e| input(format!("--{name}: {e}")))?;
    record(h, name, &q);
    Ok(q.value)
}

fn record(h: &mut Header, name: &str, q: &Quantity) {
    h.push(format!("input {name} = {q}"));
}

struct LoadedModel {
    spec: ModelSpecFile,
    system: OpenSystem,
    si: bool,
}

fn load_model(path: &Path, h: &mut Header) -> CliResult<LoadedModel> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| input(format!("cannot read {}: {e}", path.display())))?;
    let spec = parse_model(&text).map_err(|e| input(format!("{}: {e}", path.display())))?;
    let system = spec
        .build_system()
        .map_err(|e| input(format!("{}: {e}", path.display())))?;
    let si = spec.units == UnitSystem::Si;
    h.push(format!("model: {}", path.display()));
    if let Some(d) = &spec.description {
        h.push(format!("description: {d}"));
    }
    h.push(if si {
        "model units: si (Hz and kelvin, converted to rad/s)".to_string()
    } else {
        "model units: natural (hbar = k_B = 1)".to_string()
    });
    h.push("output units: energies, rates and temperatures in rad/s; powers in rad^2/s^2");
    Ok(LoadedModel { spec, system, si })
}

fn reference_temperature(m: &LoadedModel, temp: &Option<String>, h: &mut Header) -> CliResult<f64> {
    match temp {
        Some(s) => quantity(h, "temp", s, Kind::Temperature, m.si),
        None => {
            let t = m.spec.reference_temperature();
            h.push(format!("reference temperature (model) = {}", num(t)));
            Ok(t)
        }
    }
}

fn resolve_target(m: &LoadedModel, target: &str, h: &mut Header) -> CliResult<DensityMatrix> {
    let dim = m.system.dim();
    let rho = match target.split_once(':') {
        None if target == "model" => m
            .spec
            .target(&m.system)
            .map_err(input)?
            .ok_or_else(|| input("model has no target_state; pass --target"))?,
        None if target == "mixed" => DensityMatrix::maximally_mixed(dim),
        None if target == "steady" => steady_state(&m.system)?,
        None if target == "ground" => {
            let spec = hermitian_eig(m.system.hamiltonian())?;
            DensityMatrix::pure(&spec.eigenvectors.column(0))?
        }
        Some(("gibbs", t)) => {
            let q = parse_in(t, Kind::Temperature, m.si).map_err(|e| input(format!("--target: {e}")))?;
            record(h, "target gibbs temperature", &q);
            gibbs_state(m.system.hamiltonian(), q.value)?
        }
        Some(("basis", k)) => {
            let k: usize = k
                .parse()
                .map_err(|_| input(format!("--target basis:<k> needs an index, got `{k}`")))?;
            if k >= dim {
                return Err(input(format!("basis index {k} out of range for dim {dim}")));
            }
            DensityMatrix::basis_state(dim, k)
        }
        _ => {
            return Err(input(format!(
                "unknown target `{target}` (model, gibbs:<T>, ground, mixed, basis:<k>, steady)"
            )))
        }
    };
    h.push(format!("target: {target}"));
    Ok(rho)
}

fn steady(a: &SteadyArgs, mut h: Header) -> CliResult<String> {
    let m = load_model(&a.model, &mut h)?;
    let rho = steady_state(&m.system)?;
    let residual = m.system.residual(&rho);
    let eig = hermitian_eig(rho.as_matrix())?.eigenvalues;
    let eig_text: Vec<String> = eig.iter().map(|&x| num(x)).collect();
    let dim = rho.dim();
    if a.csv {
        h.push(format!("residual = {}", num(residual)));
        h.push(format!("eigenvalues = {}", eig_text.join(" ")));
        let mut csv = Csv::new(h, &["i", "j", "re", "im"]);
        for i in 0..dim {
            for j in 0..dim {
                let z = rho.as_matrix()[(i, j)];
                csv.row(vec![i.to_string(), j.to_string(), num(z.re), num(z.im)]);
            }
        }
        return Ok(csv.render());
    }
    let mut s = h.render();
    let _ = writeln!(s, "steady state (dim {dim})");
    for i in 0..dim {
        let row: Vec<String> = (0..dim)
            .map(|j| {
                let z = rho.as_matrix()[(i, j)];
                format!("{} {}{}i", num(z.re), if z.im < 0.0 { "-" } else { "+" }, num(z.im.abs()))
            })
            .collect();
        let _ = writeln!(s, "  [{}]", row.join(", "));
    }
    let _ = writeln!(s, "residual = {}", num(residual));
    let _ = writeln!(s, "eigenvalues = {}", eig_text.join(" "));
    Ok(s)
}

fn cost_table(report: &ControlCostReport, mut h: Header, csv: bool) -> String {
    let t = report.reference_temperature;
    if csv {
        h.push(format!("reference temperature = {}", num(t)));
        let mut c = Csv::new(
            h,
            &["channel", "entropy_flow", "energy_flow", "free_energy_rate", "work_rate", "divergent"],
        );
        for ch in &report.channels {
            c.row(vec![
                ch.label.clone(),
                num(ch.entropy_flow),
                num(ch.energy_flow),
                num(ch.free_energy_rate),
                num(-ch.free_energy_rate),
                ch.divergent.to_string(),
            ]);
        }
        c.row(vec![
            "total".into(),
            num(report.channels.iter().map(|c| c.entropy_flow).sum()),
            num(report.channels.iter().map(|c| c.energy_flow).sum()),
            num(-report.min_work_rate),
            num(report.min_work_rate),
            report.divergent.to_string(),
        ]);
        return c.render();
    }
    let mut s = h.render();
    let _ = writeln!(s, "reference temperature = {}", num(t));
    let _ = writeln!(
        s,
        "{:<20} {:>20} {:>20} {:>20}",
        "channel", "entropy_flow", "energy_flow", "free_energy_rate"
    );
    for ch in &report.channels {
        let _ = writeln!(
            s,
            "{:<20} {:>20} {:>20} {:>20}{}",
            ch.label,
            num(ch.entropy_flow),
            num(ch.energy_flow),
            num(ch.free_energy_rate),
            if ch.divergent { "  divergent" } else { "" }
        );
    }
    let _ = writeln!(s, "W_min = {}", num(report.min_work_rate));
    if report.divergent {
        let _ = writeln!(
            s,
            "divergent: the target lacks support where the noise pushes population; \
             no finite power holds it"
        );
    }
    s
}

fn cost(a: &CostArgs, mut h: Header) -> CliResult<String> {
    let m = load_model(&a.model, &mut h)?;
    let t = reference_temperature(&m, &a.temp, &mut h)?;
    let rho = resolve_target(&m, &a.target, &mut h)?;
    let report = min_work_rate(&m.system, &rho, t)?;
    if a.scalar {
        if report.divergent {
            return Err(CliError::DivergentScalar(
                "minimum power is infinite for this target (divergent)".into(),
            ));
        }
        return Ok(format!("{}\n", num(report.min_work_rate)));
    }
    Ok(cost_table(&report, h, a.csv))
}

fn protocol_check(a: &ProtocolArgs, mut h: Header) -> CliResult<String> {
    let m = load_model(&a.model, &mut h)?;
    let t = reference_temperature(&m, &a.temp, &mut h)?;
    let rho = resolve_target(&m, &a.target, &mut h)?;
    let dts: Vec<f64> = match &a.dts {
        Some(list) => list
            .iter()
            .map(|s| quantity::time(s).map(|q| q.value).map_err(|e| input(format!("--dts: {e}"))))
            .collect::<CliResult<_>>()?,
        None => {
            let rate = m.system.max_rate().max(m.system.spectral_bound());
            if !(rate > 0.0) {
                return Err(input("model has no dynamics; pass --dts"));
            }
            (0..5).map(|k| 1e-2 / rate / f64::powi(2.0, k)).collect()
        }
    };
    let check = protocol_step_check(&m.system, &rho, t, &dts)?;
    let slope = check.slope.map_or_else(|| "none".to_string(), num);
    let verdict = if check.first_order() { "first order" } else { "NOT first order" };
    if a.csv {
        h.push(format!("W_min = {}", num(check.min_work_rate)));
        h.push(format!("extrapolated limit = {}", num(check.extrapolated_limit)));
        h.push(format!("slope = {slope} ({verdict})"));
        let mut c = Csv::new(h, &["dt", "work_rate_estimate", "error"]);
        for r in &check.rows {
            c.row(vec![num(r.dt), num(r.work_rate_estimate), num(r.error)]);
        }
        return Ok(c.render());
    }
    let mut s = h.render();
    let _ = writeln!(s, "{:>20} {:>20} {:>20}", "dt", "work_rate_estimate", "error");
    for r in &check.rows {
        let _ = writeln!(s, "{:>20} {:>20} {:>20}", num(r.dt), num(r.work_rate_estimate), num(r.error));
    }
    let _ = writeln!(s, "W_min = {}", num(check.min_work_rate));
    let _ = writeln!(s, "extrapolated limit = {}", num(check.extrapolated_limit));
    let _ = writeln!(s, "slope = {slope} ({verdict})");
    Ok(s)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum SweepParam {
    G,
    GammaPrime,
}

struct Sweep {
    param: SweepParam,
    values: Vec<f64>,
    log: bool,
}

fn parse_sweep(s: &str, h: &mut Header) -> CliResult<Sweep> {
    let parts: Vec<&str> = s.split(':').collect();
    if !(4..=5).contains(&parts.len()) {
        return Err(input(format!("--sweep `{s}`: expected <param>:<start>:<stop>:<count>[:log]")));
    }
    let param = match parts[0] {
        "g" => SweepParam::G,
        "gamma-prime" | "gamma_prime" => SweepParam::GammaPrime,
        p => return Err(input(format!("--sweep: unknown parameter `{p}` (g, gamma-prime)"))),
    };
    let kind = Kind::Rate;
    let start = quantity(h, "sweep start", parts[1], kind, false)?;
    let stop = quantity(h, "sweep stop", parts[2], kind, false)?;
    let count: usize = parts[3]
        .parse()
        .map_err(|_| input(format!("--sweep: bad count `{}`", parts[3])))?;
    if count < 2 {
        return Err(input("--sweep: count must be at least 2"));
    }
    let log = match parts.get(4) {
        None | Some(&"lin") => false,
        Some(&"log") => true,
        Some(o) => return Err(input(format!("--sweep: unknown spacing `{o}` (lin, log)"))),
    };
    if !(stop > start) || start < 0.0 {
        return Err(input("--sweep: need 0 <= start < stop"));
    }
    if log && start <= 0.0 {
        return Err(input("--sweep: log spacing needs start > 0"));
    }
    let values = (0..count)
        .map(|k| {
            let f = k as f64 / (count - 1) as f64;
            if log {
                start * (stop / start).powf(f)
            } else {
                start + (stop - start) * f
            }
        })
        .collect();
    h.push(format!(
        "sweep {} over {count} {} points",
        parts[0],
        if log { "log-spaced" } else { "linear" }
    ));
    Ok(Sweep { param, values, log })
}

fn flag_text(flags: &[SidebandFlag]) -> String {
    if flags.is_empty() {
        return "-".into();
    }
    flags
        .iter()
        .map(|f| match f {
            SidebandFlag::Decoupled => "decoupled",
            SidebandFlag::StrongCoupling => "strong_coupling",
            SidebandFlag::BelowMinimumPower => "below_min_power",
        })
        .collect::<Vec<_>>()
        .join(";")
}

struct SidebandRow {
    g: f64,
    gamma_prime: f64,
    state: SidebandSteadyState,
    full_n_a: Option<f64>,
}

fn sideband(a: &SidebandArgs, mut h: Header) -> CliResult<String> {
    let preset = if a.teufel {
        h.push("preset teufel: omega/2pi = 10.56 MHz, Omega/2pi = 1.54 GHz, gamma/2pi = 32 Hz, T = 20 mK");
        Some(SidebandModel::teufel(0.0, TEUFEL_GAMMA_PRIME_HZ[0])?)
    } else {
        None
    };
    let mut pick = |name: &str, given: &Option<String>, kind: Kind, fallback: Option<f64>| -> CliResult<f64> {
        match (given, fallback) {
            (Some(s), _) => quantity(&mut h, name, s, kind, false),
            (None, Some(v)) => Ok(v),
            (None, None) => Err(input(format!("--{name} is required without --teufel"))),
        }
    };
    let omega = pick("omega", &a.omega, Kind::Frequency, preset.map(|p| p.omega))?;
    let big_omega = pick("Omega", &a.big_omega, Kind::Frequency, preset.map(|p| p.big_omega))?;
    let gamma = pick("gamma", &a.gamma, Kind::Rate, preset.map(|p| p.gamma))?;
    let temperature = pick("temp", &a.temp, Kind::Temperature, preset.map(|p| p.temperature))?;
    let gamma_primes: Vec<f64> = match (&a.gamma_prime, a.teufel) {
        (Some(s), _) => vec![quantity(&mut h, "gamma-prime", s, Kind::Rate, false)?],
        (None, true) => TEUFEL_GAMMA_PRIME_HZ.iter().map(|&f| hz(f)).collect(),
        (None, false) => return Err(input("--gamma-prime is required without --teufel")),
    };
    let g_single = match &a.g {
        Some(s) => Some(quantity(&mut h, "g", s, Kind::Rate, false)?),
        None => None,
    };
    let sweep = match &a.sweep {
        Some(s) => Some(parse_sweep(s, &mut h)?),
        None => None,
    };
    let base = SidebandModel::new(omega, big_omega, g_single.unwrap_or(0.0), gamma, gamma_primes[0], temperature)?;

    let (curves, x_param, log_x): (Vec<Vec<(f64, f64)>>, SweepParam, bool) = match sweep {
        Some(Sweep { param: SweepParam::G, values, log }) => (
            gamma_primes.iter().map(|&gp| values.iter().map(|&g| (g, gp)).collect()).collect(),
            SweepParam::G,
            log,
        ),
        Some(Sweep { param: SweepParam::GammaPrime, values, log }) => {
            let g = g_single.ok_or_else(|| input("--sweep gamma-prime needs --g"))?;
            (vec![values.iter().map(|&gp| (g, gp)).collect()], SweepParam::GammaPrime, log)
        }
        None => match g_single {
            Some(g) => (gamma_primes.iter().map(|&gp| vec![(g, gp)]).collect(), SweepParam::G, false),
            None if a.teufel => {
                h.push("default g grid: 41 log-spaced points, g/2pi from 10 Hz to 1 MHz");
                let grid: Vec<f64> = teufel_g_grid_hz(41).into_iter().map(hz).collect();
                (
                    gamma_primes.iter().map(|&gp| grid.iter().map(|&g| (g, gp)).collect()).collect(),
                    SweepParam::G,
                    true,
                )
            }
            None => return Err(input("pass --g or --sweep")),
        },
    };
    if let Some(n) = a.oracle {
        h.push(format!("oracle: truncated master equation with {n} Fock levels per mode"));
    }
    h.push("columns: rates and temperatures in rad/s, T_eff_K in kelvin, powers in rad^2/s^2");

    let mut rows: Vec<Vec<SidebandRow>> = Vec::with_capacity(curves.len());
    for curve in &curves {
        let computed = curve
            .par_iter()
            .map(|&(g, gp)| -> CliResult<SidebandRow> {
                let m = base.with_g(g)?.with_gamma_prime(gp)?;
                let state = sideband_steady_state(&m)?;
                let full_n_a = match a.oracle {
                    Some(n) => Some(sideband_full_lindblad(&m, n)?.n_a),
                    None => None,
                };
                Ok(SidebandRow { g, gamma_prime: gp, state, full_n_a })
            })
            .collect::<CliResult<Vec<_>>>()?;
        rows.push(computed);
    }

    let mut columns = vec![
        "g", "gamma_prime", "T_eff", "T_eff_K", "n_a", "n_b", "Q_dot", "W_dot", "W_min", "cop",
        "cop_ideal", "eps", "flags",
    ];
    if a.oracle.is_some() {
        columns.extend(["n_a_full", "n_a_rel_err"]);
    }
    let mut csv = Csv::new(h, &columns);
    for r in rows.iter().flatten() {
        let s = &r.state;
        let mut cells = vec![
            num(r.g),
            num(r.gamma_prime),
            num(s.t_eff),
            num(to_kelvin(s.t_eff)),
            num(s.n_a),
            num(s.n_b),
            num(s.q_dot),
            num(s.w_dot),
            num(s.w_min),
            opt_num(s.cop),
            num(s.cop_ideal),
            opt_num(s.efficiency),
            flag_text(&s.flags),
        ];
        if let Some(full) = r.full_n_a {
            cells.push(num(full));
            cells.push(num((s.n_a - full).abs() / full.abs().max(f64::MIN_POSITIVE)));
        }
        csv.row(cells);
    }

    if let Some(path) = &a.svg {
        let (y_label, pick_y): (&str, fn(&SidebandSteadyState) -> f64) = match a.plot.as_str() {
            "eps" => ("efficiency", |s| s.efficiency.unwrap_or(f64::NAN)),
            "T_eff" => ("T_eff (K)", |s| to_kelvin(s.t_eff)),
            "n_a" => ("n_a", |s| s.n_a),
            p => return Err(input(format!("--plot: unknown column `{p}` (eps, T_eff, n_a)"))),
        };
        let series: Vec<Series> = rows
            .iter()
            .map(|curve| {
                let name = match x_param {
                    SweepParam::G => format!("gamma'/2pi = {:.3e} Hz", curve[0].gamma_prime / std::f64::consts::TAU),
                    SweepParam::GammaPrime => format!("g/2pi = {:.3e} Hz", curve[0].g / std::f64::consts::TAU),
                };
                let points = curve
                    .iter()
                    .map(|r| {
                        let x = match x_param {
                            SweepParam::G => r.g,
                            SweepParam::GammaPrime => r.gamma_prime,
                        };
                        (x, pick_y(&r.state))
                    })
                    .collect();
                Series { name, points }
            })
            .collect();
        let x_label = match x_param {
            SweepParam::G => "g (rad/s)",
            SweepParam::GammaPrime => "gamma' (rad/s)",
        };
        std::fs::write(path, svg_plot(&series, x_label, y_label, log_x))
            .map_err(|e| input(format!("cannot write {}: {e}", path.display())))?;
    }

    let text = csv.render();
    match &a.out {
        Some(path) => {
            std::fs::write(path, &text).map_err(|e| input(format!("cannot write {}: {e}", path.display())))?;
            Ok(String::new())
        }
        None => Ok(text),
    }
}

fn qubit_cool(a: &QubitCoolArgs, mut h: Header) -> CliResult<String> {
    let gap = quantity(&mut h, "E", &a.gap, Kind::Frequency, false)?;
    let t = quantity(&mut h, "T", &a.temp, Kind::Temperature, false)?;
    let tc = quantity(&mut h, "Tc", &a.cold_temp, Kind::Temperature, false)?;
    let gamma = quantity(&mut h, "gamma", &a.gamma, Kind::Rate, false)?;
    let mode = match a.mode.as_str() {
        "full" => QubitCoolMode::Full,
        "approx" => QubitCoolMode::Approx,
        m => return Err(input(format!("--mode: unknown `{m}` (full, approx)"))),
    };
    let weak = qubit_cool_power(gap, t, tc, gamma, mode)?;
    let strong = match &a.strong {
        None => None,
        Some(s) => {
            let eps = quantity(&mut h, "strong", s, Kind::Frequency, false)?;
            let aux_gap = match &a.aux_gap {
                Some(x) => quantity(&mut h, "aux-gap", x, Kind::Frequency, false)?,
                None => {
                    let v = 10.0 * gap.max(eps);
                    h.push(format!("aux-gap (default) = {}", num(v)));
                    v
                }
            };
            let w = if tc == 0.0 {
                f64::INFINITY
            } else {
                two_qubit_strong(gap, aux_gap, eps, t, tc, gamma)?
            };
            Some((eps, w))
        }
    };
    let headline = strong.map_or(weak, |(_, w)| w);
    if a.scalar {
        if headline.is_infinite() {
            return Err(CliError::DivergentScalar(
                "minimum power is infinite at Tc = 0 (divergent)".into(),
            ));
        }
        return Ok(format!("{}\n", num(headline)));
    }
    h.push("powers in rad^2/s^2 and watts");
    let mut s = h.render();
    let _ = writeln!(s, "W_min = {} ({} W)", num(weak), num(to_watts(weak)));
    if let Some((eps, w)) = strong {
        let _ = writeln!(
            s,
            "W_min with gap shifted by {} = {} ({} W)",
            num(eps),
            num(w),
            num(to_watts(w))
        );
        if weak.is_finite() && weak > 0.0 {
            let _ = writeln!(s, "strong/weak = {}", num(w / weak));
        }
    }
    if headline.is_infinite() {
        let _ = writeln!(s, "divergent: a qubit at Tc = 0 cannot be held with finite power");
    }
    Ok(s)
}

fn qc_cost(a: &QcCostArgs, mut h: Header) -> CliResult<String> {
    let noise = QcNoise {
        gamma: quantity(&mut h, "gamma", &a.gamma, Kind::Rate, false)?,
        beta: quantity(&mut h, "beta", &a.beta, Kind::Rate, false)?,
        gate_time: quantity(&mut h, "tau", &a.tau, Kind::Time, false)?,
        gap: quantity(&mut h, "E", &a.gap, Kind::Frequency, false)?,
        temperature: quantity(&mut h, "T", &a.temp, Kind::Temperature, false)?,
    };
    h.push(format!("input M = {}", a.qubits));
    let mode = match a.monte_carlo {
        Some(samples) => {
            h.push(format!("monte carlo: {samples} samples, seed {}", a.seed));
            QcMode::MonteCarlo { samples, seed: a.seed }
        }
        None => QcMode::Formula,
    };
    let loss = qc_free_energy_loss(&noise, mode)?;
    h.push("energies in rad/s and joules");
    let mut s = h.render();
    let _ = writeln!(s, "p_beta = {}", num(loss.p_beta));
    let _ = writeln!(s, "p_gamma = {}", num(loss.p_gamma));
    if !loss.valid {
        let _ = writeln!(s, "warning: error probability above 0.05; the leading-log formula is unreliable");
    }
    let per = loss.work_to_restore;
    let _ = writeln!(s, "per qubit per gate = {} ({} J)", num(per), num(to_joules(per)));
    if let Some(se) = loss.std_error {
        let _ = writeln!(s, "standard error = {} ({} J)", num(se), num(to_joules(se)));
        let formula = qc_free_energy_loss(&noise, QcMode::Formula)?.work_to_restore;
        let _ = writeln!(s, "formula = {} (ratio {})", num(formula), num(per / formula));
    }
    let total = qc_computation_cost(per, a.qubits);
    let _ = writeln!(s, "total for M = {} = {} ({} J)", a.qubits, num(total), num(to_joules(total)));
    Ok(s)
}
