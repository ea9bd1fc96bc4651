//! JSON model files.
//!
//! ```json
//! {
//!   "dim": 2,
//!   "hamiltonian": { "real": [[0, 0], [0, 1]] },
//!   "dissipators": [
//!     { "label": "bath", "type": "thermal_qubit", "gap": 1, "temperature": 0.5, "gamma": 0.1 }
//!   ],
//!   "reference_temperature": 0.5,
//!   "target_state": { "gibbs": 0.2 }
//! }
//! ```
//!
//! Matrices are row-major nested arrays with separate `real` and optional
//! `imag` parts. With `"units": "si"` every energy, frequency and rate
//! (including Hamiltonian entries) is read in Hz and every temperature in
//! kelvin.

use serde::{Deserialize, Serialize};

use crate::density::{gibbs_state, DensityMatrix};
use crate::error::Error;
use crate::lindblad::{
    depolarizing_dissipator, thermal_oscillator_dissipator, thermal_qubit_dissipator, Dissipator,
    Jump, OpenSystem,
};
use crate::linalg::{ComplexMatrix, C64};
use crate::units::{hz, kelvin};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixSpec {
    pub real: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub imag: Option<Vec<Vec<f64>>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum UnitSystem {
    #[default]
    Natural,
    Si,
}

impl UnitSystem {
    fn is_natural(&self) -> bool {
        *self == UnitSystem::Natural
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JumpSpec {
    pub operator: MatrixSpec,
    pub rate: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum DissipatorSpec {
    ThermalQubit {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        label: Option<String>,
        gap: f64,
        temperature: f64,
        gamma: f64,
    },
    ThermalOscillator {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        label: Option<String>,
        omega: f64,
        temperature: f64,
        gamma: f64,
    },
    Depolarizing {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        label: Option<String>,
        beta: f64,
    },
    Custom {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        label: Option<String>,
        jumps: Vec<JumpSpec>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum TargetSpec {
    Gibbs { gibbs: f64 },
    Matrix(MatrixSpec),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSpecFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub description: Option<String>,
    #[serde(default, skip_serializing_if = "UnitSystem::is_natural")]
    pub units: UnitSystem,
    pub dim: usize,
    pub hamiltonian: MatrixSpec,
    #[serde(default)]
    pub dissipators: Vec<DissipatorSpec>,
    pub reference_temperature: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target_state: Option<TargetSpec>,
}

/// A problem with a model file, located by its JSON path.
#[derive(Debug, Clone, PartialEq)]
pub struct SpecError {
    pub path: String,
    pub message: String,
}

impl std::fmt::Display for SpecError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.path.is_empty() || self.path == "." {
            write!(f, "{}", self.message)
        } else {
            write!(f, "at `{}`: {}", self.path, self.message)
        }
    }
}

fn at(path: impl Into<String>, e: impl std::fmt::Display) -> SpecError {
    SpecError {
        path: path.into(),
        message: e.to_string(),
    }
}

pub fn parse_model(text: &str) -> Result<ModelSpecFile, SpecError> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de).map_err(|e| at(e.path().to_string(), e.inner()))
}

impl MatrixSpec {
    pub fn from_matrix(m: &ComplexMatrix) -> Self {
        let real = (0..m.rows())
            .map(|i| m.row(i).iter().map(|z| z.re).collect())
            .collect();
        let any_imag = m.as_slice().iter().any(|z| z.im != 0.0);
        let imag = any_imag.then(|| {
            (0..m.rows())
                .map(|i| m.row(i).iter().map(|z| z.im).collect())
                .collect()
        });
        Self { real, imag }
    }

    fn to_matrix(&self, dim: usize, path: &str, scale: f64) -> Result<ComplexMatrix, SpecError> {
        let check = |rows: &Vec<Vec<f64>>, part: &str| -> Result<(), SpecError> {
            if rows.len() != dim {
                return Err(at(
                    format!("{path}.{part}"),
                    format!("expected {dim} rows, found {}", rows.len()),
                ));
            }
            for (i, r) in rows.iter().enumerate() {
                if r.len() != dim {
                    return Err(at(
                        format!("{path}.{part}[{i}]"),
                        format!("expected {dim} columns, found {}", r.len()),
                    ));
                }
            }
            Ok(())
        };
        check(&self.real, "real")?;
        if let Some(im) = &self.imag {
            check(im, "imag")?;
        }
        Ok(ComplexMatrix::from_fn(dim, dim, |i, j| {
            let im = self.imag.as_ref().map_or(0.0, |m| m[i][j]);
            C64::new(self.real[i][j], im) * scale
        }))
    }
}

impl ModelSpecFile {
    fn frequency(&self, v: f64) -> f64 {
        match self.units {
            UnitSystem::Natural => v,
            UnitSystem::Si => hz(v),
        }
    }

    fn temperature(&self, v: f64) -> f64 {
        match self.units {
            UnitSystem::Natural => v,
            UnitSystem::Si => kelvin(v),
        }
    }

    /// Reference temperature in natural units.
    pub fn reference_temperature(&self) -> f64 {
        self.temperature(self.reference_temperature)
    }

    pub fn build_system(&self) -> Result<OpenSystem, SpecError> {
        if self.dim == 0 {
            return Err(at("dim", "dimension must be positive"));
        }
        let h = self
            .hamiltonian
            .to_matrix(self.dim, "hamiltonian", self.frequency(1.0))?;
        let mut dissipators = Vec::with_capacity(self.dissipators.len());
        for (k, d) in self.dissipators.iter().enumerate() {
            let path = format!("dissipators[{k}]");
            let built = self.build_dissipator(d, &path)?;
            if built.dim() != self.dim {
                return Err(at(
                    path,
                    format!("acts on dimension {} but the model has dim {}", built.dim(), self.dim),
                ));
            }
            dissipators.push(built);
        }
        OpenSystem::new(h, dissipators).map_err(|e| at("hamiltonian", e))
    }

    fn build_dissipator(&self, d: &DissipatorSpec, path: &str) -> Result<Dissipator, SpecError> {
        let relabel = |mut d: Dissipator, label: &Option<String>| {
            if let Some(l) = label {
                d.label = l.clone();
            }
            d
        };
        let built = match d {
            DissipatorSpec::ThermalQubit {
                label,
                gap,
                temperature,
                gamma,
            } => thermal_qubit_dissipator(
                self.frequency(*gap),
                self.temperature(*temperature),
                self.frequency(*gamma),
            )
            .map(|x| relabel(x, label)),
            DissipatorSpec::ThermalOscillator {
                label,
                omega,
                temperature,
                gamma,
            } => thermal_oscillator_dissipator(
                self.frequency(*omega),
                self.temperature(*temperature),
                self.frequency(*gamma),
                self.dim,
            )
            .map(|(x, _)| relabel(x, label)),
            DissipatorSpec::Depolarizing { label, beta } => {
                depolarizing_dissipator(self.frequency(*beta)).map(|x| relabel(x, label))
            }
            DissipatorSpec::Custom { label, jumps } => {
                let mut built = Vec::with_capacity(jumps.len());
                for (j, jump) in jumps.iter().enumerate() {
                    let op = jump.operator.to_matrix(
                        self.dim,
                        &format!("{path}.jumps[{j}].operator"),
                        1.0,
                    )?;
                    built.push(Jump::new(op, self.frequency(jump.rate)));
                }
                Dissipator::new(label.clone().unwrap_or_else(|| "custom".into()), built)
            }
        };
        built.map_err(|e: Error| at(path, e))
    }

    /// Target state from the file, if any.
    pub fn target(&self, sys: &OpenSystem) -> Result<Option<DensityMatrix>, SpecError> {
        match &self.target_state {
            None => Ok(None),
            Some(TargetSpec::Gibbs { gibbs }) => gibbs_state(sys.hamiltonian(), self.temperature(*gibbs))
                .map(Some)
                .map_err(|e| at("target_state.gibbs", e)),
            Some(TargetSpec::Matrix(m)) => {
                let rho = m.to_matrix(self.dim, "target_state", 1.0)?;
                DensityMatrix::new(rho)
                    .map(Some)
                    .map_err(|e| at("target_state", e))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const QUBIT: &str = r#"{
        "dim": 2,
        "hamiltonian": { "real": [[0, 0], [0, 1]] },
        "dissipators": [
            { "label": "bath", "type": "thermal_qubit", "gap": 1, "temperature": 0.5, "gamma": 0.1 }
        ],
        "reference_temperature": 0.5,
        "target_state": { "gibbs": 0.2 }
    }"#;

    #[test]
    fn parses_and_builds() {
        let spec = parse_model(QUBIT).unwrap();
        let sys = spec.build_system().unwrap();
        assert_eq!(sys.dim(), 2);
        assert_eq!(sys.dissipators()[0].label, "bath");
        assert!(spec.target(&sys).unwrap().is_some());
    }

    #[test]
    fn round_trips() {
        let spec = parse_model(QUBIT).unwrap();
        let text = serde_json::to_string_pretty(&spec).unwrap();
        assert_eq!(parse_model(&text).unwrap(), spec);
    }

    #[test]
    fn errors_carry_paths() {
        let bad = QUBIT.replace("\"gamma\": 0.1", "\"gamma\": \"fast\"");
        let e = parse_model(&bad).unwrap_err();
        assert!(e.path.starts_with("dissipators[0]"), "{e}");

        let bad = QUBIT.replace("[[0, 0], [0, 1]]", "[[0, 0], [0]]");
        let e = parse_model(&bad).unwrap().build_system().unwrap_err();
        assert_eq!(e.path, "hamiltonian.real[1]");

        let bad = QUBIT.replace("\"dim\": 2", "\"dim\": 2, \"dimension\": 3");
        assert!(parse_model(&bad).is_err());
    }

    #[test]
    fn si_units_scale_everything() {
        let si = r#"{
            "units": "si",
            "dim": 2,
            "hamiltonian": { "real": [[0, 0], [0, 5e9]] },
            "dissipators": [
                { "type": "thermal_qubit", "gap": 5e9, "temperature": 0.05, "gamma": 1e4 }
            ],
            "reference_temperature": 0.05
        }"#;
        let spec = parse_model(si).unwrap();
        let sys = spec.build_system().unwrap();
        assert!((sys.hamiltonian()[(1, 1)].re - hz(5e9)).abs() < 1.0);
        assert!((spec.reference_temperature() - kelvin(0.05)).abs() < 1e-3);
    }
}
