//! JSON scenario files: one Hamiltonian system plus everything needed to
//! integrate it and run the verification suites against it.

use serde::Deserialize;
use thiserror::Error;

use crate::corpus::DEFAULT_SEED;
use crate::expr::{Observable, ParseError};
use crate::flow::{FlowError, HamiltonianSystem, IntegratorKind, SeparableSplit};
use crate::lift::LiftedPoint;
use crate::operator::Section;
use crate::symplectic::PhasePoint;

#[derive(Debug, Error)]
pub enum ScenarioError {
    #[error("invalid scenario JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("{field}: {source}")]
    Parse {
        field: String,
        #[source]
        source: ParseError,
    },
    #[error("{0}")]
    Invalid(String),
    #[error("separable_split: {0}")]
    Split(#[source] FlowError),
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SplitConfig {
    #[serde(rename = "T")]
    pub kinetic: String,
    #[serde(rename = "V")]
    pub potential: String,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InitialConfig {
    pub q: Vec<f64>,
    pub p: Vec<f64>,
    #[serde(default)]
    pub theta: f64,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SectionConfig {
    pub re: String,
    #[serde(default = "zero_text")]
    pub im: String,
}

fn zero_text() -> String {
    "0".to_string()
}

fn default_hbar() -> f64 {
    1.0
}

fn default_seed() -> u64 {
    DEFAULT_SEED
}

/// The scenario file as written on disk.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub n: usize,
    #[serde(default = "default_hbar")]
    pub hbar: f64,
    pub hamiltonian: String,
    #[serde(default)]
    pub separable_split: Option<SplitConfig>,
    pub initial: InitialConfig,
    #[serde(default)]
    pub integrator: IntegratorKind,
    pub dt: f64,
    pub steps: usize,
    #[serde(default)]
    pub observables: Vec<String>,
    #[serde(default)]
    pub sections: Vec<SectionConfig>,
    #[serde(default = "default_seed")]
    pub seed: u64,
}

/// A validated scenario.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub dim: usize,
    pub hbar: f64,
    pub hamiltonian: Observable,
    pub split: Option<SeparableSplit>,
    pub initial: LiftedPoint,
    pub integrator: IntegratorKind,
    pub dt: f64,
    pub steps: usize,
    pub observables: Vec<Observable>,
    pub sections: Vec<Section>,
    pub seed: u64,
}

fn parse_field(field: impl Into<String>, text: &str, dim: usize) -> Result<Observable, ScenarioError> {
    Observable::parse(text, dim).map_err(|source| ScenarioError::Parse {
        field: field.into(),
        source,
    })
}

impl Scenario {
    pub fn from_json(text: &str) -> Result<Self, ScenarioError> {
        let config: ScenarioConfig = serde_json::from_str(text)?;
        Self::from_config(&config)
    }

    pub fn from_config(config: &ScenarioConfig) -> Result<Self, ScenarioError> {
        let n = config.n;
        if n == 0 {
            return Err(ScenarioError::Invalid("n must be positive".into()));
        }
        if !(config.hbar > 0.0 && config.hbar.is_finite()) {
            return Err(ScenarioError::Invalid(format!("hbar must be positive, got {}", config.hbar)));
        }
        if !(config.dt > 0.0 && config.dt.is_finite()) {
            return Err(ScenarioError::Invalid(format!("dt must be positive, got {}", config.dt)));
        }
        let init = &config.initial;
        if init.q.len() != n || init.p.len() != n {
            return Err(ScenarioError::Invalid(format!(
                "initial.q and initial.p must have length {n}, got {} and {}",
                init.q.len(),
                init.p.len()
            )));
        }
        if init.q.iter().chain(&init.p).chain([&init.theta]).any(|x| !x.is_finite()) {
            return Err(ScenarioError::Invalid("initial state must be finite".into()));
        }

        let hamiltonian = parse_field("hamiltonian", &config.hamiltonian, n)?;
        let split = match &config.separable_split {
            Some(s) => {
                let t = parse_field("separable_split.T", &s.kinetic, n)?;
                let v = parse_field("separable_split.V", &s.potential, n)?;
                Some(SeparableSplit::new(t, v).map_err(ScenarioError::Split)?)
            }
            None => None,
        };
        let scenario = Scenario {
            dim: n,
            hbar: config.hbar,
            split,
            initial: LiftedPoint::new(PhasePoint::new(init.q.clone(), init.p.clone()), init.theta),
            integrator: config.integrator,
            dt: config.dt,
            steps: config.steps,
            observables: config
                .observables
                .iter()
                .enumerate()
                .map(|(i, text)| parse_field(format!("observables[{i}]"), text, n))
                .collect::<Result<_, _>>()?,
            sections: config
                .sections
                .iter()
                .enumerate()
                .map(|(i, s)| {
                    Section::parse(&s.re, &s.im, n).map_err(|source| ScenarioError::Parse {
                        field: format!("sections[{i}]"),
                        source,
                    })
                })
                .collect::<Result<_, _>>()?,
            seed: config.seed,
            hamiltonian,
        };
        let system = scenario.system()?;
        if scenario.integrator == IntegratorKind::StormerVerlet && !system.is_separable() {
            return Err(ScenarioError::Invalid(
                "integrator stormer_verlet requires a separable_split".into(),
            ));
        }
        Ok(scenario)
    }

    /// The Hamiltonian system, carrying the declared split if any.
    pub fn system(&self) -> Result<HamiltonianSystem, ScenarioError> {
        let system = HamiltonianSystem::new(&self.hamiltonian);
        match &self.split {
            Some(split) => system.with_split(split).map_err(ScenarioError::Split),
            None => Ok(system),
        }
    }
}
