use std::fs;
use std::path::{Path, PathBuf};

use entlab_core::classdyn::{InvariantMeasure, RationalPoint, ToralAutomorphism};
use entlab_core::qpartitions::{SmoothPartition, DEFAULT_WEIGHT_CAP};
use entlab_core::symbols::sequence_count;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub const MAX_N: usize = 1024;
pub const MAX_K: usize = 16;
pub const MAX_DEPTH: usize = 24;

#[derive(Debug, Error)]
#[error("{0}")]
pub struct ConfigError(pub String);

fn invalid(msg: impl Into<String>) -> ConfigError {
    ConfigError(msg.into())
}

/// A named invariant measure as written in a config file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeasureSpec {
    pub name: String,
    #[serde(flatten)]
    pub measure: InvariantMeasure,
}

impl MeasureSpec {
    pub fn new(name: impl Into<String>, measure: InvariantMeasure) -> Self {
        Self {
            name: name.into(),
            measure,
        }
    }
}

/// Config file contents; every field is optional.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawConfig {
    pub experiment: Option<String>,
    #[serde(rename = "N")]
    pub n: Option<Vec<usize>>,
    #[serde(rename = "K")]
    pub k: Option<usize>,
    pub epsilon: Option<f64>,
    pub width: Option<f64>,
    pub n_e: Option<usize>,
    pub delta_prime: Option<f64>,
    pub seed: Option<u64>,
    pub samples: Option<usize>,
    pub eigenstates: Option<usize>,
    pub depth: Option<usize>,
    pub n_o: Option<usize>,
    pub measures: Option<Vec<MeasureSpec>>,
    pub out: Option<PathBuf>,
}

impl RawConfig {
    pub fn from_toml(text: &str) -> Result<Self, ConfigError> {
        toml::from_str(text).map_err(|e| invalid(format!("config parse error: {e}")))
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = fs::read_to_string(path)
            .map_err(|e| invalid(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml(&text)
    }
}

/// Command-line overrides applied on top of the file.
#[derive(Debug, Default, Clone)]
pub struct Overrides {
    pub n: Option<Vec<usize>>,
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    pub plot: bool,
}

/// Per-experiment defaults for fields the file leaves out.
#[derive(Debug, Clone)]
pub struct Defaults {
    pub n: Vec<usize>,
    pub k: usize,
    pub samples: usize,
    pub eigenstates: usize,
    pub depth: usize,
    pub n_o: usize,
}

impl Default for Defaults {
    fn default() -> Self {
        Self {
            n: vec![64, 128, 256],
            k: 4,
            samples: 100,
            eigenstates: 20,
            depth: 3,
            n_o: 2,
        }
    }
}

/// Fully resolved and validated run configuration.
#[derive(Debug, Clone, Serialize)]
pub struct ExperimentConfig {
    pub experiment: String,
    #[serde(rename = "N")]
    pub n: Vec<usize>,
    #[serde(rename = "K")]
    pub k: usize,
    pub epsilon: f64,
    pub width: f64,
    pub n_e: Option<usize>,
    pub delta_prime: f64,
    pub seed: u64,
    pub samples: usize,
    pub eigenstates: usize,
    pub depth: usize,
    pub n_o: usize,
    pub measures: Vec<MeasureSpec>,
    pub out: PathBuf,
    pub plot: bool,
}

pub fn default_measures() -> Vec<MeasureSpec> {
    let orbit = |q: u64| {
        let cat = ToralAutomorphism::cat();
        entlab_core::classdyn::find_periodic_orbit(&cat, q)
            .expect("the cat map has orbits of every denominator")
    };
    let mut m = vec![
        MeasureSpec::new("lebesgue", InvariantMeasure::Lebesgue),
        MeasureSpec::new(
            "origin",
            InvariantMeasure::periodic(vec![RationalPoint::new(0, 0, 1)]),
        ),
    ];
    for q in [2u64, 3, 5, 7] {
        m.push(MeasureSpec::new(
            format!("orbit_q{q}"),
            InvariantMeasure::periodic(orbit(q)),
        ));
    }
    m.push(MeasureSpec::new(
        "half_lebesgue_half_origin",
        InvariantMeasure::mixture(vec![
            (0.5, InvariantMeasure::Lebesgue),
            (0.5, InvariantMeasure::origin()),
        ]),
    ));
    m
}

impl ExperimentConfig {
    pub fn resolve(
        experiment: &str,
        raw: RawConfig,
        defaults: &Defaults,
        flags: Overrides,
    ) -> Result<Self, ConfigError> {
        if let Some(name) = &raw.experiment {
            if name != experiment {
                return Err(invalid(format!(
                    "config is for experiment {name:?} but subcommand {experiment:?} was given"
                )));
            }
        }
        let k = raw.k.unwrap_or(defaults.k);
        let cfg = Self {
            experiment: experiment.to_string(),
            n: flags.n.or(raw.n).unwrap_or_else(|| defaults.n.clone()),
            k,
            epsilon: raw.epsilon.unwrap_or(1.0 / k.max(1) as f64),
            width: raw
                .width
                .unwrap_or((1.0 / 16.0f64).min(0.25 / k.max(1) as f64)),
            n_e: raw.n_e,
            delta_prime: raw.delta_prime.unwrap_or(0.05),
            seed: flags.seed.or(raw.seed).unwrap_or(1),
            samples: raw.samples.unwrap_or(defaults.samples),
            eigenstates: raw.eigenstates.unwrap_or(defaults.eigenstates),
            depth: raw.depth.unwrap_or(defaults.depth),
            n_o: raw.n_o.unwrap_or(defaults.n_o),
            measures: raw.measures.unwrap_or_else(default_measures),
            out: flags
                .out
                .or(raw.out)
                .unwrap_or_else(|| PathBuf::from("out").join(experiment)),
            plot: flags.plot,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    fn validate(&self) -> Result<(), ConfigError> {
        if self.n.is_empty() {
            return Err(invalid("N list is empty"));
        }
        for &n in &self.n {
            if n < 2 || n % 2 != 0 || n > MAX_N {
                return Err(invalid(format!("N = {n} must be even and in [2, {MAX_N}]")));
            }
        }
        if !(1..=MAX_K).contains(&self.k) {
            return Err(invalid(format!("K = {} must be in [1, {MAX_K}]", self.k)));
        }
        SmoothPartition::new(self.k, self.epsilon, self.width)
            .map_err(|e| invalid(e.to_string()))?;
        if !(0.0..1.0).contains(&self.delta_prime) {
            return Err(invalid(format!(
                "delta_prime = {} must be in [0, 1)",
                self.delta_prime
            )));
        }
        if self.samples == 0 || self.eigenstates == 0 || self.depth == 0 || self.n_o == 0 {
            return Err(invalid(
                "samples, eigenstates, depth and n_o must be positive",
            ));
        }
        if let Some(ne) = self.n_e {
            if ne == 0 {
                return Err(invalid("n_e override must be positive"));
            }
        }
        if self.depth > MAX_DEPTH {
            return Err(invalid(format!(
                "depth = {} exceeds {MAX_DEPTH}",
                self.depth
            )));
        }
        let cat = ToralAutomorphism::cat();
        let mut names = std::collections::BTreeSet::new();
        for m in &self.measures {
            if !names.insert(m.name.as_str()) {
                return Err(invalid(format!("duplicate measure name {:?}", m.name)));
            }
            m.measure
                .validate(&cat)
                .map_err(|e| invalid(format!("measure {:?}: {e}", m.name)))?;
        }
        Ok(())
    }

    /// Word-count check for trees of depth `n` over `K` symbols.
    pub fn check_word_cap(&self, n: usize) -> Result<(), ConfigError> {
        if sequence_count(self.k, n).is_none_or(|c| c > DEFAULT_WEIGHT_CAP) {
            return Err(invalid(format!(
                "K^n = {}^{n} exceeds the word cap {DEFAULT_WEIGHT_CAP}",
                self.k
            )));
        }
        Ok(())
    }
}
