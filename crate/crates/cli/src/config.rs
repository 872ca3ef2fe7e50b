//! JSON experiment configuration.

use std::fmt;
use std::path::Path;

use serde::Deserialize;

use entangle_core::{Complex64, Phase};

use crate::kinds::Kind;

/// A config problem, reported with the field it concerns.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError {
    pub field: String,
    pub message: String,
}

impl ConfigError {
    pub fn new(field: impl Into<String>, message: impl Into<String>) -> Self {
        Self { field: field.into(), message: message.into() }
    }
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.field, self.message)
    }
}

impl std::error::Error for ConfigError {}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub kind: Kind,
    #[serde(default)]
    pub model: Option<ModelSpec>,
    #[serde(default)]
    pub partition: Option<Vec<usize>>,
    #[serde(default)]
    pub operators: Option<Vec<OperatorSpec>>,
    #[serde(default)]
    pub n_grid: Option<Vec<u64>>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub trials: Option<usize>,
    #[serde(default)]
    pub probes: Option<usize>,
    #[serde(default)]
    pub dim: Option<usize>,
    #[serde(default)]
    pub k: Option<usize>,
    #[serde(default)]
    pub eigenvalues: Option<usize>,
    #[serde(default)]
    pub m1: Option<u64>,
    #[serde(default)]
    pub m2: Option<u64>,
    #[serde(default)]
    pub tolerances: Tolerances,
}

#[derive(Debug, Clone, Default, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct Tolerances {
    /// Every row must satisfy `deviation ≤ max_deviation`.
    pub max_deviation: Option<f64>,
    /// Every row must satisfy `deviation ≤ rate_constant / N`.
    pub rate_constant: Option<f64>,
    pub slope_min: Option<f64>,
    pub slope_max: Option<f64>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "model", rename_all = "snake_case", deny_unknown_fields)]
pub enum ModelSpec {
    Cyclic { m: usize },
    Bernoulli { q: u32 },
    Spectral { eigenspaces: Vec<EigenspaceSpec> },
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EigenspaceSpec {
    pub phase: PhaseSpec,
    #[serde(default)]
    pub multiplicity: Option<usize>,
    #[serde(default)]
    pub vectors: Option<Vec<Vec<ComplexSpec>>>,
}

/// `"p/q"` strings are exact; numbers are turns.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum PhaseSpec {
    Text(String),
    Turns(f64),
}

impl PhaseSpec {
    pub fn to_phase(&self, field: &str) -> Result<Phase, ConfigError> {
        match self {
            PhaseSpec::Text(s) => s.parse().map_err(|e| ConfigError::new(field, format!("{e}"))),
            PhaseSpec::Turns(t) => Phase::turns(*t).map_err(|e| ConfigError::new(field, format!("{e}"))),
        }
    }
}

/// A real number or a `[re, im]` pair.
#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(untagged)]
pub enum ComplexSpec {
    Real(f64),
    Pair([f64; 2]),
}

impl ComplexSpec {
    pub fn value(self) -> Complex64 {
        match self {
            ComplexSpec::Real(x) => Complex64::new(x, 0.0),
            ComplexSpec::Pair([re, im]) => Complex64::new(re, im),
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum OperatorSpec {
    /// `"random"`: drawn from the seeded generator.
    Named(String),
    Matrix {
        matrix: Vec<Vec<ComplexSpec>>,
    },
    Diagonal {
        diagonal: Vec<ComplexSpec>,
    },
    Character {
        character: i64,
        #[serde(default)]
        site: i64,
    },
    /// `[site, index, re, im]` terms of a cylinder function.
    Cylinder {
        cylinder: Vec<(i64, u32, f64, f64)>,
    },
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self, ConfigError> {
        let config: Self = serde_json::from_str(text)
            .map_err(|e| ConfigError::new(format!("line {} column {}", e.line(), e.column()), e.to_string()))?;
        config.validate()?;
        Ok(config)
    }

    pub fn from_path(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ConfigError::new(path.display().to_string(), format!("cannot read config: {e}")))?;
        Self::from_json(&text)
    }

    fn validate(&self) -> Result<(), ConfigError> {
        if let Some(grid) = &self.n_grid {
            if grid.is_empty() {
                return Err(ConfigError::new("n_grid", "must not be empty"));
            }
            if grid[0] == 0 {
                return Err(ConfigError::new("n_grid", "entries must be positive"));
            }
            if grid.windows(2).any(|w| w[0] >= w[1]) {
                return Err(ConfigError::new("n_grid", "entries must be strictly increasing"));
            }
        }
        let (m1, m2) = self.exponents();
        if m1 == 0 || m1 >= m2 {
            return Err(ConfigError::new("m1", format!("need 0 < m1 < m2, got {m1} and {m2}")));
        }
        if let Some(ModelSpec::Cyclic { m: 0 }) = self.model {
            return Err(ConfigError::new("model.m", "must be at least 1"));
        }
        if let Some(ModelSpec::Bernoulli { q }) = self.model {
            if q < 2 {
                return Err(ConfigError::new("model.q", "must be at least 2"));
            }
        }
        for (name, v) in [
            ("tolerances.max_deviation", self.tolerances.max_deviation),
            ("tolerances.rate_constant", self.tolerances.rate_constant),
        ] {
            if v.is_some_and(|x| x.is_nan() || x < 0.0) {
                return Err(ConfigError::new(name, "must be non-negative"));
            }
        }
        Ok(())
    }

    /// `(m1, m2)`, defaulting to `(1, 2)`.
    pub fn exponents(&self) -> (u64, u64) {
        (self.m1.unwrap_or(1), self.m2.unwrap_or(2))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_a_full_config() {
        let text = r#"{
            "kind": "entangled_convergence",
            "model": {"model": "spectral", "eigenspaces": [
                {"phase": "0/1"}, {"phase": 0.25, "multiplicity": 2},
                {"phase": "1/2", "vectors": [[1, [0, 0]]]}
            ]},
            "partition": [1, 2, 1, 2],
            "operators": ["random", {"matrix": [[1, 0], [0, [0, 1]]]}, {"diagonal": [1, -1]}],
            "n_grid": [4, 8],
            "seed": 3,
            "tolerances": {"max_deviation": 1e-10}
        }"#;
        let config = ExperimentConfig::from_json(text).unwrap();
        assert_eq!(config.kind, Kind::EntangledConvergence);
        assert_eq!(config.seed, 3);
        assert!(matches!(config.operators.as_ref().unwrap()[0], OperatorSpec::Named(_)));
        assert!(matches!(config.operators.as_ref().unwrap()[1], OperatorSpec::Matrix { .. }));
        assert!(matches!(config.operators.as_ref().unwrap()[2], OperatorSpec::Diagonal { .. }));
    }

    #[test]
    fn parses_model_and_operator_variants() {
        let text = r#"{"kind": "triple", "model": {"model": "bernoulli", "q": 3},
            "operators": [{"character": 1}, {"character": 2, "site": 1}, {"cylinder": [[0, 1, 0.5, 0.0]]}]}"#;
        let config = ExperimentConfig::from_json(text).unwrap();
        assert!(matches!(config.model, Some(ModelSpec::Bernoulli { q: 3 })));
        let ops = config.operators.unwrap();
        assert!(matches!(ops[1], OperatorSpec::Character { character: 2, site: 1 }));
        assert!(matches!(ops[2], OperatorSpec::Cylinder { .. }));
    }

    #[test]
    fn reports_locations_and_fields() {
        let err = ExperimentConfig::from_json("{\"kind\": \"nope\"}").unwrap_err();
        assert!(err.field.starts_with("line 1"));
        let err = ExperimentConfig::from_json(r#"{"kind": "zaz", "n_grid": [4, 4]}"#).unwrap_err();
        assert_eq!(err.field, "n_grid");
        let err = ExperimentConfig::from_json(r#"{"kind": "zaz", "bogus": 1}"#).unwrap_err();
        assert!(err.message.contains("bogus"));
        let err = ExperimentConfig::from_json(r#"{"kind": "triple", "m1": 2, "m2": 2}"#).unwrap_err();
        assert_eq!(err.field, "m1");
    }

    #[test]
    fn phases_keep_exactness() {
        let p = PhaseSpec::Text("2/6".into()).to_phase("phase").unwrap();
        assert!(matches!(p, Phase::Rational { num: 1, den: 3 }));
        let p = PhaseSpec::Turns(0.5).to_phase("phase").unwrap();
        assert!(!p.is_rational());
    }
}
