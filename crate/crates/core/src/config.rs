//! Run configuration, read from TOML or assembled from command-line flags.
//!
//! ```toml
//! kind = "sl2"            # sl2 | alt | product
//! primes = [3, 5, 7]      # sl2
//! degrees = [4, 5, 6]     # alt
//! policy = "steinberg"    # steinberg | deleted-natural | trivial
//! window = [0, 1, 2]      # level positions; all levels when absent
//! parallelism = 1
//! truncate = 1            # optional J-truncation index
//!
//! [tolerances]
//! cluster = 1e-8
//! projection = 1e-8
//!
//! [output]
//! json = "report.json"
//! csv = "spectra.csv"
//! ```
//!
//! A `product` family lists a symbol pairing and explicit levels:
//!
//! ```toml
//! kind = "product"
//! pairing = [1, 0, 3, 2]
//! [[levels]]
//! label = "Alt(5)"
//! degree = 5
//! permutations = [[[0, 1, 2]], [[0, 2, 1]], [[0, 1, 2, 3, 4]], [[0, 4, 3, 2, 1]]]
//! [[levels]]
//! label = "SL(2,5)"
//! modulus = 5
//! matrices = [[[1, 1], [0, 1]], [[1, 4], [0, 1]], [[1, 0], [1, 1]], [[1, 0], [4, 1]]]
//! ```

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::families::{AltGenerators, FamilyKind, FamilySpec, IrrepPolicy, ProductLevel};
use crate::ghost::{GhostOptions, AMBIGUITY_WINDOW, CLUSTER_THRESHOLD, PROJECTION_TOL};
use crate::group::{GeneratorSymbolSet, GroupElement, Permutation, PrimeMatrix};

/// Cluster thresholds must stay below this.
pub const MAX_CLUSTER_THRESHOLD: f64 = 1e-2;

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("malformed config: {0}")]
    Parse(String),
    #[error("invalid config: {0}")]
    Invalid(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Tolerances {
    #[serde(default = "default_cluster")]
    pub cluster: f64,
    #[serde(default = "default_projection")]
    pub projection: f64,
}

fn default_cluster() -> f64 {
    CLUSTER_THRESHOLD
}

fn default_projection() -> f64 {
    PROJECTION_TOL
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            cluster: CLUSTER_THRESHOLD,
            projection: PROJECTION_TOL,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Outputs {
    pub json: Option<PathBuf>,
    pub csv: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LevelConfig {
    pub label: Option<String>,
    pub degree: Option<usize>,
    /// Per symbol, a list of cycles.
    pub permutations: Option<Vec<Vec<Vec<u32>>>>,
    pub modulus: Option<u32>,
    /// Per symbol, a square matrix.
    pub matrices: Option<Vec<Vec<Vec<i64>>>>,
    pub expected_order: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub kind: String,
    #[serde(default)]
    pub primes: Vec<u32>,
    #[serde(default)]
    pub degrees: Vec<usize>,
    #[serde(default)]
    pub pairing: Vec<usize>,
    #[serde(default)]
    pub levels: Vec<LevelConfig>,
    pub policy: Option<String>,
    pub window: Option<Vec<usize>>,
    #[serde(default = "default_parallelism")]
    pub parallelism: usize,
    pub truncate: Option<usize>,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default)]
    pub output: Outputs,
}

fn default_parallelism() -> usize {
    1
}

impl RunConfig {
    /// A config with defaults for everything except the family kind.
    pub fn new(kind: &str) -> Self {
        Self {
            kind: kind.to_string(),
            primes: Vec::new(),
            degrees: Vec::new(),
            pairing: Vec::new(),
            levels: Vec::new(),
            policy: None,
            window: None,
            parallelism: 1,
            truncate: None,
            tolerances: Tolerances::default(),
            output: Outputs::default(),
        }
    }

    pub fn from_toml_str(text: &str) -> Result<Self, ConfigError> {
        let cfg: Self = toml::from_str(text).map_err(|e| ConfigError::Parse(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_path(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::from_toml_str(&text)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let invalid = |m: &str| Err(ConfigError::Invalid(m.to_string()));
        match self.kind.as_str() {
            "sl2" if self.primes.is_empty() => return invalid("sl2 needs a nonempty prime list"),
            "alt" if self.degrees.is_empty() => return invalid("alt needs a nonempty degree list"),
            "product" if self.levels.is_empty() => return invalid("product needs at least one level"),
            "sl2" | "alt" | "product" => {}
            other => return Err(ConfigError::Invalid(format!("unknown family kind {other:?}"))),
        }
        let t = &self.tolerances;
        if !(t.cluster > 0.0 && t.cluster < MAX_CLUSTER_THRESHOLD) {
            return invalid("tolerances.cluster must be positive and below 1e-2");
        }
        if !(t.projection > 0.0 && t.projection.is_finite()) {
            return invalid("tolerances.projection must be positive");
        }
        if self.window.as_ref().is_some_and(Vec::is_empty) {
            return invalid("window must not be empty");
        }
        if let Some(p) = &self.policy {
            if IrrepPolicy::parse(p).is_none() {
                return Err(ConfigError::Invalid(format!("unknown irrep policy {p:?}")));
            }
        }
        if self.parallelism == 0 {
            return invalid("parallelism must be at least 1");
        }
        Ok(())
    }

    pub fn policy(&self) -> IrrepPolicy {
        match &self.policy {
            Some(p) => IrrepPolicy::parse(p).expect("validated policy"),
            None if self.kind == "sl2" => IrrepPolicy::Steinberg,
            None => IrrepPolicy::DeletedNatural,
        }
    }

    pub fn family_spec(&self) -> Result<FamilySpec, ConfigError> {
        let kind = match self.kind.as_str() {
            "sl2" => FamilyKind::Sl2 {
                primes: self.primes.clone(),
            },
            "alt" => FamilyKind::Alt {
                degrees: self.degrees.clone(),
                generators: AltGenerators::Default,
            },
            "product" => {
                let symbols = GeneratorSymbolSet::new(self.pairing.clone())
                    .map_err(|e| ConfigError::Invalid(format!("pairing: {e}")))?;
                let levels = self
                    .levels
                    .iter()
                    .enumerate()
                    .map(|(i, l)| product_level(i, l))
                    .collect::<Result<_, _>>()?;
                FamilyKind::Product { symbols, levels }
            }
            other => return Err(ConfigError::Invalid(format!("unknown family kind {other:?}"))),
        };
        Ok(FamilySpec {
            kind,
            policy: self.policy(),
        })
    }

    pub fn ghost_options(&self) -> GhostOptions {
        GhostOptions {
            cluster_threshold: self.tolerances.cluster,
            projection_tol: self.tolerances.projection,
            ambiguity_window: AMBIGUITY_WINDOW,
            parallelism: self.parallelism,
            ..GhostOptions::default()
        }
    }
}

fn product_level(i: usize, l: &LevelConfig) -> Result<ProductLevel, ConfigError> {
    let bad = |m: String| ConfigError::Invalid(format!("level {i}: {m}"));
    let images: Vec<GroupElement> = match (&l.permutations, &l.matrices) {
        (Some(perms), None) => {
            let degree = l.degree.ok_or_else(|| bad("permutations need a degree".into()))?;
            perms
                .iter()
                .map(|cycles| {
                    let cycles: Vec<&[u32]> = cycles.iter().map(Vec::as_slice).collect();
                    Permutation::from_cycles(degree, &cycles)
                        .map(GroupElement::from)
                        .map_err(|e| bad(e.to_string()))
                })
                .collect::<Result<_, _>>()?
        }
        (None, Some(mats)) => {
            let p = l.modulus.ok_or_else(|| bad("matrices need a modulus".into()))?;
            mats.iter()
                .map(|rows| {
                    PrimeMatrix::new(p, rows)
                        .map(GroupElement::from)
                        .map_err(|e| bad(e.to_string()))
                })
                .collect::<Result<_, _>>()?
        }
        _ => return Err(bad("give exactly one of permutations or matrices".into())),
    };
    Ok(ProductLevel {
        label: l.label.clone().unwrap_or_else(|| format!("level {i}")),
        images,
        expected_order: l.expected_order,
    })
}
