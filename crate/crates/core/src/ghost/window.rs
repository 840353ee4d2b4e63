use std::sync::Arc;

use super::{BlockAxis, GhostError};
use crate::families::{choose_irrep, IrrepPolicy};
use crate::group::{QuotientFamily, DEFAULT_CAP};
use crate::rep::{is_irreducible, Representation};

/// Eigenvalues at or above `1 − cluster` belong to the 1-cluster.
pub const CLUSTER_THRESHOLD: f64 = 1e-8;
/// Eigenvalues in `(1 − AMBIGUITY_WINDOW, 1 − cluster)` make a block ambiguous.
pub const AMBIGUITY_WINDOW: f64 = 1e-3;
/// Frobenius tolerance between spectral and averaging projections.
pub const PROJECTION_TOL: f64 = 1e-8;
/// Largest block handled by dense eigensolves.
pub const DENSE_BLOCK_LIMIT: usize = 4096;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GhostOptions {
    pub cluster_threshold: f64,
    pub ambiguity_window: f64,
    pub projection_tol: f64,
    pub dense_limit: usize,
    /// Closure cap for intersection quotients.
    pub cap: usize,
    /// Worker threads for independent blocks.
    pub parallelism: usize,
}

impl Default for GhostOptions {
    fn default() -> Self {
        Self {
            cluster_threshold: CLUSTER_THRESHOLD,
            ambiguity_window: AMBIGUITY_WINDOW,
            projection_tol: PROJECTION_TOL,
            dense_limit: DENSE_BLOCK_LIMIT,
            cap: DEFAULT_CAP,
            parallelism: 1,
        }
    }
}

impl GhostOptions {
    pub(crate) fn pool(&self) -> Result<rayon::ThreadPool, GhostError> {
        rayon::ThreadPoolBuilder::new()
            .num_threads(self.parallelism.max(1))
            .build()
            .map_err(|e| GhostError::Pool(e.to_string()))
    }
}

/// An ordered selection of family levels with one irreducible per level.
#[derive(Debug, Clone)]
pub struct Window {
    family: Arc<QuotientFamily>,
    levels: Vec<usize>,
    irreps: Vec<Representation>,
    policy: String,
}

impl Window {
    /// Chooses irreducibles for `levels` by `policy`.
    pub fn new(family: Arc<QuotientFamily>, levels: Vec<usize>, policy: &IrrepPolicy) -> Result<Self, GhostError> {
        let irreps = levels
            .iter()
            .map(|&l| choose_irrep(&family, l, policy))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Self {
            family,
            levels,
            irreps,
            policy: policy.name().to_string(),
        })
    }

    /// Uses every level of the family.
    pub fn full(family: Arc<QuotientFamily>, policy: &IrrepPolicy) -> Result<Self, GhostError> {
        let levels = (0..family.levels().len()).collect();
        Self::new(family, levels, policy)
    }

    /// Explicit irreducibles, one per level, each checked.
    pub fn from_irreps(
        family: Arc<QuotientFamily>,
        levels: Vec<usize>,
        irreps: Vec<Representation>,
    ) -> Result<Self, GhostError> {
        if levels.len() != irreps.len() {
            return Err(GhostError::BadWindow("one irreducible per level is required".into()));
        }
        for (&l, rep) in levels.iter().zip(&irreps) {
            let lvl = family.level(l)?;
            if !rep.group().same_as(&lvl.group) {
                return Err(GhostError::BadWindow(format!(
                    "irreducible for level {l} lives on another group"
                )));
            }
            if !is_irreducible(rep) {
                return Err(GhostError::NotIrreducible { level: l });
            }
        }
        Ok(Self {
            family,
            levels,
            irreps,
            policy: "explicit".into(),
        })
    }

    pub fn family(&self) -> &Arc<QuotientFamily> {
        &self.family
    }

    pub fn levels(&self) -> &[usize] {
        &self.levels
    }

    pub fn len(&self) -> usize {
        self.levels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.levels.is_empty()
    }

    pub fn irrep(&self, pos: usize) -> &Representation {
        &self.irreps[pos]
    }

    pub fn policy(&self) -> &str {
        &self.policy
    }

    pub fn label(&self, pos: usize) -> &str {
        &self.family.levels()[self.levels[pos]].label
    }

    pub fn order(&self, pos: usize) -> usize {
        self.family.levels()[self.levels[pos]].group.order()
    }

    pub fn dims(&self) -> Vec<usize> {
        self.irreps.iter().map(Representation::dim).collect()
    }

    /// Empirical (★★): irreducible dimensions strictly increase.
    pub fn dims_strictly_increasing(&self) -> bool {
        self.dims().windows(2).all(|w| w[0] < w[1])
    }

    pub fn axes(&self) -> Vec<BlockAxis> {
        (0..self.len())
            .map(|p| BlockAxis {
                label: self.label(p).to_string(),
                points: self.order(p),
                fiber_dim: self.irreps[p].dim(),
            })
            .collect()
    }
}
