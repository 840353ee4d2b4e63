use std::collections::BTreeMap;
use std::sync::Arc;

use faer::c64;
use rayon::prelude::*;

use super::{large, BlockOperator, GhostError, GhostOptions, Window};
use crate::group::{coordinate_indices, FiniteGroup};
use crate::linalg::{self, CMat};
use crate::rep::{self, markov_operator, regular_representation, round_rank, tensor, Pairing, Representation};

/// The intersection quotient `Γ/(N∩M)` of a pair block, with coordinate
/// maps into `G_N` and `G_M` and the symbol images (one per symbol).
#[derive(Debug)]
pub struct PairGroup {
    pub group: Arc<FiniteGroup>,
    pub to_left: Vec<usize>,
    pub to_right: Vec<usize>,
    pub genset: Vec<usize>,
}

impl PairGroup {
    /// Indices of elements whose `G_N` coordinate is trivial.
    pub fn kernel_fiber(&self) -> Vec<usize> {
        (0..self.group.order()).filter(|&q| self.to_left[q] == 0).collect()
    }
}

/// Builds `Γ/(N∩M)` for window positions `n`, `m`. Repeated levels give
/// the level group itself.
pub fn pair_group(window: &Window, n: usize, m: usize, cap: usize) -> Result<PairGroup, GhostError> {
    let family = window.family();
    let (ln, lm) = (window.levels()[n], window.levels()[m]);
    if ln == lm {
        let level = family.level(ln)?;
        let ids: Vec<usize> = (0..level.group.order()).collect();
        return Ok(PairGroup {
            group: level.group.clone(),
            to_left: ids.clone(),
            to_right: ids,
            genset: level.symbol_indices(),
        });
    }
    let group = Arc::new(family.product_image(ln, lm, cap)?);
    let (to_left, to_right) = coordinate_indices(&group, &family.level(ln)?.group, &family.level(lm)?.group)?;
    let genset = (0..family.symbols().len()).map(|s| group.generator_index(s)).collect();
    Ok(PairGroup {
        group,
        to_left,
        to_right,
        genset,
    })
}

/// `λ̃_N ⊗ π̃_M` on the pair group.
pub fn pair_representation(
    window: &Window,
    n: usize,
    m: usize,
    pair: &PairGroup,
) -> Result<Representation, GhostError> {
    let left = regular_representation(window.family().level(window.levels()[n])?.group.clone());
    let right = window.irrep(m);
    let pairing = if pair.group.same_as(left.group()) {
        Pairing::Identity
    } else {
        Pairing::Coordinates(pair.group.clone())
    };
    Ok(tensor(&left, right, pairing)?)
}

/// `⟨χ_{λ̃_N ⊗ π̃_M}, 1⟩ = (|G_N|/|Q|) Σ_{b ∈ fiber} χ_π(b)`, unrounded.
pub fn oracle_value(window: &Window, n: usize, m: usize, pair: &PairGroup) -> f64 {
    let pi = window.irrep(m);
    let sum: c64 = pair
        .kernel_fiber()
        .into_iter()
        .map(|q| pi.character(pair.to_right[q]))
        .sum();
    window.order(n) as f64 * sum.re / pair.group.order() as f64
}

pub fn oracle_rank(window: &Window, n: usize, m: usize, pair: &PairGroup) -> Result<usize, GhostError> {
    Ok(round_rank(oracle_value(window, n, m, pair))?)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GapAtOne {
    /// `1 − (largest eigenvalue below the 1-cluster)`, or 2 when the whole
    /// spectrum lies in the cluster.
    pub gap: f64,
    pub degenerate: bool,
}

/// Gap at one from an ascending spectrum.
pub fn gap_from_spectrum(values: &[f64], cluster_threshold: f64) -> GapAtOne {
    match values.iter().rev().find(|&&v| v < 1.0 - cluster_threshold) {
        Some(&v) => GapAtOne {
            gap: 1.0 - v,
            degenerate: false,
        },
        None => GapAtOne {
            gap: 2.0,
            degenerate: true,
        },
    }
}

/// Gap at one of a Hermitian block with the default cluster rule.
pub fn gap_at_one(block: &CMat) -> Result<GapAtOne, GhostError> {
    let values = linalg::hermitian_eigenvalues(block)?;
    Ok(gap_from_spectrum(&values, super::CLUSTER_THRESHOLD))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SolverPath {
    Dense,
    Iterative,
}

/// Everything measured on one pair block.
#[derive(Debug, Clone)]
pub struct BlockAnalysis {
    pub n: usize,
    pub m: usize,
    pub dim: usize,
    pub quotient_order: usize,
    pub gap: GapAtOne,
    /// Largest eigenvalue (dense path) or the top Ritz value (iterative).
    pub top_eigenvalue: f64,
    pub bottom_eigenvalue: Option<f64>,
    pub hermitian_defect: f64,
    pub rank: usize,
    pub oracle_rank: usize,
    pub oracle_value: f64,
    /// Frobenius distance between the spectral and averaging projections.
    pub projection_distance: f64,
    /// `‖e² − e‖_F` for the dense path.
    pub idempotence_defect: Option<f64>,
    pub path: SolverPath,
}

#[derive(Debug)]
pub(crate) struct BlockOutcome {
    pub analysis: BlockAnalysis,
    pub t: Option<CMat>,
    pub e: Option<CMat>,
}

fn check_ambiguity(n: usize, m: usize, values: &[f64], opts: &GhostOptions) -> Result<(), GhostError> {
    let lo = 1.0 - opts.ambiguity_window;
    let hi = 1.0 - opts.cluster_threshold;
    match values.iter().find(|&&v| v > lo && v < hi) {
        Some(&value) => Err(GhostError::ClusterAmbiguous { n, m, value }),
        None => Ok(()),
    }
}

fn dense_block(
    window: &Window,
    n: usize,
    m: usize,
    pair: &PairGroup,
    t: Option<CMat>,
    opts: &GhostOptions,
) -> Result<BlockOutcome, GhostError> {
    let rep = pair_representation(window, n, m, pair)?;
    let t = match t {
        Some(t) => t,
        None => markov_operator(&rep, &pair.genset)?,
    };
    let (values, vectors) = linalg::hermitian_eigen(&t)?;
    check_ambiguity(n, m, &values, opts)?;
    let gap = gap_from_spectrum(&values, opts.cluster_threshold);
    let (e, rank) = linalg::spectral_projection(&values, &vectors, 1.0 - opts.cluster_threshold);
    let averaging = rep::invariant_projection(&rep);
    let projection_distance = linalg::frobenius_distance(&e, &averaging);
    if projection_distance > opts.projection_tol {
        return Err(GhostError::ProjectionMismatch {
            n,
            m,
            distance: projection_distance,
        });
    }
    let oracle_value = oracle_value(window, n, m, pair);
    let oracle_rank = round_rank(oracle_value)?;
    if rank != oracle_rank {
        return Err(GhostError::OracleMismatch {
            n,
            m,
            numeric: rank,
            oracle: oracle_rank,
        });
    }
    let analysis = BlockAnalysis {
        n,
        m,
        dim: t.nrows(),
        quotient_order: pair.group.order(),
        gap,
        top_eigenvalue: *values.last().expect("nonempty block"),
        bottom_eigenvalue: values.first().copied(),
        hermitian_defect: linalg::hermitian_defect(&t),
        rank,
        oracle_rank,
        oracle_value,
        projection_distance,
        idempotence_defect: Some(linalg::frobenius_distance(&(&e * &e), &e)),
        path: SolverPath::Dense,
    };
    Ok(BlockOutcome {
        analysis,
        t: Some(t),
        e: Some(e),
    })
}

pub(crate) fn analyze_block(
    window: &Window,
    n: usize,
    m: usize,
    pair: &PairGroup,
    t: Option<CMat>,
    opts: &GhostOptions,
) -> Result<BlockOutcome, GhostError> {
    let dim = window.order(n) * window.irrep(m).dim();
    if dim <= opts.dense_limit {
        dense_block(window, n, m, pair, t, opts)
    } else {
        large::iterative_block(window, n, m, pair, opts)
    }
}

/// The pair groups of a window, keyed by ordered positions `(n, m)`.
pub fn pair_groups(
    window: &Window,
    opts: &GhostOptions,
) -> Result<BTreeMap<(usize, usize), Arc<PairGroup>>, GhostError> {
    let k = window.len();
    let keys: Vec<(usize, usize)> = (0..k).flat_map(|n| (0..k).map(move |m| (n, m))).collect();
    let pool = opts.pool()?;
    let built: Vec<Result<PairGroup, GhostError>> = pool.install(|| {
        keys.par_iter()
            .map(|&(n, m)| pair_group(window, n, m, opts.cap))
            .collect()
    });
    keys.into_iter()
        .zip(built)
        .map(|(k, g)| g.map(|g| (k, Arc::new(g))))
        .collect()
}

/// `T = (1/|S|) Σ_s (Λ ⊗ π)(s)` block by block. Blocks above the dense
/// limit are recorded without a matrix.
pub fn build_t(window: &Window, opts: &GhostOptions) -> Result<BlockOperator, GhostError> {
    let pairs = pair_groups(window, opts)?;
    let pool = opts.pool()?;
    type Built = ((usize, usize), Option<CMat>);
    let entries: Vec<Result<Built, GhostError>> = pool.install(|| {
        pairs
            .par_iter()
            .map(|(&(n, m), pair)| {
                if window.order(n) * window.irrep(m).dim() > opts.dense_limit {
                    return Ok(((n, m), None));
                }
                let rep = pair_representation(window, n, m, pair)?;
                Ok(((n, m), Some(markov_operator(&rep, &pair.genset)?)))
            })
            .collect()
    });
    let mut t = BlockOperator::new(window.axes());
    for entry in entries {
        match entry? {
            ((n, m), Some(block)) => t.insert(n, m, block),
            ((n, m), None) => t.insert_implicit(n, m, None),
        }
    }
    Ok(t)
}

/// Spectral 1-cluster projection of every block of `t`, each checked
/// against the averaging projection and the character oracle.
pub fn ghost_projection(window: &Window, t: &BlockOperator, opts: &GhostOptions) -> Result<BlockOperator, GhostError> {
    Ok(analyze_with(window, Some(t), opts)?.e)
}

/// The operators `T` and `e` of a window together with per-block data.
#[derive(Debug, Clone)]
pub struct WindowAnalysis {
    pub t: BlockOperator,
    pub e: BlockOperator,
    pub blocks: Vec<BlockAnalysis>,
    pub pairs: BTreeMap<(usize, usize), Arc<PairGroup>>,
}

impl WindowAnalysis {
    pub fn block(&self, n: usize, m: usize) -> Option<&BlockAnalysis> {
        self.blocks.iter().find(|b| b.n == n && b.m == m)
    }

    /// `oracle[n][m]`, character-oracle ranks.
    pub fn oracle_table(&self, len: usize) -> Vec<Vec<usize>> {
        let mut table = vec![vec![0; len]; len];
        for b in &self.blocks {
            table[b.n][b.m] = b.oracle_rank;
        }
        table
    }
}

/// One eigensolve per block: builds `T`, its gap at one and `e`.
pub fn analyze_window(window: &Window, opts: &GhostOptions) -> Result<WindowAnalysis, GhostError> {
    analyze_with(window, None, opts)
}

fn analyze_with(
    window: &Window,
    given_t: Option<&BlockOperator>,
    opts: &GhostOptions,
) -> Result<WindowAnalysis, GhostError> {
    let pairs = pair_groups(window, opts)?;
    let pool = opts.pool()?;
    let outcomes: Vec<Result<BlockOutcome, GhostError>> = pool.install(|| {
        pairs
            .par_iter()
            .map(|(&(n, m), pair)| {
                let t = given_t.and_then(|t| t.block(n, m).cloned());
                analyze_block(window, n, m, pair, t, opts)
            })
            .collect()
    });
    let mut t = BlockOperator::new(window.axes());
    let mut e = BlockOperator::new(window.axes());
    let mut blocks = Vec::with_capacity(outcomes.len());
    for outcome in outcomes {
        let BlockOutcome { analysis, t: tb, e: eb } = outcome?;
        let (n, m, rank) = (analysis.n, analysis.m, analysis.rank);
        match tb {
            Some(tb) => t.insert(n, m, tb),
            None => t.insert_implicit(n, m, None),
        }
        match eb {
            Some(eb) => e.insert_with_rank(n, m, eb, rank),
            None => e.insert_implicit(n, m, Some(rank)),
        }
        blocks.push(analysis);
    }
    Ok(WindowAnalysis { t, e, blocks, pairs })
}
