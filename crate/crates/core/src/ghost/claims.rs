use std::collections::BTreeMap;

use faer::Mat;
use rayon::prelude::*;
use serde::Serialize;

use super::{BlockAxis, BlockOperator, GhostError, GhostOptions, Window, WindowAnalysis};
use crate::geometry::markov_gap;
use crate::linalg;
use crate::rep::round_rank;

pub const PASS: &str = "pass (finite scale)";

/// Rank of a block of a projection-valued operator: the recorded cluster
/// rank when present, otherwise the rounded trace.
fn block_rank(op: &BlockOperator, n: usize, m: usize) -> Result<usize, GhostError> {
    if let Some(r) = op.cluster_rank(n, m) {
        return Ok(r);
    }
    let block = op.block(n, m).ok_or(GhostError::MissingBlock { n, m })?;
    Ok(round_rank(linalg::trace(block).re)?)
}

/// Diagonal ranks `k ↦ rank(e_{N_k N_k})`.
pub fn diagonal_ranks(op: &BlockOperator) -> Result<Vec<usize>, GhostError> {
    (0..op.len()).map(|k| block_rank(op, k, k)).collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RankSequence {
    pub diagonal: Vec<usize>,
    /// `table[n][m] = rank(e_{NM})`.
    pub table: Vec<Vec<usize>>,
    pub oracle: Vec<Vec<usize>>,
}

/// Numeric ranks of `e` checked entry by entry against the oracle table.
pub fn rank_sequence(e: &BlockOperator, oracle: &[Vec<usize>]) -> Result<RankSequence, GhostError> {
    let k = e.len();
    let mut table = vec![vec![0; k]; k];
    for (n, row) in table.iter_mut().enumerate() {
        for (m, slot) in row.iter_mut().enumerate() {
            let numeric = block_rank(e, n, m)?;
            if numeric != oracle[n][m] {
                return Err(GhostError::OracleMismatch {
                    n,
                    m,
                    numeric,
                    oracle: oracle[n][m],
                });
            }
            *slot = numeric;
        }
    }
    Ok(RankSequence {
        diagonal: (0..k).map(|i| table[i][i]).collect(),
        table,
        oracle: oracle.to_vec(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PairGap {
    pub n: usize,
    pub m: usize,
    pub gap: f64,
    pub degenerate: bool,
    pub quotient_order: usize,
    /// `1 − μ₂` of the Markov operator on `ℓ²(Γ/(N∩M))`.
    pub quotient_gap: f64,
    pub consistent: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GapReport {
    pub pairs: Vec<PairGap>,
    pub min_gap: f64,
    pub min_quotient_gap: f64,
    /// Empirical (★): every intersection quotient has a gap above the
    /// ambiguity window.
    pub star: bool,
    pub consistent: bool,
    pub verdict: String,
}

/// Pair gaps, their minimum, and the cross-check against the spectral gap
/// of each intersection quotient on the same generators.
pub fn verify_claim1(analysis: &WindowAnalysis, opts: &GhostOptions) -> Result<GapReport, GhostError> {
    // (n, m) and (m, n) give isomorphic quotients with the same generators.
    let mut keys: Vec<(usize, usize)> = analysis.pairs.keys().map(|&(n, m)| (n.min(m), n.max(m))).collect();
    keys.sort_unstable();
    keys.dedup();
    let pool = opts.pool()?;
    let gaps: Vec<Result<f64, GhostError>> = pool.install(|| {
        keys.par_iter()
            .map(|key| {
                let pair = &analysis.pairs[key];
                Ok(markov_gap(&pair.group, &pair.genset)?)
            })
            .collect()
    });
    let mut quotient: BTreeMap<(usize, usize), f64> = BTreeMap::new();
    for (key, gap) in keys.into_iter().zip(gaps) {
        quotient.insert(key, gap?);
    }

    let pairs: Vec<PairGap> = analysis
        .blocks
        .iter()
        .map(|b| {
            let q = quotient[&(b.n.min(b.m), b.n.max(b.m))];
            PairGap {
                n: b.n,
                m: b.m,
                gap: b.gap.gap,
                degenerate: b.gap.degenerate,
                quotient_order: b.quotient_order,
                quotient_gap: q,
                consistent: b.gap.gap >= q - opts.projection_tol,
            }
        })
        .collect();
    let min_gap = pairs.iter().map(|p| p.gap).fold(f64::INFINITY, f64::min);
    let min_quotient_gap = quotient.values().copied().fold(f64::INFINITY, f64::min);
    let consistent = pairs.iter().all(|p| p.consistent);
    let star = min_quotient_gap > opts.ambiguity_window;
    let verdict = if pairs.is_empty() {
        "vacuous (empty window)".to_string()
    } else if !consistent {
        "fail: pair gap below its intersection-quotient gap".to_string()
    } else if min_gap <= opts.ambiguity_window {
        "fail: 1 is not isolated at this scale".to_string()
    } else {
        PASS.to_string()
    };
    Ok(GapReport {
        pairs,
        min_gap,
        min_quotient_gap,
        star,
        consistent,
        verdict,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Claim2Report {
    pub n: usize,
    /// `rank(e_{NM})` across the window.
    pub ranks: Vec<usize>,
    /// Least window position from which every rank is zero.
    pub vanishing_from: Option<usize>,
    /// Positions where `dim H_M > |G_N|`, where ranks must vanish.
    pub bound_positions: Vec<usize>,
    pub bound_respected: bool,
    pub diagonal_nonzero: bool,
    pub star_star: bool,
    pub verdict: String,
}

pub fn verify_claim2(window: &Window, ranks: &RankSequence, n: usize) -> Claim2Report {
    let row = ranks.table[n].clone();
    let vanishing_from = (0..=row.len())
        .find(|&k| row[k..].iter().all(|&r| r == 0))
        .filter(|&k| k < row.len());
    let dims = window.dims();
    let bound_positions: Vec<usize> = (0..row.len()).filter(|&m| dims[m] > window.order(n)).collect();
    let bound_respected = bound_positions.iter().all(|&m| row[m] == 0);
    let diagonal_nonzero = row[n] > 0;
    let star_star = window.dims_strictly_increasing();
    let verdict = if !bound_respected {
        "fail: rank survives beyond the dimension bound".to_string()
    } else if !diagonal_nonzero {
        "fail: diagonal rank vanishes".to_string()
    } else if !star_star {
        "fail: (★★) not satisfied by policy".to_string()
    } else {
        PASS.to_string()
    };
    Claim2Report {
        n,
        ranks: row,
        vanishing_from,
        bound_positions,
        bound_respected,
        diagonal_nonzero,
        star_star,
        verdict,
    }
}

/// Zeroes every block whose `M` position, counted from 1, exceeds `k`.
pub fn truncate_to_j(op: &BlockOperator, k: usize) -> BlockOperator {
    op.retain_m_upto(k)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Truncation {
    pub k: usize,
    /// Diagonal ranks of the truncation at positions `k..`.
    pub tail: Vec<usize>,
    pub tail_zero: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Claim3Report {
    pub diagonal_ranks: Vec<usize>,
    pub all_nonzero: bool,
    pub truncations: Vec<Truncation>,
    pub vacuous: bool,
    pub verdict: String,
}

/// Diagonal ranks of `e` and, for each `k` below the window size, the tail
/// of the diagonal ranks of `truncate_to_j(e, k)`.
pub fn verify_claim3(e: &BlockOperator) -> Result<Claim3Report, GhostError> {
    let diagonal_ranks = diagonal_ranks(e)?;
    let truncations = (0..e.len())
        .map(|k| {
            let tail = self::diagonal_ranks(&truncate_to_j(e, k))?[k..].to_vec();
            let tail_zero = tail.iter().all(|&r| r == 0);
            Ok(Truncation { k, tail, tail_zero })
        })
        .collect::<Result<Vec<_>, GhostError>>()?;
    let all_nonzero = diagonal_ranks.iter().all(|&r| r > 0);
    let vacuous = e.is_empty();
    let verdict = if vacuous {
        "vacuous (empty window)".to_string()
    } else if !all_nonzero {
        "fail: a diagonal rank vanishes".to_string()
    } else if !truncations.iter().all(|t| t.tail_zero) {
        "fail: a truncation keeps a nonzero tail".to_string()
    } else {
        PASS.to_string()
    };
    Ok(Claim3Report {
        diagonal_ranks,
        all_nonzero,
        truncations,
        vacuous,
        verdict,
    })
}

/// Block-diagonal operator on `ℓ²X` with block `N` equal to
/// `(1/|G_N|) · J`.
pub fn classical_ghost(window: &Window) -> BlockOperator {
    let axes: Vec<BlockAxis> = window
        .axes()
        .into_iter()
        .map(|a| BlockAxis { fiber_dim: 1, ..a })
        .collect();
    let mut op = BlockOperator::new(axes);
    for n in 0..window.len() {
        let k = window.order(n);
        let v = faer::c64::new(1.0 / k as f64, 0.0);
        op.insert_with_rank(n, n, Mat::from_fn(k, k, |_, _| v), 1);
    }
    op
}
