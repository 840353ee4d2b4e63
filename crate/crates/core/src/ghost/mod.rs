//! The Markov operator `T` over a window of levels, its spectral projection
//! at 1 (the ghost projection), and the finite-scale checks built on them.

mod blocks;
mod claims;
mod large;
mod operator;
mod window;

pub use blocks::{
    analyze_window, build_t, gap_at_one, gap_from_spectrum, ghost_projection, oracle_rank, oracle_value, pair_group,
    pair_groups, pair_representation, BlockAnalysis, GapAtOne, PairGroup, SolverPath, WindowAnalysis,
};
pub use claims::{
    classical_ghost, diagonal_ranks, rank_sequence, truncate_to_j, verify_claim1, verify_claim2, verify_claim3,
    Claim2Report, Claim3Report, GapReport, PairGap, RankSequence, Truncation, PASS,
};
pub use operator::{BlockAxis, BlockOperator};
pub use window::{GhostOptions, Window, AMBIGUITY_WINDOW, CLUSTER_THRESHOLD, DENSE_BLOCK_LIMIT, PROJECTION_TOL};

use crate::families::FamilyError;
use crate::geometry::GeometryError;
use crate::group::GroupError;
use crate::linalg::LinalgError;
use crate::rep::RepError;

#[derive(Debug, thiserror::Error)]
pub enum GhostError {
    #[error("block ({n},{m}): eigenvalue {value} lies between the 1-cluster and the ambiguity window")]
    ClusterAmbiguous { n: usize, m: usize, value: f64 },
    #[error("block ({n},{m}): eigensolve rank {numeric} but character oracle {oracle}")]
    OracleMismatch {
        n: usize,
        m: usize,
        numeric: usize,
        oracle: usize,
    },
    #[error("block ({n},{m}): spectral and averaging projections differ by {distance:e}")]
    ProjectionMismatch { n: usize, m: usize, distance: f64 },
    #[error("block ({n},{m}) has no dense matrix and no recorded rank")]
    MissingBlock { n: usize, m: usize },
    #[error("block ({n},{m}) is above the dense limit and its representation is not real")]
    LargeBlockComplex { n: usize, m: usize },
    #[error("level {level}: chosen representation is not irreducible")]
    NotIrreducible { level: usize },
    #[error("bad window: {0}")]
    BadWindow(String),
    #[error("thread pool: {0}")]
    Pool(String),
    #[error(transparent)]
    Family(#[from] FamilyError),
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error(transparent)]
    Rep(#[from] RepError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

impl GhostError {
    /// Pair-block coordinates for diagnostics, when the error has them.
    pub fn block(&self) -> Option<(usize, usize)> {
        match *self {
            Self::ClusterAmbiguous { n, m, .. }
            | Self::OracleMismatch { n, m, .. }
            | Self::ProjectionMismatch { n, m, .. }
            | Self::MissingBlock { n, m }
            | Self::LargeBlockComplex { n, m } => Some((n, m)),
            _ => None,
        }
    }
}
