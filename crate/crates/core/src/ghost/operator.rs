use std::collections::BTreeMap;

use faer::Mat;

use crate::linalg::CMat;

/// One window position of a block operator: the points of `G_N` and the
/// dimension of `H_N`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BlockAxis {
    pub label: String,
    pub points: usize,
    pub fiber_dim: usize,
}

#[derive(Clone, Debug)]
struct Entry {
    /// `None` for blocks too large to hold densely.
    matrix: Option<CMat>,
    cluster_rank: Option<usize>,
}

/// An operator on the truncated `ℓ²X ⊗ H`, stored as blocks on the
/// invariant subspaces `ℓ²G_N ⊗ H_M`, keyed by window positions `(N, M)`.
/// Absent blocks are zero. Row index of block `(N, M)` is `x · dim H_M + i`
/// for `x` an element index of `G_N`.
#[derive(Clone, Debug)]
pub struct BlockOperator {
    axes: Vec<BlockAxis>,
    entries: BTreeMap<(usize, usize), Entry>,
}

impl BlockOperator {
    pub fn new(axes: Vec<BlockAxis>) -> Self {
        Self {
            axes,
            entries: BTreeMap::new(),
        }
    }

    pub fn axes(&self) -> &[BlockAxis] {
        &self.axes
    }

    pub fn len(&self) -> usize {
        self.axes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.axes.is_empty()
    }

    pub fn block_dim(&self, n: usize, m: usize) -> usize {
        self.axes[n].points * self.axes[m].fiber_dim
    }

    /// Panics when the matrix does not have the block's shape.
    pub fn insert(&mut self, n: usize, m: usize, block: CMat) {
        self.put(n, m, Some(block), None);
    }

    pub fn insert_with_rank(&mut self, n: usize, m: usize, block: CMat, rank: usize) {
        self.put(n, m, Some(block), Some(rank));
    }

    /// A nonzero block known only through its 1-cluster rank.
    pub fn insert_implicit(&mut self, n: usize, m: usize, rank: Option<usize>) {
        self.put(n, m, None, rank);
    }

    fn put(&mut self, n: usize, m: usize, matrix: Option<CMat>, cluster_rank: Option<usize>) {
        if let Some(b) = &matrix {
            let d = self.block_dim(n, m);
            assert_eq!((b.nrows(), b.ncols()), (d, d), "block ({n},{m}) has the wrong shape");
        }
        self.entries.insert((n, m), Entry { matrix, cluster_rank });
    }

    pub fn contains(&self, n: usize, m: usize) -> bool {
        self.entries.contains_key(&(n, m))
    }

    /// The dense matrix of a block, if stored densely.
    pub fn block(&self, n: usize, m: usize) -> Option<&CMat> {
        self.entries.get(&(n, m)).and_then(|e| e.matrix.as_ref())
    }

    /// Block `(n, m)`, materializing zero when absent. `None` for an
    /// implicit block.
    pub fn block_or_zero(&self, n: usize, m: usize) -> Option<CMat> {
        match self.entries.get(&(n, m)) {
            Some(e) => e.matrix.clone(),
            None => {
                let d = self.block_dim(n, m);
                Some(Mat::zeros(d, d))
            }
        }
    }

    /// Dense blocks in key order.
    pub fn blocks(&self) -> impl Iterator<Item = (&(usize, usize), &CMat)> {
        self.entries
            .iter()
            .filter_map(|(k, e)| e.matrix.as_ref().map(|m| (k, m)))
    }

    pub fn keys(&self) -> impl Iterator<Item = &(usize, usize)> {
        self.entries.keys()
    }

    pub fn has_implicit_blocks(&self) -> bool {
        self.entries.values().any(|e| e.matrix.is_none())
    }

    /// Multiplicity of the eigenvalue-1 cluster of a block when recorded;
    /// absent blocks have rank 0.
    pub fn cluster_rank(&self, n: usize, m: usize) -> Option<usize> {
        match self.entries.get(&(n, m)) {
            Some(e) => e.cluster_rank,
            None => Some(0),
        }
    }

    fn filtered(&self, keep: impl Fn(usize, usize) -> bool) -> BlockOperator {
        BlockOperator {
            axes: self.axes.clone(),
            entries: self
                .entries
                .iter()
                .filter(|(&(n, m), _)| keep(n, m))
                .map(|(k, e)| (*k, e.clone()))
                .collect(),
        }
    }

    /// The sub-operator on `ℓ²G_N ⊗ H` for a single position `n`.
    pub fn restrict_to_level(&self, n: usize) -> BlockOperator {
        self.filtered(|a, _| a == n)
    }

    /// Keeps only blocks whose `M` position, counted from 1, is at most `k`.
    pub fn retain_m_upto(&self, k: usize) -> BlockOperator {
        self.filtered(|_, m| m < k)
    }
}
