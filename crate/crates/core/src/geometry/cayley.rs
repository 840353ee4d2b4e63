use std::collections::{BTreeSet, VecDeque};
use std::sync::{Arc, OnceLock};

use faer::Mat;

use super::GeometryError;
use crate::group::{FiniteGroup, Level};
use crate::linalg::{self, LanczosOptions};

/// Groups above this order switch from dense eigensolves to Lanczos.
pub const DENSE_GRAPH_LIMIT: usize = 4096;

/// Tolerance for `λ₁ = deg · (1 − μ₂)` between the two computed routes.
pub const LAPLACIAN_IDENTITY_TOL: f64 = 1e-8;

/// Cayley graph with edges `x ~ s·x`. The generating multiset is kept as
/// given; the edge set is simple.
#[derive(Debug)]
pub struct CayleyGraph {
    group: Arc<FiniteGroup>,
    genset: Vec<usize>,
    neighbors: Vec<Vec<u32>>,
    from_identity: Vec<u32>,
    diameter: u32,
    table: OnceLock<Vec<u32>>,
}

/// Symbols whose image collapses in a level.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CollapseFlags {
    /// Symbols mapped to the identity; excluded from the edge set.
    pub identity_symbols: Vec<usize>,
    /// Symbols whose image coincides with an earlier symbol's image.
    pub duplicate_symbols: Vec<usize>,
}

fn check_symmetric(group: &FiniteGroup, genset: &[usize]) -> Result<(), GeometryError> {
    let mut counts = std::collections::HashMap::<usize, usize>::new();
    for &g in genset {
        *counts.entry(g).or_default() += 1;
    }
    for (&g, &k) in &counts {
        if counts.get(&group.inverse_index(g)).copied().unwrap_or(0) != k {
            return Err(GeometryError::NotSymmetricSet);
        }
    }
    Ok(())
}

fn bfs(neighbors: &[Vec<u32>], start: usize) -> Vec<u32> {
    let mut dist = vec![u32::MAX; neighbors.len()];
    dist[start] = 0;
    let mut queue = VecDeque::from([start]);
    while let Some(x) = queue.pop_front() {
        for &y in &neighbors[x] {
            let y = y as usize;
            if dist[y] == u32::MAX {
                dist[y] = dist[x] + 1;
                queue.push_back(y);
            }
        }
    }
    dist
}

/// Builds the Cayley graph of `group` for a symmetric, identity-free
/// generating multiset of element indices.
pub fn cayley_graph(group: Arc<FiniteGroup>, genset: &[usize]) -> Result<CayleyGraph, GeometryError> {
    if genset.contains(&group.identity_index()) {
        return Err(GeometryError::IdentityInGenset);
    }
    check_symmetric(&group, genset)?;
    let distinct: BTreeSet<usize> = genset.iter().copied().collect();
    let translations: Vec<Vec<u32>> = distinct.iter().map(|&s| group.left_translation(s)).collect();
    let neighbors: Vec<Vec<u32>> = (0..group.order())
        .map(|x| translations.iter().map(|t| t[x]).collect())
        .collect();
    let from_identity = bfs(&neighbors, group.identity_index());
    if from_identity.contains(&u32::MAX) {
        return Err(GeometryError::NotGenerating);
    }
    let diameter = from_identity.iter().copied().max().unwrap_or(0);
    Ok(CayleyGraph {
        group,
        genset: genset.to_vec(),
        neighbors,
        from_identity,
        diameter,
        table: OnceLock::new(),
    })
}

impl CayleyGraph {
    /// The Cayley graph of a family level on its symbol images; symbols
    /// mapped to the identity are left out of the edge set and flagged.
    pub fn from_level(level: &Level) -> Result<(CayleyGraph, CollapseFlags), GeometryError> {
        let idx = level.symbol_indices();
        let mut flags = CollapseFlags::default();
        let mut genset = Vec::new();
        for (s, &g) in idx.iter().enumerate() {
            if g == level.group.identity_index() {
                flags.identity_symbols.push(s);
                continue;
            }
            if idx[..s].contains(&g) {
                flags.duplicate_symbols.push(s);
            }
            genset.push(g);
        }
        let graph = cayley_graph(level.group.clone(), &genset)?;
        Ok((graph, flags))
    }

    pub fn group(&self) -> &Arc<FiniteGroup> {
        &self.group
    }

    pub fn vertices(&self) -> usize {
        self.neighbors.len()
    }

    pub fn genset(&self) -> &[usize] {
        &self.genset
    }

    /// Number of distinct neighbours, the same at every vertex.
    pub fn degree(&self) -> usize {
        self.neighbors.first().map_or(0, Vec::len)
    }

    pub fn neighbors(&self, x: usize) -> &[u32] {
        &self.neighbors[x]
    }

    pub fn diameter(&self) -> u32 {
        self.diameter
    }

    pub fn distances_from_identity(&self) -> &[u32] {
        &self.from_identity
    }

    /// All-pairs distance table (row-major), one BFS per vertex, cached.
    pub fn distance_table(&self) -> &[u32] {
        self.table.get_or_init(|| {
            let n = self.vertices();
            let mut table = Vec::with_capacity(n * n);
            for v in 0..n {
                table.extend(bfs(&self.neighbors, v));
            }
            table
        })
    }

    /// Path distance; uses the cached table when present, otherwise
    /// vertex-transitivity `d(x, y) = |y x⁻¹|`.
    pub fn distance(&self, x: usize, y: usize) -> u32 {
        if let Some(t) = self.table.get() {
            return t[x * self.vertices() + y];
        }
        let w = self.group.mul_index(y, self.group.inverse_index(x));
        self.from_identity[w]
    }

    /// Number of vertices within distance `r` of any vertex.
    pub fn ball_size(&self, r: f64) -> usize {
        self.from_identity.iter().filter(|&&d| d as f64 <= r).count()
    }

    fn adjacency(&self) -> Mat<f64> {
        let n = self.vertices();
        let mut a = Mat::zeros(n, n);
        for x in 0..n {
            for &y in &self.neighbors[x] {
                a[(y as usize, x)] = 1.0;
            }
        }
        a
    }
}

/// Spectral data of a Cayley graph's Laplacian `Δ = deg·I − A`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LaplacianGap {
    pub lambda1: f64,
    /// Second-largest eigenvalue of `A / deg`.
    pub mu2: f64,
    pub degree: usize,
    /// `|λ₁ − deg·(1 − μ₂)|` between the two independently computed routes.
    pub identity_defect: f64,
}

/// First nonzero Laplacian eigenvalue.
pub fn laplacian_gap(graph: &CayleyGraph) -> Result<LaplacianGap, GeometryError> {
    let n = graph.vertices();
    let degree = graph.degree();
    if n == 1 {
        return Err(GeometryError::Disconnected);
    }
    let (lambda1, mu2) = if n <= DENSE_GRAPH_LIMIT {
        let a = graph.adjacency();
        let lap = Mat::from_fn(n, n, |i, j| if i == j { degree as f64 } else { 0.0 } - a[(i, j)]);
        let lap_vals = linalg::real_symmetric_eigenvalues(&lap)?;
        let norm = Mat::from_fn(n, n, |i, j| a[(i, j)] / degree as f64);
        let adj_vals = linalg::real_symmetric_eigenvalues(&norm)?;
        (lap_vals[1], adj_vals[n - 2])
    } else {
        let ones = vec![1.0 / (n as f64).sqrt(); n];
        let inv_deg = 1.0 / degree as f64;
        let res = linalg::lanczos_top(
            n,
            |x, y| {
                for (v, nb) in graph.neighbors.iter().enumerate() {
                    for &w in nb {
                        y[w as usize] += inv_deg * x[v];
                    }
                }
            },
            &[ones],
            LanczosOptions::default(),
        )?;
        (degree as f64 * (1.0 - res.value), res.value)
    };
    if lambda1 <= 1e-10 {
        return Err(GeometryError::Disconnected);
    }
    let identity_defect = (lambda1 - degree as f64 * (1.0 - mu2)).abs();
    if identity_defect > LAPLACIAN_IDENTITY_TOL {
        return Err(GeometryError::LaplacianIdentity {
            defect: identity_defect,
        });
    }
    Ok(LaplacianGap {
        lambda1,
        mu2,
        degree,
        identity_defect,
    })
}

/// `1 − μ₂` for the Markov operator `(1/|S|) Σ_s λ(s)` on `ℓ²G`, with the
/// generating multiset counted with multiplicity (identity allowed).
pub fn markov_gap(group: &FiniteGroup, genset: &[usize]) -> Result<f64, GeometryError> {
    check_symmetric(group, genset)?;
    let n = group.order();
    if n == 1 {
        return Ok(2.0);
    }
    let translations: Vec<Vec<u32>> = genset.iter().map(|&s| group.left_translation(s)).collect();
    let w = 1.0 / genset.len() as f64;
    let mu2 = if n <= DENSE_GRAPH_LIMIT {
        let mut t = Mat::<f64>::zeros(n, n);
        for tr in &translations {
            for (x, &y) in tr.iter().enumerate() {
                t[(y as usize, x)] += w;
            }
        }
        linalg::real_symmetric_eigenvalues(&t)?[n - 2]
    } else {
        let ones = vec![1.0 / (n as f64).sqrt(); n];
        linalg::lanczos_top(
            n,
            |x, y| {
                for tr in &translations {
                    for (v, &u) in tr.iter().enumerate() {
                        y[u as usize] += w * x[v];
                    }
                }
            },
            &[ones],
            LanczosOptions::default(),
        )?
        .value
    };
    Ok(1.0 - mu2)
}
