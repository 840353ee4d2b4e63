//! Unitary representations of enumerated finite groups.
//!
//! Representations are stored structurally (regular, permutation, deleted
//! permutation, tensor) and image matrices are produced on demand, so
//! group averages stream over elements instead of holding every image.
//! Explicit per-element matrices are only kept when they fit under
//! [`MATERIALIZE_LIMIT`].

mod action;

use std::collections::HashMap;
use std::sync::Arc;

use faer::{c64, Mat};

pub use action::PermutationAction;

use crate::group::{coordinate_indices, FiniteGroup, GroupError};
use crate::linalg::{self, CMat};

/// Maximum `|G| · dim²` scalar entries kept as explicit per-element images.
pub const MATERIALIZE_LIMIT: usize = 200_000_000;

/// Distance from an integer tolerated when reading a rank off a character sum.
pub const RANK_GUARD: f64 = 1e-6;

/// Tolerance on `|⟨χ,χ⟩ − 1|` for irreducibility.
pub const IRREDUCIBLE_TOL: f64 = 1e-6;

#[derive(Debug, thiserror::Error)]
pub enum RepError {
    #[error("permutation data is not a group action")]
    NotAnAction,
    #[error("action is not transitive on at least two points")]
    NotTransitive,
    #[error("representations live on different groups")]
    GroupMismatch,
    #[error("pairing does not map the source group into both factors")]
    IncompatiblePairing,
    #[error("generating multiset is not closed under inversion")]
    NotSymmetricSet,
    #[error("character sum {value} is not within the rank guard of an integer")]
    RankNotInteger { value: f64 },
    #[error("explicit images need {entries} scalar entries, above the materialization limit")]
    TooLarge { entries: usize },
    #[error("image matrices have the wrong shape or fail unitarity")]
    BadImages,
    #[error(transparent)]
    Group(#[from] GroupError),
}

/// A unitary representation `ρ : G → U(d)`.
#[derive(Clone, Debug)]
pub struct Representation {
    group: Arc<FiniteGroup>,
    dim: usize,
    kind: Kind,
}

#[derive(Clone, Debug)]
enum Kind {
    Trivial,
    Regular,
    Permutation(Arc<PermutationAction>),
    Deleted {
        action: Arc<PermutationAction>,
        basis: Arc<Mat<f64>>,
    },
    Explicit(Arc<Vec<CMat>>),
    Tensor(Arc<TensorParts>),
}

#[derive(Debug)]
struct TensorParts {
    left: Representation,
    right: Representation,
    to_left: Vec<usize>,
    to_right: Vec<usize>,
}

/// How elements of the tensor's source group feed the two factors.
pub enum Pairing {
    /// Both factors live on the same group, which is also the source.
    Identity,
    /// The source is a pair group; coordinates 0 and 1 feed the factors.
    Coordinates(Arc<FiniteGroup>),
}

fn c(re: f64) -> c64 {
    c64::new(re, 0.0)
}

/// Orthonormal basis of the complement of the all-ones vector in `R^n`
/// (Helmert basis), as an `n × (n−1)` matrix.
fn helmert_basis(n: usize) -> Mat<f64> {
    Mat::from_fn(n, n - 1, |i, k| {
        let k1 = (k + 1) as f64;
        let norm = (k1 * (k1 + 1.0)).sqrt();
        if i <= k {
            1.0 / norm
        } else if i == k + 1 {
            -k1 / norm
        } else {
            0.0
        }
    })
}

impl Representation {
    pub fn trivial(group: Arc<FiniteGroup>, dim: usize) -> Self {
        Self {
            group,
            dim,
            kind: Kind::Trivial,
        }
    }

    /// Builds a representation from explicit per-element unitary images,
    /// indexed like `group.elements()`. Checks shape, unitarity and the
    /// homomorphism property `ρ(s·x) = ρ(s)ρ(x)` for every generator `s`
    /// and element `x`.
    pub fn from_matrices(group: Arc<FiniteGroup>, images: Vec<CMat>) -> Result<Self, RepError> {
        let dim = images.first().map(|m| m.nrows()).ok_or(RepError::BadImages)?;
        let entries = group.order() * dim * dim;
        if entries > MATERIALIZE_LIMIT {
            return Err(RepError::TooLarge { entries });
        }
        if images.len() != group.order() || images.iter().any(|m| m.nrows() != dim || m.ncols() != dim) {
            return Err(RepError::BadImages);
        }
        let rep = Self {
            group,
            dim,
            kind: Kind::Explicit(Arc::new(images)),
        };
        if rep.unitarity_defect() > 1e-10 {
            return Err(RepError::BadImages);
        }
        for s in 0..rep.group.generators().len() {
            let gs = rep.group.generator_index(s);
            for x in 0..rep.group.order() {
                let sx = rep.group.generator_action(s)[x] as usize;
                let lhs = rep.image(sx);
                let rhs = &rep.image(gs) * &rep.image(x);
                if linalg::frobenius_distance(&lhs, &rhs) > 1e-9 {
                    return Err(RepError::NotAnAction);
                }
            }
        }
        Ok(rep)
    }

    pub fn group(&self) -> &Arc<FiniteGroup> {
        &self.group
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    fn permutes_basis(&self) -> bool {
        matches!(self.kind, Kind::Regular | Kind::Permutation(_))
    }

    /// Basis permutation of `ρ(g)` when the representation is a
    /// permutation representation (regular or given by an action).
    fn basis_permutation(&self, g: usize) -> Option<Vec<u32>> {
        match &self.kind {
            Kind::Regular => Some(self.group.left_translation(g)),
            Kind::Permutation(action) => Some(action.image(g).images().to_vec()),
            _ => None,
        }
    }

    /// `ρ(g)` for the element with index `g`.
    pub fn image(&self, g: usize) -> CMat {
        match &self.kind {
            Kind::Trivial => linalg::identity(self.dim),
            Kind::Regular | Kind::Permutation(_) => {
                let perm = self.basis_permutation(g).expect("permutation kind");
                let mut m = Mat::zeros(self.dim, self.dim);
                for (x, &y) in perm.iter().enumerate() {
                    m[(y as usize, x)] = c(1.0);
                }
                m
            }
            Kind::Deleted { action, basis } => {
                let perm = action.image(g);
                let d = self.dim;
                Mat::from_fn(d, d, |i, j| {
                    let s: f64 = (0..action.degree())
                        .map(|x| basis[(perm.apply(x), i)] * basis[(x, j)])
                        .sum();
                    c(s)
                })
            }
            Kind::Explicit(images) => images[g].clone(),
            Kind::Tensor(t) => linalg::kron(&t.left.image(t.to_left[g]), &t.right.image(t.to_right[g])),
        }
    }

    /// Adds `scale · ρ(g)` into `out` without forming Kronecker products
    /// when the left factor permutes its basis.
    fn accumulate_image(&self, g: usize, scale: f64, out: &mut CMat) {
        match &self.kind {
            Kind::Regular | Kind::Permutation(_) => {
                let perm = self.basis_permutation(g).expect("permutation kind");
                for (x, &y) in perm.iter().enumerate() {
                    out[(y as usize, x)] += c(scale);
                }
            }
            Kind::Tensor(t) if t.left.permutes_basis() => {
                let perm = t.left.basis_permutation(t.to_left[g]).expect("permutation kind");
                let b = t.right.image(t.to_right[g]);
                let d = t.right.dim;
                for (y, &x) in perm.iter().enumerate() {
                    let (x, y) = (x as usize, y);
                    for i in 0..d {
                        for j in 0..d {
                            out[(x * d + i, y * d + j)] += b[(i, j)] * scale;
                        }
                    }
                }
            }
            _ => {
                let img = self.image(g);
                for j in 0..self.dim {
                    for i in 0..self.dim {
                        out[(i, j)] += img[(i, j)] * scale;
                    }
                }
            }
        }
    }

    /// `χ(g) = tr ρ(g)`.
    pub fn character(&self, g: usize) -> c64 {
        match &self.kind {
            Kind::Trivial => c(self.dim as f64),
            Kind::Regular => {
                if g == self.group.identity_index() {
                    c(self.dim as f64)
                } else {
                    c(0.0)
                }
            }
            Kind::Permutation(action) => c(action.image(g).fixed_points() as f64),
            Kind::Deleted { action, .. } => c(action.image(g).fixed_points() as f64 - 1.0),
            Kind::Explicit(images) => linalg::trace(&images[g]),
            Kind::Tensor(t) => t.left.character(t.to_left[g]) * t.right.character(t.to_right[g]),
        }
    }

    pub fn characters(&self) -> Vec<c64> {
        (0..self.group.order()).map(|g| self.character(g)).collect()
    }

    /// Explicit per-element images, refused above [`MATERIALIZE_LIMIT`].
    pub fn materialize(&self) -> Result<Self, RepError> {
        let entries = self.group.order() * self.dim * self.dim;
        if entries > MATERIALIZE_LIMIT {
            return Err(RepError::TooLarge { entries });
        }
        let images = (0..self.group.order()).map(|g| self.image(g)).collect();
        Ok(Self {
            group: self.group.clone(),
            dim: self.dim,
            kind: Kind::Explicit(Arc::new(images)),
        })
    }

    /// `max_g ‖ρ(g)*ρ(g) − I‖_F`.
    pub fn unitarity_defect(&self) -> f64 {
        let id = linalg::identity(self.dim);
        (0..self.group.order())
            .map(|g| {
                let u = self.image(g);
                linalg::frobenius_distance(&(u.adjoint() * &u), &id)
            })
            .fold(0.0, f64::max)
    }

    /// `max ‖ρ(gh) − ρ(g)ρ(h)‖_F` over the given element pairs.
    pub fn homomorphism_defect(&self, pairs: &[(usize, usize)]) -> f64 {
        pairs
            .iter()
            .map(|&(g, h)| {
                let gh = self.group.mul_index(g, h);
                linalg::frobenius_distance(&self.image(gh), &(self.image(g) * self.image(h)))
            })
            .fold(0.0, f64::max)
    }
}

/// Left regular representation: `ρ(g) e_h = e_{gh}` in the group's element order.
pub fn regular_representation(group: Arc<FiniteGroup>) -> Representation {
    let dim = group.order();
    Representation {
        group,
        dim,
        kind: Kind::Regular,
    }
}

/// Permutation matrices of an action, after checking it is a homomorphism.
pub fn permutation_representation(
    group: Arc<FiniteGroup>,
    action: PermutationAction,
) -> Result<Representation, RepError> {
    action.verify(&group)?;
    let dim = action.degree();
    Ok(Representation {
        group,
        dim,
        kind: Kind::Permutation(Arc::new(action)),
    })
}

/// The permutation representation restricted to the complement of the
/// constant functions, in an explicit real orthonormal basis.
pub fn deleted_permutation_rep(group: Arc<FiniteGroup>, action: PermutationAction) -> Result<Representation, RepError> {
    action.verify(&group)?;
    if action.degree() < 2 || !action.is_transitive() {
        return Err(RepError::NotTransitive);
    }
    let dim = action.degree() - 1;
    let basis = helmert_basis(action.degree());
    Ok(Representation {
        group,
        dim,
        kind: Kind::Deleted {
            action: Arc::new(action),
            basis: Arc::new(basis),
        },
    })
}

/// Tensor product `a ⊗ b` over a common source group.
pub fn tensor(a: &Representation, b: &Representation, pairing: Pairing) -> Result<Representation, RepError> {
    let (source, to_left, to_right) = match pairing {
        Pairing::Identity => {
            if !a.group.same_as(&b.group) {
                return Err(RepError::IncompatiblePairing);
            }
            let ids: Vec<usize> = (0..a.group.order()).collect();
            (a.group.clone(), ids.clone(), ids)
        }
        Pairing::Coordinates(product) => {
            let (l, r) = coordinate_indices(&product, &a.group, &b.group).map_err(|_| RepError::IncompatiblePairing)?;
            (product, l, r)
        }
    };
    Ok(Representation {
        group: source,
        dim: a.dim * b.dim,
        kind: Kind::Tensor(Arc::new(TensorParts {
            left: a.clone(),
            right: b.clone(),
            to_left,
            to_right,
        })),
    })
}

/// `(1/|G|) Σ_g χ_a(g) · conj(χ_b(g))`, real part.
pub fn character_inner(a: &Representation, b: &Representation) -> Result<f64, RepError> {
    if !a.group.same_as(&b.group) {
        return Err(RepError::GroupMismatch);
    }
    let sum: c64 = (0..a.group.order())
        .map(|g| a.character(g) * b.character(g).conj())
        .sum();
    Ok(sum.re / a.group.order() as f64)
}

pub fn is_irreducible(rep: &Representation) -> bool {
    character_inner(rep, rep).is_ok_and(|v| (v - 1.0).abs() <= IRREDUCIBLE_TOL)
}

/// Rounds a character sum to the nearest integer, refusing values farther
/// than [`RANK_GUARD`] from it.
pub fn round_rank(value: f64) -> Result<usize, RepError> {
    let r = value.round();
    if (value - r).abs() > RANK_GUARD || r < 0.0 {
        return Err(RepError::RankNotInteger { value });
    }
    Ok(r as usize)
}

/// Dimension of the invariant subspace, `⟨χ, 1⟩`, from characters alone.
pub fn invariant_rank(rep: &Representation) -> Result<usize, RepError> {
    let sum: c64 = rep.characters().into_iter().sum();
    round_rank(sum.re / rep.group.order() as f64)
}

/// `P = (1/|G|) Σ_g ρ(g)`, the orthogonal projection onto invariant vectors.
pub fn invariant_projection(rep: &Representation) -> CMat {
    let order = rep.group.order();
    let scale = 1.0 / order as f64;
    let d = rep.dim;
    match &rep.kind {
        Kind::Trivial => linalg::identity(d),
        Kind::Tensor(t) if t.left.permutes_basis() => {
            // Entry block (x, y) of the average only depends on which left
            // elements a carry y to x, so sum the right images per a first.
            let rd = t.right.dim;
            let mut fiber: HashMap<usize, CMat> = HashMap::new();
            for g in 0..order {
                let acc = fiber.entry(t.to_left[g]).or_insert_with(|| Mat::zeros(rd, rd));
                t.right.accumulate_image(t.to_right[g], 1.0, acc);
            }
            let mut keys: Vec<usize> = fiber.keys().copied().collect();
            keys.sort_unstable();
            let mut out = Mat::zeros(d, d);
            for a in keys {
                let s = &fiber[&a];
                let perm = t.left.basis_permutation(a).expect("permutation kind");
                for (y, &x) in perm.iter().enumerate() {
                    let x = x as usize;
                    for i in 0..rd {
                        for j in 0..rd {
                            out[(x * rd + i, y * rd + j)] += s[(i, j)] * scale;
                        }
                    }
                }
            }
            out
        }
        _ => {
            let mut out = Mat::zeros(d, d);
            for g in 0..order {
                rep.accumulate_image(g, scale, &mut out);
            }
            out
        }
    }
}

/// `T = (1/|S|) Σ_{s ∈ S} ρ(s)` for a multiset `S` of element indices,
/// which must be closed under inversion (with multiplicity).
pub fn markov_operator(rep: &Representation, genset: &[usize]) -> Result<CMat, RepError> {
    if genset.is_empty() {
        return Err(RepError::NotSymmetricSet);
    }
    let mut counts: HashMap<usize, isize> = HashMap::new();
    for &g in genset {
        *counts.entry(g).or_default() += 1;
    }
    for (&g, &k) in &counts {
        let inv = rep.group.inverse_index(g);
        if counts.get(&inv).copied().unwrap_or(0) != k {
            return Err(RepError::NotSymmetricSet);
        }
    }
    let scale = 1.0 / genset.len() as f64;
    let mut out = Mat::zeros(rep.dim, rep.dim);
    for &g in genset {
        rep.accumulate_image(g, scale, &mut out);
    }
    Ok(out)
}

#[cfg(test)]
mod tests;
