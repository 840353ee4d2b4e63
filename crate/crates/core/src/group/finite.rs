use std::collections::HashMap;

use super::{GroupElement, GroupError};

/// Largest group the enumerator will build unless told otherwise.
pub const DEFAULT_CAP: usize = 250_000;

/// A fully enumerated finite group.
///
/// Elements are stored in breadth-first order from the identity: by word
/// length in the generators, ties broken by insertion order. Index `0` is
/// always the identity, so element indices (and every matrix built on
/// them) are reproducible across runs.
#[derive(Debug)]
pub struct FiniteGroup {
    generators: Vec<GroupElement>,
    elements: Vec<GroupElement>,
    index: HashMap<GroupElement, usize>,
    inverses: Vec<usize>,
    /// `generator_action[s][x]` = index of `generators[s] * elements[x]`.
    generator_action: Vec<Vec<u32>>,
}

/// Enumerates the group generated by `gens` with breadth-first
/// left-multiplication, refusing to grow past `cap` elements.
pub fn generate_closure(gens: &[GroupElement], cap: usize) -> Result<FiniteGroup, GroupError> {
    let first = gens.first().ok_or(GroupError::EmptyGenerators)?;
    let kind = first.kind();
    if gens.iter().any(|g| g.kind() != kind) {
        return Err(GroupError::MixedKinds);
    }
    let cap = cap.max(1);

    let identity = first.identity_like();
    let mut elements = vec![identity.clone()];
    let mut index = HashMap::new();
    index.insert(identity, 0usize);
    let mut generator_action: Vec<Vec<u32>> = vec![Vec::new(); gens.len()];

    let mut head = 0;
    while head < elements.len() {
        for (s, g) in gens.iter().enumerate() {
            let y = g.mul(&elements[head]);
            let next = elements.len();
            let idx = *index.entry(y.clone()).or_insert(next);
            if idx == next {
                if next >= cap {
                    return Err(GroupError::CapExceeded { cap });
                }
                elements.push(y);
            }
            generator_action[s].push(idx as u32);
        }
        head += 1;
    }

    let inverses = elements.iter().map(|g| index[&g.inverse()]).collect();

    Ok(FiniteGroup {
        generators: gens.to_vec(),
        elements,
        index,
        inverses,
        generator_action,
    })
}

impl FiniteGroup {
    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn generators(&self) -> &[GroupElement] {
        &self.generators
    }

    pub fn elements(&self) -> &[GroupElement] {
        &self.elements
    }

    pub fn element(&self, i: usize) -> &GroupElement {
        &self.elements[i]
    }

    pub fn identity_index(&self) -> usize {
        0
    }

    pub fn index_of(&self, g: &GroupElement) -> Option<usize> {
        self.index.get(g).copied()
    }

    pub fn inverse_index(&self, i: usize) -> usize {
        self.inverses[i]
    }

    /// Index of `elements[i] * elements[j]`.
    pub fn mul_index(&self, i: usize, j: usize) -> usize {
        self.index[&self.elements[i].mul(&self.elements[j])]
    }

    /// Index of generator `s` inside the element list.
    pub fn generator_index(&self, s: usize) -> usize {
        self.generator_action[s][0] as usize
    }

    /// Left multiplication by generator `s` as a permutation of indices.
    pub fn generator_action(&self, s: usize) -> &[u32] {
        &self.generator_action[s]
    }

    /// Left translation `x -> g_i x` as a permutation of indices.
    pub fn left_translation(&self, i: usize) -> Vec<u32> {
        let g = &self.elements[i];
        self.elements.iter().map(|x| self.index[&g.mul(x)] as u32).collect()
    }

    /// Same enumerated element list (pointer-equal groups short-circuit).
    pub fn same_as(&self, other: &FiniteGroup) -> bool {
        std::ptr::eq(self, other) || self.elements == other.elements
    }
}
