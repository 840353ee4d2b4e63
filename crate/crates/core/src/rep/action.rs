use crate::group::{FiniteGroup, GroupElement, Permutation};

use super::RepError;

/// A group action on `{0..degree-1}`, one permutation per group element
/// (indexed like the group's element list).
#[derive(Clone, Debug)]
pub struct PermutationAction {
    degree: usize,
    images: Vec<Permutation>,
}

impl PermutationAction {
    pub fn new(degree: usize, images: Vec<Permutation>) -> Self {
        Self { degree, images }
    }

    pub fn from_fn(group: &FiniteGroup, degree: usize, f: impl Fn(&GroupElement) -> Permutation) -> Self {
        Self {
            degree,
            images: group.elements().iter().map(f).collect(),
        }
    }

    /// A permutation group acting on the points it permutes.
    pub fn natural(group: &FiniteGroup) -> Option<Self> {
        let images: Option<Vec<Permutation>> = group.elements().iter().map(|g| g.as_perm().cloned()).collect();
        let images = images?;
        let degree = images.first()?.degree();
        Some(Self { degree, images })
    }

    /// Left translation on the group's own element indices.
    pub fn left_translation(group: &FiniteGroup) -> Self {
        let images = (0..group.order())
            .map(|g| Permutation::new(group.left_translation(g)).expect("translations are bijections"))
            .collect();
        Self {
            degree: group.order(),
            images,
        }
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn image(&self, g: usize) -> &Permutation {
        &self.images[g]
    }

    /// Checks `act(s·x) = act(s) ∘ act(x)` for every generator `s` and every
    /// element `x`; since generators reach every element, this establishes
    /// the homomorphism property on the whole group.
    pub(crate) fn verify(&self, group: &FiniteGroup) -> Result<(), RepError> {
        if self.images.len() != group.order() || self.images.iter().any(|p| p.degree() != self.degree) {
            return Err(RepError::NotAnAction);
        }
        if !self.images[group.identity_index()].is_identity() {
            return Err(RepError::NotAnAction);
        }
        for s in 0..group.generators().len() {
            let gs = &self.images[group.generator_index(s)];
            for (x, &sx) in group.generator_action(s).iter().enumerate() {
                if self.images[sx as usize] != gs.compose(&self.images[x]) {
                    return Err(RepError::NotAnAction);
                }
            }
        }
        Ok(())
    }

    pub fn is_transitive(&self) -> bool {
        if self.degree == 0 {
            return false;
        }
        let mut seen = vec![false; self.degree];
        seen[0] = true;
        let mut stack = vec![0usize];
        while let Some(x) = stack.pop() {
            for p in &self.images {
                let y = p.apply(x);
                if !seen[y] {
                    seen[y] = true;
                    stack.push(y);
                }
            }
        }
        seen.into_iter().all(|b| b)
    }
}
