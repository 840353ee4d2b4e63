use std::sync::Arc;

use super::{generate_closure, FiniteGroup, GroupElement, GroupError};

/// Abstract generator symbols of the ambient group, with each symbol
/// paired to its formal inverse.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GeneratorSymbolSet {
    pairing: Vec<usize>,
}

impl GeneratorSymbolSet {
    pub fn new(pairing: Vec<usize>) -> Result<Self, GroupError> {
        let n = pairing.len();
        if n == 0 {
            return Err(GroupError::EmptyGenerators);
        }
        for (s, &t) in pairing.iter().enumerate() {
            if t >= n || pairing[t] != s {
                return Err(GroupError::NotAnInvolution { symbol: s });
            }
        }
        Ok(Self { pairing })
    }

    /// `2k` symbols where symbol `i < k` is paired with `i + k`.
    pub fn with_inverses(k: usize) -> Self {
        let pairing = (0..2 * k).map(|s| (s + k) % (2 * k)).collect();
        Self { pairing }
    }

    pub fn len(&self) -> usize {
        self.pairing.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairing.is_empty()
    }

    pub fn inverse_of(&self, s: usize) -> usize {
        self.pairing[s]
    }

    pub fn pairing(&self) -> &[usize] {
        &self.pairing
    }
}

/// One quotient `G_N`: the images of every symbol and the group they generate.
#[derive(Debug, Clone)]
pub struct Level {
    pub label: String,
    pub images: Vec<GroupElement>,
    pub group: Arc<FiniteGroup>,
}

impl Level {
    /// Element index (in `group`) of each symbol's image, with multiplicity.
    pub fn symbol_indices(&self) -> Vec<usize> {
        (0..self.images.len()).map(|s| self.group.generator_index(s)).collect()
    }
}

/// A family of finite quotients of one finitely generated group, given by
/// the images of a fixed symbol set in each quotient.
#[derive(Debug, Clone)]
pub struct QuotientFamily {
    symbols: GeneratorSymbolSet,
    levels: Vec<Level>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SymmetryReport {
    pub levels: usize,
    pub symbols: usize,
}

impl QuotientFamily {
    pub fn new(
        symbols: GeneratorSymbolSet,
        levels: Vec<(String, Vec<GroupElement>)>,
        cap: usize,
    ) -> Result<Self, GroupError> {
        let levels = levels
            .into_iter()
            .enumerate()
            .map(|(level, (label, images))| {
                if images.len() != symbols.len() {
                    return Err(GroupError::InconsistentArity {
                        level,
                        expected: symbols.len(),
                        found: images.len(),
                    });
                }
                let group = Arc::new(generate_closure(&images, cap)?);
                Ok(Level { label, images, group })
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Self { symbols, levels })
    }

    pub fn symbols(&self) -> &GeneratorSymbolSet {
        &self.symbols
    }

    pub fn levels(&self) -> &[Level] {
        &self.levels
    }

    pub fn level(&self, level: usize) -> Result<&Level, GroupError> {
        self.levels.get(level).ok_or(GroupError::InvalidLevel { level })
    }

    /// The indices `[Γ:N]` along the family, in presentation order.
    pub fn orders(&self) -> Vec<usize> {
        self.levels.iter().map(|l| l.group.order()).collect()
    }

    /// Whether level orders strictly increase across the family. A finite
    /// window can only report this, not establish unbounded growth.
    pub fn index_growth_strict(&self) -> bool {
        self.orders().windows(2).all(|w| w[0] < w[1])
    }

    /// Image of a word in the symbols under the quotient map of `level`.
    pub fn word_image(&self, level: usize, word: &[usize]) -> Result<GroupElement, GroupError> {
        let lvl = self.level(level)?;
        let mut acc = lvl.group.element(0).clone();
        for &s in word {
            let img = lvl.images.get(s).ok_or(GroupError::InvalidSymbol { symbol: s })?;
            acc = acc.mul(img);
        }
        Ok(acc)
    }

    /// Per level, the image of each symbol's formal inverse must be the
    /// inverse of the symbol's image.
    pub fn check_symmetric(&self) -> Result<SymmetryReport, GroupError> {
        for (level, lvl) in self.levels.iter().enumerate() {
            for (symbol, img) in lvl.images.iter().enumerate() {
                let partner = &lvl.images[self.symbols.inverse_of(symbol)];
                if *partner != img.inverse() {
                    return Err(GroupError::NotSymmetric { level, symbol });
                }
            }
        }
        Ok(SymmetryReport {
            levels: self.levels.len(),
            symbols: self.symbols.len(),
        })
    }

    /// The image of the ambient group in `G_A x G_B`, i.e. the quotient by
    /// the intersection of the two kernels. Elements are genuine pairs.
    pub fn product_image(&self, level_a: usize, level_b: usize, cap: usize) -> Result<FiniteGroup, GroupError> {
        if level_a == level_b {
            return Err(GroupError::SameLevel { level: level_a });
        }
        let a = self.level(level_a)?;
        let b = self.level(level_b)?;
        let gens: Vec<GroupElement> = a
            .images
            .iter()
            .zip(&b.images)
            .map(|(x, y)| GroupElement::pair(x.clone(), y.clone()))
            .collect();
        generate_closure(&gens, cap)
    }
}

/// Indices of the elements of a pair group whose `coordinate` is trivial.
pub fn kernel_fiber(product: &FiniteGroup, coordinate: usize) -> Result<Vec<usize>, GroupError> {
    if coordinate > 1 {
        return Err(GroupError::InvalidCoordinate { coordinate });
    }
    product
        .elements()
        .iter()
        .enumerate()
        .filter_map(|(i, g)| match g.coordinate(coordinate) {
            None => Some(Err(GroupError::NotAProduct)),
            Some(c) if c.is_identity() => Some(Ok(i)),
            Some(_) => None,
        })
        .collect()
}

/// Locates each pair element's coordinates inside the two factor groups.
pub fn coordinate_indices(
    product: &FiniteGroup,
    first: &FiniteGroup,
    second: &FiniteGroup,
) -> Result<(Vec<usize>, Vec<usize>), GroupError> {
    let mut to_first = Vec::with_capacity(product.order());
    let mut to_second = Vec::with_capacity(product.order());
    for g in product.elements() {
        let (a, b) = match (g.coordinate(0), g.coordinate(1)) {
            (Some(a), Some(b)) => (a, b),
            _ => return Err(GroupError::NotAProduct),
        };
        to_first.push(first.index_of(a).ok_or(GroupError::NotAProduct)?);
        to_second.push(second.index_of(b).ok_or(GroupError::NotAProduct)?);
    }
    Ok((to_first, to_second))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::{Permutation, PrimeMatrix, DEFAULT_CAP};

    fn elementary(p: u32) -> Vec<GroupElement> {
        let m =
            |r: [[i64; 2]; 2]| -> GroupElement { PrimeMatrix::new(p, &[r[0].to_vec(), r[1].to_vec()]).unwrap().into() };
        vec![
            m([[1, 1], [0, 1]]),
            m([[1, 0], [1, 1]]),
            m([[1, -1], [0, 1]]),
            m([[1, 0], [-1, 1]]),
        ]
    }

    fn sl2(primes: &[u32]) -> QuotientFamily {
        let levels = primes.iter().map(|&p| (format!("p={p}"), elementary(p))).collect();
        QuotientFamily::new(GeneratorSymbolSet::with_inverses(2), levels, DEFAULT_CAP).unwrap()
    }

    #[test]
    fn symbol_set_validation() {
        assert!(GeneratorSymbolSet::new(vec![1, 0, 2]).is_ok());
        assert!(matches!(
            GeneratorSymbolSet::new(vec![1, 2, 0]),
            Err(GroupError::NotAnInvolution { .. })
        ));
        assert_eq!(GeneratorSymbolSet::with_inverses(2).pairing(), &[2, 3, 0, 1]);
    }

    #[test]
    fn word_images() {
        let fam = sl2(&[3]);
        assert!(fam.word_image(0, &[]).unwrap().is_identity());
        for s in 0..4 {
            let w = [s, fam.symbols().inverse_of(s)];
            assert!(fam.word_image(0, &w).unwrap().is_identity());
        }
        assert_eq!(fam.word_image(0, &[0]).unwrap(), elementary(3)[0]);
        assert!(matches!(
            fam.word_image(0, &[7]),
            Err(GroupError::InvalidSymbol { symbol: 7 })
        ));
        assert!(matches!(
            fam.word_image(3, &[0]),
            Err(GroupError::InvalidLevel { level: 3 })
        ));
    }

    #[test]
    fn symmetric_checks() {
        assert!(sl2(&[3, 5]).check_symmetric().is_ok());

        let c: GroupElement = Permutation::from_cycles(3, &[&[0, 1, 2]]).unwrap().into();
        let fam = QuotientFamily::new(
            GeneratorSymbolSet::new(vec![0]).unwrap(),
            vec![("c3".into(), vec![c])],
            DEFAULT_CAP,
        )
        .unwrap();
        assert!(matches!(
            fam.check_symmetric(),
            Err(GroupError::NotSymmetric { level: 0, symbol: 0 })
        ));

        let cyc = |c: &[u32]| -> GroupElement { Permutation::from_cycles(4, &[c]).unwrap().into() };
        let alt4 = QuotientFamily::new(
            GeneratorSymbolSet::new(vec![1, 0, 3, 2]).unwrap(),
            vec![(
                "alt4".into(),
                vec![cyc(&[0, 1, 2]), cyc(&[0, 2, 1]), cyc(&[1, 2, 3]), cyc(&[1, 3, 2])],
            )],
            DEFAULT_CAP,
        )
        .unwrap();
        assert!(alt4.check_symmetric().is_ok());
        assert_eq!(alt4.orders(), vec![12]);
    }

    #[test]
    fn arity_mismatch() {
        let err = QuotientFamily::new(
            GeneratorSymbolSet::with_inverses(2),
            vec![("x".into(), elementary(3)[..2].to_vec())],
            DEFAULT_CAP,
        )
        .unwrap_err();
        assert!(matches!(
            err,
            GroupError::InconsistentArity {
                level: 0,
                expected: 4,
                found: 2
            }
        ));
    }

    #[test]
    fn product_of_sl2_3_and_sl2_5_is_full() {
        let fam = sl2(&[3, 5]);
        let q = fam.product_image(0, 1, DEFAULT_CAP).unwrap();
        assert_eq!(q.order(), 24 * 120);
        let fiber = kernel_fiber(&q, 0).unwrap();
        assert_eq!(fiber.len(), 120);
        assert!(fiber.contains(&0));
        assert_eq!(kernel_fiber(&q, 1).unwrap().len(), 24);
        assert!(matches!(
            fam.product_image(1, 1, DEFAULT_CAP),
            Err(GroupError::SameLevel { .. })
        ));
    }

    #[test]
    fn identical_levels_give_the_diagonal() {
        let fam = sl2(&[3, 3]);
        let q = fam.product_image(0, 1, DEFAULT_CAP).unwrap();
        assert_eq!(q.order(), 24);
        assert_eq!(kernel_fiber(&q, 0).unwrap(), vec![0]);
    }

    #[test]
    fn trivial_level_pairs_to_a_copy() {
        let id = Permutation::identity(2);
        let trivial: Vec<GroupElement> = (0..4).map(|_| id.clone().into()).collect();
        let mut levels: Vec<(String, Vec<GroupElement>)> = vec![("p=5".into(), elementary(5))];
        levels.push(("trivial".into(), trivial));
        let fam = QuotientFamily::new(GeneratorSymbolSet::with_inverses(2), levels, DEFAULT_CAP).unwrap();
        let q = fam.product_image(0, 1, DEFAULT_CAP).unwrap();
        assert_eq!(q.order(), 120);
    }

    #[test]
    fn kernel_fiber_requires_pairs() {
        let fam = sl2(&[3]);
        assert!(matches!(
            kernel_fiber(&fam.levels()[0].group, 0),
            Err(GroupError::NotAProduct)
        ));
        let q = sl2(&[3, 5]).product_image(0, 1, DEFAULT_CAP).unwrap();
        assert!(matches!(
            kernel_fiber(&q, 2),
            Err(GroupError::InvalidCoordinate { coordinate: 2 })
        ));
    }
}
