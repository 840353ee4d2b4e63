//! Concrete quotient families and the irreducible representations chosen
//! on each level.

use std::fmt;
use std::sync::Arc;

use crate::group::{
    inv_mod, is_prime, FiniteGroup, GeneratorSymbolSet, GroupElement, GroupError, Level, Permutation, PrimeMatrix,
    QuotientFamily, DEFAULT_CAP,
};
use crate::rep::{deleted_permutation_rep, is_irreducible, PermutationAction, RepError, Representation};

#[derive(Debug, thiserror::Error)]
pub enum FamilyError {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("bad family parameters: {0}")]
    BadParameters(String),
    #[error("level {level}: generator images do not generate the expected group")]
    NotGenerating { level: usize },
    #[error("level {level} is not SL(2,p) in its natural form")]
    NotSl2 { level: usize },
    #[error("level {level}: candidate representation is not irreducible")]
    NotIrreducible { level: usize },
    #[error("policy {policy} does not apply to level {level}")]
    UnsupportedPolicy { policy: String, level: usize },
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error(transparent)]
    Rep(#[from] RepError),
}

/// A user-supplied action whose deleted permutation representation is used
/// as the irreducible on every level.
#[derive(Clone)]
pub struct CustomAction(pub Arc<dyn Fn(&FiniteGroup) -> PermutationAction + Send + Sync>);

impl fmt::Debug for CustomAction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("CustomAction")
    }
}

#[derive(Clone, Debug)]
pub enum IrrepPolicy {
    /// Deleted action on the projective line (SL(2,p) levels only).
    Steinberg,
    /// Deleted natural action of a permutation group.
    DeletedNatural,
    /// The one-dimensional trivial representation; a negative control.
    Trivial,
    Custom(CustomAction),
}

impl IrrepPolicy {
    pub fn name(&self) -> &'static str {
        match self {
            Self::Steinberg => "steinberg",
            Self::DeletedNatural => "deleted-natural",
            Self::Trivial => "trivial",
            Self::Custom(_) => "custom",
        }
    }

    pub fn parse(name: &str) -> Option<Self> {
        match name {
            "steinberg" => Some(Self::Steinberg),
            "deleted-natural" => Some(Self::DeletedNatural),
            "trivial" => Some(Self::Trivial),
            _ => None,
        }
    }
}

/// One level of a product-subgroup family.
#[derive(Clone, Debug)]
pub struct ProductLevel {
    pub label: String,
    pub images: Vec<GroupElement>,
    /// When set, the closure must have exactly this order.
    pub expected_order: Option<usize>,
}

#[derive(Clone, Debug)]
pub enum AltGenerators {
    /// `(0 1 2)`, its inverse, a long cycle `c` and `c⁻¹`; `c` is the
    /// `n`-cycle for odd `n` and the `(n−1)`-cycle on `1..n` for even `n`.
    Default,
    /// Explicit images per degree under a common symbol set.
    PerDegree {
        symbols: GeneratorSymbolSet,
        images: Vec<Vec<Permutation>>,
    },
}

#[derive(Clone, Debug)]
pub enum FamilyKind {
    Sl2 {
        primes: Vec<u32>,
    },
    Alt {
        degrees: Vec<usize>,
        generators: AltGenerators,
    },
    Product {
        symbols: GeneratorSymbolSet,
        levels: Vec<ProductLevel>,
    },
}

#[derive(Clone, Debug)]
pub struct FamilySpec {
    pub kind: FamilyKind,
    pub policy: IrrepPolicy,
}

impl FamilySpec {
    pub fn kind_name(&self) -> &'static str {
        match self.kind {
            FamilyKind::Sl2 { .. } => "sl2",
            FamilyKind::Alt { .. } => "alt",
            FamilyKind::Product { .. } => "product",
        }
    }

    pub fn build(&self) -> Result<QuotientFamily, FamilyError> {
        match &self.kind {
            FamilyKind::Sl2 { primes } => sl2_family(primes),
            FamilyKind::Alt { degrees, generators } => alt_family(degrees, generators),
            FamilyKind::Product { symbols, levels } => product_subgroup_family(symbols.clone(), levels.clone()),
        }
    }
}

/// The family presets every verification sweep runs over.
pub fn shipped_presets() -> Vec<(&'static str, FamilySpec)> {
    vec![
        (
            "sl2-3-5-7",
            FamilySpec {
                kind: FamilyKind::Sl2 { primes: vec![3, 5, 7] },
                policy: IrrepPolicy::Steinberg,
            },
        ),
        (
            "alt-4-5-6",
            FamilySpec {
                kind: FamilyKind::Alt {
                    degrees: vec![4, 5, 6],
                    generators: AltGenerators::Default,
                },
                policy: IrrepPolicy::DeletedNatural,
            },
        ),
        (
            "sl2-3-5-7-trivial",
            FamilySpec {
                kind: FamilyKind::Sl2 { primes: vec![3, 5, 7] },
                policy: IrrepPolicy::Trivial,
            },
        ),
    ]
}

fn elementary_images(p: u32) -> Vec<GroupElement> {
    let m = |rows: [[i64; 2]; 2]| -> GroupElement {
        PrimeMatrix::new(p, &[rows[0].to_vec(), rows[1].to_vec()])
            .expect("elementary matrices are invertible")
            .into()
    };
    vec![
        m([[1, 1], [0, 1]]),
        m([[1, 0], [1, 1]]),
        m([[1, -1], [0, 1]]),
        m([[1, 0], [-1, 1]]),
    ]
}

/// Congruence quotients `SL(2,p)` of the group generated by the two
/// elementary unipotent matrices; symbols are `a, b, a⁻¹, b⁻¹`.
pub fn sl2_family(primes: &[u32]) -> Result<QuotientFamily, FamilyError> {
    if primes.is_empty() {
        return Err(FamilyError::BadParameters("empty prime list".into()));
    }
    for &p in primes {
        if !is_prime(p as u64) {
            return Err(FamilyError::NotPrime(p as u64));
        }
        if p < 3 {
            return Err(FamilyError::BadParameters(format!("prime {p} is below 3")));
        }
    }
    if primes.windows(2).any(|w| w[0] >= w[1]) {
        return Err(FamilyError::BadParameters(
            "primes must be distinct and ascending".into(),
        ));
    }
    let levels = primes
        .iter()
        .map(|&p| (format!("SL(2,{p})"), elementary_images(p)))
        .collect();
    let family = QuotientFamily::new(GeneratorSymbolSet::with_inverses(2), levels, DEFAULT_CAP)?;
    for (level, (&p, order)) in primes.iter().zip(family.orders()).enumerate() {
        let p = p as usize;
        if order != p * (p * p - 1) {
            return Err(FamilyError::NotGenerating { level });
        }
    }
    Ok(family)
}

fn factorial(n: usize) -> usize {
    (1..=n).product()
}

fn default_alt_images(n: usize) -> Vec<Permutation> {
    let t = Permutation::from_cycles(n, &[&[0, 1, 2]]).expect("valid 3-cycle");
    let long: Vec<u32> = if n % 2 == 1 {
        (0..n as u32).collect()
    } else {
        (1..n as u32).collect()
    };
    let c = Permutation::from_cycles(n, &[&long]).expect("valid long cycle");
    vec![t.clone(), t.inverse(), c.clone(), c.inverse()]
}

/// Alternating groups `Alt(n)` over the given degrees. The default
/// generators are classical small generating sets; no expansion is implied.
pub fn alt_family(degrees: &[usize], generators: &AltGenerators) -> Result<QuotientFamily, FamilyError> {
    if degrees.is_empty() {
        return Err(FamilyError::BadParameters("empty degree list".into()));
    }
    if degrees.iter().any(|&n| n < 4) {
        return Err(FamilyError::BadParameters(
            "alternating degrees must be at least 4".into(),
        ));
    }
    if degrees.windows(2).any(|w| w[0] >= w[1]) {
        return Err(FamilyError::BadParameters(
            "degrees must be distinct and ascending".into(),
        ));
    }
    let (symbols, images): (GeneratorSymbolSet, Vec<Vec<Permutation>>) = match generators {
        AltGenerators::Default => (
            GeneratorSymbolSet::new(vec![1, 0, 3, 2])?,
            degrees.iter().map(|&n| default_alt_images(n)).collect(),
        ),
        AltGenerators::PerDegree { symbols, images } => {
            if images.len() != degrees.len() {
                return Err(FamilyError::BadParameters(
                    "one image list per degree is required".into(),
                ));
            }
            (symbols.clone(), images.clone())
        }
    };
    for (level, (imgs, &n)) in images.iter().zip(degrees).enumerate() {
        if imgs.iter().any(|p| p.degree() != n || !p.is_even()) {
            return Err(FamilyError::NotGenerating { level });
        }
    }
    let levels = degrees
        .iter()
        .zip(images)
        .map(|(&n, imgs)| (format!("Alt({n})"), imgs.into_iter().map(GroupElement::from).collect()))
        .collect();
    let family = QuotientFamily::new(symbols, levels, DEFAULT_CAP)?;
    for (level, (&n, order)) in degrees.iter().zip(family.orders()).enumerate() {
        if order != factorial(n) / 2 {
            return Err(FamilyError::NotGenerating { level });
        }
    }
    Ok(family)
}

/// Levels are the coordinate projections of a subgroup of a product of
/// finite groups generated by per-symbol tuples.
pub fn product_subgroup_family(
    symbols: GeneratorSymbolSet,
    levels: Vec<ProductLevel>,
) -> Result<QuotientFamily, FamilyError> {
    if levels.is_empty() {
        return Err(FamilyError::BadParameters("no levels".into()));
    }
    let expected: Vec<Option<usize>> = levels.iter().map(|l| l.expected_order).collect();
    let family = QuotientFamily::new(
        symbols,
        levels.into_iter().map(|l| (l.label, l.images)).collect(),
        DEFAULT_CAP,
    )?;
    family.check_symmetric()?;
    for (level, (want, got)) in expected.iter().zip(family.orders()).enumerate() {
        if want.is_some_and(|w| w != got) {
            return Err(FamilyError::NotGenerating { level });
        }
    }
    Ok(family)
}

/// Modulus of an `SL(2,p)` level, checked against the order formula.
fn sl2_modulus(level: &Level) -> Option<u32> {
    let p = match level.images.first()?.as_matrix() {
        Some(m) if m.size() == 2 => m.modulus(),
        _ => return None,
    };
    let pu = p as usize;
    (level.group.order() == pu * (pu * pu - 1)).then_some(p)
}

/// The action of `SL(2,p)` on the `p+1` points of the projective line,
/// enumerated as `[1:a]` for `a < p` followed by `[0:1]`.
pub fn projective_line_action(group: &FiniteGroup, p: u32) -> PermutationAction {
    let normalize = |v: Vec<u32>| -> u32 {
        if v[0] != 0 {
            (v[1] as u64 * inv_mod(v[0], p) as u64 % p as u64) as u32
        } else {
            p
        }
    };
    PermutationAction::from_fn(group, p as usize + 1, |g| {
        let m = g.as_matrix().expect("matrix group");
        let images = (0..=p)
            .map(|k| {
                let rep = if k < p { vec![1, k] } else { vec![0, 1] };
                normalize(m.apply(&rep))
            })
            .collect();
        Permutation::new(images).expect("projective action is a bijection")
    })
}

/// The `p`-dimensional Steinberg representation of an `SL(2,p)` level.
pub fn steinberg_rep(family: &QuotientFamily, level: usize) -> Result<Representation, FamilyError> {
    let lvl = family.level(level)?;
    let p = sl2_modulus(lvl).ok_or(FamilyError::NotSl2 { level })?;
    let action = projective_line_action(&lvl.group, p);
    let rep = deleted_permutation_rep(lvl.group.clone(), action)?;
    if !is_irreducible(&rep) {
        return Err(FamilyError::NotIrreducible { level });
    }
    Ok(rep)
}

/// The irreducible representation `policy` assigns to `level`.
pub fn choose_irrep(
    family: &QuotientFamily,
    level: usize,
    policy: &IrrepPolicy,
) -> Result<Representation, FamilyError> {
    let lvl = family.level(level)?;
    let unsupported = || FamilyError::UnsupportedPolicy {
        policy: policy.name().into(),
        level,
    };
    let rep = match policy {
        IrrepPolicy::Steinberg => {
            if sl2_modulus(lvl).is_none() {
                return Err(unsupported());
            }
            steinberg_rep(family, level)?
        }
        IrrepPolicy::DeletedNatural => {
            let action = PermutationAction::natural(&lvl.group).ok_or_else(unsupported)?;
            deleted_permutation_rep(lvl.group.clone(), action).map_err(|e| match e {
                RepError::NotTransitive => FamilyError::NotIrreducible { level },
                other => other.into(),
            })?
        }
        IrrepPolicy::Trivial => Representation::trivial(lvl.group.clone(), 1),
        IrrepPolicy::Custom(custom) => {
            let action = (custom.0)(&lvl.group);
            deleted_permutation_rep(lvl.group.clone(), action)?
        }
    };
    if !is_irreducible(&rep) {
        return Err(FamilyError::NotIrreducible { level });
    }
    Ok(rep)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rep::character_inner;

    #[test]
    fn sl2_orders_match_formula() {
        let f = sl2_family(&[3]).unwrap();
        assert_eq!(f.orders(), vec![24]);
        let f = sl2_family(&[3, 5, 7]).unwrap();
        assert_eq!(f.orders(), vec![24, 120, 336]);
        for (p, o) in [3usize, 5, 7].iter().zip(f.orders()) {
            assert_eq!(o, p * (p * p - 1));
        }
        assert!(f.index_growth_strict());
        assert!(f.check_symmetric().is_ok());
    }

    #[test]
    fn sl2_parameter_errors() {
        assert!(matches!(sl2_family(&[3, 9]), Err(FamilyError::NotPrime(9))));
        assert!(matches!(sl2_family(&[2]), Err(FamilyError::BadParameters(_))));
        assert!(matches!(sl2_family(&[5, 3]), Err(FamilyError::BadParameters(_))));
        assert!(matches!(sl2_family(&[]), Err(FamilyError::BadParameters(_))));
    }

    #[test]
    fn alt_orders_match_formula() {
        let f = alt_family(&[4], &AltGenerators::Default).unwrap();
        assert_eq!(f.orders(), vec![12]);
        let f = alt_family(&[5], &AltGenerators::Default).unwrap();
        assert_eq!(f.orders(), vec![60]);
        let f = alt_family(&[4, 5, 6, 7], &AltGenerators::Default).unwrap();
        assert_eq!(f.orders(), vec![12, 60, 360, 2520]);
        assert!(f.check_symmetric().is_ok());
        for lvl in f.levels() {
            assert!(lvl.images.iter().all(|g| g.as_perm().unwrap().is_even()));
        }
    }

    #[test]
    fn alt_rejects_odd_generators() {
        let odd = Permutation::from_cycles(4, &[&[0, 1]]).unwrap();
        let gens = AltGenerators::PerDegree {
            symbols: GeneratorSymbolSet::new(vec![0]).unwrap(),
            images: vec![vec![odd]],
        };
        assert!(matches!(
            alt_family(&[4], &gens),
            Err(FamilyError::NotGenerating { level: 0 })
        ));
        assert!(matches!(
            alt_family(&[3], &AltGenerators::Default),
            Err(FamilyError::BadParameters(_))
        ));
    }

    #[test]
    fn product_family_reexpresses_sl2() {
        let preset = sl2_family(&[3, 5]).unwrap();
        let levels = [3u32, 5]
            .iter()
            .map(|&p| ProductLevel {
                label: format!("p{p}"),
                images: elementary_images(p),
                expected_order: None,
            })
            .collect();
        let tuples = product_subgroup_family(GeneratorSymbolSet::with_inverses(2), levels).unwrap();
        for (a, b) in preset.levels().iter().zip(tuples.levels()) {
            assert_eq!(a.group.elements(), b.group.elements());
        }
    }

    #[test]
    fn product_family_single_level_and_failures() {
        let one = vec![ProductLevel {
            label: "p7".into(),
            images: elementary_images(7),
            expected_order: Some(336),
        }];
        let f = product_subgroup_family(GeneratorSymbolSet::with_inverses(2), one).unwrap();
        assert_eq!(f.orders(), vec![336]);

        // the two upper unipotents only generate a cyclic group of order 5
        let a = elementary_images(5);
        let upper = vec![a[0].clone(), a[0].clone(), a[2].clone(), a[2].clone()];
        let bad = vec![ProductLevel {
            label: "upper".into(),
            images: upper,
            expected_order: Some(120),
        }];
        assert!(matches!(
            product_subgroup_family(GeneratorSymbolSet::with_inverses(2), bad),
            Err(FamilyError::NotGenerating { level: 0 })
        ));

        let short = vec![ProductLevel {
            label: "short".into(),
            images: elementary_images(5)[..3].to_vec(),
            expected_order: None,
        }];
        assert!(matches!(
            product_subgroup_family(GeneratorSymbolSet::with_inverses(2), short),
            Err(FamilyError::Group(GroupError::InconsistentArity { .. }))
        ));

        let unpaired = vec![ProductLevel {
            label: "unpaired".into(),
            images: elementary_images(5),
            expected_order: None,
        }];
        assert!(matches!(
            product_subgroup_family(GeneratorSymbolSet::new(vec![1, 0, 3, 2]).unwrap(), unpaired),
            Err(FamilyError::Group(GroupError::NotSymmetric { .. }))
        ));
    }

    #[test]
    fn steinberg_dimensions() {
        let f = sl2_family(&[3, 5, 7]).unwrap();
        for (level, p) in [3usize, 5, 7].into_iter().enumerate() {
            let st = steinberg_rep(&f, level).unwrap();
            assert_eq!(st.dim(), p);
            assert_eq!(st.character(0).re, p as f64);
            assert!((character_inner(&st, &st).unwrap() - 1.0).abs() < 1e-9);
        }
        let alt = alt_family(&[5], &AltGenerators::Default).unwrap();
        assert!(matches!(steinberg_rep(&alt, 0), Err(FamilyError::NotSl2 { level: 0 })));
    }

    #[test]
    fn policies() {
        let alt = alt_family(&[5], &AltGenerators::Default).unwrap();
        let rep = choose_irrep(&alt, 0, &IrrepPolicy::DeletedNatural).unwrap();
        assert_eq!(rep.dim(), 4);
        assert!((character_inner(&rep, &rep).unwrap() - 1.0).abs() < 1e-9);

        let sl2 = sl2_family(&[7]).unwrap();
        assert_eq!(choose_irrep(&sl2, 0, &IrrepPolicy::Steinberg).unwrap().dim(), 7);
        assert_eq!(choose_irrep(&sl2, 0, &IrrepPolicy::Trivial).unwrap().dim(), 1);
        assert!(matches!(
            choose_irrep(&sl2, 0, &IrrepPolicy::DeletedNatural),
            Err(FamilyError::UnsupportedPolicy { .. })
        ));
        assert!(matches!(
            choose_irrep(&alt, 0, &IrrepPolicy::Steinberg),
            Err(FamilyError::UnsupportedPolicy { .. })
        ));
    }

    #[test]
    fn custom_policy_rejects_reducible_candidates() {
        // Alt(5) on the 10 unordered pairs: the deleted action is 9-dimensional
        // and splits as 4 + 5.
        let alt = alt_family(&[5], &AltGenerators::Default).unwrap();
        let pairs: Vec<(usize, usize)> = (0..5).flat_map(|a| (a + 1..5).map(move |b| (a, b))).collect();
        let custom = CustomAction(Arc::new(move |g: &FiniteGroup| {
            let pairs = pairs.clone();
            PermutationAction::from_fn(g, pairs.len(), |x| {
                let p = x.as_perm().unwrap();
                let images = pairs
                    .iter()
                    .map(|&(a, b)| {
                        let (u, v) = (p.apply(a).min(p.apply(b)), p.apply(a).max(p.apply(b)));
                        pairs.iter().position(|&q| q == (u, v)).unwrap() as u32
                    })
                    .collect();
                Permutation::new(images).unwrap()
            })
        }));
        assert!(matches!(
            choose_irrep(&alt, 0, &IrrepPolicy::Custom(custom)),
            Err(FamilyError::NotIrreducible { level: 0 })
        ));
    }

    #[test]
    fn presets_are_symmetric_and_monotone() {
        for (name, spec) in shipped_presets() {
            let f = spec.build().unwrap();
            assert!(f.check_symmetric().is_ok(), "{name}");
            let dims: Vec<usize> = (0..f.levels().len())
                .map(|l| choose_irrep(&f, l, &spec.policy).unwrap().dim())
                .collect();
            match spec.policy {
                IrrepPolicy::Trivial => assert!(dims.iter().all(|&d| d == 1)),
                _ => assert!(dims.windows(2).all(|w| w[0] < w[1]), "{name}: {dims:?}"),
            }
        }
    }
}
