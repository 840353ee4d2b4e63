use std::sync::Arc;

use faer::{c64, Mat};
use proptest::prelude::*;

use super::*;
use crate::group::{generate_closure, GroupElement, Permutation, PrimeMatrix, DEFAULT_CAP};
use crate::linalg::{frobenius_distance, hermitian_eigen, spectral_projection, trace};

fn perm(degree: usize, cycles: &[&[u32]]) -> GroupElement {
    Permutation::from_cycles(degree, cycles).unwrap().into()
}

fn alt4() -> Arc<FiniteGroup> {
    Arc::new(generate_closure(&[perm(4, &[&[0, 1, 2]]), perm(4, &[&[1, 2, 3]])], DEFAULT_CAP).unwrap())
}

fn cyclic(n: usize) -> Arc<FiniteGroup> {
    let c: Vec<u32> = (0..n as u32).collect();
    Arc::new(generate_closure(&[perm(n, &[&c])], DEFAULT_CAP).unwrap())
}

fn sl2(p: u32) -> Arc<FiniteGroup> {
    let a = PrimeMatrix::new(p, &[vec![1, 1], vec![0, 1]]).unwrap();
    let b = PrimeMatrix::new(p, &[vec![1, 0], vec![1, 1]]).unwrap();
    Arc::new(generate_closure(&[a.into(), b.into()], DEFAULT_CAP).unwrap())
}

/// Lines through the origin in F_p^2: [1:a] for a < p, then [0:1].
fn projective_action(group: &FiniteGroup, p: u32) -> PermutationAction {
    let point = |v: Vec<u32>| -> u32 {
        if v[0] != 0 {
            let inv = crate::group::inv_mod(v[0], p);
            (v[1] as u64 * inv as u64 % p as u64) as u32
        } else {
            p
        }
    };
    PermutationAction::from_fn(group, p as usize + 1, |g| {
        let m = g.as_matrix().unwrap();
        let images = (0..=p)
            .map(|k| {
                let rep = if k < p { vec![1, k] } else { vec![0, 1] };
                point(m.apply(&rep))
            })
            .collect();
        Permutation::new(images).unwrap()
    })
}

fn steinberg(p: u32) -> Representation {
    let g = sl2(p);
    let action = projective_action(&g, p);
    deleted_permutation_rep(g, action).unwrap()
}

fn is_projection(p: &CMat, tol: f64) -> bool {
    frobenius_distance(&(p * p), p) <= tol && crate::linalg::hermitian_defect(p) <= tol
}

#[test]
fn regular_of_trivial_group() {
    let g = Arc::new(generate_closure(&[Permutation::identity(1).into()], DEFAULT_CAP).unwrap());
    let rep = regular_representation(g);
    assert_eq!(rep.dim(), 1);
    assert_eq!(rep.image(0)[(0, 0)], c64::new(1.0, 0.0));
}

#[test]
fn regular_character_by_direct_trace() {
    let rep = regular_representation(sl2(3));
    for g in 0..24 {
        let tr = trace(&rep.image(g));
        let expected = if g == 0 { 24.0 } else { 0.0 };
        assert_eq!(tr, c64::new(expected, 0.0));
        assert_eq!(rep.character(g), tr);
    }
}

#[test]
fn regular_of_order_two() {
    let rep = regular_representation(cyclic(2));
    let m = rep.image(1);
    assert_eq!(m[(0, 1)], c64::new(1.0, 0.0));
    assert_eq!(m[(1, 0)], c64::new(1.0, 0.0));
    assert_eq!(m[(0, 0)], c64::new(0.0, 0.0));
}

#[test]
fn permutation_representations() {
    let one = Arc::new(generate_closure(&[Permutation::identity(1).into()], DEFAULT_CAP).unwrap());
    let triv = permutation_representation(one.clone(), PermutationAction::natural(&one).unwrap()).unwrap();
    assert_eq!(triv.dim(), 1);
    assert!(is_irreducible(&triv));

    let g = alt4();
    let nat = permutation_representation(g.clone(), PermutationAction::natural(&g).unwrap()).unwrap();
    for x in 0..g.order() {
        let fixed = g.element(x).as_perm().unwrap().fixed_points() as f64;
        assert_eq!(trace(&nat.image(x)), c64::new(fixed, 0.0));
        assert_eq!(nat.character(x).re, fixed);
    }

    let left = permutation_representation(g.clone(), PermutationAction::left_translation(&g)).unwrap();
    let reg = regular_representation(g.clone());
    for x in 0..g.order() {
        assert_eq!(frobenius_distance(&left.image(x), &reg.image(x)), 0.0);
    }
}

#[test]
fn bogus_action_is_rejected() {
    let g = alt4();
    let swap = Permutation::from_cycles(2, &[&[0, 1]]).unwrap();
    let bogus = PermutationAction::from_fn(&g, 2, |x| {
        if x.is_identity() {
            Permutation::identity(2)
        } else {
            swap.clone()
        }
    });
    assert!(matches!(
        permutation_representation(g, bogus),
        Err(RepError::NotAnAction)
    ));
}

#[test]
fn deleted_alt4_is_irreducible() {
    let g = alt4();
    let rep = deleted_permutation_rep(g.clone(), PermutationAction::natural(&g).unwrap()).unwrap();
    assert_eq!(rep.dim(), 3);
    // ⟨χ,χ⟩ summed by hand from fixed-point counts
    let sum: f64 = g
        .elements()
        .iter()
        .map(|x| {
            let chi = x.as_perm().unwrap().fixed_points() as f64 - 1.0;
            chi * chi
        })
        .sum();
    assert_eq!(sum / 12.0, 1.0);
    assert!((character_inner(&rep, &rep).unwrap() - 1.0).abs() < 1e-12);
    assert!(is_irreducible(&rep));
    assert!(rep.unitarity_defect() < 1e-10);
}

#[test]
fn steinberg_of_sl2_5() {
    let st = steinberg(5);
    assert_eq!(st.dim(), 5);
    assert!((character_inner(&st, &st).unwrap() - 1.0).abs() < 1e-9);
    assert!(is_irreducible(&st));
    assert_eq!(st.character(0).re, 5.0);
    for g in 0..st.group().order() {
        assert!((trace(&st.image(g)) - st.character(g)).norm() < 1e-12);
    }
}

#[test]
fn two_point_action_gives_sign() {
    let g = cyclic(2);
    let rep = deleted_permutation_rep(g.clone(), PermutationAction::natural(&g).unwrap()).unwrap();
    assert_eq!(rep.dim(), 1);
    assert!((rep.image(1)[(0, 0)] - c64::new(-1.0, 0.0)).norm() < 1e-15);
}

#[test]
fn intransitive_action_is_rejected() {
    let g = Arc::new(generate_closure(&[perm(4, &[&[0, 1, 2]])], DEFAULT_CAP).unwrap());
    let action = PermutationAction::natural(&g).unwrap();
    assert!(matches!(
        deleted_permutation_rep(g, action),
        Err(RepError::NotTransitive)
    ));
}

#[test]
fn tensor_with_trivial_changes_nothing() {
    let st = steinberg(3);
    let one = Representation::trivial(st.group().clone(), 1);
    let t = tensor(&st, &one, Pairing::Identity).unwrap();
    for g in 0..24 {
        assert!(frobenius_distance(&t.image(g), &st.image(g)) < 1e-15);
    }
}

#[test]
fn tensor_characters_multiply() {
    let st = steinberg(3);
    let reg = regular_representation(st.group().clone());
    let t = tensor(&reg, &st, Pairing::Identity).unwrap();
    assert_eq!(t.dim(), 72);
    for g in 0..24 {
        let direct = trace(&t.image(g));
        let product = reg.character(g) * st.character(g);
        assert!((direct - product).norm() < 1e-10);
        assert!((t.character(g) - product).norm() < 1e-12);
    }
}

#[test]
fn tensor_pairing_must_match() {
    let a = steinberg(3);
    let b = steinberg(5);
    assert!(matches!(
        tensor(&a, &b, Pairing::Identity),
        Err(RepError::IncompatiblePairing)
    ));
    assert!(matches!(
        tensor(&a, &b, Pairing::Coordinates(sl2(7))),
        Err(RepError::IncompatiblePairing)
    ));
}

#[test]
fn character_inner_products() {
    let g = sl2(3);
    let triv = Representation::trivial(g.clone(), 1);
    assert_eq!(character_inner(&triv, &triv).unwrap(), 1.0);
    let reg = regular_representation(g.clone());
    assert_eq!(character_inner(&reg, &triv).unwrap(), 1.0);
    assert_eq!(character_inner(&reg, &reg).unwrap(), 24.0);
    assert!(!is_irreducible(&reg));
    assert!(is_irreducible(&triv));
    let st5 = steinberg(5);
    assert!(matches!(character_inner(&st5, &triv), Err(RepError::GroupMismatch)));
}

#[test]
fn invariant_projections() {
    let g = sl2(3);
    let triv = Representation::trivial(g.clone(), 4);
    let p = invariant_projection(&triv);
    assert!(frobenius_distance(&p, &crate::linalg::identity(4)) < 1e-15);

    let reg = regular_representation(g.clone());
    let p = invariant_projection(&reg);
    let ones = Mat::from_fn(24, 24, |_, _| c64::new(1.0 / 24.0, 0.0));
    assert!(frobenius_distance(&p, &ones) < 1e-14);
    assert_eq!(invariant_rank(&reg).unwrap(), 1);

    let st = steinberg(3);
    let t = tensor(&reg, &st, Pairing::Identity).unwrap();
    let p = invariant_projection(&t);
    assert!(is_projection(&p, 1e-9));
    assert!((trace(&p).re - 3.0).abs() < 1e-9);
    assert_eq!(invariant_rank(&t).unwrap(), 3);
    for gen in 0..2 {
        let u = t.image(g.generator_index(gen));
        assert!(frobenius_distance(&(&p * &u), &(&u * &p)) < 1e-9);
    }
}

#[test]
fn streaming_projection_matches_fast_path() {
    let st = steinberg(3);
    let reg = regular_representation(st.group().clone());
    let t = tensor(&reg, &st, Pairing::Identity).unwrap();
    let fast = invariant_projection(&t);
    let mut slow = Mat::zeros(72, 72);
    for g in 0..24 {
        slow += faer::Scale(c64::new(1.0 / 24.0, 0.0)) * t.image(g);
    }
    assert!(frobenius_distance(&fast, &slow) < 1e-12);
}

#[test]
fn markov_of_trivial_is_one() {
    let g = sl2(3);
    let triv = Representation::trivial(g.clone(), 1);
    let genset: Vec<usize> = vec![g.generator_index(0), g.inverse_index(g.generator_index(0))];
    let t = markov_operator(&triv, &genset).unwrap();
    assert_eq!(t[(0, 0)], c64::new(1.0, 0.0));
}

#[test]
fn markov_complete_graph_spectrum() {
    let n = 7;
    let g = cyclic(n);
    let reg = regular_representation(g.clone());
    let genset: Vec<usize> = (1..n).collect();
    let t = markov_operator(&reg, &genset).unwrap();
    let (vals, _) = hermitian_eigen(&t).unwrap();
    let closed = -1.0 / (n as f64 - 1.0);
    assert!((vals[n - 1] - 1.0).abs() < 1e-12);
    for v in &vals[..n - 1] {
        assert!((v - closed).abs() < 1e-12);
    }
}

#[test]
fn markov_requires_symmetric_multiset() {
    let g = cyclic(5);
    let reg = regular_representation(g.clone());
    assert!(matches!(markov_operator(&reg, &[1]), Err(RepError::NotSymmetricSet)));
    assert!(matches!(markov_operator(&reg, &[]), Err(RepError::NotSymmetricSet)));
    let s = 1;
    let inv = g.inverse_index(s);
    assert!(matches!(
        markov_operator(&reg, &[s, s, inv]),
        Err(RepError::NotSymmetricSet)
    ));
    assert!(markov_operator(&reg, &[s, inv, s, inv]).is_ok());
}

#[test]
fn spectral_cluster_matches_averaging() {
    let st = steinberg(3);
    let g = st.group().clone();
    let reg = regular_representation(g.clone());
    let t = tensor(&reg, &st, Pairing::Identity).unwrap();
    let genset: Vec<usize> = (0..2)
        .flat_map(|s| {
            let x = g.generator_index(s);
            [x, g.inverse_index(x)]
        })
        .collect();
    let m = markov_operator(&t, &genset).unwrap();
    let (vals, vecs) = hermitian_eigen(&m).unwrap();
    assert!(vals.iter().all(|v| (-1.0 - 1e-12..=1.0 + 1e-12).contains(v)));
    let (spectral, rank) = spectral_projection(&vals, &vecs, 1.0 - 1e-8);
    assert_eq!(rank, 3);
    assert!(frobenius_distance(&spectral, &invariant_projection(&t)) < 1e-8);
}

#[test]
fn from_matrices_validates() {
    let g = cyclic(3);
    let w = c64::from_polar(1.0, 2.0 * std::f64::consts::PI / 3.0);
    let images: Vec<CMat> = (0..3).map(|k| Mat::from_fn(1, 1, |_, _| w.powu(k as u32))).collect();
    // element order is BFS: e, c, c^2
    let rep = Representation::from_matrices(g.clone(), images).unwrap();
    assert!(is_irreducible(&rep));
    let triv = Representation::trivial(g.clone(), 1);
    assert!(character_inner(&rep, &triv).unwrap().abs() < 1e-12);

    let bad: Vec<CMat> = (0..3).map(|_| Mat::from_fn(1, 1, |_, _| w)).collect();
    assert!(Representation::from_matrices(g, bad).is_err());
}

#[test]
fn round_rank_guard() {
    assert_eq!(round_rank(3.0000000001).unwrap(), 3);
    assert!(matches!(round_rank(2.6), Err(RepError::RankNotInteger { .. })));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn representations_are_homomorphisms(g in 0usize..120, h in 0usize..120) {
        let st = steinberg(5);
        prop_assert!(st.homomorphism_defect(&[(g, h)]) <= 1e-9);
        let reg = regular_representation(st.group().clone());
        let t = tensor(&reg, &st, Pairing::Identity).unwrap();
        prop_assert!((t.character(g) - reg.character(g) * st.character(g)).norm() < 1e-12);
    }
}
