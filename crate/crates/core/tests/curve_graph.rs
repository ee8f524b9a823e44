mod common;

use common::*;
use mcglab::curve_graph::*;
use mcglab::curves::*;
use mcglab::surface::*;
use proptest::prelude::*;

fn word(gs: &GeneratorSet, text: &str) -> MappingClassWord {
    gs.parse_word(text).unwrap()
}

fn arb_word(n: usize, max_len: usize) -> impl Strategy<Value = MappingClassWord> {
    prop::collection::vec((0..n, any::<bool>()), 0..=max_len)
        .prop_map(|v| MappingClassWord::new(v.into_iter().map(|(i, inv)| Letter::new(i, inv))))
}

#[test]
fn distance_bound_examples() {
    let gs = humphries(2);
    let c = gs.system().chain();
    assert_eq!(distance_bounds(&gs, &c[0], &c[0]).unwrap(), DistanceBounds::exact(0, BoundTag::Equal));
    let d = distance_bounds(&gs, &c[0], &c[2]).unwrap();
    assert_eq!((d.lower, d.upper), (1, Some(1)));
    let d = distance_bounds(&gs, &c[0], &c[1]).unwrap();
    assert_eq!((d.lower, d.upper), (2, Some(2)));
    let (a, b) = &gs.system().filling_pairs()[0];
    let d = distance_bounds(&gs, a, b).unwrap();
    assert_eq!(d.lower, 3);
    assert_eq!(d.upper, Some(10));
    assert!(d.tags.contains(&BoundTag::CuratedFilling));
    assert!(d.tags.contains(&BoundTag::LogUpper));
}

#[test]
fn proxy_examples() {
    let gs = humphries(2);
    let p = rel_length_proxy(&gs, &MappingClassWord::identity());
    assert_eq!((p.lower, p.upper), (0, Some(0)));
    // T_1 fixes the basepoint c_1 itself.
    for k in 1..20 {
        let p = rel_length_proxy(&gs, &MappingClassWord::power(0, k));
        assert_eq!((p.lower, p.upper), (0, Some(0)));
    }
    let p = rel_length_proxy(&gs, &word(&gs, "T2"));
    assert_eq!((p.lower, p.upper), (2, Some(2)));
}

#[test]
fn ball_membership_examples() {
    let gs = humphries(2);
    let b = DEFAULT_BALL_BUDGET;
    assert!(ball_membership(&gs, &MappingClassWord::identity(), 0, b).unwrap());
    assert!(!ball_membership(&gs, &word(&gs, "T1"), 0, b).unwrap());
    // For chain neighbours the braid relation gives [T1, T2] = T2^-1 T1.
    let comm = word(&gs, "T1 T2 T1^-1 T2^-1");
    assert!(alexander_identity_test(&gs, &comm.concat(&word(&gs, "T1^-1 T2"))));
    assert!(!ball_membership(&gs, &comm, 1, b).unwrap());
    assert!(ball_membership(&gs, &comm, 2, b).unwrap());
    assert!(ball_membership(&gs, &comm, 4, b).unwrap());
    let far = word(&gs, "T1 T4 T1^-1 T4^-1 T2 T5");
    assert!(!ball_membership(&gs, &far, 1, b).unwrap());
    // Disjoint twists commute, so their commutator is in every ball.
    assert!(ball_membership(&gs, &word(&gs, "T1 T3 T1^-1 T3^-1"), 0, b).unwrap());
    // Braid relation: T1 T2 T1 T2^-1 has length 2 as T2 T1.
    assert!(ball_membership(&gs, &word(&gs, "T1 T2 T1 T2^-1"), 2, b).unwrap());
}

#[test]
fn balls_respect_budgets() {
    let gs = humphries(2);
    match WordBall::new(&gs, 6, 1000) {
        Err(CurveGraphError::BudgetExceeded { required, budget }) => {
            assert_eq!(budget, 1000);
            assert_eq!(required, reduced_ball_bound(5, 6));
        }
        other => panic!("expected a budget error, got {other:?}"),
    }
    let ball = WordBall::new(&gs, 2, 1000).unwrap();
    // Reduced words of length <= 2 number 111; commuting pairs collapse.
    assert!(ball.len() < 111);
    let brute: std::collections::HashSet<_> = all_words(5, 2).iter().map(|w| gs.element_key(w)).collect();
    assert_eq!(ball.len(), brute.len());
}

#[test]
fn dense_subset_examples() {
    let gs = humphries(2);
    let b = DEFAULT_BALL_BUDGET;
    let set = |ws: &[&str]| FiniteElementSet::new(&gs, ws.iter().map(|t| word(&gs, t)));
    assert!(k_dense_subset(&gs, &set(&["T1 T2"]), 3, b).unwrap().is_empty());
    assert_eq!(k_dense_subset(&gs, &set(&["id", "T1"]), 1, b).unwrap().len(), 2);
    let r = set(&["id", "T1 T1 T1"]);
    assert!(k_dense_subset(&gs, &r, 2, b).unwrap().is_empty());
    assert_eq!(k_dense_subset(&gs, &r, 3, b).unwrap().len(), 2);
}

#[test]
fn separation_examples() {
    let gs = humphries(2);
    let b = DEFAULT_BALL_BUDGET;
    let set = |ws: &[&str]| FiniteElementSet::new(&gs, ws.iter().map(|t| word(&gs, t)));
    for k in 0..4 {
        assert!(is_k_separated(&gs, &set(&["T1 T2"]), k, b).unwrap());
    }
    assert!(!is_k_separated(&gs, &set(&["id", "T1"]), 2, b).unwrap());
    let x = set(&["id", "T1 T1 T1 T1"]);
    let t4 = word(&gs, "T1 T1 T1 T1");
    let shorter = all_words(5, 3).iter().any(|v| alexander_identity_test(&gs, &v.inverse().concat(&t4)));
    assert_eq!(is_k_separated(&gs, &x, 4, b).unwrap(), !shorter);
    assert!(!shorter);
}

#[test]
fn finite_sets_drop_repeats() {
    let gs = humphries(2);
    let s = FiniteElementSet::new(&gs, ["T1 T3", "T3 T1", "T1 T2 T1", "T2 T1 T2"].iter().map(|t| word(&gs, t)));
    assert_eq!(s.len(), 2);
}

#[test]
fn horoball_examples() {
    let gs = humphries(2);
    let one = FiniteElementSet::new(&gs, [MappingClassWord::identity()]);
    assert!(horoball_member(&gs, &one, 0, &MappingClassWord::identity()));
    // Proxy distance zero means fixing the basepoint, not being trivial.
    assert!(horoball_member(&gs, &one, 0, &word(&gs, "T1 T3")));
    assert!(!horoball_member(&gs, &one, 0, &word(&gs, "T2")));
    let x = FiniteElementSet::new(&gs, [word(&gs, "T2 T3"), word(&gs, "T4^-1 T2")]);
    for w in x.words() {
        assert!(horoball_member(&gs, &x, 0, w));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(50))]

    #[test]
    fn bounds_are_ordered_and_invariant(v in arb_word(5, 5), u in arb_word(5, 5), i in 0usize..13, j in 0usize..13) {
        let gs = humphries(2);
        let bat = gs.system().battery();
        let a = gs.act(&v, &bat[i]);
        let b = bat[j].clone();
        let d = distance_bounds(&gs, &a, &b).unwrap();
        prop_assert!(d.upper.map_or(true, |up| d.lower <= up));
        let moved = distance_bounds(&gs, &gs.act(&u, &a), &gs.act(&u, &b)).unwrap();
        prop_assert_eq!(d, moved);
    }

    #[test]
    fn dense_subsets_match_the_oracle_and_grow_with_k(ws in prop::collection::vec(arb_word(5, 4), 1..8), k in 0usize..3) {
        let gs = humphries(2);
        let r = FiniteElementSet::new(&gs, ws);
        let ball = WordBall::new(&gs, k + 1, DEFAULT_BALL_BUDGET).unwrap();
        let rk = k_dense_subset_in(&gs, &r, k, &ball);
        prop_assert_eq!(rk.words().to_vec(), brute_dense(&gs, r.words(), k));
        let rk1 = k_dense_subset_in(&gs, &r, k + 1, &ball);
        for key in rk.keys() {
            prop_assert!(rk1.contains_key(key));
        }
        prop_assert_eq!(is_k_separated(&gs, &r, k + 1, DEFAULT_BALL_BUDGET).unwrap(), rk.is_empty());
    }

    #[test]
    fn horoballs_are_monotone(ws in prop::collection::vec(arb_word(5, 4), 1..4), extra in arb_word(5, 4), y in arb_word(5, 6), l in 0u32..4) {
        let gs = humphries(2);
        let x = FiniteElementSet::new(&gs, ws.clone());
        let mut bigger = x.clone();
        bigger.insert(&gs, extra);
        if horoball_member(&gs, &x, l, &y) {
            prop_assert!(horoball_member(&gs, &x, l + 1, &y));
            prop_assert!(horoball_member(&gs, &bigger, l, &y));
        }
    }
}

#[test]
fn large_sets_use_ball_translation_and_match_the_oracle() {
    use rand::{Rng, SeedableRng};
    let gs = humphries(2);
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
    // Short words so that many pairs are close.
    let words: Vec<MappingClassWord> = (0..60)
        .map(|_| MappingClassWord::new((0..rng.gen_range(0..6)).map(|_| Letter::new(rng.gen_range(0..3), rng.gen_bool(0.5)))))
        .collect();
    let r = FiniteElementSet::new(&gs, words);
    assert!(r.len() > 22);
    let ball = WordBall::new(&gs, 1, DEFAULT_BALL_BUDGET).unwrap();
    let rk = k_dense_subset_in(&gs, &r, 1, &ball);
    assert_eq!(rk.words().to_vec(), brute_dense(&gs, r.words(), 1));
    assert!(!rk.is_empty());
}
