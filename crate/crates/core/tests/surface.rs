use mcglab::curves::{Letter, MappingClassWord};
use mcglab::homology::word_to_matrix;
use mcglab::surface::*;
use num_bigint::BigInt;

fn path_graph(n: usize) -> Vec<Vec<u64>> {
    (0..n).map(|i| (0..n).map(|j| u64::from(i.abs_diff(j) == 1)).collect()).collect()
}

#[test]
fn humphries_sets_have_path_graph_intersections() {
    for g in 2..=4 {
        let gs = humphries_generators(&make_surface(g, 0).unwrap()).unwrap();
        assert_eq!(gs.len(), 2 * g as usize + 1);
        assert_eq!(intersection_matrix(&gs), path_graph(2 * g as usize + 1));
        assert_eq!(gs.labels()[0], "T1");
    }
}

#[test]
fn unsupported_surfaces_are_rejected() {
    for (g, p) in [(1, 0), (2, 1), (0, 5)] {
        let s = make_surface(g, p).unwrap();
        assert!(matches!(humphries_generators(&s), Err(SurfaceError::Unsupported(..))));
        assert!(torelli_generators(&s, 2).is_err());
    }
    assert!(make_surface(3, 0).unwrap().has_full_support());
    assert!(!make_surface(0, 3).unwrap().has_full_support());
}

#[test]
fn bounding_pairs_are_disjoint_homologous_and_torelli() {
    for g in [3, 4] {
        let s = make_surface(g, 0).unwrap();
        let gs = torelli_generators(&s, 6).unwrap();
        assert_eq!(gs.len(), 6);
        let sys = gs.system();
        for (k, gen) in gs.generators().iter().enumerate() {
            let (a, b) = (&gen.curves[0], &gen.curves[1]);
            assert_ne!(a, b);
            assert_eq!(sys.intersection(a, b).unwrap(), BigInt::from(0));
            assert_eq!(sys.homology_class(a), sys.homology_class(b));
            let w = MappingClassWord::new([Letter::pos(k)]);
            assert!(word_to_matrix(&w, &gs).is_identity());
            // The action is nontrivial: some battery curve moves.
            assert!(sys.battery().iter().any(|c| &gs.act(&w, c) != c));
        }
        let m = intersection_matrix(&gs);
        for i in 0..m.len() {
            assert_eq!(m[i][i], 0);
            for j in 0..m.len() {
                assert_eq!(m[i][j], m[j][i]);
            }
        }
    }
}

#[test]
fn basic_bounding_pair_satisfies_the_chain_relation() {
    // (T_1 T_2 T_3)^4 = T_{d_1} T_{d_2} for the pair bounding c_1 ∪ c_2 ∪ c_3.
    let s = make_surface(3, 0).unwrap();
    let h = humphries_generators(&s).unwrap();
    let sys = h.system();
    let gs = torelli_generators(&s, 1).unwrap();
    let gen = &gs.generators()[0];
    let (d1, d2) = (&gen.curves[0], &gen.curves[1]);
    let t123 = MappingClassWord::new([Letter::pos(0), Letter::pos(1), Letter::pos(2)]).pow(4);
    let e1 = sys.twist_encoding(d1).unwrap();
    let e2 = sys.twist_encoding(d2).unwrap();
    for c in sys.battery() {
        let mut x = c.clone();
        e2.apply(x.weights_mut());
        e1.apply(x.weights_mut());
        assert_eq!(h.act(&t123, c), x);
    }
}

#[test]
fn genus_two_torelli_uses_separating_twists() {
    let s = make_surface(2, 0).unwrap();
    let gs = torelli_generators(&s, 1).unwrap();
    assert_eq!(gs.len(), 1);
    let h = humphries_generators(&s).unwrap();
    let sys = h.system();
    let sep = &gs.generators()[0].curves[0];
    // The twist about the separating curve meets c_3 in two points, so
    // i(T^n(c_3), c_3) = 4n.
    assert_eq!(sys.intersection(sep, &sys.chain()[2]).unwrap(), BigInt::from(2));
    let t = MappingClassWord::new([Letter::pos(0)]);
    for n in 1..=3u32 {
        let img = gs.act(&t.pow(n), &sys.chain()[2]);
        assert_eq!(sys.intersection(&img, &sys.chain()[2]).unwrap(), BigInt::from(4 * n));
    }
    assert!(gs.matrix(&t).is_identity());
    assert_eq!(gs.act(&t, sep), sep.clone());
}

#[test]
fn torelli_budget_bounds_the_count() {
    let s = make_surface(3, 0).unwrap();
    for b in 1..=4 {
        assert_eq!(torelli_generators(&s, b).unwrap().len(), b);
    }
}

#[test]
fn tables_round_trip_and_reject_garbage() {
    let s = make_surface(3, 0).unwrap();
    let gs = torelli_generators(&s, 3).unwrap();
    let text = gs.to_table();
    let back = GeneratorSet::from_table(&s, &text).unwrap();
    assert_eq!(back.to_table(), text);
    let mixed = "A chain 1 +1\nB chain 2 -1\nP bounding-pair 2 +1\n";
    let m = GeneratorSet::from_table(&s, mixed).unwrap();
    assert_eq!(m.labels(), vec!["A", "B", "P"]);
    let w = m.parse_word("A B").unwrap();
    let h = humphries_generators(&s).unwrap();
    let hw = h.parse_word("T1 T2^-1").unwrap();
    for c in h.system().battery() {
        assert_eq!(m.act(&w, c), h.act(&hw, c));
    }
    for bad in ["A chain 9 +1", "A chain 1 x", "A loop 1 +1", "", "A chain 1 +1\nA chain 2 +1", "A separating 1 +1"] {
        assert!(GeneratorSet::from_table(&s, bad).is_err(), "{bad:?}");
    }
}
