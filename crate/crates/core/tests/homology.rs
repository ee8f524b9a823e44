mod common;

use common::*;
use mcglab::curves::*;
use mcglab::homology::*;
use mcglab::surface::*;
use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};

fn arb_word(n: usize, max_len: usize) -> impl Strategy<Value = MappingClassWord> {
    prop::collection::vec((0..n, any::<bool>()), 0..=max_len)
        .prop_map(|v| MappingClassWord::new(v.into_iter().map(|(i, inv)| Letter::new(i, inv))))
}

/// Monic integer divisors of degree 1 or 2 of a monic quartic.
fn small_monic_factors(p: &Poly) -> Vec<Poly> {
    let bound: i64 = p.iter().map(|c| c.abs()).max().unwrap().try_into().unwrap_or(1000);
    let c0: i64 = p[0].clone().try_into().unwrap();
    let divisors: Vec<i64> = (1..=c0.abs().max(1)).filter(|d| c0 == 0 || c0 % d == 0).flat_map(|d| [d, -d]).collect();
    let mut out = vec![];
    for &r in divisors.iter().chain(std::iter::once(&0)) {
        let f = vec![BigInt::from(-r), BigInt::one()];
        if divides(&f, p) {
            out.push(f);
        }
    }
    let b = 2 * (bound + 1);
    for &q in divisors.iter().chain(std::iter::once(&0)) {
        for s in -b..=b {
            let f = vec![BigInt::from(q), BigInt::from(s), BigInt::one()];
            if divides(&f, p) {
                out.push(f);
            }
        }
    }
    out
}

fn brute_is_irreducible_quartic(p: &Poly) -> bool {
    small_monic_factors(p).is_empty()
}

/// Irreducible monic factors of a monic quartic with multiplicity.
fn brute_factor_quartic(p: &Poly) -> Vec<Poly> {
    let mut rest = p.clone();
    let mut out = vec![];
    'outer: while rest.len() > 2 {
        let mut fs = small_monic_factors(&rest);
        fs.sort_by_key(|f| f.len());
        for f in fs {
            if f.len() == 3 && !small_monic_factors(&f).is_empty() {
                continue;
            }
            let mut q = vec![BigInt::zero(); rest.len() - f.len() + 1];
            let mut r = rest.clone();
            for k in (0..q.len()).rev() {
                let lead = r[k + f.len() - 1].clone();
                q[k] = lead.clone();
                for (i, c) in f.iter().enumerate() {
                    r[k + i] -= &lead * c;
                }
            }
            out.push(f);
            rest = trim(q);
            continue 'outer;
        }
        break;
    }
    if rest.len() > 1 {
        out.push(rest);
    }
    out
}

/// Divides `t^n - 1` for some `n <= 12`; enough for degree at most 4.
fn brute_is_cyclotomic(f: &Poly) -> bool {
    (1..=12).any(|n| {
        let mut tn = vec![BigInt::zero(); n + 1];
        tn[0] = BigInt::from(-1);
        tn[n] = BigInt::one();
        divides(f, &tn)
    })
}

fn j_form(g: usize) -> SymplecticMatrix {
    SymplecticMatrix::standard_form(g)
}

#[test]
fn matrix_examples() {
    let gs = humphries(2);
    assert!(gs.matrix(&MappingClassWord::identity()).is_identity());
    let w = gs.parse_word("T1 T2^-1 T4 T5 T3").unwrap();
    assert!(gs.matrix(&w.concat(&w.inverse())).is_identity());
    let iota = gs.parse_word("T1 T2 T3 T4 T5 T5 T4 T3 T2 T1").unwrap();
    assert!(gs.matrix(&iota).is_negative_identity());
    // The sixth power of the chain word acts trivially on homology.
    assert!(gs.matrix(&gs.parse_word("T1 T2 T3 T4 T5").unwrap().pow(6)).is_identity());
    assert_eq!(word_to_matrix(&w, &gs), gs.matrix(&w));
}

#[test]
fn transvections_from_the_table() {
    let s = make_surface(2, 0).unwrap();
    let c1 = CurveId { family: CurveFamily::Chain, index: 0 };
    let t = transvection_matrix(&s, c1).unwrap();
    assert!(t.is_symplectic());
    let moved: Vec<usize> = (0..4)
        .filter(|&e| {
            let mut v = vec![BigInt::zero(); 4];
            v[e] = BigInt::one();
            t.apply(&v) != v
        })
        .collect();
    assert_eq!(moved.len(), 1);
    let sep = CurveId { family: CurveFamily::Separating, index: 0 };
    assert!(transvection_matrix(&s, sep).unwrap().is_identity());
}

#[test]
fn char_poly_examples() {
    let i = SymplecticMatrix::identity(2);
    assert_eq!(char_poly(&i), IntPolynomial::from_i64(&[1, -4, 6, -4, 1]));
    let neg = SymplecticMatrix::from_rows(i.rows().iter().map(|r| r.iter().map(|x| -x).collect()).collect());
    assert_eq!(char_poly(&neg), IntPolynomial::from_i64(&[1, 4, 6, 4, 1]));
}

#[test]
fn subtest_examples() {
    let golden = IntPolynomial::from_i64(&[-1, -1, 1]);
    assert!(is_irreducible(&golden));
    assert!(!is_irreducible(&IntPolynomial::from_i64(&[1, -2, 1])));
    assert!(is_cyclotomic(&IntPolynomial::from_i64(&[1, 1, 1])));
    assert!(!is_cyclotomic(&golden));
    let t4p1 = IntPolynomial::from_i64(&[1, 0, 0, 0, 1]);
    assert!(is_cyclotomic(&t4p1));
    assert!(IntPolynomial::t_pow_minus_one(8).exact_div(&t4p1).is_some());
    assert_eq!(power_substitution(&IntPolynomial::from_i64(&[1, 0, 3, 0, 1])), Some(2));
    assert_eq!(power_substitution(&golden), None);
}

#[test]
fn certificate_examples() {
    let gs = humphries(2);
    let c = casson_bleiler_certificate(&MappingClassWord::identity(), &gs);
    assert_eq!(c.verdict, CertificateVerdict::Inconclusive);
    assert_eq!(c.failed, Some(FailedSubtest::Reducible));
    let tor = torelli_generators(&make_surface(3, 0).unwrap(), 4).unwrap();
    let w = tor.parse_word("BP1 BP2^-1 BP3").unwrap();
    assert!(!casson_bleiler_certificate(&w, &tor).is_certified());
    // T1 T2^-1 stabilised: the verdict follows from the polynomial itself.
    for k in 1..5 {
        let w = gs.parse_word("T1 T2^-1").unwrap().pow(k);
        let q = char_poly(&gs.matrix(&w));
        let expect = is_irreducible(&q) && !is_cyclotomic(&q) && power_substitution(&q).is_none();
        assert_eq!(casson_bleiler_certificate(&w, &gs).is_certified(), expect);
        // T1 T2^-1 lives on a torus with one hole, so two eigenvalues are 1.
        assert!(!expect);
    }
}

#[test]
fn irreducibility_matches_brute_force_on_palindromic_quartics() {
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
    let mut seen = std::collections::HashSet::new();
    while seen.len() < 100 {
        let a: i64 = rng.gen_range(-8..=8);
        let b: i64 = rng.gen_range(-12..=12);
        if !seen.insert((a, b)) {
            continue;
        }
        let coeffs = [1, a, b, a, 1];
        let p: Poly = coeffs.iter().map(|&c| BigInt::from(c)).collect();
        assert_eq!(is_irreducible(&IntPolynomial::from_i64(&coeffs)), brute_is_irreducible_quartic(&p), "{coeffs:?}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(50))]

    #[test]
    fn char_poly_matches_minor_expansion(w in arb_word(5, 12)) {
        let gs = humphries(2);
        let m = gs.matrix(&w);
        prop_assert_eq!(char_poly(&m).coeffs().to_vec(), char_poly_oracle(&m));
    }

    #[test]
    fn genus_three_char_poly_matches_minor_expansion(w in arb_word(7, 8)) {
        let gs = humphries(3);
        let m = gs.matrix(&w);
        prop_assert_eq!(char_poly(&m).coeffs().to_vec(), char_poly_oracle(&m));
    }

    #[test]
    fn matrices_are_symplectic(w in arb_word(7, 20)) {
        let gs = humphries(3);
        let m = gs.matrix(&w);
        prop_assert!(m.is_symplectic());
        let j = j_form(3);
        prop_assert_eq!(m.transpose().mul(&j).mul(&m), j);
    }

    #[test]
    fn the_representation_is_a_homomorphism(u in arb_word(5, 10), v in arb_word(5, 10)) {
        let gs = humphries(2);
        prop_assert_eq!(gs.matrix(&u.concat(&v)), gs.matrix(&u).mul(&gs.matrix(&v)));
        prop_assert!(gs.matrix(&u.concat(&u.inverse())).is_identity());
    }

    #[test]
    fn char_polys_are_reciprocal(w in arb_word(5, 16)) {
        let gs = humphries(2);
        let q = char_poly(&gs.matrix(&w));
        prop_assert!(q.is_monic());
        let c = q.coeffs().to_vec();
        let mut r = c.clone();
        r.reverse();
        let neg: Vec<BigInt> = r.iter().map(|x| -x).collect();
        prop_assert!(c == r || c == neg);
        prop_assert!(q.is_reciprocal_up_to_sign());
    }

    #[test]
    fn certificates_never_hide_roots_of_unity(w in arb_word(5, 12)) {
        let gs = humphries(2);
        let cert = casson_bleiler_certificate(&w, &gs);
        let q = char_poly_oracle(&gs.matrix(&w));
        let factors = brute_factor_quartic(&q);
        let rebuilt = factors.iter().fold(vec![BigInt::one()], |acc, f| pmul(&acc, f));
        prop_assert_eq!(&rebuilt, &q);
        if factors.iter().any(brute_is_cyclotomic) {
            prop_assert!(!cert.is_certified());
        }
        if cert.is_certified() {
            prop_assert_eq!(factors.len(), 1);
        }
    }
}

#[test]
fn relations_hold_on_homology() {
    for g in [2, 3] {
        let gs = humphries(g);
        let n = gs.len();
        let im = gs.intersection_matrix().to_vec();
        for a in 0..n {
            for b in a + 1..n {
                let ta = MappingClassWord::power(a, 1);
                let tb = MappingClassWord::power(b, 1);
                match im[a][b] {
                    0 => assert_eq!(gs.matrix(&ta.concat(&tb)), gs.matrix(&tb.concat(&ta))),
                    1 => assert_eq!(gs.matrix(&ta.concat(&tb).concat(&ta)), gs.matrix(&tb.concat(&ta).concat(&tb))),
                    _ => unreachable!(),
                }
            }
        }
    }
}
