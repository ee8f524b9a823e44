//! Irreducibility over the rationals for monic integer polynomials.
//!
//! Factor degrees modulo several small primes often rule out every proper
//! factor degree at once. Otherwise the factorisation modulo one prime is
//! Hensel-lifted past twice the Mignotte bound and all subsets of the lifted
//! factors are tried as true integer divisors (Zassenhaus).

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::IntPolynomial;

const PRIMES: [u64; 24] = [3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71, 73, 79, 83, 89, 97];

/// Polynomials over `F_p`, ascending, trimmed.
type Fp = Vec<u64>;

fn trim(mut a: Fp) -> Fp {
    while a.last() == Some(&0) {
        a.pop();
    }
    a
}

fn reduce(q: &IntPolynomial, p: u64) -> Fp {
    let pb = BigInt::from(p);
    trim(q.coeffs().iter().map(|c| c.mod_floor(&pb).to_u64().unwrap()).collect())
}

fn inv_mod(a: u64, p: u64) -> u64 {
    pow_mod(a, p - 2, p)
}

fn pow_mod(mut a: u64, mut e: u64, p: u64) -> u64 {
    let mut r = 1;
    a %= p;
    while e > 0 {
        if e & 1 == 1 {
            r = r * a % p;
        }
        a = a * a % p;
        e >>= 1;
    }
    r
}

fn fp_mul(a: &Fp, b: &Fp, p: u64) -> Fp {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut c = vec![0; a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            c[i + j] = (c[i + j] + x * y) % p;
        }
    }
    trim(c)
}

fn fp_sub(a: &Fp, b: &Fp, p: u64) -> Fp {
    let n = a.len().max(b.len());
    trim((0..n).map(|i| (a.get(i).copied().unwrap_or(0) + p - b.get(i).copied().unwrap_or(0)) % p).collect())
}

fn fp_divrem(a: &Fp, b: &Fp, p: u64) -> (Fp, Fp) {
    let mut r = a.clone();
    if r.len() < b.len() {
        return (Vec::new(), r);
    }
    let inv = inv_mod(*b.last().unwrap(), p);
    let mut q = vec![0; r.len() - b.len() + 1];
    for k in (0..q.len()).rev() {
        let coef = r[k + b.len() - 1] * inv % p;
        q[k] = coef;
        if coef == 0 {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            r[k + j] = (r[k + j] + p - coef * y % p) % p;
        }
    }
    (trim(q), trim(r))
}

fn fp_monic(a: Fp, p: u64) -> Fp {
    match a.last() {
        None => a,
        Some(&l) => {
            let inv = inv_mod(l, p);
            a.into_iter().map(|x| x * inv % p).collect()
        }
    }
}

fn fp_gcd(a: &Fp, b: &Fp, p: u64) -> Fp {
    let (mut a, mut b) = (a.clone(), b.clone());
    while !b.is_empty() {
        let (_, r) = fp_divrem(&a, &b, p);
        a = b;
        b = r;
    }
    fp_monic(a, p)
}

/// Returns `(g, s, t)` with `s a + t b = g` monic.
fn fp_xgcd(a: &Fp, b: &Fp, p: u64) -> (Fp, Fp, Fp) {
    let (mut r0, mut r1) = (a.clone(), b.clone());
    let (mut s0, mut s1) = (vec![1], Vec::new());
    let (mut t0, mut t1) = (Vec::new(), vec![1]);
    while !r1.is_empty() {
        let (q, r) = fp_divrem(&r0, &r1, p);
        let s2 = fp_sub(&s0, &fp_mul(&q, &s1, p), p);
        let t2 = fp_sub(&t0, &fp_mul(&q, &t1, p), p);
        r0 = std::mem::replace(&mut r1, r);
        s0 = std::mem::replace(&mut s1, s2);
        t0 = std::mem::replace(&mut t1, t2);
    }
    let inv = inv_mod(*r0.last().unwrap(), p);
    let scale = |v: Fp| trim(v.into_iter().map(|x| x * inv % p).collect());
    (scale(r0), scale(s0), scale(t0))
}

fn fp_powmod(base: &Fp, mut e: u128, m: &Fp, p: u64) -> Fp {
    let mut result: Fp = vec![1];
    let mut b = fp_divrem(base, m, p).1;
    while e > 0 {
        if e & 1 == 1 {
            result = fp_divrem(&fp_mul(&result, &b, p), m, p).1;
        }
        b = fp_divrem(&fp_mul(&b, &b, p), m, p).1;
        e >>= 1;
    }
    result
}

fn fp_derivative(a: &Fp, p: u64) -> Fp {
    trim(a.iter().enumerate().skip(1).map(|(i, c)| (i as u64 % p) * c % p).collect())
}

/// Distinct-degree factorisation of a monic squarefree polynomial: pairs
/// `(d, product of all irreducible factors of degree d)`.
fn distinct_degree(f: &Fp, p: u64) -> Vec<(usize, Fp)> {
    let mut out = Vec::new();
    let mut rest = f.clone();
    let x: Fp = vec![0, 1];
    let mut h = x.clone();
    let mut d = 0;
    while rest.len() > 1 {
        d += 1;
        if 2 * d > rest.len() - 1 {
            let deg = rest.len() - 1;
            out.push((deg, rest));
            break;
        }
        h = fp_powmod(&h, p as u128, &rest, p);
        let g = fp_gcd(&rest, &fp_sub(&h, &x, p), p);
        if g.len() > 1 {
            out.push((d, g.clone()));
            rest = fp_divrem(&rest, &g, p).0;
            h = fp_divrem(&h, &rest, p).1;
        }
    }
    out
}

/// Splits a product of irreducibles of degree `d` (Cantor–Zassenhaus).
fn equal_degree(f: &Fp, d: usize, p: u64, rng: &mut ChaCha8Rng) -> Vec<Fp> {
    let n = f.len() - 1;
    if n == d {
        return vec![f.clone()];
    }
    let e = ((p as u128).pow(d as u32) - 1) / 2;
    loop {
        let a: Fp = trim((0..n).map(|_| rng.gen_range(0..p)).collect());
        if a.len() < 2 {
            continue;
        }
        let mut b = fp_powmod(&a, e, f, p);
        b = fp_sub(&b, &vec![1], p);
        let g = fp_gcd(f, &b, p);
        if g.len() > 1 && g.len() < f.len() {
            let other = fp_monic(fp_divrem(f, &g, p).0, p);
            let mut out = equal_degree(&g, d, p, rng);
            out.extend(equal_degree(&other, d, p, rng));
            return out;
        }
    }
}

fn factor_squarefree_mod(f: &Fp, p: u64) -> Vec<Fp> {
    let mut rng = ChaCha8Rng::seed_from_u64(p);
    let mut out = Vec::new();
    for (d, g) in distinct_degree(f, p) {
        out.extend(equal_degree(&g, d, p, &mut rng));
    }
    out
}

fn squarefree_mod(f: &Fp, p: u64) -> bool {
    fp_gcd(f, &fp_derivative(f, p), p).len() == 1
}

/// Degrees of the irreducible factors of `q` modulo `p`, or `None` when `q`
/// is not squarefree modulo `p`.
pub fn factor_mod_prime_degrees(q: &IntPolynomial, p: u64) -> Option<Vec<usize>> {
    let f = reduce(q, p);
    if f.len() != q.degree() + 1 || !squarefree_mod(&f, p) {
        return None;
    }
    let mut degs: Vec<usize> = distinct_degree(&f, p).into_iter().flat_map(|(d, g)| std::iter::repeat(d).take((g.len() - 1) / d)).collect();
    degs.sort_unstable();
    Some(degs)
}

fn subset_sums(degs: &[usize], n: usize) -> Vec<bool> {
    let mut reach = vec![false; n + 1];
    reach[0] = true;
    for &d in degs {
        for s in (d..=n).rev() {
            if reach[s - d] {
                reach[s] = true;
            }
        }
    }
    reach
}

fn symmetric_mod(x: &BigInt, m: &BigInt) -> BigInt {
    let r = x.mod_floor(m);
    if &r * 2 > *m {
        r - m
    } else {
        r
    }
}

/// Lifts `f = g h mod p` (monic `f`, `g`, `h`, coprime mod `p`) to mod `p^k`.
fn hensel_pair(f: &[BigInt], g: &Fp, h: &Fp, p: u64, k: u32) -> (Vec<BigInt>, Vec<BigInt>) {
    let (_, s, t) = fp_xgcd(g, h, p);
    let pb = BigInt::from(p);
    let mut gl: Vec<BigInt> = g.iter().map(|&x| BigInt::from(x)).collect();
    let mut hl: Vec<BigInt> = h.iter().map(|&x| BigInt::from(x)).collect();
    let mut pj = pb.clone();
    for _ in 1..k {
        // e = (f - g h) / p^j mod p
        let prod = big_mul(&gl, &hl);
        let mut e: Fp = Vec::with_capacity(f.len());
        for i in 0..f.len() {
            let diff = &f[i] - prod.get(i).cloned().unwrap_or_default();
            let (q, r) = diff.div_rem(&pj);
            debug_assert!(r.is_zero());
            e.push(q.mod_floor(&pb).to_u64().unwrap());
        }
        let e = trim(e);
        let tau = fp_divrem(&fp_mul(&t, &e, p), g, p).1;
        let sigma = fp_divrem(&fp_sub(&e, &fp_mul(&tau, h, p), p), g, p).0;
        // e - tau h is divisible by g modulo p: (s e) g + (t e) h = e.
        for (i, c) in tau.iter().enumerate() {
            gl[i] += &pj * c;
        }
        for (i, c) in sigma.iter().enumerate() {
            hl[i] += &pj * c;
        }
        pj *= &pb;
    }
    let _ = s;
    (gl, hl)
}

fn big_mul(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut c = vec![BigInt::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            c[i + j] += x * y;
        }
    }
    c
}

/// Lifts a full modular factorisation of monic `f` to `p^k`.
fn hensel_lift(f: &IntPolynomial, factors: &[Fp], p: u64, k: u32) -> Vec<Vec<BigInt>> {
    let pk = BigInt::from(p).pow(k);
    let mut out = Vec::new();
    let mut target: Vec<BigInt> = f.coeffs().to_vec();
    for i in 0..factors.len() {
        if i + 1 == factors.len() {
            out.push(target.iter().map(|c| c.mod_floor(&pk)).collect());
            break;
        }
        let g = &factors[i];
        let h = factors[i + 1..].iter().fold(vec![1u64], |acc, x| fp_mul(&acc, x, p));
        let (gl, hl) = hensel_pair(&target, g, &h, p, k);
        out.push(gl.iter().map(|c| c.mod_floor(&pk)).collect());
        target = hl.iter().map(|c| c.mod_floor(&pk)).collect();
    }
    out
}

/// Bound on the coefficients of any integer factor of `q` (Mignotte):
/// `2^n * ||q||_2`, rounded up through the sum of absolute values.
fn mignotte_bound(q: &IntPolynomial) -> BigInt {
    let l1: BigInt = q.coeffs().iter().map(|c| c.abs()).sum();
    l1 << q.degree()
}

/// True iff the monic polynomial `q` of degree at least one is irreducible
/// over the rationals.
pub fn is_irreducible(q: &IntPolynomial) -> bool {
    assert!(q.is_monic() && q.degree() >= 1, "expects a monic polynomial of positive degree");
    let n = q.degree();
    if n == 1 {
        return true;
    }
    if q.gcd(&q.derivative()).degree() > 0 {
        return false;
    }
    let mut possible = vec![true; n + 1];
    let mut best: Option<(u64, Vec<Fp>)> = None;
    let mut primes_used = 0;
    for &p in PRIMES.iter() {
        let f = reduce(q, p);
        if f.len() != n + 1 || !squarefree_mod(&f, p) {
            continue;
        }
        let factors = factor_squarefree_mod(&f, p);
        if factors.len() == 1 {
            return true;
        }
        let degs: Vec<usize> = factors.iter().map(|x| x.len() - 1).collect();
        let reach = subset_sums(&degs, n);
        for d in 1..n {
            possible[d] &= reach[d];
        }
        if (1..n).all(|d| !possible[d]) {
            return true;
        }
        if best.as_ref().map_or(true, |(_, b)| factors.len() < b.len()) {
            best = Some((p, factors));
        }
        primes_used += 1;
        if primes_used >= 6 {
            break;
        }
    }
    let (p, factors) = best.expect("some small prime keeps a squarefree polynomial squarefree");
    let bound = mignotte_bound(q) * 2;
    let mut k = 1u32;
    let pb = BigInt::from(p);
    while pb.pow(k) <= bound {
        k += 1;
    }
    let pk = pb.pow(k);
    let lifted = hensel_lift(q, &factors, p, k);
    let r = lifted.len();
    // Any proper factor or its cofactor uses at most half of the pieces.
    for size in 1..=r / 2 {
        let mut idx: Vec<usize> = (0..size).collect();
        loop {
            let deg: usize = idx.iter().map(|&i| lifted[i].len() - 1).sum();
            if deg >= 1 && deg < n && possible[deg] {
                let mut prod = vec![BigInt::one()];
                for &i in &idx {
                    prod = big_mul(&prod, &lifted[i]).iter().map(|c| c.mod_floor(&pk)).collect();
                }
                let cand = IntPolynomial::new(prod.iter().map(|c| symmetric_mod(c, &pk)).collect());
                if q.exact_div(&cand).is_some() {
                    return false;
                }
            }
            if !next_combination(&mut idx, r) {
                break;
            }
        }
    }
    true
}

fn next_combination(idx: &mut [usize], n: usize) -> bool {
    let k = idx.len();
    for i in (0..k).rev() {
        if idx[i] < n - k + i {
            idx[i] += 1;
            for j in i + 1..k {
                idx[j] = idx[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(c: &[i64]) -> IntPolynomial {
        IntPolynomial::from_i64(c)
    }

    #[test]
    fn small_examples() {
        assert!(is_irreducible(&p(&[-1, -1, 1])));
        assert!(!is_irreducible(&p(&[1, -2, 1])));
        assert!(is_irreducible(&p(&[1, 0, 0, 0, 1])));
        // (t^2 - 3t + 1)(t^2 + t + 1)
        assert!(!is_irreducible(&p(&[1, -3, 1]).mul(&p(&[1, 1, 1]))));
    }

    #[test]
    fn swinnerton_dyer_needs_recombination() {
        // t^4 - 10 t^2 + 1 is irreducible but splits modulo every prime.
        let sd = p(&[1, 0, -10, 0, 1]);
        assert!(is_irreducible(&sd));
        assert!(!is_irreducible(&sd.mul(&p(&[-2, 0, 0, 0, 1]))));
    }

    #[test]
    fn large_coefficient_factor_is_found() {
        let a = IntPolynomial::new(vec![BigInt::from(7).pow(40), BigInt::from(-3) * BigInt::from(10).pow(30), BigInt::one()]);
        let b = p(&[1, -5, 1, 1]);
        assert!(!is_irreducible(&a.mul(&b)));
        assert!(is_irreducible(&b));
    }

    #[test]
    fn modular_degrees() {
        assert_eq!(factor_mod_prime_degrees(&p(&[-1, -1, 1]), 11), Some(vec![1, 1]));
        assert_eq!(factor_mod_prime_degrees(&p(&[-1, -1, 1]), 7), Some(vec![2]));
    }
}
