//! Integer polynomials and the characteristic polynomial.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::SymplecticMatrix;

/// Coefficients in ascending order of degree, without trailing zeros.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct IntPolynomial {
    coeffs: Vec<BigInt>,
}

impl IntPolynomial {
    pub fn new(mut coeffs: Vec<BigInt>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        IntPolynomial { coeffs }
    }

    pub fn from_i64(coeffs: &[i64]) -> Self {
        Self::new(coeffs.iter().map(|&c| BigInt::from(c)).collect())
    }

    pub fn zero() -> Self {
        IntPolynomial { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Self::from_i64(&[1])
    }

    /// `t^n - 1`.
    pub fn t_pow_minus_one(n: usize) -> Self {
        let mut c = vec![BigInt::zero(); n + 1];
        c[0] = -BigInt::one();
        c[n] = BigInt::one();
        IntPolynomial { coeffs: c }
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, with the zero polynomial given degree 0.
    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn leading(&self) -> BigInt {
        self.coeffs.last().cloned().unwrap_or_default()
    }

    pub fn is_monic(&self) -> bool {
        self.coeffs.last().is_some_and(|c| c.is_one())
    }

    pub fn mul(&self, other: &IntPolynomial) -> IntPolynomial {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        let mut c = vec![BigInt::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                c[i + j] += a * b;
            }
        }
        Self::new(c)
    }

    pub fn sub(&self, other: &IntPolynomial) -> IntPolynomial {
        let n = self.coeffs.len().max(other.coeffs.len());
        let c = (0..n)
            .map(|i| self.coeffs.get(i).cloned().unwrap_or_default() - other.coeffs.get(i).cloned().unwrap_or_default())
            .collect();
        Self::new(c)
    }

    pub fn derivative(&self) -> IntPolynomial {
        Self::new(self.coeffs.iter().enumerate().skip(1).map(|(i, c)| c * BigInt::from(i)).collect())
    }

    /// Exact quotient and remainder by a monic divisor.
    pub fn div_rem_monic(&self, d: &IntPolynomial) -> (IntPolynomial, IntPolynomial) {
        assert!(d.is_monic(), "divisor must be monic");
        let mut r = self.coeffs.clone();
        let dd = d.degree();
        if r.len() <= dd {
            return (Self::zero(), self.clone());
        }
        let mut q = vec![BigInt::zero(); r.len() - dd];
        for k in (0..q.len()).rev() {
            let lead = r[k + dd].clone();
            if lead.is_zero() {
                continue;
            }
            for (j, c) in d.coeffs.iter().enumerate() {
                r[k + j] -= &lead * c;
            }
            q[k] = lead;
        }
        (Self::new(q), Self::new(r))
    }

    /// Quotient over the integers when `d` divides `self` exactly.
    pub fn exact_div(&self, d: &IntPolynomial) -> Option<IntPolynomial> {
        if d.is_zero() {
            return None;
        }
        if self.is_zero() {
            return Some(Self::zero());
        }
        let dd = d.degree();
        if self.degree() < dd {
            return None;
        }
        let lead = d.leading();
        let mut r = self.coeffs.clone();
        let mut q = vec![BigInt::zero(); r.len() - dd];
        for k in (0..q.len()).rev() {
            let (quo, rem) = r[k + dd].div_rem(&lead);
            if !rem.is_zero() {
                return None;
            }
            if quo.is_zero() {
                continue;
            }
            for (j, c) in d.coeffs.iter().enumerate() {
                r[k + j] -= &quo * c;
            }
            q[k] = quo;
        }
        r.iter().all(|c| c.is_zero()).then(|| Self::new(q))
    }

    pub fn content(&self) -> BigInt {
        self.coeffs.iter().fold(BigInt::zero(), |g, c| g.gcd(c))
    }

    pub fn primitive_part(&self) -> IntPolynomial {
        let c = self.content();
        if c.is_zero() {
            return Self::zero();
        }
        let sign = if self.leading().is_negative() { -BigInt::one() } else { BigInt::one() };
        Self::new(self.coeffs.iter().map(|x| x / &c * &sign).collect())
    }

    /// Primitive gcd over the rationals, normalised to positive leading
    /// coefficient, by primitive pseudo-remainder sequences.
    pub fn gcd(&self, other: &IntPolynomial) -> IntPolynomial {
        let mut a = self.primitive_part();
        let mut b = other.primitive_part();
        if a.degree() < b.degree() {
            std::mem::swap(&mut a, &mut b);
        }
        while !b.is_zero() {
            let r = a.pseudo_rem(&b).primitive_part();
            a = b;
            b = r;
        }
        a
    }

    fn pseudo_rem(&self, d: &IntPolynomial) -> IntPolynomial {
        let mut r = self.coeffs.clone();
        let dd = d.degree();
        let lead = d.leading();
        while r.len() > dd && !r.is_empty() {
            let top = r.last().unwrap().clone();
            let shift = r.len() - 1 - dd;
            for x in r.iter_mut() {
                *x *= &lead;
            }
            for (j, c) in d.coeffs.iter().enumerate() {
                r[shift + j] -= &top * c;
            }
            while r.last().is_some_and(|c| c.is_zero()) {
                r.pop();
            }
        }
        Self::new(r)
    }

    /// Coefficients equal their reverse up to one global sign.
    pub fn is_reciprocal_up_to_sign(&self) -> bool {
        let rev: Vec<BigInt> = self.coeffs.iter().rev().cloned().collect();
        let neg: Vec<BigInt> = rev.iter().map(|c| -c).collect();
        rev == self.coeffs || neg == self.coeffs
    }

    pub fn max_abs_coeff(&self) -> BigInt {
        self.coeffs.iter().map(|c| c.abs()).max().unwrap_or_default()
    }

    /// Ascending decimal coefficients with a one-line header.
    pub fn to_text(&self) -> String {
        let line: Vec<String> = self.coeffs.iter().map(|c| c.to_string()).collect();
        format!("# int-polynomial v1 degree={} ascending\n{}\n", self.degree(), line.join(" "))
    }

    pub fn from_text(text: &str) -> Option<Self> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        lines.next()?.strip_prefix("# int-polynomial v1")?;
        let body = lines.next().unwrap_or("");
        let c: Result<Vec<BigInt>, _> = body.split_whitespace().map(|t| t.parse::<BigInt>()).collect();
        c.ok().map(Self::new)
    }
}

impl fmt::Display for IntPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let mag = c.abs();
            if first {
                if c.is_negative() {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if c.is_negative() { "-" } else { "+" })?;
            }
            first = false;
            let show = !mag.is_one() || i == 0;
            if show {
                write!(f, "{mag}")?;
            }
            match i {
                0 => {}
                1 => write!(f, "t")?,
                _ => write!(f, "t^{i}")?,
            }
        }
        Ok(())
    }
}

/// `det(tI - M)` by the division-free Samuelson–Berkowitz recurrence.
pub fn char_poly(m: &SymplecticMatrix) -> IntPolynomial {
    let n = m.dim();
    // c[j] is the coefficient of t^{r-j} in det(tI - A_r).
    let mut c: Vec<BigInt> = vec![BigInt::one()];
    for r in 0..n {
        let a = m.get(r, r).clone();
        // m_k = R A_r^k C for the new row R and column C.
        let mut col: Vec<BigInt> = (0..r).map(|i| m.get(i, r).clone()).collect();
        let mut moments = Vec::with_capacity(r);
        for _ in 0..r {
            let mk: BigInt = (0..r).map(|j| m.get(r, j) * &col[j]).sum();
            moments.push(mk);
            col = (0..r).map(|i| (0..r).map(|j| m.get(i, j) * &col[j]).sum()).collect();
        }
        let mut next = vec![BigInt::zero(); r + 2];
        for j in 0..=r + 1 {
            let mut v = BigInt::zero();
            if j <= r {
                v += &c[j];
            }
            if j >= 1 && j - 1 <= r {
                v -= &a * &c[j - 1];
            }
            if j >= 2 {
                let k = j - 2;
                for i in 0..=k.min(r) {
                    if k - i < moments.len() {
                        v -= &c[i] * &moments[k - i];
                    }
                }
            }
            next[j] = v;
        }
        c = next;
    }
    c.reverse();
    IntPolynomial::new(c)
}

fn euler_phi(mut n: u64) -> u64 {
    let mut result = n;
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            while n % p == 0 {
                n /= p;
            }
            result -= result / p;
        }
        p += 1;
    }
    if n > 1 {
        result -= result / n;
    }
    result
}

/// All `n` with `φ(n) <= d`. Since `φ(n) >= sqrt(n / 2)`, `n <= 2 d^2` suffices.
pub(crate) fn phi_bounded(d: usize) -> Vec<u64> {
    let limit = (2 * d * d).max(2) as u64;
    (1..=limit).filter(|&n| euler_phi(n) as usize <= d).collect()
}

/// True when `q` divides `t^n - 1` for some `n` with `φ(n) <= deg q`.
pub fn is_cyclotomic(q: &IntPolynomial) -> bool {
    if !q.is_monic() || q.degree() == 0 {
        return false;
    }
    phi_bounded(q.degree()).into_iter().any(|n| {
        let (_, r) = IntPolynomial::t_pow_minus_one(n as usize).div_rem_monic(q);
        r.is_zero()
    })
}

/// The gcd `k >= 2` of the exponents carrying nonzero coefficients, if any.
pub fn power_substitution(q: &IntPolynomial) -> Option<u32> {
    let g = q.coeffs().iter().enumerate().filter(|(_, c)| !c.is_zero()).fold(0usize, |g, (i, _)| g.gcd(&i));
    (g >= 2).then_some(g as u32)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(c: &[i64]) -> IntPolynomial {
        IntPolynomial::from_i64(c)
    }

    #[test]
    fn char_poly_of_identity_and_negative() {
        let id = SymplecticMatrix::identity(2);
        assert_eq!(char_poly(&id), p(&[1, -4, 6, -4, 1]));
        let neg = SymplecticMatrix::from_rows(id.rows().into_iter().map(|r| r.into_iter().map(|x| -x).collect()).collect());
        assert_eq!(char_poly(&neg), p(&[1, 4, 6, 4, 1]));
    }

    #[test]
    fn char_poly_of_a_two_by_two() {
        let m = SymplecticMatrix::from_rows(vec![vec![2.into(), 1.into()], vec![1.into(), 1.into()]]);
        assert_eq!(char_poly(&m), p(&[1, -3, 1]));
    }

    #[test]
    fn cyclotomic_examples() {
        assert!(is_cyclotomic(&p(&[1, 1, 1])));
        assert!(!is_cyclotomic(&p(&[-1, -1, 1])));
        assert!(is_cyclotomic(&p(&[1, 0, 0, 0, 1])));
        assert!(!is_cyclotomic(&p(&[1, -2, 1])));
    }

    #[test]
    fn power_substitution_examples() {
        assert_eq!(power_substitution(&p(&[1, 0, 3, 0, 1])), Some(2));
        assert_eq!(power_substitution(&p(&[-1, -1, 1])), None);
        assert_eq!(power_substitution(&p(&[5, 0, 0, 2, 0, 0, 1])), Some(3));
    }

    #[test]
    fn gcd_and_division() {
        let a = p(&[-1, 0, 1]);
        let b = p(&[1, 2, 1]);
        assert_eq!(a.gcd(&b), p(&[1, 1]));
        let (q, r) = p(&[-1, 0, 0, 1]).div_rem_monic(&p(&[-1, 1]));
        assert_eq!(q, p(&[1, 1, 1]));
        assert!(r.is_zero());
        assert_eq!(p(&[2, 4]).exact_div(&p(&[1, 2])), Some(p(&[2])));
        assert_eq!(p(&[1, 2]).exact_div(&p(&[2, 4])), None);
    }

    #[test]
    fn display() {
        assert_eq!(p(&[-1, -1, 1]).to_string(), "t^2 - t - 1");
        assert_eq!(p(&[1, 0, 0, 0, 1]).to_string(), "t^4 + 1");
    }
}
