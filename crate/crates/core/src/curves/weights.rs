//! Nonnegative integer weight vectors with an `i64` fast path.
//!
//! Weights start small and are promoted to `BigInt` the first time a checked
//! operation overflows, so no value is ever truncated.

use std::cmp::Ordering;
use std::fmt;
use std::hash::{Hash, Hasher};

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};

#[derive(Clone, Debug)]
pub enum Weights {
    Small(Vec<i64>),
    Big(Vec<BigInt>),
}

impl Weights {
    pub fn from_small(v: Vec<i64>) -> Self {
        Weights::Small(v)
    }

    pub fn zeros(n: usize) -> Self {
        Weights::Small(vec![0; n])
    }

    pub fn len(&self) -> usize {
        match self {
            Weights::Small(v) => v.len(),
            Weights::Big(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn get(&self, i: usize) -> BigInt {
        match self {
            Weights::Small(v) => BigInt::from(v[i]),
            Weights::Big(v) => v[i].clone(),
        }
    }

    pub fn get_small(&self, i: usize) -> Option<i64> {
        match self {
            Weights::Small(v) => Some(v[i]),
            Weights::Big(v) => v[i].to_i64(),
        }
    }

    pub fn to_big(&self) -> Vec<BigInt> {
        match self {
            Weights::Small(v) => v.iter().map(|&x| BigInt::from(x)).collect(),
            Weights::Big(v) => v.clone(),
        }
    }

    fn promote(&mut self) {
        if let Weights::Small(v) = self {
            *self = Weights::Big(v.iter().map(|&x| BigInt::from(x)).collect());
        }
    }

    /// Demotes to the fast representation when every entry fits.
    pub fn compact(&mut self) {
        if let Weights::Big(v) = self {
            let small: Option<Vec<i64>> = v.iter().map(|x| x.to_i64()).collect();
            if let Some(s) = small {
                if s.iter().all(|x| x.checked_mul(4).is_some()) {
                    *self = Weights::Small(s);
                }
            }
        }
    }

    /// Replaces entry `e` by `max(x_a + x_c, x_b + x_d) - x_e`.
    pub fn flip(&mut self, e: usize, a: usize, b: usize, c: usize, d: usize) {
        if let Weights::Small(v) = self {
            let r = (|| {
                let s1 = v[a].checked_add(v[c])?;
                let s2 = v[b].checked_add(v[d])?;
                s1.max(s2).checked_sub(v[e])
            })();
            if let Some(x) = r {
                v[e] = x;
                return;
            }
            self.promote();
        }
        if let Weights::Big(v) = self {
            let s1 = &v[a] + &v[c];
            let s2 = &v[b] + &v[d];
            let m = if s1 >= s2 { s1 } else { s2 };
            v[e] = m - &v[e];
        }
    }

    /// `y[i] = x[perm[i]]`.
    pub fn permute(&mut self, perm: &[usize]) {
        match self {
            Weights::Small(v) => *v = perm.iter().map(|&p| v[p]).collect(),
            Weights::Big(v) => *v = perm.iter().map(|&p| v[p].clone()).collect(),
        }
    }

    pub fn total(&self) -> BigInt {
        match self {
            Weights::Small(v) => v.iter().map(|&x| BigInt::from(x)).sum(),
            Weights::Big(v) => v.iter().sum(),
        }
    }

    /// `|x_e - x_f|`.
    pub fn abs_diff(&self, e: usize, f: usize) -> BigInt {
        match self {
            Weights::Small(v) => (BigInt::from(v[e]) - BigInt::from(v[f])).abs(),
            Weights::Big(v) => (&v[e] - &v[f]).abs(),
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Weights::Small(v) => v.iter().all(|x| *x == 0),
            Weights::Big(v) => v.iter().all(|x| x.is_zero()),
        }
    }

    pub fn any_negative(&self) -> bool {
        match self {
            Weights::Small(v) => v.iter().any(|x| *x < 0),
            Weights::Big(v) => v.iter().any(|x| x.is_negative()),
        }
    }

    /// Bit length of the largest entry.
    pub fn max_bits(&self) -> u64 {
        match self {
            Weights::Small(v) => v.iter().map(|x| 64 - x.unsigned_abs().leading_zeros() as u64).max().unwrap_or(0),
            Weights::Big(v) => v.iter().map(|x| x.bits()).max().unwrap_or(0),
        }
    }
}

impl PartialEq for Weights {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (Weights::Small(a), Weights::Small(b)) => a == b,
            _ => self.len() == other.len() && (0..self.len()).all(|i| self.get(i) == other.get(i)),
        }
    }
}

impl Eq for Weights {}

impl Hash for Weights {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.len().hash(state);
        for i in 0..self.len() {
            match self.get_small(i) {
                Some(x) => x.hash(state),
                None => self.get(i).hash(state),
            }
        }
    }
}

impl Ord for Weights {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Weights::Small(a), Weights::Small(b)) => a.cmp(b),
            _ => {
                let n = self.len().min(other.len());
                for i in 0..n {
                    let c = self.get(i).cmp(&other.get(i));
                    if c != Ordering::Equal {
                        return c;
                    }
                }
                self.len().cmp(&other.len())
            }
        }
    }
}

impl PartialOrd for Weights {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Weights {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.len() {
            if i > 0 {
                write!(f, " ")?;
            }
            write!(f, "{}", self.get(i))?;
        }
        Ok(())
    }
}
