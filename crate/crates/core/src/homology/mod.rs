//! Exact homology action of mapping classes and the Casson–Bleiler test.
//!
//! Homology classes are integer vectors in the basis `(α_1..α_g, β_1..β_g)`
//! with `<α_i, β_i> = 1`, so the intersection form is `<x, y> = xᵀ J y` for
//! `J = [[0, I], [-I, 0]]`. The positive twist about `c` acts by the
//! transvection `x -> x + <x, c> c`. Matrices act on column vectors and a word
//! `s_1 ... s_n` maps to `M(s_1) ... M(s_n)`.

mod factor;
mod poly;

use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::curves::{CurveSystem, MappingClassWord};
use crate::surface::{CurveFamily, CurveId, GeneratorSet, Surface, SurfaceError};

pub use factor::{factor_mod_prime_degrees, is_irreducible};
pub use poly::{char_poly, is_cyclotomic, power_substitution, IntPolynomial};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum HomologyError {
    #[error("malformed matrix text: {0}")]
    Parse(String),
    #[error("dimension mismatch: {0} vs {1}")]
    Dimension(usize, usize),
}

/// A `2g x 2g` integer matrix, stored row-major.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SymplecticMatrix {
    dim: usize,
    entries: Vec<BigInt>,
}

impl SymplecticMatrix {
    pub fn identity(genus: usize) -> Self {
        let dim = 2 * genus;
        let mut entries = vec![BigInt::zero(); dim * dim];
        for i in 0..dim {
            entries[i * dim + i] = BigInt::one();
        }
        SymplecticMatrix { dim, entries }
    }

    /// Builds a matrix from rows without checking the symplectic condition.
    pub fn from_rows(rows: Vec<Vec<BigInt>>) -> Self {
        let dim = rows.len();
        assert!(dim % 2 == 0, "dimension must be even");
        assert!(rows.iter().all(|r| r.len() == dim), "matrix must be square");
        SymplecticMatrix { dim, entries: rows.into_iter().flatten().collect() }
    }

    pub fn standard_form(genus: usize) -> Self {
        let dim = 2 * genus;
        let mut entries = vec![BigInt::zero(); dim * dim];
        for i in 0..genus {
            entries[i * dim + genus + i] = BigInt::one();
            entries[(genus + i) * dim + i] = -BigInt::one();
        }
        SymplecticMatrix { dim, entries }
    }

    /// The transvection `x -> x + <x, c> c`, that is `I - c cᵀ J`.
    pub fn transvection(class: &[i64]) -> Self {
        Self::transvection_power(class, 1)
    }

    /// `x -> x + k <x, c> c`, the action of the k-th power of the twist.
    pub fn transvection_power(class: &[i64], k: i64) -> Self {
        let dim = class.len();
        assert!(dim % 2 == 0, "class must have even length");
        let g = dim / 2;
        let mut m = Self::identity(g);
        // (c cᵀ J)[i][j] = c_i (cᵀ J)_j; (cᵀ J)_j = -c_{j+g} for j < g, c_{j-g} otherwise.
        let cj: Vec<i64> = (0..dim).map(|j| if j < g { -class[j + g] } else { class[j - g] }).collect();
        for i in 0..dim {
            for j in 0..dim {
                let v = class[i] * cj[j] * k;
                if v != 0 {
                    m.entries[i * dim + j] -= v;
                }
            }
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn genus(&self) -> usize {
        self.dim / 2
    }

    pub fn get(&self, i: usize, j: usize) -> &BigInt {
        &self.entries[i * self.dim + j]
    }

    pub fn rows(&self) -> Vec<Vec<BigInt>> {
        self.entries.chunks(self.dim).map(|r| r.to_vec()).collect()
    }

    pub fn mul(&self, other: &SymplecticMatrix) -> SymplecticMatrix {
        assert_eq!(self.dim, other.dim, "dimension mismatch");
        let n = self.dim;
        let mut entries = vec![BigInt::zero(); n * n];
        for i in 0..n {
            for k in 0..n {
                let a = &self.entries[i * n + k];
                if a.is_zero() {
                    continue;
                }
                for j in 0..n {
                    let b = &other.entries[k * n + j];
                    if !b.is_zero() {
                        entries[i * n + j] += a * b;
                    }
                }
            }
        }
        SymplecticMatrix { dim: n, entries }
    }

    pub fn transpose(&self) -> SymplecticMatrix {
        let n = self.dim;
        let mut entries = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                entries.push(self.entries[j * n + i].clone());
            }
        }
        SymplecticMatrix { dim: n, entries }
    }

    /// Inverse of a symplectic matrix, `-J Mᵀ J`.
    pub fn symplectic_inverse(&self) -> SymplecticMatrix {
        let j = Self::standard_form(self.genus());
        let mut r = j.mul(&self.transpose()).mul(&j);
        r.entries.iter_mut().for_each(|x| *x = -&*x);
        r
    }

    pub fn pow(&self, mut k: u64) -> SymplecticMatrix {
        let mut base = self.clone();
        let mut acc = Self::identity(self.genus());
        while k > 0 {
            if k & 1 == 1 {
                acc = acc.mul(&base);
            }
            k >>= 1;
            if k > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    pub fn apply(&self, x: &[BigInt]) -> Vec<BigInt> {
        let n = self.dim;
        (0..n).map(|i| (0..n).map(|j| &self.entries[i * n + j] * &x[j]).sum()).collect()
    }

    /// `Mᵀ J M = J`.
    pub fn is_symplectic(&self) -> bool {
        let j = Self::standard_form(self.genus());
        self.transpose().mul(&j).mul(self) == j
    }

    pub fn is_identity(&self) -> bool {
        *self == Self::identity(self.genus())
    }

    pub fn is_negative_identity(&self) -> bool {
        let mut m = Self::identity(self.genus());
        m.entries.iter_mut().for_each(|x| *x = -&*x);
        *self == m
    }

    /// Decimal row-major text with a one-line header.
    pub fn to_text(&self) -> String {
        let mut s = format!("# symplectic-matrix v1 dim={}\n", self.dim);
        for row in self.entries.chunks(self.dim) {
            let line: Vec<String> = row.iter().map(|x| x.to_string()).collect();
            s.push_str(&line.join(" "));
            s.push('\n');
        }
        s
    }

    pub fn from_text(text: &str) -> Result<Self, HomologyError> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header = lines.next().ok_or_else(|| HomologyError::Parse("empty input".into()))?;
        let dim: usize = header
            .strip_prefix("# symplectic-matrix v1 dim=")
            .and_then(|d| d.trim().parse().ok())
            .ok_or_else(|| HomologyError::Parse(format!("bad header {header:?}")))?;
        let mut rows = Vec::new();
        for l in lines {
            let row: Result<Vec<BigInt>, _> = l.split_whitespace().map(|t| t.parse::<BigInt>()).collect();
            let row = row.map_err(|e| HomologyError::Parse(e.to_string()))?;
            if row.len() != dim {
                return Err(HomologyError::Dimension(row.len(), dim));
            }
            rows.push(row);
        }
        if rows.len() != dim || dim % 2 != 0 {
            return Err(HomologyError::Dimension(rows.len(), dim));
        }
        Ok(Self::from_rows(rows))
    }
}

impl fmt::Display for SymplecticMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, row) in self.entries.chunks(self.dim).enumerate() {
            if i > 0 {
                write!(f, "; ")?;
            }
            let line: Vec<String> = row.iter().map(|x| x.to_string()).collect();
            write!(f, "{}", line.join(" "))?;
        }
        Ok(())
    }
}

/// `<x, y> = xᵀ J y`.
pub fn symplectic_form(x: &[i64], y: &[i64]) -> i64 {
    let g = x.len() / 2;
    (0..g).map(|i| x[i] * y[g + i] - x[g + i] * y[i]).sum()
}

/// Outcome of the Casson–Bleiler test.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CertificateVerdict {
    CertifiedPA,
    Inconclusive,
}

/// Which subtest stopped the certificate.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FailedSubtest {
    Reducible,
    Cyclotomic,
    PowerSubstitution(u32),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HomologyCertificate {
    pub verdict: CertificateVerdict,
    pub char_poly: IntPolynomial,
    pub failed: Option<FailedSubtest>,
}

impl HomologyCertificate {
    pub fn is_certified(&self) -> bool {
        self.verdict == CertificateVerdict::CertifiedPA
    }
}

/// Irreducible, not cyclotomic, and not a polynomial in `t^k` for `k >= 2`.
pub fn casson_bleiler(m: &SymplecticMatrix) -> HomologyCertificate {
    let q = char_poly(m);
    let failed = if !is_irreducible(&q) {
        Some(FailedSubtest::Reducible)
    } else if is_cyclotomic(&q) {
        Some(FailedSubtest::Cyclotomic)
    } else {
        power_substitution(&q).map(FailedSubtest::PowerSubstitution)
    };
    let verdict = if failed.is_none() { CertificateVerdict::CertifiedPA } else { CertificateVerdict::Inconclusive };
    HomologyCertificate { verdict, char_poly: q, failed }
}

/// Transvection about a curated curve, from its tabulated homology class.
pub fn transvection_matrix(s: &Surface, c: CurveId) -> Result<SymplecticMatrix, SurfaceError> {
    if !s.has_full_support() {
        return Err(SurfaceError::Unsupported(s.genus(), s.punctures()));
    }
    let sys = CurveSystem::shared(s.genus() as usize)?;
    match c.family {
        CurveFamily::Chain if c.index < sys.chain().len() => Ok(SymplecticMatrix::transvection(sys.chain_homology(c.index))),
        CurveFamily::Separating => Ok(SymplecticMatrix::identity(sys.genus())),
        _ => Err(SurfaceError::Table(format!("no tabulated homology class for {} curve {}", c.family.name(), c.index + 1))),
    }
}

/// `M(s_1) ... M(s_n)` for `w = s_1 ... s_n`.
pub fn word_to_matrix(w: &MappingClassWord, gs: &GeneratorSet) -> SymplecticMatrix {
    gs.matrix(w)
}

pub fn casson_bleiler_certificate(w: &MappingClassWord, gs: &GeneratorSet) -> HomologyCertificate {
    casson_bleiler(&gs.matrix(w))
}
