//! Mapping classes as freely reduced words in signed generator references.

use std::fmt;

/// One generator or its inverse.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Letter {
    pub generator: u16,
    pub inverse: bool,
}

impl Letter {
    pub fn new(generator: usize, inverse: bool) -> Self {
        Letter { generator: generator as u16, inverse }
    }

    pub fn pos(generator: usize) -> Self {
        Self::new(generator, false)
    }

    pub fn neg(generator: usize) -> Self {
        Self::new(generator, true)
    }

    pub fn inv(self) -> Self {
        Letter { generator: self.generator, inverse: !self.inverse }
    }

    pub fn index(self) -> usize {
        self.generator as usize
    }

    pub fn sign(self) -> i8 {
        if self.inverse {
            -1
        } else {
            1
        }
    }
}

/// A freely reduced word `s_1 s_2 ... s_n`, acting by `s_1(s_2(...s_n(x)))`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MappingClassWord {
    letters: Vec<Letter>,
}

impl MappingClassWord {
    pub fn identity() -> Self {
        Self::default()
    }

    pub fn new(letters: impl IntoIterator<Item = Letter>) -> Self {
        let mut w = Self::identity();
        for l in letters {
            w.push(l);
        }
        w
    }

    /// `s^k` for a single generator.
    pub fn power(generator: usize, k: i64) -> Self {
        let l = Letter::new(generator, k < 0);
        Self { letters: vec![l; k.unsigned_abs() as usize] }
    }

    /// Appends on the right, cancelling against the last letter.
    pub fn push(&mut self, l: Letter) {
        if self.letters.last() == Some(&l.inv()) {
            self.letters.pop();
        } else {
            self.letters.push(l);
        }
    }

    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn inverse(&self) -> Self {
        Self { letters: self.letters.iter().rev().map(|l| l.inv()).collect() }
    }

    pub fn concat(&self, other: &Self) -> Self {
        let mut w = self.clone();
        for &l in &other.letters {
            w.push(l);
        }
        w
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut w = Self::identity();
        for _ in 0..k {
            w = w.concat(self);
        }
        w
    }

    /// `u w u^-1`.
    pub fn conjugate_by(&self, u: &Self) -> Self {
        u.concat(self).concat(&u.inverse())
    }

    /// Formats with the given generator labels, `id` for the empty word.
    pub fn display_with(&self, labels: &[String]) -> String {
        if self.letters.is_empty() {
            return "id".to_string();
        }
        let parts: Vec<String> = self
            .letters
            .iter()
            .map(|l| {
                let name = labels.get(l.index()).cloned().unwrap_or_else(|| format!("g{}", l.index()));
                if l.inverse {
                    format!("{name}^-1")
                } else {
                    name
                }
            })
            .collect();
        parts.join(" ")
    }

    /// Parses space-separated labels with optional `^k` exponents.
    pub fn parse_with(text: &str, labels: &[String]) -> Result<Self, String> {
        let mut w = Self::identity();
        for tok in text.split_whitespace() {
            if tok == "id" {
                continue;
            }
            let (name, exp) = match tok.split_once('^') {
                Some((n, e)) => (n, e.parse::<i64>().map_err(|_| format!("bad exponent in {tok:?}"))?),
                None => (tok, 1),
            };
            let g = labels.iter().position(|l| l == name).ok_or_else(|| format!("unknown generator label {name:?}"))?;
            w = w.concat(&Self::power(g, exp));
        }
        Ok(w)
    }
}

impl fmt::Display for MappingClassWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.display_with(&[]))
    }
}
