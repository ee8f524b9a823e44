//! Surfaces, sporadicity, dimension formulas and concrete generator sets.
//!
//! Generator sets are supported on closed surfaces of genus at least two.
//! All computations take place on the surface with one marked point, which
//! every generator fixes: a closed-surface mapping class is represented by
//! its lift through the marked point.
//!
//! Twist convention: the positive twist about `c` is the one acting on
//! homology by `x -> x + <x, c> c` (see [`crate::homology`]).

use std::collections::HashSet;
use std::sync::Arc;

use thiserror::Error;

use crate::curves::triangulation::Encoding;
use crate::curves::{CurveCoordinates, CurveError, CurveSystem, ElementKey, Letter, MappingClassWord};
use crate::homology::SymplecticMatrix;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SurfaceError {
    #[error("genus and puncture count must be nonnegative, got ({0}, {1})")]
    Negative(i64, i64),
    #[error("Teichmüller space is undefined for the sphere with at most two punctures")]
    Undefined,
    #[error("unsupported surface (g={0}, p={1}): generator sets need a closed surface of genus >= 2")]
    Unsupported(u32, u32),
    #[error("curve tables failed: {0}")]
    Curves(#[from] CurveError),
    #[error("generator table: {0}")]
    Table(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Surface {
    genus: u32,
    punctures: u32,
}

pub fn make_surface(g: i64, p: i64) -> Result<Surface, SurfaceError> {
    if g < 0 || p < 0 {
        return Err(SurfaceError::Negative(g, p));
    }
    Ok(Surface { genus: g as u32, punctures: p as u32 })
}

impl Surface {
    pub fn genus(&self) -> u32 {
        self.genus
    }

    pub fn punctures(&self) -> u32 {
        self.punctures
    }

    /// Closed with genus at least two: generators and curve actions apply.
    pub fn has_full_support(&self) -> bool {
        self.punctures == 0 && self.genus >= 2
    }
}

pub fn is_sporadic(s: &Surface) -> bool {
    (s.genus == 0 && s.punctures <= 4) || (s.genus == 1 && s.punctures <= 1)
}

pub fn teich_dimension(s: &Surface) -> Result<i64, SurfaceError> {
    if s.genus == 0 && s.punctures <= 2 {
        return Err(SurfaceError::Undefined);
    }
    Ok(6 * s.genus as i64 + 2 * s.punctures as i64 - 6)
}

pub fn boundary_dimension(s: &Surface) -> Result<i64, SurfaceError> {
    Ok(teich_dimension(s)? - 1)
}

/// Curated curve families a generator can refer to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CurveFamily {
    Chain,
    BoundingPair,
    Separating,
}

impl CurveFamily {
    pub fn name(self) -> &'static str {
        match self {
            CurveFamily::Chain => "chain",
            CurveFamily::BoundingPair => "bounding-pair",
            CurveFamily::Separating => "separating",
        }
    }

    fn parse(s: &str) -> Option<Self> {
        match s {
            "chain" => Some(CurveFamily::Chain),
            "bounding-pair" => Some(CurveFamily::BoundingPair),
            "separating" => Some(CurveFamily::Separating),
            _ => None,
        }
    }
}

/// A reference into a curated family.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct CurveId {
    pub family: CurveFamily,
    pub index: usize,
}

#[derive(Clone, Debug)]
pub struct Generator {
    pub label: String,
    pub id: CurveId,
    /// `+1` when the generator is the positive twist (or `T_a T_b^-1`).
    pub sign: i8,
    /// The twist curve, the pair `(a, b)`, or the separating curve.
    pub curves: Vec<CurveCoordinates>,
    action: Encoding,
    inverse_action: Encoding,
    matrix: SymplecticMatrix,
    inverse_matrix: SymplecticMatrix,
}

impl Generator {
    pub fn matrix(&self) -> &SymplecticMatrix {
        &self.matrix
    }

    pub fn action(&self) -> &Encoding {
        &self.action
    }
}

/// Words over which a generator set's letters are built.
#[derive(Clone, Debug)]
pub struct GeneratorSet {
    surface: Surface,
    system: Arc<CurveSystem>,
    generators: Vec<Generator>,
    intersection: Vec<Vec<u64>>,
}

/// The genus-g pair `d_1, d_2` bounding a neighbourhood of `c_1 ∪ c_2 ∪ c_3`.
const BOUNDING_PAIR_WORDS: [&[usize]; 2] = [&[0, 1, 2, 4, 5, 6, 3], &[5]];
/// The boundary of a neighbourhood of `c_1 ∪ c_2`.
const SEPARATING_WORD: &[usize] = &[0, 1, 2, 3];
/// Conjugates considered for Torelli generators when the budget is small.
const TORELLI_POOL: usize = 256;

fn system_for(s: &Surface) -> Result<Arc<CurveSystem>, SurfaceError> {
    if !s.has_full_support() {
        return Err(SurfaceError::Unsupported(s.genus, s.punctures));
    }
    Ok(CurveSystem::shared(s.genus as usize)?)
}

fn chain_word_encoding(sys: &CurveSystem, w: &MappingClassWord) -> Encoding {
    let mut e = Encoding::default();
    for l in w.letters().iter().rev() {
        let t = sys.chain_twist(l.index());
        e = if l.inverse { e.then(&t.inverse()) } else { e.then(t) };
    }
    e
}

/// Words in the chain generators in breadth-first order, shortest first.
fn chain_words_bfs(n_gens: usize, limit: usize) -> Vec<MappingClassWord> {
    let mut out = vec![MappingClassWord::identity()];
    let mut frontier = out.clone();
    while out.len() < limit {
        let mut next = Vec::new();
        for w in &frontier {
            for g in 0..n_gens {
                for inv in [false, true] {
                    let l = Letter::new(g, inv);
                    if w.letters().last() == Some(&l.inv()) {
                        continue;
                    }
                    let mut v = w.clone();
                    v.push(l);
                    next.push(v);
                }
            }
        }
        out.extend(next.iter().cloned());
        frontier = next;
    }
    out.truncate(limit);
    out
}

impl GeneratorSet {
    fn build(surface: Surface, system: Arc<CurveSystem>, generators: Vec<Generator>) -> Result<Self, SurfaceError> {
        let n = generators.len();
        let mut intersection = vec![vec![0u64; n]; n];
        for i in 0..n {
            for j in i + 1..n {
                let mut total = 0u64;
                for a in &generators[i].curves {
                    for b in &generators[j].curves {
                        let v = system.intersection(a, b)?;
                        total += u64::try_from(v).map_err(|_| SurfaceError::Table("intersection overflow".into()))?;
                    }
                }
                intersection[i][j] = total;
                intersection[j][i] = total;
            }
        }
        Ok(GeneratorSet { surface, system, generators, intersection })
    }

    fn chain_generator(sys: &CurveSystem, i: usize, sign: i8) -> Generator {
        let t = sys.chain_twist(i).clone();
        let (action, inverse_action) = if sign > 0 { (t.clone(), t.inverse()) } else { (t.inverse(), t) };
        let h = sys.chain_homology(i);
        Generator {
            label: if sign > 0 { format!("T{}", i + 1) } else { format!("T{}inv", i + 1) },
            id: CurveId { family: CurveFamily::Chain, index: i },
            sign,
            curves: vec![sys.chain()[i].clone()],
            action,
            inverse_action,
            matrix: SymplecticMatrix::transvection_power(h, sign as i64),
            inverse_matrix: SymplecticMatrix::transvection_power(h, -(sign as i64)),
        }
    }

    /// The twists `T_1, ..., T_{2g+1}` about the chain curves.
    pub fn humphries(s: &Surface) -> Result<Self, SurfaceError> {
        let sys = system_for(s)?;
        let gens = (0..sys.chain().len()).map(|i| Self::chain_generator(&sys, i, 1)).collect();
        Self::build(*s, sys, gens)
    }

    /// Conjugates `f (T_{d_1} T_{d_2}^-1) f^-1` of the basic bounding pair map
    /// by short chain words `f` (genus >= 3), or conjugates of the separating
    /// twist `(T_1 T_2)^6` in genus 2, where the closed surface has no
    /// bounding pairs. Distinct curve data only, at most `budget` of them.
    pub fn torelli(s: &Surface, budget: usize) -> Result<Self, SurfaceError> {
        let sys = system_for(s)?;
        let n_chain = sys.chain().len();
        let g = sys.genus();
        // Candidate conjugators f with distinct curve data, in BFS order.
        let mut pool: Vec<(MappingClassWord, Vec<CurveCoordinates>)> = Vec::new();
        let mut seen: HashSet<Vec<CurveCoordinates>> = HashSet::new();
        let base: Vec<CurveCoordinates> = if g >= 3 {
            BOUNDING_PAIR_WORDS.iter().map(|w| sys.curve_from_word(w)).collect::<Result<_, _>>()?
        } else {
            vec![sys.curve_from_word(SEPARATING_WORD)?]
        };
        // A pool independent of small budgets keeps generator indices stable.
        let pool_size = (2 * budget).max(TORELLI_POOL);
        for f in chain_words_bfs(n_chain, 64 * pool_size) {
            if pool.len() >= pool_size {
                break;
            }
            let curves: Vec<CurveCoordinates> = base.iter().map(|c| sys.apply_chain_word(&f, c)).collect();
            let mut key = curves.clone();
            key.sort();
            if seen.insert(key) {
                pool.push((f, curves));
            }
        }
        // First cover every chain curve by some generator curve, then fill
        // the budget in BFS order. Without the cover pass all generators
        // would miss the far end of the chain and share an invariant curve.
        let hits = |curves: &[CurveCoordinates]| -> Vec<bool> {
            sys.chain().iter().map(|c| curves.iter().any(|x| sys.intersection(c, x).map_or(false, |v| v > 0.into()))).collect()
        };
        let mut chosen: Vec<usize> = Vec::new();
        let mut covered = vec![false; n_chain];
        for (k, (_, curves)) in pool.iter().enumerate() {
            if covered.iter().all(|&c| c) {
                break;
            }
            let h = hits(curves);
            if h.iter().zip(&covered).any(|(&a, &b)| a && !b) {
                covered.iter_mut().zip(&h).for_each(|(c, &a)| *c |= a);
                chosen.push(k);
            }
        }
        for k in 0..pool.len() {
            if !chosen.contains(&k) {
                chosen.push(k);
            }
        }
        chosen.truncate(budget);
        let mut gens: Vec<Generator> = Vec::new();
        for &k in &chosen {
            let (f, curves) = &pool[k];
            let fe = chain_word_encoding(&sys, f);
            let fi = fe.inverse();
            let index = gens.len();
            let gen = if g >= 3 {
                let ta = sys.twist_encoding(&base[0])?;
                let tb = sys.twist_encoding(&base[1])?;
                // f T_a T_b^-1 f^-1 applied right to left.
                let action = fi.clone().then(&tb.inverse()).then(&ta).then(&fe);
                Generator {
                    label: format!("BP{}", index + 1),
                    id: CurveId { family: CurveFamily::BoundingPair, index },
                    sign: 1,
                    curves: curves.clone(),
                    inverse_action: action.inverse(),
                    action,
                    matrix: SymplecticMatrix::identity(g),
                    inverse_matrix: SymplecticMatrix::identity(g),
                }
            } else {
                let t12 = MappingClassWord::new([Letter::pos(0), Letter::pos(1)]).pow(6);
                let action = chain_word_encoding(&sys, &t12.conjugate_by(f));
                Generator {
                    label: format!("S{}", index + 1),
                    id: CurveId { family: CurveFamily::Separating, index },
                    sign: 1,
                    curves: curves.clone(),
                    inverse_action: action.inverse(),
                    action,
                    matrix: SymplecticMatrix::identity(g),
                    inverse_matrix: SymplecticMatrix::identity(g),
                }
            };
            gens.push(gen);
        }
        Self::build(*s, sys, gens)
    }

    /// Keeps the listed generators, in order.
    pub fn restrict(&self, indices: &[usize]) -> Self {
        let generators: Vec<Generator> = indices.iter().map(|&i| self.generators[i].clone()).collect();
        let intersection = indices.iter().map(|&i| indices.iter().map(|&j| self.intersection[i][j]).collect()).collect();
        GeneratorSet { surface: self.surface, system: self.system.clone(), generators, intersection }
    }

    pub fn surface(&self) -> &Surface {
        &self.surface
    }

    pub fn system(&self) -> &Arc<CurveSystem> {
        &self.system
    }

    pub fn genus(&self) -> usize {
        self.system.genus()
    }

    pub fn generators(&self) -> &[Generator] {
        &self.generators
    }

    pub fn len(&self) -> usize {
        self.generators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.generators.is_empty()
    }

    pub fn labels(&self) -> Vec<String> {
        self.generators.iter().map(|g| g.label.clone()).collect()
    }

    pub fn intersection_matrix(&self) -> &[Vec<u64>] {
        &self.intersection
    }

    pub fn parse_word(&self, text: &str) -> Result<MappingClassWord, String> {
        MappingClassWord::parse_with(text, &self.labels())
    }

    pub fn format_word(&self, w: &MappingClassWord) -> String {
        w.display_with(&self.labels())
    }

    pub fn letter_encoding(&self, l: Letter) -> &Encoding {
        let g = &self.generators[l.index()];
        if l.inverse {
            &g.inverse_action
        } else {
            &g.action
        }
    }

    pub fn letter_matrix(&self, l: Letter) -> &SymplecticMatrix {
        let g = &self.generators[l.index()];
        if l.inverse {
            &g.inverse_matrix
        } else {
            &g.matrix
        }
    }

    /// `c -> l(c)`.
    pub fn apply_letter(&self, l: Letter, c: &mut CurveCoordinates) {
        self.letter_encoding(l).apply(c.weights_mut());
    }

    /// `w(c)`, applying the last letter first.
    pub fn act(&self, w: &MappingClassWord, c: &CurveCoordinates) -> CurveCoordinates {
        let mut x = c.clone();
        for &l in w.letters().iter().rev() {
            self.apply_letter(l, &mut x);
        }
        x
    }

    /// `M(s_1) ... M(s_n)`.
    pub fn matrix(&self, w: &MappingClassWord) -> SymplecticMatrix {
        let mut m = SymplecticMatrix::identity(self.genus());
        for &l in w.letters() {
            m = m.mul(self.letter_matrix(l));
        }
        m
    }

    /// Battery images and homology matrix of `w`.
    pub fn element_key(&self, w: &MappingClassWord) -> ElementKey {
        let images = self.system.battery().iter().map(|c| self.act(w, c).weights().clone()).collect();
        ElementKey::new(images, self.matrix(w))
    }

    /// Key of `l w` from the key of `w`.
    pub fn left_multiply_key(&self, l: Letter, key: &ElementKey) -> ElementKey {
        let enc = self.letter_encoding(l);
        let images = key
            .images()
            .iter()
            .map(|x| {
                let mut y = x.clone();
                enc.apply(&mut y);
                y
            })
            .collect();
        ElementKey::new(images, self.letter_matrix(l).mul(key.matrix()))
    }

    pub fn identity_key(&self) -> ElementKey {
        self.element_key(&MappingClassWord::identity())
    }

    /// Plain-text audit table: `label family index sign`, one per line.
    pub fn to_table(&self) -> String {
        let mut s = format!("# generator-table v1 genus={}\n# label family index sign\n", self.genus());
        for g in &self.generators {
            s.push_str(&format!("{} {} {} {:+}\n", g.label, g.id.family.name(), g.id.index + 1, g.sign));
        }
        s
    }

    /// Builds a set from a table naming chain curves (any sign) and the
    /// curated Torelli family (positive sign) by their 1-based indices.
    pub fn from_table(s: &Surface, text: &str) -> Result<Self, SurfaceError> {
        let sys = system_for(s)?;
        let mut torelli: Option<GeneratorSet> = None;
        let mut gens = Vec::new();
        for line in text.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#')) {
            let f: Vec<&str> = line.split_whitespace().collect();
            if f.len() != 4 {
                return Err(SurfaceError::Table(format!("expected 4 fields in {line:?}")));
            }
            let family = CurveFamily::parse(f[1]).ok_or_else(|| SurfaceError::Table(format!("unknown family {:?}", f[1])))?;
            let index: usize = f[2].parse().map_err(|_| SurfaceError::Table(format!("bad index {:?}", f[2])))?;
            let sign: i8 = match f[3] {
                "+1" | "1" | "+" => 1,
                "-1" | "-" => -1,
                other => return Err(SurfaceError::Table(format!("bad sign {other:?}"))),
            };
            if index == 0 {
                return Err(SurfaceError::Table("indices are 1-based".into()));
            }
            let mut gen = match family {
                CurveFamily::Chain => {
                    if index > sys.chain().len() {
                        return Err(SurfaceError::Table(format!("no chain curve {index}")));
                    }
                    Self::chain_generator(&sys, index - 1, sign)
                }
                _ => {
                    if sign < 0 {
                        return Err(SurfaceError::Table("Torelli generators take sign +1".into()));
                    }
                    if torelli.as_ref().map_or(true, |t| t.len() < index) {
                        torelli = Some(Self::torelli(s, index.max(torelli.as_ref().map_or(0, |t| t.len())))?);
                    }
                    let t = torelli.as_ref().unwrap();
                    let g = t.generators.get(index - 1).ok_or_else(|| SurfaceError::Table(format!("no Torelli generator {index}")))?;
                    if g.id.family != family {
                        return Err(SurfaceError::Table(format!("genus {} has no {} family", sys.genus(), family.name())));
                    }
                    g.clone()
                }
            };
            gen.label = f[0].to_string();
            gens.push(gen);
        }
        if gens.is_empty() {
            return Err(SurfaceError::Table("empty generator table".into()));
        }
        let mut labels = HashSet::new();
        if !gens.iter().all(|g| labels.insert(g.label.clone())) {
            return Err(SurfaceError::Table("duplicate labels".into()));
        }
        Self::build(*s, sys, gens)
    }
}

pub fn humphries_generators(s: &Surface) -> Result<GeneratorSet, SurfaceError> {
    GeneratorSet::humphries(s)
}

pub fn torelli_generators(s: &Surface, pair_budget: usize) -> Result<GeneratorSet, SurfaceError> {
    GeneratorSet::torelli(s, pair_budget.max(1))
}

pub fn intersection_matrix(gs: &GeneratorSet) -> Vec<Vec<u64>> {
    gs.intersection_matrix().to_vec()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sporadic_list() {
        for g in 0..=3 {
            for p in 0..=5 {
                let s = make_surface(g, p).unwrap();
                let listed = matches!((g, p), (0, 0..=4) | (1, 0..=1));
                assert_eq!(is_sporadic(&s), listed, "({g},{p})");
            }
        }
    }

    #[test]
    fn dimensions() {
        let d = |g, p| teich_dimension(&make_surface(g, p).unwrap()).unwrap();
        assert_eq!(d(2, 0), 6);
        assert_eq!(d(1, 1), 2);
        assert_eq!(d(3, 2), 16);
        assert_eq!(boundary_dimension(&make_surface(3, 0).unwrap()).unwrap(), 11);
        assert!(teich_dimension(&make_surface(0, 2).unwrap()).is_err());
        assert!(make_surface(-1, 0).is_err());
    }

    #[test]
    fn table_round_trip() {
        let s = make_surface(2, 0).unwrap();
        let gs = humphries_generators(&s).unwrap();
        let back = GeneratorSet::from_table(&s, &gs.to_table()).unwrap();
        assert_eq!(back.labels(), gs.labels());
        assert_eq!(back.intersection_matrix(), gs.intersection_matrix());
    }
}
