//! The curated curve tables of one genus: the chain, the test battery, and
//! the compiled twists about chain curves.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::BigInt;

use super::model::{ShortPosition, SurfaceModel};
use super::polygon::Side;
use super::triangulation::Encoding;
use super::word::{Letter, MappingClassWord};
use super::{CurveCoordinates, CurveError};

/// Largest genus with a curated filling pair.
pub const MAX_FILLING_GENUS: usize = 3;

pub struct CurveSystem {
    model: SurfaceModel,
    chain: Vec<CurveCoordinates>,
    chain_short: Vec<ShortPosition>,
    chain_homology: Vec<Vec<i64>>,
    battery: Vec<CurveCoordinates>,
    filling_pairs: Vec<(CurveCoordinates, CurveCoordinates)>,
}

impl std::fmt::Debug for CurveSystem {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("CurveSystem").field("genus", &self.genus()).field("battery", &self.battery.len()).finish()
    }
}

impl CurveSystem {
    pub fn new(genus: usize) -> Result<Self, CurveError> {
        let model = SurfaceModel::new(genus);
        let mut chain = Vec::new();
        let mut chain_short = Vec::new();
        let mut chain_homology = Vec::new();
        for w in model.chain_words() {
            let c = model.curve_from_word(&w)?;
            chain_short.push(model.short_position(&c)?);
            chain_homology.push(model.homology_of(&c).ok_or(CurveError::Unsupported)?);
            chain.push(c);
        }
        let mut sys = CurveSystem { model, chain, chain_short, chain_homology, battery: Vec::new(), filling_pairs: Vec::new() };
        let mut battery = sys.chain.clone();
        for i in 0..sys.chain.len() - 1 {
            battery.push(sys.twist(i, &sys.chain[i + 1]));
            battery.push(sys.twist(i + 1, &sys.chain[i]));
        }
        sys.battery = battery;
        if genus <= MAX_FILLING_GENUS {
            let phi = sys.penner_word().pow(2 * genus as u32 - 1);
            let c1 = sys.chain[0].clone();
            let image = sys.apply_chain_word(&phi, &c1);
            sys.filling_pairs.push((c1, image));
        }
        Ok(sys)
    }

    /// A process-wide shared instance per genus.
    pub fn shared(genus: usize) -> Result<Arc<Self>, CurveError> {
        static CACHE: OnceLock<Mutex<HashMap<usize, Arc<CurveSystem>>>> = OnceLock::new();
        let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
        let mut map = cache.lock().unwrap();
        if let Some(s) = map.get(&genus) {
            return Ok(s.clone());
        }
        let s = Arc::new(CurveSystem::new(genus)?);
        map.insert(genus, s.clone());
        Ok(s)
    }

    pub fn genus(&self) -> usize {
        self.model.genus()
    }

    pub fn model(&self) -> &SurfaceModel {
        &self.model
    }

    /// Chain curves `c_1..c_{2g+1}` (index 0 is `c_1`).
    pub fn chain(&self) -> &[CurveCoordinates] {
        &self.chain
    }

    /// Homology class of `c_{i+1}` with a fixed orientation.
    pub fn chain_homology(&self, i: usize) -> &[i64] {
        &self.chain_homology[i]
    }

    pub fn chain_twist(&self, i: usize) -> &Encoding {
        &self.chain_short[i].twist
    }

    /// The chain curves followed by `T_{c_i}(c_{i+1})` and `T_{c_{i+1}}(c_i)`.
    pub fn battery(&self) -> &[CurveCoordinates] {
        &self.battery
    }

    /// `T_1 T_2^-1 T_3 T_4^-1 ... T_{2g+1}`: positive twists about the odd
    /// chain curves, negative about the even ones.
    pub fn penner_word(&self) -> MappingClassWord {
        MappingClassWord::new((0..self.chain.len()).map(|i| Letter::new(i, i % 2 == 1)))
    }

    /// `w(c)` for a word whose letter `i` is the twist about `c_{i+1}`.
    pub fn apply_chain_word(&self, w: &MappingClassWord, c: &CurveCoordinates) -> CurveCoordinates {
        let mut x = c.clone();
        for l in w.letters().iter().rev() {
            let t = &self.chain_short[l.index()].twist;
            if l.inverse {
                t.inverse().apply(x.weights_mut());
            } else {
                t.apply(x.weights_mut());
            }
        }
        x
    }

    /// Curated pairs `(c_1, φ^{2g-1}(c_1))` for the Penner word `φ`, certified
    /// to fill by the drawing check in the test suite.
    pub fn filling_pairs(&self) -> &[(CurveCoordinates, CurveCoordinates)] {
        &self.filling_pairs
    }

    /// True when `{a, b}` is a curated filling pair, in either order.
    pub fn is_curated_filling_pair(&self, a: &CurveCoordinates, b: &CurveCoordinates) -> bool {
        self.filling_pairs.iter().any(|(x, y)| (x == a && y == b) || (x == b && y == a))
    }

    fn twist(&self, i: usize, c: &CurveCoordinates) -> CurveCoordinates {
        let mut x = c.clone();
        self.chain_short[i].twist.apply(x.weights_mut());
        x
    }

    pub fn curve_from_word(&self, sides: &[Side]) -> Result<CurveCoordinates, CurveError> {
        self.model.curve_from_word(sides)
    }

    /// Short position for `c`, reusing the chain tables when possible.
    pub fn short_position(&self, c: &CurveCoordinates) -> Result<ShortPosition, CurveError> {
        if let Some(i) = self.chain.iter().position(|x| x == c) {
            return Ok(self.chain_short[i].clone());
        }
        if c.component_count() != 1 {
            return Err(CurveError::NoShortPosition);
        }
        self.model.short_position(c)
    }

    /// The positive twist about a nonseparating curve, compiled to flips.
    pub fn twist_encoding(&self, c: &CurveCoordinates) -> Result<Encoding, CurveError> {
        Ok(self.short_position(c)?.twist)
    }

    /// Geometric intersection number. One of the curves is moved to short
    /// position; failing that both are traced to cyclic words.
    pub fn intersection(&self, a: &CurveCoordinates, b: &CurveCoordinates) -> Result<BigInt, CurveError> {
        if a == b && a.component_count() == 1 {
            return Ok(BigInt::from(0));
        }
        let chain_a = self.chain.iter().position(|x| x == a);
        let chain_b = self.chain.iter().position(|x| x == b);
        if let Some(i) = chain_a {
            return Ok(self.chain_short[i].intersection(b.weights()));
        }
        if let Some(i) = chain_b {
            return Ok(self.chain_short[i].intersection(a.weights()));
        }
        let (small, other) = if a.weights().total() <= b.weights().total() { (a, b) } else { (b, a) };
        if small.component_count() == 1 {
            if let Ok(sp) = self.model.short_position(small) {
                return Ok(sp.intersection(other.weights()));
            }
        }
        if let Some(n) = self.model.word_intersection(a, b) {
            return Ok(BigInt::from(n));
        }
        Err(CurveError::Unsupported)
    }

    /// Homology class (up to sign) of a curve small enough to trace.
    pub fn homology_class(&self, c: &CurveCoordinates) -> Option<Vec<i64>> {
        self.model.homology_of(c)
    }
}
