//! Curves on the genus-g surface with one marked point, exact Dehn twist
//! actions, intersection numbers and the Alexander-method identity test.

pub mod filling;
pub mod model;
pub mod polygon;
pub mod system;
pub mod triangulation;
pub mod weights;
pub mod word;

use std::fmt::Write as _;

use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::homology::SymplecticMatrix;
use crate::surface::{GeneratorSet, Surface, SurfaceError};

pub use system::CurveSystem;
pub use weights::Weights;
pub use word::{Letter, MappingClassWord};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CurveError {
    #[error("word reduces to an inessential curve")]
    Inessential,
    #[error("word is not a simple closed curve")]
    NotSimple,
    #[error("no flip sequence puts the curve in short position")]
    NoShortPosition,
    #[error("coordinate vector is not admissible")]
    Inadmissible,
    #[error("intersection unsupported: neither curve is transportable to a reference curve")]
    Unsupported,
}

/// Normal coordinates of a multicurve with respect to the base triangulation.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CurveCoordinates {
    weights: Weights,
    components: u32,
}

impl CurveCoordinates {
    pub fn new(weights: Weights, components: u32) -> Self {
        CurveCoordinates { weights, components }
    }

    pub fn weights(&self) -> &Weights {
        &self.weights
    }

    pub fn weights_mut(&mut self) -> &mut Weights {
        &mut self.weights
    }

    pub fn component_count(&self) -> u32 {
        self.components
    }

    /// Text form: a version header followed by the decimal entries.
    pub fn to_text(&self, genus: usize) -> String {
        format!("{CURVE_HEADER} genus={genus} components={}\n{}\n", self.components, self.weights)
    }

    pub fn from_text(text: &str) -> Result<(usize, Self), CurveError> {
        let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty());
        let header = lines.next().ok_or(CurveError::Inadmissible)?;
        let rest = header.strip_prefix(CURVE_HEADER).ok_or(CurveError::Inadmissible)?;
        let mut genus = None;
        let mut components = None;
        for field in rest.split_whitespace() {
            match field.split_once('=') {
                Some(("genus", v)) => genus = v.parse().ok(),
                Some(("components", v)) => components = v.parse().ok(),
                _ => return Err(CurveError::Inadmissible),
            }
        }
        let genus: usize = genus.ok_or(CurveError::Inadmissible)?;
        let body = lines.next().ok_or(CurveError::Inadmissible)?;
        let big: Vec<num_bigint::BigInt> =
            body.split_whitespace().map(|t| t.parse().map_err(|_| CurveError::Inadmissible)).collect::<Result<_, _>>()?;
        if big.len() != 6 * genus - 3 {
            return Err(CurveError::Inadmissible);
        }
        let mut w = Weights::Big(big);
        w.compact();
        Ok((genus, CurveCoordinates { weights: w, components: components.ok_or(CurveError::Inadmissible)? }))
    }
}

pub const CURVE_HEADER: &str = "# curve-coordinates v1 normal-fan";

/// Canonical key of a mapping class: the images of the test battery and the
/// homology matrix. Two words have equal keys exactly when they pass the
/// identity test relative to each other.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ElementKey {
    images: Vec<Weights>,
    matrix: SymplecticMatrix,
}

impl ElementKey {
    pub fn new(images: Vec<Weights>, matrix: SymplecticMatrix) -> Self {
        ElementKey { images, matrix }
    }

    pub fn images(&self) -> &[Weights] {
        &self.images
    }

    pub fn matrix(&self) -> &SymplecticMatrix {
        &self.matrix
    }

    /// Hex SHA-256 of the decimal serialisation.
    pub fn digest(&self) -> String {
        let mut h = Sha256::new();
        for w in &self.images {
            h.update(w.to_string().as_bytes());
            h.update(b";");
        }
        h.update(self.matrix.to_text().as_bytes());
        let mut out = String::with_capacity(64);
        for b in h.finalize() {
            let _ = write!(out, "{b:02x}");
        }
        out
    }
}

/// Chain curves followed by the test battery extras.
pub fn reference_curves(s: &Surface) -> Result<Vec<CurveCoordinates>, SurfaceError> {
    if !s.has_full_support() {
        return Err(SurfaceError::Unsupported(s.genus(), s.punctures()));
    }
    Ok(CurveSystem::shared(s.genus() as usize)?.battery().to_vec())
}

/// `w(c)` under the composition convention `ab(x) = a(b(x))`.
pub fn twist_action(gs: &GeneratorSet, w: &MappingClassWord, c: &CurveCoordinates) -> Result<CurveCoordinates, CurveError> {
    let sys = gs.system();
    if c.weights().len() != sys.model().edge_count() || !sys.model().base().is_admissible(c.weights()) {
        return Err(CurveError::Inadmissible);
    }
    Ok(gs.act(w, c))
}

pub fn intersection(gs: &GeneratorSet, a: &CurveCoordinates, b: &CurveCoordinates) -> Result<num_bigint::BigInt, CurveError> {
    gs.system().intersection(a, b)
}

/// Normal coordinates are canonical, so equality is coordinate equality.
pub fn is_same_curve(a: &CurveCoordinates, b: &CurveCoordinates) -> bool {
    a == b
}

/// True when `w` fixes every battery curve.
pub fn fixes_battery(gs: &GeneratorSet, w: &MappingClassWord) -> bool {
    gs.system().battery().iter().all(|c| &gs.act(w, c) == c)
}

/// Identity test: `w` fixes the battery and acts trivially on homology. A
/// class fixing a filling collection has finite order, and a finite-order
/// class acting trivially on homology is the identity.
pub fn alexander_identity_test(gs: &GeneratorSet, w: &MappingClassWord) -> bool {
    fixes_battery(gs, w) && gs.matrix(w).is_identity()
}
