//! Topological inputs: closed 4-manifolds with an integer intersection
//! lattice, homology classes, the embedded surface Σ and the circle bundle
//! Y = ∂(X − νΣ).
//!
//! Orientation convention: Y carries the orientation induced as the boundary
//! of the cylindrical end of X − Σ, so `deg(Y) = ℓ = −Σ·Σ` everywhere.

pub mod catalog;
mod lattice;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use lattice::{HomologyClass, IntersectionForm};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TopologyError {
    #[error("intersection form is not square (row {row} has length {len}, expected {rank})")]
    NotSquare { row: usize, len: usize, rank: usize },
    #[error("intersection form is not symmetric at ({i}, {j})")]
    NotSymmetric { i: usize, j: usize },
    #[error("b- = b+ - signature = {0} is negative")]
    NegativeBMinus(i64),
    #[error("lattice rank {rank} differs from b+ + b- = {expected}")]
    RankMismatch { rank: usize, expected: i64 },
    #[error("intersection form has inertia (+{pos}, -{neg}, 0:{zero}), expected (+{b_plus}, -{b_minus})")]
    InertiaMismatch { pos: usize, neg: usize, zero: usize, b_plus: i64, b_minus: i64 },
    #[error("euler characteristic {euler} is inconsistent with b2 = {b2} (implied b1 must be a non-negative integer)")]
    EulerInconsistent { euler: i64, b2: i64 },
    #[error("lattice dimension mismatch: class has {got} coordinates, lattice rank is {expected}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("genus must be non-negative, got {0}")]
    NegativeGenus(i64),
    #[error("b+(X - Σ) = {complement} exceeds b+(X) + 1 = {bound}")]
    BPlusComplement { complement: i64, bound: i64 },
    #[error("integer overflow in lattice arithmetic")]
    Overflow,
    #[error("unknown catalog entry '{0}'")]
    UnknownCatalogEntry(String),
    #[error("catalog entry {name} failed validation: {reason}")]
    CatalogInvalid { name: String, reason: String },
}

/// A closed, connected, oriented 4-manifold described by its characteristic
/// numbers and the intersection form on H₂(X; ℤ)/torsion.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClosedFourManifold {
    name: String,
    euler: i64,
    signature: i64,
    b_plus: i64,
    form: IntersectionForm,
}

impl ClosedFourManifold {
    /// Validates the characteristic numbers against the lattice.
    ///
    /// Checks `rank = b⁺ + b⁻`, the inertia of the form, and that
    /// `b₁ = (2 + b₂ − χ)/2` is a non-negative integer.
    pub fn new(
        name: impl Into<String>,
        euler: i64,
        signature: i64,
        b_plus: i64,
        form: IntersectionForm,
    ) -> Result<Self, TopologyError> {
        let b_minus = b_plus - signature;
        if b_plus < 0 || b_minus < 0 {
            return Err(TopologyError::NegativeBMinus(b_minus.min(b_plus)));
        }
        let rank = form.rank();
        if rank as i64 != b_plus + b_minus {
            return Err(TopologyError::RankMismatch { rank, expected: b_plus + b_minus });
        }
        let (pos, neg, zero) = form.inertia();
        if zero != 0 || pos as i64 != b_plus || neg as i64 != b_minus {
            return Err(TopologyError::InertiaMismatch { pos, neg, zero, b_plus, b_minus });
        }
        let b2 = rank as i64;
        let twice_b1 = 2 + b2 - euler;
        if twice_b1 < 0 || twice_b1 % 2 != 0 {
            return Err(TopologyError::EulerInconsistent { euler, b2 });
        }
        Ok(Self { name: name.into(), euler, signature, b_plus, form })
    }

    pub fn name(&self) -> &str {
        &self.name
    }
    pub fn euler(&self) -> i64 {
        self.euler
    }
    pub fn signature(&self) -> i64 {
        self.signature
    }
    pub fn b_plus(&self) -> i64 {
        self.b_plus
    }
    pub fn b_minus(&self) -> i64 {
        self.b_plus - self.signature
    }
    pub fn b1(&self) -> i64 {
        (2 + self.form.rank() as i64 - self.euler) / 2
    }
    pub fn form(&self) -> &IntersectionForm {
        &self.form
    }
    pub fn rank(&self) -> usize {
        self.form.rank()
    }

    /// Checks that `class` lives in this manifold's lattice.
    pub fn check_class(&self, class: &HomologyClass) -> Result<(), TopologyError> {
        if class.rank() != self.rank() {
            return Err(TopologyError::DimensionMismatch { expected: self.rank(), got: class.rank() });
        }
        Ok(())
    }

    pub fn pair(&self, a: &HomologyClass, b: &HomologyClass) -> Result<i64, TopologyError> {
        self.check_class(a)?;
        self.check_class(b)?;
        self.form.pair(a, b)
    }

    pub fn square(&self, a: &HomologyClass) -> Result<i64, TopologyError> {
        self.pair(a, a)
    }
}

/// X together with a connected embedded oriented surface Σ of genus g.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairXSigma {
    manifold: ClosedFourManifold,
    genus: i64,
    sigma: HomologyClass,
    sigma_self: i64,
    b_plus_complement: i64,
}

/// Builds a pair, caching Σ·Σ.
pub fn build_pair(
    manifold: ClosedFourManifold,
    sigma: HomologyClass,
    genus: i64,
    b_plus_complement: i64,
) -> Result<PairXSigma, TopologyError> {
    if genus < 0 {
        return Err(TopologyError::NegativeGenus(genus));
    }
    let bound = manifold.b_plus() + 1;
    if b_plus_complement < 0 || b_plus_complement > bound {
        return Err(TopologyError::BPlusComplement { complement: b_plus_complement, bound });
    }
    let sigma_self = manifold.square(&sigma)?;
    Ok(PairXSigma { manifold, genus, sigma, sigma_self, b_plus_complement })
}

impl PairXSigma {
    pub fn manifold(&self) -> &ClosedFourManifold {
        &self.manifold
    }
    pub fn genus(&self) -> i64 {
        self.genus
    }
    pub fn sigma(&self) -> &HomologyClass {
        &self.sigma
    }
    /// Σ·Σ.
    pub fn sigma_self(&self) -> i64 {
        self.sigma_self
    }
    pub fn b_plus_complement(&self) -> i64 {
        self.b_plus_complement
    }
    /// ε = sign(Σ·Σ).
    pub fn epsilon(&self) -> i64 {
        self.sigma_self.signum()
    }
    /// χ(Σ) = 2 − 2g.
    pub fn euler_sigma(&self) -> i64 {
        2 - 2 * self.genus
    }
    /// χ(X − Σ) = χ(X) − χ(Σ).
    pub fn euler_complement(&self) -> i64 {
        self.manifold.euler() - self.euler_sigma()
    }
    /// σ(X − Σ) = σ(X) − sign(Σ·Σ).
    pub fn signature_complement(&self) -> i64 {
        self.manifold.signature() - self.epsilon()
    }
    /// Pairing of an arbitrary class with Σ.
    pub fn dot_sigma(&self, class: &HomologyClass) -> Result<i64, TopologyError> {
        self.manifold.pair(class, &self.sigma)
    }
    pub fn circle_bundle(&self) -> CircleBundle {
        circle_bundle_of(self)
    }
}

/// The circle bundle Y → Σ of degree ℓ.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CircleBundle {
    pub base_genus: i64,
    pub degree: i64,
}

impl CircleBundle {
    pub fn new(base_genus: i64, degree: i64) -> Self {
        Self { base_genus, degree }
    }
}

/// `ℓ = −Σ·Σ` with base genus g.
pub fn circle_bundle_of(pair: &PairXSigma) -> CircleBundle {
    CircleBundle { base_genus: pair.genus, degree: -pair.sigma_self }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn hyperbolic_pair(genus: i64, sigma: Vec<i64>) -> PairXSigma {
        let form = IntersectionForm::new(vec![vec![0, 1], vec![1, 0]]).unwrap();
        let m = ClosedFourManifold::new("H", 0, 0, 1, form).unwrap();
        build_pair(m, HomologyClass::new(sigma), genus, 1).unwrap()
    }

    #[test]
    fn e2_fiber_pair() {
        let e2 = catalog::elliptic_surface(2).unwrap();
        let pair = build_pair(e2.manifold.clone(), e2.fiber.clone(), 1, 3).unwrap();
        assert_eq!(pair.sigma_self(), 0);
        assert_eq!(pair.euler_complement(), 24);
        assert_eq!(pair.signature_complement(), -16);
        assert_eq!(pair.circle_bundle().degree, 0);
    }

    #[test]
    fn signature_complement_signs() {
        let zero = hyperbolic_pair(1, vec![1, 0]);
        assert_eq!(zero.signature_complement(), 0);
        // (1, -1) has square -2; (1, 1) has square 2.
        let neg = hyperbolic_pair(1, vec![1, -1]);
        assert_eq!(neg.sigma_self(), -2);
        assert_eq!(neg.signature_complement(), 1);
        assert_eq!(neg.circle_bundle().degree, 2);
        let pos = hyperbolic_pair(1, vec![2, 1]);
        assert_eq!(pos.sigma_self(), 4);
        assert_eq!(pos.circle_bundle().degree, -4);
    }

    #[test]
    fn sigma_self_minus_one() {
        let form = IntersectionForm::new(vec![vec![1, 0], vec![0, -1]]).unwrap();
        let m = ClosedFourManifold::new("CP2#-CP2", 4, 0, 1, form).unwrap();
        let pair = build_pair(m, HomologyClass::new(vec![0, 1]), 0, 1).unwrap();
        assert_eq!(pair.sigma_self(), -1);
        assert_eq!(pair.signature_complement(), 1);
        assert_eq!(pair.euler_complement(), 2);
    }

    #[test]
    fn rejects_bad_inputs() {
        let form = IntersectionForm::new(vec![vec![0, 1], vec![1, 0]]).unwrap();
        assert!(matches!(
            ClosedFourManifold::new("x", 0, 2, 1, form.clone()),
            Err(TopologyError::NegativeBMinus(_))
        ));
        assert!(matches!(
            ClosedFourManifold::new("x", 1, 0, 1, form.clone()),
            Err(TopologyError::EulerInconsistent { .. })
        ));
        let m = ClosedFourManifold::new("x", 0, 0, 1, form).unwrap();
        assert!(matches!(
            build_pair(m.clone(), HomologyClass::new(vec![1, 0, 0]), 1, 1),
            Err(TopologyError::DimensionMismatch { .. })
        ));
        assert!(matches!(
            build_pair(m.clone(), HomologyClass::new(vec![1, 0]), -1, 1),
            Err(TopologyError::NegativeGenus(-1))
        ));
        assert!(matches!(
            build_pair(m, HomologyClass::new(vec![1, 0]), 1, 3),
            Err(TopologyError::BPlusComplement { .. })
        ));
    }
}
