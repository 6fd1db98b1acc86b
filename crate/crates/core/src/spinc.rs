//! Spin^c structures on the logarithmic tangent bundle TX(−log Σ).
//!
//! A [`LogSpinc`] is recorded by the Poincaré dual of c₁(L) and the
//! half-degree `m = ½·c₁(L)·Σ` along Σ. In the symplectic case it can be built
//! from a twisting class 𝔢 relative to the relatively canonical structure,
//! whose characteristic line bundle is K_X(log Σ)* = (K_X + Σ)*, so that
//! `c₁(L) = −(K_X + Σ) + 2𝔢`.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::rational::HalfInt;
use crate::topology::{CircleBundle, HomologyClass, PairXSigma, TopologyError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SpincError {
    #[error(transparent)]
    Topology(#[from] TopologyError),
    #[error("stated m = {stated} disagrees with c1(L).Sigma / 2 = {computed}")]
    HalfDegreeMismatch { stated: HalfInt, computed: HalfInt },
    #[error("torsion class requires l != 0")]
    ZeroDegreeBundle,
    #[error("cohomology class polynomial has rank {got}, lattice rank is {expected}")]
    ClassPolynomialRank { expected: usize, got: usize },
}

/// A log spin^c structure on a fixed pair.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LogSpinc {
    pair: PairXSigma,
    c1: HomologyClass,
    m: HalfInt,
    symplectic: Option<SymplecticData>,
}

/// Twisting class 𝔢 and the canonical class K_X it is measured against.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SymplecticData {
    pub twisting: HomologyClass,
    pub canonical: HomologyClass,
}

impl LogSpinc {
    /// From the Poincaré dual of c₁(L); m is derived from c₁(L)·Σ.
    pub fn from_c1(pair: &PairXSigma, c1: HomologyClass) -> Result<Self, SpincError> {
        let deg = pair.dot_sigma(&c1)?;
        Ok(Self { pair: pair.clone(), c1, m: HalfInt::from_twice(deg), symplectic: None })
    }

    /// As [`LogSpinc::from_c1`], also checking a user-stated m.
    pub fn from_c1_checked(pair: &PairXSigma, c1: HomologyClass, m: HalfInt) -> Result<Self, SpincError> {
        let s = Self::from_c1(pair, c1)?;
        if s.m != m {
            return Err(SpincError::HalfDegreeMismatch { stated: m, computed: s.m });
        }
        Ok(s)
    }

    /// Symplectic case: `c₁(L) = −(K + Σ) + 2𝔢` for a twisting class 𝔢.
    pub fn from_twisting(
        pair: &PairXSigma,
        canonical: &HomologyClass,
        twisting: HomologyClass,
    ) -> Result<Self, SpincError> {
        let x = pair.manifold();
        x.check_class(canonical)?;
        x.check_class(&twisting)?;
        let log_canonical = canonical + pair.sigma();
        let c1 = log_canonical.combine(-1, &twisting, 2);
        let mut s = Self::from_c1(pair, c1)?;
        s.symplectic = Some(SymplecticData { twisting, canonical: canonical.clone() });
        Ok(s)
    }

    pub fn pair(&self) -> &PairXSigma {
        &self.pair
    }
    pub fn c1(&self) -> &HomologyClass {
        &self.c1
    }
    /// m = ½·deg(L_Σ).
    pub fn m(&self) -> HalfInt {
        self.m
    }
    pub fn symplectic(&self) -> Option<&SymplecticData> {
        self.symplectic.as_ref()
    }
    /// deg(L_Σ) = c₁(L)·Σ.
    pub fn deg_l_sigma(&self) -> i64 {
        self.m.twice()
    }
    /// deg(E_Σ) = m + (g − 1), from L_Σ = K_Σ* ⊗ E_Σ².
    pub fn deg_e_sigma(&self) -> HalfInt {
        self.m + HalfInt::from_int(self.pair.genus() - 1)
    }
    /// c₁(L)².
    pub fn c1_square(&self) -> Result<i64, TopologyError> {
        self.pair.manifold().square(&self.c1)
    }
    /// The restriction to Y as a pullback class.
    pub fn pullback_class(&self) -> Option<PullbackClassOnY> {
        let deg = self.deg_e_sigma().as_integer()?;
        Some(PullbackClassOnY::new(self.pair.circle_bundle(), deg))
    }
}

/// d(𝔰) = (g − 1) − |m|. Negative values signal empty moduli.
pub fn degree_along_sigma(s: &LogSpinc) -> HalfInt {
    degree_along_sigma_raw(s.pair().genus(), s.m())
}

/// d(𝔰) from genus and m directly.
pub fn degree_along_sigma_raw(genus: i64, m: HalfInt) -> HalfInt {
    HalfInt::from_int(genus - 1) - m.abs()
}

/// d ≡ d′ (mod ℓ), or d = d′ when ℓ = 0.
pub fn pullback_equivalent(d1: i64, d2: i64, ell: i64) -> bool {
    if ell == 0 {
        d1 == d2
    } else {
        (d1 - d2).rem_euclid(ell.abs()) == 0
    }
}

/// Rank of the free part and order of the torsion part of H²(Y; ℤ).
pub fn gysin_h2(y: &CircleBundle) -> (i64, i64) {
    if y.degree == 0 {
        (2 * y.base_genus + 1, 0)
    } else {
        (2 * y.base_genus, y.degree.abs())
    }
}

/// k = m mod |ℓ| in [0, |ℓ|).
pub fn torsion_class_k(m_representative: i64, ell: i64) -> Result<i64, SpincError> {
    if ell == 0 {
        return Err(SpincError::ZeroDegreeBundle);
    }
    Ok(m_representative.rem_euclid(ell.abs()))
}

/// The class of a degree-d line bundle E_Σ after pullback to Y.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PullbackClassOnY {
    pub bundle: CircleBundle,
    /// deg(E_Σ) mod |ℓ| in [0, |ℓ|), or the exact degree when ℓ = 0.
    pub degree_residue: i64,
}

impl PullbackClassOnY {
    pub fn new(bundle: CircleBundle, degree: i64) -> Self {
        let degree_residue =
            if bundle.degree == 0 { degree } else { degree.rem_euclid(bundle.degree.abs()) };
        Self { bundle, degree_residue }
    }

    pub fn contains(&self, degree: i64) -> bool {
        pullback_equivalent(degree, self.degree_residue, self.bundle.degree)
    }

    /// ½c₁(L_Y) in ℤ/ℓ, with deg(L_Σ) = 2·deg(E_Σ) − (2g − 2); `None` for ℓ = 0.
    pub fn torsion_k(&self) -> Option<i64> {
        let ell = self.bundle.degree;
        (ell != 0).then(|| (self.degree_residue - (self.bundle.base_genus - 1)).rem_euclid(ell.abs()))
    }
}

/// Total Chern class truncated at degree 4: `1 + c₁ + c₂`, with c₁ a class and
/// c₂ an integer (evaluated on [X]).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassPolynomial {
    pub c1: HomologyClass,
    pub c2: i64,
}

/// `c(TX(−log Σ)) = c(TX)/(1 + PD(Σ))` truncated in degree ≤ 4.
pub fn log_chern_total(pair: &PairXSigma, ctx: &ClassPolynomial) -> Result<ClassPolynomial, SpincError> {
    let x = pair.manifold();
    if ctx.c1.rank() != x.rank() {
        return Err(SpincError::ClassPolynomialRank { expected: x.rank(), got: ctx.c1.rank() });
    }
    let c1 = &ctx.c1 - pair.sigma();
    let c2 = ctx.c2 - x.pair(&ctx.c1, pair.sigma())? + pair.sigma_self();
    Ok(ClassPolynomial { c1, c2 })
}

/// Formal product with `(1 + PD(Σ))`, truncated in degree ≤ 4.
pub fn times_one_plus_sigma(pair: &PairXSigma, c: &ClassPolynomial) -> Result<ClassPolynomial, SpincError> {
    let x = pair.manifold();
    let c1 = &c.c1 + pair.sigma();
    let c2 = c.c2 + x.pair(&c.c1, pair.sigma())?;
    Ok(ClassPolynomial { c1, c2 })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::topology::{build_pair, catalog, ClosedFourManifold, IntersectionForm};
    use proptest::prelude::*;

    fn pair_h(genus: i64) -> PairXSigma {
        let form = IntersectionForm::new(vec![vec![0, 1], vec![1, 0]]).unwrap();
        let m = ClosedFourManifold::new("H", 0, 0, 1, form).unwrap();
        build_pair(m, HomologyClass::new(vec![1, 0]), genus, 1).unwrap()
    }

    #[test]
    fn degree_along_sigma_examples() {
        assert_eq!(degree_along_sigma_raw(3, HalfInt::ZERO), HalfInt::from_int(2));
        assert_eq!(degree_along_sigma_raw(1, HalfInt::from_int(2)), HalfInt::from_int(-2));
        assert_eq!(degree_along_sigma_raw(1, HalfInt::from_int(-2)), HalfInt::from_int(-2));
        // deg(L_Σ) = 2g − 2 gives d(𝔰) = 0.
        for g in 1..=10 {
            let pair = pair_h(g);
            let s = LogSpinc::from_c1(&pair, HomologyClass::new(vec![0, 2 * g - 2])).unwrap();
            assert_eq!(s.m(), HalfInt::from_int(g - 1));
            assert_eq!(degree_along_sigma(&s), HalfInt::ZERO);
        }
    }

    #[test]
    fn stated_m_is_checked() {
        let pair = pair_h(2);
        let c1 = HomologyClass::new(vec![3, 2]);
        assert!(LogSpinc::from_c1_checked(&pair, c1.clone(), HalfInt::from_int(1)).is_ok());
        assert!(matches!(
            LogSpinc::from_c1_checked(&pair, c1, HalfInt::from_int(2)),
            Err(SpincError::HalfDegreeMismatch { .. })
        ));
    }

    #[test]
    fn pullback_examples() {
        assert!(pullback_equivalent(0, 3, 3));
        assert!(!pullback_equivalent(0, 1, 3));
        assert!(!pullback_equivalent(2, 5, 0));
        assert!(pullback_equivalent(2, 2, 0));
        assert!(pullback_equivalent(-1, 2, -3));
    }

    #[test]
    fn gysin_examples() {
        assert_eq!(gysin_h2(&CircleBundle::new(2, 3)), (4, 3));
        assert_eq!(gysin_h2(&CircleBundle::new(1, 0)), (3, 0));
        assert_eq!(gysin_h2(&CircleBundle::new(0, 1)), (0, 1));
        assert_eq!(gysin_h2(&CircleBundle::new(2, -5)), (4, 5));
    }

    #[test]
    fn torsion_examples() {
        assert_eq!(torsion_class_k(4, 3), Ok(1));
        assert_eq!(torsion_class_k(0, 5), Ok(0));
        assert_eq!(torsion_class_k(-1, 3), Ok(2));
        assert_eq!(torsion_class_k(-1, -3), Ok(2));
        assert_eq!(torsion_class_k(1, 0), Err(SpincError::ZeroDegreeBundle));
    }

    #[test]
    fn log_chern_examples() {
        let pair = pair_h(1);
        // c₁(TX) = 0, c₂ = χ.
        let ctx = ClassPolynomial { c1: HomologyClass::zero(2), c2: 7 };
        let log = log_chern_total(&pair, &ctx).unwrap();
        assert_eq!(log.c1, HomologyClass::new(vec![-1, 0]));
        assert_eq!(log.c2, 7 + pair.sigma_self());

        let e2 = catalog::elliptic_surface(2).unwrap();
        let pair = build_pair(e2.manifold.clone(), e2.fiber.clone(), 1, 3).unwrap();
        let ctx = ClassPolynomial { c1: e2.canonical.scaled(-1), c2: 24 };
        let log = log_chern_total(&pair, &ctx).unwrap();
        assert_eq!(log.c1, e2.fiber.scaled(-1));
    }

    #[test]
    fn log_chern_with_zero_sigma_is_identity() {
        let form = IntersectionForm::new(vec![vec![1, 0], vec![0, -1]]).unwrap();
        let m = ClosedFourManifold::new("CP2#-CP2", 4, 0, 1, form).unwrap();
        let pair = build_pair(m, HomologyClass::zero(2), 1, 1).unwrap();
        let ctx = ClassPolynomial { c1: HomologyClass::new(vec![3, 1]), c2: 4 };
        assert_eq!(log_chern_total(&pair, &ctx).unwrap(), ctx);
    }

    #[test]
    fn pullback_class_torsion() {
        let y = CircleBundle::new(2, 3);
        let cls = PullbackClassOnY::new(y, 5);
        assert_eq!(cls.degree_residue, 2);
        assert!(cls.contains(-1));
        assert_eq!(cls.torsion_k(), Some(1));
        assert_eq!(PullbackClassOnY::new(CircleBundle::new(1, 0), 5).torsion_k(), None);
    }

    proptest! {
        #[test]
        fn degree_along_sigma_is_even_in_m(g in 0i64..30, twice in -100i64..100) {
            let m = HalfInt::from_twice(twice);
            prop_assert_eq!(degree_along_sigma_raw(g, m), degree_along_sigma_raw(g, -m));
        }

        #[test]
        fn pullback_is_an_equivalence(a in -50i64..50, b in -50i64..50, c in -50i64..50, ell in -7i64..7) {
            prop_assert!(pullback_equivalent(a, a, ell));
            prop_assert_eq!(pullback_equivalent(a, b, ell), pullback_equivalent(b, a, ell));
            if pullback_equivalent(a, b, ell) && pullback_equivalent(b, c, ell) {
                prop_assert!(pullback_equivalent(a, c, ell));
            }
        }

        #[test]
        fn log_chern_inverts(c1 in prop::collection::vec(-6i64..6, 2), c2 in -20i64..20, s in prop::collection::vec(-3i64..3, 2)) {
            let form = IntersectionForm::new(vec![vec![1, 0], vec![0, -1]]).unwrap();
            let m = ClosedFourManifold::new("CP2#-CP2", 4, 0, 1, form).unwrap();
            let pair = build_pair(m, HomologyClass::new(s), 1, 1).unwrap();
            let ctx = ClassPolynomial { c1: HomologyClass::new(c1), c2 };
            let back = times_one_plus_sigma(&pair, &log_chern_total(&pair, &ctx).unwrap()).unwrap();
            prop_assert_eq!(back, ctx);
        }
    }
}
