//! Components of the monopole moduli space on the circle bundle Y → Σ.
//!
//! For a pullback class with residue ρ of deg(E_Σ):
//!
//! * every degree d ≡ ρ (mod ℓ) (or d = ρ when ℓ = 0) with 0 ≤ d ≤ 2g − 2 and
//!   d ≠ g − 1 gives an irreducible component ≅ Sym^{d(𝔰)}(Σ), m = d − (g − 1);
//! * the reducible locus is T^{2g} when ℓ ≠ 0, T^{2g+1} when ℓ = 0 and the
//!   class contains d = g − 1, and empty otherwise.
//!
//! CSD levels are normalized to `(2m)²/ℓ`.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::rational::{HalfInt, Rational};
use crate::spinc::{degree_along_sigma_raw, PullbackClassOnY};
use crate::topology::{CircleBundle, PairXSigma};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ModuliError {
    #[error("CSD level is not real-valued on a trivial bundle (l = 0)")]
    ZeroDegreeBundle,
    #[error("divisor degree {d} outside [0, {max}]")]
    DegreeOutOfRange { d: i64, max: i64 },
    #[error("zero set needs genus >= 1, got {0}")]
    GenusTooSmall(i64),
    #[error("zero multiplicities sum to {total}, expected 2g - 2 = {expected}")]
    ZeroCount { total: u64, expected: i64 },
    #[error("duplicate zero label '{0}'")]
    DuplicateLabel(String),
    #[error("zero '{0}' has multiplicity 0")]
    EmptyZero(String),
    #[error("stratum level k = {0} must be >= 1")]
    LevelTooSmall(i64),
    #[error("a broken trajectory can start at the reducible only when Sigma.Sigma < 0 (got {0})")]
    ReducibleStartRejected(i64),
    #[error("tunneling class violates b_minus - b_plus = a*l")]
    TunnelingConstraint,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ComponentKind {
    ReducibleTorus2g,
    ReducibleTorus2gPlus1,
    ReducibleEmpty,
    Irreducible,
}

impl ComponentKind {
    pub fn is_reducible(self) -> bool {
        !matches!(self, ComponentKind::Irreducible)
    }
}

/// One component of M(Y, [𝔰]).
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ModuliComponent3 {
    pub kind: ComponentKind,
    pub bundle: CircleBundle,
    /// deg(E_Σ) of the component (irreducible only).
    pub degree: Option<i64>,
    /// Half-degree m = deg(E_Σ) − (g − 1) (irreducible only).
    pub m: Option<HalfInt>,
    /// d with the component modeled on Sym^d(Σ) (irreducible only).
    pub d: Option<i64>,
    /// Reducible with ℓ | deg(L) (theta-divisor case).
    pub theta_flag: bool,
    /// Reducible non-degeneracy flag, `deg(L) mod ℓ ≠ 0`.
    pub non_degenerate: Option<bool>,
    /// `(2m)²/ℓ`; `None` when ℓ = 0.
    #[serde(serialize_with = "crate::rational::serialize_opt_rational")]
    pub csd_level: Option<Rational>,
}

impl ModuliComponent3 {
    /// Real dimension: 2d for Sym^d, 2g or 2g + 1 for the tori.
    pub fn real_dimension(&self) -> Option<i64> {
        let g = self.bundle.base_genus;
        match self.kind {
            ComponentKind::Irreducible => self.d.map(|d| 2 * d),
            ComponentKind::ReducibleTorus2g => Some(2 * g),
            ComponentKind::ReducibleTorus2gPlus1 => Some(2 * g + 1),
            ComponentKind::ReducibleEmpty => None,
        }
    }

    pub fn describe(&self) -> String {
        match self.kind {
            ComponentKind::Irreducible => format!("Sym^{}(Sigma)", self.d.unwrap_or(0)),
            ComponentKind::ReducibleTorus2g => format!("T^{}", 2 * self.bundle.base_genus),
            ComponentKind::ReducibleTorus2gPlus1 => format!("T^{}", 2 * self.bundle.base_genus + 1),
            ComponentKind::ReducibleEmpty => "empty".to_string(),
        }
    }
}

/// `(2m)²/ℓ`.
pub fn csd_level(m: HalfInt, ell: i64) -> Result<Rational, ModuliError> {
    if ell == 0 {
        return Err(ModuliError::ZeroDegreeBundle);
    }
    let c = m.twice();
    Ok(Rational::new(c * c, ell))
}

/// Degrees d in the class with 0 ≤ d ≤ 2g − 2.
fn degrees_in_class(y: &CircleBundle, cls: &PullbackClassOnY) -> Vec<i64> {
    (0..=2 * y.base_genus - 2).filter(|&d| cls.contains(d)).collect()
}

/// Components of M(Y, [𝔰]); the reducible (or its empty marker) comes first.
pub fn enumerate_components(y: &CircleBundle, cls: &PullbackClassOnY) -> Vec<ModuliComponent3> {
    let g = y.base_genus;
    let ell = y.degree;
    let mut out = Vec::new();
    let reducible = |kind, theta_flag, non_degenerate| ModuliComponent3 {
        kind,
        bundle: *y,
        degree: None,
        m: None,
        d: None,
        theta_flag,
        non_degenerate,
        csd_level: (ell != 0).then(|| Rational::from_integer(0)),
    };
    if ell != 0 {
        let deg_l = 2 * cls.degree_residue - (2 * g - 2);
        let theta = deg_l.rem_euclid(ell.abs()) == 0;
        out.push(reducible(ComponentKind::ReducibleTorus2g, theta, Some(!theta)));
    } else if cls.degree_residue == g - 1 {
        out.push(reducible(ComponentKind::ReducibleTorus2gPlus1, true, Some(false)));
    } else {
        out.push(reducible(ComponentKind::ReducibleEmpty, false, None));
    }
    for deg in degrees_in_class(y, cls) {
        if deg == g - 1 {
            continue;
        }
        let m = HalfInt::from_int(deg - (g - 1));
        let d = degree_along_sigma_raw(g, m).as_integer().expect("integral m");
        out.push(ModuliComponent3 {
            kind: ComponentKind::Irreducible,
            bundle: *y,
            degree: Some(deg),
            m: Some(m),
            d: Some(d),
            theta_flag: false,
            non_degenerate: None,
            csd_level: csd_level(m, ell).ok(),
        });
    }
    out
}

/// True iff CSD strictly increases from `from` to `to`.
pub fn tunneling_admissible(from: &ModuliComponent3, to: &ModuliComponent3) -> bool {
    if from.bundle != to.bundle {
        return false;
    }
    match (from.csd_level, to.csd_level) {
        (Some(a), Some(b)) => a < b,
        _ => false,
    }
}

/// Expected codimension of a level-k broken-trajectory stratum.
pub fn stratum_codimension(k: i64, starts_at_reducible: bool, sigma_self: i64) -> Result<i64, ModuliError> {
    if k < 1 {
        return Err(ModuliError::LevelTooSmall(k));
    }
    if starts_at_reducible {
        if sigma_self >= 0 {
            return Err(ModuliError::ReducibleStartRejected(sigma_self));
        }
        return Ok(2 * k + 1);
    }
    Ok(2 * k)
}

/// Σ·Σ > 2g − 2 forces a single irreducible component, hence compactness.
pub fn compactness_certificate(pair: &PairXSigma) -> bool {
    pair.sigma_self() > 2 * pair.genus() - 2
}

/// The zero divisor of a holomorphic 1-form ν on Σ, as labeled points with
/// multiplicities summing to 2g − 2.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NuZeroSet {
    genus: i64,
    zeros: Vec<(String, u32)>,
}

impl NuZeroSet {
    pub fn new(genus: i64, zeros: Vec<(String, u32)>) -> Result<Self, ModuliError> {
        if genus < 1 {
            return Err(ModuliError::GenusTooSmall(genus));
        }
        let mut seen = BTreeSet::new();
        for (label, mult) in &zeros {
            if !seen.insert(label.clone()) {
                return Err(ModuliError::DuplicateLabel(label.clone()));
            }
            if *mult == 0 {
                return Err(ModuliError::EmptyZero(label.clone()));
            }
        }
        let total: u64 = zeros.iter().map(|(_, m)| *m as u64).sum();
        if total as i64 != 2 * genus - 2 {
            return Err(ModuliError::ZeroCount { total, expected: 2 * genus - 2 });
        }
        Ok(Self { genus, zeros })
    }

    /// 2g − 2 simple zeros labeled p0, p1, ….
    pub fn simple(genus: i64) -> Result<Self, ModuliError> {
        let n = (2 * genus - 2).max(0) as usize;
        Self::new(genus, (0..n).map(|i| (format!("p{i}"), 1)).collect())
    }

    /// Zeros with the given multiplicities, labeled p0, p1, ….
    pub fn from_multiplicities(genus: i64, mults: &[u32]) -> Result<Self, ModuliError> {
        Self::new(genus, mults.iter().enumerate().map(|(i, &m)| (format!("p{i}"), m)).collect())
    }

    pub fn genus(&self) -> i64 {
        self.genus
    }
    pub fn zeros(&self) -> &[(String, u32)] {
        &self.zeros
    }
    pub fn multiplicities(&self) -> Vec<u32> {
        self.zeros.iter().map(|(_, m)| *m).collect()
    }
    pub fn total(&self) -> u32 {
        self.zeros.iter().map(|(_, m)| *m).sum()
    }

    /// Canonical label of a sub-multiset: labels joined by `+`, repeated by
    /// multiplicity, in zero order; the empty divisor is `empty`.
    pub fn label(&self, q: &SubDivisor) -> String {
        let mut parts = Vec::new();
        for ((label, _), &c) in self.zeros.iter().zip(&q.counts) {
            for _ in 0..c {
                parts.push(label.as_str());
            }
        }
        if parts.is_empty() {
            "empty".to_string()
        } else {
            parts.join("+")
        }
    }

    /// The same zero set with labels renamed through `f`.
    pub fn relabeled(&self, f: impl Fn(&str) -> String) -> Self {
        Self { genus: self.genus, zeros: self.zeros.iter().map(|(l, m)| (f(l), *m)).collect() }
    }

    /// Parses a label produced by [`NuZeroSet::label`].
    pub fn parse_label(&self, label: &str) -> Option<SubDivisor> {
        let mut counts = vec![0u32; self.zeros.len()];
        if label != "empty" {
            for part in label.split('+') {
                let i = self.zeros.iter().position(|(l, _)| l == part.trim())?;
                counts[i] += 1;
            }
        }
        counts.iter().zip(&self.zeros).all(|(c, (_, m))| c <= m).then_some(SubDivisor { counts })
    }
}

/// A sub-multiset of Div(ν), as counts aligned with the zero list.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct SubDivisor {
    pub counts: Vec<u32>,
}

impl SubDivisor {
    pub fn degree(&self) -> u32 {
        self.counts.iter().sum()
    }

    /// Div(ν) − q, realizing S_d(ν) ≅ S_{2g−2−d}(ν).
    pub fn complement(&self, zeros: &NuZeroSet) -> SubDivisor {
        SubDivisor { counts: zeros.multiplicities().iter().zip(&self.counts).map(|(m, c)| m - c).collect() }
    }
}

/// Streaming enumeration of S_d(ν) in lexicographic order of count vectors.
pub struct SubMultisets {
    mults: Vec<u32>,
    current: Option<Vec<u32>>,
}

impl SubMultisets {
    fn first(mults: &[u32], d: u32) -> Option<Vec<u32>> {
        // Lexicographically smallest: fill from the back.
        let mut counts = vec![0u32; mults.len()];
        let mut left = d;
        for i in (0..mults.len()).rev() {
            let take = left.min(mults[i]);
            counts[i] = take;
            left -= take;
        }
        (left == 0).then_some(counts)
    }

    fn advance(&self, counts: &[u32]) -> Option<Vec<u32>> {
        // Find the rightmost position i that can be incremented while the
        // suffix after it can absorb the remaining degree minus one.
        let n = counts.len();
        let mut suffix: u32 = 0;
        for i in (0..n).rev() {
            if suffix > 0 && counts[i] < self.mults[i] {
                let mut next = counts[..i].to_vec();
                next.push(counts[i] + 1);
                let tail = &self.mults[i + 1..];
                let rest = Self::first(tail, suffix - 1)?;
                next.extend(rest);
                return Some(next);
            }
            suffix += counts[i];
        }
        None
    }
}

impl Iterator for SubMultisets {
    type Item = SubDivisor;
    fn next(&mut self) -> Option<SubDivisor> {
        let cur = self.current.take()?;
        self.current = self.advance(&cur);
        Some(SubDivisor { counts: cur })
    }
}

/// S_d(ν): all sub-multisets of Div(ν) of total multiplicity d.
pub fn perturbed_components(zeros: &NuZeroSet, d: i64) -> Result<SubMultisets, ModuliError> {
    let max = 2 * zeros.genus() - 2;
    if d < 0 || d > max {
        return Err(ModuliError::DegreeOutOfRange { d, max });
    }
    let mults = zeros.multiplicities();
    let current = SubMultisets::first(&mults, d as u32);
    Ok(SubMultisets { mults, current })
}

/// A homology class 𝔢 = aΣ₋ + b₊F on P = ℙ(N) over Σ₋.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TunnelingClass {
    pub a: i64,
    pub b_plus: i64,
    pub b_minus: i64,
    pub g: i64,
    pub ell: i64,
}

impl TunnelingClass {
    pub fn new(a: i64, b_plus: i64, b_minus: i64, g: i64, ell: i64) -> Result<Self, ModuliError> {
        if b_minus - b_plus != a * ell {
            return Err(ModuliError::TunnelingConstraint);
        }
        Ok(Self { a, b_plus, b_minus, g, ell })
    }

    pub fn dimension(&self, adapted: bool) -> i64 {
        crate::dimension::dim_tunneling(self.a, self.b_plus, self.b_minus, self.g, self.ell, adapted)
            .expect("constraint checked at construction")
    }
}

/// Structure of a tunneling moduli space.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind")]
pub enum TunnelingModuli {
    Empty { reason: String },
    /// a = 0, unperturbed: Sym^b(Σ) of fiber-wise constant solutions.
    FiberwiseSymmetricProduct { b: i64, real_dimension: i64 },
    /// a = 0, adapted: the finite set S_b(ν) of fiber-wise constant solutions.
    FiberwiseFinite { b: i64, count: Option<u64> },
    /// a ≠ 0, unperturbed: pairs of holomorphic sections
    /// Φ₊ ∈ H⁰(O(𝔢)), Φ̄₋ ∈ H⁰(K_P(log Σ) ⊗ O(−𝔢)).
    Holomorphic { expected_dimension: i64, vanishing_spinor: String },
}

impl TunnelingModuli {
    pub fn is_empty(&self) -> bool {
        matches!(self, TunnelingModuli::Empty { .. })
    }

    /// True when counts built on this space presuppose it is a smooth
    /// manifold, which is only known for the fiber-wise constant cases.
    pub fn assumes_regularity(&self) -> bool {
        matches!(self, TunnelingModuli::Holomorphic { .. })
    }
}

/// Describes the tunneling moduli space of a class, unperturbed or adapted.
pub fn tunneling_moduli(tc: &TunnelingClass, adapted: bool, zeros: Option<&NuZeroSet>) -> TunnelingModuli {
    let TunnelingClass { a, b_plus, b_minus, g, .. } = *tc;
    let empty = |reason: &str| TunnelingModuli::Empty { reason: reason.to_string() };
    let top = 2 * g - 2;
    if b_plus < 0 || b_minus < 0 || b_plus > top || b_minus > top {
        return empty("b+ or b- outside [0, 2g-2]");
    }
    if adapted {
        if b_plus != b_minus || a != 0 {
            return empty("adapted perturbation forces a = 0 and b+ = b-");
        }
        let count = zeros
            .filter(|z| z.genus() == g)
            .and_then(|z| perturbed_components(z, b_plus).ok())
            .map(|it| it.count() as u64);
        return TunnelingModuli::FiberwiseFinite { b: b_plus, count };
    }
    if a == 0 {
        return TunnelingModuli::FiberwiseSymmetricProduct { b: b_plus, real_dimension: 2 * b_plus };
    }
    if a > 0 && (b_plus > g - 1 || b_minus > g - 1) {
        return empty("a > 0 requires b+, b- <= g-1");
    }
    if a < 0 && (b_plus < g - 1 || b_minus < g - 1) {
        return empty("a < 0 requires b+, b- >= g-1");
    }
    TunnelingModuli::Holomorphic {
        expected_dimension: tc.dimension(false),
        vanishing_spinor: if a > 0 { "Phi_minus".into() } else { "Phi_plus".into() },
    }
}
