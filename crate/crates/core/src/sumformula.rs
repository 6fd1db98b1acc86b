//! Combinatorics of the sum formula for X = X₁ #_Σ X₂.
//!
//! Splittings pair log spin^c structures on the two sides with the same
//! degree d(𝔰) along Σ. Relative invariant tables are user input keyed by
//! (side, m, q) with q a sub-multiset of the zeros of ν; the engine assembles
//! the right-hand side and does the dimension bookkeeping around it.

use std::collections::{BTreeMap, BTreeSet};
use std::io::{Read, Write};

use num_integer::binomial;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dimension::{classic_closed_from_numbers, dim_adapted, dim_reducible, DimensionError};
use crate::moduli3::{perturbed_components, ModuliError, NuZeroSet, SubDivisor};
use crate::rational::{rational_to_int, HalfInt, Rational};
use crate::spinc::{pullback_equivalent, LogSpinc};
use crate::topology::PairXSigma;

#[derive(Debug, Error)]
pub enum SumError {
    #[error("genera differ: {0} vs {1}")]
    GenusMismatch(i64, i64),
    #[error("self-intersections are not dual: {0} and {1}")]
    NotDual(i64, i64),
    #[error("side must be 1 or 2, got {0}")]
    BadSide(u8),
    #[error("table entry ({side}, {m}, {q}) has |m| > g - 1 = {bound}")]
    InadmissibleKey { side: u8, m: i64, q: String, bound: i64 },
    #[error("label {0:?} does not name a sub-multiset of the zeros of nu")]
    UnknownLabel(String),
    #[error("duplicate entry for {0}")]
    Duplicate(String),
    #[error("missing table entries: {}", .0.join(", "))]
    MissingEntries(Vec<String>),
    #[error("sign for {0} must be +1 or -1, got {1}")]
    BadSign(String, i64),
    #[error("zero set has genus {zeros}, splitting problem has genus {problem}")]
    ZeroGenus { zeros: i64, problem: i64 },
    #[error("integer overflow while summing")]
    Overflow,
    #[error("glued {quantity} is {given}, gluing arithmetic gives {expected}")]
    InconsistentGluing { quantity: &'static str, given: i64, expected: i64 },
    #[error("spin^c structure on side {side} has m = {got}, splitting says {expected}")]
    SplittingMismatch { side: u8, expected: i64, got: HalfInt },
    #[error("spin^c structure for side {0} lives on a different pair")]
    WrongPair(u8),
    #[error("reducible ends need 0 < k1 < |l| and k2 = |l| - k1 (got k1 = {k1}, k2 = {k2}, |l| = {ell})")]
    TorsionPairing { k1: HalfInt, k2: HalfInt, ell: i64 },
    #[error("glued c1^2 is not an integer: {0}")]
    NonIntegralSquare(String),
    #[error(transparent)]
    Dimension(#[from] DimensionError),
    #[error(transparent)]
    Moduli(#[from] ModuliError),
    #[error("csv: {0}")]
    Csv(String),
}

impl From<csv::Error> for SumError {
    fn from(e: csv::Error) -> Self {
        SumError::Csv(e.to_string())
    }
}

/// Two pairs glued along Σ, and the pullback residues fixing [𝔰].
#[derive(Clone, Debug)]
pub struct SplitProblem {
    pair1: PairXSigma,
    pair2: PairXSigma,
    residues: (i64, i64),
}

impl SplitProblem {
    pub fn new(pair1: PairXSigma, pair2: PairXSigma, residues: (i64, i64)) -> Result<Self, SumError> {
        if pair1.genus() != pair2.genus() {
            return Err(SumError::GenusMismatch(pair1.genus(), pair2.genus()));
        }
        if pair1.sigma_self() != -pair2.sigma_self() {
            return Err(SumError::NotDual(pair1.sigma_self(), pair2.sigma_self()));
        }
        Ok(Self { pair1, pair2, residues })
    }

    pub fn genus(&self) -> i64 {
        self.pair1.genus()
    }
    pub fn pair(&self, side: u8) -> &PairXSigma {
        if side == 1 {
            &self.pair1
        } else {
            &self.pair2
        }
    }
    pub fn residues(&self) -> (i64, i64) {
        self.residues
    }

    /// Whether m on `side` lies in the residue class: deg(E_Σ) = m + g − 1 ≡ ρ mod ℓ.
    fn in_class(&self, side: u8, m: i64) -> bool {
        let ell = -self.pair(side).sigma_self();
        let rho = if side == 1 { self.residues.0 } else { self.residues.1 };
        pullback_equivalent(m + self.genus() - 1, rho, ell)
    }
}

/// d(𝔰) for an integral m.
pub fn splitting_degree(g: i64, m: i64) -> i64 {
    g - 1 - m.abs()
}

/// All (m₁, m₂) with 0 < |mᵢ| ≤ g − 1, each in its residue class, and |m₁| = |m₂|.
pub fn enumerate_splittings(sp: &SplitProblem) -> Vec<(i64, i64)> {
    let b = sp.genus() - 1;
    let admissible = |side| (-b..=b).filter(|&m| m != 0 && sp.in_class(side, m)).collect::<Vec<_>>();
    let (left, right) = (admissible(1), admissible(2));
    let mut out = Vec::new();
    for &m1 in &left {
        for &m2 in &right {
            if m1.abs() == m2.abs() {
                out.push((m1, m2));
            }
        }
    }
    out
}

/// One row of a relative invariant table.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TableRow {
    pub side: u8,
    pub m: i64,
    pub q: String,
    pub value: i64,
}

/// SW̃(𝔰; q) values keyed by (side, m, q-label).
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct RelativeInvariantTable {
    entries: BTreeMap<(u8, i64, String), i64>,
}

impl RelativeInvariantTable {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, side: u8, m: i64, q: &str, value: i64) -> Result<(), SumError> {
        if side != 1 && side != 2 {
            return Err(SumError::BadSide(side));
        }
        if self.entries.insert((side, m, q.to_string()), value).is_some() {
            return Err(SumError::Duplicate(format!("({side}, {m}, {q})")));
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }
    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn rows(&self) -> impl Iterator<Item = TableRow> + '_ {
        self.entries.iter().map(|((side, m, q), &value)| TableRow { side: *side, m: *m, q: q.clone(), value })
    }

    /// Rejects keys with |m| > g − 1.
    pub fn validate(&self, g: i64) -> Result<(), SumError> {
        for (side, m, q) in self.entries.keys() {
            if m.abs() > g - 1 {
                return Err(SumError::InadmissibleKey { side: *side, m: *m, q: q.clone(), bound: g - 1 });
            }
        }
        Ok(())
    }

    /// Entry-wise a·self + b·other over the union of keys.
    pub fn combine(&self, a: i64, other: &Self, b: i64) -> Self {
        let mut entries = BTreeMap::new();
        for key in self.entries.keys().chain(other.entries.keys()) {
            let v = a * self.entries.get(key).copied().unwrap_or(0) + b * other.entries.get(key).copied().unwrap_or(0);
            entries.insert(key.clone(), v);
        }
        Self { entries }
    }

    /// Renames the zero labels inside every q through `f`.
    pub fn relabeled(&self, f: impl Fn(&str) -> String) -> Self {
        let map = |q: &str| if q == "empty" { q.to_string() } else { q.split('+').map(|p| f(p.trim())).collect::<Vec<_>>().join("+") };
        Self { entries: self.entries.iter().map(|((s, m, q), &v)| ((*s, *m, map(q)), v)).collect() }
    }

    /// Values keyed by parsed sub-multisets, rejecting unknown or repeated labels.
    fn normalized(&self, zeros: &NuZeroSet) -> Result<BTreeMap<(u8, i64, SubDivisor), i64>, SumError> {
        let mut out = BTreeMap::new();
        for ((side, m, q), &v) in &self.entries {
            let sub = zeros.parse_label(q).ok_or_else(|| SumError::UnknownLabel(q.clone()))?;
            if out.insert((*side, *m, sub.clone()), v).is_some() {
                return Err(SumError::Duplicate(format!("({side}, {m}, {})", zeros.label(&sub))));
            }
        }
        Ok(out)
    }

    pub fn read_csv<R: Read>(reader: R) -> Result<Self, SumError> {
        let mut t = Self::new();
        for row in csv::Reader::from_reader(reader).deserialize() {
            let row: TableRow = row?;
            t.insert(row.side, row.m, row.q.trim(), row.value)?;
        }
        Ok(t)
    }

    pub fn write_csv<W: Write>(&self, writer: W) -> Result<(), SumError> {
        let mut w = csv::Writer::from_writer(writer);
        for row in self.rows() {
            w.serialize(row)?;
        }
        w.flush().map_err(|e| SumError::Csv(e.to_string()))
    }
}

/// Orientation signs ε per (m₁, m₂, q); anything absent is +1.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SignTable {
    signs: BTreeMap<(i64, i64, String), i64>,
}

#[derive(Debug, Serialize, Deserialize)]
struct SignRow {
    m1: i64,
    m2: i64,
    q: String,
    sign: i64,
}

impl SignTable {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn set(&mut self, m1: i64, m2: i64, q: &str, sign: i64) -> Result<(), SumError> {
        let key = format!("({m1}, {m2}, {q})");
        if sign != 1 && sign != -1 {
            return Err(SumError::BadSign(key, sign));
        }
        if self.signs.insert((m1, m2, q.to_string()), sign).is_some() {
            return Err(SumError::Duplicate(key));
        }
        Ok(())
    }

    fn normalized(&self, zeros: &NuZeroSet) -> Result<BTreeMap<(i64, i64, SubDivisor), i64>, SumError> {
        let mut out = BTreeMap::new();
        for ((m1, m2, q), &s) in &self.signs {
            let sub = zeros.parse_label(q).ok_or_else(|| SumError::UnknownLabel(q.clone()))?;
            if out.insert((*m1, *m2, sub), s).is_some() {
                return Err(SumError::Duplicate(format!("({m1}, {m2}, {q})")));
            }
        }
        Ok(out)
    }

    pub fn read_csv<R: Read>(reader: R) -> Result<Self, SumError> {
        let mut t = Self::new();
        for row in csv::Reader::from_reader(reader).deserialize() {
            let row: SignRow = row?;
            t.set(row.m1, row.m2, row.q.trim(), row.sign)?;
        }
        Ok(t)
    }

    pub fn write_csv<W: Write>(&self, writer: W) -> Result<(), SumError> {
        let mut w = csv::Writer::from_writer(writer);
        for ((m1, m2, q), &sign) in &self.signs {
            w.serialize(SignRow { m1: *m1, m2: *m2, q: q.clone(), sign })?;
        }
        w.flush().map_err(|e| SumError::Csv(e.to_string()))
    }
}

/// One product ε·SW̃₁·SW̃₂ in the right-hand side.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SumTerm {
    pub m1: i64,
    pub m2: i64,
    pub q: String,
    pub sign: i64,
    pub left: i64,
    pub right: i64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SumReport {
    pub value: i64,
    pub terms: Vec<SumTerm>,
}

/// Σ over splittings and q ∈ S_d(ν) of ε·SW̃₁(𝔰₁; q)·SW̃₂(𝔰₂; q), with every term.
pub fn sum_rhs_report(
    sp: &SplitProblem,
    t1: &RelativeInvariantTable,
    t2: &RelativeInvariantTable,
    zeros: &NuZeroSet,
    signs: &SignTable,
) -> Result<SumReport, SumError> {
    if zeros.genus() != sp.genus() {
        return Err(SumError::ZeroGenus { zeros: zeros.genus(), problem: sp.genus() });
    }
    let (n1, n2) = (t1.normalized(zeros)?, t2.normalized(zeros)?);
    let eps = signs.normalized(zeros)?;
    let mut missing = BTreeSet::new();
    let mut terms = Vec::new();
    let mut value: i64 = 0;
    for (m1, m2) in enumerate_splittings(sp) {
        let d = splitting_degree(sp.genus(), m1);
        for q in perturbed_components(zeros, d)? {
            let label = zeros.label(&q);
            let left = n1.get(&(1, m1, q.clone()));
            let right = n2.get(&(2, m2, q.clone()));
            if left.is_none() {
                missing.insert(format!("(1, {m1}, {label})"));
            }
            if right.is_none() {
                missing.insert(format!("(2, {m2}, {label})"));
            }
            let (Some(&left), Some(&right)) = (left, right) else { continue };
            let sign = eps.get(&(m1, m2, q)).copied().unwrap_or(1);
            let term = left.checked_mul(right).and_then(|x| x.checked_mul(sign)).ok_or(SumError::Overflow)?;
            value = value.checked_add(term).ok_or(SumError::Overflow)?;
            terms.push(SumTerm { m1, m2, q: label, sign, left, right });
        }
    }
    if !missing.is_empty() {
        return Err(SumError::MissingEntries(missing.into_iter().collect()));
    }
    Ok(SumReport { value, terms })
}

pub fn sum_rhs_pointwise(
    sp: &SplitProblem,
    t1: &RelativeInvariantTable,
    t2: &RelativeInvariantTable,
    zeros: &NuZeroSet,
    signs: &SignTable,
) -> Result<i64, SumError> {
    Ok(sum_rhs_report(sp, t1, t2, zeros, signs)?.value)
}

/// Σ_{q ∈ S_d(ν)} SW̃(𝔰; q) for one side and m, with d = g − 1 − |m|.
pub fn total_adapted_invariant(
    table: &RelativeInvariantTable,
    side: u8,
    m: i64,
    zeros: &NuZeroSet,
) -> Result<i64, SumError> {
    let n = table.normalized(zeros)?;
    let d = splitting_degree(zeros.genus(), m);
    let mut total: i64 = 0;
    let mut missing = Vec::new();
    for q in perturbed_components(zeros, d)? {
        match n.get(&(side, m, q.clone())) {
            Some(&v) => total = total.checked_add(v).ok_or(SumError::Overflow)?,
            None => missing.push(format!("({side}, {m}, {})", zeros.label(&q))),
        }
    }
    if !missing.is_empty() {
        return Err(SumError::MissingEntries(missing));
    }
    Ok(total)
}

/// Betti numbers b₀ … b_{2d} of Sym^d(Σ_g), read off from
/// Σ_d P_t(Sym^d Σ) xᵈ = (1 + xt)^{2g} / ((1 − x)(1 − xt²)).
pub fn poincare_polynomial_symd(g: u32, d: u32) -> Vec<u128> {
    let n = 2 * g as u128;
    let mut b = vec![0u128; 2 * d as usize + 1];
    // xᵃtᵃ from the numerator, x^c t^{2c} and x^{d−a−c} from the denominators.
    for a in 0..=d.min(2 * g) {
        for c in 0..=(d - a) {
            b[(a + 2 * c) as usize] += binomial(n, a as u128);
        }
    }
    b
}

/// χ(Sym^d Σ_g) = coefficient of xᵈ in (1 − x)^{2g−2}.
pub fn euler_characteristic_symd(g: u32, d: u32) -> i128 {
    let e = 2 * g as i128 - 2;
    // Generalized binomial C(e, d)·(−1)ᵈ, valid for e = −2 as well.
    let mut c: i128 = 1;
    for i in 0..d as i128 {
        c = c * (e - i) / (i + 1);
    }
    if d % 2 == 0 {
        c
    } else {
        -c
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct KunnethTerm {
    /// Cohomological degree of Ω in H*(Sym^d Σ).
    pub deg_omega: u32,
    pub r1: u32,
    pub r2: u32,
    /// b_{deg Ω}(Sym^d Σ), the number of basis classes Ω of that degree.
    pub betti: u128,
}

/// Admissible (deg Ω, r₁, r₂) with deg Ω + 2r₁ = d_sw1 and (2d − deg Ω) + 2r₂ = d_sw2.
///
/// The compact-perturbation invariants behind this ledger assume the
/// tunneling spaces are regular, which is open in general.
pub fn kunneth_degree_ledger(d: u32, g: u32, d_sw1: i64, d_sw2: i64) -> Vec<KunnethTerm> {
    let betti = poincare_polynomial_symd(g, d);
    let mut out = Vec::new();
    for deg in 0..=2 * d {
        let rest1 = d_sw1 - deg as i64;
        let rest2 = d_sw2 - (2 * d - deg) as i64;
        if rest1 < 0 || rest2 < 0 || rest1 % 2 != 0 || rest2 % 2 != 0 || betti[deg as usize] == 0 {
            continue;
        }
        out.push(KunnethTerm { deg_omega: deg, r1: (rest1 / 2) as u32, r2: (rest2 / 2) as u32, betti: betti[deg as usize] });
    }
    out
}

/// A partition t₁ ≤ … ≤ t_k of d.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Partition {
    parts: Vec<u32>,
}

impl Partition {
    pub fn new(mut parts: Vec<u32>) -> Option<Self> {
        if parts.contains(&0) {
            return None;
        }
        parts.sort_unstable();
        Some(Self { parts })
    }
    pub fn parts(&self) -> &[u32] {
        &self.parts
    }
    pub fn total(&self) -> u32 {
        self.parts.iter().sum()
    }
    pub fn len(&self) -> usize {
        self.parts.len()
    }
    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }
}

/// All partitions of d, largest part first in generation order; d = 0 gives
/// the empty partition.
pub fn partitions_of(d: u32) -> Vec<Partition> {
    fn rec(rest: u32, max: u32, cur: &mut Vec<u32>, out: &mut Vec<Partition>) {
        if rest == 0 {
            out.push(Partition::new(cur.clone()).expect("parts are positive"));
            return;
        }
        for p in (1..=rest.min(max)).rev() {
            cur.push(p);
            rec(rest - p, p, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(d, d, &mut Vec::new(), &mut out);
    out
}

/// Div_t(Σ) ≅ Sym^{i₁}(Σ) × … × Sym^{iₙ}(Σ).
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DivTModel {
    /// Multiplicity of each distinct part, by increasing part value.
    pub factors: Vec<u32>,
    pub real_dimension: u32,
    /// Codegree 2(d − k) of its Poincaré dual in Sym^d(Σ).
    pub codegree: u32,
    /// Betti numbers of the product.
    pub poincare: Vec<u128>,
}

pub fn div_t_model(t: &Partition, g: u32) -> DivTModel {
    let mut groups: BTreeMap<u32, u32> = BTreeMap::new();
    for &p in t.parts() {
        *groups.entry(p).or_default() += 1;
    }
    let factors: Vec<u32> = groups.values().copied().collect();
    let mut poincare = vec![1u128];
    for &i in &factors {
        let f = poincare_polynomial_symd(g, i);
        let mut next = vec![0u128; poincare.len() + f.len() - 1];
        for (a, x) in poincare.iter().enumerate() {
            for (b, y) in f.iter().enumerate() {
                next[a + b] += x * y;
            }
        }
        poincare = next;
    }
    let k = t.len() as u32;
    DivTModel { factors, real_dimension: 2 * k, codegree: 2 * (t.total() - k), poincare }
}

/// χ, σ and c₁(L)² of the glued manifold as supplied by the user.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GluedData {
    pub euler: i64,
    pub signature: i64,
    pub c1_square: i64,
}

/// Checks the gluing arithmetic χ = χ₁ + χ₂ − 2(2 − 2g), σ = σ₁ + σ₂.
fn check_gluing(p1: &PairXSigma, p2: &PairXSigma, glued: &GluedData) -> Result<(), SumError> {
    let (x1, x2) = (p1.manifold(), p2.manifold());
    let euler = x1.euler() + x2.euler() - 2 * (2 - 2 * p1.genus());
    if glued.euler != euler {
        return Err(SumError::InconsistentGluing { quantity: "euler characteristic", given: glued.euler, expected: euler });
    }
    let signature = x1.signature() + x2.signature();
    if glued.signature != signature {
        return Err(SumError::InconsistentGluing { quantity: "signature", given: glued.signature, expected: signature });
    }
    Ok(())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct AdditivityReport {
    pub glued_dimension: i64,
    pub adapted1: i64,
    pub adapted2: i64,
    pub additive: bool,
}

/// Whether the glued expected dimension equals d̃₁ + d̃₂ for the splitting.
pub fn dimension_additivity_check(
    sp: &SplitProblem,
    splitting: (i64, i64),
    s1: &LogSpinc,
    s2: &LogSpinc,
    glued: &GluedData,
) -> Result<AdditivityReport, SumError> {
    for (side, s, m) in [(1u8, s1, splitting.0), (2, s2, splitting.1)] {
        if s.m() != HalfInt::from_int(m) {
            return Err(SumError::SplittingMismatch { side, expected: m, got: s.m() });
        }
        if s.pair() != sp.pair(side) {
            return Err(SumError::WrongPair(side));
        }
    }
    check_gluing(sp.pair(1), sp.pair(2), glued)?;
    let glued_dimension = classic_closed_from_numbers(glued.c1_square, glued.euler, glued.signature)?;
    let (adapted1, adapted2) = (dim_adapted(s1)?, dim_adapted(s2)?);
    Ok(AdditivityReport { glued_dimension, adapted1, adapted2, additive: glued_dimension == adapted1 + adapted2 })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct ReducibleDefect {
    pub reducible1: i64,
    pub reducible2: i64,
    /// d_𝒥(X₁) + d_𝒥(X₂) − 2g, the fiber product over the Jacobian torus.
    pub fiber_product: i64,
    pub glued_dimension: i64,
    pub defect: i64,
}

/// Glued expected dimension minus the dimension of the reducible fiber product.
///
/// The curvature of the reducible limit differs from c₁(L_{𝔰ₖ}) by
/// c₁(A)² − c₁(L)² = −4k²/Σ·Σ on each side; the glued c₁² is the sum of the
/// two c₁(A)² and χ, σ add over the complements.
pub fn reducible_defect(s1: &LogSpinc, s2: &LogSpinc) -> Result<ReducibleDefect, SumError> {
    let (p1, p2) = (s1.pair(), s2.pair());
    if p1.genus() != p2.genus() {
        return Err(SumError::GenusMismatch(p1.genus(), p2.genus()));
    }
    if p1.sigma_self() != -p2.sigma_self() {
        return Err(SumError::NotDual(p1.sigma_self(), p2.sigma_self()));
    }
    let ell = p1.sigma_self().abs();
    let (k1, k2) = (s1.m(), s2.m());
    match (k1.as_integer(), k2.as_integer()) {
        (Some(a), Some(b)) if a > 0 && a < ell && b == ell - a => {}
        _ => return Err(SumError::TorsionPairing { k1, k2, ell }),
    }
    let (r1, r2) = (dim_reducible(s1)?, dim_reducible(s2)?);
    let curvature = |s: &LogSpinc| -> Result<Rational, SumError> {
        let k = s.m().to_rational();
        let c1 = s.c1_square().map_err(DimensionError::from)?;
        Ok(Rational::from_integer(c1) - k * k * 4 / Rational::from_integer(s.pair().sigma_self()))
    };
    let c1_sq = curvature(s1)? + curvature(s2)?;
    let c1_square = rational_to_int(&c1_sq).ok_or_else(|| SumError::NonIntegralSquare(c1_sq.to_string()))?;
    let euler = p1.euler_complement() + p2.euler_complement();
    let signature = p1.signature_complement() + p2.signature_complement();
    let glued_dimension = classic_closed_from_numbers(c1_square, euler, signature)?;
    let fiber_product = r1 + r2 - 2 * p1.genus();
    Ok(ReducibleDefect { reducible1: r1, reducible2: r2, fiber_product, glued_dimension, defect: glued_dimension - fiber_product })
}

/// Labels of every key a complete table for `sp` must contain on `side`.
pub fn required_keys(sp: &SplitProblem, zeros: &NuZeroSet, side: u8) -> Result<BTreeSet<(i64, String)>, SumError> {
    let mut keys = BTreeSet::new();
    for (m1, m2) in enumerate_splittings(sp) {
        let m = if side == 1 { m1 } else { m2 };
        for q in perturbed_components(zeros, splitting_degree(sp.genus(), m))? {
            keys.insert((m, zeros.label(&q)));
        }
    }
    Ok(keys)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::topology::{build_pair, catalog, ClosedFourManifold, HomologyClass, IntersectionForm};
    use proptest::prelude::*;

    /// CP² # −CP² with Σ = aH + bE of genus g.
    fn blowup_pair(a: i64, b: i64, g: i64) -> PairXSigma {
        let form = IntersectionForm::new(vec![vec![1, 0], vec![0, -1]]).unwrap();
        let x = ClosedFourManifold::new("CP2#-CP2", 4, 0, 1, form).unwrap();
        build_pair(x, HomologyClass::new(vec![a, b]), g, 1).unwrap()
    }

    fn dual_problem(g: i64, residues: (i64, i64)) -> SplitProblem {
        // Σ·Σ = −3 and +3.
        SplitProblem::new(blowup_pair(1, 2, g), blowup_pair(2, 1, g), residues).unwrap()
    }

    fn unit_problem(g: i64) -> SplitProblem {
        // Σ·Σ = ∓1, so every residue class is everything.
        let form = IntersectionForm::new(vec![vec![1]]).unwrap();
        let cp2 = ClosedFourManifold::new("CP2", 3, 1, 1, form).unwrap();
        let neg = IntersectionForm::new(vec![vec![-1]]).unwrap();
        let cp2bar = ClosedFourManifold::new("-CP2", 3, -1, 0, neg).unwrap();
        let p1 = build_pair(cp2bar, HomologyClass::new(vec![1]), g, 0).unwrap();
        let p2 = build_pair(cp2, HomologyClass::new(vec![1]), g, 1).unwrap();
        SplitProblem::new(p1, p2, (0, 0)).unwrap()
    }

    /// Brute force over the whole integer grid |m| ≤ 10.
    fn splittings_oracle(sp: &SplitProblem) -> Vec<(i64, i64)> {
        let g = sp.genus();
        let ok = |side: u8, m: i64| {
            let ell = (-sp.pair(side).sigma_self()).abs();
            let rho = if side == 1 { sp.residues().0 } else { sp.residues().1 };
            m != 0 && m.abs() < g && (ell == 0 || (m + g - 1 - rho) % ell == 0)
        };
        let mut out = vec![];
        for m1 in -10..=10 {
            for m2 in -10..=10 {
                if ok(1, m1) && ok(2, m2) && m1.abs() == m2.abs() {
                    out.push((m1, m2));
                }
            }
        }
        out
    }

    #[test]
    fn splitting_examples() {
        let sp = unit_problem(2);
        let s = enumerate_splittings(&sp);
        assert_eq!(s.len(), 4);
        assert!(s.iter().all(|(a, b)| a.abs() == 1 && b.abs() == 1));
        assert!(enumerate_splittings(&unit_problem(1)).is_empty());
        // ℓ₁ = 3, g = 2: deg(E) = m + 1 ≡ 0 keeps only m₁ = −1.
        let sp = dual_problem(2, (0, 0));
        assert!(enumerate_splittings(&sp).iter().all(|&(m1, _)| m1 == -1));
        for g in 1..6 {
            for r1 in 0..3 {
                for r2 in 0..3 {
                    let sp = dual_problem(g, (r1, r2));
                    assert_eq!(enumerate_splittings(&sp), splittings_oracle(&sp));
                }
            }
        }
    }

    #[test]
    fn split_problem_validation() {
        assert!(matches!(
            SplitProblem::new(blowup_pair(1, 2, 2), blowup_pair(1, 2, 2), (0, 0)),
            Err(SumError::NotDual(-3, -3))
        ));
        assert!(matches!(
            SplitProblem::new(blowup_pair(1, 2, 2), blowup_pair(2, 1, 3), (0, 0)),
            Err(SumError::GenusMismatch(2, 3))
        ));
    }

    fn constant_tables(sp: &SplitProblem, zeros: &NuZeroSet, v1: i64, v2: i64) -> (RelativeInvariantTable, RelativeInvariantTable) {
        let mut t1 = RelativeInvariantTable::new();
        let mut t2 = RelativeInvariantTable::new();
        for (m, q) in required_keys(sp, zeros, 1).unwrap() {
            t1.insert(1, m, &q, v1).unwrap();
        }
        for (m, q) in required_keys(sp, zeros, 2).unwrap() {
            t2.insert(2, m, &q, v2).unwrap();
        }
        (t1, t2)
    }

    #[test]
    fn rhs_examples() {
        let sp = unit_problem(3);
        let zeros = NuZeroSet::simple(3).unwrap();
        let (t1, t2) = constant_tables(&sp, &zeros, 0, 0);
        assert_eq!(sum_rhs_pointwise(&sp, &t1, &t2, &zeros, &SignTable::new()).unwrap(), 0);

        // g = 3: |m| = 1 gives d = 1, |m| = 2 gives d = 0.
        let (t1, t2) = constant_tables(&sp, &zeros, 1, 1);
        let report = sum_rhs_report(&sp, &t1, &t2, &zeros, &SignTable::new()).unwrap();
        let per = |m: i64| report.terms.iter().filter(|t| t.m1.abs() == m).count() as i64;
        assert_eq!(per(1), 4 * 4);
        assert_eq!(per(2), 4);

        // g = 2, m = ±1: d = 0, S₀ = {∅}.
        let sp = unit_problem(2);
        let zeros = NuZeroSet::simple(2).unwrap();
        let (t1, t2) = constant_tables(&sp, &zeros, 2, 3);
        assert_eq!(sum_rhs_pointwise(&sp, &t1, &t2, &zeros, &SignTable::new()).unwrap(), 6 * 4);
        let mut signs = SignTable::new();
        signs.set(1, -1, "empty", -1).unwrap();
        assert_eq!(sum_rhs_pointwise(&sp, &t1, &t2, &zeros, &signs).unwrap(), 6 * 2);

        // Residues leaving the single splitting (−1, −1).
        let sp = dual_problem(2, (0, 0));
        assert_eq!(enumerate_splittings(&sp), vec![(-1, -1)]);
        let (t1, t2) = constant_tables(&sp, &zeros, 2, 3);
        assert_eq!(sum_rhs_pointwise(&sp, &t1, &t2, &zeros, &SignTable::new()).unwrap(), 6);
    }

    #[test]
    fn rhs_counts_subsets_for_d_two() {
        // g = 4, |m| = 1: d = 2 over six simple zeros.
        let sp = unit_problem(4);
        let zeros = NuZeroSet::simple(4).unwrap();
        let (t1, t2) = constant_tables(&sp, &zeros, 1, 1);
        let report = sum_rhs_report(&sp, &t1, &t2, &zeros, &SignTable::new()).unwrap();
        for (m1, m2) in [(1, 1), (1, -1), (-1, 1), (-1, -1)] {
            assert_eq!(report.terms.iter().filter(|t| (t.m1, t.m2) == (m1, m2)).count(), 15);
        }
        // g = 3 reaches d = 2 only at m = 0, which splittings exclude; the
        // per-side total still sums over all six subsets.
        let zeros = NuZeroSet::simple(3).unwrap();
        let mut t = RelativeInvariantTable::new();
        for q in perturbed_components(&zeros, 2).unwrap() {
            t.insert(1, 0, &zeros.label(&q), 1).unwrap();
        }
        assert_eq!(total_adapted_invariant(&t, 1, 0, &zeros).unwrap(), 6);
    }

    #[test]
    fn missing_entries_are_named() {
        let sp = unit_problem(2);
        let zeros = NuZeroSet::simple(2).unwrap();
        let (mut t1, t2) = constant_tables(&sp, &zeros, 1, 1);
        t1 = RelativeInvariantTable { entries: t1.entries.into_iter().filter(|(k, _)| k.1 != 1).collect() };
        match sum_rhs_pointwise(&sp, &t1, &t2, &zeros, &SignTable::new()) {
            Err(SumError::MissingEntries(keys)) => assert_eq!(keys, vec!["(1, 1, empty)"]),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn table_csv_round_trip() {
        let mut t = RelativeInvariantTable::new();
        t.insert(1, -1, "p0+p1", 3).unwrap();
        t.insert(2, 1, "empty", -2).unwrap();
        let mut buf = Vec::new();
        t.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("side,m,q,value\n"));
        assert!(!text.contains('\r'));
        assert_eq!(RelativeInvariantTable::read_csv(&buf[..]).unwrap(), t);
        assert!(RelativeInvariantTable::read_csv("side,m,q,value\n3,0,empty,1\n".as_bytes()).is_err());
        assert!(t.validate(1).is_err());
        assert!(t.validate(2).is_ok());

        let mut s = SignTable::new();
        s.set(1, -1, "p0", -1).unwrap();
        assert!(s.set(1, 1, "p0", 2).is_err());
        let mut buf = Vec::new();
        s.write_csv(&mut buf).unwrap();
        assert_eq!(SignTable::read_csv(&buf[..]).unwrap(), s);
    }

    /// Σ_k C(2g, k − 2i) for k ≤ d, mirrored by Poincaré duality.
    fn betti_direct(g: u32, d: u32) -> Vec<u128> {
        let top = 2 * d as usize;
        let mut b = vec![0u128; top + 1];
        for k in 0..=d as usize {
            let mut s = 0u128;
            let mut i = 0;
            while 2 * i <= k {
                let j = k - 2 * i;
                if j <= 2 * g as usize {
                    let mut c = 1u128;
                    for t in 0..j {
                        c = c * (2 * g as u128 - t as u128) / (t as u128 + 1);
                    }
                    s += c;
                }
                i += 1;
            }
            b[k] = s;
            b[top - k] = s;
        }
        b
    }

    #[test]
    fn poincare_examples() {
        assert_eq!(poincare_polynomial_symd(4, 0), vec![1]);
        for g in 0..=10 {
            assert_eq!(poincare_polynomial_symd(g, 1), vec![1, 2 * g as u128, 1]);
        }
        assert_eq!(poincare_polynomial_symd(2, 2), betti_direct(2, 2));
        assert_eq!(poincare_polynomial_symd(2, 2), vec![1, 4, 7, 4, 1]);
        for g in 0..7 {
            for d in 0..9 {
                let b = poincare_polynomial_symd(g, d);
                assert_eq!(b, betti_direct(g, d), "g={g} d={d}");
                let chi: i128 = b.iter().enumerate().map(|(k, &x)| if k % 2 == 0 { x as i128 } else { -(x as i128) }).sum();
                assert_eq!(chi, euler_characteristic_symd(g, d), "g={g} d={d}");
            }
        }
    }

    #[test]
    fn kunneth_examples() {
        let l = kunneth_degree_ledger(0, 2, 4, 2);
        assert_eq!(l.iter().map(|t| (t.deg_omega, t.r1, t.r2)).collect::<Vec<_>>(), vec![(0, 2, 1)]);
        assert!(kunneth_degree_ledger(0, 2, 3, 2).is_empty());
        let l = kunneth_degree_ledger(1, 2, 2, 2);
        assert_eq!(l.iter().map(|t| (t.deg_omega, t.r1, t.r2)).collect::<Vec<_>>(), vec![(0, 1, 0), (2, 0, 1)]);
        let l = kunneth_degree_ledger(1, 2, 3, 1);
        assert_eq!(l.iter().map(|t| (t.deg_omega, t.r1, t.r2, t.betti)).collect::<Vec<_>>(), vec![(1, 1, 0, 4)]);
        // On a sphere the odd classes vanish.
        assert!(kunneth_degree_ledger(1, 0, 3, 1).is_empty());
    }

    /// Euler's pentagonal recurrence, independent of the enumeration.
    fn partition_count(n: usize) -> u64 {
        let mut p = vec![0i64; n + 1];
        p[0] = 1;
        for i in 1..=n {
            let mut k = 1i64;
            loop {
                let g1 = (k * (3 * k - 1) / 2) as usize;
                if g1 > i {
                    break;
                }
                let sign = if k % 2 == 1 { 1 } else { -1 };
                p[i] += sign * p[i - g1];
                let g2 = (k * (3 * k + 1) / 2) as usize;
                if g2 <= i {
                    p[i] += sign * p[i - g2];
                }
                k += 1;
            }
        }
        p[n] as u64
    }

    #[test]
    fn partition_examples() {
        let p3: Vec<Vec<u32>> = partitions_of(3).iter().map(|p| p.parts().to_vec()).collect();
        assert_eq!(p3, vec![vec![3], vec![1, 2], vec![1, 1, 1]]);
        assert_eq!(partitions_of(0), vec![Partition::new(vec![]).unwrap()]);
        assert_eq!(partitions_of(1).len(), 1);
        for d in 0..=20 {
            let ps = partitions_of(d);
            assert_eq!(ps.len() as u64, partition_count(d as usize), "d={d}");
            assert_eq!(ps.iter().collect::<BTreeSet<_>>().len(), ps.len());
            assert!(ps.iter().all(|p| p.total() == d));
        }
    }

    #[test]
    fn div_t_examples() {
        let m = div_t_model(&Partition::new(vec![1, 1, 1]).unwrap(), 2);
        assert_eq!((m.factors.clone(), m.real_dimension, m.codegree), (vec![3], 6, 0));
        assert_eq!(m.poincare, poincare_polynomial_symd(2, 3));
        let m = div_t_model(&Partition::new(vec![2, 1]).unwrap(), 2);
        assert_eq!((m.factors, m.real_dimension, m.codegree), (vec![1, 1], 4, 2));
        let m = div_t_model(&Partition::new(vec![2, 2, 5]).unwrap(), 1);
        assert_eq!((m.factors, m.real_dimension), (vec![2, 1], 6));
        for d in 0..=10 {
            for t in partitions_of(d) {
                let m = div_t_model(&t, 2);
                assert_eq!(m.factors.iter().map(|i| 2 * i).sum::<u32>(), m.real_dimension);
                assert_eq!(m.poincare.len() as u32, m.real_dimension + 1);
                assert_eq!(m.real_dimension + m.codegree, 2 * d);
            }
        }
    }

    fn elliptic_spinc(n: i64, k: i64) -> LogSpinc {
        let e = catalog::elliptic_surface(n).unwrap();
        let pair = build_pair(e.manifold.clone(), e.fiber.clone(), 1, e.manifold.b_plus()).unwrap();
        LogSpinc::from_twisting(&pair, &e.canonical, e.fiber.scaled(k)).unwrap()
    }

    fn elliptic_problem(a: i64, b: i64) -> SplitProblem {
        SplitProblem::new(elliptic_spinc(a, 0).pair().clone(), elliptic_spinc(b, 0).pair().clone(), (0, 0)).unwrap()
    }

    #[test]
    fn elliptic_fiber_sums_are_additive() {
        for (a, b, k) in [(1, 1, 0), (1, 1, 2), (1, 2, 0), (2, 2, 1)] {
            let sp = elliptic_problem(a, b);
            let (s1, s2) = (elliptic_spinc(a, k), elliptic_spinc(b, k));
            let target = catalog::elliptic_surface(a + b).unwrap().manifold;
            let glued = GluedData { euler: target.euler(), signature: target.signature(), c1_square: 0 };
            let r = dimension_additivity_check(&sp, (0, 0), &s1, &s2, &glued).unwrap();
            assert_eq!((r.glued_dimension, r.adapted1, r.adapted2, r.additive), (0, 0, 0, true), "E({a})#E({b})");
        }
        let sp = elliptic_problem(1, 1);
        let glued = GluedData { euler: 24, signature: -15, c1_square: 0 };
        let r = dimension_additivity_check(&sp, (0, 0), &elliptic_spinc(1, 0), &elliptic_spinc(1, 0), &glued);
        assert!(matches!(r, Err(SumError::InconsistentGluing { quantity: "signature", .. })));
    }

    /// s_k on each side of the Σ·Σ = ∓3 problem: c₁ + Σ characteristic and
    /// c₁·Σ = 2k.
    fn reducible_pair(k1: i64) -> (LogSpinc, LogSpinc) {
        let sp = dual_problem(2, (0, 0));
        let k2 = 3 - k1;
        let s1 = LogSpinc::from_c1(sp.pair(1), HomologyClass::new(vec![2 * k1 - 2, -1])).unwrap();
        let s2 = LogSpinc::from_c1(sp.pair(2), HomologyClass::new(vec![1, 2 - 2 * k2])).unwrap();
        assert_eq!((s1.m(), s2.m()), (HalfInt::from_int(k1), HalfInt::from_int(k2)));
        (s1, s2)
    }

    #[test]
    fn reducible_defect_is_one() {
        for k in 1..3 {
            let (s1, s2) = reducible_pair(k);
            assert_eq!(reducible_defect(&s1, &s2).unwrap().defect, 1, "k={k}");
        }
        let (s1, _) = reducible_pair(1);
        assert!(matches!(reducible_defect(&s1, &s1), Err(SumError::NotDual(..))));
        let (s1, s2) = reducible_pair(1);
        let (_, s2b) = reducible_pair(2);
        assert!(reducible_defect(&s1, &s2b).is_err());
        assert!(reducible_defect(&s1, &s2).is_ok());
    }

    fn small_table() -> impl Strategy<Value = Vec<i64>> {
        prop::collection::vec(-5i64..5, 16)
    }

    fn table_from(values: &[i64], sp: &SplitProblem, zeros: &NuZeroSet, side: u8) -> RelativeInvariantTable {
        let mut t = RelativeInvariantTable::new();
        for ((m, q), v) in required_keys(sp, zeros, side).unwrap().into_iter().zip(values.iter().cycle()) {
            t.insert(side, m, &q, *v).unwrap();
        }
        t
    }

    proptest! {
        #[test]
        fn rhs_is_bilinear(a in small_table(), b in small_table(), c in small_table(), k in -4i64..4) {
            let sp = unit_problem(3);
            let zeros = NuZeroSet::simple(3).unwrap();
            let signs = SignTable::new();
            let (ta, tb, tc) = (table_from(&a, &sp, &zeros, 1), table_from(&b, &sp, &zeros, 1), table_from(&c, &sp, &zeros, 2));
            let f = |x: &RelativeInvariantTable, y: &RelativeInvariantTable| sum_rhs_pointwise(&sp, x, y, &zeros, &signs).unwrap();
            prop_assert_eq!(f(&ta.combine(1, &tb, 1), &tc), f(&ta, &tc) + f(&tb, &tc));
            prop_assert_eq!(f(&ta.combine(k, &tb, 0), &tc), k * f(&ta, &tc));
            let tc2 = tc.combine(k, &tc, 0);
            prop_assert_eq!(f(&ta, &tc2), k * f(&ta, &tc));
        }

        #[test]
        fn totals_survive_relabeling(values in small_table(), perm in Just((0..4).collect::<Vec<usize>>()).prop_shuffle()) {
            let zeros = NuZeroSet::simple(3).unwrap();
            let sp = unit_problem(3);
            let t = table_from(&values, &sp, &zeros, 1);
            let rename = |l: &str| format!("p{}", perm[l[1..].parse::<usize>().unwrap()]);
            let (z2, t2) = (zeros.relabeled(rename), t.relabeled(rename));
            for m in [-2i64, -1, 1, 2] {
                prop_assert_eq!(total_adapted_invariant(&t, 1, m, &zeros).unwrap(), total_adapted_invariant(&t2, 1, m, &z2).unwrap());
            }
        }
    }
}
