//! Exact evaluation of the dimension and ξ-invariant formulas.
//!
//! Everything here is integer or rational arithmetic. Two routes are
//! computed for the main dimension:
//!
//! * topological: `((c₁(L) + Σ)² − 2χ(X) − 3σ(X)) / 4`;
//! * cylindrical: `(c₁(L)² − 2χ(X−Σ) − 3σ(X−Σ)) / 4 + ξ`, with
//!   `ξ = deg(E_Σ) + ¼(Σ·Σ − 3ε)` and `deg(E_Σ) = m + g − 1`.
//!
//! The adapted dimension is `d̃ = d − d(𝔰)`. Its cylindrical route uses
//! `ξ̃ = ¼(Σ·Σ − 3ε)`, which reproduces `d − deg(E_Σ)`; that equals
//! `d − d(𝔰)` on the branch `m ≤ 0`, so the adapted route is checked there.

use serde::Serialize;
use thiserror::Error;

use crate::rational::{fmt_rational, rational_to_int, serialize_rational, HalfInt, Rational};
use crate::spinc::{degree_along_sigma, LogSpinc};
use crate::topology::{ClosedFourManifold, HomologyClass, PairXSigma, TopologyError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DimensionError {
    #[error(transparent)]
    Topology(#[from] TopologyError),
    #[error("non-characteristic input: numerator {numerator} is not divisible by 4")]
    NonCharacteristic { numerator: i64 },
    #[error("degree along Sigma d(s) = {0} is not an integer")]
    HalfIntegralDegree(HalfInt),
    #[error("reducible-end dimension requires l != 0")]
    ReducibleNeedsNonzeroDegree,
    #[error("reducible-end dimension unsupported when g - 1 = {g_minus_one} is divisible by l = {ell}")]
    ReducibleResonant { g_minus_one: i64, ell: i64 },
    #[error("torsion index k = {k} must satisfy 0 < k < |l| = {abs_ell}")]
    TorsionOutOfRange { k: HalfInt, abs_ell: i64 },
    #[error("reducible-end dimension {0} is not an integer")]
    NonIntegralReducible(String),
    #[error("tunneling class violates b_minus - b_plus = a*l ({b_minus} - {b_plus} != {a}*{ell})")]
    TunnelingConstraint { a: i64, b_plus: i64, b_minus: i64, ell: i64 },
    #[error("wall-crossing delta needs an even dimension, got {0}")]
    OddDimension(i64),
    #[error("route mismatch: topological {topological} vs cylindrical {cylindrical}")]
    RouteMismatch { topological: String, cylindrical: String },
}

/// All dimension data for one log spin^c structure.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DimensionReport {
    pub m: HalfInt,
    pub degree_along_sigma: HalfInt,
    pub d_main: i64,
    pub d_adapted: i64,
    pub d_reducible: Option<i64>,
    #[serde(serialize_with = "serialize_rational")]
    pub xi_compact: Rational,
    #[serde(serialize_with = "serialize_rational")]
    pub xi_adapted: Rational,
    pub route_check: bool,
}

fn quarter_exact(numerator: i64) -> Result<i64, DimensionError> {
    if numerator.rem_euclid(4) != 0 {
        return Err(DimensionError::NonCharacteristic { numerator });
    }
    Ok(numerator / 4)
}

/// ¼(Σ·Σ − 3ε).
fn sigma_term(pair: &PairXSigma) -> Rational {
    Rational::new(pair.sigma_self() - 3 * pair.epsilon(), 4)
}

/// `(c₁(L)² − 2χ(X−Σ) − 3σ(X−Σ)) / 4` as a rational.
fn complement_base(pair: &PairXSigma, c1_square: i64) -> Rational {
    Rational::new(c1_square - 2 * pair.euler_complement() - 3 * pair.signature_complement(), 4)
}

/// ξ for the compact perturbation: `deg(E_Σ) + ¼(Σ·Σ − 3ε)`.
pub fn xi_compact(s: &LogSpinc) -> Rational {
    s.deg_e_sigma().to_rational() + sigma_term(s.pair())
}

/// ξ for adapted perturbations: `¼(Σ·Σ − 3ε)`.
pub fn xi_adapted(pair: &PairXSigma) -> Rational {
    sigma_term(pair)
}

/// Both routes for the main dimension.
pub fn dim_main_routes(s: &LogSpinc) -> Result<(i64, Rational), DimensionError> {
    let pair = s.pair();
    let x = pair.manifold();
    let shifted = s.c1() + pair.sigma();
    let top = quarter_exact(x.square(&shifted)? - 2 * x.euler() - 3 * x.signature())?;
    let cyl = complement_base(pair, s.c1_square()?) + xi_compact(s);
    Ok((top, cyl))
}

/// Main dimension (cylindrical-end moduli space).
pub fn dim_main(s: &LogSpinc) -> Result<i64, DimensionError> {
    let (top, cyl) = dim_main_routes(s)?;
    if Rational::from_integer(top) != cyl {
        return Err(DimensionError::RouteMismatch {
            topological: top.to_string(),
            cylindrical: fmt_rational(&cyl),
        });
    }
    Ok(top)
}

fn integral_degree(s: &LogSpinc) -> Result<i64, DimensionError> {
    let d = degree_along_sigma(s);
    d.as_integer().ok_or(DimensionError::HalfIntegralDegree(d))
}

/// Adapted dimension `d − d(𝔰)`.
pub fn dim_adapted(s: &LogSpinc) -> Result<i64, DimensionError> {
    Ok(dim_main(s)? - integral_degree(s)?)
}

/// Cylindrical route for the adapted dimension, valid on the branch m ≤ 0.
pub fn dim_adapted_route(s: &LogSpinc) -> Result<Option<Rational>, DimensionError> {
    if s.m().signum() > 0 {
        return Ok(None);
    }
    Ok(Some(complement_base(s.pair(), s.c1_square()?) + xi_adapted(s.pair())))
}

/// Symplectic shortcuts `(𝔢·𝔢 − K·𝔢, adapted form)` when `s` was built from a
/// twisting class on a manifold with `K² = 2χ + 3σ`.
///
/// The adapted form is `𝔢·𝔢 − (K + Σ)·𝔢` on the branch m ≤ 0 and
/// `𝔢·𝔢 − K·𝔢 − (2g − 2 − 𝔢·Σ)` for m > 0.
pub fn symplectic_shortcuts(s: &LogSpinc) -> Result<Option<(i64, i64)>, DimensionError> {
    let Some(sym) = s.symplectic() else { return Ok(None) };
    let pair = s.pair();
    let x = pair.manifold();
    if x.square(&sym.canonical)? != 2 * x.euler() + 3 * x.signature() {
        return Ok(None);
    }
    let e = &sym.twisting;
    let ee = x.square(e)?;
    let ke = x.pair(&sym.canonical, e)?;
    let es = x.pair(e, pair.sigma())?;
    let main = ee - ke;
    let adapted = if s.m().signum() > 0 { main - (2 * pair.genus() - 2 - es) } else { main - es };
    Ok(Some((main, adapted)))
}

/// Reducible-end dimension for `s_k` with `½·deg(L_Σ) = k`, `0 < k < |ℓ|`.
pub fn dim_reducible(s_k: &LogSpinc) -> Result<i64, DimensionError> {
    let pair = s_k.pair();
    let ell = -pair.sigma_self();
    let g = pair.genus();
    if ell == 0 {
        return Err(DimensionError::ReducibleNeedsNonzeroDegree);
    }
    if (g - 1).rem_euclid(ell.abs()) == 0 {
        return Err(DimensionError::ReducibleResonant { g_minus_one: g - 1, ell });
    }
    let k = s_k.m();
    let k_int = match k.as_integer() {
        Some(v) if v > 0 && v < ell.abs() => v,
        _ => return Err(DimensionError::TorsionOutOfRange { k, abs_ell: ell.abs() }),
    };
    let eps = pair.epsilon();
    let value = complement_base(pair, s_k.c1_square()?)
        + Rational::new(2 * g - 1, 2)
        + Rational::new(pair.sigma_self() - eps, 4)
        - Rational::from_integer(k_int * eps);
    rational_to_int(&value).ok_or_else(|| DimensionError::NonIntegralReducible(fmt_rational(&value)))
}

/// Tunneling-class dimensions on P = ℙ(N) over Σ₋ with 𝔢 = aΣ₋ + b₊F.
///
/// unperturbed: `(a+1)(b₋+b₊) + 2a(1−g)`; adapted: `a(b₋+b₊ + 2(1−g))`.
pub fn dim_tunneling(
    a: i64,
    b_plus: i64,
    b_minus: i64,
    g: i64,
    ell: i64,
    adapted: bool,
) -> Result<i64, DimensionError> {
    if b_minus - b_plus != a * ell {
        return Err(DimensionError::TunnelingConstraint { a, b_plus, b_minus, ell });
    }
    let b = b_minus + b_plus;
    Ok(if adapted { a * (b + 2 * (1 - g)) } else { (a + 1) * b + 2 * a * (1 - g) })
}

/// `(c₁(L)² − 2χ − 3σ)/4` on a closed manifold.
pub fn dim_classic_closed(x: &ClosedFourManifold, c1: &HomologyClass) -> Result<i64, DimensionError> {
    classic_closed_from_numbers(x.square(c1)?, x.euler(), x.signature())
}

/// The closed formula from c₁(L)², χ and σ directly.
pub fn classic_closed_from_numbers(c1_square: i64, euler: i64, signature: i64) -> Result<i64, DimensionError> {
    quarter_exact(c1_square - 2 * euler - 3 * signature)
}

/// `−(−1)^{d/2}` for even d (b⁺ = 1 wall-crossing).
pub fn wall_crossing_delta(d: i64) -> Result<i64, DimensionError> {
    if d.rem_euclid(2) != 0 {
        return Err(DimensionError::OddDimension(d));
    }
    Ok(if (d / 2).rem_euclid(2) == 0 { -1 } else { 1 })
}

/// Full report; `d_reducible` is filled when `s` itself satisfies the
/// reducible-end hypotheses.
pub fn dimension_report(s: &LogSpinc) -> Result<DimensionReport, DimensionError> {
    let (top, cyl) = dim_main_routes(s)?;
    let mut route_check = Rational::from_integer(top) == cyl;
    let d_adapted = top - integral_degree(s)?;
    if let Some(r) = dim_adapted_route(s)? {
        route_check &= r == Rational::from_integer(d_adapted);
    }
    if let Some((main, adapted)) = symplectic_shortcuts(s)? {
        route_check &= main == top && adapted == d_adapted;
    }
    Ok(DimensionReport {
        m: s.m(),
        degree_along_sigma: degree_along_sigma(s),
        d_main: top,
        d_adapted,
        d_reducible: dim_reducible(s).ok(),
        xi_compact: xi_compact(s),
        xi_adapted: xi_adapted(s.pair()),
        route_check,
    })
}
