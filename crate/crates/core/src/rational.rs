//! Exact scalar types shared by the formula modules.

use std::fmt;

use num_rational::Ratio;
use serde::{Deserialize, Serialize};

/// Exact rational number used for ξ-invariants and CSD levels.
pub type Rational = Ratio<i64>;

/// An integer or half-integer, stored as twice its value.
///
/// `m = ½·deg(L_Σ)` is the canonical example: the stored numerator is the
/// integer `deg(L_Σ)` so no parity information is ever lost.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct HalfInt(i64);

impl HalfInt {
    pub const ZERO: HalfInt = HalfInt(0);

    /// The half-integer `twice / 2`.
    pub const fn from_twice(twice: i64) -> Self {
        HalfInt(twice)
    }

    pub const fn from_int(n: i64) -> Self {
        HalfInt(2 * n)
    }

    pub const fn twice(self) -> i64 {
        self.0
    }

    pub const fn is_integer(self) -> bool {
        self.0 % 2 == 0
    }

    /// The value as an integer, if it is one.
    pub const fn as_integer(self) -> Option<i64> {
        if self.is_integer() {
            Some(self.0 / 2)
        } else {
            None
        }
    }

    pub const fn abs(self) -> Self {
        HalfInt(self.0.abs())
    }

    pub const fn signum(self) -> i64 {
        self.0.signum()
    }

    pub fn to_rational(self) -> Rational {
        Rational::new(self.0, 2)
    }
}

impl std::ops::Neg for HalfInt {
    type Output = HalfInt;
    fn neg(self) -> HalfInt {
        HalfInt(-self.0)
    }
}

impl std::ops::Add for HalfInt {
    type Output = HalfInt;
    fn add(self, rhs: HalfInt) -> HalfInt {
        HalfInt(self.0 + rhs.0)
    }
}

impl std::ops::Sub for HalfInt {
    type Output = HalfInt;
    fn sub(self, rhs: HalfInt) -> HalfInt {
        HalfInt(self.0 - rhs.0)
    }
}

impl fmt::Display for HalfInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_integer() {
            write!(f, "{}", self.0 / 2)
        } else {
            write!(f, "{}/2", self.0)
        }
    }
}

impl std::str::FromStr for HalfInt {
    type Err = String;
    /// Accepts `n`, `p/2` and decimal halves such as `-1.5`.
    fn from_str(s: &str) -> Result<Self, String> {
        let s = s.trim();
        if let Some((p, q)) = s.split_once('/') {
            let p: i64 = p.trim().parse().map_err(|_| format!("bad numerator in {s:?}"))?;
            return match q.trim() {
                "1" => Ok(HalfInt::from_int(p)),
                "2" => Ok(HalfInt(p)),
                _ => Err(format!("{s:?} is not a half-integer")),
            };
        }
        if let Ok(n) = s.parse::<i64>() {
            return Ok(HalfInt::from_int(n));
        }
        let x: f64 = s.parse().map_err(|_| format!("{s:?} is not a number"))?;
        HalfInt::try_from(x)
    }
}

impl TryFrom<f64> for HalfInt {
    type Error = String;
    fn try_from(x: f64) -> Result<Self, String> {
        let t = 2.0 * x;
        if t.fract() != 0.0 || !t.is_finite() || t.abs() > 9.0e15 {
            return Err(format!("{x} is not a half-integer"));
        }
        Ok(HalfInt(t as i64))
    }
}

impl Serialize for HalfInt {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for HalfInt {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Int(i64),
            Float(f64),
            Text(String),
        }
        match Raw::deserialize(d)? {
            Raw::Int(n) => Ok(HalfInt::from_int(n)),
            Raw::Float(x) => HalfInt::try_from(x).map_err(serde::de::Error::custom),
            Raw::Text(t) => t.parse().map_err(serde::de::Error::custom),
        }
    }
}

/// Sign of an integer as -1, 0 or 1.
pub const fn sign(n: i64) -> i64 {
    n.signum()
}

/// Formats a rational as `p` or `p/q`.
pub fn fmt_rational(r: &Rational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Serializes a rational as its `p/q` string.
pub fn serialize_rational<S: serde::Serializer>(r: &Rational, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&fmt_rational(r))
}

/// Serializes an optional rational as its `p/q` string or null.
pub fn serialize_opt_rational<S: serde::Serializer>(r: &Option<Rational>, s: S) -> Result<S::Ok, S::Error> {
    match r {
        Some(r) => s.serialize_some(&fmt_rational(r)),
        None => s.serialize_none(),
    }
}

/// Returns the integer value of `r` or `None` when it is not integral.
pub fn rational_to_int(r: &Rational) -> Option<i64> {
    r.is_integer().then(|| r.to_integer())
}
