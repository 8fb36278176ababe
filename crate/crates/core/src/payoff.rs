//! Extended-real payoffs: a finite real or negative infinity.

use std::cmp::Ordering;
use std::fmt;
use std::ops::Add;
use std::str::FromStr;

use serde::de::{self, Deserializer, Visitor};
use serde::{Deserialize, Serialize, Serializer};
use thiserror::Error;

/// A payoff on the extended real line restricted to `[-inf, +inf)`.
///
/// `NegInf` is absorbing under addition and compares below every finite
/// value. There is no positive infinity and no NaN: [`Payoff::finite`]
/// rejects both.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Payoff {
    NegInf,
    Finite(f64),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PayoffError {
    #[error("payoff must be finite or -inf, got {0}")]
    NotExtendedReal(String),
    #[error("cannot parse payoff from {0:?}")]
    Parse(String),
}

impl Payoff {
    pub const ZERO: Payoff = Payoff::Finite(0.0);

    /// Checked constructor. `f64::NEG_INFINITY` maps to [`Payoff::NegInf`].
    pub fn finite(v: f64) -> Result<Self, PayoffError> {
        if v.is_finite() {
            Ok(Payoff::Finite(v))
        } else if v == f64::NEG_INFINITY {
            Ok(Payoff::NegInf)
        } else {
            Err(PayoffError::NotExtendedReal(v.to_string()))
        }
    }

    pub fn is_finite(self) -> bool {
        matches!(self, Payoff::Finite(_))
    }

    pub fn as_finite(self) -> Option<f64> {
        match self {
            Payoff::Finite(v) => Some(v),
            Payoff::NegInf => None,
        }
    }

    /// Lossless view as `f64` (`NegInf` becomes `f64::NEG_INFINITY`).
    pub fn to_f64(self) -> f64 {
        match self {
            Payoff::Finite(v) => v,
            Payoff::NegInf => f64::NEG_INFINITY,
        }
    }

    /// Scale by a probability weight.
    ///
    /// A zero weight yields zero even for `NegInf`, so zero-probability
    /// branches never contaminate an expectation.
    pub fn weighted(self, p: f64) -> Payoff {
        debug_assert!((0.0..=1.0).contains(&p));
        if p == 0.0 {
            return Payoff::ZERO;
        }
        match self {
            Payoff::Finite(v) => Payoff::Finite(p * v),
            Payoff::NegInf => Payoff::NegInf,
        }
    }

    /// Bit-level identity, used by determinism checks.
    pub fn bits_eq(self, other: Payoff) -> bool {
        match (self, other) {
            (Payoff::NegInf, Payoff::NegInf) => true,
            (Payoff::Finite(a), Payoff::Finite(b)) => a.to_bits() == b.to_bits(),
            _ => false,
        }
    }
}

impl Default for Payoff {
    fn default() -> Self {
        Payoff::ZERO
    }
}

/// Panics on NaN or `+inf`; use [`Payoff::finite`] for untrusted input.
impl From<f64> for Payoff {
    fn from(v: f64) -> Self {
        Payoff::finite(v).expect("payoff must be finite or -inf")
    }
}

impl From<i32> for Payoff {
    fn from(v: i32) -> Self {
        Payoff::Finite(f64::from(v))
    }
}

impl Add for Payoff {
    type Output = Payoff;

    fn add(self, rhs: Payoff) -> Payoff {
        match (self, rhs) {
            (Payoff::Finite(a), Payoff::Finite(b)) => Payoff::Finite(a + b),
            _ => Payoff::NegInf,
        }
    }
}

impl Add<f64> for Payoff {
    type Output = Payoff;

    fn add(self, rhs: f64) -> Payoff {
        self + Payoff::Finite(rhs)
    }
}

impl Eq for Payoff {}

impl PartialOrd for Payoff {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Payoff {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Payoff::NegInf, Payoff::NegInf) => Ordering::Equal,
            (Payoff::NegInf, Payoff::Finite(_)) => Ordering::Less,
            (Payoff::Finite(_), Payoff::NegInf) => Ordering::Greater,
            // Finite values are never NaN, and -0.0 == 0.0 under total order here.
            (Payoff::Finite(a), Payoff::Finite(b)) => a.partial_cmp(b).unwrap_or(Ordering::Equal),
        }
    }
}

impl fmt::Display for Payoff {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Payoff::NegInf => f.write_str("-inf"),
            Payoff::Finite(v) => write!(f, "{v}"),
        }
    }
}

impl FromStr for Payoff {
    type Err = PayoffError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if s == "-inf" {
            return Ok(Payoff::NegInf);
        }
        let v: f64 = s.parse().map_err(|_| PayoffError::Parse(s.to_string()))?;
        if !v.is_finite() {
            return Err(PayoffError::Parse(s.to_string()));
        }
        Ok(Payoff::Finite(v))
    }
}

// JSON has no infinities: finite values are numbers, -inf is the string "-inf".
impl Serialize for Payoff {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        match self {
            Payoff::Finite(v) => serializer.serialize_f64(*v),
            Payoff::NegInf => serializer.serialize_str("-inf"),
        }
    }
}

impl<'de> Deserialize<'de> for Payoff {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        struct PayoffVisitor;

        impl Visitor<'_> for PayoffVisitor {
            type Value = Payoff;

            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str("a finite number or the string \"-inf\"")
            }

            fn visit_f64<E: de::Error>(self, v: f64) -> Result<Payoff, E> {
                Payoff::finite(v).map_err(E::custom)
            }

            fn visit_i64<E: de::Error>(self, v: i64) -> Result<Payoff, E> {
                Ok(Payoff::Finite(v as f64))
            }

            fn visit_u64<E: de::Error>(self, v: u64) -> Result<Payoff, E> {
                Ok(Payoff::Finite(v as f64))
            }

            fn visit_str<E: de::Error>(self, v: &str) -> Result<Payoff, E> {
                v.parse().map_err(E::custom)
            }
        }

        deserializer.deserialize_any(PayoffVisitor)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn neg_inf_is_absorbing_and_smallest() {
        assert_eq!(Payoff::NegInf + Payoff::Finite(3.0), Payoff::NegInf);
        assert_eq!(Payoff::Finite(3.0) + Payoff::NegInf, Payoff::NegInf);
        assert!(Payoff::NegInf < Payoff::Finite(-1e300));
        assert_eq!(Payoff::NegInf.cmp(&Payoff::NegInf), Ordering::Equal);
        assert_eq!(Payoff::Finite(1.0) + Payoff::Finite(2.0), Payoff::Finite(3.0));
    }

    #[test]
    fn zero_weight_kills_neg_inf() {
        assert_eq!(Payoff::NegInf.weighted(0.0), Payoff::ZERO);
        assert_eq!(Payoff::NegInf.weighted(0.25), Payoff::NegInf);
        assert_eq!(Payoff::Finite(4.0).weighted(0.5), Payoff::Finite(2.0));
    }

    #[test]
    fn rejects_nan_and_pos_inf() {
        assert!(Payoff::finite(f64::NAN).is_err());
        assert!(Payoff::finite(f64::INFINITY).is_err());
        assert_eq!(Payoff::finite(f64::NEG_INFINITY), Ok(Payoff::NegInf));
        assert!("inf".parse::<Payoff>().is_err());
        assert!("nan".parse::<Payoff>().is_err());
        assert_eq!("-inf".parse::<Payoff>(), Ok(Payoff::NegInf));
        assert_eq!("-2.5".parse::<Payoff>(), Ok(Payoff::Finite(-2.5)));
    }

    #[test]
    fn json_encoding() {
        let v = vec![Payoff::Finite(1.5), Payoff::NegInf, Payoff::Finite(-3.0)];
        let s = serde_json::to_string(&v).unwrap();
        assert_eq!(s, r#"[1.5,"-inf",-3.0]"#);
        let back: Vec<Payoff> = serde_json::from_str(&s).unwrap();
        assert_eq!(back, v);
    }
}
