//! Extended nonnegative distances.
//!
//! Distances live in `[0, ∞]`, with `f64::INFINITY` standing for "no finite
//! distance" (points in different coarse components). A `Dist` is never NaN
//! and never negative, so the order is total. Addition absorbs infinity.
//!
//! All inputs in the gallery are integral; sums and minima of integral `f64`
//! values stay exact well past any desk-scale path length, so the integer
//! path needs no separate representation. Comparisons take an additive
//! tolerance which is `0.0` on integral spaces and `1e-9` otherwise.

use std::cmp::Ordering;
use std::fmt;
use std::ops::Add;

use serde::{de, Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Comparison slack used on non-integral inputs.
pub const FLOAT_TOL: f64 = 1e-9;

#[derive(Clone, Copy, PartialEq, PartialOrd)]
pub struct Dist(f64);

impl Dist {
    pub const ZERO: Dist = Dist(0.0);
    pub const ONE: Dist = Dist(1.0);
    pub const INF: Dist = Dist(f64::INFINITY);

    /// Validates a raw value coming from user input.
    pub fn new(value: f64) -> Result<Dist> {
        if value.is_nan() || value < 0.0 {
            return Err(Error::BadParameter(format!(
                "distance must be a nonnegative number or \"inf\", got {value}"
            )));
        }
        Ok(Dist(value))
    }

    /// Wraps a value produced by internal arithmetic.
    ///
    /// Panics on NaN or negative input: those indicate a bug, not bad data.
    pub fn from_raw(value: f64) -> Dist {
        assert!(!value.is_nan() && value >= 0.0, "invalid distance {value}");
        Dist(value)
    }

    pub fn value(self) -> f64 {
        self.0
    }

    pub fn is_finite(self) -> bool {
        self.0.is_finite()
    }

    pub fn is_infinite(self) -> bool {
        self.0.is_infinite()
    }

    /// Infinite values count as integral: the integer path tracks whether all
    /// finite entries are integers.
    pub fn is_integral(self) -> bool {
        self.0.is_infinite() || self.0.fract() == 0.0
    }
}

impl Eq for Dist {}

impl Ord for Dist {
    fn cmp(&self, other: &Self) -> Ordering {
        // No NaN by invariant.
        self.0.partial_cmp(&other.0).unwrap()
    }
}

impl Add for Dist {
    type Output = Dist;
    fn add(self, rhs: Dist) -> Dist {
        Dist(self.0 + rhs.0)
    }
}

impl fmt::Display for Dist {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_infinite() {
            write!(f, "inf")
        } else {
            write!(f, "{}", self.0)
        }
    }
}

impl fmt::Debug for Dist {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl Serialize for Dist {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        if self.0.is_infinite() {
            serializer.serialize_str("inf")
        } else {
            serializer.serialize_f64(self.0)
        }
    }
}

impl<'de> Deserialize<'de> for Dist {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Dist, D::Error> {
        struct V;
        impl<'de> de::Visitor<'de> for V {
            type Value = Dist;
            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                write!(f, "a nonnegative number or the string \"inf\"")
            }
            fn visit_f64<E: de::Error>(self, v: f64) -> std::result::Result<Dist, E> {
                Dist::new(v).map_err(E::custom)
            }
            fn visit_u64<E: de::Error>(self, v: u64) -> std::result::Result<Dist, E> {
                Dist::new(v as f64).map_err(E::custom)
            }
            fn visit_i64<E: de::Error>(self, v: i64) -> std::result::Result<Dist, E> {
                Dist::new(v as f64).map_err(E::custom)
            }
            fn visit_str<E: de::Error>(self, v: &str) -> std::result::Result<Dist, E> {
                if v == "inf" {
                    Ok(Dist::INF)
                } else {
                    Err(E::custom(format!("expected \"inf\", got {v:?}")))
                }
            }
        }
        deserializer.deserialize_any(V)
    }
}

/// `a <= b` up to additive slack.
pub fn le_with(a: Dist, b: Dist, tol: f64) -> bool {
    a.0 <= b.0 + tol
}

/// `a == b` up to additive slack (infinities compare equal to each other).
pub fn eq_with(a: Dist, b: Dist, tol: f64) -> bool {
    a.0 == b.0 || (a.0 - b.0).abs() <= tol
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inf_absorbs() {
        assert_eq!(Dist::INF + Dist::ONE, Dist::INF);
        assert_eq!(Dist::INF + Dist::INF, Dist::INF);
        assert!(Dist::ONE < Dist::INF);
    }

    #[test]
    fn rejects_bad_values() {
        assert!(Dist::new(-1.0).is_err());
        assert!(Dist::new(f64::NAN).is_err());
        assert!(Dist::new(f64::INFINITY).is_ok());
    }

    #[test]
    fn serde_round_trip() {
        let v: Vec<Dist> = vec![Dist::ZERO, Dist::from_raw(2.5), Dist::INF];
        let s = serde_json::to_string(&v).unwrap();
        assert_eq!(s, "[0.0,2.5,\"inf\"]");
        let back: Vec<Dist> = serde_json::from_str(&s).unwrap();
        assert_eq!(v, back);
    }
}
