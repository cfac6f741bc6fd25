use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use serde::de::{self, Deserializer, Visitor};
use serde::{Deserialize, Serialize, Serializer};

use crate::error::Error;

/// A real number extended by an explicit `-inf` sentinel.
///
/// Used for order statistics that do not exist (the `q`-th largest value of
/// fewer than `q` observations). Finite values are never NaN, so the type is
/// totally ordered with `NegInf` below everything.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ExtReal {
    NegInf,
    Finite(f64),
}

pub const NEG_INF: ExtReal = ExtReal::NegInf;

impl ExtReal {
    pub fn finite(x: f64) -> Option<Self> {
        x.is_finite().then_some(ExtReal::Finite(x))
    }

    pub fn is_neg_inf(self) -> bool {
        matches!(self, ExtReal::NegInf)
    }

    pub fn value(self) -> Option<f64> {
        match self {
            ExtReal::NegInf => None,
            ExtReal::Finite(x) => Some(x),
        }
    }

    /// Lossy conversion to `f64` (the sentinel becomes `f64::NEG_INFINITY`).
    pub fn to_f64(self) -> f64 {
        self.value().unwrap_or(f64::NEG_INFINITY)
    }

    /// `self > x` for a finite threshold.
    #[inline]
    pub fn exceeds(self, x: f64) -> bool {
        matches!(self, ExtReal::Finite(v) if v > x)
    }
}

impl Eq for ExtReal {}

impl Ord for ExtReal {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (ExtReal::NegInf, ExtReal::NegInf) => Ordering::Equal,
            (ExtReal::NegInf, _) => Ordering::Less,
            (_, ExtReal::NegInf) => Ordering::Greater,
            (ExtReal::Finite(a), ExtReal::Finite(b)) => a.total_cmp(b),
        }
    }
}

impl PartialOrd for ExtReal {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl From<f64> for ExtReal {
    fn from(x: f64) -> Self {
        if x == f64::NEG_INFINITY {
            ExtReal::NegInf
        } else {
            ExtReal::Finite(x)
        }
    }
}

impl fmt::Display for ExtReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtReal::NegInf => f.write_str("-inf"),
            ExtReal::Finite(x) => write!(f, "{x}"),
        }
    }
}

impl FromStr for ExtReal {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if s.eq_ignore_ascii_case("-inf") {
            return Ok(ExtReal::NegInf);
        }
        let x: f64 = s
            .parse()
            .map_err(|_| Error::Io(format!("not an extended real: {s:?}")))?;
        ExtReal::finite(x).ok_or_else(|| Error::Io(format!("non-finite value {s:?}")))
    }
}

impl Serialize for ExtReal {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        match self {
            ExtReal::NegInf => serializer.serialize_str("-inf"),
            ExtReal::Finite(x) => serializer.serialize_f64(*x),
        }
    }
}

impl<'de> Deserialize<'de> for ExtReal {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        struct ExtRealVisitor;

        impl Visitor<'_> for ExtRealVisitor {
            type Value = ExtReal;

            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str("a finite number or the string \"-inf\"")
            }

            fn visit_f64<E: de::Error>(self, v: f64) -> Result<ExtReal, E> {
                ExtReal::finite(v).ok_or_else(|| E::custom("non-finite number"))
            }

            fn visit_i64<E: de::Error>(self, v: i64) -> Result<ExtReal, E> {
                Ok(ExtReal::Finite(v as f64))
            }

            fn visit_u64<E: de::Error>(self, v: u64) -> Result<ExtReal, E> {
                Ok(ExtReal::Finite(v as f64))
            }

            fn visit_str<E: de::Error>(self, v: &str) -> Result<ExtReal, E> {
                v.parse().map_err(E::custom)
            }
        }

        deserializer.deserialize_any(ExtRealVisitor)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ordering_puts_sentinel_first() {
        let mut v = vec![ExtReal::Finite(1.0), NEG_INF, ExtReal::Finite(-3.0)];
        v.sort();
        assert_eq!(
            v,
            vec![NEG_INF, ExtReal::Finite(-3.0), ExtReal::Finite(1.0)]
        );
    }

    #[test]
    fn text_round_trip() {
        for s in ["-inf", "0", "3.25", "-1e-300"] {
            let x: ExtReal = s.parse().unwrap();
            let back: ExtReal = x.to_string().parse().unwrap();
            assert_eq!(x, back);
        }
        assert!("nan".parse::<ExtReal>().is_err());
        assert!("inf".parse::<ExtReal>().is_err());
    }

    #[test]
    fn json_round_trip() {
        let v = vec![ExtReal::Finite(2.5), NEG_INF];
        let s = serde_json::to_string(&v).unwrap();
        assert_eq!(s, r#"[2.5,"-inf"]"#);
        let back: Vec<ExtReal> = serde_json::from_str(&s).unwrap();
        assert_eq!(back, v);
    }
}
