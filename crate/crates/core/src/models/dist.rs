//! Step and tail distributions used by the example models.

use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::RngStream;

/// Pareto law on `[scale, ∞)` with `P(X > x) = (scale / x)^alpha`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Pareto {
    pub alpha: f64,
    #[serde(default = "one")]
    pub scale: f64,
}

fn one() -> f64 {
    1.0
}

impl Pareto {
    pub fn new(alpha: f64, scale: f64) -> Result<Self> {
        let d = Self { alpha, scale };
        d.validate()?;
        Ok(d)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.alpha.is_finite() && self.alpha > 0.0) {
            return Err(Error::param(
                "alpha",
                format!("alpha = {} violates alpha > 0", self.alpha),
            ));
        }
        if !(self.scale.is_finite() && self.scale > 0.0) {
            return Err(Error::param(
                "scale",
                format!("scale = {} violates scale > 0", self.scale),
            ));
        }
        Ok(())
    }

    #[inline]
    pub fn tail(&self, x: f64) -> f64 {
        if x <= self.scale {
            1.0
        } else {
            (self.scale / x).powf(self.alpha)
        }
    }

    #[inline]
    pub fn cdf(&self, x: f64) -> f64 {
        if x <= self.scale {
            0.0
        } else {
            -(self.alpha * (self.scale / x).ln()).exp_m1()
        }
    }

    pub fn mean(&self) -> f64 {
        if self.alpha > 1.0 {
            self.alpha * self.scale / (self.alpha - 1.0)
        } else {
            f64::INFINITY
        }
    }

    /// Inverse-CDF draw.
    #[inline]
    pub fn sample(&self, rng: &mut RngStream) -> f64 {
        self.scale * rng.uniform_open0().powf(-1.0 / self.alpha)
    }
}

/// Law of the increments `Z` of a Lindley recursion.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum StepDist {
    /// `Z ≡ value`.
    Constant { value: f64 },
    /// `Z = Pareto(alpha, scale) + shift`.
    Pareto {
        alpha: f64,
        #[serde(default = "one")]
        scale: f64,
        #[serde(default)]
        shift: f64,
    },
    /// `Z = up` with probability `p_up`, otherwise `down`.
    TwoPoint { p_up: f64, up: f64, down: f64 },
}

impl StepDist {
    pub fn shifted_pareto(alpha: f64, scale: f64, shift: f64) -> Self {
        StepDist::Pareto {
            alpha,
            scale,
            shift,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            StepDist::Constant { value } => {
                if !value.is_finite() {
                    return Err(Error::param("value", "constant step must be finite"));
                }
            }
            StepDist::Pareto {
                alpha,
                scale,
                shift,
            } => {
                Pareto::new(alpha, scale)?;
                if !shift.is_finite() {
                    return Err(Error::param("shift", "shift must be finite"));
                }
            }
            StepDist::TwoPoint { p_up, up, down } => {
                if !(p_up > 0.0 && p_up < 1.0) {
                    return Err(Error::param(
                        "p_up",
                        format!("p_up = {p_up} violates 0 < p_up < 1"),
                    ));
                }
                if !(up.is_finite() && down.is_finite() && down < up) {
                    return Err(Error::param("up", "two-point step needs finite down < up"));
                }
            }
        }
        Ok(())
    }

    pub fn mean(&self) -> f64 {
        match *self {
            StepDist::Constant { value } => value,
            StepDist::Pareto {
                alpha,
                scale,
                shift,
            } => Pareto { alpha, scale }.mean() + shift,
            StepDist::TwoPoint { p_up, up, down } => p_up * up + (1.0 - p_up) * down,
        }
    }

    /// `P(Z > x)`.
    pub fn tail(&self, x: f64) -> f64 {
        match *self {
            StepDist::Constant { value } => f64::from(u8::from(value > x)),
            StepDist::Pareto {
                alpha,
                scale,
                shift,
            } => Pareto { alpha, scale }.tail(x - shift),
            StepDist::TwoPoint { p_up, up, down } => {
                if x >= up {
                    0.0
                } else if x >= down {
                    p_up
                } else {
                    1.0
                }
            }
        }
    }

    /// `F(x) = P(Z ≤ x)`.
    pub fn cdf(&self, x: f64) -> f64 {
        match *self {
            StepDist::Pareto {
                alpha,
                scale,
                shift,
            } => Pareto { alpha, scale }.cdf(x - shift),
            _ => 1.0 - self.tail(x),
        }
    }

    /// True when the law has no random component.
    pub fn is_deterministic(&self) -> bool {
        matches!(self, StepDist::Constant { .. })
    }

    /// True when the right tail is long-tailed (`F̄(x+y)/F̄(x) → 1`).
    pub fn is_long_tailed(&self) -> bool {
        matches!(self, StepDist::Pareto { .. })
    }

    #[inline]
    pub fn sample(&self, rng: &mut RngStream) -> f64 {
        match *self {
            StepDist::Constant { value } => value,
            StepDist::Pareto {
                alpha,
                scale,
                shift,
            } => Pareto { alpha, scale }.sample(rng) + shift,
            StepDist::TwoPoint { p_up, up, down } => {
                if rng.bernoulli(p_up) {
                    up
                } else {
                    down
                }
            }
        }
    }
}

fn parse_f64(name: &'static str, s: &str) -> Result<f64> {
    s.trim()
        .parse()
        .map_err(|_| Error::param(name, format!("cannot parse {s:?} as a number")))
}

/// Splits `head:positional:key=value:...` into its parts.
fn split_descriptor(s: &str) -> (String, Vec<&str>, Vec<(&str, &str)>) {
    let mut parts = s.split(':');
    let head = parts.next().unwrap_or("").trim().to_ascii_lowercase();
    let mut positional = Vec::new();
    let mut named = Vec::new();
    for p in parts {
        match p.split_once('=') {
            Some((k, v)) => named.push((k.trim(), v.trim())),
            None => positional.push(p.trim()),
        }
    }
    (head, positional, named)
}

/// Textual forms: `const:-1`, `pareto:1.5[:scale=1][:shift=-4]`,
/// `twopoint:0.3[:up=1][:down=-1]`.
impl FromStr for StepDist {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (head, positional, named) = split_descriptor(s);
        let lookup = |key: &str| named.iter().find(|(k, _)| *k == key).map(|(_, v)| *v);
        let first = |name: &'static str| {
            positional
                .first()
                .copied()
                .ok_or_else(|| Error::param(name, format!("missing {name} in {s:?}")))
        };
        let dist = match head.as_str() {
            "const" | "constant" => StepDist::Constant {
                value: parse_f64("value", first("value")?)?,
            },
            "pareto" => StepDist::Pareto {
                alpha: parse_f64("alpha", first("alpha")?)?,
                scale: lookup("scale").map_or(Ok(1.0), |v| parse_f64("scale", v))?,
                shift: lookup("shift").map_or(Ok(0.0), |v| parse_f64("shift", v))?,
            },
            "twopoint" | "two_point" => StepDist::TwoPoint {
                p_up: parse_f64("p_up", first("p_up")?)?,
                up: lookup("up").map_or(Ok(1.0), |v| parse_f64("up", v))?,
                down: lookup("down").map_or(Ok(-1.0), |v| parse_f64("down", v))?,
            },
            _ => {
                return Err(Error::param(
                    "step",
                    format!("unknown step distribution {s:?}"),
                ))
            }
        };
        dist.validate()?;
        Ok(dist)
    }
}

/// Long-tailed distribution function `F` driving the prescribed-cluster chain.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TailDist {
    Pareto {
        alpha: f64,
        #[serde(default = "one")]
        scale: f64,
    },
}

impl TailDist {
    pub fn pareto(alpha: f64) -> Self {
        TailDist::Pareto { alpha, scale: 1.0 }
    }

    fn law(&self) -> Pareto {
        let TailDist::Pareto { alpha, scale } = *self;
        Pareto { alpha, scale }
    }

    pub fn validate(&self) -> Result<()> {
        self.law().validate()
    }

    pub fn cdf(&self, x: f64) -> f64 {
        self.law().cdf(x)
    }

    pub fn tail(&self, x: f64) -> f64 {
        self.law().tail(x)
    }

    #[inline]
    pub fn sample(&self, rng: &mut RngStream) -> f64 {
        self.law().sample(rng)
    }
}

/// Textual form: `pareto:2[:scale=1]`.
impl FromStr for TailDist {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (head, positional, named) = split_descriptor(s);
        if head != "pareto" {
            return Err(Error::param(
                "tail",
                format!("unknown tail distribution {s:?}"),
            ));
        }
        let alpha = positional
            .first()
            .ok_or_else(|| Error::param("alpha", format!("missing alpha in {s:?}")))?;
        let scale = named
            .iter()
            .find(|(k, _)| *k == "scale")
            .map_or(Ok(1.0), |(_, v)| parse_f64("scale", v))?;
        let d = TailDist::Pareto {
            alpha: parse_f64("alpha", alpha)?,
            scale,
        };
        d.validate()?;
        Ok(d)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pareto_cdf_and_tail_agree() {
        let d = Pareto::new(1.5, 1.0).unwrap();
        for x in [0.5, 1.0, 1.1, 2.0, 10.0, 1e6] {
            assert!((d.cdf(x) + d.tail(x) - 1.0).abs() < 1e-12);
        }
        assert!((d.tail(4.0) - 0.125).abs() < 1e-15);
        assert!((d.mean() - 3.0).abs() < 1e-15);
    }

    #[test]
    fn pareto_sampler_matches_tail() {
        let d = Pareto::new(2.0, 1.0).unwrap();
        let mut rng = RngStream::new(5, 0);
        let n = 200_000;
        let above = (0..n).filter(|_| d.sample(&mut rng) > 3.0).count() as f64 / n as f64;
        let p = 1.0 / 9.0;
        let se = (p * (1.0 - p) / n as f64).sqrt();
        assert!((above - p).abs() < 4.0 * se, "{above} vs {p}");
    }

    #[test]
    fn parse_step_descriptors() {
        let z: StepDist = "pareto:1.5:shift=-4".parse().unwrap();
        assert_eq!(z, StepDist::shifted_pareto(1.5, 1.0, -4.0));
        assert!((z.mean() + 1.0).abs() < 1e-12);
        assert_eq!(
            "const:-1".parse::<StepDist>().unwrap(),
            StepDist::Constant { value: -1.0 }
        );
        let tp: StepDist = "twopoint:0.3".parse().unwrap();
        assert_eq!(
            tp,
            StepDist::TwoPoint {
                p_up: 0.3,
                up: 1.0,
                down: -1.0
            }
        );
        assert!("pareto:-1".parse::<StepDist>().is_err());
        assert!("gauss:0".parse::<StepDist>().is_err());
        assert_eq!(
            "pareto:2".parse::<TailDist>().unwrap(),
            TailDist::pareto(2.0)
        );
    }

    #[test]
    fn shifted_pareto_tail() {
        let z = StepDist::shifted_pareto(1.5, 1.0, -4.0);
        // P(Z > 4) = P(Pareto > 8) = 8^{-1.5}
        assert!((z.tail(4.0) - 8f64.powf(-1.5)).abs() < 1e-15);
        assert_eq!(z.tail(-10.0), 1.0);
    }
}
