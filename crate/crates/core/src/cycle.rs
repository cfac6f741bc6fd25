//! Regeneration cycles and the per-step contract every model implements.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ext_real::{ExtReal, NEG_INF};
use crate::model::ModelSpec;
use crate::rng::RngStream;

/// Default hard cap on the number of steps in one cycle.
pub const DEFAULT_CYCLE_CAP: u64 = 100_000_000;

/// One regeneration cycle: its length and its top-`r` values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CycleRecord {
    length: u64,
    maxima: Vec<ExtReal>,
}

impl CycleRecord {
    /// Builds a record, checking length ≥ 1, nonincreasing maxima and the
    /// sentinel convention for positions beyond the cycle length.
    pub fn new(length: u64, maxima: Vec<ExtReal>) -> Result<Self> {
        if length == 0 {
            return Err(Error::param("length", "cycle length must be at least 1"));
        }
        if maxima.is_empty() {
            return Err(Error::param("maxima", "need at least one maximum (r >= 1)"));
        }
        if maxima.windows(2).any(|w| w[0] < w[1]) {
            return Err(Error::param("maxima", "maxima must be nonincreasing"));
        }
        for (i, m) in maxima.iter().enumerate() {
            let present = (i as u64) < length;
            if present == m.is_neg_inf() {
                return Err(Error::param(
                    "maxima",
                    format!(
                        "entry {} must be {}",
                        i + 1,
                        if present { "finite" } else { "-inf" }
                    ),
                ));
            }
        }
        Ok(Self { length, maxima })
    }

    pub fn length(&self) -> u64 {
        self.length
    }

    pub fn maxima(&self) -> &[ExtReal] {
        &self.maxima
    }

    /// `ζ^{(1)}`, the cycle maximum.
    pub fn max(&self) -> f64 {
        self.maxima[0].to_f64()
    }

    pub fn r(&self) -> usize {
        self.maxima.len()
    }

    /// Number of the top-`r` values strictly above `x` (at most `r`).
    pub fn exceedances(&self, x: f64) -> usize {
        self.maxima.iter().take_while(|m| m.exceeds(x)).count()
    }
}

/// Running top-`k` of a stream of finite values, largest first.
#[derive(Debug, Clone)]
pub struct TopValues {
    cap: usize,
    values: Vec<f64>,
}

impl TopValues {
    pub fn new(cap: usize) -> Self {
        assert!(cap >= 1, "TopValues needs capacity >= 1");
        Self {
            cap,
            values: Vec::with_capacity(cap),
        }
    }

    #[inline]
    pub fn push(&mut self, v: f64) {
        if self.values.len() == self.cap {
            if v <= self.values[self.cap - 1] {
                return;
            }
            self.values.pop();
        }
        let pos = self.values.partition_point(|&u| u >= v);
        self.values.insert(pos, v);
    }

    pub fn clear(&mut self) {
        self.values.clear();
    }

    /// Current values, largest first; fewer than `cap` until filled.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Padded to `cap` entries with the sentinel.
    pub fn to_ext(&self) -> Vec<ExtReal> {
        let mut out: Vec<ExtReal> = self.values.iter().map(|&v| ExtReal::Finite(v)).collect();
        out.resize(self.cap, NEG_INF);
        out
    }

    pub fn write_ext(&self, out: &mut [ExtReal]) {
        for (i, slot) in out.iter_mut().enumerate() {
            *slot = self.values.get(i).map_or(NEG_INF, |&v| ExtReal::Finite(v));
        }
    }
}

/// Step-level view of a regenerative process.
///
/// `begin_cycle` puts the process at a regeneration time and returns the
/// first value of the new cycle. `advance` returns the next value of the
/// same cycle, or `None` once the process has regenerated; the randomness
/// consumed by the transition that closes a cycle belongs to that cycle.
pub trait CycleWalker {
    fn begin_cycle(&mut self, rng: &mut RngStream) -> f64;
    fn advance(&mut self, rng: &mut RngStream) -> Option<f64>;
}

/// Simulates one full cycle of a nondelayed copy of `model`.
pub fn simulate_cycle(model: &ModelSpec, r: usize, rng: &mut RngStream) -> Result<CycleRecord> {
    simulate_cycle_capped(model, r, rng, DEFAULT_CYCLE_CAP)
}

pub fn simulate_cycle_capped(
    model: &ModelSpec,
    r: usize,
    rng: &mut RngStream,
    cap: u64,
) -> Result<CycleRecord> {
    if r == 0 {
        return Err(Error::param("r", "need r >= 1"));
    }
    model.validate()?;
    let mut walker = model.walker();
    let mut top = TopValues::new(r);
    run_cycle(&mut walker, rng, &mut top, cap).map(|length| CycleRecord {
        length,
        maxima: top.to_ext(),
    })
}

/// Runs one cycle through `walker`, feeding values into `top`. Returns the
/// cycle length.
pub(crate) fn run_cycle<W: CycleWalker>(
    walker: &mut W,
    rng: &mut RngStream,
    top: &mut TopValues,
    cap: u64,
) -> Result<u64> {
    top.clear();
    top.push(walker.begin_cycle(rng));
    let mut length = 1u64;
    while let Some(v) = walker.advance(rng) {
        length += 1;
        if length > cap {
            return Err(Error::CycleCap { cap });
        }
        top.push(v);
    }
    Ok(length)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn top_values_keeps_largest() {
        let mut t = TopValues::new(3);
        for v in [1.0, 5.0, 2.0, 5.0, 0.0, 4.0] {
            t.push(v);
        }
        assert_eq!(
            t.to_ext(),
            vec![
                ExtReal::Finite(5.0),
                ExtReal::Finite(5.0),
                ExtReal::Finite(4.0)
            ]
        );
        let mut t = TopValues::new(3);
        t.push(7.0);
        assert_eq!(t.to_ext(), vec![ExtReal::Finite(7.0), NEG_INF, NEG_INF]);
    }

    #[test]
    fn record_invariants_are_enforced() {
        assert!(CycleRecord::new(0, vec![ExtReal::Finite(0.0)]).is_err());
        assert!(CycleRecord::new(2, vec![ExtReal::Finite(0.0), ExtReal::Finite(1.0)]).is_err());
        assert!(CycleRecord::new(1, vec![ExtReal::Finite(0.0), ExtReal::Finite(0.0)]).is_err());
        assert!(CycleRecord::new(3, vec![ExtReal::Finite(2.0), NEG_INF]).is_err());
        let rec = CycleRecord::new(1, vec![ExtReal::Finite(0.0), NEG_INF]).unwrap();
        assert_eq!(rec.exceedances(-1.0), 1);
        assert_eq!(rec.exceedances(0.0), 0);
    }
}
