//! Markov chain on ℕ whose limiting cluster sizes are prescribed.
//!
//! From 0 the chain jumps to a level `v_n`, with `P(0, v_n) = F(v_{n+1}) −
//! F(v_n)` for a long-tailed `F`. From `v_n` it either returns to 0 (a
//! cluster of size 1) or climbs to `v_n + i − 1` and walks down to 0, which
//! leaves exactly `i` values at or above `v_n`. Cluster size `i` has
//! probability `β_i / Σ_{j ≤ m_{v_n}} β_j`. Levels follow `v_1 = 1`,
//! `v_{n+1} = v_n + m_{v_n}`, so the clusters of different levels never
//! overlap.

use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::dist::TailDist;
use crate::cycle::CycleWalker;
use crate::error::{Error, Result};
use crate::extremes::ClusterVector;
use crate::model::ModelSpec;
use crate::profile::{CycleLaw, PhantomProfile, ProfileSource};
use crate::rng::RngStream;

/// Largest level materialised by [`prescribed_beta_model`].
pub const VSEQUENCE_MAX_LEVEL: u64 = 1_000_000;
/// Allowed deviation of `(1 − F(v + m_v))/(1 − F(v))` from 1 at that level.
pub const VSEQUENCE_TAIL_TOLERANCE: f64 = 0.01;

const BETA_SUM_TOLERANCE: f64 = 1e-9;

/// Rule for the gap sequence `m_n`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MRule {
    /// `m_n = i_0 + ⌊log₂(1 + n)⌋`.
    #[default]
    Log2,
    /// `m_n ≡ m`.
    Constant { m: u64 },
    /// `m_n = i_0 + ⌊c·n⌋`. Grows too fast for long-tailed `F`; useful for
    /// exercising the tail-ratio check.
    Proportional { c: f64 },
}

/// Textual forms: `log2`, `const:M`, `prop:C`.
impl FromStr for MRule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (head, arg) = s.split_once(':').unwrap_or((s, ""));
        let bad = || Error::param("m_rule", format!("cannot parse m-rule {s:?}"));
        match head.trim().to_ascii_lowercase().as_str() {
            "log2" => Ok(MRule::Log2),
            "const" | "constant" => Ok(MRule::Constant {
                m: arg.trim().parse().map_err(|_| bad())?,
            }),
            "prop" | "proportional" => Ok(MRule::Proportional {
                c: arg.trim().parse().map_err(|_| bad())?,
            }),
            _ => Err(bad()),
        }
    }
}

/// Validated parameters plus the level arithmetic of the chain.
#[derive(Debug, Clone)]
pub struct PrescribedChain {
    beta: Vec<f64>,
    /// `prefix[i] = β_1 + … + β_i`.
    prefix: Vec<f64>,
    i0: u64,
    tail: TailDist,
    rule: MRule,
}

impl PrescribedChain {
    pub fn new(beta: &[f64], tail: TailDist, rule: MRule) -> Result<Self> {
        if beta.is_empty() {
            return Err(Error::param(
                "beta",
                "need at least one cluster probability",
            ));
        }
        if let Some(i) = beta.iter().position(|b| !(b.is_finite() && *b >= 0.0)) {
            return Err(Error::param("beta", format!("beta_{} must be >= 0", i + 1)));
        }
        let total: f64 = beta.iter().sum();
        if (total - 1.0).abs() > BETA_SUM_TOLERANCE {
            return Err(Error::param(
                "beta",
                format!("sum of beta is {total}, must equal 1"),
            ));
        }
        tail.validate()?;
        let i0 = beta.iter().position(|&b| b > 0.0).expect("positive entry") as u64 + 1;
        match rule {
            MRule::Log2 => {}
            MRule::Constant { m } => {
                if m < i0 {
                    return Err(Error::param(
                        "m_rule",
                        format!("m = {m} violates m >= i0 = {i0}"),
                    ));
                }
            }
            MRule::Proportional { c } => {
                if !(c.is_finite() && c > 0.0) {
                    return Err(Error::param("m_rule", format!("c = {c} violates c > 0")));
                }
            }
        }
        let mut prefix = Vec::with_capacity(beta.len() + 1);
        prefix.push(0.0);
        for b in beta {
            prefix.push(prefix.last().unwrap() + b);
        }
        Ok(Self {
            beta: beta.to_vec(),
            prefix,
            i0,
            tail,
            rule,
        })
    }

    pub fn i0(&self) -> u64 {
        self.i0
    }

    pub fn tail_dist(&self) -> TailDist {
        self.tail
    }

    pub fn rule(&self) -> MRule {
        self.rule
    }

    /// Gap `m_v` at level `v`.
    pub fn m_at(&self, v: u64) -> u64 {
        match self.rule {
            MRule::Log2 => self.i0 + u64::from(63 - (v + 1).leading_zeros()),
            MRule::Constant { m } => m,
            MRule::Proportional { c } => self.i0 + (c * v as f64).floor() as u64,
        }
    }

    pub fn next_level(&self, v: u64) -> u64 {
        v + self.m_at(v)
    }

    /// Largest state `s ≥ v` with `m_s = m_v`, or `None` when `m` is
    /// constant from `v` on.
    fn segment_last(&self, v: u64) -> Option<u64> {
        match self.rule {
            MRule::Log2 => {
                let k = 63 - (v + 1).leading_zeros();
                Some((1u64 << (k + 1)) - 2)
            }
            MRule::Constant { .. } => None,
            MRule::Proportional { .. } => Some(v),
        }
    }

    /// `Σ_{j ≤ m} β_j`, the normaliser of the cluster law at gap `m`.
    pub fn truncation(&self, m: u64) -> f64 {
        self.prefix[(m as usize).min(self.beta.len())]
    }

    /// Probability of cluster size `i` at a level with gap `m`.
    pub fn cluster_prob(&self, m: u64, i: u64) -> f64 {
        if i == 0 || i > m || i as usize > self.beta.len() {
            0.0
        } else {
            self.beta[i as usize - 1] / self.truncation(m)
        }
    }

    /// `P(I > s)` for the cluster size `I` at gap `m`.
    fn cluster_tail(&self, m: u64, s: u64) -> f64 {
        let total = self.truncation(m);
        let below = self.prefix[(s.min(m) as usize).min(self.beta.len())];
        ((total - below) / total).max(0.0)
    }

    fn mean_cluster(&self, m: u64) -> f64 {
        (1..=m.min(self.beta.len() as u64))
            .map(|i| i as f64 * self.cluster_prob(m, i))
            .sum()
    }

    /// True when the cluster law is the same at `v` and all higher levels.
    fn stable_from(&self, v: u64) -> bool {
        matches!(self.rule, MRule::Constant { .. }) || self.m_at(v) as usize >= self.beta.len()
    }

    /// `Σ_{k : v_k ≥ start} (F(v_{k+1}) − F(v_k)) · f(m_{v_k})` for a level
    /// `start`. Levels with equal gaps are summed by telescoping.
    fn level_sum(&self, start: u64, f: impl Fn(u64) -> f64) -> f64 {
        let mut v = start;
        let mut acc = 0.0;
        loop {
            let m = self.m_at(v);
            if self.stable_from(v) {
                return acc + self.tail.tail(v as f64) * f(m);
            }
            let last = self
                .segment_last(v)
                .expect("non-constant rule has finite segments");
            let count = (last - v) / m + 1;
            let after = v + count * m;
            acc += (self.tail.tail(v as f64) - self.tail.tail(after as f64)) * f(m);
            v = after;
        }
    }

    /// Largest level `v_n ≤ t` (for `t ≥ 1`), as `(n, v_n, m_{v_n})`.
    pub fn locate(&self, t: u64) -> (u64, u64, u64) {
        debug_assert!(t >= 1);
        let (mut n, mut v) = (1u64, 1u64);
        loop {
            let m = self.m_at(v);
            let after = self.segment_last(v).map(|last| {
                let count = (last - v) / m + 1;
                (count, v + count * m)
            });
            match after {
                Some((count, after)) if t >= after => {
                    n += count;
                    v = after;
                }
                _ => {
                    let j = (t - v) / m;
                    return (n + j, v + j * m, m);
                }
            }
        }
    }

    /// Draws a cluster size for a level with gap `m`.
    #[inline]
    fn sample_cluster(&self, m: u64, rng: &mut RngStream) -> u64 {
        let top = (m as usize).min(self.beta.len());
        let u = rng.uniform() * self.prefix[top];
        let idx = self.prefix[1..=top].partition_point(|&c| c <= u);
        (idx.min(top - 1) + 1) as u64
    }

    /// `1 − F(v_{n(x)+1})` and `1 − F(v_{n(x)})`, the bounds on `P(ζ > x)`,
    /// where `n(x) = min{n : v_n > x}`.
    pub fn tail_sandwich(&self, x: f64) -> (f64, f64) {
        let upper_level = if x < 1.0 {
            1
        } else {
            self.next_level(self.locate(x.floor() as u64).1)
        };
        let lower_level = self.next_level(upper_level);
        (
            self.tail.tail(lower_level as f64),
            self.tail.tail(upper_level as f64),
        )
    }
}

#[derive(Debug, Clone, Copy)]
enum ChainState {
    Zero,
    Level { v: u64, m: u64 },
    Descent { current: u64, stop: u64 },
}

#[derive(Debug, Clone)]
pub struct PrescribedWalker {
    chain: PrescribedChain,
    state: ChainState,
}

impl PrescribedWalker {
    pub fn new(chain: PrescribedChain) -> Self {
        Self {
            chain,
            state: ChainState::Zero,
        }
    }
}

impl CycleWalker for PrescribedWalker {
    #[inline]
    fn begin_cycle(&mut self, _rng: &mut RngStream) -> f64 {
        self.state = ChainState::Zero;
        0.0
    }

    fn advance(&mut self, rng: &mut RngStream) -> Option<f64> {
        match self.state {
            ChainState::Zero => {
                // X_1 = v_n exactly when v_n < W <= v_{n+1}, W ~ F.
                let w = self.chain.tail.sample(rng);
                let t = w.ceil() - 1.0;
                if t < 1.0 {
                    return None;
                }
                let (_, v, m) = self.chain.locate(t as u64);
                self.state = ChainState::Level { v, m };
                Some(v as f64)
            }
            ChainState::Level { v, m } => {
                let size = self.chain.sample_cluster(m, rng);
                if size == 1 {
                    self.state = ChainState::Zero;
                    return None;
                }
                let current = v + size - 1;
                self.state = ChainState::Descent {
                    current,
                    stop: v + 1,
                };
                Some(current as f64)
            }
            ChainState::Descent { current, stop } => {
                if current > stop {
                    self.state = ChainState::Descent {
                        current: current - 1,
                        stop,
                    };
                    Some((current - 1) as f64)
                } else {
                    self.state = ChainState::Zero;
                    None
                }
            }
        }
    }
}

/// Exact cycle law of the chain; all sums are finite because the cluster
/// law stops changing once `m_v` covers the support of `β`.
#[derive(Debug, Clone)]
pub struct PrescribedLaw {
    chain: PrescribedChain,
}

impl PrescribedLaw {
    /// For `x ≥ 1`: the level holding `⌊x⌋`, the offset `s` of `⌊x⌋` in
    /// its cluster range, and the level probability.
    fn split(&self, x: f64) -> (u64, u64, u64, f64) {
        let t = x.floor() as u64;
        let (_, v, m) = self.chain.locate(t);
        let next = v + m;
        let weight = self.chain.tail.tail(v as f64) - self.chain.tail.tail(next as f64);
        (t - v + 1, m, next, weight)
    }
}

impl CycleLaw for PrescribedLaw {
    fn tail(&self, x: f64) -> f64 {
        let f = &self.chain.tail;
        if x < 0.0 {
            1.0
        } else if x < 1.0 {
            f.tail(1.0)
        } else {
            let (s, m, next, weight) = self.split(x);
            f.tail(next as f64) + weight * self.chain.cluster_tail(m, s)
        }
    }

    fn beta_at(&self, x: f64, i: usize) -> Option<f64> {
        if i == 0 {
            return None;
        }
        let i = i as u64;
        let chain = &self.chain;
        let (numerator, denominator) = if x < 0.0 {
            // Every value of the cycle exceeds x, so the count is the length.
            let p = if i == 1 {
                chain.tail.cdf(1.0)
            } else {
                chain.level_sum(1, |m| chain.cluster_prob(m, i - 1))
            };
            (p, 1.0)
        } else if x < 1.0 {
            (
                chain.level_sum(1, |m| chain.cluster_prob(m, i)),
                chain.tail.tail(1.0),
            )
        } else {
            let (s, m, next, weight) = self.split(x);
            let here = weight * chain.cluster_prob(m, s + i);
            let above = chain.level_sum(next, |m| chain.cluster_prob(m, i));
            (here + above, self.tail(x))
        };
        if denominator > 0.0 {
            Some((numerator / denominator).clamp(0.0, 1.0))
        } else {
            Some(0.0)
        }
    }

    fn beta_limit(&self, i: usize) -> Option<f64> {
        if i == 0 {
            return None;
        }
        let m_limit = match self.chain.rule {
            MRule::Constant { m } => m,
            _ => u64::MAX,
        };
        Some(self.chain.cluster_prob(m_limit, i as u64))
    }
}

/// Materialised prefix of the level sequence `v_n` with its gaps.
#[derive(Debug, Clone, PartialEq)]
pub struct VSequence {
    pub v: Vec<u64>,
    pub m: Vec<u64>,
    pub i0: u64,
    /// `Σ_{j ≤ m_{v_n}} β_j` at each level.
    pub truncation: Vec<f64>,
    /// `(1 − F(v + m_v))/(1 − F(v))` at the largest level.
    pub tail_ratio: f64,
}

impl VSequence {
    /// Levels `v_n ≤ max_level`; fails when the tail ratio at the largest
    /// level is further than `tolerance` from 1.
    pub fn build(chain: &PrescribedChain, max_level: u64, tolerance: f64) -> Result<Self> {
        let (mut v, mut m, mut truncation) = (Vec::new(), Vec::new(), Vec::new());
        let mut level = 1u64;
        while level <= max_level.max(1) {
            let gap = chain.m_at(level);
            v.push(level);
            m.push(gap);
            truncation.push(chain.truncation(gap));
            level += gap;
        }
        let last = *v.last().expect("at least one level");
        let f = chain.tail_dist();
        let denominator = f.tail(last as f64);
        let tail_ratio = if denominator > 0.0 {
            f.tail(chain.next_level(last) as f64) / denominator
        } else {
            f64::NAN
        };
        if (tail_ratio - 1.0).abs() > tolerance || tail_ratio.is_nan() {
            return Err(Error::param(
                "m_rule",
                format!(
                    "(1-F(v+m_v))/(1-F(v)) = {tail_ratio} at v = {last} is not within {tolerance} of 1"
                ),
            ));
        }
        let seq = Self {
            v,
            m,
            i0: chain.i0(),
            truncation,
            tail_ratio,
        };
        seq.verify()?;
        Ok(seq)
    }

    pub fn len(&self) -> usize {
        self.v.len()
    }

    pub fn is_empty(&self) -> bool {
        self.v.is_empty()
    }

    /// Checks the recursion, the range of `m` and its monotonicity.
    pub fn verify(&self) -> Result<()> {
        let fail = |msg: String| Err(Error::param("v_sequence", msg));
        if self.v.first() != Some(&1) {
            return fail("v_1 must be 1".into());
        }
        if self.v.len() != self.m.len() {
            return fail("v and m differ in length".into());
        }
        for n in 1..self.v.len() {
            if self.v[n] != self.v[n - 1] + self.m[n - 1] {
                return fail(format!("v_{} != v_{} + m_(v_{})", n + 1, n, n));
            }
            if self.m[n] < self.m[n - 1] {
                return fail(format!("m decreases at v = {}", self.v[n]));
            }
        }
        if self.m.iter().any(|&m| m < self.i0) {
            return fail(format!("m takes values below i0 = {}", self.i0));
        }
        Ok(())
    }

    /// Largest level with `v ≤ x`.
    pub fn level_at_or_below(&self, x: f64) -> Option<u64> {
        let idx = self.v.partition_point(|&v| v as f64 <= x);
        idx.checked_sub(1).map(|i| self.v[i])
    }
}

/// Builds the chain for prescribed `β`, its exact profile and the level
/// sequence up to [`VSEQUENCE_MAX_LEVEL`].
pub fn prescribed_beta_model(
    beta: &ClusterVector<f64>,
    tail: TailDist,
    m_rule: MRule,
) -> Result<(ModelSpec, PhantomProfile, VSequence)> {
    let chain = PrescribedChain::new(beta.as_slice(), tail, m_rule)?;
    let vseq = VSequence::build(&chain, VSEQUENCE_MAX_LEVEL, VSEQUENCE_TAIL_TOLERANCE)?;
    let profile = prescribed_profile(&chain)?;
    let spec = ModelSpec::PrescribedBeta {
        beta: beta.as_slice().to_vec(),
        tail,
        m_rule,
    };
    Ok((spec, profile, vseq))
}

pub(crate) fn prescribed_profile(chain: &PrescribedChain) -> Result<PhantomProfile> {
    let mu = 1.0 + chain.level_sum(1, |m| chain.mean_cluster(m));
    PhantomProfile::new(
        mu,
        f64::INFINITY,
        Arc::new(PrescribedLaw {
            chain: chain.clone(),
        }),
        ProfileSource::ClosedForm,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cycle::simulate_cycle;

    fn chain(beta: &[f64], rule: MRule) -> PrescribedChain {
        PrescribedChain::new(beta, TailDist::pareto(2.0), rule).unwrap()
    }

    #[test]
    fn constant_gap_levels() {
        let c = chain(&[0.5, 0.5], MRule::Constant { m: 2 });
        let seq = VSequence::build(&c, 9, 0.5).unwrap();
        assert_eq!(seq.v, vec![1, 3, 5, 7, 9]);
        assert_eq!(c.locate(1), (1, 1, 2));
        assert_eq!(c.locate(4), (2, 3, 2));
        assert_eq!(c.locate(9), (5, 9, 2));
    }

    #[test]
    fn log2_levels_match_unrolled_recursion() {
        let c = chain(&[0.5, 0.3, 0.2], MRule::Log2);
        // m_n = 1 + floor(log2(1 + n))
        assert_eq!(c.m_at(1), 2);
        assert_eq!(c.m_at(3), 3);
        assert_eq!(c.m_at(6), 3);
        assert_eq!(c.m_at(7), 4);
        let seq = VSequence::build(&c, 100_000, 0.01).unwrap();
        seq.verify().unwrap();
        for (n, &v) in seq.v.iter().enumerate() {
            assert_eq!(c.locate(v), (n as u64 + 1, v, seq.m[n]));
            if seq.m[n] > 1 {
                assert_eq!(c.locate(v + seq.m[n] - 1).1, v);
            }
        }
    }

    #[test]
    fn rejects_bad_inputs() {
        let t = TailDist::pareto(2.0);
        assert!(PrescribedChain::new(&[0.5, 0.3], t, MRule::Log2).is_err());
        assert!(PrescribedChain::new(&[0.5, -0.1, 0.6], t, MRule::Log2).is_err());
        assert!(PrescribedChain::new(&[0.0, 1.0], t, MRule::Constant { m: 1 }).is_err());
        let c = PrescribedChain::new(&[0.5, 0.5], t, MRule::Proportional { c: 1.0 }).unwrap();
        assert!(VSequence::build(&c, VSEQUENCE_MAX_LEVEL, VSEQUENCE_TAIL_TOLERANCE).is_err());
    }

    #[test]
    fn exact_law_is_consistent() {
        let c = chain(&[0.5, 0.3, 0.2], MRule::Log2);
        let prof = prescribed_profile(&c).unwrap();
        let law = PrescribedLaw { chain: c.clone() };
        // At x = v_n - 0.5 the tail is exactly 1 - F(v_n).
        for v in [1u64, 3, 6, 9, 13, 17, 22] {
            assert!(
                (law.tail(v as f64 - 0.5) - 1.0 / (v * v) as f64).abs() < 1e-15,
                "v={v}"
            );
            let (lo, hi) = c.tail_sandwich(v as f64 - 0.5);
            assert!((hi - law.tail(v as f64 - 0.5)).abs() < 1e-15);
            assert!(lo <= hi);
        }
        let mut last = 0.0;
        for k in -4..400 {
            let x = k as f64 * 0.5;
            let g = prof.g(x);
            assert!(g >= last);
            last = g;
            let total: f64 = (1..=4).map(|i| prof.beta_at(x, i).unwrap()).sum();
            assert!(total <= 1.0 + 1e-12, "x = {x}");
        }
        // Above the level where m_v >= 3 the cluster law is exactly beta.
        for (i, b) in [0.5, 0.3, 0.2].iter().enumerate() {
            assert!((prof.beta_at(20.5, i + 1).unwrap() - b).abs() < 1e-12);
            assert_eq!(prof.beta_limit(i + 1), Some(*b));
        }
        assert_eq!(prof.beta_limit(4), Some(0.0));
        assert!(prof.mu() > 1.0 && prof.mu() <= 1.0 + 4.0 * (0.5 + 0.6 + 0.6));
    }

    #[test]
    fn unit_cluster_law() {
        let c = chain(&[1.0], MRule::Log2);
        let prof = prescribed_profile(&c).unwrap();
        for x in [0.5, 3.0, 10.2, 500.0] {
            assert!((prof.beta_at(x, 1).unwrap() - 1.0).abs() < 1e-12);
        }
        assert!((prof.mu() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn simulated_values_live_on_level_ranges() {
        let beta = [0.5, 0.3, 0.2];
        let c = chain(&beta, MRule::Log2);
        let seq = VSequence::build(&c, VSEQUENCE_MAX_LEVEL, 0.01).unwrap();
        let model = ModelSpec::PrescribedBeta {
            beta: beta.to_vec(),
            tail: TailDist::pareto(2.0),
            m_rule: MRule::Log2,
        };
        let mut rng = RngStream::new(2, 0);
        for _ in 0..50_000 {
            let cycle = simulate_cycle(&model, 4, &mut rng).unwrap();
            for z in cycle.maxima().iter().filter_map(|z| z.value()) {
                if z == 0.0 {
                    continue;
                }
                let v = seq.level_at_or_below(z).expect("value above 1");
                let m = c.m_at(v);
                assert!(z >= v as f64 && z <= (v + m - 1) as f64, "z = {z}");
            }
            assert!(cycle.length() <= 1 + beta.len() as u64);
        }
    }

    #[test]
    fn parses_rules() {
        assert_eq!("log2".parse::<MRule>().unwrap(), MRule::Log2);
        assert_eq!(
            "const:3".parse::<MRule>().unwrap(),
            MRule::Constant { m: 3 }
        );
        assert!("bogus".parse::<MRule>().is_err());
    }
}
