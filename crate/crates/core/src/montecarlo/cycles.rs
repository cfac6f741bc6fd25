//! Block-parallel sampling of i.i.d. cycles and the estimated profile.

use std::sync::Arc;

use rayon::prelude::*;

use super::{binomial_stderr, RunOptions};
use crate::cycle::{run_cycle, CycleRecord, TopValues};
use crate::error::{Error, Result};
use crate::model::ModelSpec;
use crate::models::Walker;
use crate::profile::{quantile_sorted, CycleLaw, PhantomProfile, ProfileSource, SampleLaw};
use crate::rng::{RngStream, CYCLE_BLOCK_STREAM_OFFSET};

/// Cycles per block. Part of the reproducibility contract: changing it
/// changes which stream simulates which cycle.
pub const CYCLE_BLOCK: u64 = 1 << 16;

fn map_blocks<A, F>(
    model: &ModelSpec,
    cycles: u64,
    seed: u64,
    opts: &RunOptions,
    f: F,
) -> Result<Vec<A>>
where
    A: Send,
    F: Fn(&mut Walker, &mut RngStream, u64) -> Result<A> + Sync + Send,
{
    model.validate()?;
    if cycles == 0 {
        return Err(Error::param("cycles", "need at least one cycle"));
    }
    let blocks = cycles.div_ceil(CYCLE_BLOCK);
    opts.install(|| {
        (0..blocks)
            .into_par_iter()
            .map(|b| {
                let count = CYCLE_BLOCK.min(cycles - b * CYCLE_BLOCK);
                let mut walker = model.walker();
                let mut rng = RngStream::new(seed, CYCLE_BLOCK_STREAM_OFFSET + b);
                f(&mut walker, &mut rng, count)
            })
            .collect()
    })?
}

/// Cycle maxima `ζ^{(1)}` in simulation order with length moments.
#[derive(Debug, Clone, PartialEq)]
pub struct CycleSample {
    pub maxima: Vec<f64>,
    pub length_sum: u128,
    pub length_sq_sum: u128,
}

impl CycleSample {
    pub fn cycles(&self) -> u64 {
        self.maxima.len() as u64
    }

    /// `μ̂`.
    pub fn mean_length(&self) -> f64 {
        self.length_sum as f64 / self.maxima.len() as f64
    }

    /// Unbiased sample variance of the cycle length.
    pub fn length_variance(&self) -> f64 {
        let n = self.maxima.len() as f64;
        if n < 2.0 {
            return 0.0;
        }
        let mean = self.mean_length();
        ((self.length_sq_sum as f64 - n * mean * mean) / (n - 1.0)).max(0.0)
    }

    pub fn mean_length_stderr(&self) -> f64 {
        (self.length_variance() / self.maxima.len() as f64).sqrt()
    }

    fn absorb(&mut self, other: CycleSample) {
        self.maxima.extend(other.maxima);
        self.length_sum += other.length_sum;
        self.length_sq_sum += other.length_sq_sum;
    }
}

/// Simulates `cycles` i.i.d. cycles and keeps their maxima and lengths.
pub fn collect_cycle_maxima(
    model: &ModelSpec,
    cycles: u64,
    seed: u64,
    opts: &RunOptions,
) -> Result<CycleSample> {
    let cap = opts.cycle_cap;
    let parts = map_blocks(model, cycles, seed, opts, |walker, rng, count| {
        let mut top = TopValues::new(1);
        let mut out = CycleSample {
            maxima: Vec::with_capacity(count as usize),
            length_sum: 0,
            length_sq_sum: 0,
        };
        for _ in 0..count {
            let len = run_cycle(walker, rng, &mut top, cap)?;
            out.maxima.push(top.values()[0]);
            out.length_sum += u128::from(len);
            out.length_sq_sum += u128::from(len) * u128::from(len);
        }
        Ok(out)
    })?;
    let mut total = CycleSample {
        maxima: Vec::with_capacity(cycles as usize),
        length_sum: 0,
        length_sq_sum: 0,
    };
    for part in parts {
        total.absorb(part);
    }
    Ok(total)
}

/// Full top-`r` records of `cycles` cycles, in block order.
pub fn simulate_cycles(
    model: &ModelSpec,
    cycles: u64,
    r: usize,
    seed: u64,
    opts: &RunOptions,
) -> Result<Vec<CycleRecord>> {
    if r == 0 {
        return Err(Error::param("r", "need r >= 1"));
    }
    let cap = opts.cycle_cap;
    let parts = map_blocks(model, cycles, seed, opts, |walker, rng, count| {
        let mut top = TopValues::new(r);
        (0..count)
            .map(|_| {
                let length = run_cycle(walker, rng, &mut top, cap)?;
                CycleRecord::new(length, top.to_ext())
            })
            .collect::<Result<Vec<_>>>()
    })?;
    Ok(parts.into_iter().flatten().collect())
}

/// Where to count exceedances.
#[derive(Debug, Clone, PartialEq)]
pub enum Thresholds {
    /// Sorted thresholds.
    Explicit(Vec<f64>),
    /// Sorted probabilities; thresholds are the lower empirical quantiles of
    /// `ζ` from the same cycles.
    Quantiles(Vec<f64>),
}

/// Exceedance counts at one threshold.
#[derive(Debug, Clone, PartialEq)]
pub struct ThresholdStats {
    pub x: f64,
    pub cycles: u64,
    /// `#{cycles : ζ^{(1)} > x}`.
    pub exceedances: u64,
    /// `sizes[i-1] = #{cycles : ζ^{(i+1)} ≤ x < ζ^{(i)}}` for `i ≤ r`.
    pub sizes: Vec<u64>,
}

impl ThresholdStats {
    /// No cycle exceeded `x`; every `β̂_i(x)` is reported as 0.
    pub fn vacuous(&self) -> bool {
        self.exceedances == 0
    }

    /// `P̂(ζ > x)`.
    pub fn tail(&self) -> f64 {
        self.exceedances as f64 / self.cycles as f64
    }

    pub fn tail_stderr(&self) -> f64 {
        binomial_stderr(self.tail(), self.cycles)
    }

    /// `β̂_i(x)`; `None` for `i` outside `1..=r`.
    pub fn beta(&self, i: usize) -> Option<f64> {
        let count = *self.sizes.get(i.checked_sub(1)?)?;
        if self.vacuous() {
            return Some(0.0);
        }
        Some(count as f64 / self.exceedances as f64)
    }

    pub fn beta_stderr(&self, i: usize) -> Option<f64> {
        let b = self.beta(i)?;
        Some(if self.vacuous() {
            0.0
        } else {
            binomial_stderr(b, self.exceedances)
        })
    }
}

/// `μ̂`, the empirical law of `ζ` and exceedance statistics.
#[derive(Debug, Clone)]
pub struct EstimatedProfile {
    pub cycles: u64,
    pub r: usize,
    pub mu_hat: f64,
    pub mu_stderr: f64,
    pub length_variance: f64,
    pub sample: Arc<SampleLaw>,
    pub thresholds: Vec<ThresholdStats>,
}

impl EstimatedProfile {
    /// Stats at the largest threshold `≤ x`.
    pub fn stats_at(&self, x: f64) -> Option<&ThresholdStats> {
        let idx = self.thresholds.partition_point(|t| t.x <= x);
        idx.checked_sub(1).map(|i| &self.thresholds[i])
    }

    /// The estimate as a profile: `Ĝ = F̂_ζ^{1/μ̂}` and `β̂_i` at the
    /// thresholds, extended to the right as a step function.
    pub fn profile(&self) -> Result<PhantomProfile> {
        PhantomProfile::new(
            self.mu_hat,
            self.sample.max(),
            Arc::new(EstimatedLaw {
                sample: Arc::clone(&self.sample),
                thresholds: self.thresholds.clone(),
            }),
            ProfileSource::Estimated,
        )
    }
}

#[derive(Debug)]
struct EstimatedLaw {
    sample: Arc<SampleLaw>,
    thresholds: Vec<ThresholdStats>,
}

impl CycleLaw for EstimatedLaw {
    fn tail(&self, x: f64) -> f64 {
        self.sample.tail(x)
    }

    fn beta_at(&self, x: f64, i: usize) -> Option<f64> {
        let idx = self.thresholds.partition_point(|t| t.x <= x);
        self.thresholds[idx.checked_sub(1)?].beta(i)
    }
}

struct BlockCounts {
    sample: CycleSample,
    exceed: Vec<i64>,
    sizes: Vec<Vec<i64>>,
}

/// Estimates `μ`, `G` and `β_i(x)` for `i ≤ r` from `num_cycles` cycles.
pub fn estimate_profile(
    model: &ModelSpec,
    num_cycles: u64,
    r: usize,
    thresholds: &Thresholds,
    seed: u64,
    opts: &RunOptions,
) -> Result<EstimatedProfile> {
    if r == 0 {
        return Err(Error::param("r", "need r >= 1"));
    }
    let grid = match thresholds {
        Thresholds::Explicit(xs) => {
            if xs.iter().any(|x| x.is_nan()) || xs.windows(2).any(|w| w[0] > w[1]) {
                return Err(Error::Shape("thresholds must be sorted".into()));
            }
            xs.clone()
        }
        Thresholds::Quantiles(ps) => {
            if ps.iter().any(|p| !(0.0..=1.0).contains(p)) || ps.windows(2).any(|w| w[0] > w[1]) {
                return Err(Error::Shape(
                    "quantile levels must be sorted and lie in [0, 1]".into(),
                ));
            }
            let mut pilot = collect_cycle_maxima(model, num_cycles, seed, opts)?.maxima;
            pilot.sort_by(f64::total_cmp);
            ps.iter().map(|&p| quantile_sorted(&pilot, p)).collect()
        }
    };

    let g = grid.len();
    let cap = opts.cycle_cap;
    let parts = map_blocks(model, num_cycles, seed, opts, |walker, rng, count| {
        let mut top = TopValues::new(r + 1);
        let mut out = BlockCounts {
            sample: CycleSample {
                maxima: Vec::with_capacity(count as usize),
                length_sum: 0,
                length_sq_sum: 0,
            },
            exceed: vec![0; g + 1],
            sizes: vec![vec![0; g + 1]; r],
        };
        let mut idx = vec![0usize; r + 2];
        for _ in 0..count {
            let len = run_cycle(walker, rng, &mut top, cap)?;
            let vals = top.values();
            out.sample.maxima.push(vals[0]);
            out.sample.length_sum += u128::from(len);
            out.sample.length_sq_sum += u128::from(len) * u128::from(len);
            // idx[k] = #{thresholds < ζ^{(k)}}; zero past the cycle length.
            for (k, slot) in idx.iter_mut().enumerate().skip(1) {
                *slot = vals
                    .get(k - 1)
                    .map_or(0, |&t| grid.partition_point(|&x| x < t));
            }
            out.exceed[0] += 1;
            out.exceed[idx[1]] -= 1;
            for i in 1..=r {
                out.sizes[i - 1][idx[i + 1]] += 1;
                out.sizes[i - 1][idx[i]] -= 1;
            }
        }
        Ok(out)
    })?;

    let mut sample = CycleSample {
        maxima: Vec::with_capacity(num_cycles as usize),
        length_sum: 0,
        length_sq_sum: 0,
    };
    let mut exceed = vec![0i64; g + 1];
    let mut sizes = vec![vec![0i64; g + 1]; r];
    for part in parts {
        sample.absorb(part.sample);
        for (a, b) in exceed.iter_mut().zip(&part.exceed) {
            *a += b;
        }
        for (row, part_row) in sizes.iter_mut().zip(&part.sizes) {
            for (a, b) in row.iter_mut().zip(part_row) {
                *a += b;
            }
        }
    }

    let mut running_exceed = 0i64;
    let mut running_sizes = vec![0i64; r];
    let stats = grid
        .iter()
        .enumerate()
        .map(|(j, &x)| {
            running_exceed += exceed[j];
            for (acc, row) in running_sizes.iter_mut().zip(&sizes) {
                *acc += row[j];
            }
            ThresholdStats {
                x,
                cycles: num_cycles,
                exceedances: running_exceed as u64,
                sizes: running_sizes.iter().map(|&c| c as u64).collect(),
            }
        })
        .collect();

    Ok(EstimatedProfile {
        cycles: num_cycles,
        r,
        mu_hat: sample.mean_length(),
        mu_stderr: sample.mean_length_stderr(),
        length_variance: sample.length_variance(),
        sample: Arc::new(SampleLaw::new(sample.maxima)),
        thresholds: stats,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cycle::simulate_cycle;
    use crate::models::dist::StepDist;

    /// Direct per-cycle counting over the same cycles.
    fn direct_counts(records: &[CycleRecord], x: f64, r: usize) -> (u64, Vec<u64>) {
        let mut exceed = 0;
        let mut sizes = vec![0u64; r];
        for rec in records {
            let k = rec.exceedances(x);
            if k >= 1 {
                exceed += 1;
            }
            if (1..=r).contains(&k) {
                sizes[k - 1] += 1;
            }
        }
        (exceed, sizes)
    }

    #[test]
    fn difference_counts_match_direct_counts() {
        let model = ModelSpec::GeometricJump { p: 0.3 };
        let r = 3;
        let cycles = 5000;
        // A single block uses one stream, so the same cycles can be replayed.
        let mut rng = RngStream::new(11, CYCLE_BLOCK_STREAM_OFFSET);
        let records: Vec<_> = (0..cycles)
            .map(|_| simulate_cycle(&model, r + 1, &mut rng).unwrap())
            .collect();
        let grid: Vec<f64> = (-1..15).map(|k| k as f64 * 0.5).collect();
        let est = estimate_profile(
            &model,
            cycles,
            r,
            &Thresholds::Explicit(grid.clone()),
            11,
            &RunOptions::default(),
        )
        .unwrap();
        for (stats, &x) in est.thresholds.iter().zip(&grid) {
            let (exceed, sizes) = direct_counts(&records, x, r);
            assert_eq!(stats.exceedances, exceed, "x = {x}");
            assert_eq!(stats.sizes, sizes, "x = {x}");
        }
        let again = simulate_cycles(&model, cycles, r + 1, 11, &RunOptions::default()).unwrap();
        assert_eq!(again, records);
        let len_sum: u64 = records.iter().map(|c| c.length()).sum();
        assert!((est.mu_hat - len_sum as f64 / cycles as f64).abs() < 1e-12);
    }

    #[test]
    fn vacuous_threshold_reports_zero() {
        let model = ModelSpec::Lindley {
            step: StepDist::Constant { value: -1.0 },
        };
        let est = estimate_profile(
            &model,
            100,
            2,
            &Thresholds::Explicit(vec![-0.5, 0.0, 3.0]),
            1,
            &RunOptions::default(),
        )
        .unwrap();
        assert_eq!(est.thresholds[0].beta(1), Some(1.0));
        assert!(est.thresholds[1].vacuous());
        assert_eq!(est.thresholds[2].beta(2), Some(0.0));
        assert_eq!(est.thresholds[2].beta(3), None);
        assert_eq!(est.mu_hat, 1.0);
    }

    #[test]
    fn quantile_thresholds_come_from_the_same_cycles() {
        let model = ModelSpec::GeometricJump { p: 0.5 };
        let opts = RunOptions::default();
        let est = estimate_profile(
            &model,
            10_000,
            1,
            &Thresholds::Quantiles(vec![0.5, 0.99]),
            4,
            &opts,
        )
        .unwrap();
        let sample = collect_cycle_maxima(&model, 10_000, 4, &opts).unwrap();
        let mut sorted = sample.maxima.clone();
        sorted.sort_by(f64::total_cmp);
        assert_eq!(est.thresholds[0].x, quantile_sorted(&sorted, 0.5));
        assert_eq!(est.thresholds[1].x, quantile_sorted(&sorted, 0.99));
    }

    #[test]
    fn blocks_do_not_depend_on_workers() {
        let model = ModelSpec::ReflectedWalk { p: 0.3 };
        let n = 3 * CYCLE_BLOCK + 17;
        let a = collect_cycle_maxima(&model, n, 5, &RunOptions::with_workers(1)).unwrap();
        let b = collect_cycle_maxima(&model, n, 5, &RunOptions::with_workers(3)).unwrap();
        assert_eq!(a, b);
    }
}
