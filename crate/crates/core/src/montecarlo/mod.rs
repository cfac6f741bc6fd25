//! Monte Carlo side of the approximation: trajectories, empirical order
//! statistics, estimated profiles and finite-sample comparisons.
//!
//! All randomness comes from [`RngStream`](crate::rng::RngStream)s keyed by
//! one master seed. Replica `j` of a trajectory run uses stream `j`; cycle
//! samples are cut into fixed blocks, block `b` using stream
//! `CYCLE_BLOCK_STREAM_OFFSET + b`. Block results are merged in block order
//! with integer arithmetic, so output never depends on the worker count.

mod compare;
mod cycles;
mod tailcheck;
mod trajectory;

pub use compare::{compare, BetaSource, CompareConfig, ComparisonReport, GridSpec};
pub use cycles::{
    collect_cycle_maxima, estimate_profile, simulate_cycles, CycleSample, EstimatedProfile,
    ThresholdStats, Thresholds, CYCLE_BLOCK,
};
pub use tailcheck::{tail_equivalence_check, TailCheck, TailRow};
pub use trajectory::{simulate_order_stats, OrderStatSample};

use crate::cycle::DEFAULT_CYCLE_CAP;
use crate::error::{Error, Result};

/// Execution knobs that never change results.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RunOptions {
    /// Worker threads; 0 uses the global rayon pool.
    pub workers: usize,
    /// Abort when one cycle exceeds this many steps.
    pub cycle_cap: u64,
}

impl Default for RunOptions {
    fn default() -> Self {
        Self {
            workers: 0,
            cycle_cap: DEFAULT_CYCLE_CAP,
        }
    }
}

impl RunOptions {
    pub fn with_workers(workers: usize) -> Self {
        Self {
            workers,
            ..Self::default()
        }
    }

    pub(crate) fn install<R: Send>(&self, f: impl FnOnce() -> R + Send) -> Result<R> {
        if self.workers == 0 {
            return Ok(f());
        }
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(self.workers)
            .build()
            .map_err(|e| Error::Io(format!("thread pool: {e}")))?;
        Ok(pool.install(f))
    }
}

/// `max_x |empirical(x) − approx(x)|` over a common grid.
///
/// # Panics
/// If the columns differ in length.
pub fn sup_distance(empirical: &[f64], approx: &[f64]) -> f64 {
    assert_eq!(
        empirical.len(),
        approx.len(),
        "columns must have equal length"
    );
    empirical
        .iter()
        .zip(approx)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max)
}

/// Binomial standard error `√(p(1−p)/n)`.
pub fn binomial_stderr(p: f64, n: u64) -> f64 {
    if n == 0 {
        return f64::NAN;
    }
    (p * (1.0 - p) / n as f64).max(0.0).sqrt()
}
