//! Length-`n` trajectories built from concatenated cycles.

use rayon::prelude::*;

use super::RunOptions;
use crate::cycle::{CycleWalker, TopValues};
use crate::error::{Error, Result};
use crate::ext_real::{ExtReal, NEG_INF};
use crate::model::ModelSpec;
use crate::rng::RngStream;

/// `M_n^{(q)}` for `q = 1..=q_max` in each of `replicas` independent runs.
#[derive(Debug, Clone, PartialEq)]
pub struct OrderStatSample {
    pub n: u64,
    pub q_max: usize,
    pub replicas: u64,
    /// Row-major `replicas × q_max`.
    pub values: Vec<ExtReal>,
}

impl OrderStatSample {
    pub fn row(&self, replica: usize) -> &[ExtReal] {
        &self.values[replica * self.q_max..(replica + 1) * self.q_max]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[ExtReal]> {
        self.values.chunks_exact(self.q_max)
    }

    /// `M_n^{(q)}` across replicas, sorted ascending.
    pub fn sorted_column(&self, q: usize) -> Vec<ExtReal> {
        assert!((1..=self.q_max).contains(&q), "q out of range");
        let mut col: Vec<ExtReal> = self.rows().map(|r| r[q - 1]).collect();
        col.sort_unstable();
        col
    }

    /// `#{replicas : M_n^{(q)} ≤ x}` at each grid point.
    pub fn counts_at_or_below(&self, q: usize, grid: &[f64]) -> Vec<u64> {
        let col = self.sorted_column(q);
        grid.iter()
            .map(|&x| col.partition_point(|v| !v.exceeds(x)) as u64)
            .collect()
    }

    /// Empirical `P(M_n^{(q)} ≤ x)` at each grid point.
    pub fn empirical_cdf(&self, q: usize, grid: &[f64]) -> Vec<f64> {
        self.counts_at_or_below(q, grid)
            .into_iter()
            .map(|c| c as f64 / self.replicas as f64)
            .collect()
    }
}

/// The top `top.cap` of `X_1, …, X_n` of one nondelayed trajectory.
fn run_replica<W: CycleWalker>(
    walker: &mut W,
    rng: &mut RngStream,
    n: u64,
    top: &mut TopValues,
    cap: u64,
) -> Result<()> {
    top.clear();
    // X_0 is the regeneration state and is not observed.
    walker.begin_cycle(rng);
    let mut in_cycle = 1u64;
    for _ in 0..n {
        let v = match walker.advance(rng) {
            Some(v) => {
                in_cycle += 1;
                if in_cycle > cap {
                    return Err(Error::CycleCap { cap });
                }
                v
            }
            None => {
                in_cycle = 1;
                walker.begin_cycle(rng)
            }
        };
        top.push(v);
    }
    Ok(())
}

/// Simulates `replicas` trajectories of `n` steps; replica `j` uses stream `j`.
pub fn simulate_order_stats(
    model: &ModelSpec,
    n: u64,
    q_max: usize,
    replicas: u64,
    seed: u64,
    opts: &RunOptions,
) -> Result<OrderStatSample> {
    model.validate()?;
    if q_max == 0 || n < q_max as u64 {
        return Err(Error::param(
            "q_max",
            format!("need n >= q_max >= 1, got n = {n}, q_max = {q_max}"),
        ));
    }
    if replicas == 0 {
        return Err(Error::param("replicas", "need at least one replica"));
    }
    let mut values = vec![NEG_INF; replicas as usize * q_max];
    let cap = opts.cycle_cap;
    opts.install(|| {
        values.par_chunks_mut(q_max).enumerate().try_for_each_init(
            || (model.walker(), TopValues::new(q_max)),
            |(walker, top), (j, row)| {
                let mut rng = RngStream::new(seed, j as u64);
                run_replica(walker, &mut rng, n, top, cap)?;
                top.write_ext(row);
                Ok::<(), Error>(())
            },
        )
    })??;
    Ok(OrderStatSample {
        n,
        q_max,
        replicas,
        values,
    })
}
