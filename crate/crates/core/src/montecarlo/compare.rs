//! Empirical `P(M_n^{(q)} ≤ x)` against the compound approximation.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::cycles::{estimate_profile, EstimatedProfile, Thresholds};
use super::trajectory::{simulate_order_stats, OrderStatSample};
use super::{binomial_stderr, sup_distance, RunOptions};
use crate::error::{Error, Result};
use crate::extremes::approx_cdf;
use crate::model::ModelSpec;
use crate::models::closed_form_profile;
use crate::models::lindley::{lindley_profile, PilotConfig};
use crate::profile::{cluster, quantile_sorted, PhantomProfile};

/// Which cluster probabilities enter the approximation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BetaSource {
    /// Limits `β_i` with the exact `G`.
    ClosedForm,
    /// `μ̂`, `Ĝ` and `β̂_i(x)` from simulated cycles.
    Estimated,
    /// Exact `β_i(x)` at each grid point.
    ThresholdDependent,
}

impl BetaSource {
    pub fn as_str(self) -> &'static str {
        match self {
            BetaSource::ClosedForm => "closed_form",
            BetaSource::Estimated => "estimated",
            BetaSource::ThresholdDependent => "threshold_dependent",
        }
    }
}

impl fmt::Display for BetaSource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for BetaSource {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "closed_form" => Ok(BetaSource::ClosedForm),
            "estimated" => Ok(BetaSource::Estimated),
            "threshold_dependent" => Ok(BetaSource::ThresholdDependent),
            other => Err(Error::param(
                "beta_source",
                format!("unknown source `{other}` (closed_form, estimated, threshold_dependent)"),
            )),
        }
    }
}

/// Grid on which the sup-distance is evaluated.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GridSpec {
    /// Integer grid for integer-valued models, 512 quantile-spaced points
    /// otherwise, always bracketing the 1% and 99% quantiles.
    Auto,
    /// Every integer in `lo..=hi`.
    Integer { lo: i64, hi: i64 },
    /// Given points, extended to bracket the 1%–99% range when needed.
    Explicit { points: Vec<f64> },
}

impl FromStr for GridSpec {
    type Err = Error;

    /// `auto`, `int:LO:HI` or a comma-separated list of points.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s == "auto" {
            return Ok(GridSpec::Auto);
        }
        let bad = || {
            Error::param(
                "grid",
                format!("cannot parse grid `{s}` (auto, int:LO:HI, x1,x2,...)"),
            )
        };
        if let Some(rest) = s.strip_prefix("int:") {
            let (lo, hi) = rest.split_once(':').ok_or_else(bad)?;
            let lo = lo.trim().parse().map_err(|_| bad())?;
            let hi = hi.trim().parse().map_err(|_| bad())?;
            return Ok(GridSpec::Integer { lo, hi });
        }
        let points = s
            .split(',')
            .map(|p| p.trim().parse::<f64>())
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(|_| bad())?;
        Ok(GridSpec::Explicit { points })
    }
}

/// Number of points of a quantile-spaced grid.
pub const QUANTILE_GRID_POINTS: usize = 512;
/// Integer grids wider than this fall back to quantile spacing.
const MAX_INTEGER_GRID: i64 = 4096;

#[derive(Debug, Clone, PartialEq)]
pub struct CompareConfig {
    pub n: u64,
    pub q_max: usize,
    pub replicas: u64,
    pub grid: GridSpec,
    pub beta_source: BetaSource,
    pub seed: u64,
    /// Cycles used when anything has to be estimated.
    pub estimate_cycles: u64,
}

/// Finite-grid witness of the sup-distance for `q = 1..=q_max`;
/// per-`q` vectors are indexed `[q-1][grid index]`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComparisonReport {
    pub model: ModelSpec,
    pub n: u64,
    pub q_max: usize,
    pub replicas: u64,
    pub seed: u64,
    pub beta_source: BetaSource,
    pub mu: f64,
    pub grid: Vec<f64>,
    pub empirical: Vec<Vec<f64>>,
    pub approx: Vec<Vec<f64>>,
    pub gap: Vec<Vec<f64>>,
    pub stderr: Vec<Vec<f64>>,
    pub sup_gap: Vec<f64>,
    /// Some `β_i` had no closed form and was replaced by `β̂_i(x)`.
    pub beta_fallback: bool,
    /// Points were added so the grid brackets the 1%–99% quantiles.
    pub grid_expanded: bool,
}

impl ComparisonReport {
    pub fn max_stderr(&self, q: usize) -> f64 {
        self.stderr[q - 1].iter().copied().fold(0.0, f64::max)
    }
}

fn column_values(sample: &OrderStatSample, q: usize) -> Vec<f64> {
    sample
        .sorted_column(q)
        .into_iter()
        .map(|v| v.to_f64())
        .collect()
}

/// `(min_q Q_q(1%), max_q Q_q(99%))`.
fn quantile_bracket(sample: &OrderStatSample) -> (f64, f64) {
    let lo = column_values(sample, sample.q_max);
    let hi = column_values(sample, 1);
    (quantile_sorted(&lo, 0.01), quantile_sorted(&hi, 0.99))
}

fn quantile_grid(sample: &OrderStatSample, lo: f64, hi: f64) -> Vec<f64> {
    let mut pooled: Vec<f64> = sample
        .values
        .iter()
        .filter(|v| !v.is_neg_inf())
        .map(|v| v.to_f64())
        .collect();
    pooled.sort_by(f64::total_cmp);
    let k = QUANTILE_GRID_POINTS - 1;
    let mut grid: Vec<f64> = (0..=k)
        .map(|j| quantile_sorted(&pooled, 0.001 + 0.998 * j as f64 / k as f64))
        .collect();
    grid.push(lo);
    grid.push(hi);
    sorted_unique(grid)
}

fn sorted_unique(mut v: Vec<f64>) -> Vec<f64> {
    v.retain(|x| x.is_finite());
    v.sort_by(f64::total_cmp);
    v.dedup();
    v
}

fn integer_grid(lo: i64, hi: i64) -> Vec<f64> {
    (lo..=hi).map(|k| k as f64).collect()
}

/// Resolves the grid and reports whether it had to be expanded.
pub(crate) fn resolve_grid(
    spec: &GridSpec,
    model: &ModelSpec,
    sample: &OrderStatSample,
) -> Result<(Vec<f64>, bool)> {
    let (lo, hi) = quantile_bracket(sample);
    match spec {
        GridSpec::Auto => {
            let (a, b) = ((lo.floor() as i64) - 1, (hi.ceil() as i64) + 1);
            if model.is_integer_valued() && b - a <= MAX_INTEGER_GRID {
                Ok((integer_grid(a, b), false))
            } else {
                Ok((quantile_grid(sample, lo, hi), false))
            }
        }
        GridSpec::Integer { lo: a, hi: b } => {
            if a > b {
                return Err(Error::Shape(format!("empty integer grid {a}..={b}")));
            }
            let (a2, b2) = ((*a).min(lo.floor() as i64), (*b).max(hi.ceil() as i64));
            Ok((integer_grid(a2, b2), (a2, b2) != (*a, *b)))
        }
        GridSpec::Explicit { points } => {
            if points.is_empty() {
                return Err(Error::Shape("explicit grid has no points".into()));
            }
            let mut grid = sorted_unique(points.clone());
            let mut expanded = false;
            if grid[0] > lo {
                grid.insert(0, lo);
                expanded = true;
            }
            if *grid.last().unwrap() < hi {
                grid.push(hi);
                expanded = true;
            }
            Ok((grid, expanded))
        }
    }
}

fn exact_profile(
    model: &ModelSpec,
    cfg: &CompareConfig,
    opts: &RunOptions,
) -> Result<PhantomProfile> {
    match model {
        ModelSpec::Lindley { step } => lindley_profile(
            *step,
            &PilotConfig {
                cycles: cfg.estimate_cycles,
                seed: cfg.seed,
                options: *opts,
            },
        ),
        _ => closed_form_profile(model),
    }
}

/// Simulates `cfg.replicas` trajectories and evaluates the approximation on
/// the grid.
pub fn compare(
    model: &ModelSpec,
    cfg: &CompareConfig,
    opts: &RunOptions,
) -> Result<ComparisonReport> {
    model.validate()?;
    let sample = simulate_order_stats(model, cfg.n, cfg.q_max, cfg.replicas, cfg.seed, opts)?;
    let (grid, grid_expanded) = resolve_grid(&cfg.grid, model, &sample)?;

    let mut estimate: Option<EstimatedProfile> = None;
    let mut estimated = || -> Result<EstimatedProfile> {
        if estimate.is_none() {
            estimate = Some(estimate_profile(
                model,
                cfg.estimate_cycles,
                cfg.q_max.saturating_sub(1).max(1),
                &Thresholds::Explicit(grid.clone()),
                cfg.seed,
                opts,
            )?);
        }
        Ok(estimate.clone().unwrap())
    };

    let profile = match cfg.beta_source {
        BetaSource::Estimated => estimated()?.profile()?,
        _ => exact_profile(model, cfg, opts)?,
    };

    let mut beta_fallback = false;
    let mut approx = vec![vec![0.0; grid.len()]; cfg.q_max];
    for (j, &x) in grid.iter().enumerate() {
        let gn = profile.g_pow(x, cfg.n);
        let len = cfg.q_max - 1;
        let mut beta = Vec::with_capacity(len);
        for i in 1..=len {
            let exact = match cfg.beta_source {
                BetaSource::ClosedForm => profile.beta_limit(i),
                _ => profile.beta_at(x, i),
            };
            let b = match exact {
                Some(b) => b,
                None => {
                    beta_fallback = true;
                    let est = estimated()?;
                    est.stats_at(x).and_then(|s| s.beta(i)).unwrap_or(0.0)
                }
            };
            beta.push(b);
        }
        let beta = cluster(beta)?;
        for q in 1..=cfg.q_max {
            approx[q - 1][j] =
                approx_cdf(q, gn, &beta).map_err(|e| Error::param("beta", e.to_string()))?;
        }
    }

    let mut empirical = Vec::with_capacity(cfg.q_max);
    let mut gap = Vec::with_capacity(cfg.q_max);
    let mut stderr = Vec::with_capacity(cfg.q_max);
    let mut sup_gap = Vec::with_capacity(cfg.q_max);
    for q in 1..=cfg.q_max {
        let emp = sample.empirical_cdf(q, &grid);
        gap.push(emp.iter().zip(&approx[q - 1]).map(|(e, a)| e - a).collect());
        stderr.push(
            emp.iter()
                .map(|&p| binomial_stderr(p, cfg.replicas))
                .collect(),
        );
        sup_gap.push(sup_distance(&emp, &approx[q - 1]));
        empirical.push(emp);
    }

    Ok(ComparisonReport {
        model: model.clone(),
        n: cfg.n,
        q_max: cfg.q_max,
        replicas: cfg.replicas,
        seed: cfg.seed,
        beta_source: cfg.beta_source,
        mu: profile.mu(),
        grid,
        empirical,
        approx,
        gap,
        stderr,
        sup_gap,
        beta_fallback,
        grid_expanded,
    })
}
