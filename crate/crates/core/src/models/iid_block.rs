//! Block process `X_n = V_{k(n)}`: i.i.d. pairs `(V_k, Y_k)` with
//! `P(V = m) = 2^{−m}` and `P(Y = i | V = m) = p(m, i)`; each cycle is the
//! level `V_k` repeated `Y_k` times.

use std::sync::Arc;

use rand::RngCore;
use serde::{Deserialize, Serialize};

use crate::cycle::CycleWalker;
use crate::error::{Error, Result};
use crate::model::ModelSpec;
use crate::profile::{CycleLaw, PhantomProfile, ProfileSource};
use crate::rng::RngStream;

const ROW_SUM_TOLERANCE: f64 = 1e-9;

/// The table `p(m, ·)` of block-length laws.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ClusterLaw {
    /// `p(m, i) = beta[i-1]` for every level `m`.
    Uniform { beta: Vec<f64> },
    /// `rows[m-1]` is `p(m, ·)`; the last row applies to every higher level.
    Table { rows: Vec<Vec<f64>> },
}

impl ClusterLaw {
    pub fn uniform(beta: Vec<f64>) -> Self {
        ClusterLaw::Uniform { beta }
    }

    fn rows(&self) -> &[Vec<f64>] {
        match self {
            ClusterLaw::Uniform { beta } => std::slice::from_ref(beta),
            ClusterLaw::Table { rows } => rows,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let rows = self.rows();
        if rows.is_empty() {
            return Err(Error::param("cluster_law", "need at least one row"));
        }
        for (m, row) in rows.iter().enumerate() {
            if row.iter().any(|p| !(p.is_finite() && *p >= 0.0)) {
                return Err(Error::param(
                    "cluster_law",
                    format!("row {} has a negative or non-finite entry", m + 1),
                ));
            }
            let total: f64 = row.iter().sum();
            if (total - 1.0).abs() > ROW_SUM_TOLERANCE {
                return Err(Error::param(
                    "cluster_law",
                    format!("row {} sums to {total}, must sum to 1", m + 1),
                ));
            }
        }
        Ok(())
    }

    /// `p(m, ·)` for level `m ≥ 1`.
    pub fn row(&self, m: u64) -> &[f64] {
        let rows = self.rows();
        let idx = (m.max(1) as usize).min(rows.len()) - 1;
        &rows[idx]
    }

    fn entry(&self, m: u64, i: usize) -> f64 {
        i.checked_sub(1)
            .and_then(|j| self.row(m).get(j).copied())
            .unwrap_or(0.0)
    }

    /// Number of distinct rows; levels `≥ this` share the last row.
    fn distinct_rows(&self) -> u64 {
        self.rows().len() as u64
    }

    /// `β_i(m) = 2^m Σ_{v > m} 2^{−v} p(v, i)`, summed exactly: the
    /// geometric tail over the repeated last row is `2^{m − L + 1}`.
    pub fn beta_at_level(&self, m: u64, i: usize) -> f64 {
        let rows = self.distinct_rows();
        let last = self.entry(rows, i);
        if m + 1 >= rows {
            return last;
        }
        let head: f64 = (m + 1..rows)
            .map(|v| 0.5f64.powi((v - m) as i32) * self.entry(v, i))
            .sum();
        head + 0.5f64.powi((rows - 1 - m) as i32) * last
    }

    fn mean_block(&self, m: u64) -> f64 {
        self.row(m)
            .iter()
            .enumerate()
            .map(|(j, p)| (j + 1) as f64 * p)
            .sum()
    }

    /// `E Y = Σ_m 2^{−m} E(Y | V = m)`.
    pub fn mean_length(&self) -> f64 {
        let rows = self.distinct_rows();
        let head: f64 = (1..rows)
            .map(|v| 0.5f64.powi(v as i32) * self.mean_block(v))
            .sum();
        head + 0.5f64.powi((rows - 1) as i32) * self.mean_block(rows)
    }
}

#[derive(Debug, Clone)]
pub struct IidBlockWalker {
    law: ClusterLaw,
    level: f64,
    remaining: u64,
}

impl IidBlockWalker {
    pub fn new(law: ClusterLaw) -> Self {
        Self {
            law,
            level: 0.0,
            remaining: 0,
        }
    }
}

impl CycleWalker for IidBlockWalker {
    fn begin_cycle(&mut self, rng: &mut RngStream) -> f64 {
        // P(trailing_zeros >= k) = 2^{-k}
        let level = 1 + u64::from(rng.next_u64().trailing_zeros());
        let row = self.law.row(level);
        let u = rng.uniform();
        let mut acc = 0.0;
        let mut size = row.len();
        for (j, p) in row.iter().enumerate() {
            acc += p;
            if u < acc {
                size = j + 1;
                break;
            }
        }
        self.level = level as f64;
        self.remaining = size as u64 - 1;
        self.level
    }

    #[inline]
    fn advance(&mut self, _rng: &mut RngStream) -> Option<f64> {
        if self.remaining == 0 {
            return None;
        }
        self.remaining -= 1;
        Some(self.level)
    }
}

#[derive(Debug, Clone)]
pub struct IidBlockLaw {
    law: ClusterLaw,
}

impl CycleLaw for IidBlockLaw {
    /// `P(V > ⌊x⌋) = 2^{−⌊x⌋}` for `x ≥ 1`.
    fn tail(&self, x: f64) -> f64 {
        if x < 1.0 {
            1.0
        } else {
            (-x.floor() * std::f64::consts::LN_2).exp()
        }
    }

    fn beta_at(&self, x: f64, i: usize) -> Option<f64> {
        if i == 0 {
            return None;
        }
        let m = if x < 0.0 { 0 } else { x.floor() as u64 };
        Some(self.law.beta_at_level(m, i))
    }

    fn beta_limit(&self, i: usize) -> Option<f64> {
        (i >= 1).then(|| self.law.entry(self.law.distinct_rows(), i))
    }
}

pub fn iid_block_model(cluster_law: ClusterLaw) -> Result<ModelSpec> {
    cluster_law.validate()?;
    Ok(ModelSpec::IidBlock { cluster_law })
}

pub fn iid_block_profile(cluster_law: &ClusterLaw) -> Result<PhantomProfile> {
    cluster_law.validate()?;
    PhantomProfile::new(
        cluster_law.mean_length(),
        f64::INFINITY,
        Arc::new(IidBlockLaw {
            law: cluster_law.clone(),
        }),
        ProfileSource::ClosedForm,
    )
}
