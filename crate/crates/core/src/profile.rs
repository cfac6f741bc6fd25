//! Phantom distribution functions and cluster-size profiles.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::extremes::ClusterVector;

/// Law of the cycle maxima, as far as the approximation needs it.
pub trait CycleLaw: Send + Sync + fmt::Debug {
    /// `P(ζ_1 > x)`.
    fn tail(&self, x: f64) -> f64;

    /// `β_i(x) = P(ζ^{(i+1)} ≤ x < ζ^{(i)} | ζ > x)`, or `None` when it is
    /// not available for this law.
    fn beta_at(&self, x: f64, i: usize) -> Option<f64>;

    /// `β_i = lim β_i(x)` as `x` approaches the right endpoint.
    fn beta_limit(&self, _i: usize) -> Option<f64> {
        None
    }
}

/// Where a profile's numbers come from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProfileSource {
    ClosedForm,
    Estimated,
}

/// `μ`, the phantom distribution function `G = P(ζ ≤ ·)^{1/μ}`, its right
/// endpoint and the cluster-size probabilities of one model.
#[derive(Clone)]
pub struct PhantomProfile {
    mu: f64,
    right_endpoint: f64,
    law: Arc<dyn CycleLaw>,
    source: ProfileSource,
}

impl fmt::Debug for PhantomProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("PhantomProfile")
            .field("mu", &self.mu)
            .field("right_endpoint", &self.right_endpoint)
            .field("source", &self.source)
            .finish()
    }
}

impl PhantomProfile {
    pub fn new(
        mu: f64,
        right_endpoint: f64,
        law: Arc<dyn CycleLaw>,
        source: ProfileSource,
    ) -> Result<Self> {
        if !(mu.is_finite() && mu >= 1.0) {
            return Err(Error::param(
                "mu",
                format!("mean cycle length {mu} must be finite and >= 1"),
            ));
        }
        Ok(Self {
            mu,
            right_endpoint,
            law,
            source,
        })
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    /// `G_* = sup{x : G(x) < 1}`; `+∞` for unbounded laws.
    pub fn right_endpoint(&self) -> f64 {
        self.right_endpoint
    }

    pub fn source(&self) -> ProfileSource {
        self.source
    }

    pub fn law(&self) -> &Arc<dyn CycleLaw> {
        &self.law
    }

    pub fn cycle_tail(&self, x: f64) -> f64 {
        self.law.tail(x).clamp(0.0, 1.0)
    }

    pub fn cycle_cdf(&self, x: f64) -> f64 {
        1.0 - self.cycle_tail(x)
    }

    /// `G(x)`.
    pub fn g(&self, x: f64) -> f64 {
        self.g_pow(x, 1)
    }

    /// `G(x)^n`, evaluated as `exp((n/μ) · log(1 − P(ζ > x)))`.
    pub fn g_pow(&self, x: f64, n: u64) -> f64 {
        let tail = self.cycle_tail(x);
        if tail >= 1.0 {
            return 0.0;
        }
        ((n as f64 / self.mu) * (-tail).ln_1p()).exp()
    }

    pub fn beta_at(&self, x: f64, i: usize) -> Option<f64> {
        if i == 0 {
            return None;
        }
        self.law.beta_at(x, i)
    }

    pub fn beta_limit(&self, i: usize) -> Option<f64> {
        if i == 0 {
            return None;
        }
        self.law.beta_limit(i)
    }

    /// `(β_1(x), …, β_len(x))`.
    pub fn cluster_at(&self, x: f64, len: usize) -> Result<ClusterVector<f64>> {
        let beta = (1..=len)
            .map(|i| {
                self.beta_at(x, i)
                    .ok_or_else(|| Error::Unavailable(format!("beta_{i}(x)")))
            })
            .collect::<Result<Vec<_>>>()?;
        cluster(beta)
    }

    /// `(β_1, …, β_len)` of limits.
    pub fn cluster_limit(&self, len: usize) -> Result<ClusterVector<f64>> {
        let beta = (1..=len)
            .map(|i| {
                self.beta_limit(i)
                    .ok_or_else(|| Error::Unavailable(format!("limit of beta_{i}")))
            })
            .collect::<Result<Vec<_>>>()?;
        cluster(beta)
    }
}

/// Builds a cluster vector from computed probabilities, absorbing rounding.
pub(crate) fn cluster(mut beta: Vec<f64>) -> Result<ClusterVector<f64>> {
    for b in &mut beta {
        *b = b.clamp(0.0, 1.0);
    }
    let total: f64 = beta.iter().sum();
    if total > 1.0 && total < 1.0 + 1e-9 {
        for b in &mut beta {
            *b /= total;
        }
    }
    ClusterVector::new(beta).map_err(|e| Error::param("beta", e.to_string()))
}

/// Empirical law backed by a sorted sample of cycle maxima.
#[derive(Debug, Clone)]
pub struct SampleLaw {
    sorted: Vec<f64>,
}

impl SampleLaw {
    pub fn new(mut sample: Vec<f64>) -> Self {
        sample.sort_by(f64::total_cmp);
        Self { sorted: sample }
    }

    pub fn len(&self) -> usize {
        self.sorted.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sorted.is_empty()
    }

    pub fn max(&self) -> f64 {
        self.sorted.last().copied().unwrap_or(f64::NEG_INFINITY)
    }

    /// Lower empirical quantile: smallest sample value `v` with
    /// `#{ζ ≤ v} ≥ p·N`.
    pub fn quantile(&self, p: f64) -> f64 {
        quantile_sorted(&self.sorted, p)
    }
}

pub(crate) fn quantile_sorted(sorted: &[f64], p: f64) -> f64 {
    if sorted.is_empty() {
        return f64::NAN;
    }
    let n = sorted.len();
    let rank = ((p.clamp(0.0, 1.0) * n as f64).ceil() as usize).clamp(1, n);
    sorted[rank - 1]
}

impl CycleLaw for SampleLaw {
    fn tail(&self, x: f64) -> f64 {
        if self.sorted.is_empty() {
            return 1.0;
        }
        let at_most = self.sorted.partition_point(|&v| v <= x);
        (self.sorted.len() - at_most) as f64 / self.sorted.len() as f64
    }

    fn beta_at(&self, _x: f64, _i: usize) -> Option<f64> {
        None
    }
}
