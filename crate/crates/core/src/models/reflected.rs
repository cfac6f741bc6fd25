//! Simple random walk reflected at 0: `X_n = max(X_{n−1} + Z, 0)` with
//! `Z = +1` w.p. `p < 1/2` and `−1` otherwise.

use std::sync::Arc;

use crate::cycle::CycleWalker;
use crate::error::Result;
use crate::model::ModelSpec;
use crate::profile::{CycleLaw, PhantomProfile, ProfileSource};
use crate::rng::RngStream;

#[derive(Debug, Clone)]
pub struct ReflectedWalker {
    p: f64,
    x: u64,
}

impl ReflectedWalker {
    pub fn new(p: f64) -> Self {
        Self { p, x: 0 }
    }
}

impl CycleWalker for ReflectedWalker {
    #[inline]
    fn begin_cycle(&mut self, _rng: &mut RngStream) -> f64 {
        self.x = 0;
        0.0
    }

    #[inline]
    fn advance(&mut self, rng: &mut RngStream) -> Option<f64> {
        if rng.bernoulli(self.p) {
            self.x += 1;
        } else if self.x <= 1 {
            self.x = 0;
            return None;
        } else {
            self.x -= 1;
        }
        Some(self.x as f64)
    }
}

/// Cycle-maximum law from the gambler's-ruin identity, written with
/// `ρ = p/q < 1` so that large levels do not overflow.
#[derive(Debug, Clone, Copy)]
pub struct ReflectedLaw {
    p: f64,
}

impl ReflectedLaw {
    fn rho(&self) -> f64 {
        self.p / (1.0 - self.p)
    }

    /// `P(τ_0 < τ_{m+1} | X_0 = m) = (1 − ρ)/(1 − ρ^{m+1})`.
    fn ruin_before_next_level(&self, m: u64) -> f64 {
        let rho = self.rho();
        (1.0 - rho) / (1.0 - rho.powf(m as f64 + 1.0))
    }
}

impl CycleLaw for ReflectedLaw {
    /// `P(ζ > m) = p · ρ^m (1 − ρ)/(1 − ρ^{m+1})` for integer `m ≥ 0`.
    fn tail(&self, x: f64) -> f64 {
        if x < 0.0 {
            return 1.0;
        }
        let m = x.floor();
        let rho = self.rho();
        self.p * rho.powf(m) * (1.0 - rho) / (1.0 - rho.powf(m + 1.0))
    }

    /// Only `β_1(x) = q · P(τ_0 < τ_{m+1} | X_0 = m)` has a closed form.
    fn beta_at(&self, x: f64, i: usize) -> Option<f64> {
        (i == 1).then(|| {
            let m = if x < 0.0 { 0 } else { x.floor() as u64 };
            (1.0 - self.p) * self.ruin_before_next_level(m)
        })
    }

    fn beta_limit(&self, i: usize) -> Option<f64> {
        (i == 1).then_some(1.0 - 2.0 * self.p)
    }
}

pub fn reflected_walk_profile(p: f64) -> Result<PhantomProfile> {
    ModelSpec::ReflectedWalk { p }.validate()?;
    let q = 1.0 - p;
    PhantomProfile::new(
        q / (q - p),
        f64::INFINITY,
        Arc::new(ReflectedLaw { p }),
        ProfileSource::ClosedForm,
    )
}
