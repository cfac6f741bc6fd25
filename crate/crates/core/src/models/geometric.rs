//! Geometric jump chain: from 0 jump to `k` with probability `p(1−p)^k`,
//! then fall back one unit per step.

use std::sync::Arc;

use crate::cycle::CycleWalker;
use crate::error::Result;
use crate::model::ModelSpec;
use crate::profile::{CycleLaw, PhantomProfile, ProfileSource};
use crate::rng::RngStream;

#[derive(Debug, Clone)]
pub struct GeometricWalker {
    ln_stay: f64,
    level: u64,
}

impl GeometricWalker {
    pub fn new(p: f64) -> Self {
        Self {
            ln_stay: (-p).ln_1p(),
            level: 0,
        }
    }
}

impl CycleWalker for GeometricWalker {
    #[inline]
    fn begin_cycle(&mut self, _rng: &mut RngStream) -> f64 {
        self.level = 0;
        0.0
    }

    #[inline]
    fn advance(&mut self, rng: &mut RngStream) -> Option<f64> {
        match self.level {
            0 => {
                // P(K >= k) = (1-p)^k
                let k = (rng.uniform_open0().ln() / self.ln_stay).floor() as u64;
                if k == 0 {
                    return None;
                }
                self.level = k;
            }
            1 => {
                self.level = 0;
                return None;
            }
            _ => self.level -= 1,
        }
        Some(self.level as f64)
    }
}

/// `ζ = K` with `P(K ≥ k) = (1 − p)^k`.
#[derive(Debug, Clone, Copy)]
pub struct GeometricLaw {
    p: f64,
}

impl CycleLaw for GeometricLaw {
    fn tail(&self, x: f64) -> f64 {
        if x < 0.0 {
            1.0
        } else {
            ((x.floor() + 1.0) * (-self.p).ln_1p()).exp()
        }
    }

    fn beta_at(&self, _x: f64, i: usize) -> Option<f64> {
        // Above level m the cycle shows K - m values, and K - m given K > m
        // is again geometric (for x < 0 all K + 1 values count). Both give
        // the same law.
        (i >= 1).then(|| self.p * ((i - 1) as f64 * (-self.p).ln_1p()).exp())
    }

    fn beta_limit(&self, i: usize) -> Option<f64> {
        self.beta_at(0.0, i)
    }
}

pub fn geometric_jump_profile(p: f64) -> Result<PhantomProfile> {
    ModelSpec::GeometricJump { p }.validate()?;
    PhantomProfile::new(
        1.0 / p,
        f64::INFINITY,
        Arc::new(GeometricLaw { p }),
        ProfileSource::ClosedForm,
    )
}
