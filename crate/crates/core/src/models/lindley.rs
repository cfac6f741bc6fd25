//! Lindley recursion `X_n = max(X_{n−1} + Z_{n−1}, 0)` started at 0.

use std::sync::Arc;

use super::dist::StepDist;
use crate::cycle::CycleWalker;
use crate::error::Result;
use crate::model::ModelSpec;
use crate::montecarlo::{collect_cycle_maxima, RunOptions};
use crate::profile::{CycleLaw, PhantomProfile, ProfileSource, SampleLaw};
use crate::rng::RngStream;

#[derive(Debug, Clone)]
pub struct LindleyWalker {
    step: StepDist,
    x: f64,
}

impl LindleyWalker {
    pub fn new(step: StepDist) -> Self {
        Self { step, x: 0.0 }
    }
}

impl CycleWalker for LindleyWalker {
    #[inline]
    fn begin_cycle(&mut self, _rng: &mut RngStream) -> f64 {
        self.x = 0.0;
        0.0
    }

    #[inline]
    fn advance(&mut self, rng: &mut RngStream) -> Option<f64> {
        let next = self.x + self.step.sample(rng);
        if next <= 0.0 {
            self.x = 0.0;
            None
        } else {
            self.x = next;
            Some(next)
        }
    }
}

/// Settings of the pilot run that estimates `μ` and the law of `ζ`.
#[derive(Debug, Clone, Copy)]
pub struct PilotConfig {
    pub cycles: u64,
    pub seed: u64,
    pub options: RunOptions,
}

impl Default for PilotConfig {
    fn default() -> Self {
        Self {
            cycles: 100_000,
            seed: 0,
            options: RunOptions::default(),
        }
    }
}

/// Empirical `ζ` law with all limiting cluster probabilities equal to zero.
#[derive(Debug)]
pub struct LindleyLaw {
    sample: SampleLaw,
}

impl CycleLaw for LindleyLaw {
    fn tail(&self, x: f64) -> f64 {
        self.sample.tail(x)
    }

    fn beta_at(&self, _x: f64, _i: usize) -> Option<f64> {
        None
    }

    fn beta_limit(&self, i: usize) -> Option<f64> {
        (i >= 1).then_some(0.0)
    }
}

/// Profile with `μ̂` and `G = F̂_ζ^{1/μ̂}` from a pilot run.
///
/// For long-tailed steps `G` is strictly tail-equivalent to the step law
/// `F`, because `P(ζ > x) ~ μ (1 − F(x))`.
pub fn lindley_profile(step: StepDist, pilot: &PilotConfig) -> Result<PhantomProfile> {
    let model = ModelSpec::Lindley { step };
    model.validate()?;
    let run = collect_cycle_maxima(&model, pilot.cycles, pilot.seed, &pilot.options)?;
    let right_endpoint = if step.tail(0.0) == 0.0 {
        0.0
    } else {
        f64::INFINITY
    };
    PhantomProfile::new(
        run.mean_length(),
        right_endpoint,
        Arc::new(LindleyLaw {
            sample: SampleLaw::new(run.maxima),
        }),
        ProfileSource::Estimated,
    )
}
