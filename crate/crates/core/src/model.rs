//! Tagged descriptions of the implemented regenerative processes.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::models::dist::{StepDist, TailDist};
use crate::models::iid_block::ClusterLaw;
use crate::models::prescribed::{MRule, PrescribedChain};
use crate::models::Walker;

/// One of the implemented processes together with its parameters.
///
/// All processes start at their regeneration state, so the first cycle has
/// the same law as every later one.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "variant", rename_all = "snake_case")]
pub enum ModelSpec {
    /// Jump from 0 to `k` with probability `p(1-p)^k`, then descend by one.
    GeometricJump { p: f64 },
    /// Simple ±1 walk reflected at 0, with up-probability `p < 1/2`.
    ReflectedWalk { p: f64 },
    /// `X_n = max(X_{n-1} + Z_{n-1}, 0)` with i.i.d. steps.
    Lindley { step: StepDist },
    /// Markov chain whose limiting cluster-size law is `beta`.
    PrescribedBeta {
        beta: Vec<f64>,
        tail: TailDist,
        #[serde(default)]
        m_rule: MRule,
    },
    /// Blocks of a constant geometric level `V` repeated `Y` times.
    IidBlock { cluster_law: ClusterLaw },
}

impl ModelSpec {
    pub fn name(&self) -> &'static str {
        match self {
            ModelSpec::GeometricJump { .. } => "geometric_jump",
            ModelSpec::ReflectedWalk { .. } => "reflected_walk",
            ModelSpec::Lindley { .. } => "lindley",
            ModelSpec::PrescribedBeta { .. } => "prescribed_beta",
            ModelSpec::IidBlock { .. } => "iid_block",
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            ModelSpec::GeometricJump { p } => {
                if !(*p > 0.0 && *p < 1.0) {
                    return Err(Error::param("p", format!("p = {p} violates 0 < p < 1")));
                }
            }
            ModelSpec::ReflectedWalk { p } => {
                if !(*p > 0.0 && *p < 0.5) {
                    return Err(Error::param(
                        "p",
                        format!("p = {p} violates 0 < p < 1/2 (positive recurrence)"),
                    ));
                }
            }
            ModelSpec::Lindley { step } => {
                step.validate()?;
                let mean = step.mean();
                if mean >= 0.0 || mean.is_nan() {
                    return Err(Error::param(
                        "step",
                        format!("step mean {mean} violates E Z < 0"),
                    ));
                }
            }
            ModelSpec::PrescribedBeta { beta, tail, m_rule } => {
                PrescribedChain::new(beta, *tail, *m_rule)?;
            }
            ModelSpec::IidBlock { cluster_law } => cluster_law.validate()?,
        }
        Ok(())
    }

    /// True when every value of the process is an integer.
    pub fn is_integer_valued(&self) -> bool {
        match self {
            ModelSpec::Lindley { step } => match *step {
                StepDist::Constant { value } => value.fract() == 0.0,
                StepDist::TwoPoint { up, down, .. } => up.fract() == 0.0 && down.fract() == 0.0,
                StepDist::Pareto { .. } => false,
            },
            _ => true,
        }
    }

    /// Step-level simulator for this model. Parameters must be valid.
    pub fn walker(&self) -> Walker {
        Walker::new(self)
    }
}
