//! Cycle-maximum tail against the reference distribution `F`.

use serde::Serialize;

use super::cycles::{estimate_profile, Thresholds};
use super::RunOptions;
use crate::error::{Error, Result};
use crate::model::ModelSpec;
use crate::models::prescribed::PrescribedChain;
use crate::models::reference_tail;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TailRow {
    pub x: f64,
    pub exceedances: u64,
    /// `P̂(ζ > x)`.
    pub tail_hat: f64,
    pub tail_stderr: f64,
    /// `1 − F(x)`.
    pub f_tail: f64,
    /// `μ̂ (1 − F(x))` for Lindley, `1 − F(x)` for prescribed β.
    pub reference: f64,
    pub ratio: f64,
    pub ratio_stderr: f64,
    /// No cycle exceeded `x`.
    pub vacuous: bool,
    /// Bounds `(1 − F(v_{n(x)+1}), 1 − F(v_{n(x)}))` on `P(ζ > x)` (prescribed β).
    pub sandwich: Option<(f64, f64)>,
    /// `P̂(ζ > x)` over the upper sandwich bound, exact 1 in expectation at
    /// `x = v_n − 1/2`.
    pub sandwich_ratio: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TailCheck {
    pub model: ModelSpec,
    pub cycles: u64,
    pub seed: u64,
    pub mu_hat: f64,
    pub mu_stderr: f64,
    pub rows: Vec<TailRow>,
}

/// Ratios `P̂(ζ > x)/(μ̂(1 − F(x)))` (Lindley) or `P̂(ζ > x)/(1 − F(x))`
/// (prescribed β) with binomial error bars. Convergence to 1 is reported,
/// not asserted.
pub fn tail_equivalence_check(
    model: &ModelSpec,
    num_cycles: u64,
    thresholds: &Thresholds,
    seed: u64,
    opts: &RunOptions,
) -> Result<TailCheck> {
    model.validate()?;
    let chain =
        match model {
            ModelSpec::Lindley { step } if step.is_deterministic() => return Err(Error::param(
                "model",
                "tail check needs a random step law; a deterministic step has no tail to compare",
            )),
            ModelSpec::Lindley { .. } => None,
            ModelSpec::PrescribedBeta { beta, tail, m_rule } => {
                Some(PrescribedChain::new(beta, *tail, *m_rule)?)
            }
            other => {
                return Err(Error::param(
                    "model",
                    format!(
                        "tail check applies to lindley and prescribed_beta, not {}",
                        other.name()
                    ),
                ))
            }
        };
    let f_tail = reference_tail(model).expect("model has a reference law");
    let est = estimate_profile(model, num_cycles, 1, thresholds, seed, opts)?;
    let scale = if chain.is_some() { 1.0 } else { est.mu_hat };

    let rows = est
        .thresholds
        .iter()
        .map(|s| {
            let tail_hat = s.tail();
            let tail_stderr = s.tail_stderr();
            let f = f_tail(s.x);
            let reference = scale * f;
            let sandwich = chain.as_ref().map(|c| c.tail_sandwich(s.x));
            TailRow {
                x: s.x,
                exceedances: s.exceedances,
                tail_hat,
                tail_stderr,
                f_tail: f,
                reference,
                ratio: tail_hat / reference,
                ratio_stderr: tail_stderr / reference,
                vacuous: s.vacuous(),
                sandwich,
                sandwich_ratio: sandwich.map(|(_, hi)| tail_hat / hi),
            }
        })
        .collect();

    Ok(TailCheck {
        model: model.clone(),
        cycles: num_cycles,
        seed,
        mu_hat: est.mu_hat,
        mu_stderr: est.mu_stderr,
        rows,
    })
}
