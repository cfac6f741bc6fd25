//! Exact evaluation of the compound approximation for the `q`-th largest
//! value: the index sets `J_{q,k}`, the multinomial weights `γ_{q,k}`, and
//! the resulting distribution function.
//!
//! Everything here is generic over the scalar type. The combinatorial parts
//! run in exact rational arithmetic as well as in floating point.

mod approx;
mod cluster;
mod composition;
mod gamma;
mod oracle;

pub use approx::{approx_cdf, poisson_partial_sum, GN_UNDERFLOW};
pub use cluster::ClusterVector;
pub use composition::{enumerate_j, CompositionSet};
pub use gamma::{gamma, gamma_bruteforce, BRUTEFORCE_MAX_K};
pub use oracle::binomial_oracle;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ExtremesError {
    #[error("cluster probability beta_{index} is negative")]
    NegativeBeta { index: usize },
    #[error("cluster probabilities sum to more than one")]
    SumExceedsOne,
    #[error("cluster vector has {len} entries but q = {q} uses at most q - 1")]
    TooLong { len: usize, q: usize },
    #[error("q must be at least {min}, got {q}")]
    QTooSmall { q: usize, min: usize },
    #[error("brute-force enumeration is capped at k <= {cap}, got {k}")]
    BruteForceCap { k: usize, cap: usize },
    #[error("value {0} lies outside [0, 1]")]
    NotAProbability(String),
}
