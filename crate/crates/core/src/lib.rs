//! Extremes of regenerative processes: exact evaluation of the compound
//! approximation for `P(M_n^{(q)} ≤ x)`, closed-form cycle laws of several
//! model families, and a reproducible Monte Carlo harness that checks one
//! against the other.
//!
//! ```
//! use regenstat::{approx_cdf, ClusterVectorF64};
//!
//! let beta = ClusterVectorF64::new(vec![0.5, 0.5]).unwrap();
//! let p = approx_cdf(2, 0.5f64, &beta).unwrap();
//! assert!((p - 0.5 * (1.0 + 0.5 * 2f64.ln())).abs() < 1e-15);
//! ```

/// Version of this library, recorded in run manifests.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

pub mod cycle;
pub mod error;
pub mod ext_real;
pub mod extremes;
pub mod io;
pub mod model;
pub mod models;
pub mod montecarlo;
pub mod profile;
pub mod rng;
pub mod scalar;

pub use cycle::{
    simulate_cycle, simulate_cycle_capped, CycleRecord, CycleWalker, DEFAULT_CYCLE_CAP,
};
pub use error::{Error, Result};
pub use ext_real::{ExtReal, NEG_INF};
pub use extremes::{
    approx_cdf, binomial_oracle, enumerate_j, gamma, gamma_bruteforce, ClusterVector,
    CompositionSet, ExtremesError,
};
pub use model::ModelSpec;
pub use models::closed_form_profile;
pub use montecarlo::{
    compare, estimate_profile, simulate_order_stats, sup_distance, tail_equivalence_check,
    BetaSource, CompareConfig, ComparisonReport, GridSpec, OrderStatSample, RunOptions, Thresholds,
};
pub use profile::{CycleLaw, PhantomProfile, ProfileSource};
pub use rng::RngStream;
pub use scalar::{Real, Scalar};

/// Cluster-size vector in double precision.
pub type ClusterVectorF64 = ClusterVector<f64>;
/// Cluster-size vector in single precision.
pub type ClusterVectorF32 = ClusterVector<f32>;
/// Cluster-size vector in exact arbitrary-precision rationals.
pub type ExactClusterVector = ClusterVector<num_rational::BigRational>;
