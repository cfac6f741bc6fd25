//! Scalar abstractions for the exact approximation formulas.
//!
//! The combinatorial parts (`J_{q,k}` enumeration and the multinomial
//! `gamma` sums) only need ring operations, so they work over any
//! [`Scalar`], including exact rationals. The compound CDF needs a
//! logarithm and is therefore restricted to [`Real`].

use std::fmt::Debug;

use num_bigint::BigInt;
use num_rational::{BigRational, Ratio};
use num_traits::{Float, FromPrimitive, Num};

/// A number type the cluster-size formulas can be evaluated in.
pub trait Scalar: Num + Clone + PartialOrd + FromPrimitive + Debug {
    /// Slack allowed when checking that probabilities sum to at most one.
    fn sum_tolerance() -> Self;

    /// Conversion from a nonnegative integer such as a multinomial coefficient.
    fn from_count(n: u64) -> Self {
        Self::from_u64(n).expect("count representable in scalar type")
    }
}

/// A floating-point [`Scalar`].
pub trait Real: Scalar + Float {}

impl Scalar for f64 {
    fn sum_tolerance() -> Self {
        1e-12
    }
}

impl Scalar for f32 {
    fn sum_tolerance() -> Self {
        1e-6
    }
}

impl Real for f64 {}
impl Real for f32 {}

macro_rules! exact_ratio {
    ($($int:ty),*) => {$(
        impl Scalar for Ratio<$int> {
            fn sum_tolerance() -> Self {
                Ratio::from_integer(0)
            }
        }
    )*};
}

exact_ratio!(i64, i128);

impl Scalar for BigRational {
    fn sum_tolerance() -> Self {
        Ratio::from_integer(BigInt::from(0))
    }

    fn from_count(n: u64) -> Self {
        Ratio::from_integer(BigInt::from(n))
    }
}
