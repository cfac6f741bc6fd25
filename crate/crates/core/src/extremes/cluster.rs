use serde::{Deserialize, Serialize};

use super::ExtremesError;
use crate::scalar::Scalar;

/// Cluster-size probabilities `(β_1, …, β_{q−1})` with `β_i ≥ 0` and
/// `Σ β_i ≤ 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ClusterVector<T> {
    beta: Vec<T>,
}

impl<T: Scalar> ClusterVector<T> {
    pub fn new(beta: Vec<T>) -> Result<Self, ExtremesError> {
        let zero = T::zero();
        let mut sum = T::zero();
        for (i, b) in beta.iter().enumerate() {
            if *b < zero {
                return Err(ExtremesError::NegativeBeta { index: i + 1 });
            }
            sum = sum + b.clone();
        }
        if sum > T::one() + T::sum_tolerance() {
            return Err(ExtremesError::SumExceedsOne);
        }
        Ok(Self { beta })
    }

    /// The empty vector (no clusters of any size are weighted).
    pub fn empty() -> Self {
        Self { beta: Vec::new() }
    }

    /// `(1, 0, …, 0)` of length `len`: every cluster has size one.
    pub fn unit(len: usize) -> Self {
        let mut beta = vec![T::zero(); len];
        if let Some(first) = beta.first_mut() {
            *first = T::one();
        }
        Self { beta }
    }

    pub fn len(&self) -> usize {
        self.beta.len()
    }

    pub fn is_empty(&self) -> bool {
        self.beta.is_empty()
    }

    pub fn as_slice(&self) -> &[T] {
        &self.beta
    }

    /// `β_i` with one-based index; zero beyond the stored length.
    pub fn get(&self, i: usize) -> T {
        i.checked_sub(1)
            .and_then(|j| self.beta.get(j).cloned())
            .unwrap_or_else(T::zero)
    }

    pub fn total(&self) -> T {
        self.beta.iter().cloned().fold(T::zero(), |a, b| a + b)
    }

    /// The leading `len` entries (zero-padded when shorter).
    pub fn prefix(&self, len: usize) -> Self {
        Self {
            beta: (1..=len).map(|i| self.get(i)).collect(),
        }
    }
}
