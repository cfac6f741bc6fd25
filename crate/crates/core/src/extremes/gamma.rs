use num_traits::pow;

use super::{enumerate_j, ClusterVector, ExtremesError};
use crate::scalar::Scalar;

/// Largest `k` accepted by [`gamma_bruteforce`].
pub const BRUTEFORCE_MAX_K: usize = 12;

fn binomial(n: usize, k: usize) -> u64 {
    let k = k.min(n - k);
    (0..k).fold(1u64, |acc, i| acc * (n - i) as u64 / (i + 1) as u64)
}

fn multinomial(parts: &[usize]) -> u64 {
    let mut left: usize = parts.iter().sum();
    let mut coef = 1u64;
    for &j in parts {
        coef *= binomial(left, j);
        left -= j;
    }
    coef
}

fn check_len<T: Scalar>(q: usize, beta: &ClusterVector<T>) -> Result<(), ExtremesError> {
    if q == 0 {
        return Err(ExtremesError::QTooSmall { q, min: 1 });
    }
    if beta.len() > q - 1 {
        return Err(ExtremesError::TooLong { len: beta.len(), q });
    }
    Ok(())
}

/// `γ_{q,k} = Σ_{j ∈ J_{q,k}} k!/(j_1!⋯j_{q−1}!) · β_1^{j_1}⋯β_{q−1}^{j_{q−1}}`.
///
/// Shorter `beta` vectors are zero-padded to length `q − 1`.
pub fn gamma<T: Scalar>(q: usize, k: usize, beta: &ClusterVector<T>) -> Result<T, ExtremesError> {
    check_len(q, beta)?;
    let set = enumerate_j(q, k);
    let mut total = T::zero();
    for j in &set.members {
        let mut term = T::from_count(multinomial(j));
        for (i, &ji) in j.iter().enumerate() {
            if ji > 0 {
                term = term * pow(beta.get(i + 1), ji);
            }
        }
        total = total + term;
    }
    Ok(total)
}

/// Same quantity as [`gamma`], summed over ordered cluster-size sequences
/// `(c_1, …, c_k) ∈ {1, …, q−1}^k` with `Σ c_m ≤ q − 1`, each contributing
/// `Π β_{c_m}`. Grouping the sequences by their size counts recovers the
/// multinomial form; this routine never does that grouping.
pub fn gamma_bruteforce<T: Scalar>(
    q: usize,
    k: usize,
    beta: &ClusterVector<T>,
) -> Result<T, ExtremesError> {
    check_len(q, beta)?;
    if k > BRUTEFORCE_MAX_K {
        return Err(ExtremesError::BruteForceCap {
            k,
            cap: BRUTEFORCE_MAX_K,
        });
    }
    if k == 0 {
        return Ok(T::one());
    }
    let budget = q - 1;
    if k > budget {
        return Ok(T::zero());
    }
    // Odometer over {1..=budget}^k.
    let mut seq = vec![1usize; k];
    let mut total = T::zero();
    loop {
        if seq.iter().sum::<usize>() <= budget {
            let term = seq.iter().fold(T::one(), |acc, &c| acc * beta.get(c));
            total = total + term;
        }
        let mut pos = 0;
        loop {
            if pos == k {
                return Ok(total);
            }
            if seq[pos] < budget {
                seq[pos] += 1;
                break;
            }
            seq[pos] = 1;
            pos += 1;
        }
    }
}
