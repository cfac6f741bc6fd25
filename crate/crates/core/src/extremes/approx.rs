use super::{gamma, ClusterVector, ExtremesError};
use crate::scalar::Real;

/// `G(x)^n` values below this are treated as zero.
pub const GN_UNDERFLOW: f64 = 1e-300;

fn check_unit<T: Real>(v: T) -> Result<(), ExtremesError> {
    if v >= T::zero() && v <= T::one() {
        Ok(())
    } else {
        Err(ExtremesError::NotAProbability(format!("{v:?}")))
    }
}

/// The compound approximation of `P(M_n^{(q)} ≤ x)`:
///
/// `G^n · Σ_{k=0}^{q−1} λ^k / k! · γ_{q,k}` with `λ = −log G^n`,
///
/// where `gn` is the value `G(x)^n`. Only the first `q − 1` entries of
/// `beta` enter the formula; further entries are ignored. For `q = 1`
/// the result is `gn` itself.
pub fn approx_cdf<T: Real>(q: usize, gn: T, beta: &ClusterVector<T>) -> Result<T, ExtremesError> {
    if q == 0 {
        return Err(ExtremesError::QTooSmall { q, min: 1 });
    }
    check_unit(gn)?;
    if q == 1 {
        return Ok(gn);
    }
    if gn == T::one() {
        return Ok(T::one());
    }
    let underflow = T::from_f64(GN_UNDERFLOW).unwrap_or_else(T::zero);
    if gn <= T::zero() || gn < underflow {
        return Ok(T::zero());
    }
    let lambda = -gn.ln();
    let beta = beta.prefix(q - 1);
    // term_k = gn · λ^k / k!
    let mut term = gn;
    let mut total = T::zero();
    for k in 0..q {
        if k > 0 {
            term = term * lambda / T::from_count(k as u64);
        }
        total = total + term * gamma(q, k, &beta)?;
    }
    Ok(total.min(T::one()).max(T::zero()))
}

/// `Σ_{k<q} e^{−λ} λ^k / k!` with `λ = −log gn`; the `β = (1, 0, …)` case of
/// [`approx_cdf`] computed directly.
pub fn poisson_partial_sum<T: Real>(q: usize, gn: T) -> T {
    if gn <= T::zero() {
        return T::zero();
    }
    let lambda = -gn.ln();
    let mut term = gn;
    let mut total = T::zero();
    for k in 0..q {
        if k > 0 {
            term = term * lambda / T::from_count(k as u64);
        }
        total = total + term;
    }
    total.min(T::one())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cv(b: &[f64]) -> ClusterVector<f64> {
        ClusterVector::new(b.to_vec()).unwrap()
    }

    #[test]
    fn worked_examples() {
        let e = (-1.0f64).exp();
        let v = approx_cdf(2, e, &cv(&[0.5])).unwrap();
        assert!((v - 1.5 * e).abs() < 1e-15);
        assert!((v - 0.551819).abs() < 1e-6);
        assert_eq!(approx_cdf(3, 1.0, &cv(&[0.3, 0.2])).unwrap(), 1.0);
        let v = approx_cdf(3, e, &cv(&[1.0, 0.0])).unwrap();
        assert!((v - 2.5 * e).abs() < 1e-15);
        assert!((v - 0.919699).abs() < 1e-6);
    }

    #[test]
    fn edges() {
        let b = cv(&[0.5, 0.2]);
        assert_eq!(approx_cdf(1, 0.123, &b).unwrap(), 0.123);
        assert_eq!(approx_cdf(3, 0.0, &b).unwrap(), 0.0);
        assert_eq!(approx_cdf(3, 1e-301, &b).unwrap(), 0.0);
        assert!(approx_cdf(2, 1.5, &b).is_err());
        assert!(approx_cdf(0, 0.5, &b).is_err());
    }

    #[test]
    fn unit_beta_is_poisson() {
        for &gn in &[1e-6f64, 0.01, 0.2, 0.5, 0.9, 0.999] {
            for q in 1..=8 {
                let a = approx_cdf(q, gn, &ClusterVector::unit(q.saturating_sub(1))).unwrap();
                let p = poisson_partial_sum(q, gn);
                assert!((a - p).abs() < 1e-14, "q={q} gn={gn}");
            }
        }
    }

    #[test]
    fn works_in_f32() {
        let e = (-1.0f32).exp();
        let v = approx_cdf(2, e, &ClusterVector::new(vec![0.5f32]).unwrap()).unwrap();
        assert!((v - 1.5 * e).abs() < 1e-6);
    }
}
