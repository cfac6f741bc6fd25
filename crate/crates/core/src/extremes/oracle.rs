use crate::scalar::Real;

/// Exact `P(M_n^{(q)} ≤ x)` for `n` i.i.d. observations with `F(x) = fx`:
/// `Σ_{k<q} C(n,k) (1−F)^k F^{n−k}`, with each term formed in log space.
pub fn binomial_oracle<T: Real>(q: usize, n: u64, fx: T) -> T {
    let one = T::one();
    let zero = T::zero();
    if q == 0 {
        return zero;
    }
    if fx >= one {
        return one;
    }
    if fx <= zero {
        // Only the k = n term survives.
        return if (n as usize) < q { one } else { zero };
    }
    let ln_f = fx.ln();
    let ln_tail = (-fx).ln_1p();
    let n_t = T::from_count(n);
    let mut ln_choose = zero;
    let mut total = zero;
    for k in 0..(q as u64).min(n + 1) {
        if k > 0 {
            // ln C(n,k) = ln C(n,k-1) + ln((n-k+1)/k)
            ln_choose = ln_choose + (T::from_count(n - k + 1) / T::from_count(k)).ln();
        }
        let k_t = T::from_count(k);
        total = total + (ln_choose + k_t * ln_tail + (n_t - k_t) * ln_f).exp();
    }
    total.min(one)
}
