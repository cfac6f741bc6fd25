/// The set `J_{q,k}` of vectors `(j_1, …, j_{q−1}) ∈ ℕ^{q−1}` with
/// `Σ j_i = k` and `Σ i·j_i ≤ q − 1`.
///
/// `j_i` counts the exceeding cycles that carry exactly `i` exceedances.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CompositionSet {
    pub q: usize,
    pub k: usize,
    pub members: Vec<Vec<usize>>,
}

impl CompositionSet {
    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }
}

/// Enumerates `J_{q,k}` in lexicographically decreasing order of
/// `(j_1, j_2, …)`. Empty for `q = 0` and whenever `k > q − 1`.
pub fn enumerate_j(q: usize, k: usize) -> CompositionSet {
    let mut members = Vec::new();
    if q >= 1 && k < q {
        let dims = q - 1;
        let mut current = vec![0usize; dims];
        fill(1, dims, k, q - 1, &mut current, &mut members);
    }
    CompositionSet { q, k, members }
}

/// Chooses `j_i` for `i = index..=dims` given the remaining count and weight.
fn fill(
    index: usize,
    dims: usize,
    count_left: usize,
    weight_left: usize,
    current: &mut [usize],
    out: &mut Vec<Vec<usize>>,
) {
    if index > dims {
        if count_left == 0 {
            out.push(current.to_vec());
        }
        return;
    }
    // Every later coordinate costs at least `index + 1` weight per unit.
    let max_here = count_left.min(weight_left / index);
    for j in (0..=max_here).rev() {
        let rest = count_left - j;
        let weight_after = weight_left - j * index;
        if rest * (index + 1) > weight_after && rest > 0 {
            continue;
        }
        current[index - 1] = j;
        fill(index + 1, dims, rest, weight_after, current, out);
    }
    current[index - 1] = 0;
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Scans the full box `{0..=q-1}^{q-1}` and filters by the constraints.
    fn scan(q: usize, k: usize) -> Vec<Vec<usize>> {
        let dims = q - 1;
        let mut out = Vec::new();
        let total = q.pow(dims as u32);
        for code in 0..total {
            let mut c = code;
            let v: Vec<usize> = (0..dims)
                .map(|_| {
                    let d = c % q;
                    c /= q;
                    d
                })
                .collect();
            let count: usize = v.iter().sum();
            let weight: usize = v.iter().enumerate().map(|(i, j)| (i + 1) * j).sum();
            if count == k && weight < q {
                out.push(v);
            }
        }
        out.sort();
        out
    }

    #[test]
    fn small_cases() {
        assert_eq!(enumerate_j(2, 1).members, vec![vec![1]]);
        assert_eq!(enumerate_j(3, 1).members, vec![vec![1, 0], vec![0, 1]]);
        assert_eq!(enumerate_j(3, 2).members, vec![vec![2, 0]]);
        assert_eq!(enumerate_j(4, 0).members, vec![vec![0, 0, 0]]);
        assert!(enumerate_j(3, 3).is_empty());
        assert_eq!(enumerate_j(1, 0).members, vec![Vec::<usize>::new()]);
        assert!(enumerate_j(0, 0).is_empty());
    }

    #[test]
    fn matches_exhaustive_scan() {
        for q in 2..=7 {
            for k in 0..=q {
                let mut got = enumerate_j(q, k).members;
                let n = got.len();
                got.sort();
                got.dedup();
                assert_eq!(got.len(), n, "duplicates for q={q} k={k}");
                assert_eq!(got, scan(q, k), "q={q} k={k}");
            }
        }
    }
}
