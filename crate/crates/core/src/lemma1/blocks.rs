use serde::Serialize;

use super::LemmaError;
use crate::scalar::Scalar;
use crate::summation::{kahan_sum, KahanSum};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Case {
    CaseOne,
    CaseTwo,
}

/// Run of indices `first..=last` (1-based) whose weighted `r`-sum is
/// `1/(k+1)^2` by construction and whose `c` exceeds `k`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct BlockGroup {
    pub k: usize,
    pub first: usize,
    pub last: usize,
    pub complete: bool,
}

/// Block structure over `1..=len`.
///
/// Block `i` covers `(boundaries[i], boundaries[i+1]]`; when the last
/// boundary is below `len`, a trailing partial block covers the rest. For
/// `CaseOne` the boundaries are `n_0 = 0, n_1, ...` and every block is its
/// own group. For `CaseTwo` they are `q_1 = 0, q_2, ...` and groups are the
/// weighted first-case blocks formed over the `(A_k, C_k)` sequence.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BlockPartition<T> {
    pub case: Case,
    pub len: usize,
    pub boundaries: Vec<usize>,
    pub block_weight: Vec<T>,
    pub block_inf_c: Vec<T>,
    pub r_block: Vec<T>,
    pub partial_last: bool,
    pub groups: Vec<BlockGroup>,
    /// Set when `c` is not nondecreasing on the prefix, so the crossing
    /// indices are only valid for the scanned range.
    pub truncation_conditional: bool,
}

impl<T: Scalar> BlockPartition<T> {
    pub fn block_count(&self) -> usize {
        self.r_block.len()
    }

    pub fn complete_groups(&self) -> impl Iterator<Item = &BlockGroup> {
        self.groups.iter().filter(|g| g.complete)
    }

    /// 1-based index range of block `i`.
    pub fn block_range(&self, i: usize) -> (usize, usize) {
        let first = self.boundaries[i] + 1;
        let last = self.boundaries.get(i + 1).copied().unwrap_or(self.len);
        (first, last)
    }

    /// `r_n = R_k` on block `k`, for `n = 1..=len`.
    pub fn base_r(&self) -> Vec<T> {
        let mut r = Vec::with_capacity(self.len);
        for i in 0..self.block_count() {
            let (first, last) = self.block_range(i);
            r.extend(std::iter::repeat_n(self.r_block[i], last + 1 - first));
        }
        r
    }
}

/// Weighted first-case construction over an index sequence.
struct WeightedBlocks<T> {
    boundaries: Vec<usize>,
    weights: Vec<T>,
    inf_c: Vec<T>,
    r: Vec<T>,
    partial_last: bool,
    truncation_conditional: bool,
}

fn weighted_case1<T: Scalar>(c: &[T], w: &[T]) -> Result<WeightedBlocks<T>, LemmaError> {
    let len = c.len();
    let mut suffix_min = c.to_vec();
    for i in (0..len.saturating_sub(1)).rev() {
        suffix_min[i] = suffix_min[i].min(suffix_min[i + 1]);
    }
    let truncation_conditional = c.windows(2).any(|p| p[1] < p[0]);
    let mut prefix_w = Vec::with_capacity(len + 1);
    let mut acc = KahanSum::new();
    prefix_w.push(T::zero());
    for &x in w {
        acc.add(x);
        prefix_w.push(acc.value());
    }
    let weight = |from: usize, to: usize| prefix_w[to] - prefix_w[from];

    let mut boundaries = vec![0usize];
    let mut cursor = 0usize;
    for k in 1.. {
        // smallest n with c_j > k for every scanned j >= n
        let threshold = T::from_index(k);
        while cursor < len && suffix_min[cursor] <= threshold {
            cursor += 1;
        }
        if cursor == len {
            break;
        }
        let candidate = cursor + 1;
        let prev = *boundaries.last().unwrap();
        let mut next = candidate.max(prev + 1);
        if boundaries.len() >= 2 {
            let before = boundaries[boundaries.len() - 2];
            next = next.max(prev + (prev - before));
            // keep block weights nondecreasing so that R_k stays nonincreasing
            let prev_weight = weight(before, prev);
            while next <= len && weight(prev, next) < prev_weight {
                next += 1;
            }
        }
        if next > len {
            break;
        }
        boundaries.push(next);
    }
    if boundaries.len() < 2 {
        return Err(LemmaError::NoCrossing { threshold: 1, n: len });
    }

    let last = *boundaries.last().unwrap();
    let partial_last = last < len;
    let mut ends: Vec<usize> = boundaries[1..].to_vec();
    if partial_last {
        ends.push(len);
    }
    let mut weights = Vec::with_capacity(ends.len());
    let mut inf_c = Vec::with_capacity(ends.len());
    let mut r = Vec::with_capacity(ends.len());
    let mut start = 0;
    for (k, &end) in ends.iter().enumerate() {
        let mut wk = weight(start, end);
        if partial_last && k == ends.len() - 1 {
            // provisional: the block has not closed, so it is at least as heavy as its predecessor
            if let Some(&prev) = weights.last() {
                wk = wk.max(prev);
            }
        }
        let ck = c[start..end].iter().copied().fold(T::infinity(), T::min);
        let kk = T::from_index(k + 1);
        r.push(T::one() / (kk * kk * wk));
        weights.push(wk);
        inf_c.push(ck);
        start = end;
    }
    Ok(WeightedBlocks {
        boundaries,
        weights,
        inf_c,
        r,
        partial_last,
        truncation_conditional,
    })
}

/// First case: blocks `(n_k, n_{k+1}]` on which `c_n > k`, with
/// `R_k = 1 / ((k+1)^2 W_k)` and `W_k` the block's total weight.
///
/// `n_k` is the smallest index with `c_n > k` for every scanned `n >= n_k`,
/// pushed right as needed so that gaps and block weights are nondecreasing.
pub fn build_blocks_case1<T: Scalar>(c: &[T], weights: Option<&[T]>) -> Result<BlockPartition<T>, LemmaError> {
    let len = c.len();
    let ones;
    let w = match weights {
        Some(w) => w,
        None => {
            ones = vec![T::one(); len];
            &ones
        }
    };
    if w.len() != len {
        return Err(LemmaError::InvalidInput(format!("{} weights for {} ratios", w.len(), len)));
    }
    if c.iter().chain(w).any(|x| !(*x > T::zero() && x.is_finite())) {
        return Err(LemmaError::InvalidInput("ratios and weights must be positive".into()));
    }
    let blocks = weighted_case1(c, w)?;
    let groups = (0..blocks.r.len())
        .map(|k| {
            let first = blocks.boundaries[k] + 1;
            let last = blocks.boundaries.get(k + 1).copied().unwrap_or(len);
            BlockGroup {
                k,
                first,
                last,
                complete: k + 1 < blocks.boundaries.len(),
            }
        })
        .collect();
    Ok(BlockPartition {
        case: Case::CaseOne,
        len,
        boundaries: blocks.boundaries,
        block_weight: blocks.weights,
        block_inf_c: blocks.inf_c,
        r_block: blocks.r,
        partial_last: blocks.partial_last,
        groups,
        truncation_conditional: blocks.truncation_conditional,
    })
}

/// Second case: blocks `Q_k = (q_k, q_{k+1}]` of weight `A_k >= 1` each
/// (`q_{k+1}` minimal), then the weighted first case on `(C_k)` with weights
/// `(A_k)`; every `n` in `Q_k` receives that block's `R`.
pub fn build_blocks_case2<T: Scalar>(a: &[T], c: &[T]) -> Result<BlockPartition<T>, LemmaError> {
    let len = a.len();
    if c.len() != len {
        return Err(LemmaError::InvalidInput(format!("{} ratios for {} terms", c.len(), len)));
    }
    if a.iter().chain(c).any(|x| !(*x > T::zero() && x.is_finite())) {
        return Err(LemmaError::InvalidInput("terms and ratios must be positive".into()));
    }
    let mut q = vec![0usize];
    let mut weights = Vec::new();
    let mut acc = KahanSum::new();
    for (i, &x) in a.iter().enumerate() {
        acc.add(x);
        if acc.at_least(T::one()) {
            q.push(i + 1);
            weights.push(acc.value());
            acc = KahanSum::new();
        }
    }
    if q.len() < 2 {
        return Err(LemmaError::BudgetExhausted {
            n: len,
            accumulated: acc.value().as_f64(),
        });
    }
    let partial_last = *q.last().unwrap() < len;
    if partial_last {
        weights.push(acc.value());
    }
    let inf_c: Vec<T> = (0..weights.len())
        .map(|i| {
            let end = q.get(i + 1).copied().unwrap_or(len);
            c[q[i]..end].iter().copied().fold(T::infinity(), T::min)
        })
        .collect();

    let outer = weighted_case1(&inf_c, &weights)?;
    let mut r_block = Vec::with_capacity(weights.len());
    let mut groups = Vec::with_capacity(outer.r.len());
    let mut start = 0usize;
    for (j, &rj) in outer.r.iter().enumerate() {
        let end = outer.boundaries.get(j + 1).copied().unwrap_or(weights.len());
        r_block.extend(std::iter::repeat_n(rj, end - start));
        groups.push(BlockGroup {
            k: j,
            first: q[start] + 1,
            last: q.get(end).copied().unwrap_or(len),
            complete: j + 1 < outer.boundaries.len() && !(partial_last && end == weights.len()),
        });
        start = end;
    }
    Ok(BlockPartition {
        case: Case::CaseTwo,
        len,
        boundaries: q,
        block_weight: weights,
        block_inf_c: inf_c,
        r_block,
        partial_last,
        groups,
        truncation_conditional: outer.truncation_conditional || c.windows(2).any(|p| p[1] < p[0]),
    })
}

/// Per-group check of the two exact block identities, summed directly over
/// `n` rather than through the block weights.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BlockIdentity {
    pub k: usize,
    pub first: usize,
    pub last: usize,
    pub sum_ar: f64,
    pub expected_sum_ar: f64,
    pub relative_error: f64,
    pub sum_acr: f64,
    pub lower_bound_acr: f64,
    pub lower_bound_ok: bool,
}

/// Identities over every complete group: `sum a r = 1/(k+1)^2` and
/// `sum a c r >= k/(k+1)^2`, using the unstrictified `r`.
pub fn block_identities<T: Scalar>(p: &BlockPartition<T>, a: &[T], c: &[T], r: &[T], slack: f64) -> Vec<BlockIdentity> {
    p.complete_groups()
        .map(|g| {
            let range = g.first - 1..g.last;
            let sum_ar = kahan_sum(range.clone().map(|i| a[i] * r[i])).as_f64();
            let sum_acr = kahan_sum(range.map(|i| a[i] * c[i] * r[i])).as_f64();
            let k1 = (g.k + 1) as f64;
            let expected = 1.0 / (k1 * k1);
            let lower = g.k as f64 / (k1 * k1);
            BlockIdentity {
                k: g.k,
                first: g.first,
                last: g.last,
                sum_ar,
                expected_sum_ar: expected,
                relative_error: (sum_ar - expected).abs() / expected,
                sum_acr,
                lower_bound_acr: lower,
                lower_bound_ok: sum_acr >= lower - slack,
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn harmonic_numbers(n: usize) -> Vec<f64> {
        let mut h = KahanSum::new();
        (1..=n)
            .map(|k| {
                h.add(1.0 / k as f64);
                h.value()
            })
            .collect()
    }

    #[test]
    fn harmonic_boundaries() {
        let c = harmonic_numbers(10_000);
        let p = build_blocks_case1(&c, None).unwrap();
        assert_eq!(&p.boundaries[..5], &[0, 2, 4, 11, 31]);
        let gaps: Vec<usize> = p.boundaries.windows(2).map(|w| w[1] - w[0]).collect();
        assert_eq!(&gaps[..4], &[2, 2, 7, 20]);
        assert!(gaps.windows(2).all(|g| g[1] >= g[0]));
        assert!(!p.truncation_conditional);
    }

    #[test]
    fn identity_ratio_gives_uniform_gaps() {
        // c_n = n: smallest n with c_n > k is k + 1, so n_1 = 2 and the
        // first gap of 2 is then propagated
        let c: Vec<f64> = (1..=20).map(|n| n as f64).collect();
        let p = build_blocks_case1(&c, None).unwrap();
        assert_eq!(p.boundaries, vec![0, 2, 4, 6, 8, 10, 12, 14, 16, 18, 20]);
        assert!(!p.partial_last);
    }

    #[test]
    fn bounded_ratio_has_no_crossing() {
        let c = vec![1.0f64; 100];
        assert!(matches!(build_blocks_case1(&c, None), Err(LemmaError::NoCrossing { .. })));
    }

    #[test]
    fn blocks_see_ratio_above_threshold() {
        let c = harmonic_numbers(5000);
        let p = build_blocks_case1(&c, None).unwrap();
        for g in p.complete_groups() {
            assert!(c[g.first - 1..g.last].iter().all(|&x| x > g.k as f64));
        }
    }

    #[test]
    fn case_two_minimal_blocks() {
        let a: Vec<f64> = (1..=100).map(|n| 1.0 / (n as f64).sqrt()).collect();
        let c: Vec<f64> = (1..=100).map(|n| n as f64).collect();
        let p = build_blocks_case2(&a, &c).unwrap();
        assert_eq!(&p.boundaries[..3], &[0, 1, 3]);
        assert_eq!(p.block_weight[0], 1.0);
        assert!((p.block_weight[1] - (0.5f64.sqrt() + (1.0f64 / 3.0).sqrt())).abs() < 1e-15);
    }

    #[test]
    fn case_two_with_unit_terms_degenerates() {
        let a = vec![1.0f64; 50];
        let c: Vec<f64> = harmonic_numbers(50);
        let two = build_blocks_case2(&a, &c).unwrap();
        assert_eq!(two.boundaries, (0..=50).collect::<Vec<_>>());
        let one = build_blocks_case1(&c, None).unwrap();
        assert_eq!(two.base_r(), one.base_r());
    }

    #[test]
    fn case_two_budget_exhausted() {
        let a: Vec<f64> = (1..=200).map(|n| 0.5f64.powi(n)).collect();
        let c = vec![2.0; 200];
        assert!(matches!(build_blocks_case2(&a, &c), Err(LemmaError::BudgetExhausted { n: 200, .. })));
    }
}
