use serde::Serialize;

use super::{BlockPartition, LemmaError};
use crate::scalar::Scalar;

/// `r_1, ..., r_N` read off a partition, optionally strictified.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RSequence<T> {
    pub values: Vec<T>,
    /// The piecewise-constant sequence before strictification.
    pub base: Vec<T>,
    pub strictified: bool,
}

impl<T: Scalar> RSequence<T> {
    pub fn is_nonincreasing(&self) -> bool {
        self.values.windows(2).all(|w| w[1] <= w[0])
    }

    pub fn is_strictly_decreasing(&self) -> bool {
        self.values.windows(2).all(|w| w[1] < w[0])
    }
}

/// `r_n = R_k` on block `k`; with `strictify`, `r_n = (1 + 1/n) R_k`, which
/// is strictly decreasing and at most doubles any weighted sum.
pub fn emit_r<T: Scalar>(p: &BlockPartition<T>, strictify: bool, n: usize) -> Result<RSequence<T>, LemmaError> {
    if n > p.len {
        return Err(LemmaError::InvalidInput(format!(
            "partition covers 1..={}, asked for {n} terms",
            p.len
        )));
    }
    let mut base = p.base_r();
    base.truncate(n);
    let values = if strictify {
        base.iter()
            .enumerate()
            .map(|(i, &r)| (T::one() + T::one() / T::from_index(i + 1)) * r)
            .collect()
    } else {
        base.clone()
    };
    Ok(RSequence {
        values,
        base,
        strictified: strictify,
    })
}

#[cfg(test)]
mod tests {
    use super::super::{build_blocks_case1, Case};
    use super::*;

    #[test]
    fn strictified_halves() {
        let p = BlockPartition {
            case: Case::CaseOne,
            len: 2,
            boundaries: vec![0, 2],
            block_weight: vec![2.0f64],
            block_inf_c: vec![1.0],
            r_block: vec![0.5],
            partial_last: false,
            groups: vec![],
            truncation_conditional: false,
        };
        let r = emit_r(&p, true, 2).unwrap();
        assert_eq!(r.values, vec![1.0, 0.75]);
        assert!(r.is_strictly_decreasing());
        assert_eq!(emit_r(&p, false, 2).unwrap().values, vec![0.5, 0.5]);
    }

    #[test]
    fn base_is_nonincreasing() {
        let c: Vec<f64> = (1..=3000).map(|n| (n as f64).ln() + 1.0).collect();
        let p = build_blocks_case1(&c, None).unwrap();
        let r = emit_r(&p, true, 3000).unwrap();
        assert!(r.base.windows(2).all(|w| w[1] <= w[0]));
        assert!(r.is_strictly_decreasing());
        assert!(emit_r(&p, true, 3001).is_err());
    }
}
