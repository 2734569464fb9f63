//! CSV export. Reals are written with 17 significant digits so that they
//! round-trip exactly through `f64`.

use std::io::{self, Write};

use crate::lemma1::{BlockPartition, CounterexampleReport};
use crate::scalar::Scalar;

pub const SERIES_HEADER: &str = "n,value";
pub const COUNTEREXAMPLE_HEADER: &str = "n,b_n,sum_b,mean_sum,certificate";
pub const PARTITION_HEADER: &str = "k,boundary,weight,inf_c,r_block";

struct Real(f64);

impl std::fmt::Display for Real {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{:.16e}", self.0)
    }
}

fn real<T: Scalar>(x: T) -> Real {
    Real(x.as_f64())
}

/// One row `n,value` per term, `n` starting at 1.
pub fn write_series<T: Scalar, W: Write>(mut w: W, values: &[T]) -> io::Result<()> {
    writeln!(w, "{SERIES_HEADER}")?;
    for (i, &x) in values.iter().enumerate() {
        writeln!(w, "{},{}", i + 1, real(x))?;
    }
    w.flush()
}

pub fn write_counterexample<T: Scalar, W: Write>(mut w: W, r: &CounterexampleReport<T>) -> io::Result<()> {
    writeln!(w, "{COUNTEREXAMPLE_HEADER}")?;
    for i in 0..r.b.len() {
        writeln!(
            w,
            "{},{},{},{},{}",
            i + 1,
            real(r.b[i]),
            real(r.sum_b[i]),
            real(r.mean_sums[i]),
            r.certificates.per_index[i]
        )?;
    }
    w.flush()
}

/// One row per block: index, left boundary, weight, infimum of `c`, `R`.
pub fn write_partition<T: Scalar, W: Write>(mut w: W, p: &BlockPartition<T>) -> io::Result<()> {
    writeln!(w, "{PARTITION_HEADER}")?;
    for k in 0..p.block_count() {
        writeln!(
            w,
            "{},{},{},{},{}",
            k,
            p.boundaries[k],
            real(p.block_weight[k]),
            real(p.block_inf_c[k]),
            real(p.r_block[k])
        )?;
    }
    w.flush()
}

/// Convenience wrapper returning the CSV as a string.
pub fn to_csv_string(f: impl FnOnce(&mut Vec<u8>) -> io::Result<()>) -> String {
    let mut buf = Vec::new();
    f(&mut buf).expect("writing to memory cannot fail");
    String::from_utf8(buf).expect("CSV is ASCII")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn series_round_trips() {
        let v = [0.1f64, 1.0 / 3.0, 2.718281828459045e-300];
        let s = to_csv_string(|w| write_series(w, &v));
        let mut lines = s.lines();
        assert_eq!(lines.next(), Some(SERIES_HEADER));
        for (line, &x) in lines.zip(&v) {
            let val: f64 = line.split(',').nth(1).unwrap().parse().unwrap();
            assert_eq!(val, x);
        }
        assert!(s.contains("1,1.0000000000000001e-1"));
    }
}
