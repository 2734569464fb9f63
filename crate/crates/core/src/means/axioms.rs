//! Sampled checks of the mean axioms: mean-value bounds, symmetry,
//! homogeneity, monotonicity, repetition invariance and midpoint concavity.

use std::ops::RangeInclusive;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::{Mean, MeanSpec};
use crate::scalar::{rel_diff, Scalar};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Axiom {
    Bounds,
    Symmetry,
    Homogeneity,
    Monotonicity,
    RepetitionInvariance,
    Concavity,
}

impl Axiom {
    pub const ALL: [Axiom; 6] = [
        Axiom::Bounds,
        Axiom::Symmetry,
        Axiom::Homogeneity,
        Axiom::Monotonicity,
        Axiom::RepetitionInvariance,
        Axiom::Concavity,
    ];
}

/// Inputs and values of a failing trial, reproducible from the report seed.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Witness {
    pub trial: usize,
    pub inputs: Vec<Vec<f64>>,
    pub values: Vec<f64>,
    pub note: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AxiomResult {
    pub axiom: Axiom,
    pub passed: bool,
    pub worst_violation: f64,
    pub witness: Option<Witness>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PropertyReport {
    pub mean: MeanSpec,
    pub trials: usize,
    pub dim_range: (usize, usize),
    pub seed: u64,
    pub tolerance: f64,
    pub axioms: Vec<AxiomResult>,
}

impl PropertyReport {
    pub fn get(&self, axiom: Axiom) -> &AxiomResult {
        self.axioms
            .iter()
            .find(|r| r.axiom == axiom)
            .expect("every axiom is reported")
    }

    pub fn passed(&self, axiom: Axiom) -> bool {
        self.get(axiom).passed
    }

    pub fn all_passed(&self) -> bool {
        self.axioms.iter().all(|r| r.passed)
    }
}

struct Tally {
    axiom: Axiom,
    worst: f64,
    witness: Option<Witness>,
    failed: bool,
}

impl Tally {
    fn new(axiom: Axiom) -> Self {
        Self {
            axiom,
            worst: 0.0,
            witness: None,
            failed: false,
        }
    }

    fn record(&mut self, violation: f64, tol: f64, witness: impl FnOnce() -> Witness) {
        let bad = violation.is_nan() || violation > tol;
        if violation > self.worst || violation.is_nan() {
            self.worst = if violation.is_nan() { f64::INFINITY } else { violation };
        }
        if bad && !self.failed {
            self.failed = true;
            self.witness = Some(witness());
        }
    }

    fn finish(self) -> AxiomResult {
        AxiomResult {
            axiom: self.axiom,
            passed: !self.failed,
            worst_violation: self.worst,
            witness: self.witness,
        }
    }
}

fn to_f64<T: Scalar>(v: &[T]) -> Vec<f64> {
    v.iter().map(|x| x.as_f64()).collect()
}

fn sample_vector<T: Scalar>(rng: &mut ChaCha8Rng, dim: usize) -> Vec<T> {
    (0..dim)
        .map(|_| T::lit(rng.gen_range(-3.0..3.0f64) * std::f64::consts::LN_10).exp())
        .collect()
}

/// Evaluates `spec`, turning evaluation failures into NaN so they count as
/// violations.
fn eval<T: Scalar>(spec: &MeanSpec, v: &[T]) -> T {
    spec.eval(v).unwrap_or_else(|_| T::nan())
}

/// Runs `trials` sampled trials of every axiom. Vectors have dimension in
/// `dims` and entries log-uniform in `[1e-3, 1e3]`. Concavity also always
/// probes `x = (0.1, 1)`, `y = (1, 0.1)`. An axiom passes when its worst
/// relative violation is at most `tol`; the bounds axiom tolerates none.
pub fn check_axioms<T: Scalar>(
    spec: &MeanSpec,
    trials: usize,
    dims: RangeInclusive<usize>,
    seed: u64,
    tol: f64,
) -> PropertyReport {
    assert!(trials >= 1, "at least one trial");
    assert!(*dims.start() >= 1 && dims.start() <= dims.end(), "invalid dimension range");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut tallies: Vec<Tally> = Axiom::ALL.iter().map(|&a| Tally::new(a)).collect();
    let [bounds, symmetry, homogeneity, monotonicity, repetition, concavity] = &mut tallies[..] else {
        unreachable!()
    };

    let probe = (vec![T::lit(0.1), T::one()], vec![T::one(), T::lit(0.1)]);
    check_concavity(spec, &probe.0, &probe.1, 0, tol, concavity);

    for trial in 0..trials {
        let dim = rng.gen_range(dims.clone());
        let x: Vec<T> = sample_vector(&mut rng, dim);
        let y: Vec<T> = sample_vector(&mut rng, dim);
        let mx = eval(spec, &x);

        let (lo, hi) = x.iter().fold((x[0], x[0]), |(l, h), &v| (l.min(v), h.max(v)));
        let below = (lo - mx).max(T::zero());
        let above = (mx - hi).max(T::zero());
        let v_bounds = if mx.is_nan() { f64::NAN } else { (below.max(above) / hi).as_f64() };
        bounds.record(v_bounds, 0.0, || Witness {
            trial,
            inputs: vec![to_f64(&x)],
            values: vec![mx.as_f64(), lo.as_f64(), hi.as_f64()],
            note: "M(x), min(x), max(x)".into(),
        });

        let mut perm = x.clone();
        perm.shuffle(&mut rng);
        let mp = eval(spec, &perm);
        symmetry.record(rel_diff(mx, mp).as_f64(), tol, || Witness {
            trial,
            inputs: vec![to_f64(&x), to_f64(&perm)],
            values: vec![mx.as_f64(), mp.as_f64()],
            note: "M(x), M(permuted x)".into(),
        });

        let t = T::lit(rng.gen_range(-3.0..3.0f64) * std::f64::consts::LN_10).exp();
        let tx: Vec<T> = x.iter().map(|&v| t * v).collect();
        let mtx = eval(spec, &tx);
        homogeneity.record(rel_diff(mtx, t * mx).as_f64(), tol, || Witness {
            trial,
            inputs: vec![to_f64(&x), vec![t.as_f64()]],
            values: vec![mtx.as_f64(), (t * mx).as_f64()],
            note: "M(t x), t M(x)".into(),
        });

        let i = rng.gen_range(0..dim);
        let bump = T::one() + T::lit(rng.gen_range(1e-3..1.0f64));
        let mut raised = x.clone();
        raised[i] *= bump;
        let mr = eval(spec, &raised);
        let v_mono = if mr.is_nan() { f64::NAN } else { ((mx - mr).max(T::zero()) / mx).as_f64() };
        monotonicity.record(v_mono, tol, || Witness {
            trial,
            inputs: vec![to_f64(&x), to_f64(&raised)],
            values: vec![mx.as_f64(), mr.as_f64()],
            note: format!("M(x), M(x with entry {i} raised)"),
        });

        let m = [2usize, 3, 7][rng.gen_range(0..3)];
        let repeated: Vec<T> = x.iter().flat_map(|&v| std::iter::repeat_n(v, m)).collect();
        let mrep = eval(spec, &repeated);
        repetition.record(rel_diff(mrep, mx).as_f64(), tol, || Witness {
            trial,
            inputs: vec![to_f64(&x), vec![m as f64]],
            values: vec![mrep.as_f64(), mx.as_f64()],
            note: "M(x repeated m times), M(x)".into(),
        });

        check_concavity(spec, &x, &y, trial + 1, tol, concavity);
    }

    PropertyReport {
        mean: spec.clone(),
        trials,
        dim_range: (*dims.start(), *dims.end()),
        seed,
        tolerance: tol,
        axioms: tallies.into_iter().map(Tally::finish).collect(),
    }
}

fn check_concavity<T: Scalar>(spec: &MeanSpec, x: &[T], y: &[T], trial: usize, tol: f64, tally: &mut Tally) {
    let two = T::lit(2.0);
    let mid: Vec<T> = x.iter().zip(y).map(|(&a, &b)| (a + b) / two).collect();
    let (mx, my, mm) = (eval(spec, x), eval(spec, y), eval(spec, &mid));
    let chord = (mx + my) / two;
    let v = if mm.is_nan() || chord.is_nan() {
        f64::NAN
    } else {
        ((chord - mm).max(T::zero()) / chord).as_f64()
    };
    tally.record(v, tol, || Witness {
        trial,
        inputs: vec![to_f64(x), to_f64(y)],
        values: vec![mm.as_f64(), chord.as_f64()],
        note: "M((x+y)/2), (M(x)+M(y))/2".into(),
    });
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn power_half_passes_everything() {
        let r = check_axioms::<f64>(&MeanSpec::power(0.5).unwrap(), 1000, 1..=8, 42, 1e-9);
        assert!(r.all_passed(), "{r:#?}");
        for a in &r.axioms {
            assert!(a.worst_violation < 1e-9);
        }
    }

    #[test]
    fn max_fails_concavity_on_probe() {
        let r = check_axioms::<f64>(&MeanSpec::max(), 50, 2..=5, 1, 1e-9);
        let c = r.get(Axiom::Concavity);
        assert!(!c.passed);
        let w = c.witness.as_ref().unwrap();
        assert_eq!(w.inputs, vec![vec![0.1, 1.0], vec![1.0, 0.1]]);
        assert_eq!(w.values, vec![0.55, 1.0]);
        for axiom in [Axiom::Bounds, Axiom::Symmetry, Axiom::Homogeneity, Axiom::Monotonicity, Axiom::RepetitionInvariance] {
            assert!(r.passed(axiom), "{axiom:?}");
        }
    }

    #[test]
    fn arithmetic_homogeneity_is_ulp_exact() {
        let r = check_axioms::<f64>(&MeanSpec::arithmetic(), 500, 1..=8, 3, 1e-9);
        assert!(r.all_passed());
        assert!(r.get(Axiom::Homogeneity).worst_violation <= 4.0 * f64::EPSILON);
    }

    #[test]
    fn reports_are_reproducible() {
        let a = check_axioms::<f64>(&MeanSpec::geometric(), 100, 1..=4, 9, 1e-9);
        let b = check_axioms::<f64>(&MeanSpec::geometric(), 100, 1..=4, 9, 1e-9);
        assert_eq!(a, b);
    }

    #[test]
    fn power_above_one_is_not_concave() {
        let r = check_axioms::<f64>(&MeanSpec::power(3.0).unwrap(), 200, 2..=4, 5, 1e-9);
        assert!(!r.passed(Axiom::Concavity));
        assert!(r.passed(Axiom::Homogeneity));
    }
}
