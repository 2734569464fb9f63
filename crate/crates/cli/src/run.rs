use std::io::Write;

use anyhow::anyhow;
use hardylab::genparse::GeneratorError;
use hardylab::export::{write_counterexample, write_partition, write_series};
use hardylab::hardy::{
    condition_iii_scan, hardy_constant_estimate, hardy_divergence_test, hardy_ratio, log_growth_check, nearly_increasing_epsilon,
    ratio_sequence_of, HardyError,
};
use hardylab::lemma1::{
    block_identities, build_blocks_case1, build_blocks_case2, counterexample, emit_r, select_case, Case,
    CounterexampleOptions, CounterexampleOutcome, LemmaError,
};
use hardylab::means::{check_axioms, prefix_means_of, MeanError};
use hardylab::sequence::SeqError;
use hardylab::{BlockPartition, CounterexampleReport, Mean};
use serde::Serialize;
use serde_json::{json, Map, Value};

use crate::config::{Command, Output, RunConfig};
use crate::CliError;

pub const AXIOM_TRIALS: usize = 200;
pub const AXIOM_TOL: f64 = 1e-9;
pub const DEFAULT_S_GRID: [f64; 3] = [0.5, 1.0, 2.0];

pub enum CsvBody {
    Series(Vec<f64>),
    Partition(BlockPartition),
    Counterexample(Box<CounterexampleReport>),
}

pub struct Report {
    pub json: Map<String, Value>,
    pub csv: Option<CsvBody>,
}

impl Report {
    /// Writes the report in the configured format. Analyses without a
    /// series (refusals) fall back to JSON.
    pub fn write(&self, out: &mut dyn Write, format: Output) -> std::io::Result<()> {
        match (&self.csv, format) {
            (Some(CsvBody::Series(v)), Output::Csv) => write_series(out, v),
            (Some(CsvBody::Partition(p)), Output::Csv) => write_partition(out, p),
            (Some(CsvBody::Counterexample(r)), Output::Csv) => write_counterexample(out, r),
            _ => {
                serde_json::to_writer_pretty(&mut *out, &self.json)?;
                writeln!(out)
            }
        }
    }
}

fn mean_fault(e: MeanError) -> CliError {
    match e {
        MeanError::Empty
        | MeanError::NonPositive { .. }
        | MeanError::InvalidExponent(_)
        | MeanError::Generator(GeneratorError::OutsideDomain { .. }) => CliError::Usage(e.into()),
        _ => CliError::Numerical(e.into()),
    }
}

fn seq_fault(e: SeqError) -> CliError {
    match e {
        SeqError::Exhausted { .. } | SeqError::InvalidParameter(_) | SeqError::Parse(_) => CliError::Usage(e.into()),
        _ => CliError::Numerical(e.into()),
    }
}

impl From<HardyError> for CliError {
    fn from(e: HardyError) -> Self {
        match e {
            HardyError::InvalidArgument(_) => CliError::Usage(e.into()),
            HardyError::Mean(m) => mean_fault(m),
            HardyError::Sequence(s) => seq_fault(s),
        }
    }
}

impl From<LemmaError> for CliError {
    fn from(e: LemmaError) -> Self {
        match e {
            LemmaError::Hardy(h) => h.into(),
            LemmaError::Mean(m) => mean_fault(m),
            LemmaError::Sequence(s) => seq_fault(s),
            LemmaError::InvalidInput(_) => CliError::Usage(e.into()),
            _ => CliError::Numerical(e.into()),
        }
    }
}

fn object(value: impl Serialize) -> Map<String, Value> {
    match serde_json::to_value(value).expect("reports serialize") {
        Value::Object(m) => m,
        other => Map::from_iter([("result".to_string(), other)]),
    }
}

pub fn dispatch(config: &RunConfig) -> Result<Report, CliError> {
    let spec = config.mean()?;
    let n = config.n;
    let terms = || config.seq.terms::<f64>(n).map_err(seq_fault);
    let (body, csv) = match config.command {
        Command::Eval => {
            let v = config.vector.as_ref().expect("validated");
            let value = spec.eval(v).map_err(mean_fault)?;
            (object(json!({ "value": value })), None)
        }
        Command::Axioms => {
            let report = check_axioms::<f64>(spec, AXIOM_TRIALS, 1..=8, config.seed, AXIOM_TOL);
            let mut m = object(json!({ "all_passed": report.all_passed() }));
            m.extend(object(&report));
            (m, None)
        }
        Command::HardyConstant => {
            let est = hardy_constant_estimate::<f64>(spec, n, config.estimate_options())?;
            let series = est.trajectory.iter().map(|c| c.value).collect();
            (object(&est), Some(CsvBody::Series(series)))
        }
        Command::HardyRatio => {
            let r = hardy_ratio::<f64>(spec, &config.seq, n)?;
            let running: Vec<f64> = r
                .mean_partial_sums
                .iter()
                .zip(&r.seq_partial_sums)
                .map(|(m, s)| m / s)
                .collect();
            let m = object(json!({ "ratio": r.ratio, "mean_sum": r.mean_sum, "seq_sum": r.seq_sum }));
            (m, Some(CsvBody::Series(running)))
        }
        Command::Ratios => {
            let a = terms()?;
            let c = ratio_sequence_of(spec, &a)?;
            let eps = nearly_increasing_epsilon(&c);
            let m = object(json!({
                "first": c[0],
                "last": c[n - 1],
                "max": c.iter().copied().fold(f64::NEG_INFINITY, f64::max),
                "nearly_increasing": eps,
                "values": c,
            }));
            (m, Some(CsvBody::Series(c)))
        }
        Command::TestHardy => {
            if n < 20 {
                return Err(CliError::Usage(anyhow!("test-hardy needs N >= 20")));
            }
            let verdict = hardy_divergence_test::<f64>(spec, &config.seq, n, n / 10)?;
            let csv = match config.output {
                Output::Csv => Some(CsvBody::Series(ratio_sequence_of(spec, &terms()?)?)),
                Output::Json => None,
            };
            (object(&verdict), csv)
        }
        Command::TestWeakHardy => {
            let a = terms()?;
            let m = prefix_means_of(spec, &a).map_err(mean_fault)?;
            let c: Vec<f64> = m.iter().zip(&a).map(|(m, a)| m / a).collect();
            let grid = config.s_grid.clone().unwrap_or_else(|| DEFAULT_S_GRID.to_vec());
            let scan = condition_iii_scan(&a, &m, &grid)?;
            let growth = if n > 2 { Some(log_growth_check(&m, 1.0, 1.0, 2, n)?) } else { None };
            let m = object(json!({
                "nearly_increasing": nearly_increasing_epsilon(&c),
                "condition_iii": scan,
                "log_growth": growth,
            }));
            (m, None)
        }
        Command::Lemma1 => lemma1(config, spec)?,
        Command::Counterexample => {
            let opts = CounterexampleOptions {
                seed: config.seed,
                ..Default::default()
            };
            match counterexample::<f64>(spec, &config.seq, n, &opts)? {
                CounterexampleOutcome::Constructed(r) => {
                    let mut m = object(json!({ "status": "constructed" }));
                    m.extend(object(&*r));
                    (m, Some(CsvBody::Counterexample(r)))
                }
                refused => (object(&refused), None),
            }
        }
    };
    let mut json = Map::new();
    json.insert("config".into(), serde_json::to_value(config).expect("config serializes"));
    json.extend(body);
    Ok(Report { json, csv })
}

fn lemma1(config: &RunConfig, spec: &hardylab::MeanSpec) -> Result<(Map<String, Value>, Option<CsvBody>), CliError> {
    let a = config.seq.terms::<f64>(config.n).map_err(seq_fault)?;
    let c = ratio_sequence_of(spec, &a)?;
    let (case, rule) = select_case(&config.seq, &a);
    let built = match case {
        Case::CaseOne => build_blocks_case1(&c, Some(&a)),
        Case::CaseTwo => build_blocks_case2(&a, &c),
    };
    let partition = match built {
        Ok(p) => p,
        Err(e @ (LemmaError::NoCrossing { .. } | LemmaError::BudgetExhausted { .. })) => {
            let m = object(json!({ "status": "no_partition", "case": case, "case_rule": rule, "reason": e.to_string() }));
            return Ok((m, None));
        }
        Err(e) => return Err(e.into()),
    };
    let r = emit_r(&partition, true, config.n)?;
    let identities = block_identities(&partition, &a, &c, &r.base, 0.0);
    let m = object(json!({
        "status": "partitioned",
        "case_rule": rule,
        "partition": partition,
        "r_first": r.values[0],
        "r_last": r.values[config.n - 1],
        "r_strictly_decreasing": r.is_strictly_decreasing(),
        "block_identities": identities,
    }));
    Ok((m, Some(CsvBody::Partition(partition))))
}
