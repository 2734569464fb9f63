use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context};
use clap::{Parser, ValueEnum};
use hardylab::hardy::EstimateOptions;
use hardylab::{MeanSpec, SeqSpec};
use serde::{Deserialize, Serialize};

use crate::CliError;

pub const CHECKPOINTS_ENV: &str = "HARDYLAB_CHECKPOINTS";
pub const DEFAULT_N: usize = 100_000;
pub const DEFAULT_TOL: f64 = 1e-3;
pub const DEFAULT_SEED: u64 = 42;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Eval,
    Axioms,
    HardyConstant,
    HardyRatio,
    Ratios,
    TestHardy,
    TestWeakHardy,
    Lemma1,
    Counterexample,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Output {
    Json,
    Csv,
}

#[derive(Debug, Parser)]
#[command(name = "hardylab", version, about = "Means, Hardy constants and weak-Hardy counterexamples")]
pub struct Cli {
    /// Analysis to run; may instead come from --config
    #[arg(value_enum)]
    pub command: Option<Command>,
    /// family[:param] (power:0.5, geometric, arithmetic, harmonic, min, max,
    /// quasi:EXPR) or file:PATH holding a JSON mean spec
    #[arg(long)]
    pub mean: Option<String>,
    /// rule[:param] (harmonic, power:ALPHA, constant:V, geometric:Q,
    /// explicit:V1,V2,..., custom:EXPR in n)
    #[arg(long)]
    pub seq: Option<String>,
    /// Comma-separated positive entries (eval only)
    #[arg(long)]
    pub vector: Option<String>,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub tol: Option<f64>,
    /// Comma-separated exponents (test-weak-hardy only)
    #[arg(long)]
    pub s_grid: Option<String>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, value_enum)]
    pub output: Option<Output>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// JSON config object, or an earlier report whose config is re-run
    #[arg(long)]
    pub config: Option<PathBuf>,
}

/// Fully resolved configuration, echoed in every report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub command: Command,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mean: Option<MeanSpec>,
    pub seq: SeqSpec,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub vector: Option<Vec<f64>>,
    pub n: usize,
    pub tol: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub s_grid: Option<Vec<f64>>,
    pub seed: u64,
    pub checkpoints_per_decade: f64,
    pub output: Output,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub out_path: Option<PathBuf>,
}

impl RunConfig {
    pub fn mean(&self) -> Result<&MeanSpec, CliError> {
        self.mean
            .as_ref()
            .ok_or_else(|| CliError::Usage(anyhow!("{:?} needs --mean", self.command)))
    }

    pub fn estimate_options(&self) -> EstimateOptions {
        EstimateOptions {
            tol: self.tol,
            checkpoints_per_decade: self.checkpoints_per_decade,
        }
    }
}

/// Every field optional: the shape accepted from config files.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct PartialConfig {
    command: Option<Command>,
    mean: Option<MeanSpec>,
    seq: Option<SeqSpec>,
    vector: Option<Vec<f64>>,
    n: Option<usize>,
    tol: Option<f64>,
    s_grid: Option<Vec<f64>>,
    seed: Option<u64>,
    checkpoints_per_decade: Option<f64>,
    output: Option<Output>,
    out_path: Option<PathBuf>,
}

fn read_config(path: &Path) -> anyhow::Result<PartialConfig> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let mut value: serde_json::Value =
        serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
    // a whole report: re-run its echoed config
    if let Some(inner) = value.get_mut("config") {
        value = inner.take();
    }
    serde_json::from_value(value).with_context(|| format!("invalid config in {}", path.display()))
}

pub fn parse_list(text: &str, what: &str) -> anyhow::Result<Vec<f64>> {
    text.split(',')
        .map(|s| {
            s.trim()
                .parse::<f64>()
                .with_context(|| format!("{what}: `{}` is not a number", s.trim()))
        })
        .collect()
}

fn param(rest: Option<&str>, family: &str) -> anyhow::Result<f64> {
    let text = rest.ok_or_else(|| anyhow!("`{family}` needs a parameter, e.g. {family}:0.5"))?;
    text.parse().with_context(|| format!("`{text}` is not a number"))
}

pub fn parse_mean(text: &str) -> anyhow::Result<MeanSpec> {
    let (family, rest) = match text.split_once(':') {
        Some((f, r)) => (f, Some(r)),
        None => (text, None),
    };
    let no_param = |spec: MeanSpec| match rest {
        Some(_) => bail!("`{family}` takes no parameter"),
        None => Ok(spec),
    };
    match family.trim().to_ascii_lowercase().as_str() {
        "power" => Ok(MeanSpec::power(param(rest, "power")?)?),
        "geometric" => no_param(MeanSpec::geometric()),
        "arithmetic" => no_param(MeanSpec::arithmetic()),
        "harmonic" => no_param(MeanSpec::harmonic()),
        "min" => no_param(MeanSpec::min()),
        "max" => no_param(MeanSpec::max()),
        "quasi" | "quasiarithmetic" => {
            let g = rest.ok_or_else(|| anyhow!("`quasi` needs a generator, e.g. quasi:log(x)"))?;
            Ok(MeanSpec::quasiarithmetic(g)?)
        }
        "file" => {
            let path = rest.ok_or_else(|| anyhow!("`file` needs a path"))?;
            let text = std::fs::read_to_string(path).with_context(|| format!("reading {path}"))?;
            serde_json::from_str(&text).with_context(|| format!("invalid mean spec in {path}"))
        }
        other => bail!("unknown mean family `{other}`"),
    }
}

pub fn parse_seq(text: &str) -> anyhow::Result<SeqSpec> {
    let (rule, rest) = match text.split_once(':') {
        Some((f, r)) => (f, Some(r)),
        None => (text, None),
    };
    match rule.trim().to_ascii_lowercase().as_str() {
        "harmonic" if rest.is_none() => Ok(SeqSpec::harmonic()),
        "harmonic" => bail!("`harmonic` takes no parameter"),
        "power" | "power_law" => Ok(SeqSpec::power_law(param(rest, "power")?)?),
        "constant" => Ok(SeqSpec::constant(param(rest, "constant")?)?),
        "geometric" => Ok(SeqSpec::geometric(param(rest, "geometric")?)?),
        "explicit" => {
            let list = rest.ok_or_else(|| anyhow!("`explicit` needs values, e.g. explicit:1,0.5"))?;
            Ok(SeqSpec::explicit(parse_list(list, "explicit")?)?)
        }
        "custom" => Ok(SeqSpec::custom(rest.ok_or_else(|| anyhow!("`custom` needs an expression in n"))?)?),
        other => bail!("unknown sequence rule `{other}`"),
    }
}

/// Defaults, then the environment, then the config file, then flags.
pub fn resolve(cli: &Cli, env_checkpoints: Option<&str>) -> Result<RunConfig, CliError> {
    let usage = CliError::Usage;
    let file = match &cli.config {
        Some(path) => read_config(path).map_err(usage)?,
        None => PartialConfig::default(),
    };
    let mut checkpoints = EstimateOptions::default().checkpoints_per_decade;
    if let Some(text) = env_checkpoints {
        checkpoints = text
            .trim()
            .parse()
            .ok()
            .filter(|&k: &f64| k > 0.0 && k.is_finite())
            .ok_or_else(|| usage(anyhow!("{CHECKPOINTS_ENV} must be a positive number, got `{text}`")))?;
    }
    let checkpoints = file.checkpoints_per_decade.unwrap_or(checkpoints);

    let command = cli
        .command
        .or(file.command)
        .ok_or_else(|| usage(anyhow!("no command given (on the command line or in --config)")))?;
    let mean = match &cli.mean {
        Some(text) => Some(parse_mean(text).map_err(usage)?),
        None => file.mean,
    };
    let seq = match &cli.seq {
        Some(text) => parse_seq(text).map_err(usage)?,
        None => file.seq.unwrap_or_else(SeqSpec::harmonic),
    };
    let vector = match &cli.vector {
        Some(text) => Some(parse_list(text, "--vector").map_err(usage)?),
        None => file.vector,
    };
    let s_grid = match &cli.s_grid {
        Some(text) => Some(parse_list(text, "--s-grid").map_err(usage)?),
        None => file.s_grid,
    };
    let config = RunConfig {
        command,
        mean,
        seq,
        vector,
        n: cli.n.or(file.n).unwrap_or(DEFAULT_N),
        tol: cli.tol.or(file.tol).unwrap_or(DEFAULT_TOL),
        s_grid,
        seed: cli.seed.or(file.seed).unwrap_or(DEFAULT_SEED),
        checkpoints_per_decade: checkpoints,
        output: cli.output.or(file.output).unwrap_or(Output::Json),
        out_path: cli.out.clone().or(file.out_path),
    };
    validate(&config)?;
    Ok(config)
}

fn validate(c: &RunConfig) -> Result<(), CliError> {
    let fail = |msg: String| Err(CliError::Usage(anyhow!(msg)));
    if c.s_grid.is_some() && c.command != Command::TestWeakHardy {
        return fail("--s-grid only applies to test-weak-hardy".into());
    }
    if let Some(grid) = &c.s_grid {
        if grid.is_empty() || grid.iter().any(|s| !(*s > 0.0 && s.is_finite())) {
            return fail("--s-grid entries must be positive".into());
        }
    }
    match (&c.vector, c.command) {
        (None, Command::Eval) => return fail("eval needs --vector".into()),
        (Some(_), cmd) if cmd != Command::Eval => return fail("--vector only applies to eval".into()),
        (Some(v), _) if v.is_empty() || v.iter().any(|x| !(*x > 0.0 && x.is_finite())) => {
            return fail("--vector entries must be positive and finite".into())
        }
        _ => {}
    }
    if c.n == 0 {
        return fail("--n must be positive".into());
    }
    if !(c.tol > 0.0 && c.tol.is_finite()) {
        return fail("--tol must be positive".into());
    }
    if !(c.checkpoints_per_decade > 0.0 && c.checkpoints_per_decade.is_finite()) {
        return fail("checkpoints_per_decade must be positive".into());
    }
    if c.output == Output::Csv && matches!(c.command, Command::Eval | Command::Axioms | Command::TestWeakHardy) {
        return fail(format!("{:?} has no CSV form; use --output json", c.command));
    }
    c.mean()?;
    Ok(())
}
