use std::io::Write;
use std::path::Path;
use std::process::ExitCode;

use anyhow::Context;
use clap::Parser;

mod config;
mod run;

use config::{resolve, Cli, CHECKPOINTS_ENV};

#[derive(Debug)]
pub enum CliError {
    /// Bad flags, specs or config: exit 2.
    Usage(anyhow::Error),
    /// Numerical fault during an analysis: exit 3.
    Numerical(anyhow::Error),
    Io(anyhow::Error),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Numerical(_) => 3,
            CliError::Io(_) => 1,
        }
    }

    fn error(&self) -> &anyhow::Error {
        match self {
            CliError::Usage(e) | CliError::Numerical(e) | CliError::Io(e) => e,
        }
    }
}

/// Writes through a temporary file in the target directory so readers never
/// see a partial report.
fn write_atomic(path: &Path, report: &run::Report, format: config::Output) -> anyhow::Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).with_context(|| format!("creating file in {}", dir.display()))?;
    {
        let mut w = std::io::BufWriter::new(tmp.as_file_mut());
        report.write(&mut w, format)?;
        w.flush()?;
    }
    tmp.persist(path).with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}

fn main_inner() -> Result<(), CliError> {
    let cli = Cli::parse();
    let env = std::env::var(CHECKPOINTS_ENV).ok();
    let config = resolve(&cli, env.as_deref())?;
    let report = run::dispatch(&config)?;
    match &config.out_path {
        Some(path) => write_atomic(path, &report, config.output).map_err(CliError::Io),
        None => {
            let stdout = std::io::stdout();
            let mut w = std::io::BufWriter::new(stdout.lock());
            report
                .write(&mut w, config.output)
                .and_then(|_| w.flush())
                .or_else(|e| match e.kind() {
                    // downstream closed early (e.g. `| head`)
                    std::io::ErrorKind::BrokenPipe => Ok(()),
                    _ => Err(CliError::Io(e.into())),
                })
        }
    }
}

fn main() -> ExitCode {
    match main_inner() {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {:#}", e.error());
            ExitCode::from(e.exit_code())
        }
    }
}
