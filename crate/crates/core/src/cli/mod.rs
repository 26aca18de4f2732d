//! Command-line front end: configuration, CSV output and figure recipes.

pub mod commands;
pub mod config;
pub mod csv;
pub mod recipes;

use std::ffi::OsString;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use crate::error::Error;

pub use config::{Axis, MethodChoice, RunConfig};
pub use recipes::Figure;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Model(#[from] Error),
    #[error("configuration: {0}")]
    Config(String),
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },
    #[error("cannot resume {}: {reason}", path.display())]
    Resume { path: PathBuf, reason: String },
    #[error("thread pool: {0}")]
    Threads(String),
}

impl CliError {
    pub(crate) fn io(path: &Path, source: std::io::Error) -> Self {
        CliError::Io { path: path.to_path_buf(), source }
    }

    fn resume(path: &Path, reason: &str) -> Self {
        CliError::Resume { path: path.to_path_buf(), reason: reason.into() }
    }
}

#[derive(Debug, Parser)]
#[command(name = "ntn-tilt", version, about = "Outage analysis and antenna-tilt optimization for UAV non-terrestrial networks")]
pub struct Cli {
    /// TOML run configuration; defaults apply to anything left out.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output CSV path; standard output when absent.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Overrides `sim.seed`.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Worker threads; results do not depend on this.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Overrides `run.method`.
    #[arg(long, global = true, value_enum)]
    pub method: Option<MethodChoice>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Outage of the configured scheme for each user type and the network.
    Outage,
    /// Outage along one parameter axis; appends missing points to an existing output.
    Sweep {
        #[arg(long, value_enum)]
        axis: Option<Axis>,
        /// Comma-separated axis values.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        values: Vec<f64>,
    },
    /// Outage-minimizing tilts of the configured scheme.
    Optimize,
    /// Optimal ES share of ground-serving BSs with re-optimized tilts.
    OptimizeRatio,
    /// BS density at which optimized IS and ES outages cross.
    CriticalDensity {
        /// Density bracket `LO HI` in BS/m².
        #[arg(long, num_args = 2, value_names = ["LO", "HI"])]
        bracket: Option<Vec<f64>>,
    },
    /// Monte Carlo estimates with association frequencies.
    Montecarlo,
    /// Regenerates the data behind one figure.
    Reproduce {
        #[arg(value_enum)]
        figure: Figure,
    },
}

impl Command {
    fn label(&self) -> String {
        match self {
            Command::Outage => "outage".into(),
            Command::Sweep { .. } => "sweep".into(),
            Command::Optimize => "optimize".into(),
            Command::OptimizeRatio => "optimize-ratio".into(),
            Command::CriticalDensity { .. } => "critical-density".into(),
            Command::Montecarlo => "montecarlo".into(),
            Command::Reproduce { figure } => format!("reproduce {}", figure.name()),
        }
    }
}

/// Finished run: CSV text and where it went.
#[derive(Debug)]
pub struct Report {
    pub csv: String,
    pub path: Option<PathBuf>,
    /// Metadata notes, echoed as a summary.
    pub notes: Vec<String>,
}

/// Effective configuration after applying command-line overrides.
pub fn effective_config(cli: &Cli) -> Result<RunConfig, CliError> {
    let mut cfg = match &cli.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    if let Some(seed) = cli.seed {
        cfg.sim.seed = seed;
    }
    if let Some(method) = cli.method {
        cfg.run.method = method;
    }
    if let Command::Sweep { axis, values } = &cli.command {
        if let Some(a) = axis {
            cfg.sweep.axis = Some(*a);
        }
        if !values.is_empty() {
            cfg.sweep.values = values.clone();
            cfg.sweep.start = None;
            cfg.sweep.stop = None;
            cfg.sweep.step = None;
        }
    }
    if let Command::CriticalDensity { bracket: Some(b) } = &cli.command {
        cfg.critical.bracket = [b[0], b[1]];
    }
    cfg.validate()?;
    Ok(cfg)
}

pub fn run(cli: &Cli) -> Result<Report, CliError> {
    match cli.threads {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build()
            .map_err(|e| CliError::Threads(e.to_string()))?
            .install(|| execute(cli)),
        None => execute(cli),
    }
}

fn execute(cli: &Cli) -> Result<Report, CliError> {
    let cfg = effective_config(cli)?;
    let method = cfg.run.method;
    let meta = csv::Metadata {
        command: cli.command.label(),
        config_sha256: cfg.sha256(),
        seed: cfg.sim.seed,
    };
    let path = cli.out.clone().or_else(|| cfg.output.path.clone());
    let table = match &cli.command {
        Command::Outage => commands::outage(&cfg, method)?,
        Command::Sweep { .. } => return run_sweep(&cfg, &meta, path),
        Command::Optimize => commands::optimize(&cfg, method)?,
        Command::OptimizeRatio => commands::optimize_ratio(&cfg, method)?,
        Command::CriticalDensity { .. } => commands::critical_density(&cfg, method, cfg.critical.bracket)?,
        Command::Montecarlo => commands::montecarlo(&cfg)?,
        Command::Reproduce { figure } => recipes::reproduce(*figure, &cfg)?,
    };
    let text = csv::render(&meta, &table);
    if let Some(p) = &path {
        std::fs::write(p, &text).map_err(|e| CliError::io(p, e))?;
    }
    Ok(Report {
        csv: text,
        path,
        notes: table.notes,
    })
}

fn run_sweep(cfg: &RunConfig, meta: &csv::Metadata, path: Option<PathBuf>) -> Result<Report, CliError> {
    let axis = cfg.sweep.axis.ok_or_else(|| Error::invalid("sweep.axis", "no axis given"))?;
    let points = cfg.sweep.points()?;
    let header = commands::sweep_table(axis).header_line();
    let existing = match &path {
        Some(p) if p.exists() => Some(read_existing(p, meta, &header)?),
        _ => None,
    };
    let Some(done) = existing else {
        let table = commands::sweep(cfg, cfg.run.method, axis, &points)?;
        let text = csv::render(meta, &table);
        if let Some(p) = &path {
            std::fs::write(p, &text).map_err(|e| CliError::io(p, e))?;
        }
        return Ok(Report { csv: text, path, notes: table.notes });
    };
    let p = path.expect("existing output has a path");
    let missing: Vec<f64> = points.into_iter().filter(|v| !done.contains(&csv::fmt_g(*v))).collect();
    let table = commands::sweep(cfg, cfg.run.method, axis, &missing)?;
    let appended = table.render_rows();
    let mut text = std::fs::read_to_string(&p).map_err(|e| CliError::io(&p, e))?;
    if !text.is_empty() && !text.ends_with('\n') {
        text.push('\n');
    }
    text.push_str(&appended);
    std::fs::write(&p, &text).map_err(|e| CliError::io(&p, e))?;
    Ok(Report {
        csv: text,
        path: Some(p),
        notes: vec![format!("resumed: {} new points", missing.len())],
    })
}

/// Keys of completed points in an earlier output of the same run.
fn read_existing(path: &Path, meta: &csv::Metadata, header: &str) -> Result<Vec<String>, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    let e = csv::parse_existing(&text);
    let hash = format!("config_sha256: {}", meta.config_sha256);
    if !e.meta.contains(&hash) {
        return Err(CliError::resume(path, "it was written for a different configuration"));
    }
    if e.header.as_deref() != Some(header) {
        return Err(CliError::resume(path, "its columns differ from this sweep"));
    }
    Ok(e.first_column)
}

/// Entry point of the `ntn-tilt` binary.
pub fn main_with_args<I, T>(args: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(2) } else { ExitCode::SUCCESS };
        }
    };
    match run(&cli) {
        Ok(report) => {
            match &report.path {
                Some(p) => {
                    for note in &report.notes {
                        eprintln!("{note}");
                    }
                    eprintln!("wrote {}", p.display());
                }
                None => print!("{}", report.csv),
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
