//! `catamp`: experiment runner for beam-splitter cat-state amplification.

mod commands;
mod params;

use std::collections::BTreeMap;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use thiserror::Error;

use catamp::table::{ResultTable, SCHEMA_VERSION};

use params::{read_config, Params};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),
    #[error("numeric failure: {0}")]
    Numeric(String),
    #[error("i/o: {0}")]
    Io(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Numeric(_) => 3,
            CliError::Io(_) => 1,
        }
    }
}

impl From<catamp::Error> for CliError {
    fn from(e: catamp::Error) -> Self {
        use catamp::Error::*;
        match e {
            InvalidAmplitude(_) | InvalidLoss(_) | NegativeWindow(_) | InvalidTarget(_) | InvalidNodeCount(_)
            | NonPositive { .. } | NegativeTolerance(_) => CliError::Usage(e.to_string()),
            Serialization(_) => CliError::Io(e.to_string()),
            _ => CliError::Numeric(e.to_string()),
        }
    }
}

#[derive(Parser)]
#[command(name = "catamp", version, about = "Cat-state amplification by beam splitter and homodyne post-selection")]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

/// Values are kept as text so that flags and config entries share one parser.
#[derive(Args, Default)]
struct Common {
    /// odd-odd, even-even or even-odd
    #[arg(long, global = true)]
    pairing: Option<String>,
    /// Input amplitude(s), comma separated
    #[arg(long, global = true, allow_hyphen_values = true)]
    alpha: Option<String>,
    /// start:stop:step
    #[arg(long, global = true, allow_hyphen_values = true)]
    alpha_range: Option<String>,
    /// start:stop:step
    #[arg(long, global = true, allow_hyphen_values = true)]
    x_range: Option<String>,
    /// Loss rate(s) r^2, comma separated
    #[arg(long, global = true, allow_hyphen_values = true)]
    loss: Option<String>,
    /// Target fidelities, comma separated
    #[arg(long, global = true)]
    targets: Option<String>,
    /// Post-selection half-width; 0 means the single outcome --x0
    #[arg(long, global = true, allow_hyphen_values = true)]
    window: Option<String>,
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// csv or json
    #[arg(long, global = true)]
    format: Option<String>,
    /// Flat key = value file; command-line flags take precedence
    #[arg(long, global = true)]
    config: Option<PathBuf>,
}

#[derive(Args, Default)]
struct Extra {
    /// Gauss-Legendre nodes per window (odd, >= 3)
    #[arg(long)]
    nodes: Option<String>,
    /// Exact homodyne outcome used when --window is 0
    #[arg(long, allow_hyphen_values = true)]
    x0: Option<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Vacuum and cat quadrature wavefunctions
    Curves,
    /// Fidelity and outcome density over (alpha, x0)
    Sweep,
    /// Outcome density and fidelity along x0 for given amplitudes
    Density,
    /// Largest success probability reaching each target fidelity
    Success,
    /// Wigner functions of the inputs and the heralded output
    Wigner {
        #[command(flatten)]
        extra: Extra,
        #[arg(long)]
        grid_half: Option<String>,
        #[arg(long)]
        grid_step: Option<String>,
        /// amplitude (Re beta, Im beta) or quadrature (x, p)
        #[arg(long)]
        axes: Option<String>,
    },
    /// Repeated amplification stages
    Cascade {
        #[command(flatten)]
        extra: Extra,
        #[arg(long)]
        stages: Option<String>,
        /// clone-state or ideal-refresh
        #[arg(long)]
        rule: Option<String>,
        #[arg(long)]
        max_terms: Option<String>,
        #[arg(long)]
        prune_tol: Option<String>,
        /// Write stage reports as JSON lines
        #[arg(long)]
        reports: Option<PathBuf>,
        /// Directory for per-stage state snapshots
        #[arg(long)]
        checkpoints: Option<PathBuf>,
    },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Curves => "curves",
            Command::Sweep => "sweep",
            Command::Density => "density",
            Command::Success => "success",
            Command::Wigner { .. } => "wigner",
            Command::Cascade { .. } => "cascade",
        }
    }
}

fn flag_map(cli: &Cli) -> BTreeMap<String, String> {
    let mut m = BTreeMap::new();
    let mut put = |k: &str, v: &Option<String>| {
        if let Some(v) = v {
            m.insert(k.to_string(), v.clone());
        }
    };
    let c = &cli.common;
    put("pairing", &c.pairing);
    put("alpha", &c.alpha);
    put("alpha-range", &c.alpha_range);
    put("x-range", &c.x_range);
    put("loss", &c.loss);
    put("targets", &c.targets);
    put("window", &c.window);
    put("format", &c.format);
    let path = |p: &Option<PathBuf>| p.as_ref().map(|p| p.display().to_string());
    put("out", &path(&c.out));
    match &cli.command {
        Command::Wigner { extra, grid_half, grid_step, axes } => {
            put("nodes", &extra.nodes);
            put("x0", &extra.x0);
            put("grid-half", grid_half);
            put("grid-step", grid_step);
            put("axes", axes);
        }
        Command::Cascade { extra, stages, rule, max_terms, prune_tol, reports, checkpoints } => {
            put("nodes", &extra.nodes);
            put("x0", &extra.x0);
            put("stages", stages);
            put("rule", rule);
            put("max-terms", max_terms);
            put("prune-tol", prune_tol);
            put("reports", &path(reports));
            put("checkpoints", &path(checkpoints));
        }
        _ => {}
    }
    m
}

#[derive(Clone, Copy, PartialEq)]
enum Format {
    Csv,
    Json,
}

fn render(table: &ResultTable, format: Format) -> Result<String, CliError> {
    Ok(match format {
        Format::Csv => table.to_csv_string()?,
        Format::Json => table.to_json()? + "\n",
    })
}

fn sidecar_path(out: &Path) -> PathBuf {
    let mut s = out.as_os_str().to_owned();
    s.push(".meta.json");
    PathBuf::from(s)
}

fn manifest(command: &str, run_config: BTreeMap<String, serde_json::Value>, table: &ResultTable) -> serde_json::Value {
    serde_json::json!({
        "schema_version": SCHEMA_VERSION,
        "tool": "catamp",
        "version": env!("CARGO_PKG_VERSION"),
        "command": command,
        "run_config": run_config,
        "tolerances": {
            "quadrature_abs_tol": catamp::quad::DEFAULT_ABS_TOL,
            "quadrature_max_intervals": catamp::quad::DEFAULT_MAX_INTERVALS,
            "scan_step": catamp::protocol::SCAN_STEP,
            "bisection_tol": catamp::protocol::BISECTION_TOL,
            "prune_tol": catamp::cstate::DEFAULT_PRUNE_TOL,
        },
        "columns": table.columns,
        "rows": table.rows.len(),
        "meta": table.meta,
    })
}

fn run(cli: Cli) -> Result<(), CliError> {
    let file = match &cli.common.config {
        Some(path) => read_config(path)?,
        None => BTreeMap::new(),
    };
    let mut p = Params::new(flag_map(&cli), file);
    let format = match p.value("format", "csv".to_string())?.as_str() {
        "csv" => Format::Csv,
        "json" => Format::Json,
        other => return Err(CliError::Usage(format!("--format: expected csv or json, got `{other}`"))),
    };
    let out = p.optional::<PathBuf>("out")?;
    let command = cli.command.name();
    let table = match cli.command {
        Command::Curves => commands::curves(&mut p)?,
        Command::Sweep => commands::sweep(&mut p)?,
        Command::Density => commands::density(&mut p)?,
        Command::Success => commands::success(&mut p)?,
        Command::Wigner { .. } => commands::wigner(&mut p)?,
        Command::Cascade { .. } => commands::cascade(&mut p)?,
    };
    let bad = table.non_finite_count();
    if bad > 0 {
        return Err(CliError::Numeric(format!("{bad} non-finite values in the {command} table")));
    }
    let body = render(&table, format)?;
    match out {
        Some(path) => {
            let io = |e: io::Error, p: &Path| CliError::Io(format!("{}: {e}", p.display()));
            fs::write(&path, body).map_err(|e| io(e, &path))?;
            let meta = manifest(command, p.into_manifest(), &table);
            let side = sidecar_path(&path);
            let text = serde_json::to_string_pretty(&meta).map_err(|e| CliError::Io(e.to_string()))?;
            fs::write(&side, text + "\n").map_err(|e| io(e, &side))?;
        }
        None => io::stdout().write_all(body.as_bytes()).map_err(|e| CliError::Io(e.to_string()))?,
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("catamp: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
