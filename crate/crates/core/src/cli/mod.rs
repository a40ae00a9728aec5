//! `intermod` command-line front end.
//!
//! Every subcommand writes a long-format CSV: `#` manifest lines, a header
//! row, then one row per grid point. Exit status is 0 on success and
//! nonzero with an `error[<category>]` line on stderr otherwise.

mod commands;
pub mod params;
pub mod table;

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use thiserror::Error;

pub use commands::Artifact;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Domain(#[from] crate::Error),
    #[error("{0}")]
    Io(String),
    #[error("{0}")]
    Validation(String),
}

impl CliError {
    /// Machine-readable category printed as `error[<category>]`.
    pub fn category(&self) -> &'static str {
        match self {
            CliError::Usage(_) => "usage",
            CliError::Domain(_) => "domain",
            CliError::Io(_) => "io",
            CliError::Validation(_) => "validation",
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Domain(_) => 3,
            CliError::Io(_) => 4,
            CliError::Validation(_) => 5,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "intermod", version, about = "Interference modulation analysis and simulation")]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Weight norms and efficiency xi over (alpha, |rho|) grids.
    Weights(WeightsArgs),
    /// Optimal threshold and analytic error probability over (N, SNR) grids.
    Theory(TheoryArgs),
    /// Monte Carlo BER against the analytic error probability.
    Ber(BerArgs),
    /// Sum-rate curves over alpha for each (|rho|, g).
    Sumrate(SumrateArgs),
}

#[derive(Debug, Args)]
struct Common {
    /// Flat TOML config file; flags override its values.
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Output CSV path (stdout when omitted or `-`).
    #[arg(long, value_name = "PATH")]
    out: Option<String>,
    #[arg(long, value_name = "U64")]
    seed: Option<String>,
    /// Worker threads (0 = all cores). Never changes results.
    #[arg(long, value_name = "INT")]
    jobs: Option<String>,
}

#[derive(Debug, Args)]
struct WeightsArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long, value_name = "GRID", allow_hyphen_values = true)]
    alpha: Option<String>,
    #[arg(long, value_name = "GRID", allow_hyphen_values = true)]
    rho: Option<String>,
    #[arg(long, value_name = "RAD", allow_hyphen_values = true)]
    rho_phase: Option<String>,
    #[arg(long, value_name = "INT")]
    k: Option<String>,
    /// Add the single-cross-term norm and its xi difference as columns.
    #[arg(long)]
    paper_closed_forms: bool,
}

#[derive(Debug, Args)]
struct TheoryArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long, value_name = "GRID")]
    n: Option<String>,
    #[arg(long, value_name = "GRID", allow_hyphen_values = true)]
    snr_db: Option<String>,
    /// Also tabulate the energy densities into this CSV.
    #[arg(long, value_name = "PATH")]
    pdf_out: Option<String>,
    #[arg(long, value_name = "INT")]
    pdf_points: Option<String>,
}

#[derive(Debug, Args)]
struct BerArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long, value_name = "GRID")]
    n: Option<String>,
    #[arg(long, value_name = "GRID", allow_hyphen_values = true)]
    snr_db: Option<String>,
    #[arg(long, value_name = "INT")]
    bits: Option<String>,
    #[arg(long, value_name = "REAL")]
    alpha: Option<String>,
    #[arg(long, value_name = "REAL")]
    rho: Option<String>,
    #[arg(long, value_name = "RAD", allow_hyphen_values = true)]
    rho_phase: Option<String>,
    #[arg(long, value_name = "REAL")]
    g: Option<String>,
    #[arg(long, value_name = "INT")]
    k: Option<String>,
    #[arg(long, value_name = "INT")]
    m: Option<String>,
}

#[derive(Debug, Args)]
struct SumrateArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long, value_name = "DB", allow_hyphen_values = true)]
    gamma_db: Option<String>,
    #[arg(long, value_name = "GRID")]
    rho: Option<String>,
    #[arg(long, value_name = "GRID")]
    g: Option<String>,
    #[arg(long, value_name = "GRID")]
    alpha: Option<String>,
    #[arg(long, value_name = "INT")]
    m: Option<String>,
    #[arg(long, value_name = "REAL")]
    pe_target: Option<String>,
    #[arg(long, value_name = "INT")]
    n_max: Option<String>,
}

fn collect(pairs: &[(&'static str, &Option<String>)]) -> BTreeMap<&'static str, String> {
    pairs
        .iter()
        .filter_map(|(k, v)| v.as_ref().map(|v| (*k, v.clone())))
        .collect()
}

/// Parsed invocation with flags split from the common options.
struct Invocation {
    command: &'static str,
    common: Common,
    flags: BTreeMap<&'static str, String>,
}

impl From<Cli> for Invocation {
    fn from(cli: Cli) -> Self {
        match cli.command {
            Command::Weights(a) => {
                let mut flags = collect(&[
                    ("alpha", &a.alpha),
                    ("rho", &a.rho),
                    ("rho_phase", &a.rho_phase),
                    ("k", &a.k),
                    ("seed", &a.common.seed),
                ]);
                if a.paper_closed_forms {
                    flags.insert("paper_closed_forms", "true".into());
                }
                Invocation { command: "weights", common: a.common, flags }
            }
            Command::Theory(a) => Invocation {
                command: "theory",
                flags: collect(&[
                    ("n", &a.n),
                    ("snr_db", &a.snr_db),
                    ("pdf_out", &a.pdf_out),
                    ("pdf_points", &a.pdf_points),
                    ("seed", &a.common.seed),
                ]),
                common: a.common,
            },
            Command::Ber(a) => Invocation {
                command: "ber",
                flags: collect(&[
                    ("n", &a.n),
                    ("snr_db", &a.snr_db),
                    ("bits", &a.bits),
                    ("alpha", &a.alpha),
                    ("rho", &a.rho),
                    ("rho_phase", &a.rho_phase),
                    ("g", &a.g),
                    ("k", &a.k),
                    ("m", &a.m),
                    ("seed", &a.common.seed),
                ]),
                common: a.common,
            },
            Command::Sumrate(a) => Invocation {
                command: "sumrate",
                flags: collect(&[
                    ("gamma_db", &a.gamma_db),
                    ("rho", &a.rho),
                    ("g", &a.g),
                    ("alpha", &a.alpha),
                    ("m", &a.m),
                    ("pe_target", &a.pe_target),
                    ("n_max", &a.n_max),
                    ("seed", &a.common.seed),
                ]),
                common: a.common,
            },
        }
    }
}

/// Parses `args` (including the program name) and runs the command,
/// returning the files it would write without touching the filesystem.
pub fn execute<I, T>(args: I) -> Result<Vec<Artifact>, CliError>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = Cli::try_parse_from(args).map_err(|e| CliError::Usage(e.to_string()))?;
    run(Invocation::from(cli))
}

fn run(inv: Invocation) -> Result<Vec<Artifact>, CliError> {
    let mut config = match &inv.common.config {
        Some(path) => params::load_config(path)?,
        None => BTreeMap::new(),
    };
    // Parallelism and output location are not result parameters.
    let jobs_cfg = config.remove("jobs");
    let out_cfg = config.remove("out");
    let jobs_raw = inv.common.jobs.clone().or(jobs_cfg).unwrap_or_else(|| "0".into());
    let jobs: usize = jobs_raw
        .trim()
        .parse()
        .map_err(|_| CliError::Usage(format!("--jobs: `{jobs_raw}` is not a nonnegative integer")))?;
    let out = inv.common.out.clone().or(out_cfg).unwrap_or_else(|| "-".into());

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| CliError::Usage(format!("--jobs: {e}")))?;
    pool.install(|| commands::dispatch(inv.command, &inv.flags, &config, out))
}

/// Writes artifacts to their paths (stdout for `-`).
pub fn write_artifacts(artifacts: &[Artifact]) -> Result<(), CliError> {
    use std::io::Write;
    for a in artifacts {
        if a.path == "-" {
            std::io::stdout()
                .write_all(a.text.as_bytes())
                .map_err(|e| CliError::Io(format!("stdout: {e}")))?;
        } else {
            std::fs::write(&a.path, &a.text).map_err(|e| CliError::Io(format!("{}: {e}", a.path)))?;
        }
    }
    Ok(())
}

/// Binary entry point; returns the process exit code.
pub fn main() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = e.print();
                return 0;
            }
            let err = CliError::Usage(e.to_string());
            eprintln!("error[{}]: {}", err.category(), err.to_string().trim_end());
            return err.exit_code();
        }
    };
    match run(Invocation::from(cli)).and_then(|a| write_artifacts(&a)) {
        Ok(()) => 0,
        Err(err) => {
            eprintln!("error[{}]: {}", err.category(), err.to_string().trim_end());
            err.exit_code()
        }
    }
}
