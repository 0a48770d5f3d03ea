//! Command-line experiment runner.
//!
//! Every command reads settings in the order built-in defaults,
//! `MUDIV_SEED`, `--config` file, then flags; later sources win. CSV goes to
//! `--out` or standard output; `order`, `cm-check` and `jensen` print JSON.
//! Exit status is 0 on success, 2 on a usage or configuration error and 3
//! on a numerical failure.

pub mod commands;
pub mod config;
pub mod figures;
pub mod output;

use std::ffi::OsString;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

pub use config::{ExperimentConfig, Grid, DEFAULT_SEED, SEED_ENV};
pub use figures::{figure, FigureCheck, FigureOptions, FigureOutput};
pub use output::{write_csv, CsvRow, Method, CSV_HEADER};

use crate::error::{Error, Result};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "mudiv", version, about = "Multiuser diversity with a random number of users")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Average error rate against SNR.
    ErrorRate(Common),
    /// Ergodic capacity against SNR.
    Capacity(Common),
    /// Outage probability of the best gain against a threshold.
    Outage(Common),
    /// Laplace-transform order of two user laws and its consequences.
    Order(Common),
    /// Complete-monotonicity checks in the number of users.
    CmCheck(Common),
    /// Jensen gaps and their tightness for Poisson users.
    Jensen(Common),
    /// High-SNR error curve and fitted diversity order.
    Diversity(Common),
    /// Distance of the normalised best gain to the Gumbel law.
    Gumbel(Common),
    /// Data series for one of Figures 1–7.
    Figure {
        /// Figure number, 1 to 7.
        n: u8,
        #[command(flatten)]
        common: Common,
    },
    /// Runs the command named by the `command` key of a configuration file.
    Run(Common),
}

#[derive(Debug, Default, Args)]
struct Common {
    /// Flat `key = value` configuration file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Fading law, e.g. `rayleigh`, `nakagami:m=2`, `rician:k=3`.
    #[arg(long)]
    fading: Option<String>,
    /// User-count law, e.g. `poisson:4`; repeat to compare several.
    #[arg(long)]
    users: Vec<String>,
    /// Error model, e.g. `exp:a=1,eta=1` or `qf:a=1,eta=2`.
    #[arg(long)]
    err: Option<String>,
    /// SNR grid in dB, `start:step:stop` or a list.
    #[arg(long, allow_hyphen_values = true)]
    snr_db: Option<String>,
    /// Grid of mean user counts.
    #[arg(long)]
    lambda_grid: Option<String>,
    /// Grid of gain thresholds.
    #[arg(long)]
    x_grid: Option<String>,
    /// Monte Carlo trials (0 disables); scientific notation accepted.
    #[arg(long)]
    mc_trials: Option<String>,
    #[arg(long)]
    seed: Option<String>,
    #[arg(long)]
    workers: Option<String>,
    /// Largest user count in monotonicity checks.
    #[arg(long)]
    n_max: Option<String>,
    /// Highest difference order in monotonicity checks.
    #[arg(long)]
    order: Option<String>,
    #[arg(long)]
    tol: Option<String>,
    /// Diversity fit window in dB, `lo:hi`.
    #[arg(long)]
    window: Option<String>,
    /// Output file; standard output when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

impl Common {
    fn resolve(&self) -> Result<ExperimentConfig> {
        let mut cfg = ExperimentConfig::from_env()?;
        if let Some(path) = &self.config {
            let text = std::fs::read_to_string(path)
                .map_err(|e| Error::Parse(format!("cannot read {}: {e}", path.display())))?;
            cfg.merge_text(&text)?;
        }
        if !self.users.is_empty() {
            cfg.users.clear();
            for u in &self.users {
                cfg.set("users", u)?;
            }
        }
        let flags = [
            ("fading", &self.fading),
            ("err", &self.err),
            ("snr_db", &self.snr_db),
            ("lambda_grid", &self.lambda_grid),
            ("x_grid", &self.x_grid),
            ("mc_trials", &self.mc_trials),
            ("seed", &self.seed),
            ("workers", &self.workers),
            ("n_max", &self.n_max),
            ("order", &self.order),
            ("tol", &self.tol),
            ("window", &self.window),
        ];
        for (key, value) in flags {
            if let Some(v) = value {
                cfg.set(key, v)?;
            }
        }
        if let Some(out) = &self.out {
            cfg.out = Some(out.clone());
        }
        Ok(cfg)
    }
}

fn sink(cfg: &ExperimentConfig) -> Result<Box<dyn Write>> {
    Ok(match &cfg.out {
        Some(path) => Box::new(BufWriter::new(File::create(path).map_err(|e| {
            Error::Parse(format!("cannot create {}: {e}", path.display()))
        })?)),
        None => Box::new(io::stdout().lock()),
    })
}

fn emit_json<T: serde::Serialize>(cfg: &ExperimentConfig, value: &T) -> Result<()> {
    let mut w = sink(cfg)?;
    let fail = |e: String| Error::Instability(format!("writing JSON failed: {e}"));
    serde_json::to_writer_pretty(&mut w, value).map_err(|e| fail(e.to_string()))?;
    writeln!(w).and_then(|_| w.flush()).map_err(|e| fail(e.to_string()))
}

fn emit_csv(cfg: &ExperimentConfig, rows: &[CsvRow]) -> Result<()> {
    write_csv(sink(cfg)?, rows)
}

/// Runs the named command on a resolved configuration.
pub fn dispatch(name: &str, cfg: &ExperimentConfig) -> Result<()> {
    match name {
        "error-rate" => emit_csv(cfg, &commands::error_rate(cfg)?),
        "capacity" => emit_csv(cfg, &commands::capacity(cfg)?),
        "outage" => emit_csv(cfg, &commands::outage(cfg)?),
        "order" => emit_json(cfg, &commands::order(cfg)?),
        "cm-check" => emit_json(cfg, &commands::cm_check(cfg)?),
        "jensen" => emit_json(cfg, &commands::jensen(cfg)?),
        "diversity" => emit_csv(cfg, &commands::diversity(cfg)?),
        "gumbel" => emit_csv(cfg, &commands::gumbel(cfg)?),
        other => {
            if let Some(n) = other.strip_prefix("figure") {
                let n = n
                    .trim()
                    .trim_start_matches([':', '-'])
                    .parse::<u8>()
                    .map_err(|_| Error::Parse(format!("bad figure command `{other}`")))?;
                return run_figure(n, cfg);
            }
            Err(Error::Parse(format!("unknown command `{other}`")))
        }
    }
}

fn run_figure(n: u8, cfg: &ExperimentConfig) -> Result<()> {
    let out = figure(n, &FigureOptions::from(cfg))?;
    for c in &out.checks {
        let verdict = if c.passed { "PASS" } else { "FAIL" };
        eprintln!("figure {n}: {verdict} {} ({})", c.name, c.detail);
    }
    emit_csv(cfg, &out.rows)
}

/// Exit status for a library error.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Parse(_) => EXIT_CONFIG,
        _ => EXIT_NUMERICAL,
    }
}

/// Parses `args` (program name first), runs the command and returns the
/// process exit status. Diagnostics go to standard error.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
        }
    };
    let result = match &cli.command {
        Command::ErrorRate(c) => c.resolve().and_then(|cfg| dispatch("error-rate", &cfg)),
        Command::Capacity(c) => c.resolve().and_then(|cfg| dispatch("capacity", &cfg)),
        Command::Outage(c) => c.resolve().and_then(|cfg| dispatch("outage", &cfg)),
        Command::Order(c) => c.resolve().and_then(|cfg| dispatch("order", &cfg)),
        Command::CmCheck(c) => c.resolve().and_then(|cfg| dispatch("cm-check", &cfg)),
        Command::Jensen(c) => c.resolve().and_then(|cfg| dispatch("jensen", &cfg)),
        Command::Diversity(c) => c.resolve().and_then(|cfg| dispatch("diversity", &cfg)),
        Command::Gumbel(c) => c.resolve().and_then(|cfg| dispatch("gumbel", &cfg)),
        Command::Figure { n, common } => common.resolve().and_then(|cfg| run_figure(*n, &cfg)),
        Command::Run(c) => c.resolve().and_then(|cfg| match cfg.command.clone() {
            Some(name) => dispatch(&name, &cfg),
            None => Err(Error::Parse("run needs a `command` key in the configuration".into())),
        }),
    };
    match result {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("mudiv: {e}");
            exit_code(&e)
        }
    }
}
