//! Command-line front end: configured runs, verification suites and
//! divergence tables.
//!
//! Exit codes are the machine contract: 0 success, 1 a check failed,
//! 2 bad configuration or input, 3 the engine rejected a move.

pub mod config;
pub mod export;
pub mod report;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand};
use opinion_merge_core::engine::{run_competitive, run_modified, DefaultExceptional, Players};
use opinion_merge_core::scenarios::gen_forecast_pair;
use opinion_merge_core::verify::{
    check_big_alpha_bound, check_growth_bounds, check_small_alpha_identity, run_suite, CheckReport, Suite,
};
use opinion_merge_core::{
    chi2_divergence, div_bracket, div_paren, hellinger_integral, kl_divergence, mixture_densities, AlphaParam,
    Distribution, EngineError, ProtocolKind, Role, Transcript,
};
use thiserror::Error;

use config::{CheckSpec, ConfigError, RunConfig};
use export::{write_transcript, ExportError};
use report::ReportFile;

pub const EXIT_OK: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_ENGINE: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "opinion-merge", version, about = "Simulate and verify competitive forecast-testing protocols")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Play a configured scenario and write its transcript.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Transcript CSV; overrides the config. Standard output if neither is set.
        #[arg(long)]
        output: Option<PathBuf>,
        /// TOML report of the configured checks; overrides the config.
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Run a verification suite.
    Verify {
        #[arg(long, default_value = "all")]
        suite: String,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Print divergences between two forecasts.
    Divergence {
        /// Comma-separated probabilities of the first forecast.
        #[arg(long, allow_hyphen_values = true)]
        p1: String,
        #[arg(long, allow_hyphen_values = true)]
        p2: String,
        /// Orders; repeat the flag or separate with commas.
        #[arg(long, value_delimiter = ',', allow_negative_numbers = true, default_value = "0")]
        alpha: Vec<f64>,
    },
}

#[derive(Debug, Error)]
pub enum RunError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Engine(#[from] EngineError),
    #[error("cannot write output: {0}")]
    Output(#[from] ExportError),
    #[error("cannot write report: {0}")]
    Report(std::io::Error),
}

impl RunError {
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Engine(_) => EXIT_ENGINE,
            _ => EXIT_CONFIG,
        }
    }
}

/// Transcript and check reports of one configured run.
pub struct RunOutcome {
    pub transcript: Transcript,
    pub reports: Vec<CheckReport>,
}

/// Plays the configured scenario and evaluates its checks.
pub fn execute(cfg: &RunConfig) -> Result<RunOutcome, RunError> {
    cfg.validate()?;
    let regime = cfg.scenario.regime()?;
    let (mut fi, mut fii) = gen_forecast_pair(cfg.seed, cfg.outcomes, regime).map_err(ConfigError::from)?;
    let mut si = cfg.sceptic_i.build(Role::I, cfg.horizon, cfg.seed)?;
    let mut sii = cfg.sceptic_ii.build(Role::II, cfg.horizon, cfg.seed)?;
    let mut reality = cfg.scenario.reality(cfg.seed, cfg.outcomes)?;
    let players = Players {
        forecaster_i: &mut fi,
        forecaster_ii: &mut fii,
        sceptic_i: si.as_mut(),
        sceptic_ii: sii.as_mut(),
        reality: reality.as_mut(),
    };
    let transcript = match ProtocolKind::from(cfg.protocol) {
        ProtocolKind::Competitive => run_competitive(players, cfg.horizon)?,
        ProtocolKind::Modified => run_modified(players, &mut DefaultExceptional, cfg.horizon)?,
    };
    let mut reports = Vec::new();
    for check in &cfg.checks {
        let alpha = |a: f64| AlphaParam::new(a).map_err(|e| ConfigError::Invalid(e.to_string()));
        let report = match *check {
            CheckSpec::SmallAlpha { alpha: a } => check_small_alpha_identity(&transcript, alpha(a)?),
            CheckSpec::BigAlpha { alpha: a } => {
                check_big_alpha_bound(&transcript, alpha(a)?).map_err(|e| ConfigError::Invalid(e.to_string()))?
            }
            _ => {
                let (c, variant) = check.growth().expect("growth check");
                check_growth_bounds(&transcript, c, variant).map_err(|e| ConfigError::Invalid(e.to_string()))?
            }
        };
        reports.push(report);
    }
    Ok(RunOutcome { transcript, reports })
}

fn cmd_run(config: PathBuf, output: Option<PathBuf>, report: Option<PathBuf>) -> Result<i32, RunError> {
    let mut cfg = RunConfig::load(&config)?;
    cfg.apply_env()?;
    let outcome = execute(&cfg)?;
    let alpha = cfg.reference_alpha();
    match output.or_else(|| cfg.output.clone()) {
        Some(path) => {
            let file = std::fs::File::create(&path).map_err(ExportError::from)?;
            write_transcript(std::io::BufWriter::new(file), &outcome.transcript, alpha)?;
        }
        None => write_transcript(std::io::stdout().lock(), &outcome.transcript, alpha)?,
    }
    for r in &outcome.reports {
        eprintln!("{r}");
    }
    let (ki, kii) = outcome.transcript.final_capitals();
    eprintln!("{} rounds, log K_I = {ki}, log K_II = {kii}", outcome.transcript.len());
    let file = ReportFile::new(format!("run config={} seed={}", config.display(), cfg.seed), &outcome.reports);
    if let Some(path) = report.or_else(|| cfg.report.clone()) {
        file.write(&path).map_err(RunError::Report)?;
    }
    Ok(if file.pass { EXIT_OK } else { EXIT_CHECK_FAILED })
}

fn cmd_verify(suite: &str, seed: u64, report: Option<PathBuf>) -> i32 {
    let suite: Suite = match suite.parse() {
        Ok(s) => s,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_CONFIG;
        }
    };
    let reports = match run_suite(suite, seed) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_CHECK_FAILED;
        }
    };
    for r in &reports {
        println!("{r}");
    }
    let file = ReportFile::new(format!("verify suite={suite} seed={seed}"), &reports);
    if let Some(path) = report {
        if let Err(e) = file.write(&path) {
            eprintln!("error: cannot write report: {e}");
            return EXIT_CONFIG;
        }
    }
    let failed = file.checks.iter().filter(|c| !c.pass).count();
    println!("{} checks, {failed} failed", file.checks.len());
    if file.pass {
        EXIT_OK
    } else {
        EXIT_CHECK_FAILED
    }
}

/// Parses a comma-separated probability vector.
pub fn parse_distribution(text: &str) -> Result<Distribution, String> {
    let values = text
        .split(',')
        .map(|s| s.trim().parse::<f64>().map_err(|_| format!("'{s}' is not a number")))
        .collect::<Result<Vec<_>, _>>()?;
    Distribution::new(values).map_err(|e| e.to_string())
}

/// Rows `alpha hellinger paren bracket kl chi2`.
pub fn divergence_table(p1: &Distribution, p2: &Distribution, alphas: &[f64]) -> Result<Vec<String>, String> {
    let dp = mixture_densities(p1, p2).map_err(|e| e.to_string())?;
    let mut rows = vec!["alpha\thellinger\tparen\tbracket\tkl\tchi2".to_string()];
    for &a in alphas {
        let alpha = AlphaParam::new(a).map_err(|e| e.to_string())?;
        rows.push(format!(
            "{a}\t{}\t{}\t{}\t{}\t{}",
            hellinger_integral(&dp, alpha),
            div_paren(&dp, alpha),
            div_bracket(&dp, alpha),
            kl_divergence(&dp),
            chi2_divergence(&dp)
        ));
    }
    Ok(rows)
}

fn cmd_divergence(p1: &str, p2: &str, alphas: &[f64]) -> i32 {
    let table = parse_distribution(p1)
        .and_then(|a| parse_distribution(p2).map(|b| (a, b)))
        .and_then(|(a, b)| divergence_table(&a, &b, alphas));
    match table {
        Ok(rows) => {
            let mut out = std::io::stdout().lock();
            for row in rows {
                let _ = writeln!(out, "{row}");
            }
            EXIT_OK
        }
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_CONFIG
        }
    }
}

/// Runs the command line and returns the exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    match cli.command {
        Command::Run { config, output, report } => cmd_run(config, output, report).unwrap_or_else(|e| {
            eprintln!("error: {e}");
            e.exit_code()
        }),
        Command::Verify { suite, seed, report } => cmd_verify(&suite, seed, report),
        Command::Divergence { p1, p2, alpha } => cmd_divergence(&p1, &p2, &alpha),
    }
}
