//! `uhs`: runs the ultrahyperbolic scattering checks from a TOML config and
//! writes plot-ready CSV plus a JSON report.
//!
//! Exit codes: 0 when every check passes, 1 when a check fails, 2 on a
//! configuration error.

mod commands;
mod config;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde_json::json;
use uhs_core::Error;

use crate::config::{Format, Preset, RunConfig};

#[derive(Parser, Debug)]
#[command(name = "uhs", version, about = "Ultrahyperbolic scattering-data checks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// TOML run configuration; defaults apply when omitted.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    d: Option<usize>,
    #[arg(long, global = true)]
    n: Option<usize>,
    #[arg(long, global = true)]
    epsilon: Option<f64>,
    #[arg(long, global = true, value_enum)]
    preset: Option<Preset>,
    /// Output path stem: tables go to `<out>.csv`, the report to `<out>.json`.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Subcommand, Debug, Clone, Copy)]
enum Command {
    /// Amplitude, scattering-data and compatibility checks.
    Validate,
    /// A → f → A and f → A → f error tables.
    Roundtrip,
    /// Finite-difference PDE residual with fitted order.
    Residual,
    /// Ray asymptotics of the field against the scattering data.
    Asymptotics,
    /// Stationary-phase remainder scan.
    Stationary,
    /// Fourier decay estimates on a profile.
    Lemmas,
    /// Field values at configured points.
    Eval {
        /// Also write the quadrature rules as CSV.
        #[arg(long)]
        dump_rules: bool,
    },
}

impl Command {
    fn name(self) -> &'static str {
        match self {
            Command::Validate => "validate",
            Command::Roundtrip => "roundtrip",
            Command::Residual => "residual",
            Command::Asymptotics => "asymptotics",
            Command::Stationary => "stationary",
            Command::Lemmas => "lemmas",
            Command::Eval { .. } => "eval",
        }
    }
}

fn load(cli: &Cli) -> Result<RunConfig, Error> {
    let mut cfg = RunConfig::load(cli.config.as_deref())?;
    if let Some(d) = cli.d {
        cfg.d = d;
    }
    if let Some(n) = cli.n {
        cfg.n = n;
    }
    if let Some(e) = cli.epsilon {
        cfg.epsilon = e;
    }
    if let Some(p) = cli.preset {
        cfg.preset = p;
    }
    if let Some(out) = &cli.out {
        cfg.output.path = Some(out.clone());
    }
    cfg.validate()?;
    Ok(cfg)
}

fn configure_threads() -> Result<(), Error> {
    let Ok(raw) = std::env::var("UHS_THREADS") else {
        return Ok(());
    };
    let threads: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|t| *t > 0)
        .ok_or_else(|| Error::Configuration(format!("UHS_THREADS must be a positive integer, got '{raw}'")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| Error::Configuration(format!("thread pool: {e}")))
}

fn with_suffix(stem: &Path, suffix: &str, ext: &str) -> PathBuf {
    let mut name = stem.as_os_str().to_owned();
    name.push(suffix);
    name.push(".");
    name.push(ext);
    PathBuf::from(name)
}

fn write_outputs(cfg: &RunConfig, tables: &[(String, String)], report: &str) -> Result<Vec<PathBuf>, Error> {
    let Some(stem) = &cfg.output.path else {
        return Ok(Vec::new());
    };
    let io = |p: &Path, e: std::io::Error| Error::Configuration(format!("cannot write {}: {e}", p.display()));
    if let Some(parent) = stem.parent().filter(|p| !p.as_os_str().is_empty()) {
        std::fs::create_dir_all(parent).map_err(|e| io(parent, e))?;
    }
    let mut written = Vec::new();
    if cfg.output.format != Some(Format::Json) {
        for (name, csv) in tables {
            let path = if tables.len() == 1 {
                with_suffix(stem, "", "csv")
            } else {
                with_suffix(stem, &format!("_{name}"), "csv")
            };
            std::fs::write(&path, csv).map_err(|e| io(&path, e))?;
            written.push(path);
        }
    }
    if cfg.output.format != Some(Format::Csv) {
        let path = with_suffix(stem, "", "json");
        std::fs::write(&path, report).map_err(|e| io(&path, e))?;
        written.push(path);
    }
    Ok(written)
}

fn exit_code_for(e: &Error) -> u8 {
    match e {
        Error::Dimension(_) | Error::Configuration(_) => 2,
        _ => 1,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let command = cli.command;
    let cfg = match load(&cli).and_then(|cfg| configure_threads().map(|_| cfg)) {
        Ok(cfg) => cfg,
        Err(e) => {
            eprintln!("uhs {}: {e}", command.name());
            return ExitCode::from(2);
        }
    };
    let outcome = match command {
        Command::Validate => commands::validate(&cfg),
        Command::Roundtrip => commands::roundtrip(&cfg),
        Command::Residual => commands::residual(&cfg),
        Command::Asymptotics => commands::asymptotics(&cfg),
        Command::Stationary => commands::stationary(&cfg),
        Command::Lemmas => commands::lemmas(&cfg),
        Command::Eval { dump_rules } => commands::eval(&cfg, dump_rules),
    };
    let (results, tables, pass, code) = match outcome {
        Ok(o) => {
            let code = if o.pass { 0 } else { 1 };
            (o.results, o.tables, o.pass, code)
        }
        Err(e) => {
            eprintln!("uhs {}: {e}", command.name());
            (json!({ "error": e.to_string() }), Vec::new(), false, exit_code_for(&e))
        }
    };
    let report = json!({
        "command": command.name(),
        "config_echo": cfg,
        "results": results,
        "pass": pass,
    });
    let text = serde_json::to_string_pretty(&report).expect("report values serialize");
    if let Err(e) = write_outputs(&cfg, &tables, &text) {
        eprintln!("uhs {}: {e}", command.name());
        return ExitCode::from(2);
    }
    println!("{text}");
    ExitCode::from(code)
}
