//! `verify`: runs the numerical check suite for one scenario and writes a report.
//!
//! Exit codes: 0 all checks passed, 1 a check failed, 2 configuration or usage
//! error, 3 numeric error (series truncation, pole guard, τ floor, rank deficiency).

use clap::Parser;
use ellroot::harness::config::{parse_complex, ScenarioConfig, CHECK_NAMES};
use ellroot::harness::report::error_exit_code;
use ellroot::harness::{emit_report, run_suite, Format};
use ellroot::{Error, Result};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser, Debug)]
#[command(name = "verify", about = "Numerical verification of elliptic difference-reflection operators")]
struct Cli {
    /// Affine type, e.g. A1~1, C2~1, A4~2, D4~3 (may come from --config instead).
    #[arg(value_name = "TYPE")]
    type_name: Option<String>,
    /// Level k.
    #[arg(long)]
    level: Option<u32>,
    /// Spectral mode: invariant, generic or manual.
    #[arg(long)]
    mode: Option<String>,
    /// Comma-separated check names (default: all; empty string: none).
    #[arg(long)]
    checks: Option<String>,
    /// Modular parameter τ as RE,IM.
    #[arg(long, allow_hyphen_values = true)]
    tau: Option<String>,
    /// Seed of every sampler.
    #[arg(long)]
    seed: Option<u64>,
    /// Sample points per comparison.
    #[arg(long)]
    samples: Option<usize>,
    /// Couplings μ per root class, `;`-separated RE,IM values (one value applies to every class).
    #[arg(long, allow_hyphen_values = true)]
    mu: Option<String>,
    /// κ (generic or manual mode).
    #[arg(long, allow_hyphen_values = true)]
    kappa: Option<String>,
    /// ξ (manual mode), `;`-separated RE,IM coordinates.
    #[arg(long, allow_hyphen_values = true)]
    xi: Option<String>,
    /// Additional KEY=VALUE overrides in config-file syntax (repeatable).
    #[arg(long = "set", value_name = "KEY=VALUE", allow_hyphen_values = true)]
    set: Vec<String>,
    /// Key-value config file; flags override its entries.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Report format: json or text.
    #[arg(long, default_value = "text")]
    report: String,
    /// Write the report here instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Record zero seconds for every check (bit-identical reports).
    #[arg(long)]
    no_timing: bool,
}

fn scenario(cli: &Cli) -> Result<ScenarioConfig> {
    let mut cfg = match (&cli.config, &cli.type_name) {
        (Some(path), ty) => {
            let text = std::fs::read_to_string(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
            let mut c = ScenarioConfig::from_kv(&text, ty.as_deref().map(ScenarioConfig::new))?;
            if let Some(t) = ty {
                c.type_name = t.clone();
            }
            c
        }
        (None, Some(t)) => ScenarioConfig::new(t),
        (None, None) => return Err(Error::Config("no affine type given (positional TYPE or `type` in --config)".into())),
    };
    let flags: [(&str, Option<String>); 8] = [
        ("level", cli.level.map(|v| v.to_string())),
        ("mode", cli.mode.clone()),
        ("tau", cli.tau.clone()),
        ("seed", cli.seed.map(|v| v.to_string())),
        ("samples", cli.samples.map(|v| v.to_string())),
        ("mu", cli.mu.clone()),
        ("kappa", cli.kappa.clone()),
        ("xi", cli.xi.clone()),
    ];
    for (k, v) in flags {
        if let Some(v) = v {
            cfg.set(k, &v)?;
        }
    }
    for kv in &cli.set {
        let (k, v) = kv.split_once('=').ok_or_else(|| Error::Config(format!("--set {kv:?}: expected KEY=VALUE")))?;
        cfg.set(k.trim(), v.trim())?;
    }
    if cli.no_timing {
        cfg.timing = false;
    }
    if let Some(t) = &cli.tau {
        parse_complex(t)?;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn run(cli: &Cli) -> Result<i32> {
    let format: Format = cli.report.parse()?;
    let cfg = scenario(cli)?;
    let checks: Vec<String> = match &cli.checks {
        None => CHECK_NAMES.iter().map(|s| s.to_string()).collect(),
        Some(list) => list.split(',').map(str::trim).filter(|s| !s.is_empty()).map(String::from).collect(),
    };
    let report = run_suite(&cfg, &checks)?;
    let text = emit_report(&report, format);
    match &cli.out {
        Some(path) => std::fs::write(path, text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?,
        None => print!("{text}"),
    }
    Ok(report.exit_code())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(error_exit_code(&e) as u8)
        }
    }
}
