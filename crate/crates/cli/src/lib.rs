//! `simulate`: runs JSON scenarios against the photon switch library and
//! writes CSV tables, SVG plots and a checksummed manifest.

pub mod config;
pub mod error;
pub mod run;
pub mod scenarios;
pub mod svg;

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use clap::{Parser, Subcommand};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::config::{parse_scenario, ExperimentConfig, ScenarioConfig};
use crate::error::CliError;
use crate::run::{execute, Outcome};

/// Caps the worker count of the parallel sweeps.
pub const THREADS_ENV: &str = "PHOTON_SWITCH_THREADS";

#[derive(Debug, Parser)]
#[command(name = "simulate", version, about = "Single-photon switch simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run a scenario file or a bundled scenario by name.
    Run {
        config: String,
        /// Override a config entry, e.g. `layout.uniform.n=5`.
        #[arg(long = "set", value_name = "KEY=VALUE")]
        set: Vec<String>,
        #[arg(long)]
        seed: Option<u64>,
        /// Output directory; defaults to `out/<scenario name>`.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// List the bundled scenarios.
    Scenarios,
    /// Parse and validate a scenario without running it.
    Validate {
        config: String,
        #[arg(long = "set", value_name = "KEY=VALUE")]
        set: Vec<String>,
    },
}

/// Entry point shared by the binary and the tests. Returns the exit code.
pub fn run_cli<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind as K;
            if matches!(e.kind(), K::DisplayHelp | K::DisplayVersion | K::DisplayHelpOnMissingArgumentOrSubcommand) {
                print!("{e}");
                return 0;
            }
            let err = CliError::parse(e.to_string().trim().to_string());
            eprintln!("{}", err.to_json());
            return err.exit_code();
        }
    };
    match dispatch(cli.command) {
        Ok((report, code)) => {
            println!("{report}");
            code
        }
        Err(err) => {
            eprintln!("{}", err.to_json());
            err.exit_code()
        }
    }
}

fn dispatch(command: Command) -> Result<(Value, i32), CliError> {
    match command {
        Command::Scenarios => {
            let list: Vec<Value> = scenarios::CATALOG
                .iter()
                .map(|(name, text)| {
                    let description = parse_scenario(text, &[]).map(|c| c.description).unwrap_or_default();
                    json!({ "name": name, "description": description })
                })
                .collect();
            Ok((json!({ "scenarios": list }), 0))
        }
        Command::Validate { config, set } => {
            let cfg = load(&config, &set)?;
            validate(&cfg)?;
            Ok((json!({ "valid": true, "name": cfg.name, "kind": cfg.experiment.kind() }), 0))
        }
        Command::Run { config, set, seed, out } => {
            let mut cfg = load(&config, &set)?;
            if let Some(seed) = seed {
                cfg.seed = seed;
            }
            let dir = out.unwrap_or_else(|| Path::new("out").join(&cfg.name));
            let report = run_to_dir(&cfg, &dir)?;
            let code = if report["failed_rows"].as_u64().unwrap_or(0) > 0 { 4 } else { 0 };
            Ok((report, code))
        }
    }
}

/// Reads `source` as a path, falling back to a bundled scenario name.
pub fn load(source: &str, overrides: &[String]) -> Result<ScenarioConfig, CliError> {
    let path = Path::new(source);
    let text = if path.is_file() {
        fs::read_to_string(path).map_err(|e| CliError::parse(format!("{source}: {e}")))?
    } else if let Some(text) = scenarios::find(source) {
        text.to_string()
    } else {
        return Err(CliError::parse(format!("{source}: no such file or bundled scenario")));
    };
    parse_scenario(&text, overrides)
}

/// Checks every part of a scenario that can be checked without computing.
pub fn validate(cfg: &ScenarioConfig) -> Result<(), CliError> {
    let layout = cfg.layout.to_layout()?;
    match &cfg.experiment {
        ExperimentConfig::Spectrum { grid, .. } => {
            grid.to_grid()?;
        }
        ExperimentConfig::Metrics { packet, grid, .. } => {
            packet.to_packet()?;
            if let Some(g) = grid {
                g.to_grid()?;
            }
        }
        ExperimentConfig::SweepD { d_um, packet, .. } => {
            d_um.to_range(1e-6)?;
            packet.to_packet()?;
        }
        ExperimentConfig::SweepG { g_ghz, q_c, packets } => {
            g_ghz.to_range(1.0)?;
            if let Some(q) = q_c.iter().find(|q| !(q.is_finite() && **q > 0.0)) {
                return Err(CliError::validation(format!("coupled Q {q} must be positive")));
            }
            for p in packets {
                p.to_packet()?;
            }
        }
        ExperimentConfig::SweepN { n, packet, .. } => {
            cfg.layout.prototype()?;
            packet.to_packet()?;
            if n.contains(&0) {
                return Err(CliError::validation("cavity counts must be at least 1"));
            }
        }
        ExperimentConfig::Disorder { grid, realizations, sigma, .. } => {
            grid.to_grid()?;
            if *realizations == 0 || !(sigma.is_finite() && *sigma >= 0.0) {
                return Err(CliError::validation("disorder needs realizations ≥ 1 and a finite σ ≥ 0"));
            }
        }
        ExperimentConfig::Mitigation { cavity, grid, .. } => {
            grid.to_grid()?;
            if *cavity == 0 || *cavity > layout.cavities.len() {
                return Err(CliError::validation(format!(
                    "mitigation cavity {cavity} outside 1..={}",
                    layout.cavities.len()
                )));
            }
        }
    }
    Ok(())
}

/// Worker pool honouring [`THREADS_ENV`].
pub fn thread_pool() -> Result<rayon::ThreadPool, CliError> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Ok(raw) = std::env::var(THREADS_ENV) {
        let n: usize = raw
            .trim()
            .parse()
            .ok()
            .filter(|n| *n > 0)
            .ok_or_else(|| CliError::parse(format!("{THREADS_ENV}={raw} is not a positive integer")))?;
        builder = builder.num_threads(n);
    }
    builder.build().map_err(|e| CliError::io(e.to_string()))
}

/// Runs `cfg`, writes its artifacts and `manifest.json` into `dir` and returns
/// the report printed on stdout.
pub fn run_to_dir(cfg: &ScenarioConfig, dir: &Path) -> Result<Value, CliError> {
    validate(cfg)?;
    let pool = thread_pool()?;
    let started = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs_f64()).unwrap_or(0.0);
    let clock = Instant::now();
    let Outcome { artifacts, summary, failed_rows } = pool.install(|| execute(cfg))?;
    let elapsed = clock.elapsed().as_secs_f64();

    fs::create_dir_all(dir).map_err(|e| CliError::io(format!("{}: {e}", dir.display())))?;
    let mut outputs = Vec::new();
    for a in &artifacts {
        let path = dir.join(&a.name);
        fs::write(&path, &a.bytes).map_err(|e| CliError::io(format!("{}: {e}", path.display())))?;
        outputs.push(json!({
            "file": a.name,
            "bytes": a.bytes.len(),
            "sha256": hex::encode(Sha256::digest(&a.bytes)),
        }));
    }
    let manifest = json!({
        "tool": "simulate",
        "version": env!("CARGO_PKG_VERSION"),
        "name": cfg.name,
        "kind": cfg.experiment.kind(),
        "seed": cfg.seed,
        "threads": pool.current_num_threads(),
        "started_unix_s": started,
        "wall_clock_s": elapsed,
        "config": cfg,
        "outputs": outputs,
        "summary": summary,
        "failed_rows": failed_rows,
    });
    let text = serde_json::to_string_pretty(&manifest).map_err(|e| CliError::io(e.to_string()))? + "\n";
    let path = dir.join("manifest.json");
    fs::write(&path, text).map_err(|e| CliError::io(format!("{}: {e}", path.display())))?;

    Ok(json!({
        "name": cfg.name,
        "kind": cfg.experiment.kind(),
        "out_dir": dir.display().to_string(),
        "outputs": outputs,
        "summary": summary,
        "failed_rows": failed_rows,
    }))
}
