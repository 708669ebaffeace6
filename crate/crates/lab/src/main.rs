use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use aqclab::experiments::{
    energy_vs_runtime, evolve_series, gap_report, runtime_report, scaling_study, EvolveOptions,
};
use aqclab::formats::write_instance;
use aqclab::{LabError, Result, RunConfig};
use clap::{Args, Parser, Subcommand};

/// Adiabatic quantum computation experiments on exact cover instances.
#[derive(Parser)]
#[command(name = "aqclab", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Run configuration (TOML).
    #[arg(long)]
    config: PathBuf,
    /// Worker threads; `AQCLAB_THREADS` takes precedence.
    #[arg(long)]
    threads: Option<usize>,
    /// Try every Hamming weight instead of the known solution's.
    #[arg(long)]
    scan_hamming: bool,
    /// Override the configured output directory.
    #[arg(long)]
    out: Option<PathBuf>,
}

impl Common {
    fn load(&self) -> Result<RunConfig> {
        let mut cfg = RunConfig::load(&self.config)?;
        if self.threads.is_some() {
            cfg.threads = self.threads;
        }
        cfg.scan_hamming |= self.scan_hamming;
        if let Some(out) = &self.out {
            cfg.output_dir = out.clone();
        }
        Ok(cfg)
    }
}

#[derive(Subcommand)]
enum Command {
    /// Generate an instance with a unique solution.
    Gen {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Single evolution with an energy and occupation time series.
    Evolve {
        #[command(flatten)]
        common: Common,
        /// Runtime omega T; defaults to the first configured runtime.
        #[arg(long)]
        runtime: Option<f64>,
        /// Write a checkpoint every this many steps.
        #[arg(long)]
        checkpoint_every: Option<u64>,
        /// Resume from a checkpoint stem (`<stem>.state`, `<stem>.json`).
        #[arg(long)]
        resume: Option<PathBuf>,
    },
    /// Successful-runtime search for every path variant.
    Runtime {
        #[command(flatten)]
        common: Common,
    },
    /// Final energy against runtime for every path variant.
    Sweep {
        #[command(flatten)]
        common: Common,
    },
    /// Gap curves for every path variant.
    Gap {
        #[command(flatten)]
        common: Common,
        /// Number of grid points on [0, 1].
        #[arg(long, default_value_t = 101)]
        grid: usize,
    },
    /// Successful runtimes over register sizes and generated instances.
    Scaling {
        #[command(flatten)]
        common: Common,
    },
}

fn write_log(cfg: &RunConfig, command: &str, started: Instant, extra: serde_json::Value) -> Result<()> {
    let log = serde_json::json!({
        "command": command,
        "threads": cfg.worker_threads(),
        "wall_time_s": started.elapsed().as_secs_f64(),
        "result": extra,
    });
    let path = cfg.output_dir.join(format!("{command}.log.json"));
    std::fs::write(&path, serde_json::to_string_pretty(&log)?).map_err(LabError::io(&path))
}

fn save_config(cfg: &RunConfig) -> Result<()> {
    std::fs::create_dir_all(&cfg.output_dir).map_err(LabError::io(&cfg.output_dir))?;
    let path = cfg.output_dir.join("config.toml");
    std::fs::write(&path, cfg.to_toml()).map_err(LabError::io(&path))
}

fn gen(n: usize, seed: u64, out: &Path) -> Result<()> {
    let inst = aqcsim::ec3::generate_hard_instance(n, seed, aqclab::problem::GENERATOR_RESTARTS)?;
    write_instance(out, &inst)?;
    println!("{} clauses on {} bits -> {}", inst.m(), inst.n(), out.display());
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    let started = Instant::now();
    match cli.command {
        Command::Gen { n, seed, out } => gen(n, seed, &out),
        Command::Evolve { common, runtime, checkpoint_every, resume } => {
            let cfg = common.load()?;
            save_config(&cfg)?;
            let omega_t = runtime
                .or_else(|| cfg.runtimes.first().copied())
                .ok_or_else(|| LabError::Config("pass --runtime or list runtimes in the config".into()))?;
            let report = evolve_series(&cfg, omega_t, &EvolveOptions { checkpoint_every, resume })?;
            let last = report.rows.last();
            println!(
                "omega T = {omega_t}: E/omega = {}, P1 = {}, {} steps",
                last.map_or(f64::NAN, |r| r.energy),
                last.map_or(f64::NAN, |r| r.p1),
                report.diagnostics.steps
            );
            write_log(&cfg, "evolve", started, serde_json::json!({ "checksum": report.checksum }))
        }
        Command::Runtime { common } => {
            let cfg = common.load()?;
            save_config(&cfg)?;
            let results = runtime_report(&cfg)?;
            for (label, r) in &results {
                let mark = if r.censored { " (censored)" } else { "" };
                println!("{label}: omega T_s = {}{mark}, E/omega = {}, P1 = {}", r.t_s, r.energy, r.p1);
            }
            let summary: Vec<_> = results.iter().map(|(l, r)| serde_json::json!({ "path": l, "t_s": r.t_s })).collect();
            write_log(&cfg, "runtime", started, serde_json::json!(summary))
        }
        Command::Sweep { common } => {
            let cfg = common.load()?;
            if cfg.runtimes.is_empty() {
                return Err(LabError::Config("list runtimes in the config".into()));
            }
            save_config(&cfg)?;
            let rows = energy_vs_runtime(&cfg, &cfg.runtimes)?;
            println!("{} rows -> {}", rows.len(), cfg.output_dir.join("energy_vs_runtime.csv").display());
            write_log(&cfg, "sweep", started, serde_json::json!({ "rows": rows.len() }))
        }
        Command::Gap { common, grid } => {
            let cfg = common.load()?;
            save_config(&cfg)?;
            let curves = gap_report(&cfg, grid)?;
            for g in &curves {
                println!("{}: s* = {}, gap = {}", g.path, g.curve.min_gap.0, g.curve.min_gap.1);
            }
            write_log(&cfg, "gap", started, serde_json::json!({ "paths": curves.len() }))
        }
        Command::Scaling { common } => {
            let cfg = common.load()?;
            save_config(&cfg)?;
            let (records, _) = scaling_study(&cfg)?;
            for r in &records {
                match r.quartiles {
                    Some((q1, m, q3)) => println!("{} n = {}: median {m} [{q1}, {q3}], censored {}", r.path, r.n, r.censored),
                    None => println!("{} n = {}: all censored", r.path, r.n),
                }
            }
            write_log(&cfg, "scaling", started, serde_json::json!({ "records": records.len() }))
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("aqclab: {e}");
            ExitCode::FAILURE
        }
    }
}
