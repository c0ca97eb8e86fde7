use anyhow::{Context, Result};
use clap::{Parser, Subcommand};
use rnshell::harness::{self, Assertion, ExperimentConfig, Report};
use serde::Serialize;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

/// Robin-Neumann shell experiments.
#[derive(Parser)]
#[command(name = "rnshell", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Experiment configuration (TOML).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Overrides `family.seed`.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Overrides `workers`.
    #[arg(long, global = true)]
    workers: Option<usize>,
    /// Overrides `output.dir`.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Subcommand, Clone, Copy)]
enum Command {
    /// λ₁, z_m, z_M and σ₁ of the shell over the β grid.
    ShellEig,
    /// λ₁(β, Ω) ≤ λ₁(β, A) over a sampled family.
    VerifyIsoperimetric,
    /// gap/α(Ω) over a sampled family.
    StabilitySweep,
    /// Steklov quotient gaps with a FEM cross-check.
    SteklovGap,
    /// Hybrid asymmetry of the `[domain]` section.
    Asymmetry,
    /// Norm estimates and constraint expansions.
    LemmaChecks,
}

fn load(cli: &Cli) -> Result<ExperimentConfig> {
    let path = cli.config.as_ref().context("--config is required")?;
    let mut cfg = ExperimentConfig::from_file(path).with_context(|| format!("reading {}", path.display()))?;
    if let Some(seed) = cli.seed {
        if let Some(f) = cfg.family.as_mut() {
            f.seed = seed;
        }
    }
    if let Some(w) = cli.workers {
        cfg.workers = w;
    }
    if let Some(out) = &cli.out {
        cfg.output.dir = out.clone();
    }
    cfg.validate()?;
    Ok(cfg)
}

fn print_assertions(assertions: &[Assertion]) {
    for a in assertions {
        println!("{} {} [{}] {}", if a.passed { "PASS" } else { "FAIL" }, a.name, a.tolerance, a.detail);
    }
}

fn finish<R: Serialize>(report: Report<R>, dir: &Path) -> Result<bool> {
    let (csv, json) = report.write(dir)?;
    for f in &report.failures {
        eprintln!("domain {} failed: {}", f.id, f.message);
    }
    print_assertions(&report.assertions);
    println!("wrote {} and {}", csv.display(), json.display());
    Ok(report.passed())
}

fn run(cli: &Cli) -> Result<bool> {
    let cfg = load(cli)?;
    let dir = cfg.output.dir.clone();
    match cli.command {
        Command::ShellEig => finish(harness::cmd_shell_eig(&cfg)?, &dir),
        Command::VerifyIsoperimetric => finish(harness::cmd_verify_isoperimetric(&cfg)?, &dir),
        Command::StabilitySweep => finish(harness::cmd_stability_sweep(&cfg)?, &dir),
        Command::SteklovGap => finish(harness::cmd_steklov_gap(&cfg)?, &dir),
        Command::LemmaChecks => finish(harness::cmd_lemma_checks(&cfg)?, &dir),
        Command::Asymmetry => {
            let (report, assertions) = harness::cmd_asymmetry(&cfg)?;
            let text = serde_json::to_string_pretty(&report)?;
            println!("{text}");
            std::fs::create_dir_all(&dir)?;
            std::fs::write(dir.join("asymmetry.json"), &text)?;
            print_assertions(&assertions);
            Ok(assertions.iter().all(|a| a.passed))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
