use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use phasetomo_cli::config::{ExperimentConfig, ExperimentKind};
use phasetomo_cli::experiments;
use std::path::PathBuf;

/// Simulation and tomographic reconstruction of cold-atom phase-space
/// dynamics in a corrugated harmonic trap.
#[derive(Parser)]
#[command(name = "phasetomo", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct RunArgs {
    /// Experiment configuration file.
    #[arg(long)]
    config: PathBuf,
    /// Output directory (overrides the config).
    #[arg(long)]
    out: Option<PathBuf>,
    /// RNG seed (overrides the config).
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads; precedence: this flag, then PHASETOMO_THREADS, then
    /// one per core. Results are identical for any thread count.
    #[arg(long)]
    threads: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Oscillation in the corrugated trap, imaged and reconstructed.
    #[command(name = "classical_oscillation")]
    ClassicalOscillation(RunArgs),
    /// Zero-corrugation control run of the same pipeline.
    #[command(name = "harmonic_control")]
    HarmonicControl(RunArgs),
    /// Tomography of a two-momentum superposition state.
    #[command(name = "quantum_wigner")]
    QuantumWigner(RunArgs),
    /// Quartic-trap squeezing sweep of a displaced packet.
    #[command(name = "squeezing")]
    Squeezing(RunArgs),
    /// Wire-defect corrugation amplitude versus distance.
    #[command(name = "corrugation_scan")]
    CorrugationScan(RunArgs),
    /// Anharmonic period shifts against direct quadrature.
    #[command(name = "period_analysis")]
    PeriodAnalysis(RunArgs),
    /// Parse and check a configuration without running it.
    #[command(name = "validate")]
    Validate {
        #[arg(long)]
        config: PathBuf,
    },
}

fn init_threads(flag: Option<usize>) -> Result<()> {
    let n = match flag {
        Some(n) => Some(n),
        None => match std::env::var("PHASETOMO_THREADS") {
            Ok(v) => Some(
                v.parse::<usize>()
                    .with_context(|| format!("PHASETOMO_THREADS={v:?} is not a thread count"))?,
            ),
            Err(_) => None,
        },
    };
    if let Some(n) = n {
        if n == 0 {
            bail!("threads must be at least 1");
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .context("thread pool already initialized")?;
    }
    Ok(())
}

fn main() -> Result<()> {
    let cli = Cli::parse();
    let (kind, args) = match cli.command {
        Command::Validate { config } => {
            let cfg = ExperimentConfig::from_file(&config)?;
            println!("ok: kind = {}, config_hash = {:016x}", cfg.kind, cfg.config_hash);
            return Ok(());
        }
        Command::ClassicalOscillation(a) => (ExperimentKind::ClassicalOscillation, a),
        Command::HarmonicControl(a) => (ExperimentKind::HarmonicControl, a),
        Command::QuantumWigner(a) => (ExperimentKind::QuantumWigner, a),
        Command::Squeezing(a) => (ExperimentKind::Squeezing, a),
        Command::CorrugationScan(a) => (ExperimentKind::CorrugationScan, a),
        Command::PeriodAnalysis(a) => (ExperimentKind::PeriodAnalysis, a),
    };
    init_threads(args.threads)?;
    let cfg = ExperimentConfig::from_file(&args.config)?;
    if cfg.kind != kind {
        bail!(
            "config declares kind {} but the {} subcommand was invoked",
            cfg.kind,
            kind.as_str()
        );
    }
    let out = experiments::run_cli(&cfg, args.out.as_deref(), args.seed)?;
    print!("{}", out.report.render());
    Ok(())
}
