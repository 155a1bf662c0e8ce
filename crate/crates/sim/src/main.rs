use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use crowdval_sim::{
    emit_csv, run_correction_sweep, run_expert_knowledge_sweep, run_prefill_sweep, run_trust_sweep, SimConfig,
    SimError, Target,
};

#[derive(Parser)]
#[command(name = "sim", about = "Seeded validation sweeps over synthetic domains")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Discovery rates against the expert ratio.
    TrustSweep(Common),
    /// Discovery rates against the experts' lower accuracy bound.
    KnowledgeSweep(Common),
    /// Pre-fill counts by rule and domain against coverage.
    PrefillSweep(Common),
    /// Discovery rates against the fraction of corrected decisions.
    CorrectionSweep(Common),
}

#[derive(Args)]
struct Common {
    /// JSON file with SimConfig fields; missing fields take defaults.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    annotators: Option<usize>,
    #[arg(long)]
    threshold: Option<f64>,
    #[arg(long)]
    replicates: Option<usize>,
    #[arg(long, value_parser = parse_target)]
    target: Option<Target>,
}

fn parse_target(s: &str) -> Result<Target, String> {
    match s {
        "seed" => Ok(Target::Seed),
        "non-seed" => Ok(Target::NonSeed),
        _ => Err(format!("expected seed or non-seed, got {s:?}")),
    }
}

impl Common {
    fn config(&self) -> Result<SimConfig, SimError> {
        let mut cfg = match &self.config {
            Some(path) => SimConfig::from_json(&std::fs::read_to_string(path)?)?,
            None => SimConfig::default(),
        };
        if let Some(s) = self.seed {
            cfg.rng_seed = s;
        }
        if let Some(n) = self.annotators {
            cfg.annotator_count = n;
        }
        if let Some(t) = self.threshold {
            cfg.threshold = t;
        }
        if let Some(r) = self.replicates {
            cfg.replicates = r;
        }
        if let Some(t) = self.target {
            cfg.target = t;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

fn run(cli: Cli) -> Result<(), SimError> {
    match cli.command {
        Command::TrustSweep(c) => emit_csv(&run_trust_sweep(&c.config()?)?, &c.out),
        Command::KnowledgeSweep(c) => emit_csv(&run_expert_knowledge_sweep(&c.config()?)?, &c.out),
        Command::PrefillSweep(c) => emit_csv(&run_prefill_sweep(&c.config()?)?, &c.out),
        Command::CorrectionSweep(c) => {
            let cfg = c.config()?;
            emit_csv(&run_correction_sweep(&cfg, cfg.target)?, &c.out)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("sim: {e}");
            ExitCode::FAILURE
        }
    }
}
