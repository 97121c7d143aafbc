use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use radar_ood::pipeline::{self, PipelineConfig};
use radar_ood::radar::RadarConfig;
use radar_ood::{Error, Result};

/// Radar out-of-distribution detection pipeline.
#[derive(Parser)]
#[command(name = "radar-ood", version)]
struct Cli {
    /// Pipeline config (JSON).
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Overrides the config seed.
    #[arg(long, global = true)]
    seed: Option<u64>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Synthesize the train, validation and test ADC frame files.
    Simulate,
    /// Convert ADC frame files to range-Doppler image files.
    Preprocess,
    /// Train the patch autoencoder on the training images.
    Train {
        /// Train the full-image baseline instead.
        #[arg(long)]
        baseline: bool,
    },
    /// Score validation and test images.
    Score {
        /// Score the test images with the baseline model instead.
        #[arg(long)]
        baseline: bool,
    },
    /// Set the ID threshold from validation scores.
    Calibrate,
    /// Compute the metrics report and threshold decisions.
    Evaluate,
    /// Summarize any pipeline artifact.
    Inspect { file: PathBuf },
}

fn load_config(cli: &Cli) -> Result<PipelineConfig> {
    let path = cli
        .config
        .as_ref()
        .ok_or_else(|| Error::Config("this command needs --config <path>".into()))?;
    let mut cfg = PipelineConfig::load(path)?;
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    Ok(cfg)
}

fn run(cli: &Cli) -> Result<()> {
    match &cli.command {
        Command::Simulate => {
            for s in pipeline::cmd_simulate(&load_config(cli)?)? {
                println!("{s}");
            }
        }
        Command::Preprocess => {
            for s in pipeline::cmd_preprocess(&load_config(cli)?)? {
                println!("{s}");
            }
        }
        Command::Train { baseline } => {
            let cfg = load_config(cli)?;
            let total = cfg.train.epochs;
            let t = pipeline::cmd_train(&cfg, *baseline, |e, loss| {
                println!("epoch {e:>3}/{total}  loss {loss:.6}");
            })?;
            println!(
                "{} weights -> {}\nloss history -> {}",
                t.variant.name(),
                t.weights_path.display(),
                t.loss_path.display()
            );
        }
        Command::Score { baseline } => {
            for s in pipeline::cmd_score(&load_config(cli)?, *baseline)? {
                println!("{} records -> {}", s.records.len(), s.path.display());
            }
        }
        Command::Calibrate => {
            let cfg = load_config(cli)?;
            let t = pipeline::cmd_calibrate(&cfg)?;
            println!(
                "{} tau = {} at quantile {} -> {}",
                t.kind,
                t.value,
                t.quantile,
                cfg.paths.threshold.display()
            );
        }
        Command::Evaluate => {
            let cfg = load_config(cli)?;
            print!("{}", pipeline::cmd_evaluate(&cfg)?.text());
        }
        Command::Inspect { file } => {
            let radar = match &cli.config {
                Some(_) => load_config(cli)?.radar,
                None => RadarConfig::default(),
            };
            print!("{}", pipeline::inspect(file, &radar)?);
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
