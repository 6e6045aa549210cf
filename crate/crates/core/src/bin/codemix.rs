use std::fmt::Write as _;
use std::fs;
use std::io::{self, Write as _};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use codemix::corpus::write_corpus;
use codemix::error::{Error, Result};
use codemix::pipeline::{resolve_preset, run_eval, run_grid, run_predict, run_train, ExperimentConfig};
use codemix::synth::{synth_corpus, synth_embeddings_text, SynthConfig};

#[derive(Parser)]
#[command(name = "codemix", version, about = "Sentiment classification for code-mixed text")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct ConfigArgs {
    /// JSON experiment config; its keys override the preset.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Named configuration: model1 (voting) or model2 (linear SVM).
    #[arg(long)]
    preset: Option<String>,
    #[arg(long)]
    seed: Option<u64>,
    /// Word-vector file for embed_avg / embed_seq features.
    #[arg(long)]
    embeddings: Option<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Split, train, report dev scores and write a model file.
    Train {
        #[command(flatten)]
        cfg: ConfigArgs,
        #[arg(long)]
        data: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Label a corpus with a trained model.
    Predict {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        data: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Score a prediction file against a labeled corpus.
    Eval {
        #[arg(long)]
        gold: PathBuf,
        #[arg(long)]
        pred: PathBuf,
    },
    /// Run the model/feature comparison grid on one fixed split.
    Grid {
        #[command(flatten)]
        cfg: ConfigArgs,
        #[arg(long)]
        data: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Write a synthetic labeled corpus (and optionally word vectors).
    Synth {
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 1000)]
        n: usize,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long)]
        embeddings_out: Option<PathBuf>,
        #[arg(long, default_value_t = 50)]
        dim: usize,
    },
}

fn resolve(args: &ConfigArgs) -> Result<ExperimentConfig> {
    let base = match &args.preset {
        Some(name) => resolve_preset(name)?,
        None => ExperimentConfig::default(),
    };
    let mut cfg = match &args.config {
        Some(path) => base.overlay_json(&fs::read_to_string(path)?)?,
        None => base,
    };
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    if let Some(path) = &args.embeddings {
        cfg.embeddings_path = Some(path.clone());
    }
    cfg.validate()?;
    Ok(cfg)
}

/// Returns the text for stdout.
fn run(cli: Cli) -> Result<String> {
    let mut text = String::new();
    match cli.command {
        Command::Train { cfg, data, out } => {
            let a = run_train(&resolve(&cfg)?, &data, &out)?;
            let _ = writeln!(
                text,
                "model {} + {}: {} train / {} dev, dev macro F1 {:.3}",
                a.config.model, a.config.features, a.train_size, a.dev_size, a.dev_report.overall.f1
            );
            let _ = write!(text, "{}", a.dev_report);
        }
        Command::Predict { model, data, out } => {
            run_predict(&model, &data, &out)?;
            let _ = writeln!(text, "wrote {}", out.display());
        }
        Command::Eval { gold, pred } => text = run_eval(&gold, &pred)?.to_string(),
        Command::Grid { cfg, data, out } => text = run_grid(&resolve(&cfg)?, &data, &out)?.to_string(),
        Command::Synth {
            out,
            n,
            seed,
            embeddings_out,
            dim,
        } => {
            let cfg = SynthConfig {
                n_samples: n,
                ..Default::default()
            };
            fs::write(&out, write_corpus(&synth_corpus(&cfg, seed)))?;
            if let Some(path) = embeddings_out {
                fs::write(path, synth_embeddings_text(dim, seed))?;
            }
        }
    }
    Ok(text)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(text) => {
            // a closed pipe (e.g. `| head`) is not a failure of the command
            let _ = io::stdout().lock().write_all(text.as_bytes());
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::Config(_) | Error::Preset { .. } => ExitCode::from(2),
                _ => ExitCode::from(1),
            }
        }
    }
}
