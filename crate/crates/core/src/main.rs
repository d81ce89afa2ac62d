use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use aquaclear::pipeline::{
    cmd_augment, cmd_classify, cmd_enhance, cmd_evaluate, cmd_report, cmd_split, Method, PipelineConfig,
};
use aquaclear::{Error, Result};

/// Underwater image degradation classification, enhancement and scoring.
#[derive(Debug, Parser)]
#[command(name = "aquaclear", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    common: Common,
}

#[derive(Debug, Args)]
struct Common {
    /// JSON pipeline configuration; defaults apply when omitted.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Overrides the configured output directory.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    /// Overrides both the pipeline seed and the neural weight seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Info-level logging and per-step diagnostics in the enhance log.
    #[arg(long, short, global = true)]
    verbose: bool,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Label every image with its degradation category.
    Classify {
        #[arg(long)]
        input: PathBuf,
    },
    /// Enhance every image with the configured method.
    Enhance {
        #[arg(long)]
        input: PathBuf,
        /// classic, vgg, resnet or unite.
        #[arg(long)]
        method: Option<Method>,
    },
    /// Score `<stem>.<method>.ppm` files, optionally against references.
    Evaluate {
        #[arg(long)]
        input: PathBuf,
        /// Directory holding `<stem>.ppm` references.
        #[arg(long)]
        references: Option<PathBuf>,
    },
    /// Assign files to train, val and test buckets.
    Split {
        #[arg(long)]
        input: PathBuf,
    },
    /// Write randomly cropped and color-jittered copies.
    Augment {
        #[arg(long)]
        input: PathBuf,
    },
    /// Combine a labels CSV and a scores CSV into one document.
    Report {
        #[arg(long)]
        labels: PathBuf,
        #[arg(long)]
        scores: PathBuf,
    },
}

fn run(cli: Cli) -> Result<String> {
    let c = &cli.common;
    let mut cfg = match &c.config {
        Some(p) => PipelineConfig::load(p)?,
        None => PipelineConfig::default(),
    };
    if let Some(seed) = c.seed {
        cfg.seed = seed;
        cfg.neural.seed = seed;
    }
    if let Some(out) = &c.output {
        cfg.output_dir = out.clone();
    }
    let out = cfg.output_dir.clone();
    Ok(match cli.command {
        Command::Classify { input } => cmd_classify(&input, &out, &cfg)?.to_string(),
        Command::Enhance { input, method } => {
            if let Some(m) = method {
                cfg.neural.method = m;
            }
            cmd_enhance(&input, &out, &cfg, c.verbose)?.to_string()
        }
        Command::Evaluate { input, references } => cmd_evaluate(&input, references.as_deref(), &out)?.to_string(),
        Command::Split { input } => {
            let s = cmd_split(&input, &out, &cfg)?;
            format!("split {} files into {}/{}/{}", s.entries.len(), s.counts[0], s.counts[1], s.counts[2])
        }
        Command::Augment { input } => cmd_augment(&input, &out, &cfg)?.to_string(),
        Command::Report { labels, scores } => cmd_report(&labels, &scores, &out)?.to_string(),
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = if cli.common.verbose { "info" } else { "warn" };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();

    let pool = rayon::ThreadPoolBuilder::new().num_threads(cli.common.threads.unwrap_or(0)).build();
    let result = match pool {
        Ok(pool) => pool.install(|| run(cli)),
        Err(e) => Err(Error::InvalidParameter(format!("thread pool: {e}"))),
    };
    match result {
        Ok(summary) => {
            println!("{summary}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
