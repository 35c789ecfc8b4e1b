use std::io::{stdout, Write};
use std::path::PathBuf;

use anyhow::Result;
use clap::{Args, Parser, Subcommand};
use sqgen_cli::commands::{self, LatencyArgs, SweepParam};
use sqgen_cli::config::{Config, CONFIG_ENV};

/// Screening question generation: corpus, training, evaluation and serving.
#[derive(Parser)]
#[command(name = "sqgen", version)]
struct Cli {
    /// TOML configuration file.
    #[arg(long, global = true, env = CONFIG_ENV)]
    config: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct SeedArg {
    /// Seed for every random choice; overrides the configuration.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Subcommand)]
enum Command {
    /// Generate the synthetic corpus into the data directory.
    GenCorpus {
        #[command(flatten)]
        seed: SeedArg,
        /// Training sentences per template.
        #[arg(long)]
        sentences: Option<usize>,
        /// Total postings.
        #[arg(long)]
        jobs: Option<usize>,
    },
    /// Train the template classifier.
    TrainTc {
        #[command(flatten)]
        seed: SeedArg,
        /// Text file of `token v1 .. vd` vectors to initialise embeddings.
        #[arg(long)]
        pretrained: Option<PathBuf>,
        #[arg(long)]
        epochs: Option<usize>,
    },
    /// Train the mention scorer used for parameter extraction.
    TrainScorer {
        #[command(flatten)]
        seed: SeedArg,
    },
    /// Train the question ranker and write the serving bundle.
    TrainRanker {
        #[command(flatten)]
        seed: SeedArg,
    },
    /// Classification report on the test sentences.
    EvalTc {
        #[command(flatten)]
        seed: SeedArg,
        /// Also train and score the bag-of-words baseline.
        #[arg(long)]
        baseline: bool,
    },
    /// Ranking metrics on the test postings.
    EvalRanker,
    /// Ranking metrics with each feature group removed.
    Ablate {
        #[command(flatten)]
        seed: SeedArg,
    },
    /// Classifier accuracy across a grid of one hyper-parameter.
    Sweep {
        #[command(flatten)]
        seed: SeedArg,
        #[arg(long, value_enum)]
        param: SweepParam,
        /// Comma separated grid; a built-in grid is used when omitted.
        #[arg(long, value_delimiter = ',')]
        values: Option<Vec<f64>>,
    },
    /// Suggest questions for every posting in a JSONL file.
    Suggest {
        /// Postings, one JSON object per line.
        input: PathBuf,
        /// Output file; stdout when omitted.
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Time classifier inference.
    BenchLatency {
        #[command(flatten)]
        seed: SeedArg,
        /// Saved classifier; a random one is built when omitted.
        #[arg(long)]
        model: Option<PathBuf>,
        #[arg(long, default_value_t = 50_000)]
        vocab: usize,
        #[arg(long, default_value_t = 32)]
        tokens: usize,
        #[arg(long, default_value_t = 200)]
        sentences: usize,
        #[arg(long, default_value_t = 5)]
        repetitions: usize,
    },
    /// Run the HTTP service.
    Serve {
        /// Listen address; overrides the configuration.
        #[arg(long)]
        addr: Option<String>,
    },
}

fn main() -> Result<()> {
    let cli = Cli::parse();
    let mut cfg = Config::load(cli.config.as_deref())?;
    let mut out = stdout().lock();
    let seeded = |cfg: &mut Config, s: &SeedArg| {
        if let Some(seed) = s.seed {
            cfg.set_seed(seed);
        }
    };
    match cli.command {
        Command::GenCorpus {
            seed,
            sentences,
            jobs,
        } => {
            seeded(&mut cfg, &seed);
            if let Some(n) = sentences {
                cfg.corpus.sentences_per_template = n;
            }
            if let Some(n) = jobs {
                cfg.corpus.jobs = n;
            }
            commands::gen_corpus(&cfg, &mut out)?;
        }
        Command::TrainTc {
            seed,
            pretrained,
            epochs,
        } => {
            seeded(&mut cfg, &seed);
            if let Some(e) = epochs {
                cfg.tc.max_epochs = e;
            }
            commands::train_tc(&cfg, pretrained.as_deref(), &mut out)?;
        }
        Command::TrainScorer { seed } => {
            seeded(&mut cfg, &seed);
            commands::train_scorer(&cfg, &mut out)?;
        }
        Command::TrainRanker { seed } => {
            seeded(&mut cfg, &seed);
            commands::train_ranker(&cfg, &mut out)?;
        }
        Command::EvalTc { seed, baseline } => {
            seeded(&mut cfg, &seed);
            commands::eval_tc(&cfg, baseline, &mut out)?;
        }
        Command::EvalRanker => commands::eval_ranker(&cfg, &mut out)?,
        Command::Ablate { seed } => {
            seeded(&mut cfg, &seed);
            commands::ablate(&cfg, &mut out)?;
        }
        Command::Sweep {
            seed,
            param,
            values,
        } => {
            seeded(&mut cfg, &seed);
            commands::sweep(&cfg, param, values, &mut out)?;
        }
        Command::Suggest { input, output } => match output {
            None => commands::suggest(&cfg, &input, &mut out)?,
            Some(p) => {
                let mut f = std::io::BufWriter::new(std::fs::File::create(&p)?);
                commands::suggest(&cfg, &input, &mut f)?;
                f.flush()?;
            }
        },
        Command::BenchLatency {
            seed,
            model,
            vocab,
            tokens,
            sentences,
            repetitions,
        } => {
            let args = LatencyArgs {
                model,
                vocab,
                tokens,
                sentences,
                repetitions,
                seed: seed.seed.unwrap_or(cfg.tc.seed),
            };
            commands::bench_latency(&cfg, &args, &mut out)?;
        }
        Command::Serve { addr } => {
            if let Some(a) = addr {
                cfg.serve.addr = a;
            }
            drop(out);
            commands::serve(&cfg)?;
        }
    }
    Ok(())
}
