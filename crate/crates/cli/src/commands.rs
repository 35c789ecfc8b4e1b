//! Subcommand implementations. Each writes its report to `out`; progress
//! notes go to stderr.

use std::collections::HashSet;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use anyhow::{bail, Context, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sqgen_core::corpus::{
    gen_synthetic_corpus, load_dataset, read_feedback, CorpusBundle, SplitCounts, SynthConfig,
};
use sqgen_core::eval::{
    ablation_run, classification_report, ranking_run, RankingReport, RankingSplit,
};
use sqgen_core::linear::BowBaseline;
use sqgen_core::modelio::{self, load_bundle, save_bundle};
use sqgen_core::param::{scorer_accuracy, train_mention_scorer, MentionScorer, ParamExtractor};
use sqgen_core::pipeline::{candidates_with, measure_latency};
use sqgen_core::ranker::{self, FeatureGroup, FeatureSchema};
use sqgen_core::tc::{tc_train, tc_train_with, DanTcModel, TcHyper};
use sqgen_core::textproc::EmbeddingTable;
use sqgen_core::{generate_questions, FeedbackTriple, JobPosting, SqgModels};

use crate::config::Config;
use crate::service::{self, AppState, QuestionOut, Suggestions};

fn read_corpus(cfg: &Config) -> Result<CorpusBundle> {
    CorpusBundle::read_dir(&cfg.data_dir)
        .with_context(|| format!("reading corpus from {}", cfg.data_dir.display()))
}

fn load_tc(cfg: &Config) -> Result<DanTcModel> {
    let p = cfg.tc_path();
    modelio::load(&p).with_context(|| format!("loading {}", p.display()))
}

fn load_scorer(cfg: &Config) -> Result<MentionScorer> {
    let p = cfg.scorer_path();
    modelio::load(&p).with_context(|| format!("loading {}", p.display()))
}

fn load_models(cfg: &Config) -> Result<SqgModels> {
    load_bundle(&cfg.model_dir)
        .with_context(|| format!("loading model bundle from {}", cfg.model_dir.display()))
}

fn accuracy(tc: &DanTcModel, sentences: &[sqgen_core::LabeledSentence]) -> Result<f64> {
    let mut hits = 0;
    for s in sentences {
        if tc.predict(&s.text)?.template == s.template {
            hits += 1;
        }
    }
    Ok(hits as f64 / sentences.len().max(1) as f64)
}

/// Feedback restricted to `jobs`, with the number of dropped triples.
fn feedback_for(feedback: &[FeedbackTriple], jobs: &[JobPosting]) -> (Vec<FeedbackTriple>, usize) {
    let ids: HashSet<&str> = jobs.iter().map(|j| j.id.as_str()).collect();
    let kept: Vec<FeedbackTriple> = feedback
        .iter()
        .filter(|f| ids.contains(f.job_id.as_str()))
        .cloned()
        .collect();
    let dropped = feedback.len() - kept.len();
    (kept, dropped)
}

pub fn gen_corpus(cfg: &Config, out: &mut impl Write) -> Result<()> {
    let mut synth = SynthConfig::with_seed(cfg.corpus.seed);
    let n = cfg.corpus.sentences_per_template;
    synth.sentences_per_template = SplitCounts {
        train: n,
        test: n / 2,
        valid: n / 4,
    };
    synth.jobs = SplitCounts::ratio_70_20_10(cfg.corpus.jobs);
    let bundle = gen_synthetic_corpus(&synth)?;
    bundle.write_dir(&cfg.data_dir)?;
    writeln!(
        out,
        "wrote {} sentences, {} jobs, {} mentions and {} feedback triples to {}",
        bundle.sentences.iter_all().count(),
        bundle.jobs.iter_all().count(),
        bundle.mentions.len(),
        bundle.feedback.len(),
        cfg.data_dir.display()
    )?;
    Ok(())
}

pub fn train_tc(cfg: &Config, pretrained: Option<&Path>, out: &mut impl Write) -> Result<()> {
    let bundle = read_corpus(cfg)?;
    let trained = match pretrained {
        None => tc_train(&bundle.sentences.train, &cfg.tc)?,
        Some(p) => tc_train_with(&bundle.sentences.train, &cfg.tc, |emb| {
            let n = emb.load_pretrained(p)?;
            eprintln!("loaded {n} pretrained vectors");
            Ok(())
        })?,
    };
    std::fs::create_dir_all(&cfg.model_dir)?;
    modelio::save(&trained.model, cfg.tc_path())?;
    let first = trained.loss_history.first().copied().unwrap_or(f64::NAN);
    let last = trained.loss_history.last().copied().unwrap_or(f64::NAN);
    writeln!(
        out,
        "epochs {}: loss {first:.4} -> {last:.4}",
        trained.loss_history.len()
    )?;
    writeln!(
        out,
        "validation accuracy {:.4}",
        accuracy(&trained.model, &bundle.sentences.valid)?
    )?;
    writeln!(out, "saved {}", cfg.tc_path().display())?;
    Ok(())
}

pub fn train_scorer(cfg: &Config, out: &mut impl Write) -> Result<()> {
    let bundle = read_corpus(cfg)?;
    let tc = load_tc(cfg)?;
    let cut = bundle.mentions.len() * 8 / 10;
    let (fit, held) = bundle.mentions.split_at(cut);
    let probe = train_mention_scorer(fit, &bundle.taxonomy, &tc.embeddings, &cfg.scorer)?;
    let held_acc = scorer_accuracy(&probe, held, &bundle.taxonomy, &tc.embeddings)?;
    let scorer = train_mention_scorer(
        &bundle.mentions,
        &bundle.taxonomy,
        &tc.embeddings,
        &cfg.scorer,
    )?;
    std::fs::create_dir_all(&cfg.model_dir)?;
    modelio::save(&scorer, cfg.scorer_path())?;
    writeln!(
        out,
        "held-out mention accuracy {held_acc:.4} ({} of {} examples held out)",
        held.len(),
        bundle.mentions.len()
    )?;
    writeln!(out, "saved {}", cfg.scorer_path().display())?;
    Ok(())
}

/// Trains on the train and valid postings, so decisions collected by the
/// service on valid postings feed the next model. Test postings stay unseen.
pub fn train_ranker(cfg: &Config, out: &mut impl Write) -> Result<()> {
    let bundle = read_corpus(cfg)?;
    let tc = load_tc(cfg)?;
    let extractor = ParamExtractor::new(bundle.taxonomy.clone(), load_scorer(cfg)?)?;
    let jobs: Vec<JobPosting> = bundle
        .jobs
        .train
        .iter()
        .chain(&bundle.jobs.valid)
        .cloned()
        .collect();
    let feedback = read_feedback(cfg.feedback_path())?;
    let (feedback, dropped) = feedback_for(&feedback, &jobs);
    let schema = FeatureSchema::new(bundle.job_schema.clone(), bundle.taxonomy.len());
    let ranker = train_ranker_with(&feedback, &jobs, &schema, cfg, &tc, &extractor)?;
    let mut models = SqgModels::new(tc, extractor, ranker)?;
    models.k = cfg.ranker.k;
    models.null_margin = cfg.ranker.null_margin;
    save_bundle(&models, &cfg.model_dir)?;
    writeln!(
        out,
        "trained {} trees on {} triples from {} postings ({dropped} triples for other postings skipped)",
        models.ranker.ensemble.trees.len(),
        feedback.len(),
        jobs.len()
    )?;
    writeln!(out, "saved bundle to {}", cfg.model_dir.display())?;
    Ok(())
}

fn train_ranker_with(
    feedback: &[FeedbackTriple],
    jobs: &[JobPosting],
    schema: &FeatureSchema,
    cfg: &Config,
    tc: &DanTcModel,
    extractor: &ParamExtractor,
) -> Result<sqgen_core::ranker::QuestionRanker> {
    Ok(ranker::train_ranker(
        feedback,
        jobs,
        schema,
        &cfg.ranker.gbdt.params(),
        cfg.ranker.alpha,
        |j| candidates_with(j, tc, extractor, cfg.ranker.null_margin),
    )?)
}

pub fn eval_tc(cfg: &Config, baseline: bool, out: &mut impl Write) -> Result<()> {
    let bundle = read_corpus(cfg)?;
    let tc = load_tc(cfg)?;
    let test = &bundle.sentences.test;
    let mut pred = Vec::with_capacity(test.len());
    for s in test {
        pred.push(tc.predict(&s.text)?.template);
    }
    let gold: Vec<_> = test.iter().map(|s| s.template).collect();
    write!(out, "{}", classification_report(&gold, &pred)?)?;
    if baseline {
        let mut hyper = cfg.scorer.clone();
        hyper.epochs = 100;
        hyper.batch_size = 64;
        let bow = BowBaseline::train(&bundle.sentences.train, &hyper)?;
        let hits = test
            .iter()
            .filter(|s| bow.predict(&s.text) == s.template)
            .count();
        writeln!(
            out,
            "bag-of-words logistic baseline accuracy {:.4}",
            hits as f64 / test.len().max(1) as f64
        )?;
    }
    Ok(())
}

pub fn eval_ranker(cfg: &Config, out: &mut impl Write) -> Result<()> {
    let bundle = read_corpus(cfg)?;
    let models = load_models(cfg)?;
    let feedback = read_feedback(cfg.feedback_path())?;
    let (feedback, _) = feedback_for(&feedback, &bundle.jobs.test);
    let run = ranking_run(&models.ranker, &feedback, &bundle.jobs.test, |j| {
        candidates_with(j, &models.tc, &models.extractor, models.null_margin)
    })?;
    writeln!(out, "{}", RankingReport::HEADER)?;
    writeln!(out, "{}", run.report()?.row("test"))?;
    Ok(())
}

/// Retrains the ranker without each feature group in turn.
pub fn ablate(cfg: &Config, out: &mut impl Write) -> Result<()> {
    let bundle = read_corpus(cfg)?;
    let tc = load_tc(cfg)?;
    let extractor = ParamExtractor::new(bundle.taxonomy.clone(), load_scorer(cfg)?)?;
    let feedback = read_feedback(cfg.feedback_path())?;
    let (train_fb, _) = feedback_for(&feedback, &bundle.jobs.train);
    let (test_fb, _) = feedback_for(&feedback, &bundle.jobs.test);
    let split = RankingSplit {
        train_feedback: &train_fb,
        train_jobs: &bundle.jobs.train,
        test_feedback: &test_fb,
        test_jobs: &bundle.jobs.test,
    };
    let schema = FeatureSchema::new(bundle.job_schema.clone(), bundle.taxonomy.len());
    let variants: [(&str, &[FeatureGroup]); 4] = [
        ("all features", &[]),
        ("without job", &[FeatureGroup::Job]),
        ("without question", &[FeatureGroup::Question]),
        ("without interaction", &[FeatureGroup::Interaction]),
    ];
    writeln!(out, "{}", RankingReport::HEADER)?;
    for (name, drop) in variants {
        let report = ablation_run(
            drop,
            &split,
            &schema,
            &cfg.ranker.gbdt.params(),
            cfg.ranker.alpha,
            |j| candidates_with(j, &tc, &extractor, cfg.ranker.null_margin),
        )?;
        writeln!(out, "{}", report.row(name))?;
    }
    Ok(())
}

/// Classifier hyper-parameters that `sweep` can vary.
#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum SweepParam {
    Lr,
    BatchSize,
    Dropout,
    Epochs,
    Depth,
}

impl SweepParam {
    pub fn default_grid(self) -> Vec<f64> {
        match self {
            SweepParam::Lr => vec![1e-4, 3e-4, 1e-3, 3e-3, 1e-2],
            SweepParam::BatchSize => vec![32.0, 64.0, 128.0, 256.0, 512.0],
            SweepParam::Dropout => vec![0.0, 0.2, 0.4, 0.6, 0.8],
            SweepParam::Epochs => vec![10.0, 25.0, 50.0, 100.0, 200.0],
            SweepParam::Depth => vec![1.0, 2.0, 3.0, 4.0, 5.0],
        }
    }

    fn apply(self, hyper: &mut TcHyper, v: f64) -> Result<()> {
        let whole = || -> Result<usize> {
            if v < 1.0 || v.fract() != 0.0 {
                bail!("{self:?} needs a positive whole number, got {v}");
            }
            Ok(v as usize)
        };
        match self {
            SweepParam::Lr => hyper.lr = v,
            SweepParam::BatchSize => hyper.batch_size = whole()?,
            SweepParam::Dropout => hyper.dropout = v,
            SweepParam::Epochs => hyper.max_epochs = whole()?,
            SweepParam::Depth => hyper.mlp_depth = whole()?,
        }
        Ok(())
    }
}

/// Trains one classifier per grid value and reports validation and test
/// accuracy.
pub fn sweep(
    cfg: &Config,
    param: SweepParam,
    values: Option<Vec<f64>>,
    out: &mut impl Write,
) -> Result<()> {
    let bundle = read_corpus(cfg)?;
    let grid = values.unwrap_or_else(|| param.default_grid());
    writeln!(
        out,
        "{:>10} {:>8} {:>8}",
        format!("{param:?}").to_lowercase(),
        "valid",
        "test"
    )?;
    for v in grid {
        let mut hyper = cfg.tc.clone();
        param.apply(&mut hyper, v)?;
        let model = tc_train(&bundle.sentences.train, &hyper)?.model;
        writeln!(
            out,
            "{v:>10} {:>8.4} {:>8.4}",
            accuracy(&model, &bundle.sentences.valid)?,
            accuracy(&model, &bundle.sentences.test)?
        )?;
    }
    Ok(())
}

/// Reads postings from a JSONL file and writes one [`Suggestions`] line per
/// posting.
pub fn suggest(cfg: &Config, input: &Path, out: &mut impl Write) -> Result<()> {
    let models = load_models(cfg)?;
    let jobs: Vec<JobPosting> = load_dataset(input)?;
    for job in &jobs {
        let ranked = generate_questions(job, &models)?;
        let line = Suggestions {
            job_id: job.id.clone(),
            questions: ranked.iter().map(QuestionOut::from).collect(),
        };
        writeln!(out, "{}", serde_json::to_string(&line)?)?;
    }
    Ok(())
}

pub struct LatencyArgs {
    pub model: Option<PathBuf>,
    pub vocab: usize,
    pub tokens: usize,
    pub sentences: usize,
    pub repetitions: usize,
    pub seed: u64,
}

/// Times classifier inference on random sentences, with either a saved
/// model or a random one of the configured shape.
pub fn bench_latency(cfg: &Config, args: &LatencyArgs, out: &mut impl Write) -> Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(args.seed);
    let tc = match &args.model {
        Some(p) => modelio::load::<DanTcModel>(p)?,
        None => {
            let vocab: Vec<String> = (0..args.vocab).map(|i| format!("tok{i}")).collect();
            let h = &cfg.tc;
            let emb = EmbeddingTable::random(vocab, h.dim, h.buckets, h.emb_scale, &mut rng)?;
            DanTcModel::random(
                emb,
                h.hidden,
                h.head_width,
                h.mlp_depth,
                h.dropout,
                &mut rng,
            )?
        }
    };
    let pool = args.vocab.max(1) * 6 / 5;
    let sentences: Vec<String> = (0..args.sentences)
        .map(|_| {
            (0..args.tokens)
                .map(|_| format!("tok{}", rng.gen_range(0..pool)))
                .collect::<Vec<_>>()
                .join(" ")
        })
        .collect();
    let stats = measure_latency(&tc, &sentences, args.repetitions)?;
    writeln!(
        out,
        "{} samples: mean {:.4} ms, p50 {:.4} ms, p95 {:.4} ms",
        stats.samples, stats.mean_ms, stats.p50_ms, stats.p95_ms
    )?;
    Ok(())
}

pub fn serve(cfg: &Config) -> Result<()> {
    let models = load_models(cfg)?;
    let jobs_path = cfg.serve_jobs_path();
    let jobs: Vec<JobPosting> = load_dataset(&jobs_path)
        .with_context(|| format!("reading postings from {}", jobs_path.display()))?;
    let state = Arc::new(AppState::new(models, jobs, cfg.feedback_path())?);
    let rt = tokio::runtime::Runtime::new()?;
    rt.block_on(service::serve(state, &cfg.serve.addr))
}
