//! Inputs shared by the benchmarks.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sqgen_core::corpus::{gen_synthetic_corpus, CorpusBundle, SplitCounts, SynthConfig};
use sqgen_core::gbdt::{GbdtParams, Objective};
use sqgen_core::linear::LinearHyper;
use sqgen_core::param::{train_mention_scorer, ParamExtractor};
use sqgen_core::pipeline::candidates_with;
use sqgen_core::ranker::{train_ranker, FeatureSchema};
use sqgen_core::tc::{tc_train, DanTcModel, TcHyper};
use sqgen_core::textproc::EmbeddingTable;
use sqgen_core::SqgModels;

/// A random classifier of the default shape over `vocab` tokens named
/// `tok0`, `tok1`, ...
pub fn random_tc(vocab: usize, seed: u64) -> DanTcModel {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let h = TcHyper::default();
    let tokens: Vec<String> = (0..vocab).map(|i| format!("tok{i}")).collect();
    let emb = EmbeddingTable::random(tokens, h.dim, h.buckets, h.emb_scale, &mut rng)
        .expect("valid shape");
    DanTcModel::random(
        emb,
        h.hidden,
        h.head_width,
        h.mlp_depth,
        h.dropout,
        &mut rng,
    )
    .expect("valid shape")
}

/// Sentences of `len` tokens drawn from a pool 20% larger than `vocab`, so
/// some tokens fall into the hash buckets.
pub fn random_sentences(vocab: usize, len: usize, count: usize, seed: u64) -> Vec<String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pool = vocab * 6 / 5;
    (0..count)
        .map(|_| {
            (0..len)
                .map(|_| format!("tok{}", rng.gen_range(0..pool)))
                .collect::<Vec<_>>()
                .join(" ")
        })
        .collect()
}

/// A dense regression problem with gradients and unit hessians.
pub struct SplitProblem {
    pub x: Vec<Vec<f64>>,
    pub g: Vec<f64>,
    pub h: Vec<f64>,
}

pub fn split_problem(rows: usize, features: usize, seed: u64) -> SplitProblem {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let x: Vec<Vec<f64>> = (0..rows)
        .map(|_| (0..features).map(|_| rng.gen_range(0..64) as f64).collect())
        .collect();
    let g = x
        .iter()
        .map(|r| {
            if r[0] + r[1 % features] > 64.0 {
                -1.0
            } else {
                1.0
            }
        })
        .collect();
    SplitProblem {
        x,
        g,
        h: vec![1.0; rows],
    }
}

/// A small trained stack with its corpus.
pub fn trained_stack(seed: u64) -> (CorpusBundle, SqgModels) {
    let mut cfg = SynthConfig::with_seed(seed);
    cfg.sentences_per_template = SplitCounts {
        train: 200,
        test: 0,
        valid: 0,
    };
    cfg.jobs = SplitCounts {
        train: 150,
        test: 50,
        valid: 0,
    };
    let bundle = gen_synthetic_corpus(&cfg).expect("valid config");
    let tc = tc_train(
        &bundle.sentences.train,
        &TcHyper {
            max_epochs: 20,
            seed,
            ..Default::default()
        },
    )
    .expect("trainable")
    .model;
    let hyper = LinearHyper {
        seed,
        ..Default::default()
    };
    let scorer = train_mention_scorer(&bundle.mentions, &bundle.taxonomy, &tc.embeddings, &hyper)
        .expect("trainable");
    let extractor = ParamExtractor::new(bundle.taxonomy.clone(), scorer).expect("valid scorer");
    let train_ids: std::collections::HashSet<&str> =
        bundle.jobs.train.iter().map(|j| j.id.as_str()).collect();
    let feedback: Vec<_> = bundle
        .feedback
        .iter()
        .filter(|f| train_ids.contains(f.job_id.as_str()))
        .cloned()
        .collect();
    let schema = FeatureSchema::new(bundle.job_schema.clone(), bundle.taxonomy.len());
    let params = GbdtParams {
        objective: Objective::Pairwise,
        seed,
        ..Default::default()
    };
    let ranker = train_ranker(&feedback, &bundle.jobs.train, &schema, &params, 0.5, |j| {
        candidates_with(j, &tc, &extractor, 0.0)
    })
    .expect("trainable");
    let models = SqgModels::new(tc, extractor, ranker).expect("consistent models");
    (bundle, models)
}
