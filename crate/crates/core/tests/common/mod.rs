//! A small trained stack shared by the integration tests.

#![allow(dead_code)]

use std::collections::HashSet;
use std::sync::OnceLock;

use sqgen_core::corpus::{gen_synthetic_corpus, CorpusBundle, SplitCounts, SynthConfig};
use sqgen_core::gbdt::{GbdtParams, Objective};
use sqgen_core::linear::LinearHyper;
use sqgen_core::param::{train_mention_scorer, ParamExtractor};
use sqgen_core::pipeline::candidates_with;
use sqgen_core::ranker::{train_ranker, FeatureSchema};
use sqgen_core::tc::{tc_train, TcHyper};
use sqgen_core::SqgModels;

pub struct Fixture {
    pub config: SynthConfig,
    pub bundle: CorpusBundle,
    pub models: SqgModels,
}

pub fn fixture() -> &'static Fixture {
    static CELL: OnceLock<Fixture> = OnceLock::new();
    CELL.get_or_init(build)
}

fn build() -> Fixture {
    let mut config = SynthConfig::with_seed(3);
    config.sentences_per_template = SplitCounts {
        train: 300,
        test: 50,
        valid: 0,
    };
    config.jobs = SplitCounts {
        train: 200,
        test: 50,
        valid: 0,
    };
    let bundle = gen_synthetic_corpus(&config).unwrap();
    let tc = tc_train(
        &bundle.sentences.train,
        &TcHyper {
            max_epochs: 20,
            seed: 3,
            ..Default::default()
        },
    )
    .unwrap()
    .model;
    let scorer = train_mention_scorer(
        &bundle.mentions,
        &bundle.taxonomy,
        &tc.embeddings,
        &LinearHyper {
            lr: 1e-2,
            epochs: 30,
            batch_size: 32,
            l2: 0.0,
            seed: 3,
        },
    )
    .unwrap();
    let extractor = ParamExtractor::new(bundle.taxonomy.clone(), scorer).unwrap();
    let schema = FeatureSchema::new(config.job_schema.clone(), bundle.taxonomy.len());
    let params = GbdtParams {
        objective: Objective::Pairwise,
        trees: 40,
        ..Default::default()
    };
    let train_ids: HashSet<&str> = bundle.jobs.train.iter().map(|j| j.id.as_str()).collect();
    let feedback: Vec<_> = bundle
        .feedback
        .iter()
        .filter(|f| train_ids.contains(f.job_id.as_str()))
        .cloned()
        .collect();
    let ranker = train_ranker(&feedback, &bundle.jobs.train, &schema, &params, 0.5, |j| {
        candidates_with(j, &tc, &extractor, 0.0)
    })
    .unwrap();
    let models = SqgModels::new(tc, extractor, ranker).unwrap();
    Fixture {
        config,
        bundle,
        models,
    }
}
