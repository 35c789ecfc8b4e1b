//! Classifier training contracts and model file round trips.

mod common;

use common::fixture;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sqgen_core::modelio::{self, load_bundle, save_bundle};
use sqgen_core::param::MentionScorer;
use sqgen_core::ranker::QuestionRanker;
use sqgen_core::tc::{softmax, tc_train, DanTcModel, TcHyper};
use sqgen_core::textproc::EmbeddingTable;
use sqgen_core::{generate_questions, LabeledSentence, TemplateId};

/// Twenty sentences; every class has its own key token.
fn separable() -> Vec<LabeledSentence> {
    let keys = [
        "alpha", "bravo", "charlie", "delta", "echo", "foxtrot", "golf",
    ];
    let fill = ["the", "role", "team", "we", "you"];
    (0..20)
        .map(|i| {
            let t = TemplateId::from_index(i % 7).unwrap();
            LabeledSentence {
                text: format!("{} {} {}", fill[i % 5], keys[t.index()], fill[(i + 2) % 5]),
                template: t,
            }
        })
        .collect()
}

#[test]
fn default_hyper_lowers_the_training_loss() {
    let out = tc_train(&separable(), &TcHyper::default()).unwrap();
    let h = &out.loss_history;
    assert_eq!(h.len(), TcHyper::default().max_epochs);
    assert!(
        h.last().unwrap() < &h[0],
        "{} vs {}",
        h.last().unwrap(),
        h[0]
    );
}

#[test]
fn inference_is_deterministic_and_normalised() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let vocab = ["we", "need", "java"].map(String::from).to_vec();
    let emb = EmbeddingTable::random(vocab, 8, 16, 1.0, &mut rng).unwrap();
    let model = DanTcModel::random(emb, (8, 8), 8, 3, 0.4, &mut rng).unwrap();
    let a = model.predict("we need java and rust").unwrap();
    let b = model.predict("we need java and rust").unwrap();
    assert_eq!(
        a.probs.iter().map(|p| p.to_bits()).collect::<Vec<_>>(),
        b.probs.iter().map(|p| p.to_bits()).collect::<Vec<_>>()
    );
    assert!((a.probs.iter().sum::<f64>() - 1.0).abs() < 1e-9);
    let p = softmax(&[1000.0, -1000.0, 3.0, 0.0, 0.0, 0.0, 0.0]);
    assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-9);
}

#[test]
fn model_files_round_trip() {
    let m = &fixture().models;
    let dir = tempfile::tempdir().unwrap();

    let tc_path = dir.path().join("tc.json");
    modelio::save(&m.tc, &tc_path).unwrap();
    assert_eq!(modelio::load::<DanTcModel>(&tc_path).unwrap(), m.tc);

    let scorer_path = dir.path().join("scorer.json");
    modelio::save(&m.extractor.scorer, &scorer_path).unwrap();
    assert_eq!(
        modelio::load::<MentionScorer>(&scorer_path).unwrap(),
        m.extractor.scorer
    );

    let ranker_path = dir.path().join("ranker.json");
    modelio::save(&m.ranker, &ranker_path).unwrap();
    assert_eq!(
        modelio::load::<QuestionRanker>(&ranker_path).unwrap(),
        m.ranker
    );

    // a file of one kind never loads as another
    assert!(modelio::load::<QuestionRanker>(&tc_path).is_err());
}

#[test]
fn bundle_round_trip_preserves_suggestions() {
    let f = fixture();
    let dir = tempfile::tempdir().unwrap();
    let mut models = f.models.clone();
    models.k = 3;
    models.null_margin = 0.1;
    save_bundle(&models, dir.path()).unwrap();
    let loaded = load_bundle(dir.path()).unwrap();
    assert_eq!(loaded.k, 3);
    assert_eq!(loaded.null_margin, 0.1);
    for job in &f.bundle.jobs.test {
        assert_eq!(
            generate_questions(job, &loaded).unwrap(),
            generate_questions(job, &models).unwrap()
        );
    }
}

#[test]
fn bundle_with_missing_part_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    save_bundle(&fixture().models, dir.path()).unwrap();
    std::fs::remove_file(dir.path().join("ranker.json")).unwrap();
    assert!(load_bundle(dir.path()).is_err());
}
