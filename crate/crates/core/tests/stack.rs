//! Behaviour of a small trained stack: classifier, extractor and pipeline.

mod common;

use std::collections::BTreeSet;

use common::fixture;
use sqgen_core::param::{extract_parameters, required_entity_type};
use sqgen_core::textproc::tokenize;
use sqgen_core::{generate_questions, JobPosting, ScreeningQuestion, TemplateId};

#[test]
fn work_authorization_sentence_is_classified() {
    let tc = &fixture().models.tc;
    for s in [
        "candidates must be legally eligible to work in the united states",
        "only candidates authorized to work in the uk will be considered",
    ] {
        assert_eq!(tc.predict(s).unwrap().template, TemplateId::WorkAuth, "{s}");
    }
}

#[test]
fn bachelor_party_is_not_a_degree() {
    let m = &fixture().models;
    let got = extract_parameters(
        "we provide bachelor party supplies",
        TemplateId::Education,
        &m.extractor,
        &m.tc.embeddings,
    )
    .unwrap();
    assert!(got.is_empty(), "{got:?}");
    let real = extract_parameters(
        "a bachelor's degree in a related field is required",
        TemplateId::Education,
        &m.extractor,
        &m.tc.embeddings,
    )
    .unwrap();
    assert_eq!(real, vec!["deg:bachelors".to_string()]);
}

#[test]
fn tools_sentence_yields_two_parameters_with_trained_scorer() {
    let m = &fixture().models;
    let got = extract_parameters(
        "4+ years experience in Java and C/C++",
        TemplateId::Tools,
        &m.extractor,
        &m.tc.embeddings,
    )
    .unwrap();
    assert_eq!(got, vec!["tool:java".to_string(), "tool:c_cpp".to_string()]);
}

#[test]
fn extraction_is_a_compatible_subset_of_matches() {
    let f = fixture();
    let m = &f.models;
    let mut checked = 0;
    for s in f.bundle.sentences.iter_all() {
        let toks = tokenize(&s.text);
        let matched: BTreeSet<String> = m
            .extractor
            .matcher
            .match_mentions(&toks)
            .into_iter()
            .map(|x| x.entity_id)
            .collect();
        for t in TemplateId::ALL
            .into_iter()
            .filter(|t| *t != TemplateId::Null)
        {
            let got = extract_parameters(&s.text, t, &m.extractor, &m.tc.embeddings).unwrap();
            let unique: BTreeSet<&String> = got.iter().collect();
            assert_eq!(unique.len(), got.len());
            for id in &got {
                assert!(matched.contains(id), "{id} not matched in {:?}", s.text);
                let ty = m.extractor.taxonomy.get(id).unwrap().entity_type;
                assert_eq!(Some(ty), required_entity_type(t));
            }
            checked += got.len();
        }
    }
    assert!(checked > 100);
}

#[test]
fn pipeline_is_idempotent_and_valid() {
    let f = fixture();
    let m = &f.models;
    let mut produced = 0;
    for job in f.bundle.jobs.test.iter().chain(&f.bundle.jobs.train[..30]) {
        let a = generate_questions(job, m).unwrap();
        let b = generate_questions(job, m).unwrap();
        assert_eq!(a, b);
        assert!(a.len() <= m.k);
        for w in a.windows(2) {
            assert!(w[0].score >= w[1].score);
        }
        let distinct: BTreeSet<&ScreeningQuestion> = a.iter().map(|r| &r.question).collect();
        assert_eq!(distinct.len(), a.len());
        for r in &a {
            let q = &r.question;
            assert_ne!(q.template, TemplateId::Null);
            assert_eq!(
                ScreeningQuestion::new(q.template, q.parameter.clone()).unwrap(),
                *q
            );
            if let Some(p) = &q.parameter {
                let ty = m.extractor.taxonomy.get(p).unwrap().entity_type;
                assert_eq!(Some(ty), required_entity_type(q.template));
            }
            assert!(r.score > 0.0 && r.score < 1.0);
        }
        produced += a.len();
    }
    assert!(produced > 0);
}

#[test]
fn empty_posting_gives_no_questions() {
    let job = JobPosting {
        id: "empty".into(),
        title: String::new(),
        body: String::new(),
        job_features: Default::default(),
    };
    assert!(generate_questions(&job, &fixture().models)
        .unwrap()
        .is_empty());
}
