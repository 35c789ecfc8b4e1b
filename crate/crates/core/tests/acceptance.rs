//! Acceptance suite. Runs every criterion, prints one PASS/FAIL line each,
//! and exits non-zero if any failed.

use std::collections::{BTreeMap, HashSet};
use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use sqgen_core::corpus::{gen_synthetic_corpus, CorpusBundle, SplitCounts, SynthConfig};
use sqgen_core::eval::{ablation_run, auroc, ndcg_at_k, RankingSplit};
use sqgen_core::gbdt::{find_best_split, gbdt_train, GbdtParams, Objective, Split};
use sqgen_core::linear::{sigmoid, BowBaseline, LinearHyper, LogisticRegression};
use sqgen_core::param::{
    mention_features, required_entity_type, scorer_accuracy, train_mention_scorer, ParamExtractor,
};
use sqgen_core::pipeline::{candidates_with, measure_latency};
use sqgen_core::ranker::{
    assemble_features, pmi_smoothed, train_ranker, Candidate, Event, FeatureGroup, FeatureSchema,
    PmiTable, RankedQuestion,
};
use sqgen_core::tc::{softmax, tc_train, DanTcModel, TcHyper};
use sqgen_core::textproc::{split_sentences, tokenize, EmbeddingTable, SurfaceMatcher, Taxonomy};
use sqgen_core::{generate_questions, JobPosting, ScreeningQuestion, SqgModels, TemplateId};

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

struct Suite {
    failures: usize,
}

impl Suite {
    fn run(&mut self, name: &str, budget: Option<Duration>, f: impl FnOnce() -> Outcome) {
        let start = Instant::now();
        let mut o = f();
        let took = start.elapsed();
        if let Some(b) = budget {
            if took > b {
                o.pass = false;
                o.detail.push_str(&format!("; over time budget {b:?}"));
            }
        }
        if !o.pass {
            self.failures += 1;
        }
        println!(
            "{} {name}: {} [{:.1}s]",
            if o.pass { "PASS" } else { "FAIL" },
            o.detail,
            took.as_secs_f64()
        );
    }
}

/// Trained components shared by several criteria.
struct Trained {
    bundle: CorpusBundle,
    config: SynthConfig,
    tc: DanTcModel,
    extractor: ParamExtractor,
}

fn tc_quality(t: &Trained) -> Outcome {
    let test = &t.bundle.sentences.test;
    let dan = test
        .iter()
        .filter(|s| t.tc.predict(&s.text).unwrap().template == s.template)
        .count() as f64
        / test.len() as f64;
    let bow = BowBaseline::train(
        &t.bundle.sentences.train,
        &LinearHyper {
            lr: 1e-2,
            epochs: 100,
            batch_size: 64,
            l2: 0.0,
            seed: 7,
        },
    )
    .unwrap();
    let bow_acc = test
        .iter()
        .filter(|s| bow.predict(&s.text) == s.template)
        .count() as f64
        / test.len() as f64;
    outcome(
        dan >= 0.90 && dan - bow_acc >= 0.05,
        format!(
            "{} train / {} test sentences; DAN accuracy {dan:.4} (>= 0.90), BOW logistic {bow_acc:.4}, gap {:.4} (>= 0.05)",
            t.bundle.sentences.train.len(),
            test.len(),
            dan - bow_acc
        ),
    )
}

/// `|a - n| / max(|a| + |n|, 1e-5)`. Central differences at h = 1e-6 carry
/// up to about 5e-10 of rounding noise, so smaller gradients are compared absolutely.
fn rel_error(a: f64, n: f64) -> f64 {
    (a - n).abs() / (a.abs() + n.abs()).max(1e-5)
}

fn max_rel_error(model: &DanTcModel, examples: &[(Vec<String>, TemplateId)]) -> f64 {
    let (_, grads) = model.loss_and_gradients(examples).unwrap();
    let analytic: Vec<Vec<f64>> = grads.groups().iter().map(|g| g.to_vec()).collect();
    let h = 1e-6;
    let mut m = model.clone();
    let mut worst: f64 = 0.0;
    for (gi, group) in analytic.iter().enumerate() {
        for (k, &a) in group.iter().enumerate() {
            let orig = m.param_groups_mut()[gi][k];
            m.param_groups_mut()[gi][k] = orig + h;
            let up = m.loss_and_gradients(examples).unwrap().0;
            m.param_groups_mut()[gi][k] = orig - h;
            let down = m.loss_and_gradients(examples).unwrap().0;
            m.param_groups_mut()[gi][k] = orig;
            let n = (up - down) / (2.0 * h);
            worst = worst.max(rel_error(a, n));
        }
    }
    worst
}

fn gradient_check() -> Outcome {
    let mut worst: f64 = 0.0;
    for seed in 0..5u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(1000 + seed);
        let vocab: Vec<String> = (0..6).map(|i| format!("w{i}")).collect();
        let dim = rng.gen_range(3..6);
        let emb = EmbeddingTable::random(vocab, dim, 4, 1.0, &mut rng).unwrap();
        let hidden = (rng.gen_range(3..7), rng.gen_range(3..7));
        let mut model =
            DanTcModel::random(emb, hidden, rng.gen_range(3..6), 3, 0.4, &mut rng).unwrap();
        // Zero biases put dead layers exactly on a ReLU kink, where central
        // differences are meaningless; random biases keep activations off it.
        for (gi, group) in model.param_groups_mut().into_iter().enumerate() {
            if gi > 0 && gi % 2 == 0 {
                group.iter_mut().for_each(|b| *b = rng.gen_range(-0.5..0.5));
            }
        }
        let examples: Vec<(Vec<String>, TemplateId)> = (0..4)
            .map(|_| {
                let n = rng.gen_range(1..6);
                let toks = (0..n)
                    .map(|_| format!("w{}", rng.gen_range(0..9)))
                    .collect();
                (toks, TemplateId::from_index(rng.gen_range(0..7)).unwrap())
            })
            .collect();
        worst = worst.max(max_rel_error(&model, &examples));
    }
    outcome(
        worst < 1e-4,
        format!("5 random models, max relative error {worst:.3e} (< 1e-4)"),
    )
}

fn permutation(t: &Trained) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let words: Vec<String> = t
        .bundle
        .sentences
        .train
        .iter()
        .take(400)
        .flat_map(|s| tokenize(&s.text))
        .chain((0..50).map(|i| format!("oov{i}")))
        .collect();
    let (mut max_diff, mut disagreements, mut compared): (f64, usize, usize) = (0.0, 0, 0);
    for _ in 0..1000 {
        let n = rng.gen_range(1..40);
        let toks: Vec<String> = (0..n)
            .map(|_| words[rng.gen_range(0..words.len())].clone())
            .collect();
        let mut perm = toks.clone();
        perm.shuffle(&mut rng);
        let a = t.tc.encode(&toks).unwrap();
        let b = t.tc.encode(&perm).unwrap();
        for (x, y) in a.iter().zip(&b) {
            max_diff = max_diff.max((x - y).abs());
        }
        let pa = t.tc.predict_tokens(&toks).unwrap();
        let pb = t.tc.predict_tokens(&perm).unwrap();
        let mut sorted = pa.probs.clone();
        sorted.sort_by(|x, y| y.total_cmp(x));
        if sorted[0] - sorted[1] > 1e-5 {
            compared += 1;
            if pa.template != pb.template {
                disagreements += 1;
            }
        }
    }
    outcome(
        max_diff <= 1e-6 && disagreements == 0,
        format!(
            "1000 sentences; max encoding difference {max_diff:.2e} (<= 1e-6); {disagreements} prediction changes among {compared} confident cases"
        ),
    )
}

fn latency() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let vocab: Vec<String> = (0..50_000).map(|i| format!("tok{i}")).collect();
    let emb = EmbeddingTable::random(vocab, 64, 4096, 0.5, &mut rng).unwrap();
    let model = DanTcModel::random(emb, (64, 64), 64, 3, 0.4, &mut rng).unwrap();
    let sentences: Vec<String> = (0..200)
        .map(|_| {
            (0..32)
                .map(|_| format!("tok{}", rng.gen_range(0..60_000)))
                .collect::<Vec<_>>()
                .join(" ")
        })
        .collect();
    let stats = measure_latency(&model, &sentences, 5).unwrap();
    outcome(
        stats.mean_ms < 10.0,
        format!(
            "d=h=64, vocab 50k, 32-token sentences: mean {:.4} ms, p50 {:.4} ms, p95 {:.4} ms (mean < 10 ms)",
            stats.mean_ms, stats.p50_ms, stats.p95_ms
        ),
    )
}

fn naive_matches(tax: &Taxonomy, tokens: &[String]) -> Vec<(String, usize, usize)> {
    let mut out = Vec::new();
    let mut pos = 0;
    while pos < tokens.len() {
        let mut best: Option<(String, usize)> = None;
        for e in tax.entities() {
            for s in &e.surfaces {
                if s.len() <= tokens.len() - pos
                    && tokens[pos..pos + s.len()] == s[..]
                    && best.as_ref().is_none_or(|b| s.len() > b.1)
                {
                    best = Some((e.id.clone(), s.len()));
                }
            }
        }
        match best {
            Some((id, len)) => {
                out.push((id, pos, pos + len));
                pos += len;
            }
            None => pos += 1,
        }
    }
    out
}

fn matcher_oracle() -> Outcome {
    let tax = Taxonomy::bundled();
    let matcher = SurfaceMatcher::new(&tax);
    let mut pool: Vec<String> = tax
        .entities()
        .iter()
        .flat_map(|e| e.surfaces.iter().flatten().cloned())
        .collect();
    pool.extend(["the", "and", "years", "of", "with", "xyzzy", "required"].map(String::from));
    pool.sort();
    pool.dedup();
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    let mut mismatches = 0;
    for _ in 0..1000 {
        let n = rng.gen_range(0..30);
        let toks: Vec<String> = (0..n)
            .map(|_| pool[rng.gen_range(0..pool.len())].clone())
            .collect();
        let fast: Vec<(String, usize, usize)> = matcher
            .match_mentions(&toks)
            .into_iter()
            .map(|m| (m.entity_id, m.start, m.end))
            .collect();
        if fast != naive_matches(&tax, &toks) {
            mismatches += 1;
        }
    }
    outcome(
        mismatches == 0,
        format!("1000 random sequences, {mismatches} mismatches"),
    )
}

fn brute_split(x: &[Vec<f64>], g: &[f64], h: &[f64], lambda: f64, gamma: f64) -> Option<Split> {
    let gt: f64 = g.iter().sum();
    let ht: f64 = h.iter().sum();
    let mut best: Option<Split> = None;
    for f in 0..x[0].len() {
        let mut vals: Vec<f64> = x.iter().map(|r| r[f]).collect();
        vals.sort_by(f64::total_cmp);
        vals.dedup();
        for w in vals.windows(2) {
            let t = (w[0] + w[1]) / 2.0;
            let (mut gl, mut hl) = (0.0, 0.0);
            for i in 0..x.len() {
                if x[i][f] < t {
                    gl += g[i];
                    hl += h[i];
                }
            }
            let (gr, hr) = (gt - gl, ht - hl);
            if hl + lambda <= 0.0 || hr + lambda <= 0.0 {
                continue;
            }
            let gain = 0.5
                * (gl * gl / (hl + lambda) + gr * gr / (hr + lambda) - gt * gt / (ht + lambda))
                - gamma;
            if best.is_none_or(|b| gain > b.gain) {
                best = Some(Split {
                    feature: f,
                    threshold: t,
                    gain,
                });
            }
        }
    }
    best.filter(|b| b.gain > 0.0)
}

fn split_oracle() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    let mut mismatches = 0;
    for _ in 0..200 {
        let n = rng.gen_range(2..=64);
        let f = rng.gen_range(1..=6);
        // dyadic values keep every partial sum exact
        let x: Vec<Vec<f64>> = (0..n)
            .map(|_| (0..f).map(|_| rng.gen_range(0..8) as f64 / 2.0).collect())
            .collect();
        let g: Vec<f64> = (0..n)
            .map(|_| rng.gen_range(-16..=16) as f64 / 8.0)
            .collect();
        let h: Vec<f64> = (0..n).map(|_| rng.gen_range(0..=8) as f64 / 8.0).collect();
        let lambda = [0.0, 0.5, 1.0][rng.gen_range(0..3)];
        let gamma = [0.0, 0.25][rng.gen_range(0..2)];
        if find_best_split(&x, &g, &h, lambda, gamma, 1).unwrap()
            != brute_split(&x, &g, &h, lambda, gamma)
        {
            mismatches += 1;
        }
    }
    outcome(
        mismatches == 0,
        format!("200 random datasets, {mismatches} mismatches"),
    )
}

fn xor_expressiveness() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(29);
    let x: Vec<Vec<f64>> = (0..400)
        .map(|_| vec![rng.gen_range(0..2) as f64, rng.gen_range(0..2) as f64])
        .collect();
    let y: Vec<f64> = x
        .iter()
        .map(|r| ((r[0] as u8) ^ (r[1] as u8)) as f64)
        .collect();
    let labels: Vec<bool> = y.iter().map(|&v| v == 1.0).collect();
    let p = GbdtParams {
        trees: 50,
        max_depth: 2,
        ..Default::default()
    };
    let e = gbdt_train(&x, &y, None, &p).unwrap();
    let tree_scores: Vec<f64> = x.iter().map(|r| e.margin(r).unwrap()).collect();
    let tree_auc = auroc(&tree_scores, &labels).unwrap();
    let mut lr = LogisticRegression::zeros(2);
    let rows: Vec<Vec<(usize, f64)>> = x.iter().map(|r| vec![(0, r[0]), (1, r[1])]).collect();
    lr.fit(
        &rows,
        &labels,
        &LinearHyper {
            lr: 0.05,
            epochs: 200,
            batch_size: 400,
            l2: 0.0,
            seed: 0,
        },
    )
    .unwrap();
    let lr_scores: Vec<f64> = rows.iter().map(|r| lr.margin(r)).collect();
    let lr_auc = auroc(&lr_scores, &labels).unwrap();
    outcome(
        tree_auc >= 0.99 && lr_auc <= 0.60,
        format!("400 points; GBDT (depth 2, 50 trees) AUROC {tree_auc:.4} (>= 0.99), logistic AUROC {lr_auc:.4} (<= 0.60)"),
    )
}

fn ranking_split(
    t: &Trained,
) -> (
    Vec<sqgen_core::FeedbackTriple>,
    Vec<sqgen_core::FeedbackTriple>,
) {
    let train: HashSet<&str> = t.bundle.jobs.train.iter().map(|j| j.id.as_str()).collect();
    let test: HashSet<&str> = t.bundle.jobs.test.iter().map(|j| j.id.as_str()).collect();
    (
        t.bundle
            .feedback
            .iter()
            .filter(|f| train.contains(f.job_id.as_str()))
            .cloned()
            .collect(),
        t.bundle
            .feedback
            .iter()
            .filter(|f| test.contains(f.job_id.as_str()))
            .cloned()
            .collect(),
    )
}

fn ranking_direction(t: &Trained) -> Outcome {
    let (train_fb, test_fb) = ranking_split(t);
    let split = RankingSplit {
        train_feedback: &train_fb,
        train_jobs: &t.bundle.jobs.train,
        test_feedback: &test_fb,
        test_jobs: &t.bundle.jobs.test,
    };
    let schema = FeatureSchema::new(t.config.job_schema.clone(), t.bundle.taxonomy.len());
    let params = GbdtParams {
        objective: Objective::Pairwise,
        ..Default::default()
    };
    let evidence = |j: &JobPosting| candidates_with(j, &t.tc, &t.extractor, 0.0);
    let full = ablation_run(&[], &split, &schema, &params, 0.5, evidence).unwrap();
    let no_pmi = ablation_run(
        &[FeatureGroup::Interaction],
        &split,
        &schema,
        &params,
        0.5,
        evidence,
    )
    .unwrap();
    let drop = full.ndcg_at_1 - no_pmi.ndcg_at_1;
    outcome(
        full.ndcg_at_1 >= 0.85 && drop >= 0.05,
        format!(
            "{} test jobs; pairwise NDCG@1 {:.4} (>= 0.85), without PMI {:.4}, drop {drop:.4} (>= 0.05)",
            full.groups, full.ndcg_at_1, no_pmi.ndcg_at_1
        ),
    )
}

fn metric_oracles() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    let mut worst: f64 = 0.0;
    for _ in 0..200 {
        let n = rng.gen_range(2..50);
        let s: Vec<f64> = (0..n).map(|_| rng.gen_range(0..6) as f64 * 0.1).collect();
        let mut l: Vec<bool> = (0..n).map(|_| rng.gen_bool(0.5)).collect();
        l[0] = true;
        l[1] = false;
        let (mut num, mut den) = (0.0, 0.0);
        for i in 0..n {
            for j in 0..n {
                if l[i] && !l[j] {
                    den += 1.0;
                    num += if s[i] > s[j] {
                        1.0
                    } else if s[i] == s[j] {
                        0.5
                    } else {
                        0.0
                    };
                }
            }
        }
        worst = worst.max((auroc(&s, &l).unwrap() - num / den).abs());
    }
    let ideal = ndcg_at_k(&[(0.9, true), (0.8, true), (0.1, false)], 3).unwrap();
    let half = ndcg_at_k(&[(0.9, false), (0.1, true)], 2).unwrap();
    let closed = (ideal - 1.0).abs() <= 1e-12 && (half - 1.0 / 3f64.log2()).abs() <= 1e-12;
    outcome(
        worst <= 1e-12 && closed,
        format!("AUROC vs pair counting on 200 instances, max difference {worst:.1e}; NDCG ideal {ideal}, [0,1]@2 {half:.16}"),
    )
}

/// Straight-line reimplementation of question generation.
fn oracle_generate(job: &JobPosting, m: &SqgModels) -> Vec<RankedQuestion> {
    // (question, tc score, linker score) in first-seen order
    let mut cands: Vec<(ScreeningQuestion, f64, f64)> = Vec::new();
    for sentence in split_sentences(&job.body) {
        let toks = tokenize(&sentence);
        if toks.is_empty() {
            continue;
        }
        let probs = softmax(&m.tc.logits(&m.tc.encode(&toks).unwrap()).unwrap());
        let mut t = 0;
        for i in 1..probs.len() {
            if probs[i] > probs[t] {
                t = i;
            }
        }
        if t == 0 || probs[t] - probs[0] < m.null_margin {
            continue;
        }
        let template = TemplateId::from_index(t).unwrap();
        let mut found: Vec<(Option<String>, f64)> = Vec::new();
        match required_entity_type(template) {
            None => found.push((None, 1.0)),
            Some(ty) => {
                for span in m.extractor.matcher.match_mentions(&toks) {
                    if m.extractor
                        .taxonomy
                        .get(&span.entity_id)
                        .unwrap()
                        .entity_type
                        != ty
                        || found
                            .iter()
                            .any(|(p, _)| p.as_deref() == Some(span.entity_id.as_str()))
                    {
                        continue;
                    }
                    let f = mention_features(
                        &toks,
                        (span.start, span.end),
                        &m.tc.embeddings,
                        &m.extractor.scorer.freq,
                    )
                    .unwrap();
                    let score = m.extractor.scorer.score(&f).unwrap();
                    if score >= m.extractor.scorer.threshold {
                        found.push((Some(span.entity_id.clone()), score));
                    }
                }
            }
        }
        for (p, linker) in found {
            let q = ScreeningQuestion {
                template,
                parameter: p,
            };
            match cands.iter_mut().find(|c| c.0 == q) {
                Some(c) => {
                    if probs[t] > c.1 {
                        *c = (q, probs[t], linker);
                    }
                }
                None => cands.push((q, probs[t], linker)),
            }
        }
    }
    let mut by_tc: Vec<usize> = (0..cands.len()).collect();
    by_tc.sort_by(|&a, &b| {
        cands[b]
            .1
            .partial_cmp(&cands[a].1)
            .unwrap()
            .then(cands[a].0.tie_key().cmp(&cands[b].0.tie_key()))
    });
    let mut rank = vec![0; cands.len()];
    for (r, &i) in by_tc.iter().enumerate() {
        rank[i] = r + 1;
    }
    let mut out: Vec<RankedQuestion> = cands
        .iter()
        .enumerate()
        .map(|(i, (q, tc, linker))| {
            let c = Candidate {
                question: q.clone(),
                tc_score: *tc,
                tc_rank: rank[i],
                linker_score: *linker,
            };
            let x = assemble_features(job, &c, &m.ranker.pmi, &m.ranker.schema).unwrap();
            RankedQuestion {
                question: q.clone(),
                score: sigmoid(m.ranker.ensemble.margin(&x).unwrap()),
            }
        })
        .collect();
    out.sort_by(|a, b| {
        b.score
            .partial_cmp(&a.score)
            .unwrap()
            .then(a.question.tie_key().cmp(&b.question.tie_key()))
    });
    out.truncate(m.k);
    out
}

fn pipeline_oracle(t: &Trained) -> Outcome {
    let (train_fb, _) = ranking_split(t);
    let schema = FeatureSchema::new(t.config.job_schema.clone(), t.bundle.taxonomy.len());
    let params = GbdtParams {
        objective: Objective::Pairwise,
        ..Default::default()
    };
    let ranker = train_ranker(
        &train_fb,
        &t.bundle.jobs.train,
        &schema,
        &params,
        0.5,
        |j| candidates_with(j, &t.tc, &t.extractor, 0.0),
    )
    .unwrap();
    let mut models = SqgModels::new(t.tc.clone(), t.extractor.clone(), ranker).unwrap();

    let mut cfg = SynthConfig::with_seed(99);
    cfg.jobs = SplitCounts {
        train: 100,
        test: 0,
        valid: 0,
    };
    cfg.sentences_per_template = SplitCounts {
        train: 20,
        test: 0,
        valid: 0,
    };
    let extra = gen_synthetic_corpus(&cfg).unwrap();
    let mut jobs = extra.jobs.train.clone();
    // Bodies stitched from random labelled sentences repeat templates and
    // parameters across sentences.
    let mut rng = ChaCha8Rng::seed_from_u64(37);
    let pool = &t.bundle.sentences.test;
    for i in 0..100 {
        let mut j = extra.jobs.train[i].clone();
        j.id = format!("mixed-{i}");
        let n = rng.gen_range(0..12);
        j.body = (0..n)
            .map(|_| pool[rng.gen_range(0..pool.len())].text.clone())
            .collect::<Vec<_>>()
            .join("\n");
        jobs.push(j);
    }
    let mut mismatches = 0;
    let mut nonempty = 0;
    for (i, job) in jobs.iter().enumerate() {
        models.k = [1, 3, 5, 10][i % 4];
        models.null_margin = if i % 5 == 0 { 0.3 } else { 0.0 };
        let got = generate_questions(job, &models).unwrap();
        if !got.is_empty() {
            nonempty += 1;
        }
        if got != oracle_generate(job, &models) {
            mismatches += 1;
        }
    }
    outcome(
        mismatches == 0 && nonempty > 150,
        format!("{} jobs ({nonempty} with questions), {mismatches} mismatches against the straight-line oracle", jobs.len()),
    )
}

fn pmi_properties() -> Outcome {
    let ev = |f: &str, v: String| -> Event { (f.to_string(), v) };
    let mut table = PmiTable::new(0.0, BTreeMap::new());
    // counts n_a * n_b / N for marginals (1, 2, 3) x (2, 2): exact independence
    for (a, na) in [(0, 1), (1, 2), (2, 3)] {
        for b in 0..2 {
            for _ in 0..na * 2 {
                table.observe(
                    &[ev("industry", a.to_string())],
                    &[ev("template", b.to_string())],
                );
            }
        }
    }
    let mut independent_zero = true;
    for a in 0..3 {
        for b in 0..2 {
            independent_zero &= table.pmi(
                &ev("industry", a.to_string()),
                &ev("template", b.to_string()),
            ) == 0.0;
        }
    }
    let ln2 = pmi_smoothed(20.0, 40.0, 25.0, 100.0, 0.0, 1.0, 1.0, 1.0);
    let ln2_ok = (ln2 - 2f64.ln()).abs() <= 1e-12;

    let mut rng = ChaCha8Rng::seed_from_u64(41);
    let mut asymmetric = 0;
    for _ in 0..100 {
        let mut t = PmiTable::new([0.0, 0.5, 1.0][rng.gen_range(0..3)], BTreeMap::new());
        for _ in 0..rng.gen_range(0..80) {
            t.observe(
                &[
                    ev("industry", rng.gen_range(0..4).to_string()),
                    ev("region", rng.gen_range(0..3).to_string()),
                ],
                &[ev("template", rng.gen_range(0..6).to_string())],
            );
        }
        for a in 0..4 {
            for b in 0..6 {
                let x = ev("industry", a.to_string());
                let y = ev("template", b.to_string());
                if t.pmi(&x, &y).to_bits() != t.pmi(&y, &x).to_bits() {
                    asymmetric += 1;
                }
            }
        }
    }
    outcome(
        independent_zero && ln2_ok && asymmetric == 0,
        format!(
            "independence at alpha=0 gives exactly 0: {independent_zero}; 20/40/25 of 100 gives {ln2:.16} (ln 2); {asymmetric} asymmetric pairs in 100 random tables"
        ),
    )
}

fn main() {
    let mut suite = Suite { failures: 0 };
    println!("acceptance suite");

    suite.run(
        "tc-gradient-check",
        Some(Duration::from_secs(60)),
        gradient_check,
    );
    suite.run("tc-latency", None, latency);
    suite.run("matcher-oracle", None, matcher_oracle);
    suite.run("gbdt-split-oracle", None, split_oracle);
    suite.run(
        "gbdt-xor",
        Some(Duration::from_secs(30)),
        xor_expressiveness,
    );
    suite.run("metric-oracles", None, metric_oracles);
    suite.run("pmi", None, pmi_properties);

    let start = Instant::now();
    let config = SynthConfig::with_seed(7);
    let bundle = gen_synthetic_corpus(&config).unwrap();
    let tc = tc_train(
        &bundle.sentences.train,
        &TcHyper {
            seed: 7,
            ..Default::default()
        },
    )
    .unwrap()
    .model;
    let tc_time = start.elapsed();
    let cut = bundle.mentions.len() * 8 / 10;
    let scorer = train_mention_scorer(
        &bundle.mentions[..cut],
        &bundle.taxonomy,
        &tc.embeddings,
        &LinearHyper {
            lr: 1e-2,
            epochs: 50,
            batch_size: 32,
            l2: 0.0,
            seed: 7,
        },
    )
    .unwrap();
    let scorer_acc = scorer_accuracy(
        &scorer,
        &bundle.mentions[cut..],
        &bundle.taxonomy,
        &tc.embeddings,
    )
    .unwrap();
    println!(
        "     (setup: DAN trained in {:.1}s; mention scorer held-out accuracy {scorer_acc:.4})",
        tc_time.as_secs_f64()
    );
    let trained = Trained {
        extractor: ParamExtractor::new(bundle.taxonomy.clone(), scorer).unwrap(),
        bundle,
        config,
        tc,
    };

    let tc_budget = Duration::from_secs(600).saturating_sub(tc_time);
    suite.run("tc-quality", Some(tc_budget), || tc_quality(&trained));
    suite.run("dan-permutation", None, || permutation(&trained));
    suite.run("ranking-direction", None, || ranking_direction(&trained));
    suite.run("pipeline-oracle", None, || pipeline_oracle(&trained));

    if suite.failures > 0 {
        println!("{} criteria failed", suite.failures);
        std::process::exit(1);
    }
    println!("all criteria passed");
}
