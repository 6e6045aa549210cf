//! Acceptance criteria. Each test prints one `PASS`/`FAIL` line (written
//! straight to stdout so it survives output capture) and then asserts.

use std::collections::{BTreeMap, BTreeSet};
use std::io::Write;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::Value;

use codemix::corpus::{split_dataset, train_size, validate_predictions, write_corpus, Dataset};
use codemix::embeddings::{sequence_embedding, EmbeddingTable, PaddedSequence};
use codemix::ensemble::{fit_voting, soft_vote, VotingParams};
use codemix::features::{extract_ngrams, NGramSpec, SparseVector, TfidfModel, TfidfOptions};
use codemix::forest::{fit_forest, ForestParams};
use codemix::linear::{train_svm_binary, LogRegModel, SvmParams};
use codemix::metrics::{confusion_matrix, macro_f1};
use codemix::neural::{
    gradient_check, train_bilstm_with, train_mlp_with, BiLstmModel, BiLstmParams, EpochControl, LstmCell, MlpModel,
    MlpParams, ParamSet,
};
use codemix::pipeline::{
    evaluate_files, load_model, predict_corpus, resolve_preset, run_predict, run_train, train, ExperimentConfig,
    FeatureSpec, ModelKind,
};
use codemix::sentiment::{ClassProbs, Sentiment};
use codemix::synth::{synth_corpus, SynthConfig};

const METRIC_TOL: f64 = 1e-12;
const METRIC_BUDGET: Duration = Duration::from_secs(5);
const TFIDF_TOL: f64 = 1e-9;
const FD_EPS: f64 = 1e-5;
const LOGREG_GRAD_TOL: f64 = 1e-6;
const NEURAL_GRAD_TOL: f64 = 1e-4;
const GRAD_BUDGET: Duration = Duration::from_secs(30);
/// Slack for floating-point rounding in the per-epoch dual objective.
const DUAL_MONOTONE_TOL: f64 = 1e-9;
const PROB_SUM_TOL: f64 = 1e-12;
const DIRECTIONAL_BUDGET: Duration = Duration::from_secs(120);
const TOY_EPOCHS: usize = 200;
const FIXTURE_F1: f64 = 0.778;
const FIXTURE_F1_TOL: f64 = 0.001;

fn report(id: u32, name: &str, pass: bool, detail: String) {
    let verdict = if pass { "PASS" } else { "FAIL" };
    let mut out = std::io::stdout().lock();
    let _ = writeln!(out, "\n{verdict} [{id:02}] {name}: {detail}");
}

fn class(i: usize) -> Sentiment {
    Sentiment::from_index(i)
}

// ---------------------------------------------------------------------------

/// Written from the definition alone: F1 = 2tp / (2tp + fp + fn), 0 when
/// the class never occurs on either side.
fn brute_macro_f1(gold: &[i64], pred: &[i64]) -> f64 {
    let mut total = 0.0;
    for c in [-1i64, 0, 1] {
        let (mut tp, mut fp, mut fn_) = (0.0, 0.0, 0.0);
        for (&g, &p) in gold.iter().zip(pred) {
            match (g == c, p == c) {
                (true, true) => tp += 1.0,
                (false, true) => fp += 1.0,
                (true, false) => fn_ += 1.0,
                _ => {}
            }
        }
        let den = 2.0 * tp + fp + fn_;
        total += if den == 0.0 { 0.0 } else { 2.0 * tp / den };
    }
    total / 3.0
}

#[test]
fn c01_macro_f1_matches_brute_force() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut worst: f64 = 0.0;
    for _ in 0..1000 {
        let gold: Vec<i64> = (0..50).map(|_| rng.gen_range(-1..=1)).collect();
        let pred: Vec<i64> = (0..50).map(|_| rng.gen_range(-1..=1)).collect();
        let to_s = |v: &[i64]| v.iter().map(|&x| Sentiment::from_value(x).unwrap()).collect::<Vec<_>>();
        let cm = confusion_matrix(&to_s(&gold), &to_s(&pred)).unwrap();
        worst = worst.max((macro_f1(&cm) - brute_macro_f1(&gold, &pred)).abs());
    }
    let elapsed = start.elapsed();
    let pass = worst <= METRIC_TOL && elapsed < METRIC_BUDGET;
    report(
        1,
        "metric oracle equivalence",
        pass,
        format!("max |diff| {worst:.2e}, {elapsed:.2?}"),
    );
    assert!(pass);
}

// ---------------------------------------------------------------------------

#[test]
fn c02_tfidf_matches_reference_values() {
    let oracle: Value = serde_json::from_str(include_str!("fixtures/tfidf_oracle.json")).unwrap();
    let docs: Vec<String> = serde_json::from_value(oracle["docs"].clone()).unwrap();
    let mut worst: f64 = 0.0;
    let mut worst_norm: f64 = 0.0;
    let mut key_mismatch = 0;
    for (key, spec) in [("char_2_6", NGramSpec::char(2, 6)), ("word_1_2", NGramSpec::word(1, 2))] {
        let model = TfidfModel::fit(&docs, spec, TfidfOptions::default()).unwrap();
        let idf: BTreeMap<String, f64> = serde_json::from_value(oracle[key]["idf"].clone()).unwrap();
        if idf.len() != model.dim() {
            key_mismatch += 1;
        }
        for (term, want) in &idf {
            match model.vocab.get(term) {
                Some(i) => worst = worst.max((model.idf[i] - want).abs()),
                None => key_mismatch += 1,
            }
        }
        for (doc, row) in docs.iter().zip(oracle[key]["rows"].as_array().unwrap()) {
            let want: BTreeMap<String, f64> = serde_json::from_value(row.clone()).unwrap();
            let v = model.transform(doc);
            let got: BTreeMap<String, f64> = v.iter().map(|(i, x)| (model.vocab.term(i).to_string(), x)).collect();
            if got.keys().ne(want.keys()) {
                key_mismatch += 1;
            }
            for (term, w) in &want {
                worst = worst.max((got.get(term).copied().unwrap_or(0.0) - w).abs());
            }
            if !v.is_empty() {
                worst_norm = worst_norm.max((v.norm() - 1.0).abs());
            }
        }
    }
    let pass = worst <= TFIDF_TOL && worst_norm <= TFIDF_TOL && key_mismatch == 0;
    report(
        2,
        "tf-idf oracle equivalence",
        pass,
        format!("max |diff| {worst:.2e}, max |norm-1| {worst_norm:.2e}, term mismatches {key_mismatch}"),
    );
    assert!(pass);
}

// ---------------------------------------------------------------------------

#[test]
fn c03_char_ngram_count_law() {
    const ALPHABET: &[char] = &['a', 'b', 'z', 'Q', ' ', ' ', '7', '!', 'ह', 'ै', 'ব', 'é'];
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut failures = 0;
    for _ in 0..200 {
        let len = rng.gen_range(0..40);
        let s: String = (0..len).map(|_| ALPHABET[rng.gen_range(0..ALPHABET.len())]).collect();
        let total: usize = extract_ngrams(&s, &NGramSpec::char(2, 6)).values().sum();
        let l = s.chars().count();
        let expected: usize = (2..=6).map(|n| (l + 1).saturating_sub(n)).sum();
        if total != expected {
            failures += 1;
        }
    }
    report(
        3,
        "n-gram count law",
        failures == 0,
        format!("{failures}/200 strings violate the law"),
    );
    assert_eq!(failures, 0);
}

// ---------------------------------------------------------------------------

/// 25 points on either side of a random line, at least `gap` away from it.
fn separable_set(rng: &mut ChaCha8Rng, gap: f64) -> (Vec<SparseVector>, Vec<i8>) {
    let angle: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
    let (nx, ny) = (angle.cos(), angle.sin());
    let offset: f64 = rng.gen_range(-1.0..1.0);
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    while xs.len() < 25 {
        let p = [rng.gen_range(-4.0..4.0), rng.gen_range(-4.0..4.0)];
        let side = nx * p[0] + ny * p[1] - offset;
        if side.abs() < gap {
            continue;
        }
        let y = if side > 0.0 { 1 } else { -1 };
        if xs.len() == 24 && !ys.contains(&-y) {
            continue;
        }
        xs.push(SparseVector::from_dense(&p));
        ys.push(y);
    }
    (xs, ys)
}

#[test]
fn c04_svm_separable_sets() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let params = SvmParams::default();
    let (mut perfect, mut monotone, mut boxed) = (0, 0, 0);
    for set in 0..20 {
        let (xs, ys) = separable_set(&mut rng, 1.0);
        let m = train_svm_binary(&xs, &ys, &params, set).unwrap();
        let correct = xs
            .iter()
            .zip(&ys)
            .filter(|(x, &y)| (m.decision(x).unwrap() > 0.0) == (y > 0))
            .count();
        perfect += usize::from(correct == xs.len());
        monotone += usize::from(
            m.dual_trace
                .windows(2)
                .all(|w| w[1] >= w[0] - DUAL_MONOTONE_TOL * w[0].abs().max(1.0)),
        );
        boxed += usize::from(m.alphas.iter().all(|&a| (0.0..=params.c).contains(&a)));
    }
    let pass = perfect == 20 && monotone == 20 && boxed == 20;
    report(
        4,
        "svm separable training",
        pass,
        format!("100% accuracy {perfect}/20, non-decreasing dual {monotone}/20, alpha in [0,C] {boxed}/20"),
    );
    assert!(pass);
}

// ---------------------------------------------------------------------------

fn random_sparse(rng: &mut ChaCha8Rng, dim: usize) -> SparseVector {
    let d: Vec<f64> = (0..dim)
        .map(|_| {
            if rng.gen_bool(0.5) {
                0.0
            } else {
                rng.gen_range(-1.0..1.0)
            }
        })
        .collect();
    SparseVector::from_dense(&d)
}

#[test]
fn c05_gradient_checks() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let labels: Vec<Sentiment> = (0..8).map(|i| class(i % 3)).collect();
    let xs: Vec<SparseVector> = (0..8).map(|_| random_sparse(&mut rng, 5)).collect();

    let mut lr = LogRegModel::zeros(5, 0.01);
    let p: Vec<f64> = (0..lr.params().len()).map(|_| rng.gen_range(-1.0..1.0)).collect();
    lr.set_params(&p);
    let (_, g) = lr.loss_and_grad(&xs, &labels).unwrap();
    let lr_err = gradient_check(
        |q| {
            let mut m = lr.clone();
            m.set_params(q);
            m.loss_and_grad(&xs, &labels).unwrap().0
        },
        &g,
        &p,
        FD_EPS,
    )
    .unwrap();

    // dropout off: no generator is passed
    let mlp = MlpModel::init(5, 6, 0.3, &mut rng);
    let refs: Vec<&SparseVector> = xs.iter().collect();
    let (_, g) = mlp.loss_and_grad(&refs, &labels, None).unwrap();
    let mlp_err = gradient_check(
        |q| {
            let mut m = mlp.clone();
            m.assign(q);
            m.loss_and_grad(&refs, &labels, None).unwrap().0
        },
        &g.flatten(),
        &mlp.flatten(),
        FD_EPS,
    )
    .unwrap();

    let mut cell = LstmCell::zeros(4, 3);
    let p: Vec<f64> = (0..cell.n_params()).map(|_| rng.gen_range(-0.8..0.8)).collect();
    cell.assign(&p);
    let x: Vec<f64> = (0..4).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let hp: Vec<f64> = (0..3).map(|_| rng.gen_range(-0.9..0.9)).collect();
    let cp: Vec<f64> = (0..3).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let rh: Vec<f64> = (0..3).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let rc: Vec<f64> = (0..3).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let (g, _, _) = cell.step_vjp(&x, &hp, &cp, &rh, &rc).unwrap();
    let cell_err = gradient_check(
        |q| {
            let mut c = cell.clone();
            c.assign(q);
            let (h, cc) = codemix::neural::lstm_step(&c, &x, &hp, &cp).unwrap();
            h.iter().zip(&rh).map(|(a, b)| a * b).sum::<f64>() + cc.iter().zip(&rc).map(|(a, b)| a * b).sum::<f64>()
        },
        &g.flatten(),
        &p,
        FD_EPS,
    )
    .unwrap();

    // two tokens, three units per direction, two samples
    let mut bi = BiLstmModel::zeros(4, 3);
    let p: Vec<f64> = (0..bi.n_params()).map(|_| rng.gen_range(-0.8..0.8)).collect();
    bi.assign(&p);
    let seqs: Vec<PaddedSequence> = (0..2)
        .map(|_| {
            let rows: Vec<Vec<f64>> = (0..2)
                .map(|_| (0..4).map(|_| rng.gen_range(-1.0..1.0)).collect())
                .collect();
            PaddedSequence::from_rows(&rows, 4, 5)
        })
        .collect();
    let seq_refs: Vec<&PaddedSequence> = seqs.iter().collect();
    let ys = [Sentiment::Neutral, Sentiment::Positive];
    let (_, g) = bi.loss_and_grad(&seq_refs, &ys).unwrap();
    let bptt_err = gradient_check(
        |q| {
            let mut m = bi.clone();
            m.assign(q);
            m.loss_and_grad(&seq_refs, &ys).unwrap().0
        },
        &g.flatten(),
        &p,
        FD_EPS,
    )
    .unwrap();

    let elapsed = start.elapsed();
    let pass = lr_err < LOGREG_GRAD_TOL
        && mlp_err < NEURAL_GRAD_TOL
        && cell_err < NEURAL_GRAD_TOL
        && bptt_err < NEURAL_GRAD_TOL
        && elapsed < GRAD_BUDGET;
    report(
        5,
        "gradient checks",
        pass,
        format!(
            "logreg {lr_err:.2e}, mlp {mlp_err:.2e}, lstm cell {cell_err:.2e}, bi-lstm bptt {bptt_err:.2e}, {elapsed:.2?}"
        ),
    );
    assert!(pass);
}

// ---------------------------------------------------------------------------

/// 50 distinct inputs drawn from one of several shapes, with random labels.
fn memorization_set(rng: &mut ChaCha8Rng, shape: usize) -> (Vec<SparseVector>, Vec<Sentiment>) {
    let mut seen = BTreeSet::new();
    let mut xs = Vec::new();
    while xs.len() < 50 {
        let d: Vec<f64> = match shape {
            0 => (0..4).map(|_| rng.gen_range(-1.0..1.0)).collect(),
            1 => (0..12).map(|_| f64::from(rng.gen_bool(0.2) as u8)).collect(),
            2 => (0..3).map(|_| rng.gen_range(0..4) as f64).collect(),
            _ => (0..30)
                .map(|_| {
                    if rng.gen_bool(0.9) {
                        0.0
                    } else {
                        rng.gen_range(0.0..1.0)
                    }
                })
                .collect(),
        };
        let key: Vec<u64> = d.iter().map(|v| v.to_bits()).collect();
        if seen.insert(key) {
            xs.push(SparseVector::from_dense(&d));
        }
    }
    let ys = (0..50).map(|_| class(rng.gen_range(0..3))).collect();
    (xs, ys)
}

#[test]
fn c06_forest_memorization() {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let params = ForestParams {
        n_trees: 1,
        bootstrap: false,
        ..Default::default()
    };
    let (mut perfect, mut sets, mut worst_sum) = (0, 0, 0.0f64);
    for shape in 0..4 {
        for rep in 0..5 {
            let (xs, ys) = memorization_set(&mut rng, shape);
            let forest = fit_forest(&xs, &ys, &params, rep).unwrap();
            let mut correct = 0;
            for (x, &y) in xs.iter().zip(&ys) {
                let (label, probs) = forest.predict_proba(x).unwrap();
                correct += usize::from(label == y);
                worst_sum = worst_sum.max((probs.iter().sum::<f64>() - 1.0).abs());
            }
            perfect += usize::from(correct == xs.len());
            sets += 1;
        }
    }
    let pass = perfect == sets && worst_sum <= PROB_SUM_TOL;
    report(
        6,
        "forest memorization",
        pass,
        format!("100% training accuracy on {perfect}/{sets} sets, max |row sum - 1| {worst_sum:.2e}"),
    );
    assert!(pass);
}

// ---------------------------------------------------------------------------

fn random_probs(rng: &mut ChaCha8Rng, dyadic: bool) -> ClassProbs {
    if dyadic {
        // multiples of 1/8 add exactly, so ties in the sum are real ties
        let a = rng.gen_range(0..=8);
        let b = rng.gen_range(0..=8 - a);
        [a as f64 / 8.0, b as f64 / 8.0, (8 - a - b) as f64 / 8.0]
    } else {
        let raw: [f64; 3] = [rng.gen(), rng.gen(), rng.gen()];
        let s: f64 = raw.iter().sum();
        raw.map(|v| v / s)
    }
}

fn brute_vote(members: &[ClassProbs]) -> Sentiment {
    let sums: Vec<f64> = (0..3).map(|k| members.iter().map(|m| m[k]).sum()).collect();
    let best = sums.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    // canonical order is ascending class value, so the first maximum wins
    class(sums.iter().position(|&s| s == best).unwrap())
}

#[test]
fn c07_soft_voting_matches_brute_force() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let (mut agree, mut ties) = (0, 0);
    for i in 0..1000 {
        let members: Vec<ClassProbs> = (0..3).map(|_| random_probs(&mut rng, i % 2 == 0)).collect();
        let sums: Vec<f64> = (0..3).map(|k| members.iter().map(|m| m[k]).sum()).collect();
        let best = sums.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        ties += usize::from(sums.iter().filter(|&&s| s == best).count() > 1);
        agree += usize::from(soft_vote(&members).0 == brute_vote(&members));
    }

    // a fitted ensemble must agree with the brute-force vote of its members
    let mut rng = ChaCha8Rng::seed_from_u64(70);
    let xs: Vec<SparseVector> = (0..30).map(|_| random_sparse(&mut rng, 6)).collect();
    let ys: Vec<Sentiment> = (0..30).map(|i| class(i % 3)).collect();
    let params = VotingParams {
        forest: ForestParams {
            n_trees: 10,
            ..Default::default()
        },
        ..Default::default()
    };
    let ens = fit_voting(&xs, &ys, &params, 7).unwrap();
    let fitted_agree = xs
        .iter()
        .filter(|x| ens.predict(x).unwrap().0 == brute_vote(&ens.member_probs(x).unwrap()))
        .count();

    let pass = agree == 1000 && ties > 0 && fitted_agree == xs.len();
    report(
        7,
        "soft voting",
        pass,
        format!(
            "{agree}/1000 triples agree ({ties} exact ties), fitted ensemble {fitted_agree}/{}",
            xs.len()
        ),
    );
    assert!(pass);
}

// ---------------------------------------------------------------------------

fn write_synth(dir: &std::path::Path, n: usize, seed: u64) -> std::path::PathBuf {
    let path = dir.join(format!("synth_{n}_{seed}.json"));
    let cfg = SynthConfig {
        n_samples: n,
        ..Default::default()
    };
    std::fs::write(&path, write_corpus(&synth_corpus(&cfg, seed))).unwrap();
    path
}

#[test]
fn c08_end_to_end_determinism() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = write_synth(dir.path(), 1000, 42);
    let mut identical = Vec::new();
    for preset in ["model1", "model2"] {
        let cfg = resolve_preset(preset).unwrap();
        assert_eq!(cfg.seed, 42);
        let mut artifacts = Vec::new();
        let mut predictions = Vec::new();
        for run in 0..2 {
            let model = dir.path().join(format!("{preset}_{run}.json"));
            let pred = dir.path().join(format!("{preset}_{run}_pred.json"));
            run_train(&cfg, &corpus, &model).unwrap();
            run_predict(&model, &corpus, &pred).unwrap();
            artifacts.push(std::fs::read(&model).unwrap());
            predictions.push(std::fs::read(&pred).unwrap());
        }
        identical.push((preset, artifacts[0] == artifacts[1], predictions[0] == predictions[1]));
    }
    let pass = identical.iter().all(|&(_, a, p)| a && p);
    report(
        8,
        "determinism",
        pass,
        identical
            .iter()
            .map(|(name, a, p)| format!("{name}: artifact identical {a}, predictions identical {p}"))
            .collect::<Vec<_>>()
            .join("; "),
    );
    assert!(pass);
}

// ---------------------------------------------------------------------------

#[test]
fn c09_split_sizes() {
    let arithmetic = [(12936, 10995, 1941), (2500, 2125, 375)];
    let mut ok = arithmetic
        .iter()
        .all(|&(n, tr, dv)| train_size(n, 0.85) == tr && n - train_size(n, 0.85) == dv);

    let cfg = SynthConfig {
        n_samples: 2500,
        ..Default::default()
    };
    let ds = synth_corpus(&cfg, 9);
    let (train_part, dev_part) = split_dataset(&ds, 0.85, 42).unwrap();
    ok &= train_part.len() == 2125 && dev_part.len() == 375;
    let artifact = train(&resolve_preset("model2").unwrap(), &ds).unwrap();
    ok &= artifact.train_size == 2125 && artifact.dev_size == 375;
    report(
        9,
        "split fidelity",
        ok,
        format!(
            "12936 -> {}/{}, 2500 -> {}/{}, pipeline reports {}/{}",
            train_size(12936, 0.85),
            12936 - train_size(12936, 0.85),
            train_part.len(),
            dev_part.len(),
            artifact.train_size,
            artifact.dev_size
        ),
    );
    assert!(ok);
}

// ---------------------------------------------------------------------------

#[test]
fn c10_char_ngrams_beat_word_unigrams() {
    let start = Instant::now();
    let mut wins = 0;
    let mut lines = Vec::new();
    for seed in [1u64, 2, 3] {
        let ds = synth_corpus(&SynthConfig::default(), seed);
        let score = |features| {
            let cfg = ExperimentConfig {
                model: ModelKind::Svm,
                features,
                seed,
                ..Default::default()
            };
            train(&cfg, &ds).unwrap().dev_report.overall.f1
        };
        let ch = score(FeatureSpec::CharNgram { min_n: 2, max_n: 6 });
        let wd = score(FeatureSpec::WordNgram { min_n: 1, max_n: 1 });
        wins += usize::from(ch >= wd);
        lines.push(format!("seed {seed}: char(2,6) {ch:.3} vs word(1,1) {wd:.3}"));
    }
    let elapsed = start.elapsed();
    let pass = wins >= 2 && elapsed < DIRECTIONAL_BUDGET;
    report(
        10,
        "directional char vs word",
        pass,
        format!("{} ; char wins {wins}/3, {elapsed:.2?}", lines.join("; ")),
    );
    assert!(pass);
}

// ---------------------------------------------------------------------------

/// Ten sentences whose class is marked by one of a few tokens.
fn toy_texts() -> Vec<(&'static str, Sentiment)> {
    vec![
        ("film bahut acha laga", Sentiment::Positive),
        ("acha hai yaar", Sentiment::Positive),
        ("gaana mast tha", Sentiment::Positive),
        ("mast din", Sentiment::Positive),
        ("film bahut bura laga", Sentiment::Negative),
        ("bura hai yaar", Sentiment::Negative),
        ("gaana bakwas tha", Sentiment::Negative),
        ("film kal dekhi", Sentiment::Neutral),
        ("gaana aaj suna", Sentiment::Neutral),
        ("din hai yaar", Sentiment::Neutral),
    ]
}

#[test]
fn c11_neural_toy_overfit() {
    let texts = toy_texts();
    let labels: Vec<Sentiment> = texts.iter().map(|t| t.1).collect();

    let raw: Vec<&str> = texts.iter().map(|t| t.0).collect();
    let tfidf = TfidfModel::fit(&raw, NGramSpec::word(1, 1), TfidfOptions::default()).unwrap();
    let xs = tfidf.transform_all(&raw);
    let mlp_params = MlpParams {
        epochs: TOY_EPOCHS,
        ..Default::default()
    };
    let mut mlp_epoch = None;
    let mlp = train_mlp_with(&xs, &labels, &mlp_params, 11, |epoch, m| {
        if xs.iter().zip(&labels).all(|(x, &y)| m.predict(x).unwrap().0 == y) {
            mlp_epoch = Some(epoch + 1);
            EpochControl::Stop
        } else {
            EpochControl::Continue
        }
    })
    .unwrap();
    let mlp_acc = xs
        .iter()
        .zip(&labels)
        .filter(|(x, &y)| mlp.predict(x).unwrap().0 == y)
        .count();

    let mut rng = ChaCha8Rng::seed_from_u64(111);
    let mut table = EmbeddingTable::new(8);
    for word in raw.iter().flat_map(|t| t.split(' ')) {
        if table.get(word).is_none() {
            table
                .insert(word, (0..8).map(|_| rng.gen_range(-1.0..1.0)).collect())
                .unwrap();
        }
    }
    let seqs: Vec<PaddedSequence> = raw
        .iter()
        .map(|t| sequence_embedding(&t.split(' ').collect::<Vec<_>>(), &table, 8))
        .collect();
    let lstm_params = BiLstmParams {
        epochs: TOY_EPOCHS,
        ..Default::default()
    };
    let mut lstm_epoch = None;
    let lstm = train_bilstm_with(&seqs, &labels, &lstm_params, 12, |epoch, m| {
        if seqs.iter().zip(&labels).all(|(s, &y)| m.predict(s).unwrap().0 == y) {
            lstm_epoch = Some(epoch + 1);
            EpochControl::Stop
        } else {
            EpochControl::Continue
        }
    })
    .unwrap();
    let lstm_acc = seqs
        .iter()
        .zip(&labels)
        .filter(|(s, &y)| lstm.predict(s).unwrap().0 == y)
        .count();

    let pass = mlp_acc == 10 && lstm_acc == 10 && mlp_params.lr == 0.001 && lstm_params.lr == 0.01;
    report(
        11,
        "neural toy overfit",
        pass,
        format!(
            "mlp {mlp_acc}/10 (lr {}, epochs used {mlp_epoch:?}), bi-lstm {lstm_acc}/10 (lr {}, epochs used {lstm_epoch:?})",
            mlp_params.lr, lstm_params.lr
        ),
    );
    assert!(pass);
}

// ---------------------------------------------------------------------------

#[test]
fn c12_io_contract() {
    let dir = tempfile::tempdir().unwrap();
    let corpus_path = write_synth(dir.path(), 300, 12);
    let mut valid = 0;
    let mut runs = 0;
    for (model, features) in [
        (ModelKind::Svm, FeatureSpec::CharNgram { min_n: 2, max_n: 6 }),
        (ModelKind::Logreg, FeatureSpec::WordNgram { min_n: 1, max_n: 2 }),
        (ModelKind::Mlp, FeatureSpec::WordNgram { min_n: 1, max_n: 1 }),
    ] {
        let cfg = ExperimentConfig {
            model,
            features,
            ..Default::default()
        };
        let model_path = dir.path().join(format!("{model}.json"));
        let pred_path = dir.path().join(format!("{model}_pred.json"));
        run_train(&cfg, &corpus_path, &model_path).unwrap();
        // unlabeled input, ids out of order
        let mut test = synth_corpus(
            &SynthConfig {
                n_samples: 40,
                ..Default::default()
            },
            99,
        );
        test.samples.reverse();
        for s in &mut test.samples {
            s.id += 10_000;
            s.label = None;
        }
        let test_path = dir.path().join("test.json");
        std::fs::write(&test_path, write_corpus(&test)).unwrap();
        for input in [&corpus_path, &test_path] {
            let bytes = run_predict(&model_path, input, &pred_path).unwrap();
            let ds: Dataset = codemix::pipeline::read_corpus(input).unwrap();
            let ids: BTreeSet<i64> = ds.ids().into_iter().collect();
            valid += usize::from(validate_predictions(&ids, &bytes).unwrap().is_valid());
            runs += 1;
        }
        let artifact = load_model(&model_path).unwrap();
        assert_eq!(
            predict_corpus(&artifact, &test).unwrap(),
            std::fs::read(&pred_path).unwrap()
        );
    }

    let gold = br#"[{"id":1,"text":"a","sentiment":1},{"id":2,"text":"b","sentiment":1},
                    {"id":3,"text":"c","sentiment":0},{"id":4,"text":"d","sentiment":-1}]"#;
    let pred = br#"[{"id":1,"sentiment":1},{"id":2,"sentiment":0},{"id":3,"sentiment":0},{"id":4,"sentiment":-1}]"#;
    let report_ = evaluate_files(gold, pred).unwrap();
    let f1 = report_.overall.f1;
    let rendered = report_.to_string().contains("0.778");

    let pass = valid == runs && (f1 - FIXTURE_F1).abs() <= FIXTURE_F1_TOL && rendered;
    report(
        12,
        "i/o contract",
        pass,
        format!("{valid}/{runs} prediction files valid, fixture overall F1 {f1:.4} (rendered 0.778: {rendered})"),
    );
    assert!(pass);
}
