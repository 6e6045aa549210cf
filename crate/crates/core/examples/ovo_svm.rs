//! One-vs-one linear SVM trained by dual coordinate descent on a synthetic
//! corpus, with the per-pair dual objective trace.
//!
//! cargo run --release --example ovo_svm

use codemix::corpus::split_dataset;
use codemix::features::{fit_tfidf, NGramSpec};
use codemix::linear::{train_ovo_svm, SvmParams, PAIRS};
use codemix::metrics::evaluate;
use codemix::synth::{synth_corpus, SynthConfig};

fn main() -> codemix::error::Result<()> {
    let corpus = synth_corpus(&SynthConfig::default(), 7);
    let (train, dev) = split_dataset(&corpus, 0.85, 7)?;
    let tfidf = fit_tfidf(&train.texts(), NGramSpec::char(2, 6))?;
    let xs = tfidf.transform_all(&train.texts());
    let labels = train.labels()?;

    let model = train_ovo_svm(&xs, &labels, &SvmParams::default(), 7)?;
    for ((pos, neg), m) in PAIRS.iter().zip(&model.pair_models) {
        let first = m.dual_trace.first().copied().unwrap_or(0.0);
        let last = m.dual_trace.last().copied().unwrap_or(0.0);
        println!(
            "{pos} vs {neg}: {} epochs, dual {first:.4} -> {last:.4}, converged={}, support vectors={}",
            m.dual_trace.len(),
            m.converged,
            m.alphas.iter().filter(|&&a| a > 0.0).count()
        );
    }

    let pred = tfidf
        .transform_all(&dev.texts())
        .iter()
        .map(|x| model.predict(x).map(|(s, _)| s))
        .collect::<Result<Vec<_>, _>>()?;
    print!("\n{}", evaluate(&dev.labels()?, &pred)?);
    Ok(())
}
