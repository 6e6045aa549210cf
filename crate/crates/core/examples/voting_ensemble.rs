//! Soft voting over SVM, logistic regression and a random forest, showing
//! each member's distribution next to the combined one.
//!
//! cargo run --release --example voting_ensemble

use codemix::corpus::split_dataset;
use codemix::ensemble::{fit_voting, VotingParams};
use codemix::features::{fit_tfidf, NGramSpec};
use codemix::metrics::evaluate;
use codemix::synth::{synth_corpus, SynthConfig};

fn main() -> codemix::error::Result<()> {
    let corpus = synth_corpus(&SynthConfig::default(), 11);
    let (train, dev) = split_dataset(&corpus, 0.85, 11)?;
    let tfidf = fit_tfidf(&train.texts(), NGramSpec::char(2, 6))?;
    let xs = tfidf.transform_all(&train.texts());

    let mut params = VotingParams::default();
    params.forest.n_trees = 30;
    let ensemble = fit_voting(&xs, &train.labels()?, &params, 11)?;

    let dev_x = tfidf.transform_all(&dev.texts());
    let fmt = |p: &[f64; 3]| format!("[{:.2} {:.2} {:.2}]", p[0], p[1], p[2]);
    for (sample, x) in dev.samples.iter().zip(&dev_x).take(5) {
        let [svm, lr, forest] = ensemble.member_probs(x)?;
        let (label, mean) = ensemble.predict(x)?;
        println!(
            "{:<40} svm {} logreg {} forest {} => {label} {}",
            sample.text.chars().take(40).collect::<String>(),
            fmt(&svm),
            fmt(&lr),
            fmt(&forest),
            fmt(&mean)
        );
    }

    let pred = dev_x
        .iter()
        .map(|x| ensemble.predict(x).map(|(s, _)| s))
        .collect::<Result<Vec<_>, _>>()?;
    print!("\n{}", evaluate(&dev.labels()?, &pred)?);
    Ok(())
}
