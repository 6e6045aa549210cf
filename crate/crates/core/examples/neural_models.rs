//! A sparse-input MLP and a Bi-LSTM over word vectors, both trained with a
//! per-epoch callback that logs progress and stops early on a plateau.
//!
//! cargo run --release --example neural_models

use codemix::corpus::split_dataset;
use codemix::embeddings::sequence_embedding;
use codemix::features::{fit_tfidf, tokenize, NGramSpec};
use codemix::metrics::evaluate;
use codemix::neural::{train_bilstm_with, train_mlp_with, BiLstmParams, EarlyStopping, EpochControl, MlpParams};
use codemix::synth::{synth_corpus, synth_embeddings, SynthConfig};

fn main() -> codemix::error::Result<()> {
    let corpus = synth_corpus(
        &SynthConfig {
            n_samples: 600,
            ..Default::default()
        },
        5,
    );
    let (train, dev) = split_dataset(&corpus, 0.85, 5)?;
    let (y_train, y_dev) = (train.labels()?, dev.labels()?);

    let tfidf = fit_tfidf(&train.texts(), NGramSpec::word(1, 2))?;
    let xs = tfidf.transform_all(&train.texts());
    let dev_x = tfidf.transform_all(&dev.texts());
    let params = MlpParams {
        epochs: 20,
        ..Default::default()
    };
    let mut early = EarlyStopping::new(3);
    let mlp = train_mlp_with(&xs, &y_train, &params, 5, |epoch, model| {
        let pred: Vec<_> = dev_x.iter().map(|x| model.predict(x).unwrap().0).collect();
        let f1 = evaluate(&y_dev, &pred).unwrap().overall.f1;
        println!("mlp epoch {epoch:>2}: dev F1 {f1:.3}");
        early.update(f1)
    })?;
    let pred = dev_x
        .iter()
        .map(|x| mlp.predict(x).map(|(s, _)| s))
        .collect::<Result<Vec<_>, _>>()?;
    print!("{}", evaluate(&y_dev, &pred)?);

    let table = synth_embeddings(16, 5)?;
    let seqs = |texts: Vec<&str>| -> Vec<_> {
        texts
            .into_iter()
            .map(|t| sequence_embedding(&tokenize(t), &table, 24))
            .collect()
    };
    let (train_seq, dev_seq) = (seqs(train.texts()), seqs(dev.texts()));
    let params = BiLstmParams {
        units: 16,
        epochs: 5,
        ..Default::default()
    };
    let lstm = train_bilstm_with(&train_seq, &y_train, &params, 5, |epoch, _| {
        println!("bi-lstm epoch {epoch} done");
        EpochControl::Continue
    })?;
    let pred = dev_seq
        .iter()
        .map(|s| lstm.predict(s).map(|(p, _)| p))
        .collect::<Result<Vec<_>, _>>()?;
    print!("{}", evaluate(&y_dev, &pred)?);
    Ok(())
}
