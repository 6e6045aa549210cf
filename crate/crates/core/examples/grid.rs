//! The model/feature comparison grid, first without word vectors (rows that
//! need them are skipped) and then with a synthetic vector file.
//!
//! cargo run --release --example grid

use std::fs;

use codemix::pipeline::{grid, ExperimentConfig};
use codemix::synth::{synth_corpus, synth_embeddings_text, SynthConfig};

fn main() -> codemix::error::Result<()> {
    let corpus = synth_corpus(
        &SynthConfig {
            n_samples: 500,
            ..Default::default()
        },
        1,
    );
    let mut master = ExperimentConfig::default();
    master.forest.n_trees = 20;
    master.mlp.epochs = 5;
    master.bilstm.units = 16;
    master.bilstm.epochs = 3;

    print!("{}", grid(&master, &corpus)?);

    let vectors = std::env::temp_dir().join("codemix-grid-vectors.txt");
    fs::write(&vectors, synth_embeddings_text(16, 1))?;
    master.embeddings_path = Some(vectors.to_string_lossy().into_owned());
    print!("\n{}", grid(&master, &corpus)?);
    Ok(())
}
