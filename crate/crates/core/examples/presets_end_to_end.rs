//! Train both named presets from files, save the model, reload it and label
//! new text through the high-level pipeline.
//!
//! cargo run --release --example presets_end_to_end

use std::fs;

use codemix::corpus::write_corpus;
use codemix::pipeline::{load_model, resolve_preset, run_eval, run_predict, run_train, Predictor, PRESETS};
use codemix::synth::{synth_corpus, SynthConfig};

fn main() -> codemix::error::Result<()> {
    let dir = std::env::temp_dir().join("codemix-presets");
    fs::create_dir_all(&dir)?;
    let data = dir.join("corpus.json");
    fs::write(&data, write_corpus(&synth_corpus(&SynthConfig::default(), 3)))?;

    for name in PRESETS {
        let mut config = resolve_preset(name)?;
        config.forest.n_trees = 30;
        let model_path = dir.join(format!("{name}.json"));
        let artifact = run_train(&config, &data, &model_path)?;
        println!(
            "{name}: {} + {}, dev macro F1 {:.3}",
            artifact.config.model, artifact.config.features, artifact.dev_report.overall.f1
        );

        let pred_path = dir.join(format!("{name}_pred.json"));
        run_predict(&model_path, &data, &pred_path)?;
        println!("  full-corpus macro F1 {:.3}", run_eval(&data, &pred_path)?.overall.f1);

        let predictor = Predictor::from_artifact(&load_model(&model_path)?)?;
        let texts = ["movie bahut acchi thi", "bakwas match tha yaar"];
        for (text, label) in texts.iter().zip(predictor.labels(&texts)?) {
            println!("  {text:<24} -> {label}");
        }
    }
    println!("files in {}", dir.display());
    Ok(())
}
