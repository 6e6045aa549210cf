//! The synthetic code-mixed corpus generator: spelling variation, glued
//! tokens, distractor stems and label noise.
//!
//! cargo run --example synthetic_corpus

use codemix::synth::{respell, synth_corpus, SynthConfig};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() {
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let variants: Vec<String> = (0..6).map(|_| respell("accha", &mut rng)).collect();
    println!("respellings of 'accha': {variants:?}\n");

    let clean = SynthConfig {
        n_samples: 5,
        variation: 0.0,
        agglutination: 0.0,
        distractor: 0.0,
        label_noise: 0.0,
        ..Default::default()
    };
    let noisy = SynthConfig {
        n_samples: 5,
        ..Default::default()
    };
    for (name, cfg) in [("clean", clean), ("default", noisy)] {
        println!("{name}:");
        for s in &synth_corpus(&cfg, 4).samples {
            println!(
                "  {:>2} {:>8}  {}",
                s.id,
                s.label.map_or("?".into(), |l| l.to_string()),
                s.text
            );
        }
    }
}
