//! Loading word vectors from text, averaging them per sentence and building
//! padded sequences for the recurrent model.
//!
//! cargo run --example embeddings_average

use codemix::embeddings::{average_embedding, load_embeddings, sequence_embedding};
use codemix::features::tokenize;

fn main() -> codemix::error::Result<()> {
    let text = "acha 0.9 0.1 0.0\nbura -0.8 0.2 0.1\nmovie 0.0 0.5 0.5\n";
    let table = load_embeddings(text.as_bytes())?;
    println!("{} words, dim {}", table.len(), table.dim());

    for sentence in ["acha movie", "bura movie yaar", "kuch nahi"] {
        let tokens = tokenize(sentence);
        let avg = average_embedding(&tokens, &table);
        println!("{sentence:<18} avg = {avg:.3?}");
    }

    let seq = sequence_embedding(&tokenize("bura movie yaar"), &table, 5);
    println!("\nsequence of {} real tokens, mask {:?}", seq.len(), seq.mask());
    for t in 0..seq.max_len() {
        println!("  row {t}: {:?}", seq.row(t));
    }
    Ok(())
}
