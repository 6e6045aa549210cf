//! Character and word n-gram TF-IDF vectors for a few code-mixed sentences.
//!
//! cargo run --example tfidf_features

use codemix::features::{extract_ngrams, fit_tfidf, tokenize, NGramSpec};

fn main() -> codemix::error::Result<()> {
    let corpus = [
        "yeh movie bahut acchi thi",
        "movie bahut bakwas thi yaar",
        "kal match dekha, team ne acha khela",
    ];

    println!("tokens: {:?}", tokenize(corpus[0]));
    let grams = extract_ngrams("acchi", &NGramSpec::char(2, 3));
    println!("char 2-3 grams of 'acchi': {grams:?}");

    for spec in [NGramSpec::word(1, 2), NGramSpec::char(2, 6)] {
        let model = fit_tfidf(&corpus, spec)?;
        println!("\n{spec:?}: vocabulary of {} terms", model.dim());
        for text in corpus {
            let v = model.transform(text);
            let mut top: Vec<(usize, f64)> = v.iter().collect();
            top.sort_by(|a, b| b.1.total_cmp(&a.1));
            let shown: Vec<String> = top
                .iter()
                .take(3)
                .map(|&(i, w)| format!("{}={w:.3}", model.vocab.term(i)))
                .collect();
            println!(
                "  {text:<38} nnz={:<4} norm={:.3} top: {}",
                v.nnz(),
                v.norm(),
                shown.join(" ")
            );
        }
    }
    Ok(())
}
