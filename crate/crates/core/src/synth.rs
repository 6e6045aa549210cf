//! Synthetic code-mixed corpus with romanized spelling noise.
//!
//! Sentiment is carried by a small set of word stems. Every occurrence of a
//! stem is respelled at random (vowel doubling, dropped final vowel, an `h`
//! after a consonant, a stretched last letter), and neighbouring tokens are
//! sometimes glued together, as happens in informal romanized text. Word
//! unigrams therefore see many rare surface forms of the same stem while
//! character n-grams still share most of their substrings.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::corpus::{Dataset, Sample};
use crate::embeddings::{load_embeddings, EmbeddingTable};
use crate::error::Result;
use crate::sentiment::Sentiment;

const POSITIVE: &[&str] = &[
    "acha",
    "badhiya",
    "mast",
    "khushi",
    "pyaar",
    "shandaar",
    "zabardast",
    "sundar",
    "love",
    "great",
];
const NEGATIVE: &[&str] = &[
    "bura", "bekaar", "ghatiya", "dukhi", "nafrat", "bakwas", "gussa", "pagal", "hate", "worst",
];
const NEUTRAL: &[&str] = &["shayad", "kab", "kaun", "pata", "news", "update", "kal", "time"];
const FILLER_HI: &[&str] = &[
    "aaj", "yeh", "woh", "tha", "hai", "main", "tum", "yaar", "bhai", "sab", "phir", "kuch", "bahut", "dekha",
];
const FILLER_EN: &[&str] = &[
    "movie", "match", "the", "is", "was", "today", "song", "team", "game", "video",
];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SynthConfig {
    pub n_samples: usize,
    /// Probability that a stem occurrence is respelled.
    pub variation: f64,
    /// Probability that a token is glued to its successor.
    pub agglutination: f64,
    /// Probability of adding one stem from a different class.
    pub distractor: f64,
    /// Probability that a label is replaced by a uniformly drawn one.
    pub label_noise: f64,
    pub language_pair: String,
}

impl Default for SynthConfig {
    fn default() -> Self {
        SynthConfig {
            n_samples: 1000,
            variation: 0.7,
            agglutination: 0.2,
            distractor: 0.25,
            label_noise: 0.05,
            language_pair: "Hi-En".into(),
        }
    }
}

fn is_vowel(c: char) -> bool {
    matches!(c, 'a' | 'e' | 'i' | 'o' | 'u')
}

/// One random romanized respelling of `word`; may return `word` unchanged.
pub fn respell(word: &str, rng: &mut ChaCha8Rng) -> String {
    let mut chars: Vec<char> = word.chars().collect();
    let n_edits = rng.gen_range(1..=2);
    for _ in 0..n_edits {
        match rng.gen_range(0..4) {
            0 => {
                let vowels: Vec<usize> = (0..chars.len()).filter(|&i| is_vowel(chars[i])).collect();
                if let Some(&i) = vowels.choose(rng) {
                    chars.insert(i, chars[i]);
                }
            }
            1 => {
                if chars.len() > 3 && chars.last().copied().is_some_and(is_vowel) {
                    chars.pop();
                }
            }
            2 => {
                let spots: Vec<usize> = (0..chars.len())
                    .filter(|&i| matches!(chars[i], 'k' | 'd' | 't' | 'g' | 'b' | 'p' | 's'))
                    .filter(|&i| chars.get(i + 1) != Some(&'h'))
                    .collect();
                if let Some(&i) = spots.choose(rng) {
                    chars.insert(i + 1, 'h');
                }
            }
            _ => {
                if let Some(&last) = chars.last() {
                    for _ in 0..rng.gen_range(1..=3) {
                        chars.push(last);
                    }
                }
            }
        }
    }
    chars.into_iter().collect()
}

fn stems(class: Sentiment) -> &'static [&'static str] {
    match class {
        Sentiment::Negative => NEGATIVE,
        Sentiment::Neutral => NEUTRAL,
        Sentiment::Positive => POSITIVE,
    }
}

fn tag(word: &str) -> &'static str {
    if FILLER_EN.contains(&word) || ["love", "great", "hate", "worst", "news", "update", "time"].contains(&word) {
        "EN"
    } else {
        "HI"
    }
}

/// Generates a labeled corpus with ids `1..=n_samples`, classes drawn
/// uniformly.
pub fn synth_corpus(config: &SynthConfig, seed: u64) -> Dataset {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut samples = Vec::with_capacity(config.n_samples);
    for id in 1..=config.n_samples {
        let class = Sentiment::from_index(rng.gen_range(0..3));
        // (canonical word, is a stem)
        let mut words: Vec<(&str, bool)> = Vec::new();
        for _ in 0..rng.gen_range(3..=8) {
            let pool = if rng.gen_bool(0.5) { FILLER_HI } else { FILLER_EN };
            words.push((pool.choose(&mut rng).unwrap(), false));
        }
        for _ in 0..rng.gen_range(1..=2) {
            words.push((stems(class).choose(&mut rng).unwrap(), true));
        }
        if rng.gen_bool(config.distractor) {
            let other = Sentiment::from_index((class.index() + rng.gen_range(1..3)) % 3);
            words.push((stems(other).choose(&mut rng).unwrap(), true));
        }
        words.shuffle(&mut rng);

        let mut surface: Vec<String> = Vec::with_capacity(words.len());
        let mut tagged: Vec<String> = Vec::with_capacity(words.len());
        for &(w, stem) in &words {
            let form = if stem && rng.gen_bool(config.variation) {
                respell(w, &mut rng)
            } else {
                w.to_string()
            };
            tagged.push(format!("{form}\\{}", tag(w)));
            surface.push(form);
        }
        let mut text = String::new();
        for (i, tok) in surface.iter().enumerate() {
            text.push_str(tok);
            if i + 1 < surface.len() && !rng.gen_bool(config.agglutination) {
                text.push(' ');
            }
        }
        let label = if rng.gen_bool(config.label_noise) {
            Sentiment::from_index(rng.gen_range(0..3))
        } else {
            class
        };
        samples.push(Sample {
            id: id as i64,
            text,
            lang_tagged_text: Some(tagged.join(" ")),
            label: Some(label),
        });
    }
    Dataset {
        samples,
        language_pair: Some(config.language_pair.clone()),
    }
}

/// A word-vector file in the usual `word v1 ... vd` text layout. Stems of
/// one class cluster around a shared direction; every stem also gets a few
/// respelled variants, and fillers are random.
pub fn synth_embeddings_text(dim: usize, seed: u64) -> String {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let centers: Vec<Vec<f64>> = (0..3)
        .map(|_| (0..dim).map(|_| rng.gen_range(-1.0..1.0)).collect())
        .collect();
    let mut lines: Vec<(String, Vec<f64>)> = Vec::new();
    for class in Sentiment::ALL {
        for &stem in stems(class) {
            let mut forms = vec![stem.to_string()];
            forms.extend((0..3).map(|_| respell(stem, &mut rng)));
            for form in forms {
                let v = centers[class.index()]
                    .iter()
                    .map(|c| 0.7 * c + rng.gen_range(-0.3..0.3))
                    .collect();
                lines.push((form, v));
            }
        }
    }
    for &w in FILLER_HI.iter().chain(FILLER_EN) {
        lines.push((w.to_string(), (0..dim).map(|_| rng.gen_range(-0.5..0.5)).collect()));
    }
    lines.sort_by(|a, b| a.0.cmp(&b.0));
    lines.dedup_by(|a, b| a.0 == b.0);
    let mut out = String::new();
    for (w, v) in lines {
        out.push_str(&w);
        for x in v {
            out.push_str(&format!(" {x:.6}"));
        }
        out.push('\n');
    }
    out
}

pub fn synth_embeddings(dim: usize, seed: u64) -> Result<EmbeddingTable> {
    load_embeddings(synth_embeddings_text(dim, seed).as_bytes())
}
