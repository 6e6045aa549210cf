//! Sentiment classification for code-mixed (romanized Hindi/Bengali with
//! English) social media text.
//!
//! The crate is layered bottom-up:
//!
//! - [`corpus`]: the JSON corpus and prediction formats, seeded splits and
//!   prediction-file validation.
//! - [`features`]: tokenization, character/word n-grams and smoothed,
//!   L2-normalized TF-IDF over sparse vectors.
//! - [`embeddings`]: word-vector tables, sentence averages and padded
//!   sequences, with unknown words mapped to zero.
//! - [`linear`], [`forest`], [`ensemble`]: one-vs-one linear SVM, multinomial
//!   logistic regression, a Gini random forest and soft voting over all three.
//! - [`neural`]: a one-hidden-layer MLP and a Bi-LSTM trained from scratch,
//!   with finite-difference gradient checking.
//! - [`metrics`]: confusion matrices and macro F1 over the classes -1, 0, 1.
//! - [`pipeline`]: experiment configs, presets, model files and the
//!   train/predict/eval/grid entry points used by the `codemix` binary.
//! - [`synth`]: a synthetic code-mixed corpus for experiments without the
//!   original data.
//!
//! Every stochastic step takes an explicit seed, so a config and a corpus
//! determine the trained model byte for byte.
//!
//! ```
//! use codemix::pipeline::{resolve_preset, train, Predictor};
//! use codemix::synth::{synth_corpus, SynthConfig};
//!
//! let corpus = synth_corpus(&SynthConfig { n_samples: 200, ..Default::default() }, 1);
//! let artifact = train(&resolve_preset("model2")?, &corpus)?;
//! let labels = Predictor::from_artifact(&artifact)?.labels(&["movie bahut acchi thi"])?;
//! assert_eq!(labels.len(), 1);
//! # Ok::<(), codemix::error::Error>(())
//! ```
//!
//! Runnable walkthroughs live in `examples/`, e.g.
//! `cargo run --release --example voting_ensemble`.

pub mod corpus;
pub mod embeddings;
pub mod ensemble;
pub mod error;
pub mod features;
pub mod forest;
pub mod linear;
pub mod metrics;
pub mod neural;
pub mod pipeline;
pub mod sentiment;
pub mod synth;
