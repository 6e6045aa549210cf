//! Configuration, model files and the train / predict / eval / grid
//! workflows behind the command-line tool.

mod artifact;
mod config;
mod grid;
mod model;
mod run;

pub use artifact::{load_model, save_model, ModelArtifact, FORMAT_VERSION};
pub use config::{resolve_preset, ExperimentConfig, FeatureSpec, ModelKind, PRESETS};
pub use grid::{grid, run_grid, GridReport, GridRow, GRID};
pub use model::{read_embeddings, ClassifierModel, EmbeddingRef, FeatureState, Featurizer, Inputs};
pub use run::{evaluate_files, predict_corpus, read_corpus, run_eval, run_predict, run_train, train, Predictor};
