use std::collections::{BTreeSet, HashMap};
use std::fs;
use std::path::Path;

use super::artifact::{load_model, save_model, ModelArtifact, FORMAT_VERSION};
use super::config::ExperimentConfig;
use super::model::{read_embeddings, ClassifierModel, Featurizer};
use crate::corpus::{parse_corpus, parse_predictions, split_dataset, validate_predictions, write_predictions, Dataset};
use crate::embeddings::EmbeddingTable;
use crate::error::{Error, Result};
use crate::metrics::{evaluate, EvalReport};
use crate::sentiment::{ClassProbs, Sentiment};

/// A fitted feature extractor plus classifier, ready to label text.
pub struct Predictor {
    pub featurizer: Featurizer,
    pub classifier: ClassifierModel,
}

impl Predictor {
    /// Rebinds any word vectors the artifact refers to.
    pub fn from_artifact(artifact: &ModelArtifact) -> Result<Self> {
        Ok(Predictor {
            featurizer: Featurizer::restore(artifact.features.clone())?,
            classifier: artifact.classifier.clone(),
        })
    }

    pub fn predict(&self, texts: &[&str]) -> Result<Vec<(Sentiment, ClassProbs)>> {
        self.classifier
            .predict(&self.featurizer.transform(texts))
            .map_err(|e| match e {
                Error::Dim { expected, found } => Error::Artifact(format!(
                    "feature dimension {found} does not match the classifier's {expected}"
                )),
                other => other,
            })
    }

    pub fn labels(&self, texts: &[&str]) -> Result<Vec<Sentiment>> {
        Ok(self.predict(texts)?.into_iter().map(|(l, _)| l).collect())
    }
}

pub(crate) fn embeddings_for(config: &ExperimentConfig) -> Result<Option<EmbeddingTable>> {
    if !config.features.needs_embeddings() {
        return Ok(None);
    }
    let path = config
        .embeddings_path
        .as_deref()
        .ok_or_else(|| Error::Config(format!("{} features need embeddings_path", config.features)))?;
    read_embeddings(path).map(Some)
}

/// Fits features on `train` only, then the classifier, and scores `dev`.
pub(crate) fn fit_and_score(
    config: &ExperimentConfig,
    train: &Dataset,
    dev: &Dataset,
    table: Option<EmbeddingTable>,
    seed: u64,
) -> Result<(Predictor, EvalReport)> {
    let texts = train.texts();
    let labels = train.labels()?;
    let featurizer = Featurizer::fit(config, &texts, table)?;
    let inputs = featurizer.transform(&texts);
    let dev_inputs = featurizer.transform(&dev.texts());
    let dev_labels = dev.labels()?;
    let classifier = ClassifierModel::fit(config, &inputs, &labels, seed, Some((&dev_inputs, &dev_labels)))?;
    let pred: Vec<_> = classifier.predict(&dev_inputs)?.into_iter().map(|(s, _)| s).collect();
    let predictor = Predictor { featurizer, classifier };
    let report = evaluate(&dev_labels, &pred)?;
    Ok((predictor, report))
}

/// In-memory training: split, fit on the train part, score the dev part.
pub fn train(config: &ExperimentConfig, corpus: &Dataset) -> Result<ModelArtifact> {
    config.validate()?;
    corpus.labels()?;
    let (train, dev) = split_dataset(corpus, config.split_ratio, config.seed)?;
    let table = embeddings_for(config)?;
    let (predictor, dev_report) = fit_and_score(config, &train, &dev, table, config.seed)?;
    Ok(ModelArtifact {
        format_version: FORMAT_VERSION,
        language_pair: config.language_pair.clone().or_else(|| corpus.language_pair.clone()),
        seed: config.seed,
        config: config.clone(),
        train_size: train.len(),
        dev_size: dev.len(),
        dev_report,
        features: predictor.featurizer.state,
        classifier: predictor.classifier,
    })
}

pub fn read_corpus(path: impl AsRef<Path>) -> Result<Dataset> {
    parse_corpus(&fs::read(path)?)
}

pub fn run_train(
    config: &ExperimentConfig,
    corpus_path: impl AsRef<Path>,
    out_path: impl AsRef<Path>,
) -> Result<ModelArtifact> {
    let artifact = train(config, &read_corpus(corpus_path)?)?;
    save_model(&artifact, out_path)?;
    Ok(artifact)
}

/// Labels every sample of `corpus` in input order and returns the
/// prediction file bytes, already checked against the corpus ids.
pub fn predict_corpus(artifact: &ModelArtifact, corpus: &Dataset) -> Result<Vec<u8>> {
    let predictor = Predictor::from_artifact(artifact)?;
    let labels = predictor.labels(&corpus.texts())?;
    let ids = corpus.ids();
    let bytes = write_predictions(&ids, &labels)?;
    let report = validate_predictions(&ids.into_iter().collect(), &bytes)?;
    if !report.is_valid() {
        return Err(Error::Validation(report));
    }
    Ok(bytes)
}

pub fn run_predict(
    model_path: impl AsRef<Path>,
    corpus_path: impl AsRef<Path>,
    out_path: impl AsRef<Path>,
) -> Result<Vec<u8>> {
    let artifact = load_model(model_path)?;
    let corpus = read_corpus(corpus_path)?;
    let bytes = predict_corpus(&artifact, &corpus)?;
    fs::write(out_path, &bytes)?;
    Ok(bytes)
}

/// Scores a prediction file against gold labels. The prediction ids must
/// cover the gold ids exactly.
pub fn evaluate_files(gold_raw: &[u8], pred_raw: &[u8]) -> Result<EvalReport> {
    let gold = parse_corpus(gold_raw)?;
    let gold_labels = gold.labels()?;
    let ids: BTreeSet<i64> = gold.ids().into_iter().collect();
    let report = validate_predictions(&ids, pred_raw)?;
    if !report.is_valid() {
        return Err(Error::Validation(report));
    }
    let pred: HashMap<i64, Sentiment> = parse_predictions(pred_raw)?.into_iter().collect();
    let pred_labels: Vec<Sentiment> = gold.ids().iter().map(|id| pred[id]).collect();
    evaluate(&gold_labels, &pred_labels)
}

pub fn run_eval(gold_path: impl AsRef<Path>, pred_path: impl AsRef<Path>) -> Result<EvalReport> {
    evaluate_files(&fs::read(gold_path)?, &fs::read(pred_path)?)
}
