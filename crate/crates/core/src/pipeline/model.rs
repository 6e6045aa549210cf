use std::fs::File;
use std::io::BufReader;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::config::{check_pair, ExperimentConfig, FeatureSpec, ModelKind};
use crate::embeddings::{average_embedding, load_embeddings, sequence_embedding, EmbeddingTable, PaddedSequence};
use crate::ensemble::{fit_voting, VotingEnsemble};
use crate::error::{Error, Result};
use crate::features::{tokenize, SparseVector, TfidfModel, TfidfOptions};
use crate::forest::{fit_forest, RandomForest};
use crate::linear::{train_logreg, train_ovo_svm, LogRegModel, OvoSvmModel};
use crate::metrics::evaluate;
use crate::neural::{train_bilstm_with, train_mlp_with, BiLstmModel, EarlyStopping, EpochControl, MlpModel};
use crate::sentiment::{ClassProbs, Sentiment};

/// Identifies the word-vector file a model was trained against. The vectors
/// themselves are not copied into the artifact.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmbeddingRef {
    pub path: String,
    pub dim: usize,
    pub n_words: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FeatureState {
    Tfidf { model: TfidfModel },
    EmbedAvg { embeddings: EmbeddingRef },
    EmbedSeq { embeddings: EmbeddingRef, max_len: usize },
}

pub fn read_embeddings(path: &str) -> Result<EmbeddingTable> {
    let file = File::open(Path::new(path))?;
    load_embeddings(BufReader::new(file))
}

/// Feature vectors in the shape the classifier expects.
pub enum Inputs {
    Sparse(Vec<SparseVector>),
    Seq(Vec<PaddedSequence>),
}

impl Inputs {
    pub fn len(&self) -> usize {
        match self {
            Inputs::Sparse(v) => v.len(),
            Inputs::Seq(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// A fitted feature extractor with its word vectors (if any) loaded.
pub struct Featurizer {
    pub state: FeatureState,
    table: Option<EmbeddingTable>,
}

impl Featurizer {
    /// Fits n-gram statistics on `texts`, or binds the given word vectors.
    pub fn fit(config: &ExperimentConfig, texts: &[&str], table: Option<EmbeddingTable>) -> Result<Self> {
        let embed_ref = |t: &EmbeddingTable| EmbeddingRef {
            path: config.embeddings_path.clone().unwrap_or_default(),
            dim: t.dim(),
            n_words: t.len(),
        };
        let need_table = || {
            table
                .as_ref()
                .ok_or_else(|| Error::Config(format!("{} features need an embeddings file", config.features)))
        };
        let state = match config.features {
            FeatureSpec::EmbedAvg => FeatureState::EmbedAvg {
                embeddings: embed_ref(need_table()?),
            },
            FeatureSpec::EmbedSeq => FeatureState::EmbedSeq {
                embeddings: embed_ref(need_table()?),
                max_len: config.bilstm.max_len,
            },
            spec => {
                let ngram = spec.ngram().expect("n-gram feature spec");
                let options = TfidfOptions {
                    max_features: (config.model == ModelKind::Mlp).then_some(config.max_dense_features),
                    ..Default::default()
                };
                FeatureState::Tfidf {
                    model: TfidfModel::fit(texts, ngram, options)?,
                }
            }
        };
        Ok(Featurizer { state, table })
    }

    /// Reattaches the word vectors named in `state`, checking they still
    /// match what the model was trained on.
    pub fn restore(state: FeatureState) -> Result<Self> {
        let table = match &state {
            FeatureState::Tfidf { .. } => None,
            FeatureState::EmbedAvg { embeddings } | FeatureState::EmbedSeq { embeddings, .. } => {
                let t = read_embeddings(&embeddings.path)
                    .map_err(|e| Error::Artifact(format!("cannot load embeddings {:?}: {e}", embeddings.path)))?;
                if t.dim() != embeddings.dim || t.len() != embeddings.n_words {
                    return Err(Error::Artifact(format!(
                        "embeddings {:?} changed: expected {} words of dimension {}, found {} of dimension {}",
                        embeddings.path,
                        embeddings.n_words,
                        embeddings.dim,
                        t.len(),
                        t.dim()
                    )));
                }
                Some(t)
            }
        };
        Ok(Featurizer { state, table })
    }

    pub fn transform(&self, texts: &[&str]) -> Inputs {
        match &self.state {
            FeatureState::Tfidf { model } => Inputs::Sparse(model.transform_all(texts)),
            FeatureState::EmbedAvg { .. } => {
                let table = self.table.as_ref().expect("embeddings bound");
                Inputs::Sparse(
                    texts
                        .iter()
                        .map(|t| SparseVector::from_dense(&average_embedding(&tokenize(t), table)))
                        .collect(),
                )
            }
            FeatureState::EmbedSeq { max_len, .. } => {
                let table = self.table.as_ref().expect("embeddings bound");
                Inputs::Seq(
                    texts
                        .iter()
                        .map(|t| {
                            let tokens = tokenize(t);
                            if tokens.is_empty() {
                                // an empty text reads as a single unknown token
                                PaddedSequence::from_rows(&[vec![0.0; table.dim()]], table.dim(), *max_len)
                            } else {
                                sequence_embedding(&tokens, table, *max_len)
                            }
                        })
                        .collect(),
                )
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ClassifierModel {
    Svm(OvoSvmModel),
    Logreg(LogRegModel),
    Forest(RandomForest),
    Voting(VotingEnsemble),
    Mlp(MlpModel),
    Bilstm(BiLstmModel),
}

/// Per-epoch dev macro-F1 check; `None` without patience or dev data.
fn stopper<'a>(
    patience: Option<usize>,
    dev: Option<(&'a Inputs, &'a [Sentiment])>,
) -> Option<impl FnMut(&ClassifierModel) -> EpochControl + 'a> {
    let (patience, (inputs, gold)) = patience.zip(dev)?;
    let mut early = EarlyStopping::new(patience);
    Some(move |model: &ClassifierModel| {
        let score = model
            .predict(inputs)
            .and_then(|p| evaluate(gold, &p.iter().map(|(s, _)| *s).collect::<Vec<_>>()))
            .map_or(f64::NEG_INFINITY, |r| r.overall.f1);
        early.update(score)
    })
}

fn sparse(inputs: &Inputs) -> Result<&[SparseVector]> {
    match inputs {
        Inputs::Sparse(v) => Ok(v),
        Inputs::Seq(_) => Err(Error::Config("this model needs vector features, not sequences".into())),
    }
}

impl ClassifierModel {
    /// `dev` is only consulted by neural models with a `patience` set.
    pub fn fit(
        config: &ExperimentConfig,
        inputs: &Inputs,
        labels: &[Sentiment],
        seed: u64,
        dev: Option<(&Inputs, &[Sentiment])>,
    ) -> Result<Self> {
        check_pair(config.model, &config.features)?;
        Ok(match config.model {
            ModelKind::Svm => ClassifierModel::Svm(train_ovo_svm(sparse(inputs)?, labels, &config.svm, seed)?),
            ModelKind::Logreg => ClassifierModel::Logreg(train_logreg(sparse(inputs)?, labels, &config.logreg)?),
            ModelKind::Forest => ClassifierModel::Forest(fit_forest(sparse(inputs)?, labels, &config.forest, seed)?),
            ModelKind::Voting => {
                ClassifierModel::Voting(fit_voting(sparse(inputs)?, labels, &config.voting_params(), seed)?)
            }
            ModelKind::Mlp => {
                let mut stop = stopper(config.mlp.patience, dev);
                let model = train_mlp_with(sparse(inputs)?, labels, &config.mlp, seed, |_, m| {
                    stop.as_mut()
                        .map_or(EpochControl::Continue, |f| f(&ClassifierModel::Mlp(m.clone())))
                })?;
                ClassifierModel::Mlp(model)
            }
            ModelKind::Bilstm => {
                let Inputs::Seq(seqs) = inputs else {
                    return Err(Error::Config("bilstm needs sequence features".into()));
                };
                let mut stop = stopper(config.bilstm.patience, dev);
                let model = train_bilstm_with(seqs, labels, &config.bilstm, seed, |_, m| {
                    stop.as_mut()
                        .map_or(EpochControl::Continue, |f| f(&ClassifierModel::Bilstm(m.clone())))
                })?;
                ClassifierModel::Bilstm(model)
            }
        })
    }

    pub fn kind(&self) -> ModelKind {
        match self {
            ClassifierModel::Svm(_) => ModelKind::Svm,
            ClassifierModel::Logreg(_) => ModelKind::Logreg,
            ClassifierModel::Forest(_) => ModelKind::Forest,
            ClassifierModel::Voting(_) => ModelKind::Voting,
            ClassifierModel::Mlp(_) => ModelKind::Mlp,
            ClassifierModel::Bilstm(_) => ModelKind::Bilstm,
        }
    }

    pub fn predict(&self, inputs: &Inputs) -> Result<Vec<(Sentiment, ClassProbs)>> {
        if let ClassifierModel::Bilstm(m) = self {
            let Inputs::Seq(seqs) = inputs else {
                return Err(Error::Artifact("bilstm model paired with vector features".into()));
            };
            return seqs.iter().map(|s| m.predict(s)).collect();
        }
        let xs = sparse(inputs).map_err(|_| Error::Artifact("model paired with sequence features".into()))?;
        xs.iter()
            .map(|x| match self {
                ClassifierModel::Svm(m) => m.predict(x),
                ClassifierModel::Logreg(m) => m.predict(x),
                ClassifierModel::Forest(m) => m.predict_proba(x),
                ClassifierModel::Voting(m) => m.predict(x),
                ClassifierModel::Mlp(m) => m.predict(x),
                ClassifierModel::Bilstm(_) => unreachable!(),
            })
            .collect()
    }
}
