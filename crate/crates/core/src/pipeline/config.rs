use std::fmt;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::ensemble::VotingParams;
use crate::error::{Error, Result};
use crate::features::{NGramSpec, NGramUnit};
use crate::forest::ForestParams;
use crate::linear::{LogRegParams, SvmParams};
use crate::neural::{BiLstmParams, MlpParams};

/// Declaration order is the grid's sort order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelKind {
    Svm,
    Logreg,
    Forest,
    Voting,
    Mlp,
    Bilstm,
}

impl ModelKind {
    pub fn name(self) -> &'static str {
        match self {
            ModelKind::Svm => "svm",
            ModelKind::Logreg => "logreg",
            ModelKind::Forest => "forest",
            ModelKind::Voting => "voting",
            ModelKind::Mlp => "mlp",
            ModelKind::Bilstm => "bilstm",
        }
    }
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FeatureSpec {
    WordNgram {
        min_n: usize,
        max_n: usize,
    },
    CharNgram {
        min_n: usize,
        max_n: usize,
    },
    /// Mean of the token vectors.
    EmbedAvg,
    /// Padded token-vector sequence.
    EmbedSeq,
}

impl FeatureSpec {
    pub fn ngram(&self) -> Option<NGramSpec> {
        match *self {
            FeatureSpec::WordNgram { min_n, max_n } => Some(NGramSpec {
                unit: NGramUnit::Word,
                min_n,
                max_n,
            }),
            FeatureSpec::CharNgram { min_n, max_n } => Some(NGramSpec {
                unit: NGramUnit::Char,
                min_n,
                max_n,
            }),
            _ => None,
        }
    }

    pub fn needs_embeddings(&self) -> bool {
        matches!(self, FeatureSpec::EmbedAvg | FeatureSpec::EmbedSeq)
    }
}

impl fmt::Display for FeatureSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FeatureSpec::WordNgram { min_n, max_n } => write!(f, "word({min_n},{max_n})"),
            FeatureSpec::CharNgram { min_n, max_n } => write!(f, "char({min_n},{max_n})"),
            FeatureSpec::EmbedAvg => f.write_str("embed_avg"),
            FeatureSpec::EmbedSeq => f.write_str("embed_seq"),
        }
    }
}

/// Everything needed to reproduce a training run. Unset keys take the
/// defaults below; the neural defaults are the published learning rates,
/// epochs, batch size and dropout.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub model: ModelKind,
    pub features: FeatureSpec,
    pub svm: SvmParams,
    pub logreg: LogRegParams,
    pub forest: ForestParams,
    pub mlp: MlpParams,
    pub bilstm: BiLstmParams,
    pub seed: u64,
    pub split_ratio: f64,
    pub embeddings_path: Option<String>,
    /// Vocabulary cap (top terms by document frequency) for n-gram input to
    /// the MLP.
    pub max_dense_features: usize,
    pub language_pair: Option<String>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            model: ModelKind::Svm,
            features: FeatureSpec::CharNgram { min_n: 2, max_n: 6 },
            svm: SvmParams::default(),
            logreg: LogRegParams::default(),
            forest: ForestParams::default(),
            mlp: MlpParams::default(),
            bilstm: BiLstmParams::default(),
            seed: 42,
            split_ratio: 0.85,
            embeddings_path: None,
            max_dense_features: 20_000,
            language_pair: None,
        }
    }
}

pub const PRESETS: [&str; 2] = ["model1", "model2"];

/// `model1` is the soft-voting ensemble, `model2` the linear SVM; both on
/// TF-IDF character (2,6)-grams.
pub fn resolve_preset(name: &str) -> Result<ExperimentConfig> {
    let model = match name {
        "model1" => ModelKind::Voting,
        "model2" => ModelKind::Svm,
        _ => {
            return Err(Error::Preset {
                name: name.to_string(),
                valid: PRESETS.iter().map(|s| s.to_string()).collect(),
            })
        }
    };
    Ok(ExperimentConfig {
        model,
        features: FeatureSpec::CharNgram { min_n: 2, max_n: 6 },
        ..Default::default()
    })
}

fn merge(base: &mut Value, over: Value) {
    match (base, over) {
        (Value::Object(b), Value::Object(o)) => {
            for (k, v) in o {
                match b.get_mut(&k) {
                    Some(slot) if k != "features" => merge(slot, v),
                    _ => {
                        b.insert(k, v);
                    }
                }
            }
        }
        (slot, v) => *slot = v,
    }
}

impl ExperimentConfig {
    pub fn from_json(raw: &str) -> Result<Self> {
        let cfg: ExperimentConfig = serde_json::from_str(raw).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Deep-merges a JSON config document over `self`; keys in the document
    /// win. `features` is replaced as a whole.
    pub fn overlay_json(&self, raw: &str) -> Result<Self> {
        let over: Value = serde_json::from_str(raw).map_err(|e| Error::Config(e.to_string()))?;
        if !over.is_object() {
            return Err(Error::Config("config must be a JSON object".into()));
        }
        let mut base = serde_json::to_value(self).map_err(|e| Error::Config(e.to_string()))?;
        merge(&mut base, over);
        let cfg: ExperimentConfig = serde_json::from_value(base).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn voting_params(&self) -> VotingParams {
        VotingParams {
            svm: self.svm,
            logreg: self.logreg,
            forest: self.forest,
        }
    }

    /// Model/feature compatibility and value ranges.
    pub fn validate(&self) -> Result<()> {
        check_pair(self.model, &self.features)?;
        if let Some(spec) = self.features.ngram() {
            NGramSpec::new(spec.unit, spec.min_n, spec.max_n).map_err(|e| Error::Config(e.to_string()))?;
        }
        if !(self.split_ratio > 0.0 && self.split_ratio < 1.0) {
            return Err(Error::Config(format!(
                "split_ratio must lie in (0, 1), got {}",
                self.split_ratio
            )));
        }
        if self.max_dense_features == 0 {
            return Err(Error::Config("max_dense_features must be positive".into()));
        }
        if !(0.0..1.0).contains(&self.mlp.dropout) {
            return Err(Error::Config(format!(
                "dropout must lie in [0, 1), got {}",
                self.mlp.dropout
            )));
        }
        if self.bilstm.max_len == 0 {
            return Err(Error::Config("max_len must be at least 1".into()));
        }
        if self.mlp.patience == Some(0) || self.bilstm.patience == Some(0) {
            return Err(Error::Config("early-stopping patience must be at least 1".into()));
        }
        Ok(())
    }
}

pub(crate) fn check_pair(model: ModelKind, features: &FeatureSpec) -> Result<()> {
    let ok = match (model, features) {
        (ModelKind::Bilstm, FeatureSpec::EmbedSeq) => true,
        (ModelKind::Bilstm, _) | (_, FeatureSpec::EmbedSeq) => false,
        _ => true,
    };
    if ok {
        Ok(())
    } else {
        Err(Error::Config(format!(
            "model {model} cannot use {features} features (embed_seq pairs only with bilstm)"
        )))
    }
}
