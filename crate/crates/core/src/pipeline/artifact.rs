use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::config::ExperimentConfig;
use super::model::{ClassifierModel, FeatureState};
use crate::error::{Error, Result};
use crate::metrics::EvalReport;

pub const FORMAT_VERSION: u32 = 1;

/// A trained model with everything needed to predict: the fitted feature
/// extractor, the classifier and the config that produced them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelArtifact {
    pub format_version: u32,
    pub language_pair: Option<String>,
    pub seed: u64,
    pub config: ExperimentConfig,
    pub train_size: usize,
    pub dev_size: usize,
    /// Held-out scores at training time.
    pub dev_report: EvalReport,
    pub features: FeatureState,
    pub classifier: ClassifierModel,
}

#[derive(Deserialize)]
struct Header {
    format_version: Option<u32>,
}

impl ModelArtifact {
    /// Pretty JSON with fields in declaration order, so equal artifacts
    /// always serialize to equal bytes.
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = serde_json::to_vec_pretty(self).expect("artifact serializes");
        out.push(b'\n');
        out
    }

    pub fn from_bytes(raw: &[u8]) -> Result<Self> {
        let header: Header = serde_json::from_slice(raw).map_err(|e| Error::Format {
            line: Some(e.line()),
            message: e.to_string(),
        })?;
        match header.format_version {
            Some(FORMAT_VERSION) => {}
            Some(v) => {
                return Err(Error::Artifact(format!(
                    "unsupported format_version {v} (this build reads {FORMAT_VERSION})"
                )))
            }
            None => return Err(Error::Artifact("missing format_version".into())),
        }
        serde_json::from_slice(raw).map_err(|e| Error::Artifact(format!("malformed artifact: {e}")))
    }
}

pub fn save_model(artifact: &ModelArtifact, path: impl AsRef<Path>) -> Result<()> {
    fs::write(path, artifact.to_bytes())?;
    Ok(())
}

pub fn load_model(path: impl AsRef<Path>) -> Result<ModelArtifact> {
    ModelArtifact::from_bytes(&fs::read(path)?)
}
