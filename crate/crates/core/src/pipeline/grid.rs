use std::fmt;
use std::fs;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::config::{ExperimentConfig, FeatureSpec, ModelKind};
use super::run::{embeddings_for, fit_and_score, read_corpus};
use crate::corpus::{split_dataset, Dataset};
use crate::error::Result;
use crate::metrics::Prf;

const fn word(max_n: usize) -> FeatureSpec {
    FeatureSpec::WordNgram { min_n: 1, max_n }
}

const fn char_(min_n: usize) -> FeatureSpec {
    FeatureSpec::CharNgram { min_n, max_n: 6 }
}

/// The comparison grid in (model, feature) order.
pub const GRID: [(ModelKind, FeatureSpec); 12] = [
    (ModelKind::Svm, word(1)),
    (ModelKind::Svm, word(2)),
    (ModelKind::Svm, word(3)),
    (ModelKind::Svm, char_(2)),
    (ModelKind::Svm, char_(3)),
    (ModelKind::Svm, FeatureSpec::EmbedAvg),
    (ModelKind::Voting, char_(2)),
    (ModelKind::Mlp, word(1)),
    (ModelKind::Mlp, word(2)),
    (ModelKind::Mlp, word(3)),
    (ModelKind::Mlp, FeatureSpec::EmbedAvg),
    (ModelKind::Bilstm, FeatureSpec::EmbedSeq),
];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridRow {
    pub model: ModelKind,
    pub features: FeatureSpec,
    pub seed: u64,
    pub scores: Prf,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridReport {
    pub train_size: usize,
    pub dev_size: usize,
    pub rows: Vec<GridRow>,
    /// One line per row that could not run.
    pub skipped: Vec<String>,
}

/// Runs every grid row on one fixed split. Row `i` of [`GRID`]
/// trains with seed `master + i`, so results do not depend on execution
/// order and rows run in parallel.
pub fn grid(master: &ExperimentConfig, corpus: &Dataset) -> Result<GridReport> {
    corpus.labels()?;
    let (train, dev) = split_dataset(corpus, master.split_ratio, master.seed)?;
    let have_embeddings = master.embeddings_path.is_some();
    let mut plan = Vec::new();
    let mut skipped = Vec::new();
    for (i, (model, features)) in GRID.into_iter().enumerate() {
        if features.needs_embeddings() && !have_embeddings {
            skipped.push(format!("{model} + {features}: skipped, no embeddings_path configured"));
            continue;
        }
        let config = ExperimentConfig {
            model,
            features,
            seed: master.seed.wrapping_add(i as u64),
            ..master.clone()
        };
        config.validate()?;
        plan.push(config);
    }
    let table = if have_embeddings {
        embeddings_for(&ExperimentConfig {
            features: FeatureSpec::EmbedAvg,
            ..master.clone()
        })?
    } else {
        None
    };
    let rows = plan
        .par_iter()
        .map(|config| {
            let t = config.features.needs_embeddings().then(|| table.clone()).flatten();
            let (_, report) = fit_and_score(config, &train, &dev, t, config.seed)?;
            Ok(GridRow {
                model: config.model,
                features: config.features,
                seed: config.seed,
                scores: report.overall,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(GridReport {
        train_size: train.len(),
        dev_size: dev.len(),
        rows,
        skipped,
    })
}

pub fn run_grid(
    master: &ExperimentConfig,
    corpus_path: impl AsRef<Path>,
    report_path: impl AsRef<Path>,
) -> Result<GridReport> {
    let report = grid(master, &read_corpus(corpus_path)?)?;
    let mut bytes = serde_json::to_vec_pretty(&report).expect("grid report serializes");
    bytes.push(b'\n');
    fs::write(report_path, bytes)?;
    Ok(report)
}

impl fmt::Display for GridReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "split: {} train / {} dev", self.train_size, self.dev_size)?;
        writeln!(
            f,
            "{:<8} {:<12} {:>9} {:>9} {:>9}",
            "Model", "Features", "Precision", "Recall", "F1"
        )?;
        for r in &self.rows {
            writeln!(
                f,
                "{:<8} {:<12} {:>9.3} {:>9.3} {:>9.3}",
                r.model.name(),
                r.features.to_string(),
                r.scores.precision,
                r.scores.recall,
                r.scores.f1
            )?;
        }
        for s in &self.skipped {
            writeln!(f, "note: {s}")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_is_sorted_and_complete() {
        let mut sorted = GRID.to_vec();
        sorted.sort();
        assert_eq!(sorted, GRID);
        assert_eq!(GRID.iter().filter(|(_, f)| !f.needs_embeddings()).count(), 9);
        for (m, f) in GRID {
            super::super::config::check_pair(m, &f).unwrap();
        }
    }
}
