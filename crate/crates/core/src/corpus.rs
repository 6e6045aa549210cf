//! Corpus and prediction files.
//!
//! A corpus is a JSON array of objects with `id`, `text`, an optional
//! `lang_tagged_text` and an optional `sentiment`. Test files omit the
//! sentiment. Prediction files are arrays of `{"id", "sentiment"}`.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fmt;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sentiment::Sentiment;

#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    pub id: i64,
    pub text: String,
    /// Word-level language tags (`word\\EN ...`). Kept for fidelity, never
    /// used as a feature.
    pub lang_tagged_text: Option<String>,
    pub label: Option<Sentiment>,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Dataset {
    pub samples: Vec<Sample>,
    /// Free-form tag such as `Hi-En` or `Bn-En`.
    pub language_pair: Option<String>,
}

#[derive(Deserialize)]
struct RawSample {
    id: i64,
    text: String,
    #[serde(default)]
    lang_tagged_text: Option<String>,
    #[serde(default)]
    sentiment: Option<i64>,
}

impl Dataset {
    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn ids(&self) -> Vec<i64> {
        self.samples.iter().map(|s| s.id).collect()
    }

    pub fn texts(&self) -> Vec<&str> {
        self.samples.iter().map(|s| s.text.as_str()).collect()
    }

    /// All labels; fails on the first unlabeled sample.
    pub fn labels(&self) -> Result<Vec<Sentiment>> {
        self.samples
            .iter()
            .map(|s| {
                s.label.ok_or_else(|| Error::Label {
                    id: s.id,
                    message: "training sample has no sentiment".into(),
                })
            })
            .collect()
    }

    pub fn with_language_pair(mut self, tag: impl Into<String>) -> Self {
        self.language_pair = Some(tag.into());
        self
    }
}

pub fn parse_corpus(raw: &[u8]) -> Result<Dataset> {
    let records: Vec<RawSample> = serde_json::from_slice(raw).map_err(|e| Error::parse_json(raw, &e))?;
    let mut seen = HashSet::with_capacity(records.len());
    let mut samples = Vec::with_capacity(records.len());
    for r in records {
        if !seen.insert(r.id) {
            return Err(Error::DuplicateId(r.id));
        }
        let label = match r.sentiment {
            None => None,
            Some(v) => Some(Sentiment::from_value(v).ok_or_else(|| Error::Label {
                id: r.id,
                message: format!("sentiment {v} is not one of -1, 0, 1"),
            })?),
        };
        samples.push(Sample {
            id: r.id,
            text: r.text,
            lang_tagged_text: r.lang_tagged_text,
            label,
        });
    }
    Ok(Dataset {
        samples,
        language_pair: None,
    })
}

#[derive(Serialize)]
struct CorpusRecord<'a> {
    id: i64,
    text: &'a str,
    #[serde(skip_serializing_if = "Option::is_none")]
    lang_tagged_text: Option<&'a str>,
    #[serde(skip_serializing_if = "Option::is_none")]
    sentiment: Option<Sentiment>,
}

/// Writes a dataset back out in the corpus format (one object per line).
pub fn write_corpus(ds: &Dataset) -> Vec<u8> {
    let mut out = b"[".to_vec();
    for (i, s) in ds.samples.iter().enumerate() {
        if i > 0 {
            out.push(b',');
        }
        out.push(b'\n');
        let rec = CorpusRecord {
            id: s.id,
            text: &s.text,
            lang_tagged_text: s.lang_tagged_text.as_deref(),
            sentiment: s.label,
        };
        serde_json::to_writer(&mut out, &rec).expect("in-memory write");
    }
    if !ds.samples.is_empty() {
        out.push(b'\n');
    }
    out.extend_from_slice(b"]\n");
    out
}

/// Seeded shuffle followed by a prefix cut: the first `floor(ratio * N)`
/// shuffled samples become the training split.
pub fn split_dataset(ds: &Dataset, train_ratio: f64, seed: u64) -> Result<(Dataset, Dataset)> {
    if !(train_ratio > 0.0 && train_ratio < 1.0) {
        return Err(Error::Split(format!(
            "train ratio {train_ratio} must lie strictly between 0 and 1"
        )));
    }
    let n = ds.len();
    let n_train = train_size(n, train_ratio);
    if n_train == 0 || n_train == n {
        return Err(Error::Split(format!(
            "{n} samples at ratio {train_ratio} leave an empty split ({n_train} train / {} dev)",
            n - n_train
        )));
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let pick = |idx: &[usize]| Dataset {
        samples: idx.iter().map(|&i| ds.samples[i].clone()).collect(),
        language_pair: ds.language_pair.clone(),
    };
    Ok((pick(&order[..n_train]), pick(&order[n_train..])))
}

pub fn train_size(n: usize, train_ratio: f64) -> usize {
    (train_ratio * n as f64).floor() as usize
}

#[derive(Serialize, Deserialize)]
struct PredictionRecord {
    id: i64,
    sentiment: i64,
}

/// Compact, byte-deterministic prediction file: `[{"id":1,"sentiment":-1},...]`.
pub fn write_predictions(ids: &[i64], labels: &[Sentiment]) -> Result<Vec<u8>> {
    if ids.len() != labels.len() {
        return Err(Error::Arity {
            left: ids.len(),
            right: labels.len(),
        });
    }
    let records: Vec<PredictionRecord> = ids
        .iter()
        .zip(labels)
        .map(|(&id, &s)| PredictionRecord {
            id,
            sentiment: s.value() as i64,
        })
        .collect();
    Ok(serde_json::to_vec(&records).expect("in-memory write"))
}

/// Parses a prediction file strictly: every sentiment must be in range.
pub fn parse_predictions(raw: &[u8]) -> Result<Vec<(i64, Sentiment)>> {
    let records: Vec<PredictionRecord> = serde_json::from_slice(raw).map_err(|e| Error::parse_json(raw, &e))?;
    records
        .into_iter()
        .map(|r| {
            Sentiment::from_value(r.sentiment)
                .map(|s| (r.id, s))
                .ok_or_else(|| Error::Label {
                    id: r.id,
                    message: format!("sentiment {} is not one of -1, 0, 1", r.sentiment),
                })
        })
        .collect()
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub missing: Vec<i64>,
    pub extra: Vec<i64>,
    pub duplicate: Vec<i64>,
    pub out_of_range: Vec<i64>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.missing.is_empty() && self.extra.is_empty() && self.duplicate.is_empty() && self.out_of_range.is_empty()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_valid() {
            return write!(f, "valid");
        }
        let mut parts = Vec::new();
        for (name, ids) in [
            ("missing", &self.missing),
            ("extra", &self.extra),
            ("duplicate", &self.duplicate),
            ("out-of-range", &self.out_of_range),
        ] {
            if !ids.is_empty() {
                parts.push(format!("{name} ids {ids:?}"));
            }
        }
        write!(f, "{}", parts.join("; "))
    }
}

/// Checks a prediction file against the expected id set. Only malformed
/// JSON is an error; content problems land in the report.
pub fn validate_predictions(test_ids: &BTreeSet<i64>, raw: &[u8]) -> Result<ValidationReport> {
    let records: Vec<PredictionRecord> = serde_json::from_slice(raw).map_err(|e| Error::parse_json(raw, &e))?;
    let mut counts: BTreeMap<i64, usize> = BTreeMap::new();
    let mut report = ValidationReport::default();
    for r in &records {
        *counts.entry(r.id).or_default() += 1;
        if Sentiment::from_value(r.sentiment).is_none() && !report.out_of_range.contains(&r.id) {
            report.out_of_range.push(r.id);
        }
    }
    report.missing = test_ids.iter().filter(|id| !counts.contains_key(id)).copied().collect();
    report.extra = counts.keys().filter(|id| !test_ids.contains(id)).copied().collect();
    report.duplicate = counts.iter().filter(|(_, &c)| c > 1).map(|(&id, _)| id).collect();
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    const SAMPLE_RECORD: &str = r#"[{
        "text": "i remember it happen in my place also koi apni jagah se nahin hilega",
        "lang_tagged_text": "i\\EN remember\\EN it\\EN happen\\EN in\\EN my\\EN place\\EN also\\EN koi\\HI apni\\HI jagah\\HI se\\HI nahin\\HI hilega\\HI ",
        "id": 18027,
        "sentiment": -1
    }]"#;

    fn toy(n: usize) -> Dataset {
        Dataset {
            samples: (0..n as i64)
                .map(|i| Sample {
                    id: i,
                    text: format!("t{i}"),
                    lang_tagged_text: None,
                    label: Some(Sentiment::ALL[i as usize % 3]),
                })
                .collect(),
            language_pair: None,
        }
    }

    #[test]
    fn parses_the_documented_record() {
        let ds = parse_corpus(SAMPLE_RECORD.as_bytes()).unwrap();
        assert_eq!(ds.len(), 1);
        let s = &ds.samples[0];
        assert_eq!(s.id, 18027);
        assert_eq!(s.label, Some(Sentiment::Negative));
        assert!(s.text.starts_with("i remember it happen"));
        assert!(s.lang_tagged_text.as_deref().unwrap().contains("koi\\HI"));
    }

    #[test]
    fn empty_array_and_unlabeled_records() {
        assert!(parse_corpus(b"[]").unwrap().is_empty());
        let ds = parse_corpus(br#"[{"id": 7, "text": "so pls"}]"#).unwrap();
        assert_eq!(ds.samples[0].label, None);
        assert!(matches!(ds.labels(), Err(Error::Label { id: 7, .. })));
    }

    #[test]
    fn parse_errors() {
        match parse_corpus(br#"[{"id": 1, "text": "a"},,]"#) {
            Err(Error::Parse { offset, .. }) => assert!(offset > 0),
            other => panic!("{other:?}"),
        }
        assert!(matches!(
            parse_corpus(br#"[{"id": 3, "text": "a", "sentiment": 2}]"#),
            Err(Error::Label { id: 3, .. })
        ));
        assert!(matches!(
            parse_corpus(br#"[{"id": 3, "text": "a"}, {"id": 3, "text": "b"}]"#),
            Err(Error::DuplicateId(3))
        ));
    }

    #[test]
    fn preserves_order() {
        let ds = parse_corpus(br#"[{"id": 9, "text": "a"}, {"id": 2, "text": "b"}, {"id": 5, "text": "c"}]"#).unwrap();
        assert_eq!(ds.ids(), vec![9, 2, 5]);
    }

    #[test]
    fn split_sizes_follow_floor_rule() {
        for (n, train) in [(12936, 10995), (2500, 2125), (20, 17)] {
            let (tr, dev) = split_dataset(&toy(n), 0.85, 42).unwrap();
            assert_eq!((tr.len(), dev.len()), (train, n - train));
        }
    }

    #[test]
    fn split_rejects_empty_sides() {
        assert!(matches!(split_dataset(&toy(1), 0.85, 1), Err(Error::Split(_))));
        assert!(matches!(split_dataset(&toy(10), 0.0, 1), Err(Error::Split(_))));
        assert!(matches!(split_dataset(&toy(10), 1.0, 1), Err(Error::Split(_))));
        assert!(matches!(
            split_dataset(&Dataset::default(), 0.5, 1),
            Err(Error::Split(_))
        ));
    }

    #[test]
    fn predictions_format() {
        let out = write_predictions(&[1, 2], &[Sentiment::Positive, Sentiment::Negative]).unwrap();
        assert_eq!(out, br#"[{"id":1,"sentiment":1},{"id":2,"sentiment":-1}]"#);
        assert_eq!(write_predictions(&[], &[]).unwrap(), b"[]");
        assert!(matches!(
            write_predictions(&[1], &[]),
            Err(Error::Arity { left: 1, right: 0 })
        ));
    }

    #[test]
    fn validation_report() {
        let ids: BTreeSet<i64> = [1, 2, 3].into_iter().collect();
        let good = br#"[{"id":1,"sentiment":1},{"id":2,"sentiment":0},{"id":3,"sentiment":-1}]"#;
        assert!(validate_predictions(&ids, good).unwrap().is_valid());

        let missing = br#"[{"id":1,"sentiment":1},{"id":3,"sentiment":-1}]"#;
        let r = validate_predictions(&ids, missing).unwrap();
        assert!(!r.is_valid());
        assert_eq!(r.missing, vec![2]);

        let bad = br#"[{"id":1,"sentiment":2},{"id":2,"sentiment":0},{"id":3,"sentiment":-1},{"id":3,"sentiment":0},{"id":4,"sentiment":0}]"#;
        let r = validate_predictions(&ids, bad).unwrap();
        assert_eq!(r.out_of_range, vec![1]);
        assert_eq!(r.duplicate, vec![3]);
        assert_eq!(r.extra, vec![4]);
        assert!(r.missing.is_empty());

        assert!(matches!(validate_predictions(&ids, b"[{"), Err(Error::Parse { .. })));
    }

    #[test]
    fn corpus_writer_roundtrips() {
        let ds = parse_corpus(SAMPLE_RECORD.as_bytes()).unwrap();
        let again = parse_corpus(&write_corpus(&ds)).unwrap();
        assert_eq!(ds, again);
    }
}
