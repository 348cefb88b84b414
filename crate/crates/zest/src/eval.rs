//! Metrics, ablation runs, and score-distribution emission.

use std::collections::HashMap;
use std::time::Instant;

use serde::Serialize;

use crate::baselines::{BowModel, ConcatScorer, NGramClassifier};
use crate::codec::CodecParams;
use crate::datasets::{split, LabeledDataset, SplitSpec};
use crate::error::{Result, ZestError};
use crate::model::{TelescopeSchedule, ZestModel};
use crate::text_prep::PrepConfig;

/// Anything that can label a batch of texts. Implementations handle their
/// own parallelism and context reuse.
pub trait BatchClassifier: Sync {
    fn class_labels(&self) -> Vec<String>;
    fn predict_batch(&self, texts: &[String]) -> Result<Vec<String>>;
}

impl BatchClassifier for ZestModel {
    fn class_labels(&self) -> Vec<String> {
        self.classes.iter().map(|c| c.label.clone()).collect()
    }

    fn predict_batch(&self, texts: &[String]) -> Result<Vec<String>> {
        self.classify_batch(texts)
    }
}

impl BatchClassifier for BowModel {
    fn class_labels(&self) -> Vec<String> {
        self.labels.clone()
    }

    fn predict_batch(&self, texts: &[String]) -> Result<Vec<String>> {
        Ok(self.classify_batch(texts))
    }
}

impl BatchClassifier for NGramClassifier {
    fn class_labels(&self) -> Vec<String> {
        self.labels()
    }

    fn predict_batch(&self, texts: &[String]) -> Result<Vec<String>> {
        Ok(self.classify_batch(texts))
    }
}

impl BatchClassifier for ConcatScorer {
    fn class_labels(&self) -> Vec<String> {
        self.labels.clone()
    }

    fn predict_batch(&self, texts: &[String]) -> Result<Vec<String>> {
        self.classify_batch(texts)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ClassMetrics {
    pub label: String,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct EvaluationReport {
    pub labels: Vec<String>,
    pub accuracy: f64,
    pub per_class: Vec<ClassMetrics>,
    pub macro_precision: f64,
    pub macro_recall: f64,
    pub macro_f1: f64,
    /// Mean of macro precision and macro recall.
    pub fom: f64,
    /// `confusion[true_class][predicted_class]`, indexed like `labels`.
    pub confusion: Vec<Vec<u64>>,
    pub test_records: usize,
    pub train_seconds: f64,
    pub score_seconds: f64,
    pub model_bytes: u64,
}

impl EvaluationReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// Aligned-column text rendering.
    pub fn to_table(&self) -> String {
        let mut out = String::new();
        let width = self
            .labels
            .iter()
            .map(|l| l.len())
            .max()
            .unwrap_or(5)
            .max(5);
        out.push_str(&format!(
            "{:<width$}  {:>9}  {:>9}  {:>9}\n",
            "class", "precision", "recall", "f1"
        ));
        for m in &self.per_class {
            out.push_str(&format!(
                "{:<width$}  {:>9.4}  {:>9.4}  {:>9.4}\n",
                m.label, m.precision, m.recall, m.f1
            ));
        }
        out.push_str(&format!(
            "{:<width$}  {:>9.4}  {:>9.4}  {:>9.4}\n",
            "macro", self.macro_precision, self.macro_recall, self.macro_f1
        ));
        out.push_str(&format!(
            "accuracy {:.4}  fom {:.4}  n {}  train {:.2}s  score {:.2}s  model {} B\n",
            self.accuracy,
            self.fom,
            self.test_records,
            self.train_seconds,
            self.score_seconds,
            self.model_bytes
        ));
        out
    }
}

/// Scores a trained classifier on held-out records.
pub fn evaluate<C: BatchClassifier + ?Sized>(
    classifier: &C,
    test: &LabeledDataset,
) -> Result<EvaluationReport> {
    if test.is_empty() {
        return Err(ZestError::EmptyDataset);
    }
    let labels = classifier.class_labels();
    let index: HashMap<&str, usize> = labels
        .iter()
        .enumerate()
        .map(|(i, l)| (l.as_str(), i))
        .collect();
    for record in &test.records {
        if !index.contains_key(record.label.as_str()) {
            return Err(ZestError::LabelMismatch(format!(
                "test label {:?} not in model labels",
                record.label
            )));
        }
    }
    let texts: Vec<String> = test.records.iter().map(|r| r.text.clone()).collect();
    let started = Instant::now();
    let predictions = classifier.predict_batch(&texts)?;
    let score_seconds = started.elapsed().as_secs_f64();

    let mut confusion = vec![vec![0u64; labels.len()]; labels.len()];
    for (record, prediction) in test.records.iter().zip(&predictions) {
        let truth = index[record.label.as_str()];
        let predicted = *index.get(prediction.as_str()).ok_or_else(|| {
            ZestError::LabelMismatch(format!("prediction {prediction:?} not in model labels"))
        })?;
        confusion[truth][predicted] += 1;
    }
    Ok(report_from_confusion(labels, confusion, score_seconds))
}

fn report_from_confusion(
    labels: Vec<String>,
    confusion: Vec<Vec<u64>>,
    score_seconds: f64,
) -> EvaluationReport {
    let n = labels.len();
    let total: u64 = confusion.iter().flatten().sum();
    let trace: u64 = (0..n).map(|i| confusion[i][i]).sum();
    let mut per_class = Vec::with_capacity(n);
    for i in 0..n {
        let row_sum: u64 = confusion[i].iter().sum();
        let col_sum: u64 = confusion.iter().map(|row| row[i]).sum();
        // Classes never predicted get precision 0, not NaN; same for
        // recall of classes absent from the test set.
        let precision = if col_sum > 0 {
            confusion[i][i] as f64 / col_sum as f64
        } else {
            0.0
        };
        let recall = if row_sum > 0 {
            confusion[i][i] as f64 / row_sum as f64
        } else {
            0.0
        };
        let f1 = if precision + recall > 0.0 {
            2.0 * precision * recall / (precision + recall)
        } else {
            0.0
        };
        per_class.push(ClassMetrics {
            label: labels[i].clone(),
            precision,
            recall,
            f1,
        });
    }
    let macro_precision = per_class.iter().map(|m| m.precision).sum::<f64>() / n as f64;
    let macro_recall = per_class.iter().map(|m| m.recall).sum::<f64>() / n as f64;
    let macro_f1 = per_class.iter().map(|m| m.f1).sum::<f64>() / n as f64;
    EvaluationReport {
        labels,
        accuracy: trace as f64 / total as f64,
        per_class,
        macro_precision,
        macro_recall,
        macro_f1,
        fom: (macro_precision + macro_recall) / 2.0,
        confusion,
        test_records: total as usize,
        train_seconds: 0.0,
        score_seconds,
        model_bytes: 0,
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct AblationRow {
    pub name: String,
    pub dictionaries: usize,
    pub padding: bool,
    pub report: EvaluationReport,
}

/// Trains and evaluates one Zest model per configuration on an identical
/// train/test split.
pub fn ablation_run(
    dataset: &LabeledDataset,
    configurations: &[(TelescopeSchedule, PrepConfig)],
    split_spec: &SplitSpec,
    params: &CodecParams,
) -> Result<Vec<AblationRow>> {
    let (train, test) = split(dataset, split_spec)?;
    let by_class = train.by_class();
    let mut rows = Vec::with_capacity(configurations.len());
    for (schedule, prep) in configurations {
        let started = Instant::now();
        let model = ZestModel::train(&by_class, prep.clone(), schedule.clone(), params.clone())?;
        let train_seconds = started.elapsed().as_secs_f64();
        let mut report = evaluate(&model, &test)?;
        report.train_seconds = train_seconds;
        report.model_bytes = model.to_bytes()?.len() as u64;
        rows.push(AblationRow {
            name: format!(
                "zest k={} pad={}",
                schedule.count,
                if prep.pad_words { "on" } else { "off" }
            ),
            dictionaries: schedule.count,
            padding: prep.pad_words,
            report,
        });
    }
    Ok(rows)
}

pub fn ablation_table(rows: &[AblationRow]) -> String {
    let mut out = String::new();
    out.push_str(&format!(
        "{:<24} {:>9} {:>8} {:>11} {:>10} {:>11}\n",
        "configuration", "accuracy", "fom", "train (s)", "score (s)", "model (B)"
    ));
    for row in rows {
        out.push_str(&format!(
            "{:<24} {:>9.4} {:>8.4} {:>11.2} {:>10.2} {:>11}\n",
            row.name,
            row.report.accuracy,
            row.report.fom,
            row.report.train_seconds,
            row.report.score_seconds,
            row.report.model_bytes
        ));
    }
    out
}

/// Bucketed counts of adjusted affinities, one row of buckets per group
/// (group = the record's true label).
#[derive(Debug, Clone, Serialize)]
pub struct ScoreHistogram {
    pub bucket_width: f64,
    pub groups: Vec<(String, Vec<u64>)>,
}

impl ScoreHistogram {
    pub fn bucket_count(&self) -> usize {
        (1.0 / self.bucket_width).floor() as usize + 1
    }

    /// CSV rendering: bucket_low,bucket_high,group,count.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("bucket_low,bucket_high,group,count\n");
        for (group, counts) in &self.groups {
            for (i, count) in counts.iter().enumerate() {
                let low = i as f64 * self.bucket_width;
                out.push_str(&format!(
                    "{:.6},{:.6},{},{}\n",
                    low,
                    (low + self.bucket_width).min(1.0 + self.bucket_width),
                    group,
                    count
                ));
            }
        }
        out
    }
}

/// Histograms the adjusted affinity toward `target` (or toward each
/// record's own label when `target` is None), grouped by true label.
pub fn score_histogram(
    model: &ZestModel,
    dataset: &LabeledDataset,
    bucket_width: f64,
    target: Option<&str>,
) -> Result<ScoreHistogram> {
    if !(bucket_width > 0.0 && bucket_width <= 1.0) {
        return Err(ZestError::Config(format!(
            "bucket width must be in (0, 1], got {bucket_width}"
        )));
    }
    if let Some(label) = target {
        if model.class(label).is_none() {
            return Err(ZestError::UnknownLabel(label.to_owned()));
        }
    }
    let texts: Vec<String> = dataset.records.iter().map(|r| r.text.clone()).collect();
    let vectors = model.score_batch(&texts)?;
    let bucket_count = (1.0 / bucket_width).floor() as usize + 1;
    let mut groups: Vec<(String, Vec<u64>)> = Vec::new();
    for (record, vector) in dataset.records.iter().zip(&vectors) {
        let label = target.unwrap_or(record.label.as_str());
        let value = vector.adjusted_for(label).ok_or_else(|| {
            ZestError::LabelMismatch(format!("label {:?} not in model", record.label))
        })?;
        let bucket = ((value / bucket_width) as usize).min(bucket_count - 1);
        let group = match groups.iter_mut().find(|(g, _)| *g == record.label) {
            Some((_, counts)) => counts,
            None => {
                groups.push((record.label.clone(), vec![0; bucket_count]));
                &mut groups.last_mut().unwrap().1
            }
        };
        group[bucket] += 1;
    }
    Ok(ScoreHistogram {
        bucket_width,
        groups,
    })
}
