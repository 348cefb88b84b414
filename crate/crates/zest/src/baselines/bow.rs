//! Multinomial naive Bayes over whitespace-token bag-of-words, with
//! additive smoothing. The counting baseline.

use std::collections::HashMap;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::container::{self, MAGIC_BOW};
use crate::error::{Result, ZestError};
use crate::model::{argmax_first, write_atomic};
use crate::parallel;
use crate::text_prep::{prepare, PrepConfig};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BowModel {
    pub prep: PrepConfig,
    pub alpha: f64,
    pub labels: Vec<String>,
    /// Token list in first-appearance order; index is the vocabulary id.
    pub vocabulary: Vec<String>,
    pub log_priors: Vec<f64>,
    /// `log_likelihoods[class][token]`, additive-smoothed.
    pub log_likelihoods: Vec<Vec<f64>>,
    #[serde(skip)]
    index: HashMap<String, usize>,
}

impl BowModel {
    pub fn train(
        examples_per_class: &[(String, Vec<String>)],
        alpha: f64,
        prep: PrepConfig,
    ) -> Result<Self> {
        if examples_per_class.is_empty() {
            return Err(ZestError::EmptyDataset);
        }
        let mut vocabulary: Vec<String> = Vec::new();
        let mut index: HashMap<String, usize> = HashMap::new();
        let mut counts: Vec<Vec<u64>> = Vec::new();
        let mut doc_counts: Vec<u64> = Vec::new();

        for (label, examples) in examples_per_class {
            let mut class_counts = vec![0u64; vocabulary.len()];
            let mut docs = 0u64;
            for example in examples {
                let prepared = prepare(example, &prep);
                let tokens: Vec<&str> = prepared.split_whitespace().collect();
                if tokens.is_empty() {
                    continue;
                }
                docs += 1;
                for token in tokens {
                    let id = *index.entry(token.to_owned()).or_insert_with(|| {
                        vocabulary.push(token.to_owned());
                        vocabulary.len() - 1
                    });
                    if id >= class_counts.len() {
                        class_counts.resize(id + 1, 0);
                    }
                    class_counts[id] += 1;
                }
            }
            if docs == 0 {
                return Err(ZestError::EmptyClass(label.clone()));
            }
            counts.push(class_counts);
            doc_counts.push(docs);
        }

        let vocab_size = vocabulary.len();
        let total_docs: u64 = doc_counts.iter().sum();
        let log_priors: Vec<f64> = doc_counts
            .iter()
            .map(|d| (*d as f64 / total_docs as f64).ln())
            .collect();
        let log_likelihoods: Vec<Vec<f64>> = counts
            .into_iter()
            .map(|mut class_counts| {
                class_counts.resize(vocab_size, 0);
                let total: u64 = class_counts.iter().sum();
                let denominator = total as f64 + alpha * vocab_size as f64;
                class_counts
                    .iter()
                    .map(|c| ((*c as f64 + alpha) / denominator).ln())
                    .collect()
            })
            .collect();

        Ok(BowModel {
            prep,
            alpha,
            labels: examples_per_class.iter().map(|(l, _)| l.clone()).collect(),
            vocabulary,
            log_priors,
            log_likelihoods,
            index,
        })
    }

    /// Per-class log posterior (up to the shared evidence term). Tokens
    /// outside the training vocabulary are ignored.
    pub fn log_posteriors(&self, text: &str) -> Vec<f64> {
        let prepared = prepare(text, &self.prep);
        let mut scores = self.log_priors.clone();
        for token in prepared.split_whitespace() {
            if let Some(&id) = self.index.get(token) {
                for (score, likelihoods) in scores.iter_mut().zip(&self.log_likelihoods) {
                    *score += likelihoods[id];
                }
            }
        }
        scores
    }

    /// Posterior probabilities, normalized over the model's classes.
    pub fn posteriors(&self, text: &str) -> Vec<f64> {
        let log = self.log_posteriors(text);
        let max = log.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let exp: Vec<f64> = log.iter().map(|v| (v - max).exp()).collect();
        let sum: f64 = exp.iter().sum();
        exp.into_iter().map(|v| v / sum).collect()
    }

    pub fn classify(&self, text: &str) -> String {
        self.labels[argmax_first(&self.log_posteriors(text))].clone()
    }

    pub fn classify_batch(&self, texts: &[String]) -> Vec<String> {
        parallel::map_ordered(texts, |t| self.classify(t))
    }

    pub fn to_bytes(&self) -> Result<Vec<u8>> {
        let metadata = serde_json::to_vec(self)
            .map_err(|e| ZestError::Format(format!("metadata encode: {e}")))?;
        container::write_container(MAGIC_BOW, &metadata, &[])
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        let (metadata, _blocks) = container::read_container(bytes, MAGIC_BOW)?;
        let mut model: BowModel = serde_json::from_slice(&metadata)
            .map_err(|e| ZestError::Format(format!("metadata decode: {e}")))?;
        model.index = model
            .vocabulary
            .iter()
            .enumerate()
            .map(|(i, t)| (t.clone(), i))
            .collect();
        Ok(model)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        write_atomic(path, &self.to_bytes()?)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_bytes(&fs::read(path)?)
    }
}
