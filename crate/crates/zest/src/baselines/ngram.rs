//! Character n-gram affinity: the fraction of a text's distinct character
//! n-grams that were observed in a class's training examples.

use std::collections::HashSet;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::container::{self, Block, MAGIC_NGRAM};
use crate::error::{Result, ZestError};
use crate::model::{argmax_first, write_atomic};
use crate::parallel;
use crate::text_prep::{prepare, PrepConfig};

#[derive(Debug, Clone)]
pub struct NGramProfile {
    pub label: String,
    pub n: usize,
    pub grams: HashSet<String>,
}

impl NGramProfile {
    pub fn train<S: AsRef<str>>(label: &str, prepared_examples: &[S], n: usize) -> Self {
        let mut grams = HashSet::new();
        for example in prepared_examples {
            collect_grams(example.as_ref(), n, &mut grams);
        }
        NGramProfile {
            label: label.to_owned(),
            n,
            grams,
        }
    }
}

fn collect_grams(text: &str, n: usize, out: &mut HashSet<String>) {
    let chars: Vec<char> = text.chars().collect();
    for window in chars.windows(n) {
        out.insert(window.iter().collect());
    }
}

/// Fraction of the prepared text's distinct n-grams present in the
/// profile; 0 when the text yields no n-grams at all.
pub fn ngram_affinity(prepared_text: &str, profile: &NGramProfile) -> f64 {
    let mut grams = HashSet::new();
    collect_grams(prepared_text, profile.n, &mut grams);
    if grams.is_empty() {
        return 0.0;
    }
    let matched = grams.iter().filter(|g| profile.grams.contains(*g)).count();
    matched as f64 / grams.len() as f64
}

/// One profile per class; argmax affinity wins, ties to the first class.
#[derive(Debug, Clone)]
pub struct NGramClassifier {
    pub profiles: Vec<NGramProfile>,
    pub prep: PrepConfig,
    pub n: usize,
}

impl NGramClassifier {
    pub fn train(
        examples_per_class: &[(String, Vec<String>)],
        n: usize,
        prep: PrepConfig,
    ) -> Result<Self> {
        if examples_per_class.is_empty() {
            return Err(ZestError::EmptyDataset);
        }
        let profiles = examples_per_class
            .iter()
            .map(|(label, examples)| {
                let prepared: Vec<String> = examples
                    .iter()
                    .map(|e| prepare(e, &prep))
                    .filter(|p| !p.is_empty())
                    .collect();
                if prepared.is_empty() {
                    return Err(ZestError::EmptyClass(label.clone()));
                }
                Ok(NGramProfile::train(label, &prepared, n))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(NGramClassifier { profiles, prep, n })
    }

    pub fn affinities(&self, text: &str) -> Vec<f64> {
        let prepared = prepare(text, &self.prep);
        self.profiles
            .iter()
            .map(|p| ngram_affinity(&prepared, p))
            .collect()
    }

    pub fn classify(&self, text: &str) -> String {
        let scores = self.affinities(text);
        self.profiles[argmax_first(&scores)].label.clone()
    }

    pub fn classify_batch(&self, texts: &[String]) -> Vec<String> {
        parallel::map_ordered(texts, |t| self.classify(t))
    }

    pub fn labels(&self) -> Vec<String> {
        self.profiles.iter().map(|p| p.label.clone()).collect()
    }

    pub fn to_bytes(&self) -> Result<Vec<u8>> {
        let metadata = Metadata {
            prep: self.prep.clone(),
            n: self.n,
            labels: self.labels(),
        };
        let metadata_json = serde_json::to_vec(&metadata)
            .map_err(|e| ZestError::Format(format!("metadata encode: {e}")))?;
        let blocks: Vec<Block> = self
            .profiles
            .iter()
            .map(|p| {
                let mut grams: Vec<&String> = p.grams.iter().collect();
                grams.sort();
                Ok(Block {
                    payload: serde_json::to_vec(&grams)
                        .map_err(|e| ZestError::Format(format!("grams encode: {e}")))?,
                    extra: 0,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        container::write_container(MAGIC_NGRAM, &metadata_json, &blocks)
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        let (metadata_json, blocks) = container::read_container(bytes, MAGIC_NGRAM)?;
        let metadata: Metadata = serde_json::from_slice(&metadata_json)
            .map_err(|e| ZestError::Format(format!("metadata decode: {e}")))?;
        if blocks.len() != metadata.labels.len() {
            return Err(ZestError::Format("profile block count mismatch".into()));
        }
        let profiles = metadata
            .labels
            .iter()
            .zip(blocks)
            .map(|(label, block)| {
                let grams: Vec<String> = serde_json::from_slice(&block.payload)
                    .map_err(|e| ZestError::Format(format!("grams decode: {e}")))?;
                Ok(NGramProfile {
                    label: label.clone(),
                    n: metadata.n,
                    grams: grams.into_iter().collect(),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(NGramClassifier {
            profiles,
            prep: metadata.prep,
            n: metadata.n,
        })
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        write_atomic(path, &self.to_bytes()?)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_bytes(&fs::read(path)?)
    }
}

#[derive(Serialize, Deserialize)]
struct Metadata {
    prep: PrepConfig,
    n: usize,
    labels: Vec<String>,
}

#[cfg(test)]
mod tests {
    use super::*;

    fn profile(text: &str, n: usize) -> NGramProfile {
        NGramProfile::train("p", &[text], n)
    }

    #[test]
    fn full_containment_scores_one() {
        let p = profile("abcdef", 3);
        assert_eq!(ngram_affinity("abcd", &p), 1.0);
    }

    #[test]
    fn disjoint_alphabet_scores_zero() {
        let p = profile("abcdef", 3);
        assert_eq!(ngram_affinity("xyzw", &p), 0.0);
    }

    #[test]
    fn partial_overlap() {
        // "abcd" has grams {abc, bcd}; the profile of "abcx" has {abc, bcx}.
        let p = profile("abcx", 3);
        assert_eq!(ngram_affinity("abcd", &p), 0.5);
    }

    #[test]
    fn too_short_text_scores_zero() {
        let p = profile("abcdef", 3);
        assert_eq!(ngram_affinity("ab", &p), 0.0);
    }

    #[test]
    fn affinity_is_monotone_in_profile_growth() {
        let small = profile("abcdef", 3);
        let grown = NGramProfile::train("p", &["abcdef", "defghi"], 3);
        for text in ["abcdef", "ghijkl", "defabc"] {
            assert!(ngram_affinity(text, &grown) >= ngram_affinity(text, &small));
        }
    }

    #[test]
    fn round_trip() {
        let classifier = NGramClassifier::train(
            &[
                ("a".into(), vec!["alpha beta gamma".into()]),
                ("b".into(), vec!["omega psi chi".into()]),
            ],
            3,
            PrepConfig::default(),
        )
        .unwrap();
        let restored = NGramClassifier::from_bytes(&classifier.to_bytes().unwrap()).unwrap();
        assert_eq!(restored.classify("alpha beta"), "a");
        assert_eq!(restored.classify("psi chi"), "b");
        assert_eq!(restored.profiles[0].grams, classifier.profiles[0].grams);
    }
}
