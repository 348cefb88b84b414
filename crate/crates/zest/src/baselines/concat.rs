//! Classic concatenation scoring: the marginal compressed size of
//! appending a text to a class corpus. Lower is better; argmin classifies.
//! Every prediction recompresses the whole corpus, which is what makes the
//! dictionary approach attractive in the first place.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::codec::{CodecId, CodecParams, CompressContext};
use crate::container::{self, Block, MAGIC_CONCAT};
use crate::error::{Result, ZestError};
use crate::model::write_atomic;
use crate::parallel;
use crate::text_prep::{prepare, PrepConfig};

#[derive(Debug, Clone)]
pub struct ConcatScorer {
    pub labels: Vec<String>,
    /// Prepared class corpora, examples joined by a single newline in
    /// training-set order.
    pub corpora: Vec<Vec<u8>>,
    pub prep: PrepConfig,
    pub params: CodecParams,
    /// Compressed size of each corpus alone, fixed at construction.
    pub base_sizes: Vec<usize>,
}

impl ConcatScorer {
    pub fn build(
        examples_per_class: &[(String, Vec<String>)],
        prep: PrepConfig,
        params: CodecParams,
    ) -> Result<Self> {
        if examples_per_class.is_empty() {
            return Err(ZestError::EmptyDataset);
        }
        if params.codec == CodecId::ZstdDict {
            return Err(ZestError::UnsupportedCodec(
                "concatenation scoring uses plain codecs; pick zstd_plain, deflate, lzma or bzip2"
                    .into(),
            ));
        }
        let mut labels = Vec::new();
        let mut corpora = Vec::new();
        for (label, examples) in examples_per_class {
            let prepared: Vec<String> = examples
                .iter()
                .map(|e| prepare(e, &prep))
                .filter(|p| !p.is_empty())
                .collect();
            if prepared.is_empty() {
                return Err(ZestError::EmptyClass(label.clone()));
            }
            labels.push(label.clone());
            corpora.push(prepared.join("\n").into_bytes());
        }
        let base_sizes = corpora
            .iter()
            .map(|corpus| CompressContext::new(&params, None)?.size_of_bytes(corpus))
            .collect::<Result<Vec<_>>>()?;
        Ok(ConcatScorer {
            labels,
            corpora,
            prep,
            params,
            base_sizes,
        })
    }

    /// `len(compress(corpus + "\n" + text)) - len(compress(corpus))`.
    /// Lower means the corpus predicts the text better.
    pub fn score(&self, text: &str, label: &str) -> Result<i64> {
        let index = self
            .labels
            .iter()
            .position(|l| l == label)
            .ok_or_else(|| ZestError::UnknownLabel(label.to_owned()))?;
        self.score_index(&prepare(text, &self.prep), index)
    }

    fn score_index(&self, prepared: &str, index: usize) -> Result<i64> {
        let corpus = &self.corpora[index];
        let mut joined = Vec::with_capacity(corpus.len() + prepared.len() + 1);
        joined.extend_from_slice(corpus);
        joined.push(b'\n');
        joined.extend_from_slice(prepared.as_bytes());
        let size = CompressContext::new(&self.params, None)?.size_of_bytes(&joined)?;
        Ok(size as i64 - self.base_sizes[index] as i64)
    }

    /// Argmin of the marginal sizes, ties to the first class.
    pub fn classify(&self, text: &str) -> Result<String> {
        let prepared = prepare(text, &self.prep);
        let mut best = 0usize;
        let mut best_score = i64::MAX;
        for index in 0..self.labels.len() {
            let score = self.score_index(&prepared, index)?;
            if score < best_score {
                best_score = score;
                best = index;
            }
        }
        Ok(self.labels[best].clone())
    }

    pub fn classify_batch(&self, texts: &[String]) -> Result<Vec<String>> {
        parallel::map_ordered(texts, |t| self.classify(t))
            .into_iter()
            .collect()
    }

    pub fn to_bytes(&self) -> Result<Vec<u8>> {
        let metadata = Metadata {
            labels: self.labels.clone(),
            prep: self.prep.clone(),
            params: self.params.clone(),
            base_sizes: self.base_sizes.clone(),
        };
        let metadata_json = serde_json::to_vec(&metadata)
            .map_err(|e| ZestError::Format(format!("metadata encode: {e}")))?;
        let blocks: Vec<Block> = self
            .corpora
            .iter()
            .map(|corpus| Block {
                payload: corpus.clone(),
                extra: 0,
            })
            .collect();
        container::write_container(MAGIC_CONCAT, &metadata_json, &blocks)
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        let (metadata_json, blocks) = container::read_container(bytes, MAGIC_CONCAT)?;
        let metadata: Metadata = serde_json::from_slice(&metadata_json)
            .map_err(|e| ZestError::Format(format!("metadata decode: {e}")))?;
        if blocks.len() != metadata.labels.len() {
            return Err(ZestError::Format("corpus block count mismatch".into()));
        }
        Ok(ConcatScorer {
            labels: metadata.labels,
            corpora: blocks.into_iter().map(|b| b.payload).collect(),
            prep: metadata.prep,
            params: metadata.params,
            base_sizes: metadata.base_sizes,
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
    labels: Vec<String>,
    prep: PrepConfig,
    params: CodecParams,
    base_sizes: Vec<usize>,
}
