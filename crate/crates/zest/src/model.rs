//! Per-class telescoping dictionaries and affinity scoring.
//!
//! Each class is modeled by `k` dictionaries of geometrically increasing
//! target sizes, all trained on the full prepared example set of the class.
//! Small dictionaries only have room for high-frequency patterns, so they
//! differentiate classes by common words; large dictionaries also capture
//! the rare ones. A text's affinity to a class is one minus its average
//! compression ratio over the class's dictionaries, and multi-class scores
//! are min-subtracted so vocabulary shared by every class cancels out.

use std::collections::HashSet;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::codec::{
    self, CodecParams, CompressContext, Dictionary, SizeBaseline,
};
use crate::container::{self, Block, MAGIC_ZEST};
use crate::error::{Result, ZestError};
use crate::parallel;
use crate::text_prep::{prepare, PrepConfig};

/// Dictionary size schedule: `count` sizes, `base_size * growth^i`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TelescopeSchedule {
    pub count: usize,
    pub base_size: usize,
    pub growth: f64,
}

impl Default for TelescopeSchedule {
    fn default() -> Self {
        TelescopeSchedule {
            count: 4,
            base_size: 16 * 1024,
            growth: 4.0,
        }
    }
}

impl TelescopeSchedule {
    pub fn with_count(count: usize) -> Self {
        TelescopeSchedule {
            count,
            ..TelescopeSchedule::default()
        }
    }

    pub fn sizes(&self) -> Vec<usize> {
        (0..self.count)
            .map(|i| (self.base_size as f64 * self.growth.powi(i as i32)).round() as usize)
            .collect()
    }

    fn validate(&self) -> Result<()> {
        if self.count == 0 || self.base_size == 0 || self.growth <= 1.0 {
            return Err(ZestError::Config(
                "telescope schedule requires count >= 1, base_size >= 1, growth > 1".into(),
            ));
        }
        Ok(())
    }
}

/// One class: its label plus the trained dictionaries and their
/// empty-string baselines (parallel lists).
#[derive(Debug, Clone)]
pub struct ClassModel {
    pub label: String,
    pub dictionaries: Vec<Dictionary>,
    pub baselines: Vec<SizeBaseline>,
    pub example_count: u64,
    pub example_bytes: u64,
}

impl ClassModel {
    /// Affinity of `text` to this class, in [0, 1]. Builds fresh codec
    /// contexts; for batch scoring prefer [`ZestModel::scorer`].
    pub fn affinity(&self, text: &str, prep: &PrepConfig, params: &CodecParams) -> Result<f64> {
        let mut contexts = self
            .dictionaries
            .iter()
            .map(|d| CompressContext::new(params, Some(d)))
            .collect::<Result<Vec<_>>>()?;
        affinity_with_contexts(&mut contexts, &self.baselines, &prepare(text, prep))
    }
}

fn affinity_with_contexts(
    contexts: &mut [CompressContext],
    baselines: &[SizeBaseline],
    prepared: &str,
) -> Result<f64> {
    let len = prepared.len();
    if len == 0 {
        return Ok(0.0);
    }
    let mut ratio_sum = 0.0;
    for (ctx, baseline) in contexts.iter_mut().zip(baselines) {
        let net = ctx.net_size_of(prepared, baseline)?;
        ratio_sum += (net as f64 / len as f64).min(1.0);
    }
    Ok(1.0 - ratio_sum / contexts.len() as f64)
}

/// Record of the dictionary trainer used, kept in model metadata.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrainerRecord {
    pub trainer: String,
    pub zstd_version: u32,
}

impl Default for TrainerRecord {
    fn default() -> Self {
        TrainerRecord {
            trainer: "zdict_from_samples_default_params".to_owned(),
            zstd_version: zstd::zstd_safe::version_number(),
        }
    }
}

/// A trained Zest model. Immutable after training.
#[derive(Debug, Clone)]
pub struct ZestModel {
    pub classes: Vec<ClassModel>,
    pub prep: PrepConfig,
    pub schedule: TelescopeSchedule,
    pub params: CodecParams,
    pub trainer: TrainerRecord,
}

/// Raw and min-subtracted per-class affinities for one text. Label order
/// is the model's class insertion order.
#[derive(Debug, Clone, Serialize)]
pub struct ScoreVector {
    pub labels: Vec<String>,
    pub raw: Vec<f64>,
    pub adjusted: Vec<f64>,
    pub argmax: String,
}

impl ScoreVector {
    pub fn raw_for(&self, label: &str) -> Option<f64> {
        self.position(label).map(|i| self.raw[i])
    }

    pub fn adjusted_for(&self, label: &str) -> Option<f64> {
        self.position(label).map(|i| self.adjusted[i])
    }

    fn position(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }
}

const SCORE_CHUNK: usize = 32;

/// First index of the maximum value; first wins on exact ties.
pub(crate) fn argmax_first(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, v) in values.iter().enumerate().skip(1) {
        if *v > values[best] {
            best = i;
        }
    }
    best
}

impl ZestModel {
    /// Trains one model from per-class example lists. Class order in the
    /// model follows the order of `examples_per_class`.
    pub fn train(
        examples_per_class: &[(String, Vec<String>)],
        prep: PrepConfig,
        schedule: TelescopeSchedule,
        params: CodecParams,
    ) -> Result<ZestModel> {
        schedule.validate()?;
        if examples_per_class.is_empty() {
            return Err(ZestError::EmptyDataset);
        }
        let mut seen = HashSet::new();
        for (label, _) in examples_per_class {
            if !seen.insert(label.as_str()) {
                return Err(ZestError::LabelMismatch(format!(
                    "duplicate class label {label:?}"
                )));
            }
        }
        let sizes = schedule.sizes();
        let classes: Vec<Result<ClassModel>> =
            parallel::map_ordered(examples_per_class, |(label, examples)| {
                train_class(label, examples, &prep, &sizes, &params)
            });
        let classes = classes.into_iter().collect::<Result<Vec<_>>>()?;
        Ok(ZestModel {
            classes,
            prep,
            schedule,
            params,
            trainer: TrainerRecord::default(),
        })
    }

    pub fn labels(&self) -> Vec<&str> {
        self.classes.iter().map(|c| c.label.as_str()).collect()
    }

    pub fn class(&self, label: &str) -> Option<&ClassModel> {
        self.classes.iter().find(|c| c.label == label)
    }

    /// Reusable batch scorer; digests every dictionary once.
    pub fn scorer(&self) -> Result<ModelScorer<'_>> {
        ModelScorer::new(self)
    }

    pub fn score(&self, text: &str) -> Result<ScoreVector> {
        self.scorer()?.score(text)
    }

    pub fn classify(&self, text: &str) -> Result<String> {
        Ok(self.score(text)?.argmax)
    }

    /// Scores texts in chunks, one scorer per worker; order is preserved.
    pub fn score_batch(&self, texts: &[String]) -> Result<Vec<ScoreVector>> {
        let chunks: Vec<&[String]> = texts.chunks(SCORE_CHUNK).collect();
        let scored: Vec<Result<Vec<ScoreVector>>> = parallel::map_ordered(&chunks, |chunk| {
            let mut scorer = self.scorer()?;
            chunk.iter().map(|t| scorer.score(t)).collect()
        });
        let mut out = Vec::with_capacity(texts.len());
        for chunk in scored {
            out.extend(chunk?);
        }
        Ok(out)
    }

    pub fn classify_batch(&self, texts: &[String]) -> Result<Vec<String>> {
        Ok(self.score_batch(texts)?.into_iter().map(|v| v.argmax).collect())
    }

    /// Affinity of `text` to one class by label.
    pub fn affinity_for(&self, text: &str, label: &str) -> Result<f64> {
        let class = self
            .class(label)
            .ok_or_else(|| ZestError::UnknownLabel(label.to_owned()))?;
        class.affinity(text, &self.prep, &self.params)
    }

    /// Sorts `texts` by descending adjusted affinity to `target_label`.
    /// Stable: equal scores keep their input order.
    pub fn rank(&self, texts: &[String], target_label: &str) -> Result<Vec<(usize, f64)>> {
        if self.class(target_label).is_none() {
            return Err(ZestError::UnknownLabel(target_label.to_owned()));
        }
        let mut scorer = self.scorer()?;
        let mut scored = Vec::with_capacity(texts.len());
        for (i, text) in texts.iter().enumerate() {
            let vector = scorer.score(text)?;
            scored.push((i, vector.adjusted_for(target_label).unwrap()));
        }
        scored.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap());
        Ok(scored)
    }

    /// Averages this model's normalized adjusted scores with an external
    /// per-label probability map (e.g. a bag-of-words classifier).
    pub fn ensemble_score(
        &self,
        text: &str,
        external: &[(String, f64)],
    ) -> Result<Vec<(String, f64)>> {
        let vector = self.score(text)?;
        ensemble_from_vector(&vector, external)
    }

    pub fn to_bytes(&self) -> Result<Vec<u8>> {
        let metadata = ZestMetadata {
            prep: self.prep.clone(),
            schedule: self.schedule.clone(),
            params: self.params.clone(),
            trainer: self.trainer.clone(),
            classes: self
                .classes
                .iter()
                .map(|c| ClassInfo {
                    label: c.label.clone(),
                    example_count: c.example_count,
                    example_bytes: c.example_bytes,
                    dictionaries: c.dictionaries.clone(),
                })
                .collect(),
        };
        let metadata_json = serde_json::to_vec(&metadata)
            .map_err(|e| ZestError::Format(format!("metadata encode: {e}")))?;
        let mut blocks = Vec::new();
        for class in &self.classes {
            for (dict, baseline) in class.dictionaries.iter().zip(&class.baselines) {
                blocks.push(Block {
                    payload: dict.payload.clone(),
                    extra: baseline.empty_compressed_size,
                });
            }
        }
        container::write_container(MAGIC_ZEST, &metadata_json, &blocks)
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<ZestModel> {
        let (metadata_json, blocks) = container::read_container(bytes, MAGIC_ZEST)?;
        let metadata: ZestMetadata = serde_json::from_slice(&metadata_json)
            .map_err(|e| ZestError::Format(format!("metadata decode: {e}")))?;
        let per_class = metadata.schedule.count;
        if blocks.len() != metadata.classes.len() * per_class {
            return Err(ZestError::Format(format!(
                "expected {} dictionary blocks, found {}",
                metadata.classes.len() * per_class,
                blocks.len()
            )));
        }
        let mut blocks = blocks.into_iter();
        let mut classes = Vec::with_capacity(metadata.classes.len());
        for info in metadata.classes {
            if info.dictionaries.len() != per_class {
                return Err(ZestError::Format(
                    "class dictionary count disagrees with schedule".into(),
                ));
            }
            let mut dictionaries = Vec::with_capacity(per_class);
            let mut baselines = Vec::with_capacity(per_class);
            for mut dict in info.dictionaries {
                let block = blocks.next().unwrap();
                dict.payload = block.payload;
                if dict.payload.is_empty() {
                    return Err(ZestError::Format("empty dictionary payload".into()));
                }
                dictionaries.push(dict);
                baselines.push(SizeBaseline {
                    empty_compressed_size: block.extra,
                });
            }
            classes.push(ClassModel {
                label: info.label,
                dictionaries,
                baselines,
                example_count: info.example_count,
                example_bytes: info.example_bytes,
            });
        }
        Ok(ZestModel {
            classes,
            prep: metadata.prep,
            schedule: metadata.schedule,
            params: metadata.params,
            trainer: metadata.trainer,
        })
    }

    /// Writes the model atomically (temp file in the same directory, then
    /// rename).
    pub fn save(&self, path: &Path) -> Result<()> {
        write_atomic(path, &self.to_bytes()?)
    }

    pub fn load(path: &Path) -> Result<ZestModel> {
        ZestModel::from_bytes(&fs::read(path)?)
    }
}

pub(crate) fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let tmp = path.with_extension("tmp");
    fs::write(&tmp, bytes)?;
    fs::rename(&tmp, path)?;
    Ok(())
}

/// Normalizes adjusted scores to sum 1 (uniform when all zero) and averages
/// them with an external probability per label.
pub fn ensemble_from_vector(
    vector: &ScoreVector,
    external: &[(String, f64)],
) -> Result<Vec<(String, f64)>> {
    if external.len() != vector.labels.len() {
        return Err(ZestError::LabelMismatch(format!(
            "model has {} labels, external map has {}",
            vector.labels.len(),
            external.len()
        )));
    }
    let sum: f64 = vector.adjusted.iter().sum();
    let normalized: Vec<f64> = if sum > 0.0 {
        vector.adjusted.iter().map(|v| v / sum).collect()
    } else {
        vec![1.0 / vector.labels.len() as f64; vector.labels.len()]
    };
    let mut out = Vec::with_capacity(vector.labels.len());
    for (label, zest) in vector.labels.iter().zip(&normalized) {
        let (_, external_p) = external
            .iter()
            .find(|(l, _)| l == label)
            .ok_or_else(|| ZestError::LabelMismatch(format!("missing label {label:?}")))?;
        out.push((label.clone(), (zest + external_p) / 2.0));
    }
    Ok(out)
}

#[derive(Serialize, Deserialize)]
struct ZestMetadata {
    prep: PrepConfig,
    schedule: TelescopeSchedule,
    params: CodecParams,
    trainer: TrainerRecord,
    classes: Vec<ClassInfo>,
}

#[derive(Serialize, Deserialize)]
struct ClassInfo {
    label: String,
    example_count: u64,
    example_bytes: u64,
    /// Dictionary payloads live in the binary blocks, not here.
    dictionaries: Vec<Dictionary>,
}

fn train_class(
    label: &str,
    examples: &[String],
    prep: &PrepConfig,
    sizes: &[usize],
    params: &CodecParams,
) -> Result<ClassModel> {
    let prepared: Vec<String> = examples
        .iter()
        .map(|e| prepare(e, prep))
        .filter(|p| !p.is_empty())
        .collect();
    if prepared.is_empty() {
        return Err(ZestError::EmptyClass(label.to_owned()));
    }
    let example_bytes: u64 = prepared.iter().map(|p| p.len() as u64).sum();
    let mut dictionaries = Vec::with_capacity(sizes.len());
    let mut baselines = Vec::with_capacity(sizes.len());
    for &size in sizes {
        let dict = codec::train_dictionary(&prepared, size, params).map_err(|e| match e {
            ZestError::TrainingFailed(msg) => {
                ZestError::TrainingFailed(format!("class {label:?}: {msg}"))
            }
            other => other,
        })?;
        let baseline = codec::empty_baseline(&dict, params)?;
        dictionaries.push(dict);
        baselines.push(baseline);
    }
    Ok(ClassModel {
        label: label.to_owned(),
        dictionaries,
        baselines,
        example_count: prepared.len() as u64,
        example_bytes,
    })
}

/// Batch scorer holding one digested codec context per dictionary. Not
/// shareable between threads; create one per worker.
pub struct ModelScorer<'m> {
    model: &'m ZestModel,
    contexts: Vec<Vec<CompressContext>>,
}

impl<'m> ModelScorer<'m> {
    fn new(model: &'m ZestModel) -> Result<Self> {
        let contexts = model
            .classes
            .iter()
            .map(|class| {
                class
                    .dictionaries
                    .iter()
                    .map(|d| CompressContext::new(&model.params, Some(d)))
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(ModelScorer { model, contexts })
    }

    pub fn score(&mut self, text: &str) -> Result<ScoreVector> {
        let prepared = prepare(text, &self.model.prep);
        let mut raw = Vec::with_capacity(self.model.classes.len());
        for (class, contexts) in self.model.classes.iter().zip(&mut self.contexts) {
            raw.push(affinity_with_contexts(contexts, &class.baselines, &prepared)?);
        }
        let min = raw.iter().cloned().fold(f64::INFINITY, f64::min);
        let adjusted: Vec<f64> = raw.iter().map(|v| v - min).collect();
        let argmax = self.model.classes[argmax_first(&adjusted)].label.clone();
        Ok(ScoreVector {
            labels: self.model.classes.iter().map(|c| c.label.clone()).collect(),
            raw,
            adjusted,
            argmax,
        })
    }

    pub fn classify(&mut self, text: &str) -> Result<String> {
        Ok(self.score(text)?.argmax)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::datasets::{synth_corpus, GeneratorSpec};
    use proptest::prelude::*;

    fn two_class_model() -> ZestModel {
        let corpus = synth_corpus(GeneratorSpec::DisjointScript, 120, 5).unwrap();
        ZestModel::train(
            &corpus.by_class(),
            PrepConfig::default(),
            TelescopeSchedule::with_count(2),
            CodecParams::default(),
        )
        .unwrap()
    }

    fn vector_from_raw(labels: &[&str], raw: &[f64]) -> ScoreVector {
        let min = raw.iter().cloned().fold(f64::INFINITY, f64::min);
        let adjusted: Vec<f64> = raw.iter().map(|v| v - min).collect();
        let argmax = labels[argmax_first(&adjusted)].to_string();
        ScoreVector {
            labels: labels.iter().map(|l| l.to_string()).collect(),
            raw: raw.to_vec(),
            adjusted,
            argmax,
        }
    }

    #[test]
    fn schedule_sizes_are_geometric() {
        let schedule = TelescopeSchedule::default();
        assert_eq!(
            schedule.sizes(),
            vec![16 * 1024, 64 * 1024, 256 * 1024, 1024 * 1024]
        );
        assert_eq!(TelescopeSchedule::with_count(1).sizes(), vec![16 * 1024]);
    }

    #[test]
    fn train_produces_expected_dictionary_count() {
        let model = two_class_model();
        assert_eq!(model.classes.len(), 2);
        for class in &model.classes {
            assert_eq!(class.dictionaries.len(), 2);
            assert_eq!(class.baselines.len(), 2);
        }
    }

    #[test]
    fn empty_class_is_rejected() {
        let data = vec![
            ("a".to_string(), vec!["text".to_string()]),
            ("b".to_string(), vec![]),
        ];
        assert!(matches!(
            ZestModel::train(
                &data,
                PrepConfig::default(),
                TelescopeSchedule::with_count(1),
                CodecParams::default()
            ),
            Err(ZestError::EmptyClass(label)) if label == "b"
        ));
    }

    #[test]
    fn empty_text_has_zero_affinity() {
        let model = two_class_model();
        for class in &model.classes {
            assert_eq!(
                class.affinity("", &model.prep, &model.params).unwrap(),
                0.0
            );
        }
    }

    #[test]
    fn training_sentence_scores_high_foreign_scores_low() {
        let corpus = synth_corpus(GeneratorSpec::DisjointScript, 200, 5).unwrap();
        let model = ZestModel::train(
            &corpus.by_class(),
            PrepConfig::default(),
            TelescopeSchedule::default(),
            CodecParams::default(),
        )
        .unwrap();
        let greek_training = &corpus.records.iter().find(|r| r.label == "greek").unwrap().text;
        let own = model.affinity_for(greek_training, "greek").unwrap();
        let other = model.affinity_for(greek_training, "cyrillic").unwrap();
        assert!(own > 0.8, "own-class affinity {own}");
        assert!(own - other > 0.3, "affinity gap {own} vs {other}");
    }

    #[test]
    fn score_vector_arithmetic() {
        let v = vector_from_raw(&["a", "b"], &[0.6, 0.4]);
        assert!((v.adjusted[0] - 0.2).abs() < 1e-12);
        assert_eq!(v.adjusted[1], 0.0);
        assert_eq!(v.argmax, "a");
    }

    #[test]
    fn equal_scores_tie_to_first_class() {
        let v = vector_from_raw(&["b", "a", "c"], &[0.5, 0.5, 0.5]);
        assert!(v.adjusted.iter().all(|&x| x == 0.0));
        assert_eq!(v.argmax, "b");
    }

    #[test]
    fn rank_puts_training_text_first() {
        let corpus = synth_corpus(GeneratorSpec::DisjointScript, 120, 5).unwrap();
        let model = two_class_model();
        let known = corpus
            .records
            .iter()
            .find(|r| r.label == "greek")
            .unwrap()
            .text
            .clone();
        let noise = "qz 7#!kw pf".to_string();
        let ranked = model.rank(&[noise, known], "greek").unwrap();
        assert_eq!(ranked[0].0, 1);
    }

    #[test]
    fn rank_empty_and_stable() {
        let model = two_class_model();
        assert!(model.rank(&[], "greek").unwrap().is_empty());
        let same = vec!["identical text".to_string(); 4];
        let ranked = model.rank(&same, "greek").unwrap();
        let order: Vec<usize> = ranked.iter().map(|(i, _)| *i).collect();
        assert_eq!(order, vec![0, 1, 2, 3]);
    }

    #[test]
    fn rank_unknown_label() {
        let model = two_class_model();
        assert!(matches!(
            model.rank(&["x".to_string()], "latin"),
            Err(ZestError::UnknownLabel(_))
        ));
    }

    #[test]
    fn ensemble_is_the_mean() {
        let v = vector_from_raw(&["a", "b"], &[1.0, 0.0]);
        let combined = ensemble_from_vector(
            &v,
            &[("a".to_string(), 0.5), ("b".to_string(), 0.5)],
        )
        .unwrap();
        assert_eq!(combined[0], ("a".to_string(), 0.75));
        assert_eq!(combined[1], ("b".to_string(), 0.25));
    }

    #[test]
    fn ensemble_uniform_fallback() {
        let v = vector_from_raw(&["a", "b"], &[0.3, 0.3]);
        let combined = ensemble_from_vector(
            &v,
            &[("a".to_string(), 0.5), ("b".to_string(), 0.5)],
        )
        .unwrap();
        assert_eq!(combined[0].1, 0.5);
        assert_eq!(combined[1].1, 0.5);
    }

    #[test]
    fn ensemble_label_mismatch() {
        let v = vector_from_raw(&["a", "b"], &[0.3, 0.1]);
        assert!(matches!(
            ensemble_from_vector(&v, &[("a".to_string(), 1.0)]),
            Err(ZestError::LabelMismatch(_))
        ));
        assert!(matches!(
            ensemble_from_vector(
                &v,
                &[("a".to_string(), 0.5), ("c".to_string(), 0.5)]
            ),
            Err(ZestError::LabelMismatch(_))
        ));
    }

    #[test]
    fn save_load_round_trip_scores_identically() {
        let model = two_class_model();
        let restored = ZestModel::from_bytes(&model.to_bytes().unwrap()).unwrap();
        for text in ["αλφα βητα", "абвг дежз", "", "mixed αλ аб"] {
            let a = model.score(text).unwrap();
            let b = restored.score(text).unwrap();
            assert_eq!(a.raw, b.raw);
            assert_eq!(a.adjusted, b.adjusted);
            assert_eq!(a.argmax, b.argmax);
        }
    }

    #[test]
    fn truncated_and_corrupted_files_are_format_errors() {
        let bytes = two_class_model().to_bytes().unwrap();
        assert!(matches!(
            ZestModel::from_bytes(&bytes[..bytes.len() / 2]),
            Err(ZestError::Format(_))
        ));
        let mut wrong_magic = bytes.clone();
        wrong_magic[0..4].copy_from_slice(b"NOPE");
        assert!(matches!(
            ZestModel::from_bytes(&wrong_magic),
            Err(ZestError::Format(_))
        ));
    }

    #[test]
    fn training_is_deterministic() {
        let corpus = synth_corpus(GeneratorSpec::SharedHead { classes: 3 }, 90, 9).unwrap();
        let train = |_: ()| {
            ZestModel::train(
                &corpus.by_class(),
                PrepConfig::default(),
                TelescopeSchedule::with_count(2),
                CodecParams::default(),
            )
            .unwrap()
            .to_bytes()
            .unwrap()
        };
        assert_eq!(train(()), train(()));
    }

    #[test]
    fn duplicate_labels_rejected() {
        let data = vec![
            ("a".to_string(), vec!["x".to_string()]),
            ("a".to_string(), vec!["y".to_string()]),
        ];
        assert!(matches!(
            ZestModel::train(
                &data,
                PrepConfig::default(),
                TelescopeSchedule::with_count(1),
                CodecParams::default()
            ),
            Err(ZestError::LabelMismatch(_))
        ));
    }

    proptest! {
        #[test]
        fn min_subtraction_properties(raw in proptest::collection::vec(0.0f64..1.0, 1..8)) {
            let labels: Vec<String> = (0..raw.len()).map(|i| format!("c{i}")).collect();
            let label_refs: Vec<&str> = labels.iter().map(|s| s.as_str()).collect();
            let v = vector_from_raw(&label_refs, &raw);
            let min_adjusted = v.adjusted.iter().cloned().fold(f64::INFINITY, f64::min);
            prop_assert_eq!(min_adjusted, 0.0);
            prop_assert!(v.adjusted.iter().all(|&x| x >= 0.0));
            // argmax agrees between raw and adjusted under the same tie rule
            prop_assert_eq!(argmax_first(&v.raw), argmax_first(&v.adjusted));
        }
    }
}
