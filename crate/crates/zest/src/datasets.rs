//! Corpus ingestion, deterministic splits, and synthetic corpora for the
//! acceptance suite. Loaders take local paths only and normalize text to
//! UTF-8 with LF newlines and no byte-order mark.

use std::collections::{HashMap, HashSet};
use std::fs;
use std::path::Path;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Result, ZestError};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Record {
    pub text: String,
    pub label: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabeledDataset {
    pub records: Vec<Record>,
    pub source: String,
}

impl LabeledDataset {
    pub fn new(records: Vec<Record>, source: impl Into<String>) -> Result<Self> {
        if records.iter().any(|r| r.label.is_empty()) {
            return Err(ZestError::Parse {
                line: 0,
                message: "record with empty label".into(),
            });
        }
        Ok(LabeledDataset {
            records,
            source: source.into(),
        })
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    /// Distinct labels in first-appearance order.
    pub fn labels(&self) -> Vec<String> {
        let mut seen = HashSet::new();
        let mut out = Vec::new();
        for record in &self.records {
            if seen.insert(record.label.as_str()) {
                out.push(record.label.clone());
            }
        }
        out
    }

    /// Texts grouped per label, labels in first-appearance order. The
    /// shape the training APIs take.
    pub fn by_class(&self) -> Vec<(String, Vec<String>)> {
        let mut index: HashMap<String, usize> = HashMap::new();
        let mut groups: Vec<(String, Vec<String>)> = Vec::new();
        for record in &self.records {
            let i = *index.entry(record.label.clone()).or_insert_with(|| {
                groups.push((record.label.clone(), Vec::new()));
                groups.len() - 1
            });
            groups[i].1.push(record.text.clone());
        }
        groups
    }
}

fn clean_text(raw: &str) -> String {
    let stripped = raw.strip_prefix('\u{feff}').unwrap_or(raw);
    stripped.replace("\r\n", "\n").replace('\r', "\n")
}

/// Loads a CSV file (RFC 4180, with a header row) taking text and label
/// from the named columns.
pub fn load_csv(path: &Path, text_column: &str, label_column: &str) -> Result<LabeledDataset> {
    let content = clean_text(&fs::read_to_string(path)?);
    let mut reader = csv::Reader::from_reader(content.as_bytes());
    let headers = reader
        .headers()
        .map_err(|e| ZestError::Parse {
            line: 1,
            message: e.to_string(),
        })?
        .clone();
    let text_index = headers
        .iter()
        .position(|h| h == text_column)
        .ok_or_else(|| ZestError::Parse {
            line: 1,
            message: format!("no column {text_column:?} in header"),
        })?;
    let label_index = headers
        .iter()
        .position(|h| h == label_column)
        .ok_or_else(|| ZestError::Parse {
            line: 1,
            message: format!("no column {label_column:?} in header"),
        })?;

    let mut records = Vec::new();
    for (i, row) in reader.records().enumerate() {
        let line = i + 2; // 1-based, after the header
        let row = row.map_err(|e| ZestError::Parse {
            line,
            message: e.to_string(),
        })?;
        let text = row.get(text_index).ok_or_else(|| ZestError::Parse {
            line,
            message: "missing text field".into(),
        })?;
        let label = row.get(label_index).ok_or_else(|| ZestError::Parse {
            line,
            message: "missing label field".into(),
        })?;
        if label.is_empty() {
            return Err(ZestError::Parse {
                line,
                message: "empty label".into(),
            });
        }
        records.push(Record {
            text: text.to_owned(),
            label: label.to_owned(),
        });
    }
    if records.is_empty() {
        return Err(ZestError::EmptyDataset);
    }
    LabeledDataset::new(records, path.display().to_string())
}

/// Loads JSON Lines, taking text and label from the named top-level fields.
pub fn load_jsonl(path: &Path, text_field: &str, label_field: &str) -> Result<LabeledDataset> {
    let content = clean_text(&fs::read_to_string(path)?);
    let mut records = Vec::new();
    for (i, raw_line) in content.lines().enumerate() {
        let line = i + 1;
        if raw_line.trim().is_empty() {
            continue;
        }
        let value: serde_json::Value =
            serde_json::from_str(raw_line).map_err(|e| ZestError::Parse {
                line,
                message: e.to_string(),
            })?;
        let text = value
            .get(text_field)
            .and_then(|v| v.as_str())
            .ok_or_else(|| ZestError::Parse {
                line,
                message: format!("missing string field {text_field:?}"),
            })?;
        let label = value
            .get(label_field)
            .and_then(|v| v.as_str())
            .ok_or_else(|| ZestError::Parse {
                line,
                message: format!("missing string field {label_field:?}"),
            })?;
        records.push(Record {
            text: text.to_owned(),
            label: label.to_owned(),
        });
    }
    if records.is_empty() {
        return Err(ZestError::EmptyDataset);
    }
    LabeledDataset::new(records, path.display().to_string())
}

/// Loads a directory-per-class layout (the 20-newsgroups convention): one
/// subdirectory per label, one file per document. Directories and files
/// are visited in name order so record order is deterministic.
pub fn load_dir_per_class(root: &Path) -> Result<LabeledDataset> {
    let mut class_dirs: Vec<_> = fs::read_dir(root)?
        .collect::<std::io::Result<Vec<_>>>()?
        .into_iter()
        .filter(|e| e.path().is_dir())
        .collect();
    class_dirs.sort_by_key(|e| e.file_name());

    let mut records = Vec::new();
    for dir in class_dirs {
        let label = dir.file_name().to_string_lossy().into_owned();
        let mut files: Vec<_> = fs::read_dir(dir.path())?
            .collect::<std::io::Result<Vec<_>>>()?
            .into_iter()
            .filter(|e| e.path().is_file())
            .collect();
        files.sort_by_key(|e| e.file_name());
        for file in files {
            let text = clean_text(&fs::read_to_string(file.path())?);
            records.push(Record {
                text,
                label: label.clone(),
            });
        }
    }
    if records.is_empty() {
        return Err(ZestError::EmptyDataset);
    }
    LabeledDataset::new(records, root.display().to_string())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SplitSpec {
    pub test_fraction: f64,
    pub seed: u64,
    pub stratified: bool,
}

impl Default for SplitSpec {
    fn default() -> Self {
        SplitSpec {
            test_fraction: 0.2,
            seed: 0,
            stratified: true,
        }
    }
}

impl SplitSpec {
    pub fn new(test_fraction: f64, seed: u64) -> Self {
        SplitSpec {
            test_fraction,
            seed,
            stratified: true,
        }
    }
}

/// Deterministic train/test partition. Stratified by default: per-class
/// test counts are `round(fraction * class_size)`, so class proportions
/// hold within one record.
pub fn split(dataset: &LabeledDataset, spec: &SplitSpec) -> Result<(LabeledDataset, LabeledDataset)> {
    if !(spec.test_fraction > 0.0 && spec.test_fraction < 1.0) {
        return Err(ZestError::Config(format!(
            "test_fraction must be in (0, 1), got {}",
            spec.test_fraction
        )));
    }
    if dataset.is_empty() {
        return Err(ZestError::EmptyDataset);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut test_indices: HashSet<usize> = HashSet::new();

    if spec.stratified {
        let mut groups: Vec<(String, Vec<usize>)> = Vec::new();
        for (i, record) in dataset.records.iter().enumerate() {
            match groups.iter_mut().find(|(l, _)| *l == record.label) {
                Some((_, indices)) => indices.push(i),
                None => groups.push((record.label.clone(), vec![i])),
            }
        }
        for (_, mut indices) in groups {
            indices.shuffle(&mut rng);
            let take = (spec.test_fraction * indices.len() as f64).round() as usize;
            test_indices.extend(indices.into_iter().take(take));
        }
    } else {
        let mut indices: Vec<usize> = (0..dataset.len()).collect();
        indices.shuffle(&mut rng);
        let take = (spec.test_fraction * indices.len() as f64).round() as usize;
        test_indices.extend(indices.into_iter().take(take));
    }

    let mut train = Vec::new();
    let mut test = Vec::new();
    for (i, record) in dataset.records.iter().enumerate() {
        if test_indices.contains(&i) {
            test.push(record.clone());
        } else {
            train.push(record.clone());
        }
    }
    Ok((
        LabeledDataset::new(train, format!("{}#train", dataset.source))?,
        LabeledDataset::new(test, format!("{}#test", dataset.source))?,
    ))
}

/// Built-in synthetic corpus generators.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GeneratorSpec {
    /// Two classes of word salad in disjoint scripts (Greek vs Cyrillic).
    DisjointScript,
    /// All classes share the same 100 high-frequency tokens with identical
    /// frequencies and differ only in a long tail of rare tokens.
    SharedHead { classes: usize },
    /// Each class has its own vocabulary; trivially separable.
    DisjointVocab { classes: usize },
}

impl GeneratorSpec {
    pub fn parse(name: &str, classes: usize) -> Result<Self> {
        match name {
            "disjoint-script" => Ok(GeneratorSpec::DisjointScript),
            "shared-head" => Ok(GeneratorSpec::SharedHead { classes }),
            "disjoint-vocab" => Ok(GeneratorSpec::DisjointVocab { classes }),
            other => Err(ZestError::Config(format!(
                "unknown generator {other:?} (expected disjoint-script, shared-head or disjoint-vocab)"
            ))),
        }
    }
}

pub const SHARED_HEAD_SIZE: usize = 100;
const RARE_TAIL_SIZE: usize = 400;
const SHARED_TOKEN_PROBABILITY: f64 = 0.7;

struct Alphabet {
    consonants: &'static [char],
    vowels: &'static [char],
}

const LATIN: Alphabet = Alphabet {
    consonants: &['b', 'c', 'd', 'f', 'g', 'k', 'l', 'm', 'n', 'p', 'r', 's', 't', 'v', 'z'],
    vowels: &['a', 'e', 'i', 'o', 'u'],
};
const GREEK: Alphabet = Alphabet {
    consonants: &['β', 'γ', 'δ', 'ζ', 'θ', 'κ', 'λ', 'μ', 'ν', 'π', 'ρ', 'σ', 'τ', 'φ', 'χ'],
    vowels: &['α', 'ε', 'η', 'ι', 'ο', 'υ', 'ω'],
};
const CYRILLIC: Alphabet = Alphabet {
    consonants: &['б', 'в', 'г', 'д', 'ж', 'з', 'к', 'л', 'м', 'н', 'п', 'р', 'с', 'т', 'ф'],
    vowels: &['а', 'е', 'и', 'о', 'у', 'ы', 'э', 'ю', 'я'],
};

fn make_word(rng: &mut ChaCha8Rng, alphabet: &Alphabet, syllables: std::ops::Range<usize>) -> String {
    let count = rng.gen_range(syllables);
    let mut word = String::with_capacity(count * 2);
    for _ in 0..count {
        word.push(alphabet.consonants[rng.gen_range(0..alphabet.consonants.len())]);
        word.push(alphabet.vowels[rng.gen_range(0..alphabet.vowels.len())]);
    }
    word
}

fn make_vocab(
    rng: &mut ChaCha8Rng,
    alphabet: &Alphabet,
    count: usize,
    syllables: std::ops::Range<usize>,
    taken: &mut HashSet<String>,
) -> Vec<String> {
    let mut vocab = Vec::with_capacity(count);
    while vocab.len() < count {
        let word = make_word(rng, alphabet, syllables.clone());
        if taken.insert(word.clone()) {
            vocab.push(word);
        }
    }
    vocab
}

/// Deterministic synthetic corpus: same spec and seed, byte-identical
/// output.
pub fn synth_corpus(spec: GeneratorSpec, size: usize, seed: u64) -> Result<LabeledDataset> {
    if size == 0 {
        return Err(ZestError::EmptyDataset);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let records = match spec {
        GeneratorSpec::DisjointScript => {
            let mut records = Vec::with_capacity(size);
            for (label, alphabet) in [("greek", &GREEK), ("cyrillic", &CYRILLIC)] {
                let docs = if label == "greek" { size - size / 2 } else { size / 2 };
                for _ in 0..docs {
                    let words = rng.gen_range(8..15);
                    let text = (0..words)
                        .map(|_| make_word(&mut rng, alphabet, 2..5))
                        .collect::<Vec<_>>()
                        .join(" ");
                    records.push(Record {
                        text,
                        label: label.to_owned(),
                    });
                }
            }
            records
        }
        GeneratorSpec::SharedHead { classes } => {
            if classes < 2 {
                return Err(ZestError::Config("shared-head needs >= 2 classes".into()));
            }
            let mut taken = HashSet::new();
            // Long shared words, short rare words: padding equalizes their
            // pull on the compression ratio.
            let shared = make_vocab(&mut rng, &LATIN, SHARED_HEAD_SIZE, 3..6, &mut taken);
            let tails: Vec<Vec<String>> = (0..classes)
                .map(|_| make_vocab(&mut rng, &LATIN, RARE_TAIL_SIZE, 1..3, &mut taken))
                .collect();
            let mut records = Vec::with_capacity(size);
            for (class, tail) in tails.iter().enumerate() {
                let docs = size / classes + usize::from(class < size % classes);
                for _ in 0..docs {
                    let words = rng.gen_range(20..31);
                    let text = (0..words)
                        .map(|_| {
                            if rng.gen_bool(SHARED_TOKEN_PROBABILITY) {
                                shared[rng.gen_range(0..shared.len())].clone()
                            } else {
                                tail[rng.gen_range(0..tail.len())].clone()
                            }
                        })
                        .collect::<Vec<_>>()
                        .join(" ");
                    records.push(Record {
                        text,
                        label: format!("class_{class}"),
                    });
                }
            }
            records
        }
        GeneratorSpec::DisjointVocab { classes } => {
            if classes < 2 {
                return Err(ZestError::Config("disjoint-vocab needs >= 2 classes".into()));
            }
            let mut taken = HashSet::new();
            let vocabs: Vec<Vec<String>> = (0..classes)
                .map(|_| make_vocab(&mut rng, &LATIN, 200, 2..5, &mut taken))
                .collect();
            let mut records = Vec::with_capacity(size);
            for (class, vocab) in vocabs.iter().enumerate() {
                let docs = size / classes + usize::from(class < size % classes);
                for _ in 0..docs {
                    let words = rng.gen_range(8..15);
                    let text = (0..words)
                        .map(|_| vocab[rng.gen_range(0..vocab.len())].clone())
                        .collect::<Vec<_>>()
                        .join(" ");
                    records.push(Record {
                        text,
                        label: format!("class_{class}"),
                    });
                }
            }
            records
        }
    };
    LabeledDataset::new(records, format!("synth:{spec:?}:{size}:{seed}"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashMap;
    use std::io::Write;

    #[test]
    fn csv_loads_in_file_order() {
        let mut file = tempfile::NamedTempFile::new().unwrap();
        writeln!(file, "text,label\nfirst doc,a\nsecond doc,b").unwrap();
        let ds = load_csv(file.path(), "text", "label").unwrap();
        assert_eq!(ds.len(), 2);
        assert_eq!(ds.records[0].text, "first doc");
        assert_eq!(ds.records[1].label, "b");
    }

    #[test]
    fn csv_missing_column_names_header() {
        let mut file = tempfile::NamedTempFile::new().unwrap();
        writeln!(file, "text,label\nx,a").unwrap();
        match load_csv(file.path(), "body", "label") {
            Err(ZestError::Parse { line: 1, message }) => {
                assert!(message.contains("body"), "{message}")
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn jsonl_reports_malformed_line() {
        let mut file = tempfile::NamedTempFile::new().unwrap();
        writeln!(file, "{{\"t\": \"ok\", \"l\": \"a\"}}").unwrap();
        writeln!(file, "not json").unwrap();
        match load_jsonl(file.path(), "t", "l") {
            Err(ZestError::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn dir_per_class_uses_folder_names() {
        let root = tempfile::tempdir().unwrap();
        for (class, doc, body) in [
            ("sport", "1.txt", "match"),
            ("sport", "2.txt", "goal"),
            ("tech", "1.txt", "chip"),
            ("tech", "2.txt", "code"),
        ] {
            let dir = root.path().join(class);
            std::fs::create_dir_all(&dir).unwrap();
            std::fs::write(dir.join(doc), body).unwrap();
        }
        let ds = load_dir_per_class(root.path()).unwrap();
        assert_eq!(ds.len(), 4);
        assert_eq!(ds.labels(), vec!["sport", "tech"]);
    }

    #[test]
    fn split_is_stratified_and_deterministic() {
        let records: Vec<Record> = (0..100)
            .map(|i| Record {
                text: format!("doc {i}"),
                label: if i % 2 == 0 { "even".into() } else { "odd".into() },
            })
            .collect();
        let ds = LabeledDataset::new(records, "test").unwrap();
        let spec = SplitSpec::new(0.2, 42);
        let (train, test) = split(&ds, &spec).unwrap();
        assert_eq!(train.len(), 80);
        assert_eq!(test.len(), 20);
        let mut per_class: HashMap<&str, usize> = HashMap::new();
        for r in &test.records {
            *per_class.entry(r.label.as_str()).or_default() += 1;
        }
        assert_eq!(per_class["even"], 10);
        assert_eq!(per_class["odd"], 10);

        let (train2, test2) = split(&ds, &spec).unwrap();
        assert_eq!(train, train2);
        assert_eq!(test, test2);

        let (_, test3) = split(&ds, &SplitSpec::new(0.2, 43)).unwrap();
        assert_eq!(test3.len(), 20);
        assert_ne!(test.records, test3.records);
    }

    #[test]
    fn split_is_a_partition() {
        let ds = synth_corpus(GeneratorSpec::DisjointScript, 101, 7).unwrap();
        let (train, test) = split(&ds, &SplitSpec::new(0.3, 1)).unwrap();
        assert_eq!(train.len() + test.len(), ds.len());
        let all: HashSet<String> = ds.records.iter().map(|r| r.text.clone()).collect();
        for r in train.records.iter().chain(&test.records) {
            assert!(all.contains(&r.text));
        }
        let train_set: HashSet<&str> = train.records.iter().map(|r| r.text.as_str()).collect();
        assert!(test.records.iter().all(|r| !train_set.contains(r.text.as_str())));
    }

    #[test]
    fn disjoint_script_corpus_shape() {
        let ds = synth_corpus(GeneratorSpec::DisjointScript, 200, 7).unwrap();
        assert_eq!(ds.len(), 200);
        let greek = ds.records.iter().filter(|r| r.label == "greek").count();
        assert_eq!(greek, 100);
        for r in &ds.records {
            let expect_greek = r.label == "greek";
            for ch in r.text.chars().filter(|c| !c.is_whitespace()) {
                let is_greek = ('α'..='ω').contains(&ch);
                assert_eq!(is_greek, expect_greek, "{ch} in {}", r.label);
            }
        }
    }

    #[test]
    fn shared_head_tokens_are_shared_and_frequent() {
        let ds = synth_corpus(GeneratorSpec::SharedHead { classes: 3 }, 600, 7).unwrap();
        let mut per_class: HashMap<&str, HashMap<&str, usize>> = HashMap::new();
        for r in &ds.records {
            let counts = per_class.entry(r.label.as_str()).or_default();
            for token in r.text.split_whitespace() {
                *counts.entry(token).or_default() += 1;
            }
        }
        // The 100 most frequent tokens of every class must coincide.
        let mut tops: Vec<HashSet<&str>> = Vec::new();
        for counts in per_class.values() {
            let mut sorted: Vec<(&str, usize)> = counts.iter().map(|(t, c)| (*t, *c)).collect();
            sorted.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(b.0)));
            tops.push(sorted.into_iter().take(SHARED_HEAD_SIZE).map(|(t, _)| t).collect());
        }
        for top in &tops[1..] {
            assert_eq!(top, &tops[0]);
        }
    }

    #[test]
    fn synth_is_deterministic() {
        let a = synth_corpus(GeneratorSpec::SharedHead { classes: 4 }, 100, 3).unwrap();
        let b = synth_corpus(GeneratorSpec::SharedHead { classes: 4 }, 100, 3).unwrap();
        assert_eq!(a, b);
        let c = synth_corpus(GeneratorSpec::SharedHead { classes: 4 }, 100, 4).unwrap();
        assert_ne!(a, c);
    }
}
