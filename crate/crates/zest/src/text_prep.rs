//! Text normalization and word padding.
//!
//! Both transforms are applied before dictionary training and again before
//! scoring, with the exact same configuration (it is stored inside the
//! trained model). Normalization strips punctuation and lowercases;
//! padding repeats short words up to a fixed character length so that short
//! and long words pull equally on the compression ratio.

use serde::{Deserialize, Serialize};
use unicode_properties::{GeneralCategoryGroup, UnicodeGeneralCategory};

pub const DEFAULT_PAD_LENGTH: usize = 10;

/// Normalization and padding settings, fixed at training time.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrepConfig {
    /// Remove punctuation and lowercase. No-op for caseless scripts.
    pub normalize: bool,
    /// Cyclically repeat each token up to `pad_length` characters.
    pub pad_words: bool,
    pub pad_length: usize,
}

impl Default for PrepConfig {
    fn default() -> Self {
        PrepConfig {
            normalize: true,
            pad_words: true,
            pad_length: DEFAULT_PAD_LENGTH,
        }
    }
}

impl PrepConfig {
    /// Identity configuration: `prepare` returns its input unchanged.
    pub fn none() -> Self {
        PrepConfig {
            normalize: false,
            pad_words: false,
            pad_length: DEFAULT_PAD_LENGTH,
        }
    }

    pub fn prepare(&self, text: &str) -> String {
        prepare(text, self)
    }
}

/// Strips Unicode punctuation (general category P*), lowercases, and
/// collapses whitespace runs to single ASCII spaces. Symbols and emoji are
/// kept; they carry class signal. Idempotent.
pub fn normalize_text(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    let mut pending_space = false;
    for ch in text.chars() {
        if ch.is_whitespace() {
            pending_space = !out.is_empty();
            continue;
        }
        if ch.general_category_group() == GeneralCategoryGroup::Punctuation {
            continue;
        }
        if pending_space {
            out.push(' ');
            pending_space = false;
        }
        for lower in ch.to_lowercase() {
            out.push(lower);
        }
    }
    out
}

/// Extends every whitespace-delimited token shorter than `pad_length`
/// characters by cyclic self-repetition, truncated at exactly `pad_length`
/// ("hello" at 10 becomes "hellohello", "ab" at 5 becomes "ababa"). Longer
/// tokens are left alone; truncating them would destroy exactly the rare
/// words the larger dictionaries exist to capture.
pub fn pad_words(text: &str, pad_length: usize) -> String {
    debug_assert!(pad_length >= 1);
    let mut out = String::with_capacity(text.len());
    for token in text.split_whitespace() {
        if !out.is_empty() {
            out.push(' ');
        }
        let char_count = token.chars().count();
        if char_count >= pad_length {
            out.push_str(token);
        } else {
            out.extend(token.chars().cycle().take(pad_length));
        }
    }
    out
}

/// Normalization followed by padding, each gated by its config flag.
pub fn prepare(text: &str, config: &PrepConfig) -> String {
    match (config.normalize, config.pad_words) {
        (false, false) => text.to_owned(),
        (true, false) => normalize_text(text),
        (false, true) => pad_words(text, config.pad_length),
        (true, true) => pad_words(&normalize_text(text), config.pad_length),
    }
}
