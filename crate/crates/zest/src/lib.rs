//! Zest: compression-based text affinity scoring.
//!
//! A class of texts is modeled by a set of zstd compression dictionaries of
//! telescoping sizes, trained on the class's examples. A text's affinity to
//! the class is one minus its average byte compression ratio across those
//! dictionaries: text that resembles the training examples compresses well
//! and scores near 1.0, unrelated text scores near 0.0. The scores are
//! language-agnostic and usable directly for classification and ranking, or
//! as features for a downstream model.
//!
//! The crate also bundles the baselines Zest is usually compared against
//! (character n-gram affinity, multinomial naive Bayes over bag-of-words,
//! and classic corpus-concatenation compression scoring) plus dataset
//! loaders, synthetic corpus generators, and an evaluation harness.

pub mod baselines;
pub mod codec;
pub mod container;
pub mod datasets;
pub mod error;
pub mod eval;
pub mod model;
pub mod parallel;
pub mod text_prep;

pub use codec::{CodecId, CodecParams, Dictionary, SizeBaseline};
pub use datasets::{LabeledDataset, Record, SplitSpec};
pub use error::{Result, ZestError};
pub use eval::EvaluationReport;
pub use model::{ClassModel, ScoreVector, TelescopeSchedule, ZestModel};
pub use text_prep::PrepConfig;
