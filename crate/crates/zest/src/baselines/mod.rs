//! Comparison methods: character n-gram affinity, multinomial naive Bayes
//! over bag-of-words, and classic corpus-concatenation compression scoring.

mod bow;
mod concat;
mod ngram;

pub use bow::BowModel;
pub use concat::ConcatScorer;
pub use ngram::{ngram_affinity, NGramClassifier, NGramProfile};
