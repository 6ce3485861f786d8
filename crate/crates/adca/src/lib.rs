//! Lossless compression with antidictionaries.
//!
//! An antidictionary is the set of minimal forbidden words of a string:
//! words that never occur although both of their maximal proper substrings
//! do. Two codecs are provided. The static codec knows the antidictionary,
//! walks the pruned forbidden-word automaton and arithmetic-codes only the
//! branching states. The dynamic codec knows only the maximum forbidden-word
//! length, maintains a depth-bounded suffix trie while coding and spends
//! bits on branching tree contexts plus a short record per novel extension.
//!
//! A Markov-source simulator drives both codecs over sources generated by
//! an antidictionary and measures how the code length per symbol approaches
//! the source entropy rate; see [`harness`].

pub mod antidictionary;
pub mod arith;
pub mod automaton;
pub mod bits;
pub mod container;
pub mod dynamic_codec;
pub mod error;
pub mod harness;
pub mod markov;
pub mod models;
pub mod omega;
pub mod static_codec;
pub mod suffix_tree;

pub use antidictionary::{Antidictionary, Word};
pub use error::{Error, Result};

/// A source symbol. Alphabets up to 2^16 symbols are supported; file
/// compression uses 256 (bytes) or 2 (bits).
pub type Symbol = u16;
