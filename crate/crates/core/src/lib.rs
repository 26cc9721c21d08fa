//! Enumeration of classical pattern-avoiding permutations by right insertion.
//!
//! A permutation grows one entry at a time on the right. For a fixed pattern
//! `v` of length `k`, the only information needed to know which insertions
//! keep the permutation `v`-avoiding is its *frontier*: the `(k-1)`-partial
//! occurrences of `v`, each carrying the contiguous interval of ranks that
//! would complete it. Avoiders of length `n` are then in bijection with legal
//! insertion histories, which [`engine`] counts both by depth-first search
//! and by pushing a measure forward through the dual transfer operator.
//!
//! [`analysis`] evaluates the weighted-norm estimates that control that
//! operator on finite truncations, and [`rv`] abstracts the whole setup into
//! a generic right-visible growth system with a second, unrelated instance
//! (walks in a strip).

pub mod analysis;
pub mod cli;
pub mod engine;
pub mod error;
pub mod frontier;
pub mod perm;
pub mod rv;

pub use error::{Error, Result};
pub use frontier::{FrontierElement, FrontierMode, PartialOccurrence, RankInterval, State};
pub use perm::{InsertionCode, Pattern, Permutation};
