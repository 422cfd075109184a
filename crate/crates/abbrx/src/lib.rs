//! Abbreviation disambiguation toolkit.
//!
//! Builds labeled training data for abbreviation disambiguation from an
//! unlabeled corpus by reverse substitution (replacing long-form expansions
//! with their abbreviation and keeping the expansion as the label), balances
//! and augments the data with nearby ontology concepts sampled under a
//! temperature-controlled softmax over embedding distances, and trains one
//! small convolutional classifier per abbreviation over a local context
//! window, optionally concatenated with an IDF-weighted global document
//! vector.
//!
//! The crate is organized around the pipeline stages:
//!
//! - [`corpus`]: tokenization, sentence splitting, phrase indexing, IDF.
//! - [`embeddings`]: subword (character n-gram) skip-gram word vectors.
//! - [`ontology`]: concept/inventory loading and nearest-relative search.
//! - [`datagen`]: reverse substitution and training-set construction
//!   (control / sampling-with-replacement / relative-augmented modes).
//! - [`hpo`]: per-abbreviation temperature search with a Tree-structured
//!   Parzen Estimator.
//! - [`model`]: the encoder + softmax classifier and its training loop.
//! - [`eval`]: micro/macro accuracy, bootstrap means, Wilcoxon signed-rank
//!   comparisons, and report emission.
//! - [`synth`]: a deterministic synthetic corpus/ontology generator for
//!   desk-scale experiments.
//! - [`pipeline`]: orchestration used by the `abbrx` command-line tool.

pub mod config;
pub mod corpus;
pub mod datagen;
pub mod embeddings;
pub mod eval;
pub mod hpo;
pub mod model;
pub mod ontology;
pub mod pipeline;
pub mod synth;

mod error;

pub use error::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

/// Stable 64-bit FNV-1a hash, used wherever a seed or file key must be
/// derived from a string identically across runs and platforms.
pub fn fnv1a(bytes: &[u8]) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for &b in bytes {
        h ^= u64::from(b);
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}

/// Derives a child seed from a global seed and a list of labels.
///
/// Every pipeline stage draws its randomness from a seed derived this way,
/// so per-abbreviation work can run in parallel while staying reproducible.
pub fn derive_seed(global: u64, labels: &[&str]) -> u64 {
    let mut h = global ^ 0x9e37_79b9_7f4a_7c15;
    for label in labels {
        h = splitmix64(h ^ fnv1a(label.as_bytes()));
    }
    h
}

pub(crate) fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    let mut z = x;
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}
