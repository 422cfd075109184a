//! Subword (character n-gram) skip-gram word embeddings.
//!
//! Words are represented as their own vector plus the sum of hashed
//! character n-gram vectors, so any string can be embedded even when it
//! never occurred in the training corpus. Training is skip-gram with
//! negative sampling, single-threaded and fully determined by the seed.
//!
//! Multi-word terms embed via their `_`-joined form: if the joined token is
//! in the vocabulary its composed vector is returned, otherwise the term
//! falls back to subword composition.

use std::borrow::Cow;
use std::collections::HashMap;
use std::fs::File;
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::corpus::{join_concept, tokenize, Corpus};
use crate::{fnv1a, splitmix64, Error, Result};

/// Hyperparameters for embedding training.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct EmbeddingConfig {
    pub dim: usize,
    pub min_ngram: usize,
    pub max_ngram: usize,
    /// Size of the hashed n-gram vector table.
    pub bucket_count: usize,
    /// Maximum skip-gram context radius; the effective radius is drawn
    /// uniformly from `1..=window` per position.
    pub window: usize,
    pub negative_samples: usize,
    pub epochs: usize,
    pub learning_rate: f32,
    pub seed: u64,
}

impl Default for EmbeddingConfig {
    fn default() -> Self {
        EmbeddingConfig {
            dim: 100,
            min_ngram: 3,
            max_ngram: 6,
            bucket_count: 2_000_000,
            window: 5,
            negative_samples: 5,
            epochs: 5,
            learning_rate: 0.05,
            seed: 0,
        }
    }
}

impl EmbeddingConfig {
    pub fn validate(&self) -> Result<()> {
        if self.dim == 0 {
            return Err(Error::Config("embedding dim must be > 0".into()));
        }
        if self.min_ngram == 0 || self.min_ngram > self.max_ngram {
            return Err(Error::Config(
                "require 0 < min_ngram <= max_ngram".into(),
            ));
        }
        if self.bucket_count == 0 {
            return Err(Error::Config("bucket_count must be > 0".into()));
        }
        if self.window == 0 {
            return Err(Error::Config("window must be > 0".into()));
        }
        if self.epochs == 0 {
            return Err(Error::Config("epochs must be > 0".into()));
        }
        if !(self.learning_rate > 0.0) {
            return Err(Error::Config("learning_rate must be > 0".into()));
        }
        Ok(())
    }
}

/// Hashed n-gram vector table.
///
/// Buckets are initialized from a pure function of `(seed, bucket)`, so the
/// table behaves as if all `bucket_count` vectors existed while only buckets
/// touched by training are materialized and serialized.
#[derive(Debug, Clone)]
pub struct NgramTable {
    dim: usize,
    bucket_count: usize,
    seed: u64,
    trained: HashMap<u32, Vec<f32>>,
}

impl NgramTable {
    fn new(dim: usize, bucket_count: usize, seed: u64) -> Self {
        NgramTable {
            dim,
            bucket_count,
            seed,
            trained: HashMap::new(),
        }
    }

    fn init_vector(&self, bucket: u32) -> Vec<f32> {
        let mut rng =
            ChaCha8Rng::seed_from_u64(splitmix64(self.seed ^ (u64::from(bucket) << 1 | 1)));
        let bound = 1.0 / self.dim as f32;
        (0..self.dim).map(|_| rng.gen_range(-bound..bound)).collect()
    }

    pub fn vector(&self, bucket: u32) -> Cow<'_, [f32]> {
        match self.trained.get(&bucket) {
            Some(v) => Cow::Borrowed(v.as_slice()),
            None => Cow::Owned(self.init_vector(bucket)),
        }
    }

    fn materialize(&mut self, bucket: u32) -> &mut Vec<f32> {
        if !self.trained.contains_key(&bucket) {
            let v = self.init_vector(bucket);
            self.trained.insert(bucket, v);
        }
        self.trained.get_mut(&bucket).expect("just inserted")
    }

    pub fn trained_len(&self) -> usize {
        self.trained.len()
    }
}

/// Trained embedding model: composed word vectors plus the n-gram table.
#[derive(Debug, Clone)]
pub struct EmbeddingModel {
    config: EmbeddingConfig,
    vocab: Vec<String>,
    vocab_index: HashMap<String, u32>,
    word_vecs: Vec<Vec<f32>>,
    ngrams: NgramTable,
}

/// Character n-gram buckets of a token, including the boundary-padded whole
/// word when its length falls inside the n-gram range.
fn ngram_buckets(token: &str, config: &EmbeddingConfig) -> Vec<u32> {
    let padded: Vec<char> = std::iter::once('<')
        .chain(token.chars())
        .chain(std::iter::once('>'))
        .collect();
    let mut buckets = Vec::new();
    for len in config.min_ngram..=config.max_ngram {
        if len > padded.len() {
            break;
        }
        for start in 0..=(padded.len() - len) {
            let gram: String = padded[start..start + len].iter().collect();
            buckets.push((fnv1a(gram.as_bytes()) % config.bucket_count as u64) as u32);
        }
    }
    buckets
}

impl EmbeddingModel {
    pub fn config(&self) -> &EmbeddingConfig {
        &self.config
    }

    pub fn dim(&self) -> usize {
        self.config.dim
    }

    pub fn vocab(&self) -> &[String] {
        &self.vocab
    }

    pub fn contains(&self, token: &str) -> bool {
        self.vocab_index.contains_key(token)
    }

    /// Composed vector of an in-vocabulary token.
    pub fn word_vector(&self, token: &str) -> Option<&[f32]> {
        self.vocab_index
            .get(token)
            .map(|&id| self.word_vecs[id as usize].as_slice())
    }

    fn subword_vector(&self, token: &str) -> Vec<f32> {
        let mut v = vec![0.0f32; self.config.dim];
        for bucket in ngram_buckets(token, &self.config) {
            for (x, g) in v.iter_mut().zip(self.ngrams.vector(bucket).iter()) {
                *x += g;
            }
        }
        v
    }

    /// Embeds an arbitrary term. Multi-token terms embed as their `_`-joined
    /// form; tokens outside the vocabulary compose from hashed n-grams.
    pub fn embed_term(&self, term: &str) -> Result<Vec<f32>> {
        let tokens = tokenize(term);
        if tokens.is_empty() {
            return Err(Error::Unembeddable(term.to_string()));
        }
        let joined = join_concept(&tokens)?;
        match self.word_vector(&joined) {
            Some(v) => Ok(v.to_vec()),
            None => Ok(self.subword_vector(&joined)),
        }
    }

    /// Embeds an already-tokenized phrase; see [`EmbeddingModel::embed_term`].
    pub fn embed_phrase(&self, phrase: &[String]) -> Result<Vec<f32>> {
        let joined = join_concept(phrase)?;
        match self.word_vector(&joined) {
            Some(v) => Ok(v.to_vec()),
            None => Ok(self.subword_vector(&joined)),
        }
    }

    pub fn ngram_table(&self) -> &NgramTable {
        &self.ngrams
    }
}

/// Euclidean distance between two vectors.
pub fn euclidean(a: &[f32], b: &[f32]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| {
            let d = f64::from(*x) - f64::from(*y);
            d * d
        })
        .sum::<f64>()
        .sqrt()
}

/// Cosine similarity between two vectors; 0 when either is all-zero.
pub fn cosine(a: &[f32], b: &[f32]) -> f64 {
    let dot: f64 = a.iter().zip(b).map(|(x, y)| f64::from(*x) * f64::from(*y)).sum();
    let na: f64 = a.iter().map(|x| f64::from(*x).powi(2)).sum::<f64>().sqrt();
    let nb: f64 = b.iter().map(|x| f64::from(*x).powi(2)).sum::<f64>().sqrt();
    if na == 0.0 || nb == 0.0 {
        0.0
    } else {
        dot / (na * nb)
    }
}

fn sigmoid(x: f32) -> f32 {
    let x = x.clamp(-30.0, 30.0);
    1.0 / (1.0 + (-x).exp())
}

/// Trains subword skip-gram embeddings on `corpus`.
pub fn train_embeddings(corpus: &Corpus, config: &EmbeddingConfig) -> Result<EmbeddingModel> {
    config.validate()?;
    if corpus.is_empty() || corpus.token_count() == 0 {
        return Err(Error::EmptyCorpus);
    }

    // Vocabulary in a stable order: count descending, then token.
    let mut counts: HashMap<&str, u64> = HashMap::new();
    for doc in corpus.documents() {
        for token in &doc.tokens {
            *counts.entry(token).or_insert(0) += 1;
        }
    }
    let mut vocab: Vec<(&str, u64)> = counts.into_iter().collect();
    vocab.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(b.0)));
    let vocab_tokens: Vec<String> = vocab.iter().map(|(t, _)| t.to_string()).collect();
    let vocab_counts: Vec<u64> = vocab.iter().map(|(_, c)| *c).collect();
    let vocab_index: HashMap<String, u32> = vocab_tokens
        .iter()
        .enumerate()
        .map(|(i, t)| (t.clone(), i as u32))
        .collect();

    let word_ngrams: Vec<Vec<u32>> = vocab_tokens
        .iter()
        .map(|t| ngram_buckets(t, config))
        .collect();

    // Negative-sampling distribution: unigram frequency^(3/4).
    let mut neg_cdf: Vec<f64> = Vec::with_capacity(vocab_counts.len());
    let mut acc = 0.0f64;
    for &c in &vocab_counts {
        acc += (c as f64).powf(0.75);
        neg_cdf.push(acc);
    }
    let neg_total = acc;

    let dim = config.dim;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let bound = 1.0 / dim as f32;
    let mut own: Vec<Vec<f32>> = (0..vocab_tokens.len())
        .map(|_| (0..dim).map(|_| rng.gen_range(-bound..bound)).collect())
        .collect();
    let mut out: Vec<Vec<f32>> = vec![vec![0.0f32; dim]; vocab_tokens.len()];
    let mut ngrams = NgramTable::new(dim, config.bucket_count, config.seed);

    let total_positions = (config.epochs * corpus.token_count()) as f64;
    let mut processed = 0usize;
    let lr0 = config.learning_rate;

    let mut input = vec![0.0f32; dim];
    let mut grad = vec![0.0f32; dim];

    for _epoch in 0..config.epochs {
        for doc in corpus.documents() {
            for &(start, end) in &doc.sentence_bounds {
                let ids: Vec<u32> = doc.tokens[start..end]
                    .iter()
                    .map(|t| vocab_index[t])
                    .collect();
                for center in 0..ids.len() {
                    let lr = lr0 * (1.0 - processed as f64 / total_positions).max(1e-4) as f32;
                    processed += 1;
                    let radius = rng.gen_range(1..=config.window);
                    let lo = center.saturating_sub(radius);
                    let hi = (center + radius + 1).min(ids.len());

                    let center_id = ids[center] as usize;
                    // Training forward pass averages the word vector with its
                    // subword vectors; the exported composition is their sum.
                    let scale = 1.0 / (1 + word_ngrams[center_id].len()) as f32;
                    input.copy_from_slice(&own[center_id]);
                    for &bucket in &word_ngrams[center_id] {
                        for (x, g) in input.iter_mut().zip(ngrams.vector(bucket).iter()) {
                            *x += g;
                        }
                    }
                    input.iter_mut().for_each(|x| *x *= scale);

                    for context in lo..hi {
                        if context == center {
                            continue;
                        }
                        let positive = ids[context] as usize;
                        grad.iter_mut().for_each(|g| *g = 0.0);

                        for sample in 0..=config.negative_samples {
                            let (target, label) = if sample == 0 {
                                (positive, 1.0f32)
                            } else {
                                let mut pick = positive;
                                for _ in 0..20 {
                                    let r = rng.gen_range(0.0..neg_total);
                                    pick = neg_cdf.partition_point(|&c| c <= r);
                                    if pick != positive {
                                        break;
                                    }
                                }
                                if pick == positive {
                                    continue;
                                }
                                (pick, 0.0f32)
                            };
                            let dot: f32 = input
                                .iter()
                                .zip(out[target].iter())
                                .map(|(a, b)| a * b)
                                .sum();
                            let g = (label - sigmoid(dot)) * lr;
                            for (acc, o) in grad.iter_mut().zip(out[target].iter()) {
                                *acc += g * o;
                            }
                            for (o, i) in out[target].iter_mut().zip(input.iter()) {
                                *o += g * i;
                            }
                        }

                        for (w, g) in own[center_id].iter_mut().zip(grad.iter()) {
                            *w += g * scale;
                        }
                        for &bucket in &word_ngrams[center_id] {
                            let v = ngrams.materialize(bucket);
                            for (w, g) in v.iter_mut().zip(grad.iter()) {
                                *w += g * scale;
                            }
                        }
                        for (i, g) in input.iter_mut().zip(grad.iter()) {
                            *i += g * scale;
                        }
                    }
                }
            }
        }
    }

    // Compose and store the final word vectors.
    let word_vecs: Vec<Vec<f32>> = (0..vocab_tokens.len())
        .map(|id| {
            let mut v = own[id].clone();
            for &bucket in &word_ngrams[id] {
                for (x, g) in v.iter_mut().zip(ngrams.vector(bucket).iter()) {
                    *x += g;
                }
            }
            v
        })
        .collect();
    drop(own);

    Ok(EmbeddingModel {
        config: config.clone(),
        vocab: vocab_tokens,
        vocab_index,
        word_vecs,
        ngrams,
    })
}

fn companion_path(path: &Path) -> PathBuf {
    let mut name = path
        .file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_default();
    name.push_str(".subwords.json");
    path.with_file_name(name)
}

#[derive(Serialize, Deserialize)]
struct SubwordFile {
    config: EmbeddingConfig,
    buckets: Vec<(u32, Vec<f32>)>,
}

/// Saves `model` in word2vec text format (`vocab_size dim` header, then one
/// `token v1 … vdim` row per word) plus a `<path>.subwords.json` companion
/// holding the trained n-gram buckets.
pub fn save_embeddings(model: &EmbeddingModel, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let mut text = String::new();
    text.push_str(&format!("{} {}\n", model.vocab.len(), model.config.dim));
    for (token, vec) in model.vocab.iter().zip(&model.word_vecs) {
        text.push_str(token);
        for x in vec {
            text.push(' ');
            text.push_str(&x.to_string());
        }
        text.push('\n');
    }
    std::fs::write(path, text).map_err(|e| Error::io(path, e))?;

    let mut buckets: Vec<(u32, Vec<f32>)> = model
        .ngrams
        .trained
        .iter()
        .map(|(k, v)| (*k, v.clone()))
        .collect();
    buckets.sort_by_key(|(k, _)| *k);
    let companion = SubwordFile {
        config: model.config.clone(),
        buckets,
    };
    let companion_file = companion_path(path);
    let mut file = File::create(&companion_file).map_err(|e| Error::io(&companion_file, e))?;
    let body = serde_json::to_string(&companion).expect("serializable");
    file.write_all(body.as_bytes())
        .map_err(|e| Error::io(&companion_file, e))
}

/// Loads a model saved by [`save_embeddings`].
pub fn load_embeddings(path: impl AsRef<Path>) -> Result<EmbeddingModel> {
    let path = path.as_ref();
    let companion_file = companion_path(path);
    let companion_body =
        std::fs::read_to_string(&companion_file).map_err(|e| Error::io(&companion_file, e))?;
    let companion: SubwordFile = serde_json::from_str(&companion_body)
        .map_err(|e| Error::parse(&companion_file, e.line(), e.to_string()))?;
    companion.config.validate()?;

    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut lines = BufReader::new(file).lines().enumerate();
    let (_, header) = lines
        .next()
        .ok_or_else(|| Error::parse(path, 1, "empty embeddings file"))?;
    let header = header.map_err(|e| Error::io(path, e))?;
    let mut parts = header.split_whitespace();
    let vocab_size: usize = parts
        .next()
        .and_then(|s| s.parse().ok())
        .ok_or_else(|| Error::parse(path, 1, "bad vocab size"))?;
    let dim: usize = parts
        .next()
        .and_then(|s| s.parse().ok())
        .ok_or_else(|| Error::parse(path, 1, "bad dimension"))?;
    if dim != companion.config.dim {
        return Err(Error::parse(
            path,
            1,
            format!("dimension {dim} disagrees with companion ({})", companion.config.dim),
        ));
    }

    let mut vocab = Vec::with_capacity(vocab_size);
    let mut word_vecs = Vec::with_capacity(vocab_size);
    let mut vocab_index = HashMap::with_capacity(vocab_size);
    for (lineno, line) in lines {
        let line = line.map_err(|e| Error::io(path, e))?;
        if line.is_empty() {
            continue;
        }
        let mut parts = line.split(' ');
        let token = parts
            .next()
            .filter(|t| !t.is_empty())
            .ok_or_else(|| Error::parse(path, lineno + 1, "missing token"))?;
        let vec: Vec<f32> = parts
            .map(|s| s.parse::<f32>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| Error::parse(path, lineno + 1, format!("bad float: {e}")))?;
        if vec.len() != dim {
            return Err(Error::parse(
                path,
                lineno + 1,
                format!("expected {dim} components, found {}", vec.len()),
            ));
        }
        vocab_index.insert(token.to_string(), vocab.len() as u32);
        vocab.push(token.to_string());
        word_vecs.push(vec);
    }
    if vocab.len() != vocab_size {
        return Err(Error::parse(
            path,
            1,
            format!("header claims {vocab_size} words, file has {}", vocab.len()),
        ));
    }

    let mut ngrams = NgramTable::new(
        companion.config.dim,
        companion.config.bucket_count,
        companion.config.seed,
    );
    ngrams.trained = companion.buckets.into_iter().collect();

    Ok(EmbeddingModel {
        config: companion.config,
        vocab,
        vocab_index,
        word_vecs,
        ngrams,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::Document;

    fn small_config(dim: usize, seed: u64) -> EmbeddingConfig {
        EmbeddingConfig {
            dim,
            bucket_count: 10_000,
            epochs: 15,
            seed,
            ..EmbeddingConfig::default()
        }
    }

    fn corpus_from_texts(texts: &[&str]) -> Corpus {
        let docs = texts
            .iter()
            .enumerate()
            .map(|(i, t)| Document::new(format!("d{i}"), t))
            .collect();
        Corpus::from_documents(docs).unwrap()
    }

    /// Deterministic corpus where "alpha" and "beta" only ever occur
    /// together, against sentences of fillers in varying random combinations
    /// (so filler pairs do not share contexts). Filler surfaces are chosen
    /// to share almost no character n-grams.
    fn co_occurrence_corpus() -> Corpus {
        let fillers = [
            "orbit", "mosaic", "lantern", "widget", "canyon", "velvet", "drum", "saffron",
            "quartz", "ember", "juniper", "cobalt", "harbor", "tulip", "gravel", "bishop",
            "meadow", "pixel", "walnut", "sphinx", "igloo", "prism", "fjord", "zealot",
        ];
        let mut state = 0x2545f491_4f6cdd1du64;
        let mut next = move || {
            state = state
                .wrapping_mul(6364136223846793005)
                .wrapping_add(1442695040888963407);
            (state >> 33) as usize
        };
        let mut texts = Vec::new();
        for i in 0..240 {
            let mut words: Vec<&str> = (0..6).map(|_| fillers[next() % fillers.len()]).collect();
            if i % 2 == 0 {
                let pos = 1 + next() % 4;
                words.insert(pos, "beta");
                words.insert(pos, "alpha");
            }
            texts.push(words.join(" "));
        }
        let refs: Vec<&str> = texts.iter().map(String::as_str).collect();
        corpus_from_texts(&refs)
    }

    #[test]
    fn training_is_deterministic() {
        let corpus = corpus_from_texts(&["one two three four five", "two four six eight"]);
        let config = small_config(16, 9);
        let m1 = train_embeddings(&corpus, &config).unwrap();
        let m2 = train_embeddings(&corpus, &config).unwrap();
        assert_eq!(m1.vocab, m2.vocab);
        assert_eq!(m1.word_vecs, m2.word_vecs);
        assert_eq!(m1.ngrams.trained, m2.ngrams.trained);
    }

    #[test]
    fn zero_dim_is_config_error() {
        let corpus = corpus_from_texts(&["a b"]);
        let config = EmbeddingConfig {
            dim: 0,
            ..EmbeddingConfig::default()
        };
        assert!(matches!(
            train_embeddings(&corpus, &config),
            Err(Error::Config(_))
        ));
    }

    #[test]
    fn empty_corpus_is_error() {
        let corpus = Corpus::default();
        assert!(matches!(
            train_embeddings(&corpus, &EmbeddingConfig::default()),
            Err(Error::EmptyCorpus)
        ));
    }

    #[test]
    fn co_occurring_tokens_are_similar() {
        let corpus = co_occurrence_corpus();
        let model = train_embeddings(&corpus, &small_config(24, 1)).unwrap();
        let pair = cosine(
            model.word_vector("alpha").unwrap(),
            model.word_vector("beta").unwrap(),
        );
        // Median similarity over all vocabulary pairs.
        let vocab = model.vocab();
        let mut sims = Vec::new();
        for i in 0..vocab.len() {
            for j in (i + 1)..vocab.len() {
                sims.push(cosine(
                    model.word_vector(&vocab[i]).unwrap(),
                    model.word_vector(&vocab[j]).unwrap(),
                ));
            }
        }
        sims.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let median = sims[sims.len() / 2];
        assert!(
            pair > median,
            "cos(alpha, beta) = {pair:.4} not above median {median:.4}"
        );
    }

    #[test]
    fn oov_lands_near_its_surface_form() {
        let words = [
            "hospitalization",
            "ventilator",
            "metoprolol",
            "echocardiogram",
            "pneumonia",
            "creatinine",
            "hypertension",
            "tachycardia",
        ];
        let text = words.join(" ");
        let corpus = corpus_from_texts(&[text.as_str(); 30]);
        let model = train_embeddings(&corpus, &small_config(24, 3)).unwrap();

        // A close misspelling should land nearer its surface form than a
        // random vocabulary word, for most words.
        let mut closer = 0;
        let mut total = 0;
        for (i, word) in words.iter().enumerate() {
            let oov = format!("{word}x");
            assert!(!model.contains(&oov));
            let v = model.embed_term(&oov).unwrap();
            assert!(v.iter().any(|&x| x != 0.0), "subword fallback gave zeros");
            let d_word = euclidean(&v, model.word_vector(word).unwrap());
            for (j, other) in words.iter().enumerate() {
                if i == j {
                    continue;
                }
                total += 1;
                if d_word < euclidean(&v, model.word_vector(other).unwrap()) {
                    closer += 1;
                }
            }
        }
        assert!(
            closer * 2 > total,
            "misspellings closer to surface form only {closer}/{total} times"
        );
    }

    #[test]
    fn in_vocab_term_is_stored_vector() {
        let corpus = corpus_from_texts(&["alpha beta gamma delta"]);
        let model = train_embeddings(&corpus, &small_config(8, 4)).unwrap();
        assert_eq!(
            model.embed_term("beta").unwrap(),
            model.word_vector("beta").unwrap().to_vec()
        );
    }

    #[test]
    fn multiword_term_embeds_as_joined_token() {
        let corpus = corpus_from_texts(&["gave intravenous_fluid bolus", "more intravenous_fluid"]);
        let model = train_embeddings(&corpus, &small_config(8, 5)).unwrap();
        assert!(model.contains("intravenous_fluid"));
        assert_eq!(
            model.embed_term("intravenous fluid").unwrap(),
            model.embed_term("intravenous_fluid").unwrap()
        );
    }

    #[test]
    fn unembeddable_term_errors() {
        let corpus = corpus_from_texts(&["a b c"]);
        let model = train_embeddings(&corpus, &small_config(8, 6)).unwrap();
        assert!(matches!(
            model.embed_term("..."),
            Err(Error::Unembeddable(_))
        ));
    }

    #[test]
    fn save_load_round_trip_is_exact() {
        let corpus = corpus_from_texts(&["alpha beta gamma", "beta gamma delta"]);
        let model = train_embeddings(&corpus, &small_config(12, 7)).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("embeddings.vec");
        save_embeddings(&model, &path).unwrap();
        let loaded = load_embeddings(&path).unwrap();

        assert_eq!(loaded.vocab, model.vocab);
        for token in model.vocab() {
            assert_eq!(loaded.word_vector(token), model.word_vector(token));
        }
        // OOV composition must survive the round trip too.
        assert_eq!(
            loaded.embed_term("alphabeta").unwrap(),
            model.embed_term("alphabeta").unwrap()
        );
    }

    #[test]
    fn load_reports_line_numbers() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad.vec");
        let corpus = corpus_from_texts(&["alpha beta"]);
        let model = train_embeddings(&corpus, &small_config(4, 8)).unwrap();
        save_embeddings(&model, &path).unwrap();
        // Corrupt the second row.
        let text = std::fs::read_to_string(&path).unwrap();
        let mut lines: Vec<&str> = text.lines().collect();
        let corrupted = format!("{} notafloat", lines[2].split(' ').next().unwrap());
        lines[2] = &corrupted;
        std::fs::write(&path, lines.join("\n")).unwrap();
        match load_embeddings(&path) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn topic_clusters_separate() {
        let mut texts = Vec::new();
        for i in 0..120 {
            let a = i % 6;
            let b = (i + 1) % 6;
            texts.push(format!("suna{a} sunb{b} sunc{} sund{}.", (i * 3) % 6, i % 4));
            texts.push(format!("mara{a} marb{b} marc{} mard{}.", (i * 3) % 6, i % 4));
        }
        let refs: Vec<&str> = texts.iter().map(String::as_str).collect();
        let corpus = corpus_from_texts(&refs);
        let model = train_embeddings(&corpus, &small_config(24, 11)).unwrap();

        let sun: Vec<&str> = model
            .vocab()
            .iter()
            .filter(|t| t.starts_with("sun"))
            .map(String::as_str)
            .collect();
        let mar: Vec<&str> = model
            .vocab()
            .iter()
            .filter(|t| t.starts_with("mar"))
            .map(String::as_str)
            .collect();
        let mean_cos = |xs: &[&str], ys: &[&str], skip_same: bool| {
            let mut total = 0.0;
            let mut n = 0;
            for x in xs {
                for y in ys {
                    if skip_same && x == y {
                        continue;
                    }
                    total += cosine(
                        model.word_vector(x).unwrap(),
                        model.word_vector(y).unwrap(),
                    );
                    n += 1;
                }
            }
            total / n as f64
        };
        let intra = (mean_cos(&sun, &sun, true) + mean_cos(&mar, &mar, true)) / 2.0;
        let inter = mean_cos(&sun, &mar, false);
        assert!(
            intra > inter,
            "intra-cluster cosine {intra:.4} not above inter-cluster {inter:.4}"
        );
    }
}
