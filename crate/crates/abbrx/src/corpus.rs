//! Tokenization, sentence splitting, document storage, phrase indexing, and
//! IDF computation.
//!
//! Documents are tokenized once at load time: text is lowercased, split on
//! any character that is neither alphanumeric nor `_`, and segmented into
//! sentences at `.`, `!`, `?`, or newline. `_` is a valid in-token character
//! so multi-word concepts can be represented as a single token.

use std::collections::{HashMap, HashSet};
use std::fs::File;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// A tokenized document: lowercase tokens plus sentence boundaries given as
/// half-open `(start, end)` token-index ranges.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Document {
    pub id: String,
    pub tokens: Vec<String>,
    pub sentence_bounds: Vec<(usize, usize)>,
}

impl Document {
    /// Tokenizes `text` into a document.
    pub fn new(id: impl Into<String>, text: &str) -> Self {
        let sentences = split_sentences(text);
        let mut tokens = Vec::new();
        let mut sentence_bounds = Vec::new();
        for sentence in sentences {
            let start = tokens.len();
            tokens.extend(sentence);
            let end = tokens.len();
            if end > start {
                sentence_bounds.push((start, end));
            }
        }
        Document {
            id: id.into(),
            tokens,
            sentence_bounds,
        }
    }

    /// Tokens of the `i`-th sentence.
    pub fn sentence(&self, i: usize) -> &[String] {
        let (start, end) = self.sentence_bounds[i];
        &self.tokens[start..end]
    }
}

/// An immutable collection of documents with id lookup.
#[derive(Debug, Clone, Default)]
pub struct Corpus {
    documents: Vec<Document>,
    by_id: HashMap<String, usize>,
}

#[derive(Serialize, Deserialize)]
struct RawDocument {
    id: String,
    text: String,
}

impl Corpus {
    pub fn from_documents(documents: Vec<Document>) -> Result<Self> {
        let mut by_id = HashMap::with_capacity(documents.len());
        for (i, doc) in documents.iter().enumerate() {
            if by_id.insert(doc.id.clone(), i).is_some() {
                return Err(Error::Config(format!("duplicate document id {:?}", doc.id)));
            }
        }
        Ok(Corpus { documents, by_id })
    }

    /// Reads a corpus from JSONL with one `{"id": str, "text": str}` object
    /// per line.
    pub fn from_jsonl(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let file = File::open(path).map_err(|e| Error::io(path, e))?;
        let mut documents = Vec::new();
        for (lineno, line) in BufReader::new(file).lines().enumerate() {
            let line = line.map_err(|e| Error::io(path, e))?;
            if line.trim().is_empty() {
                continue;
            }
            let raw: RawDocument = serde_json::from_str(&line)
                .map_err(|e| Error::parse(path, lineno + 1, e.to_string()))?;
            documents.push(Document::new(raw.id, &raw.text));
        }
        Corpus::from_documents(documents)
    }

    pub fn documents(&self) -> &[Document] {
        &self.documents
    }

    pub fn len(&self) -> usize {
        self.documents.len()
    }

    pub fn is_empty(&self) -> bool {
        self.documents.is_empty()
    }

    pub fn get(&self, index: usize) -> &Document {
        &self.documents[index]
    }

    pub fn by_id(&self, id: &str) -> Option<&Document> {
        self.by_id.get(id).map(|&i| &self.documents[i])
    }

    /// Total token count across all documents.
    pub fn token_count(&self) -> usize {
        self.documents.iter().map(|d| d.tokens.len()).sum()
    }

    /// Returns a copy of this corpus in which every occurrence of one of
    /// `phrases` is collapsed into its `_`-joined single token. Matching is
    /// greedy leftmost-longest within each sentence. Used to prepare text
    /// for embedding training, where multi-word concepts are single tokens.
    pub fn with_phrases_joined<'a, I>(&self, phrases: I) -> Corpus
    where
        I: IntoIterator<Item = &'a [String]>,
    {
        // Bucket phrases by first token, longest first.
        let mut by_first: HashMap<&str, Vec<&'a [String]>> = HashMap::new();
        for phrase in phrases {
            if phrase.is_empty() {
                continue;
            }
            by_first.entry(&phrase[0]).or_default().push(phrase);
        }
        for bucket in by_first.values_mut() {
            bucket.sort_by(|a, b| b.len().cmp(&a.len()).then_with(|| a.cmp(b)));
            bucket.dedup();
        }

        let documents = self
            .documents
            .iter()
            .map(|doc| {
                let mut tokens = Vec::with_capacity(doc.tokens.len());
                let mut sentence_bounds = Vec::with_capacity(doc.sentence_bounds.len());
                for &(start, end) in &doc.sentence_bounds {
                    let out_start = tokens.len();
                    let mut i = start;
                    while i < end {
                        let matched = by_first
                            .get(doc.tokens[i].as_str())
                            .and_then(|bucket| {
                                bucket.iter().find(|phrase| {
                                    i + phrase.len() <= end
                                        && doc.tokens[i..i + phrase.len()] == ***phrase
                                })
                            })
                            .copied();
                        match matched {
                            Some(phrase) => {
                                tokens.push(join_concept(phrase).expect("non-empty phrase"));
                                i += phrase.len();
                            }
                            None => {
                                tokens.push(doc.tokens[i].clone());
                                i += 1;
                            }
                        }
                    }
                    sentence_bounds.push((out_start, tokens.len()));
                }
                Document {
                    id: doc.id.clone(),
                    tokens,
                    sentence_bounds,
                }
            })
            .collect();
        Corpus::from_documents(documents).expect("ids unchanged")
    }
}

fn is_token_char(c: char) -> bool {
    c.is_alphanumeric() || c == '_'
}

const SENTENCE_TERMINATORS: [char; 4] = ['.', '!', '?', '\n'];

/// Splits `text` into sentences of tokens. Sentences end at `.`, `!`, `?`,
/// or newline; empty sentences are dropped.
fn split_sentences(text: &str) -> Vec<Vec<String>> {
    let mut sentences = Vec::new();
    let mut current = Vec::new();
    let mut token = String::new();
    for c in text.chars() {
        if is_token_char(c) {
            for lc in c.to_lowercase() {
                token.push(lc);
            }
            continue;
        }
        if !token.is_empty() {
            current.push(std::mem::take(&mut token));
        }
        if SENTENCE_TERMINATORS.contains(&c) && !current.is_empty() {
            sentences.push(std::mem::take(&mut current));
        }
    }
    if !token.is_empty() {
        current.push(token);
    }
    if !current.is_empty() {
        sentences.push(current);
    }
    sentences
}

/// Tokenizes `text`: lowercase, split on any character that is neither
/// alphanumeric nor `_`, empty tokens dropped. Deterministic; empty input
/// yields an empty sequence.
pub fn tokenize(text: &str) -> Vec<String> {
    split_sentences(text).into_iter().flatten().collect()
}

/// Joins a multi-token phrase into a single `_`-joined token. Single-token
/// phrases are returned unchanged.
pub fn join_concept(phrase: &[String]) -> Result<String> {
    match phrase {
        [] => Err(Error::EmptyPhrase),
        [single] => Ok(single.clone()),
        many => Ok(many.join("_")),
    }
}

/// One location of an indexed phrase: the document (by position in the
/// corpus), the sentence index within it, and the absolute token offset.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Occurrence {
    pub doc: usize,
    pub sentence: usize,
    pub offset: usize,
}

/// Inverted index from phrases (token sequences) to their occurrences.
/// Occurrences never span sentence boundaries, and each phrase is indexed
/// independently: no longest-match preference is applied.
#[derive(Debug, Clone, Default)]
pub struct PhraseIndex {
    occurrences: HashMap<Vec<String>, Vec<Occurrence>>,
}

impl PhraseIndex {
    /// Occurrences of `phrase`, empty if the phrase was not indexed or never
    /// occurs.
    pub fn occurrences(&self, phrase: &[String]) -> &[Occurrence] {
        self.occurrences.get(phrase).map_or(&[], Vec::as_slice)
    }

    pub fn contains(&self, phrase: &[String]) -> bool {
        !self.occurrences(phrase).is_empty()
    }

    pub fn phrase_count(&self) -> usize {
        self.occurrences.len()
    }
}

/// Scans `corpus` for every occurrence of every phrase in `phrases`.
pub fn build_phrase_index<'a, I>(corpus: &Corpus, phrases: I) -> PhraseIndex
where
    I: IntoIterator<Item = &'a [String]>,
{
    let mut index: HashMap<Vec<String>, Vec<Occurrence>> = HashMap::new();
    let mut by_first: HashMap<&str, Vec<&'a [String]>> = HashMap::new();
    for phrase in phrases {
        if phrase.is_empty() {
            continue;
        }
        if index.contains_key(phrase) {
            continue;
        }
        index.insert(phrase.to_vec(), Vec::new());
        by_first.entry(&phrase[0]).or_default().push(phrase);
    }

    for (doc_idx, doc) in corpus.documents().iter().enumerate() {
        for (sent_idx, &(start, end)) in doc.sentence_bounds.iter().enumerate() {
            for offset in start..end {
                let Some(bucket) = by_first.get(doc.tokens[offset].as_str()) else {
                    continue;
                };
                for phrase in bucket {
                    if offset + phrase.len() <= end
                        && doc.tokens[offset..offset + phrase.len()] == **phrase
                    {
                        index.get_mut(*phrase).expect("phrase registered").push(
                            Occurrence {
                                doc: doc_idx,
                                sentence: sent_idx,
                                offset,
                            },
                        );
                    }
                }
            }
        }
    }
    PhraseIndex {
        occurrences: index,
    }
}

/// Smoothed inverse document frequencies: `idf(t) = ln((1+N)/(1+df(t))) + 1`.
/// Tokens never seen at build time resolve to the `df = 0` weight, so every
/// token has a positive weight.
#[derive(Debug, Clone)]
pub struct IdfTable {
    weights: HashMap<String, f64>,
    document_count: usize,
    default_weight: f64,
}

impl IdfTable {
    pub fn weight(&self, token: &str) -> f64 {
        self.weights.get(token).copied().unwrap_or(self.default_weight)
    }

    pub fn document_count(&self) -> usize {
        self.document_count
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    /// Builds a table from explicit weights; used when the weights come from
    /// somewhere other than [`compute_idf`] (tests, external files).
    pub fn from_weights(weights: HashMap<String, f64>, document_count: usize) -> Self {
        let default_weight = unseen_weight(document_count);
        IdfTable {
            weights,
            document_count,
            default_weight,
        }
    }

    /// Writes the table as TSV `token\tidf`, sorted by token.
    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let mut rows: Vec<(&String, &f64)> = self.weights.iter().collect();
        rows.sort_by(|a, b| a.0.cmp(b.0));
        let mut out = String::new();
        out.push_str(&format!("#documents\t{}\n", self.document_count));
        for (token, idf) in rows {
            out.push_str(&format!("{token}\t{idf}\n"));
        }
        std::fs::write(path, out).map_err(|e| Error::io(path, e))
    }

    /// Reads a table written by [`IdfTable::save`].
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let file = File::open(path).map_err(|e| Error::io(path, e))?;
        let mut weights = HashMap::new();
        let mut document_count = 0usize;
        for (lineno, line) in BufReader::new(file).lines().enumerate() {
            let line = line.map_err(|e| Error::io(path, e))?;
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('\t')
                .ok_or_else(|| Error::parse(path, lineno + 1, "expected token\\tidf"))?;
            if key == "#documents" {
                document_count = value
                    .parse()
                    .map_err(|e| Error::parse(path, lineno + 1, format!("bad count: {e}")))?;
                continue;
            }
            let idf: f64 = value
                .parse()
                .map_err(|e| Error::parse(path, lineno + 1, format!("bad idf: {e}")))?;
            weights.insert(key.to_string(), idf);
        }
        Ok(IdfTable::from_weights(weights, document_count))
    }
}

fn unseen_weight(document_count: usize) -> f64 {
    ((1.0 + document_count as f64) / 1.0).ln() + 1.0
}

/// Computes smoothed IDF weights over the corpus.
pub fn compute_idf(corpus: &Corpus) -> Result<IdfTable> {
    if corpus.is_empty() {
        return Err(Error::EmptyCorpus);
    }
    let n = corpus.len() as f64;
    let mut df: HashMap<&str, usize> = HashMap::new();
    for doc in corpus.documents() {
        let distinct: HashSet<&str> = doc.tokens.iter().map(String::as_str).collect();
        for token in distinct {
            *df.entry(token).or_insert(0) += 1;
        }
    }
    let weights = df
        .into_iter()
        .map(|(token, df)| {
            let idf = ((1.0 + n) / (1.0 + df as f64)).ln() + 1.0;
            (token.to_string(), idf)
        })
        .collect();
    Ok(IdfTable::from_weights(weights, corpus.len()))
}

/// Writes documents as corpus JSONL (`{"id", "text"}` per line).
pub fn write_jsonl(path: impl AsRef<Path>, docs: &[(String, String)]) -> Result<()> {
    let path = path.as_ref();
    let mut file = File::create(path).map_err(|e| Error::io(path, e))?;
    for (id, text) in docs {
        let raw = RawDocument {
            id: id.clone(),
            text: text.clone(),
        };
        let line = serde_json::to_string(&raw).expect("serializable");
        writeln!(file, "{line}").map_err(|e| Error::io(path, e))?;
    }
    Ok(())
}
