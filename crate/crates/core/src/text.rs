//! Tokenization, vocabularies and bag-of-words documents.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::io::{BufRead, Write};
use std::path::Path;

use unicode_segmentation::UnicodeSegmentation;

use crate::{Error, Result};

const ENGLISH_STOPWORDS: &str = include_str!("../data/stopwords_en.txt");

/// Lowercased Unicode words of `text` with no filtering at all.
///
/// Keyword matching works on this stream so that phrases are matched on
/// word boundaries regardless of length or digit content.
pub fn word_tokens(text: &str) -> Vec<String> {
    text.unicode_words().map(str::to_lowercase).collect()
}

/// A set of words removed by [`tokenize`].
#[derive(Debug, Clone, Default)]
pub struct StopWords {
    words: HashSet<String>,
}

impl StopWords {
    /// The bundled English list (`data/stopwords_en.txt`).
    pub fn english() -> Self {
        Self::parse(ENGLISH_STOPWORDS)
    }

    /// One word per line; blank lines and `#` comments are ignored.
    pub fn parse(text: &str) -> Self {
        let words = text
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'))
            .map(str::to_lowercase)
            .collect();
        StopWords { words }
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Ok(Self::parse(&text))
    }

    pub fn contains(&self, word: &str) -> bool {
        self.words.contains(word)
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }
}

impl<S: Into<String>> FromIterator<S> for StopWords {
    fn from_iter<I: IntoIterator<Item = S>>(iter: I) -> Self {
        StopWords {
            words: iter.into_iter().map(|w| w.into().to_lowercase()).collect(),
        }
    }
}

/// Normalized word tokens of one document.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TokenStream {
    pub tokens: Vec<String>,
}

impl TokenStream {
    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &str> {
        self.tokens.iter().map(String::as_str)
    }
}

fn keep_token(token: &str) -> bool {
    let mut chars = token.chars();
    // single characters
    if chars.next().is_none() || chars.next().is_none() {
        return false;
    }
    // numbers, including ones with separators such as "200,000"
    token.chars().any(char::is_alphabetic)
}

/// Splits `text` into lowercase words, dropping 1-character and numeric
/// tokens, and stopwords when a list is given.
pub fn tokenize(text: &str, stopwords: Option<&StopWords>) -> TokenStream {
    let tokens = text
        .unicode_words()
        .map(str::to_lowercase)
        .filter(|t| keep_token(t))
        .filter(|t| stopwords.is_none_or(|s| !s.contains(t)))
        .collect();
    TokenStream { tokens }
}

/// Bijective word ↔ id mapping with per-word document frequencies.
///
/// Ids follow lexicographic word order.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Vocabulary {
    words: Vec<String>,
    ids: HashMap<String, u32>,
    doc_frequency: Vec<u32>,
}

impl Vocabulary {
    /// Builds a vocabulary from explicit words; document frequencies are 0.
    pub fn from_words<I, S>(words: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let sorted: std::collections::BTreeSet<String> =
            words.into_iter().map(Into::into).collect();
        let words: Vec<String> = sorted.into_iter().collect();
        let ids = words
            .iter()
            .enumerate()
            .map(|(i, w)| (w.clone(), i as u32))
            .collect();
        let doc_frequency = vec![0; words.len()];
        Vocabulary {
            words,
            ids,
            doc_frequency,
        }
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn id_of(&self, word: &str) -> Option<u32> {
        self.ids.get(word).copied()
    }

    pub fn word_of(&self, id: u32) -> Option<&str> {
        self.words.get(id as usize).map(String::as_str)
    }

    pub fn doc_frequency(&self, id: u32) -> Option<u32> {
        self.doc_frequency.get(id as usize).copied()
    }

    pub fn words(&self) -> &[String] {
        &self.words
    }

    /// Stable 64-bit FNV-1a fingerprint of the word list.
    pub fn fingerprint(&self) -> u64 {
        let mut hash: u64 = 0xcbf2_9ce4_8422_2325;
        for w in &self.words {
            for b in w.bytes().chain(std::iter::once(0u8)) {
                hash ^= u64::from(b);
                hash = hash.wrapping_mul(0x0000_0100_0000_01b3);
            }
        }
        hash
    }

    /// Two-column `id<TAB>word` export.
    pub fn write_tsv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        for (i, w) in self.words.iter().enumerate() {
            writeln!(out, "{i}\t{w}")?;
        }
        Ok(())
    }

    /// Reads the two-column export back. Document frequencies are not stored
    /// in that format and come back as 0.
    pub fn read_tsv<R: BufRead>(input: R) -> Result<Self> {
        let mut words = Vec::new();
        for (n, line) in input.lines().enumerate() {
            let line = line.map_err(|e| Error::parse(n + 1, e.to_string()))?;
            if line.is_empty() {
                continue;
            }
            let (id, word) = line
                .split_once('\t')
                .ok_or_else(|| Error::parse(n + 1, "expected `id<TAB>word`"))?;
            let id: usize = id
                .parse()
                .map_err(|_| Error::parse(n + 1, format!("bad id `{id}`")))?;
            if id != words.len() {
                return Err(Error::parse(n + 1, "ids must be consecutive from 0"));
            }
            words.push(word.to_string());
        }
        let vocab = Vocabulary::from_words(words.iter().cloned());
        if vocab.words != words {
            return Err(Error::parse(0, "vocabulary is not in lexicographic order"));
        }
        Ok(vocab)
    }
}

/// Keeps words whose document frequency lies in `[min_df, max_df_ratio * N]`.
pub fn build_vocabulary(
    docs: &[TokenStream],
    min_df: u32,
    max_df_ratio: f64,
) -> Result<Vocabulary> {
    if min_df < 1 {
        return Err(Error::domain("min_df must be at least 1"));
    }
    if !(max_df_ratio > 0.0 && max_df_ratio <= 1.0) {
        return Err(Error::domain("max_df_ratio must lie in (0, 1]"));
    }
    let mut df: BTreeMap<&str, u32> = BTreeMap::new();
    for doc in docs {
        let unique: HashSet<&str> = doc.iter().collect();
        for w in unique {
            *df.entry(w).or_default() += 1;
        }
    }
    let max_df = max_df_ratio * docs.len() as f64;
    let mut words = Vec::new();
    let mut doc_frequency = Vec::new();
    for (w, n) in df {
        if n >= min_df && f64::from(n) <= max_df {
            words.push(w.to_string());
            doc_frequency.push(n);
        }
    }
    let ids = words
        .iter()
        .enumerate()
        .map(|(i, w)| (w.clone(), i as u32))
        .collect();
    Ok(Vocabulary {
        words,
        ids,
        doc_frequency,
    })
}

/// Sparse word counts of one document, sorted by word id.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct BowDocument {
    pub article_id: String,
    pub counts: Vec<(u32, u32)>,
}

impl BowDocument {
    pub fn total(&self) -> u64 {
        self.counts.iter().map(|&(_, c)| u64::from(c)).sum()
    }

    pub fn count_of(&self, id: u32) -> u32 {
        self.counts
            .binary_search_by_key(&id, |&(w, _)| w)
            .map(|i| self.counts[i].1)
            .unwrap_or(0)
    }
}

/// Counts in-vocabulary tokens; everything else is dropped.
pub fn to_bow(article_id: &str, stream: &TokenStream, vocab: &Vocabulary) -> BowDocument {
    let mut counts: BTreeMap<u32, u32> = BTreeMap::new();
    for id in stream.iter().filter_map(|t| vocab.id_of(t)) {
        *counts.entry(id).or_default() += 1;
    }
    BowDocument {
        article_id: article_id.to_string(),
        counts: counts.into_iter().collect(),
    }
}
