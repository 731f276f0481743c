use std::collections::HashMap;

use super::TopicModel;
use crate::text::{TokenStream, Vocabulary};
use crate::{Error, Result};

/// Width of the boolean sliding window used for co-occurrence counts.
pub const NPMI_WINDOW: usize = 110;
/// Additive smoothing inside the NPMI logarithm.
pub const NPMI_EPSILON: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct Coherence {
    pub per_topic: Vec<f64>,
    pub mean: f64,
    /// Top words that never occur in the reference corpus. Pairs involving
    /// them score 0.
    pub unobserved: Vec<String>,
}

/// NPMI of a word pair from window probabilities.
pub(crate) fn npmi(p_i: f64, p_j: f64, p_ij: f64) -> f64 {
    if p_i == 0.0 || p_j == 0.0 {
        return 0.0;
    }
    // both words in every window: perfectly associated, but the formula is 0/0
    if p_ij >= 1.0 {
        return 1.0;
    }
    let pmi = ((p_ij + NPMI_EPSILON) / (p_i * p_j)).ln();
    (pmi / -(p_ij + NPMI_EPSILON).ln()).clamp(-1.0, 1.0)
}

/// Mean pairwise NPMI of every topic's `top_n` words.
///
/// Every position of a document starts a window of [`NPMI_WINDOW`] tokens;
/// documents shorter than that count as one window. Probabilities are the
/// fraction of windows containing a word (or both words).
pub fn coherence(
    model: &TopicModel,
    vocab: &Vocabulary,
    corpus: &[TokenStream],
    top_n: usize,
) -> Result<Coherence> {
    if top_n < 2 {
        return Err(Error::domain("coherence needs at least 2 top words"));
    }
    let topics: Vec<Vec<String>> = (0..model.topics())
        .map(|k| {
            model
                .top_words(k, top_n)
                .into_iter()
                .filter_map(|id| vocab.word_of(id).map(str::to_string))
                .collect()
        })
        .collect();

    let mut slot: HashMap<&str, usize> = HashMap::new();
    for w in topics.iter().flatten() {
        let next = slot.len();
        slot.entry(w.as_str()).or_insert(next);
    }
    let counts = WindowCounts::collect(corpus, &slot, &topics);

    let mut per_topic = Vec::with_capacity(topics.len());
    let mut unobserved = Vec::new();
    for words in &topics {
        let ids: Vec<usize> = words.iter().map(|w| slot[w.as_str()]).collect();
        for (w, &i) in words.iter().zip(&ids) {
            if counts.single[i] == 0 && !unobserved.contains(w) {
                unobserved.push(w.clone());
            }
        }
        let mut total = 0.0;
        let mut pairs = 0usize;
        for a in 0..ids.len() {
            for b in a + 1..ids.len() {
                total += counts.npmi(ids[a], ids[b]);
                pairs += 1;
            }
        }
        per_topic.push(if pairs == 0 {
            0.0
        } else {
            total / pairs as f64
        });
    }
    let mean = if per_topic.is_empty() {
        0.0
    } else {
        per_topic.iter().sum::<f64>() / per_topic.len() as f64
    };
    Ok(Coherence {
        per_topic,
        mean,
        unobserved,
    })
}

struct WindowCounts {
    windows: u64,
    single: Vec<u64>,
    // keyed by (i, j) with i < j
    pair: HashMap<(usize, usize), u64>,
}

impl WindowCounts {
    fn collect(
        corpus: &[TokenStream],
        slot: &HashMap<&str, usize>,
        topics: &[Vec<String>],
    ) -> Self {
        let n = slot.len();
        // Only pairs inside a topic are ever queried.
        let mut wanted = vec![false; n * n];
        for words in topics {
            for a in words {
                for b in words {
                    wanted[slot[a.as_str()] * n + slot[b.as_str()]] = true;
                }
            }
        }
        let mut counts = WindowCounts {
            windows: 0,
            single: vec![0; n],
            pair: HashMap::new(),
        };
        let mut in_window = vec![0u32; n];
        // sorted slots with a nonzero count in the current window
        let mut present: Vec<usize> = Vec::new();
        fn enter(in_window: &mut [u32], present: &mut Vec<usize>, id: usize) {
            in_window[id] += 1;
            if in_window[id] == 1 {
                let at = present.binary_search(&id).unwrap_err();
                present.insert(at, id);
            }
        }
        fn leave(in_window: &mut [u32], present: &mut Vec<usize>, id: usize) {
            in_window[id] -= 1;
            if in_window[id] == 0 {
                let at = present.binary_search(&id).expect("present");
                present.remove(at);
            }
        }
        for doc in corpus {
            if doc.is_empty() {
                continue;
            }
            let ids: Vec<Option<usize>> = doc.iter().map(|t| slot.get(t).copied()).collect();
            let width = NPMI_WINDOW.min(ids.len());
            for &i in &present {
                in_window[i] = 0;
            }
            present.clear();
            for id in ids[..width].iter().flatten() {
                enter(&mut in_window, &mut present, *id);
            }
            let positions = ids.len() - width + 1;
            for start in 0..positions {
                if start > 0 {
                    if let Some(out) = ids[start - 1] {
                        leave(&mut in_window, &mut present, out);
                    }
                    if let Some(inc) = ids[start + width - 1] {
                        enter(&mut in_window, &mut present, inc);
                    }
                }
                counts.windows += 1;
                for (x, &i) in present.iter().enumerate() {
                    counts.single[i] += 1;
                    for &j in &present[x + 1..] {
                        if wanted[i * n + j] {
                            *counts.pair.entry((i, j)).or_default() += 1;
                        }
                    }
                }
            }
        }
        counts
    }

    fn npmi(&self, i: usize, j: usize) -> f64 {
        if self.windows == 0 {
            return 0.0;
        }
        let total = self.windows as f64;
        let key = if i < j { (i, j) } else { (j, i) };
        let joint = self.pair.get(&key).copied().unwrap_or(0);
        npmi(
            self.single[i] as f64 / total,
            self.single[j] as f64 / total,
            joint as f64 / total,
        )
    }
}
