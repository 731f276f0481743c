use std::io::{BufRead, Write};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use statrs::function::gamma::ln_gamma;

use crate::text::{BowDocument, Vocabulary};
use crate::{Error, Result};

const DUMP_MAGIC: &str = "trendlens-lda";
const DUMP_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LdaConfig {
    pub topics: usize,
    /// Symmetric document-topic prior.
    pub alpha: f64,
    /// Symmetric topic-word prior.
    pub beta: f64,
    /// Total Gibbs sweeps, burn-in included.
    pub iterations: usize,
    pub burn_in: usize,
    pub seed: u64,
}

impl LdaConfig {
    /// `alpha = 50 / K`, `beta = 0.01`, 1000 sweeps of which 800 burn-in.
    pub fn new(topics: usize) -> Self {
        LdaConfig {
            topics,
            alpha: 50.0 / topics.max(1) as f64,
            beta: 0.01,
            iterations: 1000,
            burn_in: 800,
            seed: 0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.topics < 2 {
            return Err(Error::domain("LDA needs at least 2 topics"));
        }
        if !(self.alpha > 0.0 && self.alpha.is_finite())
            || !(self.beta > 0.0 && self.beta.is_finite())
        {
            return Err(Error::domain("alpha and beta must be positive"));
        }
        if self.iterations <= self.burn_in {
            return Err(Error::domain("iterations must exceed burn_in"));
        }
        Ok(())
    }
}

/// A fitted LDA model.
#[derive(Debug, Clone, PartialEq)]
pub struct TopicModel {
    /// `K x V` topic-word probabilities.
    pub phi: Vec<Vec<f64>>,
    /// `D x K` document-topic probabilities, rows in corpus order.
    pub theta: Vec<Vec<f64>>,
    /// Article id of each theta row.
    pub doc_ids: Vec<String>,
    pub config: LdaConfig,
    pub vocab_fingerprint: u64,
    /// Joint log-likelihood `log p(w | z)` after every sweep.
    pub log_likelihood: Vec<f64>,
}

impl TopicModel {
    pub fn topics(&self) -> usize {
        self.phi.len()
    }

    pub fn vocab_size(&self) -> usize {
        self.phi.first().map_or(0, Vec::len)
    }

    /// Word ids of topic `k` by descending probability, ties by lower id.
    pub fn top_words(&self, k: usize, n: usize) -> Vec<u32> {
        let row = &self.phi[k];
        let mut ids: Vec<u32> = (0..row.len() as u32).collect();
        ids.sort_by(|&a, &b| row[b as usize].total_cmp(&row[a as usize]).then(a.cmp(&b)));
        ids.truncate(n);
        ids
    }

    /// Text report listing the `n` most probable words of every topic.
    pub fn write_topic_report<W: Write>(
        &self,
        vocab: &Vocabulary,
        n: usize,
        mut out: W,
    ) -> std::io::Result<()> {
        for k in 0..self.topics() {
            writeln!(out, "topic {k}")?;
            for id in self.top_words(k, n) {
                let word = vocab.word_of(id).unwrap_or("?");
                writeln!(out, "  {word}\t{:.6}", self.phi[k][id as usize])?;
            }
        }
        Ok(())
    }

    /// Versioned text dump of config, phi and theta.
    pub fn write_dump<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        let c = &self.config;
        writeln!(out, "{DUMP_MAGIC} {DUMP_VERSION}")?;
        writeln!(out, "topics {}", c.topics)?;
        writeln!(out, "alpha {}", c.alpha)?;
        writeln!(out, "beta {}", c.beta)?;
        writeln!(out, "iterations {}", c.iterations)?;
        writeln!(out, "burn_in {}", c.burn_in)?;
        writeln!(out, "seed {}", c.seed)?;
        writeln!(out, "vocab_size {}", self.vocab_size())?;
        writeln!(out, "vocab_fingerprint {:016x}", self.vocab_fingerprint)?;
        writeln!(out, "documents {}", self.theta.len())?;
        writeln!(out, "phi")?;
        for row in &self.phi {
            write_row(&mut out, row)?;
        }
        writeln!(out, "theta")?;
        for (id, row) in self.doc_ids.iter().zip(&self.theta) {
            write!(out, "{id}\t")?;
            write_row(&mut out, row)?;
        }
        Ok(())
    }
}

fn write_row<W: Write>(out: &mut W, row: &[f64]) -> std::io::Result<()> {
    let mut first = true;
    for v in row {
        if !first {
            out.write_all(b" ")?;
        }
        first = false;
        write!(out, "{v}")?;
    }
    out.write_all(b"\n")
}

/// Reads a dump written by [`TopicModel::write_dump`]. The log-likelihood
/// trace is not part of the dump and comes back empty.
pub fn read_model<R: BufRead>(input: R) -> Result<TopicModel> {
    let mut lines = input.lines().enumerate().map(|(i, l)| {
        l.map(|l| (i + 1, l))
            .map_err(|e| Error::parse(i + 1, e.to_string()))
    });
    let mut next = |what: &str| -> Result<(usize, String)> {
        lines.next().unwrap_or_else(|| {
            Err(Error::parse(
                0,
                format!("unexpected end of dump, expected {what}"),
            ))
        })
    };
    let (n, header) = next("header")?;
    if header != format!("{DUMP_MAGIC} {DUMP_VERSION}") {
        return Err(Error::parse(
            n,
            format!("unsupported dump header `{header}`"),
        ));
    }
    fn field<T: std::str::FromStr>(n: usize, line: &str, key: &str) -> Result<T> {
        line.strip_prefix(key)
            .and_then(|rest| rest.strip_prefix(' '))
            .and_then(|v| v.parse().ok())
            .ok_or_else(|| Error::parse(n, format!("expected `{key} <value>`")))
    }
    let (n, l) = next("topics")?;
    let topics: usize = field(n, &l, "topics")?;
    let (n, l) = next("alpha")?;
    let alpha: f64 = field(n, &l, "alpha")?;
    let (n, l) = next("beta")?;
    let beta: f64 = field(n, &l, "beta")?;
    let (n, l) = next("iterations")?;
    let iterations: usize = field(n, &l, "iterations")?;
    let (n, l) = next("burn_in")?;
    let burn_in: usize = field(n, &l, "burn_in")?;
    let (n, l) = next("seed")?;
    let seed: u64 = field(n, &l, "seed")?;
    let (n, l) = next("vocab_size")?;
    let vocab_size: usize = field(n, &l, "vocab_size")?;
    let (n, l) = next("vocab_fingerprint")?;
    let fp: String = field(n, &l, "vocab_fingerprint")?;
    let vocab_fingerprint =
        u64::from_str_radix(&fp, 16).map_err(|_| Error::parse(n, "bad fingerprint"))?;
    let (n, l) = next("documents")?;
    let documents: usize = field(n, &l, "documents")?;

    let parse_row = |n: usize, text: &str, len: usize| -> Result<Vec<f64>> {
        let row: Vec<f64> = text
            .split(' ')
            .map(|v| v.parse::<f64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|_| Error::parse(n, "bad number"))?;
        if row.len() != len {
            return Err(Error::parse(
                n,
                format!("expected {len} values, got {}", row.len()),
            ));
        }
        Ok(row)
    };
    let (n, l) = next("phi")?;
    if l != "phi" {
        return Err(Error::parse(n, "expected `phi`"));
    }
    let mut phi = Vec::with_capacity(topics);
    for _ in 0..topics {
        let (n, l) = next("phi row")?;
        phi.push(parse_row(n, &l, vocab_size)?);
    }
    let (n, l) = next("theta")?;
    if l != "theta" {
        return Err(Error::parse(n, "expected `theta`"));
    }
    let mut theta = Vec::with_capacity(documents);
    let mut doc_ids = Vec::with_capacity(documents);
    for _ in 0..documents {
        let (n, l) = next("theta row")?;
        let (id, rest) = l
            .split_once('\t')
            .ok_or_else(|| Error::parse(n, "expected `id<TAB>values`"))?;
        doc_ids.push(id.to_string());
        theta.push(parse_row(n, rest, topics)?);
    }
    Ok(TopicModel {
        phi,
        theta,
        doc_ids,
        config: LdaConfig {
            topics,
            alpha,
            beta,
            iterations,
            burn_in,
            seed,
        },
        vocab_fingerprint,
        log_likelihood: Vec::new(),
    })
}

struct GibbsState {
    topics: usize,
    vocab: usize,
    words: Vec<u32>,
    doc_start: Vec<usize>,
    assignment: Vec<u32>,
    doc_topic: Vec<u32>,
    // word-major: word_topic[w * topics + k]
    word_topic: Vec<u32>,
    topic_total: Vec<u32>,
}

impl GibbsState {
    fn doc_tokens(&self, d: usize) -> std::ops::Range<usize> {
        self.doc_start[d]..self.doc_start[d + 1]
    }

    fn log_likelihood(&self, beta: f64) -> f64 {
        let v = self.vocab as f64;
        let k = self.topics as f64;
        let mut ll = k * (ln_gamma(v * beta) - v * ln_gamma(beta));
        for t in 0..self.topics {
            let mut s = 0.0;
            for w in 0..self.vocab {
                let c = self.word_topic[w * self.topics + t];
                if c > 0 {
                    s += ln_gamma(f64::from(c) + beta) - ln_gamma(beta);
                }
            }
            ll += s + v * ln_gamma(beta) - ln_gamma(f64::from(self.topic_total[t]) + v * beta);
        }
        ll
    }
}

/// Fits LDA with collapsed Gibbs sampling.
///
/// phi and theta are smoothed averages of the count matrices over the
/// post-burn-in sweeps. The chain is driven by a ChaCha8 stream seeded from
/// `cfg.seed`, so results are bit-for-bit reproducible.
pub fn fit_lda(corpus: &[BowDocument], vocab: &Vocabulary, cfg: &LdaConfig) -> Result<TopicModel> {
    cfg.validate()?;
    if corpus.is_empty() {
        return Err(Error::domain("cannot fit LDA on an empty corpus"));
    }
    if vocab.is_empty() {
        return Err(Error::domain("cannot fit LDA with an empty vocabulary"));
    }
    if cfg.topics > vocab.len() {
        return Err(Error::domain(format!(
            "{} topics exceed the vocabulary size {}",
            cfg.topics,
            vocab.len()
        )));
    }
    let k_count = cfg.topics;
    let v_count = vocab.len();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);

    let mut words = Vec::new();
    let mut doc_start = Vec::with_capacity(corpus.len() + 1);
    for doc in corpus {
        doc_start.push(words.len());
        for &(w, c) in &doc.counts {
            if w as usize >= v_count {
                return Err(Error::domain(format!(
                    "document `{}` uses word id {w} outside the vocabulary",
                    doc.article_id
                )));
            }
            words.extend(std::iter::repeat_n(w, c as usize));
        }
    }
    doc_start.push(words.len());

    let mut state = GibbsState {
        topics: k_count,
        vocab: v_count,
        assignment: Vec::with_capacity(words.len()),
        doc_topic: vec![0; corpus.len() * k_count],
        word_topic: vec![0; v_count * k_count],
        topic_total: vec![0; k_count],
        words,
        doc_start,
    };
    for d in 0..corpus.len() {
        for i in state.doc_tokens(d) {
            let z = rng.random_range(0..k_count as u32);
            let w = state.words[i] as usize;
            state.assignment.push(z);
            state.doc_topic[d * k_count + z as usize] += 1;
            state.word_topic[w * k_count + z as usize] += 1;
            state.topic_total[z as usize] += 1;
        }
    }

    let alpha = cfg.alpha;
    let beta = cfg.beta;
    let v_beta = v_count as f64 * beta;
    let mut weights = vec![0.0f64; k_count];
    let mut sum_doc_topic = vec![0u64; corpus.len() * k_count];
    let mut sum_word_topic = vec![0u64; v_count * k_count];
    let mut log_likelihood = Vec::with_capacity(cfg.iterations);

    for sweep in 0..cfg.iterations {
        for d in 0..corpus.len() {
            let dt = d * k_count;
            for i in state.doc_tokens(d) {
                let w = state.words[i] as usize;
                let wt = w * k_count;
                let old = state.assignment[i] as usize;
                state.doc_topic[dt + old] -= 1;
                state.word_topic[wt + old] -= 1;
                state.topic_total[old] -= 1;

                let mut total = 0.0;
                for (k, slot) in weights.iter_mut().enumerate() {
                    let p = (f64::from(state.doc_topic[dt + k]) + alpha)
                        * (f64::from(state.word_topic[wt + k]) + beta)
                        / (f64::from(state.topic_total[k]) + v_beta);
                    total += p;
                    *slot = total;
                }
                let u = rng.random::<f64>() * total;
                let new = weights.iter().position(|&c| u < c).unwrap_or(k_count - 1);

                state.assignment[i] = new as u32;
                state.doc_topic[dt + new] += 1;
                state.word_topic[wt + new] += 1;
                state.topic_total[new] += 1;
            }
        }
        log_likelihood.push(state.log_likelihood(beta));
        if sweep >= cfg.burn_in {
            for (acc, &c) in sum_doc_topic.iter_mut().zip(&state.doc_topic) {
                *acc += u64::from(c);
            }
            for (acc, &c) in sum_word_topic.iter_mut().zip(&state.word_topic) {
                *acc += u64::from(c);
            }
        }
    }

    let samples = (cfg.iterations - cfg.burn_in) as f64;
    let phi = (0..k_count)
        .map(|k| {
            let row: Vec<f64> = (0..v_count)
                .map(|w| sum_word_topic[w * k_count + k] as f64 / samples + beta)
                .collect();
            normalize(row)
        })
        .collect();
    let theta = (0..corpus.len())
        .map(|d| {
            let row: Vec<f64> = (0..k_count)
                .map(|k| sum_doc_topic[d * k_count + k] as f64 / samples + alpha)
                .collect();
            normalize(row)
        })
        .collect();

    Ok(TopicModel {
        phi,
        theta,
        doc_ids: corpus.iter().map(|d| d.article_id.clone()).collect(),
        config: *cfg,
        vocab_fingerprint: vocab.fingerprint(),
        log_likelihood,
    })
}

fn normalize(mut row: Vec<f64>) -> Vec<f64> {
    let total: f64 = row.iter().sum();
    for v in &mut row {
        *v /= total;
    }
    row
}
