use super::{coherence, fit_lda, LdaConfig, TopicModel};
use crate::text::{BowDocument, TokenStream, Vocabulary};
use crate::{Error, Result};

/// Topic counts 5, 10, ..., 50.
pub const DEFAULT_GRID: [usize; 10] = [5, 10, 15, 20, 25, 30, 35, 40, 45, 50];

/// Coherence gain after the first peak that is still considered negligible.
pub const MAX_NEGLIGIBLE_GAIN: f64 = 0.01;

// Scores are compared in binary floating point, where e.g. 0.43 - 0.42 is a
// hair above 0.01.
const GAIN_SLACK: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct CoherenceSweep {
    pub grid: Vec<usize>,
    pub scores: Vec<f64>,
    pub selected: usize,
}

/// Everything in an [`LdaConfig`] except the topic count. `alpha: None`
/// means `50 / K` for each K.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepTemplate {
    pub alpha: Option<f64>,
    pub beta: f64,
    pub iterations: usize,
    pub burn_in: usize,
    pub seed: u64,
}

impl Default for SweepTemplate {
    fn default() -> Self {
        let base = LdaConfig::new(2);
        SweepTemplate {
            alpha: None,
            beta: base.beta,
            iterations: base.iterations,
            burn_in: base.burn_in,
            seed: base.seed,
        }
    }
}

impl SweepTemplate {
    pub fn for_topics(&self, topics: usize) -> LdaConfig {
        let base = LdaConfig::new(topics);
        LdaConfig {
            topics,
            alpha: self.alpha.unwrap_or(base.alpha),
            beta: self.beta,
            iterations: self.iterations,
            burn_in: self.burn_in,
            seed: self.seed,
        }
    }
}

/// Picks the topic count from a coherence curve.
///
/// The highest score wins, unless nothing after the first local maximum
/// improves on it by more than [`MAX_NEGLIGIBLE_GAIN`]; then the first local
/// maximum is kept.
pub fn first_peak_rule(grid: &[usize], scores: &[f64]) -> Result<usize> {
    if grid.is_empty() {
        return Err(Error::domain("topic-count grid is empty"));
    }
    if grid.len() != scores.len() {
        return Err(Error::domain("grid and scores differ in length"));
    }
    if grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::domain(
            "topic-count grid must be strictly increasing",
        ));
    }
    if scores.iter().any(|s| !s.is_finite()) {
        return Err(Error::domain("coherence scores must be finite"));
    }
    let last = scores.len() - 1;
    let peak = (0..scores.len())
        .find(|&i| {
            (i == 0 || scores[i] > scores[i - 1]) && (i == last || scores[i] >= scores[i + 1])
        })
        .unwrap_or(last);
    let later_best = scores[peak + 1..]
        .iter()
        .copied()
        .fold(f64::NEG_INFINITY, f64::max);
    if later_best - scores[peak] <= MAX_NEGLIGIBLE_GAIN + GAIN_SLACK {
        return Ok(grid[peak]);
    }
    let mut best = 0;
    for i in 1..scores.len() {
        if scores[i] > scores[best] {
            best = i;
        }
    }
    Ok(grid[best])
}

/// Fits one model per grid entry and records its mean coherence.
///
/// Returns the fitted models alongside, in grid order. With the `parallel`
/// feature the fits run concurrently; the output does not depend on it.
pub fn sweep_topic_counts(
    corpus: &[BowDocument],
    tokens: &[TokenStream],
    vocab: &Vocabulary,
    grid: &[usize],
    template: &SweepTemplate,
    top_n: usize,
) -> Result<(CoherenceSweep, Vec<TopicModel>)> {
    if grid.is_empty() {
        return Err(Error::domain("topic-count grid is empty"));
    }
    let fit_one = |&k: &usize| -> Result<(f64, TopicModel)> {
        let model = fit_lda(corpus, vocab, &template.for_topics(k))?;
        let score = coherence(&model, vocab, tokens, top_n)?.mean;
        Ok((score, model))
    };
    #[cfg(feature = "parallel")]
    let fitted: Vec<(f64, TopicModel)> = {
        use rayon::prelude::*;
        grid.par_iter().map(fit_one).collect::<Result<_>>()?
    };
    #[cfg(not(feature = "parallel"))]
    let fitted: Vec<(f64, TopicModel)> = grid.iter().map(fit_one).collect::<Result<_>>()?;

    let (scores, models): (Vec<f64>, Vec<TopicModel>) = fitted.into_iter().unzip();
    let selected = first_peak_rule(grid, &scores)?;
    Ok((
        CoherenceSweep {
            grid: grid.to_vec(),
            scores,
            selected,
        },
        models,
    ))
}

/// Like [`sweep_topic_counts`] but keeps only the sweep.
pub fn select_topic_count(
    corpus: &[BowDocument],
    tokens: &[TokenStream],
    vocab: &Vocabulary,
    grid: &[usize],
    template: &SweepTemplate,
    top_n: usize,
) -> Result<CoherenceSweep> {
    sweep_topic_counts(corpus, tokens, vocab, grid, template, top_n).map(|(s, _)| s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const GRID5: [usize; 5] = [5, 10, 15, 20, 25];

    #[test]
    fn small_gain_after_first_peak_keeps_peak() {
        let scores = [0.30, 0.42, 0.41, 0.425, 0.43];
        assert_eq!(first_peak_rule(&GRID5, &scores).unwrap(), 10);
    }

    #[test]
    fn increasing_with_final_jump_takes_last() {
        let scores = [0.30, 0.31, 0.32, 0.33, 0.38];
        assert_eq!(first_peak_rule(&GRID5, &scores).unwrap(), 25);
    }

    #[test]
    fn decreasing_takes_first() {
        let scores = [0.5, 0.4, 0.3, 0.2, 0.1];
        assert_eq!(first_peak_rule(&GRID5, &scores).unwrap(), 5);
    }

    #[test]
    fn validates_inputs() {
        assert!(first_peak_rule(&[], &[]).is_err());
        assert!(first_peak_rule(&[5, 5], &[0.1, 0.2]).is_err());
        assert!(first_peak_rule(&[5, 10], &[0.1]).is_err());
        assert!(first_peak_rule(&[5, 10], &[0.1, f64::NAN]).is_err());
    }

    #[test]
    fn template_defaults_alpha_per_k() {
        let t = SweepTemplate::default();
        assert_eq!(t.for_topics(10).alpha, 5.0);
        assert_eq!(t.for_topics(25).alpha, 2.0);
        let fixed = SweepTemplate {
            alpha: Some(0.1),
            ..t
        };
        assert_eq!(fixed.for_topics(10).alpha, 0.1);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]

        #[test]
        fn selected_is_on_grid_and_depends_only_on_scores(
            scores in proptest::collection::vec(-1.0f64..1.0, 1..12)
        ) {
            let grid: Vec<usize> = (1..=scores.len()).map(|i| i * 5).collect();
            let k = first_peak_rule(&grid, &scores).unwrap();
            prop_assert!(grid.contains(&k));
            prop_assert_eq!(k, first_peak_rule(&grid, &scores).unwrap());
            // never worse than the global max by more than the negligible gain
            let max = scores.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            let idx = grid.iter().position(|&g| g == k).unwrap();
            prop_assert!(max - scores[idx] <= MAX_NEGLIGIBLE_GAIN + GAIN_SLACK);
        }
    }
}
