//! LDA topic modelling: fitting, coherence scoring, topic-count selection
//! and topic-based sanitisation of datasets.

mod coherence;
mod lda;
mod select;

pub use coherence::{coherence, Coherence, NPMI_EPSILON, NPMI_WINDOW};
pub use lda::{fit_lda, read_model, LdaConfig, TopicModel};
pub use select::{
    first_peak_rule, select_topic_count, sweep_topic_counts, CoherenceSweep, SweepTemplate,
    DEFAULT_GRID, MAX_NEGLIGIBLE_GAIN,
};

use std::collections::{BTreeSet, HashMap};

use crate::corpus::Dataset;

/// Topic with the largest weight in the document's theta row; ties go to the
/// lowest topic id.
pub fn dominant_lda_topic(model: &TopicModel, doc: usize) -> usize {
    argmax_first(&model.theta[doc])
}

pub(crate) fn argmax_first(row: &[f64]) -> usize {
    let mut best = 0;
    for (k, &v) in row.iter().enumerate().skip(1) {
        if v > row[best] {
            best = k;
        }
    }
    best
}

/// Drops articles whose dominant topic was flagged as off-topic, plus the
/// articles listed by manual review.
///
/// Articles the model never saw are only affected by the id list.
pub fn sanitise(
    dataset: &Dataset,
    model: &TopicModel,
    removed_topics: &BTreeSet<usize>,
    removed_articles: &BTreeSet<String>,
) -> Dataset {
    let row_of: HashMap<&str, usize> = model
        .doc_ids
        .iter()
        .enumerate()
        .map(|(i, id)| (id.as_str(), i))
        .collect();
    let mut out = Dataset::new(dataset.name.clone(), dataset.source_class);
    out.articles = dataset
        .articles
        .iter()
        .filter(|a| !removed_articles.contains(&a.id))
        .filter(|a| match row_of.get(a.id.as_str()) {
            Some(&row) => !removed_topics.contains(&dominant_lda_topic(model, row)),
            None => true,
        })
        .cloned()
        .collect();
    out
}
