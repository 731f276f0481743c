use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use chrono::NaiveDate;
use trendlens::category::{
    calibrate_thresholds, cohens_kappa, merge_label_sheets, profile, profile_from_relevance,
    read_profiles_csv, write_profiles_csv, CategoryCorpora, CategoryId, CategoryProfile,
    LabelSheet, ThresholdTable,
};
use trendlens::corpus::{
    bucket_by_month_between, deduplicate, default_keywords, filter_by_keywords, ingest, month_span,
    parse_keywords, Dataset, IngestOptions, SourceGroup,
};
use trendlens::stats::{
    centered_moving_average, chi_squared, mann_kendall_gapped, pearson_gapped, spearman,
    tlcc_gapped, windowed_tlcc, write_stat_rows_csv, write_tlcc_matrix, LagCorrelation, StatRow,
    TrendDirection,
};
use trendlens::terms::{
    cluster_variants, domain_token_total, extract_candidates, filter_terms, merge_topic_terms,
    read_terms_tsv, score_candidates, write_terms_tsv, GeneralCorpusStats, SynonymMap,
};
use trendlens::text::{build_vocabulary, to_bow, tokenize, StopWords, TokenStream};
use trendlens::topic::{dominant_lda_topic, sanitise, sweep_topic_counts, SweepTemplate};
use trendlens::trend::{
    build_series, cooccurrence, dominant_count_distribution, popularity, ImpactKind,
};

use crate::config::{DatasetSpec, PipelineConfig};
use crate::{report, CliError, Outputs, Stage};

type StageResult = Result<(), CliError>;

fn data(msg: impl Into<String>) -> CliError {
    CliError::Data(msg.into())
}

/// Files outside the output directory that a stage reads.
pub(crate) fn external_inputs(stage: Stage, cfg: &PipelineConfig) -> Vec<(String, PathBuf)> {
    let mut files = Vec::new();
    let mut add = |label: &str, path: &Option<PathBuf>| {
        if let Some(p) = path {
            files.push((label.to_string(), p.clone()));
        }
    };
    match stage {
        Stage::Ingest => {
            add("keywords", &cfg.keywords);
            for d in &cfg.datasets {
                files.push((format!("dataset.{}", d.name), d.path.clone()));
            }
        }
        Stage::Model => {
            add("stopwords", &cfg.stopwords);
            for d in &cfg.datasets {
                add(&format!("remove_articles.{}", d.name), &d.remove_articles);
            }
        }
        Stage::Terms => {
            add("stopwords", &cfg.stopwords);
            add("general_corpus", &cfg.general_corpus);
            add("synonyms", &cfg.synonyms);
        }
        Stage::Categorize => {
            add("taxonomy", &cfg.taxonomy);
            for (i, p) in cfg.label_sheets.iter().enumerate() {
                files.push((format!("labels.{i}"), p.clone()));
            }
        }
        Stage::Trends | Stage::Stats | Stage::Report => {}
    }
    files
}

pub(crate) fn as_of(cfg: &PipelineConfig) -> NaiveDate {
    cfg.as_of
        .unwrap_or_else(|| chrono::Local::now().date_naive())
}

pub(crate) fn execute(stage: Stage, cfg: &PipelineConfig, out: &mut Outputs) -> StageResult {
    match stage {
        Stage::Ingest => run_ingest(cfg, out),
        Stage::Model => run_model(cfg, out),
        Stage::Terms => run_terms(cfg, out),
        Stage::Categorize => run_categorize(cfg, out),
        Stage::Trends => run_trends(cfg, out),
        Stage::Stats => run_stats(cfg, out),
        Stage::Report => report::run_report(cfg, out),
    }
}

pub(crate) fn read_text(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| data(format!("cannot read {}: {e}", path.display())))
}

fn artifact(cfg: &PipelineConfig, rel: &str) -> PathBuf {
    cfg.output_dir.join(rel)
}

fn load_dataset(path: &Path, spec: &DatasetSpec) -> Result<Dataset, CliError> {
    // dates were already range-checked at ingestion
    let options = IngestOptions {
        as_of: NaiveDate::MAX,
    };
    Ok(ingest(path, &spec.name, spec.source_class, options)?.0)
}

fn jsonl(ds: &Dataset) -> Vec<u8> {
    let mut buf = Vec::new();
    ds.write_jsonl(&mut buf).expect("writing to memory");
    buf
}

fn stopwords(cfg: &PipelineConfig) -> Result<StopWords, CliError> {
    match &cfg.stopwords {
        Some(p) => Ok(StopWords::load(p)?),
        None => Ok(StopWords::english()),
    }
}

fn run_ingest(cfg: &PipelineConfig, out: &mut Outputs) -> StageResult {
    let keywords = match &cfg.keywords {
        Some(p) => parse_keywords(&read_text(p)?),
        None => default_keywords(),
    };
    let options = IngestOptions { as_of: as_of(cfg) };
    let mut summary = String::from(
        "dataset\tsource_class\trecords\tkept\tdropped_empty_body\tinvalid_dates\tundated\tkeyword_matches\tunique\n",
    );
    for spec in &cfg.datasets {
        let (ds, rep) = ingest(&spec.path, &spec.name, spec.source_class, options)
            .map_err(|e| data(format!("dataset `{}`: {e}", spec.name)))?;
        let matched = filter_by_keywords(&ds, &keywords)?;
        let unique = deduplicate(&matched);
        if unique.is_empty() {
            return Err(data(format!(
                "dataset `{}` has no articles left after keyword filtering",
                spec.name
            )));
        }
        writeln!(
            summary,
            "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}",
            spec.name,
            spec.source_class,
            rep.records,
            rep.kept,
            rep.dropped_empty_body,
            rep.invalid_dates,
            rep.undated,
            matched.len(),
            unique.len()
        )
        .expect("writing to a string");
        out.put(format!("ingest/{}.jsonl", spec.name), jsonl(&unique));
    }
    out.put("ingest/summary.tsv", summary.into_bytes());
    Ok(())
}

fn read_id_list(path: &Path) -> Result<BTreeSet<String>, CliError> {
    Ok(read_text(path)?
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(String::from)
        .collect())
}

fn run_model(cfg: &PipelineConfig, out: &mut Outputs) -> StageResult {
    let stop = stopwords(cfg)?;
    let template = SweepTemplate {
        alpha: cfg.lda_alpha,
        beta: cfg.lda_beta,
        iterations: cfg.lda_iterations,
        burn_in: cfg.lda_burn_in,
        seed: cfg.seed,
    };
    for spec in &cfg.datasets {
        let name = &spec.name;
        let ds = load_dataset(&artifact(cfg, &format!("ingest/{name}.jsonl")), spec)?;
        let streams: Vec<TokenStream> = ds
            .articles
            .iter()
            .map(|a| tokenize(&a.text(), Some(&stop)))
            .collect();
        let vocab = build_vocabulary(&streams, cfg.vocab_min_df, cfg.vocab_max_df_ratio)?;
        let bows: Vec<_> = ds
            .articles
            .iter()
            .zip(&streams)
            .map(|(a, s)| to_bow(&a.id, s, &vocab))
            .collect();
        let grid: Vec<usize> = cfg
            .lda_grid
            .iter()
            .copied()
            .filter(|&k| k >= 1 && k <= vocab.len())
            .collect();
        if grid.is_empty() {
            return Err(data(format!(
                "dataset `{name}`: vocabulary of {} words is too small for the topic grid",
                vocab.len()
            )));
        }
        let (sweep, models) = sweep_topic_counts(
            &bows,
            &streams,
            &vocab,
            &grid,
            &template,
            cfg.coherence_top_n,
        )?;
        let chosen = grid
            .iter()
            .position(|&k| k == sweep.selected)
            .expect("selected topic count is on the grid");
        let model = &models[chosen];

        let mut buf = Vec::new();
        vocab.write_tsv(&mut buf).expect("writing to memory");
        out.put(format!("model/{name}/vocab.tsv"), buf);

        let mut curve = String::from("topics,coherence,selected\n");
        for (k, s) in sweep.grid.iter().zip(&sweep.scores) {
            writeln!(curve, "{k},{s:.6},{}", u8::from(*k == sweep.selected)).expect("string");
        }
        out.put(format!("model/{name}/coherence.csv"), curve.into_bytes());

        let mut buf = Vec::new();
        model.write_dump(&mut buf).expect("writing to memory");
        out.put(format!("model/{name}/lda.txt"), buf);
        let mut buf = Vec::new();
        model
            .write_topic_report(&vocab, 15, &mut buf)
            .expect("writing to memory");
        out.put(format!("model/{name}/topics.txt"), buf);
        let mut ll = String::from("iteration,log_likelihood\n");
        for (i, v) in model.log_likelihood.iter().enumerate() {
            writeln!(ll, "{},{v:.4}", i + 1).expect("string");
        }
        out.put(format!("model/{name}/log_likelihood.csv"), ll.into_bytes());

        if let Some(&t) = spec.remove_topics.iter().find(|&&t| t >= model.topics()) {
            return Err(CliError::Usage(format!(
                "dataset.{name}.remove_topics: topic {t} does not exist (selected model has {})",
                model.topics()
            )));
        }
        let removed_ids = match &spec.remove_articles {
            Some(p) => read_id_list(p)?,
            None => BTreeSet::new(),
        };
        let clean = sanitise(&ds, model, &spec.remove_topics, &removed_ids);
        let row_of: HashMap<&str, usize> = model
            .doc_ids
            .iter()
            .enumerate()
            .map(|(i, id)| (id.as_str(), i))
            .collect();
        let mut topics = String::from("article_id\ttopic\n");
        for a in &clean.articles {
            let topic = dominant_lda_topic(model, row_of[a.id.as_str()]);
            writeln!(topics, "{}\t{topic}", a.id).expect("string");
        }
        out.put(format!("model/{name}/doc_topics.tsv"), topics.into_bytes());
        out.put(format!("model/{name}/sanitised.jsonl"), jsonl(&clean));
    }
    Ok(())
}

fn sanitised(cfg: &PipelineConfig, spec: &DatasetSpec) -> Result<Dataset, CliError> {
    load_dataset(
        &artifact(cfg, &format!("model/{}/sanitised.jsonl", spec.name)),
        spec,
    )
}

fn run_terms(cfg: &PipelineConfig, out: &mut Outputs) -> StageResult {
    let stop = stopwords(cfg)?;
    let general = match &cfg.general_corpus {
        Some(p) => GeneralCorpusStats::load(p)?,
        None => GeneralCorpusStats::english(),
    };
    let synonyms = match &cfg.synonyms {
        Some(p) => SynonymMap::load(p)?,
        None => SynonymMap::default(),
    };
    let mut per_topic = Vec::new();
    let mut log = String::from("dataset\ttopic\tarticles\tcandidates\tterms\n");
    for spec in &cfg.datasets {
        let ds = sanitised(cfg, spec)?;
        let topic_text = read_text(&artifact(
            cfg,
            &format!("model/{}/doc_topics.tsv", spec.name),
        ))?;
        let topic_of: HashMap<&str, usize> = topic_text
            .lines()
            .skip(1)
            .filter_map(|l| {
                let (id, t) = l.split_once('\t')?;
                Some((id, t.parse().ok()?))
            })
            .collect();
        let mut groups: BTreeMap<usize, Vec<TokenStream>> = BTreeMap::new();
        for a in &ds.articles {
            let t = *topic_of
                .get(a.id.as_str())
                .ok_or_else(|| data(format!("article `{}` has no topic assignment", a.id)))?;
            groups.entry(t).or_default().push(tokenize(&a.text(), None));
        }
        for (topic, docs) in groups {
            let candidates =
                extract_candidates(&docs, &stop, cfg.terms_max_len, cfg.terms_min_freq)?;
            let total = domain_token_total(&docs);
            if total == 0 {
                continue;
            }
            let kept = filter_terms(score_candidates(&candidates, total, &general)?);
            writeln!(
                log,
                "{}\t{topic}\t{}\t{}\t{}",
                spec.name,
                docs.len(),
                candidates.len(),
                kept.len()
            )
            .expect("string");
            per_topic.push(kept);
        }
    }
    let clustered = cluster_variants(&merge_topic_terms(per_topic), &synonyms);
    let mut buf = Vec::new();
    write_terms_tsv(&clustered, &mut buf).expect("writing to memory");
    out.put("terms/terms.tsv", buf);
    out.put("terms/topics.tsv", log.into_bytes());
    Ok(())
}

fn run_categorize(cfg: &PipelineConfig, out: &mut Outputs) -> StageResult {
    let mut corpora = if cfg.label_sheets.is_empty() {
        match &cfg.taxonomy {
            Some(p) => CategoryCorpora::load(p)?,
            None => CategoryCorpora::seed(),
        }
    } else {
        let sheets = cfg
            .label_sheets
            .iter()
            .map(|p| LabelSheet::load(p))
            .collect::<Result<Vec<_>, _>>()?;
        let merged = merge_label_sheets(&sheets)?;
        let mut kappa = String::from("labeller_a,labeller_b,category,kappa,degenerate\n");
        for i in 0..sheets.len() {
            for j in i + 1..sheets.len() {
                for c in CategoryId::ALL {
                    let k = cohens_kappa(&sheets[i], &sheets[j], c)?;
                    writeln!(
                        kappa,
                        "{},{},{c},{:.6},{}",
                        sheets[i].labeller, sheets[j].labeller, k.value, k.degenerate
                    )
                    .expect("string");
                }
            }
        }
        out.put("categorize/kappa.csv", kappa.into_bytes());
        let mut unresolved = merged.unresolved.join("\n");
        unresolved.push('\n');
        out.put("categorize/unresolved.txt", unresolved.into_bytes());
        merged.corpora
    };
    let terms = read_terms_tsv(std::io::BufReader::new(
        std::fs::File::open(artifact(cfg, "terms/terms.tsv"))
            .map_err(|e| data(format!("cannot read terms: {e}")))?,
    ))?;
    corpora.attach_variants(&terms);
    let mut buf = Vec::new();
    corpora.write_tsv(&mut buf).expect("writing to memory");
    out.put("categorize/corpora.tsv", buf);

    let loose = ThresholdTable::uniform(0.0);
    let mut per_dataset = Vec::new();
    for spec in &cfg.datasets {
        let ds = sanitised(cfg, spec)?;
        let profiles: Vec<CategoryProfile> = ds
            .articles
            .iter()
            .map(|a| profile(&a.id, &tokenize(&a.text(), None), &corpora, &loose))
            .collect();
        per_dataset.push((spec, profiles));
    }
    let reference: Vec<CategoryProfile> = per_dataset
        .iter()
        .flat_map(|(_, p)| p.iter().cloned())
        .collect();
    let thresholds = calibrate_thresholds(&reference, &corpora, cfg.threshold_rule)?;
    let mut buf = Vec::new();
    thresholds.write_tsv(&mut buf).expect("writing to memory");
    out.put("categorize/thresholds.tsv", buf);

    for (spec, profiles) in per_dataset {
        let final_profiles: Vec<CategoryProfile> = profiles
            .iter()
            .map(|p| profile_from_relevance(&p.article_id, p.relevance, &thresholds))
            .collect();
        let mut buf = Vec::new();
        write_profiles_csv(&final_profiles, &mut buf)?;
        out.put(format!("categorize/{}.profiles.csv", spec.name), buf);
    }
    Ok(())
}

pub(crate) fn read_profiles(
    cfg: &PipelineConfig,
    spec: &DatasetSpec,
) -> Result<Vec<CategoryProfile>, CliError> {
    let path = artifact(cfg, &format!("categorize/{}.profiles.csv", spec.name));
    let file = std::fs::File::open(&path)
        .map_err(|e| data(format!("cannot read {}: {e}", path.display())))?;
    Ok(read_profiles_csv(file)?)
}

/// Source groups present in the configuration, in fixed order, with their
/// datasets.
pub(crate) fn groups(cfg: &PipelineConfig) -> Vec<(SourceGroup, Vec<&DatasetSpec>)> {
    SourceGroup::ALL
        .into_iter()
        .map(|g| {
            let members = cfg
                .datasets
                .iter()
                .filter(|d| d.source_class.source_group() == g)
                .collect::<Vec<_>>();
            (g, members)
        })
        .filter(|(_, m)| !m.is_empty())
        .collect()
}

fn run_trends(cfg: &PipelineConfig, out: &mut Outputs) -> StageResult {
    let mut loaded: Vec<(&DatasetSpec, Dataset, Vec<CategoryProfile>)> = Vec::new();
    for spec in &cfg.datasets {
        let ds = sanitised(cfg, spec)?;
        let profiles = read_profiles(cfg, spec)?;
        if profiles.len() != ds.len()
            || profiles
                .iter()
                .zip(&ds.articles)
                .any(|(p, a)| p.article_id != a.id)
        {
            return Err(data(format!(
                "profiles of `{}` do not match its sanitised articles; rerun categorize",
                spec.name
            )));
        }
        loaded.push((spec, ds, profiles));
    }

    // popularity per dataset, per source group and overall
    let group_list = groups(cfg);
    let mut header = vec!["category".to_string()];
    header.extend(cfg.datasets.iter().map(|d| d.name.clone()));
    header.extend(group_list.iter().map(|(g, _)| format!("group:{g}")));
    header.push("all".into());
    let mut table = header.join(",") + "\n";
    let group_profiles: Vec<Vec<CategoryProfile>> = group_list
        .iter()
        .map(|(g, _)| {
            loaded
                .iter()
                .filter(|(s, _, _)| s.source_class.source_group() == *g)
                .flat_map(|(_, _, p)| p.iter().cloned())
                .collect()
        })
        .collect();
    let all: Vec<CategoryProfile> = loaded
        .iter()
        .flat_map(|(_, _, p)| p.iter().cloned())
        .collect();
    for c in CategoryId::ALL {
        let mut row = vec![c.to_string()];
        for (_, _, p) in &loaded {
            row.push(format!("{:.6}", popularity(p, c)?));
        }
        for p in &group_profiles {
            row.push(format!("{:.6}", popularity(p, c)?));
        }
        row.push(format!("{:.6}", popularity(&all, c)?));
        table += &(row.join(",") + "\n");
    }
    out.put("trends/popularity.csv", table.into_bytes());

    // monthly series per source group over the common month range
    let span = loaded
        .iter()
        .filter_map(|(_, ds, _)| month_span(ds))
        .reduce(|(a0, a1), (b0, b1)| (a0.min(b0), a1.max(b1)));
    if let Some((first, last)) = span {
        for ((g, _), profiles) in group_list.iter().zip(&group_profiles) {
            let mut combined = Dataset::new(g.as_str(), SourceGroupClass::of(*g));
            combined.articles = loaded
                .iter()
                .filter(|(s, _, _)| s.source_class.source_group() == *g)
                .flat_map(|(_, ds, _)| ds.articles.iter().cloned())
                .collect();
            let buckets = bucket_by_month_between(&combined, first, last);
            for c in CategoryId::ALL {
                for kind in [ImpactKind::Absolute, ImpactKind::Relative] {
                    let series = build_series(&buckets, profiles, c, kind, g.as_str())?;
                    let mut buf = Vec::new();
                    series.write_csv(&mut buf).expect("writing to memory");
                    out.put(format!("trends/series/{g}/{c}.{kind}.csv"), buf);
                }
            }
        }
    }

    let graph = cooccurrence(&all, cfg.edge_weighting);
    let mut buf = Vec::new();
    graph.write_edges(&mut buf).expect("writing to memory");
    out.put("trends/cooccurrence_edges.csv", buf);
    let mut buf = Vec::new();
    graph.write_nodes(&mut buf).expect("writing to memory");
    out.put("trends/cooccurrence_nodes.csv", buf);

    let dist = dominant_count_distribution(&all)?;
    let mut buf = Vec::new();
    dist.write_csv(&mut buf).expect("writing to memory");
    out.put("trends/dominant_counts.csv", buf);
    Ok(())
}

/// A representative source class for a combined group dataset.
struct SourceGroupClass;

impl SourceGroupClass {
    fn of(g: SourceGroup) -> trendlens::corpus::SourceClass {
        use trendlens::corpus::SourceClass;
        match g {
            SourceGroup::News => SourceClass::News,
            SourceGroup::Blog => SourceClass::Blog,
            SourceGroup::Web => SourceClass::WebGovernmental,
        }
    }
}

/// Values of a series file; empty cells are gaps.
fn read_series(path: &Path) -> Result<Vec<Option<f64>>, CliError> {
    read_text(path)?
        .lines()
        .skip(1)
        .map(|l| {
            let value = l.split(',').nth(1).unwrap_or("");
            if value.is_empty() {
                Ok(None)
            } else {
                value
                    .parse()
                    .map(Some)
                    .map_err(|_| data(format!("bad value `{value}` in {}", path.display())))
            }
        })
        .collect()
}

/// Rows of a CSV written by this pipeline (no quoted fields).
pub(crate) fn read_plain_csv(path: &Path) -> Result<Vec<Vec<String>>, CliError> {
    Ok(read_text(path)?
        .lines()
        .map(|l| l.split(',').map(String::from).collect())
        .collect())
}

/// Most-relevant counts per category for each column of datasets, with
/// categories and columns that are all zero left out.
/// Named groups of profiles, one per contingency-table column.
type Columns<'a> = Vec<(String, Vec<&'a CategoryProfile>)>;

fn chi_squared_row(
    test: &str,
    columns: &Columns<'_>,
    alpha: f64,
) -> Option<(StatRow, trendlens::stats::ChiSquared)> {
    let mut table: Vec<Vec<u64>> = CategoryId::ALL
        .iter()
        .map(|c| {
            columns
                .iter()
                .map(|(_, ps)| ps.iter().filter(|p| p.most_relevant == *c).count() as u64)
                .collect()
        })
        .collect();
    let mut dropped: Vec<String> = Vec::new();
    let mut kept_rows = Vec::new();
    for (c, row) in CategoryId::ALL.iter().zip(table.drain(..)) {
        if row.iter().all(|&v| v == 0) {
            dropped.push(c.to_string());
        } else {
            kept_rows.push(row);
        }
    }
    let live: Vec<usize> = (0..columns.len())
        .filter(|&j| kept_rows.iter().any(|r| r[j] > 0))
        .collect();
    let kept_rows: Vec<Vec<u64>> = kept_rows
        .into_iter()
        .map(|r| live.iter().map(|&j| r[j]).collect())
        .collect();
    let result = chi_squared(&kept_rows).ok()?;
    let mut inputs = live
        .iter()
        .map(|&j| columns[j].0.as_str())
        .collect::<Vec<_>>()
        .join(" vs ");
    if !dropped.is_empty() {
        write!(inputs, " (never most relevant: {})", dropped.join(" ")).expect("string");
    }
    let verdict = if result.p_value < alpha {
        "different"
    } else {
        "not different"
    };
    Some((
        StatRow {
            test: test.to_string(),
            inputs,
            statistic: result.statistic,
            p_value: Some(result.p_value),
            verdict: verdict.into(),
        },
        result,
    ))
}

/// Articles without any category term have no meaningful most relevant
/// category and are left out of its counts.
fn matches_any(p: &CategoryProfile) -> bool {
    p.relevance_of(p.most_relevant) > 0.0
}

fn run_stats(cfg: &PipelineConfig, out: &mut Outputs) -> StageResult {
    let group_list = groups(cfg);
    let profiles: Vec<(&DatasetSpec, Vec<CategoryProfile>)> = cfg
        .datasets
        .iter()
        .map(|s| Ok((s, read_profiles(cfg, s)?)))
        .collect::<Result<_, CliError>>()?;
    let mut rows: Vec<StatRow> = Vec::new();
    let mut chi_table = String::from("test\tinputs\tstatistic\tdof\tp_value\n");

    // share of articles per most relevant category, by source group
    let by_group: Vec<(String, Vec<&CategoryProfile>)> = group_list
        .iter()
        .map(|(g, _)| {
            let ps = profiles
                .iter()
                .filter(|(s, _)| s.source_class.source_group() == *g)
                .flat_map(|(_, p)| p.iter())
                .filter(|p| matches_any(p))
                .collect();
            (g.to_string(), ps)
        })
        .collect();
    let mut shares = String::from("category");
    for (g, _) in &by_group {
        write!(shares, ",{g}").expect("string");
    }
    shares.push('\n');
    for c in CategoryId::ALL {
        shares += c.code();
        for (_, ps) in &by_group {
            let n = ps.iter().filter(|p| p.most_relevant == c).count();
            write!(shares, ",{:.6}", n as f64 / ps.len().max(1) as f64).expect("string");
        }
        shares.push('\n');
    }
    out.put("stats/most_relevant.csv", shares.into_bytes());

    let mut chi_tests: Vec<(String, Columns)> =
        vec![("chi_squared_sources".to_string(), by_group.clone())];
    for (g, members) in &group_list {
        if members.len() > 1 {
            let cols = members
                .iter()
                .map(|s| {
                    let ps = profiles
                        .iter()
                        .find(|(p, _)| p.name == s.name)
                        .expect("loaded");
                    (
                        s.name.clone(),
                        ps.1.iter().filter(|p| matches_any(p)).collect(),
                    )
                })
                .collect();
            chi_tests.push((format!("chi_squared_within_{g}"), cols));
        }
    }
    if profiles.len() > 1 {
        let cols = profiles
            .iter()
            .map(|(s, ps)| {
                (
                    s.name.clone(),
                    ps.iter().filter(|p| matches_any(p)).collect(),
                )
            })
            .collect();
        chi_tests.push(("chi_squared_datasets".to_string(), cols));
    }
    for (name, cols) in &chi_tests {
        if let Some((row, res)) = chi_squared_row(name, cols, cfg.alpha) {
            writeln!(
                chi_table,
                "{name}\t{}\t{:.6}\t{}\t{:.6}",
                row.inputs, res.statistic, res.dof, res.p_value
            )
            .expect("string");
            rows.push(row);
        }
    }
    out.put("stats/chi_squared.tsv", chi_table.into_bytes());

    // monotone trends of relative impact
    let series_path = |g: SourceGroup, c: CategoryId, kind: &str| {
        artifact(cfg, &format!("trends/series/{g}/{c}.{kind}.csv"))
    };
    let have_series = group_list
        .first()
        .is_some_and(|(g, _)| series_path(*g, CategoryId::CycmnAc, "relative").exists());
    let mut verdicts = String::from("category");
    for (g, _) in &group_list {
        write!(verdicts, ",{g}").expect("string");
    }
    verdicts.push('\n');
    let mut relative: BTreeMap<(SourceGroup, CategoryId), Vec<Option<f64>>> = BTreeMap::new();
    let mut absolute: BTreeMap<(SourceGroup, CategoryId), Vec<Option<f64>>> = BTreeMap::new();
    if have_series {
        for (g, _) in &group_list {
            for c in CategoryId::ALL {
                relative.insert((*g, c), read_series(&series_path(*g, c, "relative"))?);
                absolute.insert((*g, c), read_series(&series_path(*g, c, "absolute"))?);
            }
        }
    }
    for c in CategoryId::ALL {
        verdicts += c.code();
        for (g, _) in &group_list {
            let series = relative.get(&(*g, c)).cloned().unwrap_or_default();
            let (symbol, row) = match mann_kendall_gapped(&series, cfg.alpha) {
                Ok(v) => (
                    v.direction.symbol(),
                    StatRow {
                        test: "mann_kendall".into(),
                        inputs: format!("{g} {c} relative impact"),
                        statistic: v.s_statistic as f64,
                        p_value: Some(v.p_value),
                        verdict: v.direction.symbol().into(),
                    },
                ),
                Err(_) => (
                    TrendDirection::Stable.symbol(),
                    StatRow {
                        test: "mann_kendall".into(),
                        inputs: format!("{g} {c} relative impact (fewer than 4 months)"),
                        statistic: 0.0,
                        p_value: None,
                        verdict: TrendDirection::Stable.symbol().into(),
                    },
                ),
            };
            write!(verdicts, ",{symbol}").expect("string");
            rows.push(row);
        }
        verdicts.push('\n');
    }
    out.put("stats/trend_verdicts.csv", verdicts.into_bytes());

    // pairwise Pearson correlation of relative impacts within each group
    for (g, _) in &group_list {
        let mut m = String::from("category");
        for c in CategoryId::ALL {
            write!(m, ",{c}").expect("string");
        }
        m.push('\n');
        for a in CategoryId::ALL {
            m += a.code();
            for b in CategoryId::ALL {
                let x = relative.get(&(*g, a)).cloned().unwrap_or_default();
                let y = relative.get(&(*g, b)).cloned().unwrap_or_default();
                match pearson_gapped(&x, &y) {
                    Ok(r) => write!(m, ",{r:.6}").expect("string"),
                    Err(_) => m.push(','),
                }
            }
            m.push('\n');
        }
        out.put(format!("stats/pearson_{g}.csv"), m.into_bytes());
    }

    // rank agreement of category popularity between source groups
    let pop = read_plain_csv(&artifact(cfg, "trends/popularity.csv"))?;
    let header = pop.first().cloned().unwrap_or_default();
    let column = |name: &str| -> Option<Vec<f64>> {
        let j = header.iter().position(|h| h == name)?;
        pop[1..].iter().map(|r| r.get(j)?.parse().ok()).collect()
    };
    for i in 0..group_list.len() {
        for j in i + 1..group_list.len() {
            let (a, b) = (group_list[i].0, group_list[j].0);
            if let (Some(x), Some(y)) =
                (column(&format!("group:{a}")), column(&format!("group:{b}")))
            {
                if let Ok(s) = spearman(&x, &y) {
                    rows.push(StatRow {
                        test: "spearman".into(),
                        inputs: format!("popularity {a} vs {b}"),
                        statistic: s.rho,
                        p_value: Some(s.p_value),
                        verdict: if s.p_value < cfg.alpha {
                            "correlated"
                        } else {
                            "not correlated"
                        }
                        .into(),
                    });
                }
            }
        }
    }

    // lead and lag of absolute impact between source groups
    let prepare = |s: &Vec<Option<f64>>| -> Result<Vec<Option<f64>>, CliError> {
        if cfg.smoothing {
            Ok(centered_moving_average(s, 3)?)
        } else {
            Ok(s.clone())
        }
    };
    let mut lagged: Vec<(String, LagCorrelation)> = Vec::new();
    let mut windowed = String::from("series,start_month,peak_lag,peak_correlation\n");
    let months: Vec<String> = group_list
        .first()
        .map(|(g, _)| series_path(*g, CategoryId::CycmnAc, "absolute"))
        .filter(|p| p.exists())
        .map(|p| read_plain_csv(&p))
        .transpose()?
        .map(|rows| rows.into_iter().skip(1).map(|r| r[0].clone()).collect())
        .unwrap_or_default();
    for c in CategoryId::ALL {
        for i in 0..group_list.len() {
            for j in i + 1..group_list.len() {
                let (a, b) = (group_list[i].0, group_list[j].0);
                let (Some(x), Some(y)) = (absolute.get(&(a, c)), absolute.get(&(b, c))) else {
                    continue;
                };
                let (x, y) = (prepare(x)?, prepare(y)?);
                let name = format!("{c} {a} vs {b}");
                if let Ok(lc) = tlcc_gapped(&x, &y, cfg.max_lag) {
                    rows.push(StatRow {
                        test: "tlcc".into(),
                        inputs: name.clone(),
                        statistic: lc.peak_correlation(),
                        p_value: None,
                        verdict: format!("peak lag {}", lc.peak_lag),
                    });
                    lagged.push((name.clone(), lc));
                }
                if cfg.tlcc_window > 0 {
                    for w in windowed_tlcc(&x, &y, cfg.max_lag, cfg.tlcc_window, cfg.tlcc_step)? {
                        writeln!(
                            windowed,
                            "{name},{},{},{:.6}",
                            months.get(w.start).map_or("", String::as_str),
                            w.correlation.peak_lag,
                            w.correlation.peak_correlation()
                        )
                        .expect("string");
                    }
                }
            }
        }
    }
    let mut buf = Vec::new();
    write_tlcc_matrix(&lagged, cfg.max_lag, &mut buf)?;
    out.put("stats/tlcc.csv", buf);
    if cfg.tlcc_window > 0 {
        out.put("stats/tlcc_windowed.csv", windowed.into_bytes());
    }

    let mut buf = Vec::new();
    write_stat_rows_csv(&rows, &mut buf)?;
    out.put("stats/tests.csv", buf);
    Ok(())
}
