//! Plain-text summary of a finished pipeline run.

use std::fmt::Write as _;
use std::path::PathBuf;

use crate::config::PipelineConfig;
use crate::stages::{read_plain_csv, read_text};
use crate::{CliError, Outputs};

pub const REPORT_FILE: &str = "report/report.txt";

/// Left-aligned first column, right-aligned rest.
fn table(rows: &[Vec<String>]) -> String {
    let cols = rows.iter().map(Vec::len).max().unwrap_or(0);
    let widths: Vec<usize> = (0..cols)
        .map(|j| {
            rows.iter()
                .filter_map(|r| r.get(j))
                .map(|c| c.chars().count())
                .max()
                .unwrap_or(0)
        })
        .collect();
    let mut out = String::new();
    for r in rows {
        let mut line = String::new();
        for (j, cell) in r.iter().enumerate() {
            if j == 0 {
                write!(line, "{cell:<w$}", w = widths[0]).expect("string");
            } else {
                write!(line, "  {cell:>w$}", w = widths[j]).expect("string");
            }
        }
        out += line.trim_end();
        out.push('\n');
    }
    out
}

fn section(out: &mut String, title: &str, body: &str) {
    writeln!(
        out,
        "{title}\n{}\n{body}",
        "-".repeat(title.chars().count())
    )
    .expect("string");
}

pub(crate) fn run_report(cfg: &PipelineConfig, out: &mut Outputs) -> Result<(), CliError> {
    let path = |rel: &str| -> PathBuf { cfg.output_dir.join(rel) };
    let mut text = String::from("trendlens report\n================\n\n");

    let summary: Vec<Vec<String>> = read_text(&path("ingest/summary.tsv"))?
        .lines()
        .map(|l| l.split('\t').map(String::from).collect())
        .collect();
    let mut counts = vec![vec![
        "dataset".to_string(),
        "source".into(),
        "records".into(),
        "matched".into(),
        "unique".into(),
        "sanitised".into(),
        "topics".into(),
    ]];
    for row in summary.iter().skip(1) {
        let name = &row[0];
        let sanitised = read_text(&path(&format!("model/{name}/doc_topics.tsv")))?
            .lines()
            .count()
            .saturating_sub(1);
        let selected = read_plain_csv(&path(&format!("model/{name}/coherence.csv")))?
            .into_iter()
            .skip(1)
            .find(|r| r.get(2).map(String::as_str) == Some("1"))
            .map(|r| r[0].clone())
            .unwrap_or_default();
        counts.push(vec![
            name.clone(),
            row[1].clone(),
            row[2].clone(),
            row[7].clone(),
            row[8].clone(),
            sanitised.to_string(),
            selected,
        ]);
    }
    section(&mut text, "Datasets", &table(&counts));

    let pop = read_plain_csv(&path("trends/popularity.csv"))?;
    section(
        &mut text,
        "Popularity (share of articles where the category is dominant)",
        &table(&pop),
    );

    let shares = read_plain_csv(&path("stats/most_relevant.csv"))?;
    section(
        &mut text,
        "Most relevant category (share of articles matching any category term)",
        &table(&shares),
    );

    let verdicts = read_plain_csv(&path("stats/trend_verdicts.csv"))?;
    section(
        &mut text,
        &format!("Relative impact trend (Mann-Kendall, alpha {})", cfg.alpha),
        &table(&verdicts),
    );

    let chi: Vec<Vec<String>> = read_text(&path("stats/chi_squared.tsv"))?
        .lines()
        .map(|l| l.split('\t').map(String::from).collect())
        .collect();
    let chi_body = if chi.len() > 1 {
        table(&chi)
    } else {
        "no test had enough data\n".to_string()
    };
    section(
        &mut text,
        "Chi-squared tests of most relevant category",
        &chi_body,
    );

    out.put(REPORT_FILE, text.into_bytes());
    Ok(())
}
