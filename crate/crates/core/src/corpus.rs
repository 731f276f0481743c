//! Offline article dumps: ingestion, keyword filtering, deduplication and
//! monthly bucketing.
//!
//! The dump format is one JSON object per line with the fields
//! `id`, `source_id`, `source_class`, `title`, `body` and an optional
//! `published` date written as `YYYY-MM-DD`.

use std::collections::HashSet;
use std::fmt;
use std::fs::File;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;
use std::str::FromStr;

use chrono::{Datelike, NaiveDate};
use serde::{Deserialize, Serialize};

use crate::text::word_tokens;
use crate::{Error, Result};

/// Kind of publisher an article came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SourceClass {
    News,
    Blog,
    WebGovernmental,
    WebIndustrial,
    WebAcademic,
}

impl SourceClass {
    pub const ALL: [SourceClass; 5] = [
        SourceClass::News,
        SourceClass::Blog,
        SourceClass::WebGovernmental,
        SourceClass::WebIndustrial,
        SourceClass::WebAcademic,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            SourceClass::News => "news",
            SourceClass::Blog => "blog",
            SourceClass::WebGovernmental => "web_governmental",
            SourceClass::WebIndustrial => "web_industrial",
            SourceClass::WebAcademic => "web_academic",
        }
    }

    /// News, blogs and the three web classes collapsed into one.
    pub fn source_group(self) -> SourceGroup {
        match self {
            SourceClass::News => SourceGroup::News,
            SourceClass::Blog => SourceGroup::Blog,
            _ => SourceGroup::Web,
        }
    }
}

impl fmt::Display for SourceClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SourceClass {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        SourceClass::ALL
            .into_iter()
            .find(|c| c.as_str() == s)
            .ok_or_else(|| Error::domain(format!("unknown source class `{s}`")))
    }
}

/// The three source groups compared in the trend analysis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum SourceGroup {
    News,
    Blog,
    Web,
}

impl SourceGroup {
    pub const ALL: [SourceGroup; 3] = [SourceGroup::News, SourceGroup::Blog, SourceGroup::Web];

    pub fn as_str(self) -> &'static str {
        match self {
            SourceGroup::News => "news",
            SourceGroup::Blog => "blog",
            SourceGroup::Web => "web",
        }
    }
}

impl fmt::Display for SourceGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Article {
    pub id: String,
    pub source_id: String,
    pub source_class: SourceClass,
    pub title: String,
    pub body: String,
    pub published: Option<NaiveDate>,
}

impl Article {
    /// Title and body joined, the text every downstream stage analyses.
    pub fn text(&self) -> String {
        format!("{}\n{}", self.title, self.body)
    }
}

#[derive(Debug, Serialize, Deserialize)]
struct Record {
    id: String,
    source_id: String,
    source_class: SourceClass,
    title: String,
    body: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    published: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Dataset {
    pub name: String,
    pub source_class: SourceClass,
    pub articles: Vec<Article>,
}

impl Dataset {
    pub fn new(name: impl Into<String>, source_class: SourceClass) -> Self {
        Dataset {
            name: name.into(),
            source_class,
            articles: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.articles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.articles.is_empty()
    }

    fn with_articles(&self, articles: Vec<Article>) -> Dataset {
        Dataset {
            name: self.name.clone(),
            source_class: self.source_class,
            articles,
        }
    }

    /// Writes the dataset back in the line-delimited dump format.
    pub fn write_jsonl<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        for a in &self.articles {
            let record = Record {
                id: a.id.clone(),
                source_id: a.source_id.clone(),
                source_class: a.source_class,
                title: a.title.clone(),
                body: a.body.clone(),
                published: a.published.map(|d| d.format("%Y-%m-%d").to_string()),
            };
            serde_json::to_writer(&mut out, &record)?;
            out.write_all(b"\n")?;
        }
        Ok(())
    }
}

/// Counts gathered while ingesting one dump.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct IngestReport {
    pub records: usize,
    pub kept: usize,
    pub dropped_empty_body: usize,
    pub invalid_dates: usize,
    pub undated: usize,
}

/// Dates outside `[2000-01-01, as_of]` are treated like malformed ones.
#[derive(Debug, Clone, Copy)]
pub struct IngestOptions {
    pub as_of: NaiveDate,
}

fn earliest_date() -> NaiveDate {
    NaiveDate::from_ymd_opt(2000, 1, 1).expect("valid date")
}

/// Reads a dump file. See [`read_articles`].
pub fn ingest(
    path: &Path,
    name: &str,
    source_class: SourceClass,
    options: IngestOptions,
) -> Result<(Dataset, IngestReport)> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    read_articles(BufReader::new(file), name, source_class, options).map_err(|e| match e {
        Error::Io { source, .. } => Error::io(path, source),
        other => other,
    })
}

/// Parses line-delimited article records.
///
/// Blank lines are skipped. Records with an empty body are dropped and
/// counted; unparseable or out-of-range dates leave `published` empty.
/// Structural problems (bad JSON, a foreign source class, a repeated id)
/// fail with the offending line number.
pub fn read_articles<R: BufRead>(
    input: R,
    name: &str,
    source_class: SourceClass,
    options: IngestOptions,
) -> Result<(Dataset, IngestReport)> {
    let mut dataset = Dataset::new(name, source_class);
    let mut report = IngestReport::default();
    let mut seen_ids = HashSet::new();
    for (n, line) in input.lines().enumerate() {
        let line_no = n + 1;
        let line = line.map_err(|e| Error::io("<input>", e))?;
        if line.trim().is_empty() {
            continue;
        }
        let record: Record =
            serde_json::from_str(&line).map_err(|e| Error::parse(line_no, e.to_string()))?;
        report.records += 1;
        if record.source_class != source_class {
            return Err(Error::parse(
                line_no,
                format!(
                    "source_class `{}` does not match dataset class `{}`",
                    record.source_class, source_class
                ),
            ));
        }
        if !seen_ids.insert(record.id.clone()) {
            return Err(Error::parse(
                line_no,
                format!("duplicate id `{}`", record.id),
            ));
        }
        if record.body.trim().is_empty() {
            report.dropped_empty_body += 1;
            continue;
        }
        let published = match record.published.as_deref() {
            None => None,
            Some(raw) => {
                let parsed = NaiveDate::parse_from_str(raw.trim(), "%Y-%m-%d")
                    .ok()
                    .filter(|d| *d >= earliest_date() && *d <= options.as_of);
                if parsed.is_none() {
                    report.invalid_dates += 1;
                }
                parsed
            }
        };
        if published.is_none() {
            report.undated += 1;
        }
        dataset.articles.push(Article {
            id: record.id,
            source_id: record.source_id,
            source_class: record.source_class,
            title: record.title,
            body: record.body,
            published,
        });
    }
    report.kept = dataset.len();
    Ok((dataset, report))
}

const DEFAULT_KEYWORDS: &str = include_str!("../data/keywords.txt");

/// The bundled 27-phrase keyword list.
pub fn default_keywords() -> Vec<String> {
    parse_keywords(DEFAULT_KEYWORDS)
}

/// One phrase per line; blank lines and `#` comments are ignored.
pub fn parse_keywords(text: &str) -> Vec<String> {
    text.lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(String::from)
        .collect()
}

fn contains_phrase(haystack: &[String], phrase: &[String]) -> bool {
    !phrase.is_empty()
        && haystack.len() >= phrase.len()
        && haystack.windows(phrase.len()).any(|w| w == phrase)
}

/// Keeps articles whose title or body contains one of the keyword phrases
/// as a contiguous run of whole words (case-insensitive).
pub fn filter_by_keywords<S: AsRef<str>>(dataset: &Dataset, keywords: &[S]) -> Result<Dataset> {
    if keywords.is_empty() {
        return Err(Error::domain("keyword list is empty"));
    }
    let phrases: Vec<Vec<String>> = keywords
        .iter()
        .map(|k| word_tokens(k.as_ref()))
        .filter(|p| !p.is_empty())
        .collect();
    let kept = dataset
        .articles
        .iter()
        .filter(|a| {
            let title = word_tokens(&a.title);
            let body = word_tokens(&a.body);
            phrases
                .iter()
                .any(|p| contains_phrase(&title, p) || contains_phrase(&body, p))
        })
        .cloned()
        .collect();
    Ok(dataset.with_articles(kept))
}

/// Lowercased with whitespace runs collapsed to one space.
pub fn normalize_text(text: &str) -> String {
    text.split_whitespace()
        .map(str::to_lowercase)
        .collect::<Vec<_>>()
        .join(" ")
}

/// Removes later copies of articles with the same normalized title and body.
pub fn deduplicate(dataset: &Dataset) -> Dataset {
    let mut seen = HashSet::new();
    let kept = dataset
        .articles
        .iter()
        .filter(|a| seen.insert((normalize_text(&a.title), normalize_text(&a.body))))
        .cloned()
        .collect();
    dataset.with_articles(kept)
}

/// A calendar month.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct YearMonth {
    pub year: i32,
    pub month: u32,
}

impl YearMonth {
    pub fn new(year: i32, month: u32) -> Result<Self> {
        if !(1..=12).contains(&month) {
            return Err(Error::domain(format!("month {month} out of range")));
        }
        Ok(YearMonth { year, month })
    }

    pub fn of(date: NaiveDate) -> Self {
        YearMonth {
            year: date.year(),
            month: date.month(),
        }
    }

    pub fn succ(self) -> Self {
        if self.month == 12 {
            YearMonth {
                year: self.year + 1,
                month: 1,
            }
        } else {
            YearMonth {
                year: self.year,
                month: self.month + 1,
            }
        }
    }

    /// Months from `self` to `later`; negative when `later` is earlier.
    pub fn months_until(self, later: YearMonth) -> i64 {
        (i64::from(later.year) - i64::from(self.year)) * 12 + i64::from(later.month)
            - i64::from(self.month)
    }
}

impl fmt::Display for YearMonth {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:04}-{:02}", self.year, self.month)
    }
}

impl FromStr for YearMonth {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::domain(format!("expected YYYY-MM, got `{s}`"));
        let (y, m) = s.trim().split_once('-').ok_or_else(bad)?;
        let year = y.parse().map_err(|_| bad())?;
        let month = m.parse().map_err(|_| bad())?;
        YearMonth::new(year, month)
    }
}

/// Articles published in one month, as indices into the dataset.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MonthlyBucket {
    pub month: YearMonth,
    pub members: Vec<usize>,
}

impl MonthlyBucket {
    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MonthlyBuckets {
    /// Gap-free, one bucket per month from the earliest to the latest date.
    pub buckets: Vec<MonthlyBucket>,
    pub undated: usize,
}

/// Earliest and latest publication month, if any article is dated.
pub fn month_span(dataset: &Dataset) -> Option<(YearMonth, YearMonth)> {
    let months = dataset
        .articles
        .iter()
        .filter_map(|a| a.published.map(YearMonth::of));
    let (lo, hi) = months.fold(
        (None, None),
        |(lo, hi): (Option<YearMonth>, Option<YearMonth>), m| {
            (
                Some(lo.map_or(m, |l| l.min(m))),
                Some(hi.map_or(m, |h| h.max(m))),
            )
        },
    );
    Some((lo?, hi?))
}

/// Groups dated articles by month; undated ones are only counted.
pub fn bucket_by_month(dataset: &Dataset) -> MonthlyBuckets {
    match month_span(dataset) {
        Some((first, last)) => bucket_by_month_between(dataset, first, last),
        None => MonthlyBuckets {
            buckets: Vec::new(),
            undated: dataset
                .articles
                .iter()
                .filter(|a| a.published.is_none())
                .count(),
        },
    }
}

/// Like [`bucket_by_month`] over the fixed range `first..=last`, so series of
/// different datasets line up. Articles dated outside the range are counted
/// as undated.
pub fn bucket_by_month_between(
    dataset: &Dataset,
    first: YearMonth,
    last: YearMonth,
) -> MonthlyBuckets {
    let span = usize::try_from(first.months_until(last) + 1).unwrap_or(0);
    let mut buckets = Vec::with_capacity(span);
    let mut month = first;
    for _ in 0..span {
        buckets.push(MonthlyBucket {
            month,
            members: Vec::new(),
        });
        month = month.succ();
    }
    let mut undated = 0;
    for (i, a) in dataset.articles.iter().enumerate() {
        let slot = a
            .published
            .map(|d| first.months_until(YearMonth::of(d)))
            .filter(|&off| off >= 0 && (off as usize) < span);
        match slot {
            Some(off) => buckets[off as usize].members.push(i),
            None => undated += 1,
        }
    }
    MonthlyBuckets { buckets, undated }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn opts() -> IngestOptions {
        IngestOptions {
            as_of: NaiveDate::from_ymd_opt(2021, 6, 30).unwrap(),
        }
    }

    fn article(id: &str, title: &str, body: &str, date: Option<&str>) -> Article {
        Article {
            id: id.into(),
            source_id: "src".into(),
            source_class: SourceClass::News,
            title: title.into(),
            body: body.into(),
            published: date.map(|d| NaiveDate::parse_from_str(d, "%Y-%m-%d").unwrap()),
        }
    }

    fn dataset(articles: Vec<Article>) -> Dataset {
        Dataset {
            name: "t".into(),
            source_class: SourceClass::News,
            articles,
        }
    }

    fn line(id: &str, body: &str, published: Option<&str>) -> String {
        let date = published
            .map(|d| format!(r#","published":"{d}""#))
            .unwrap_or_default();
        format!(
            r#"{{"id":"{id}","source_id":"s","source_class":"news","title":"T {id}","body":"{body}"{date}}}"#
        )
    }

    fn read(text: &str) -> Result<(Dataset, IngestReport)> {
        read_articles(text.as_bytes(), "news", SourceClass::News, opts())
    }

    #[test]
    fn ingest_valid_records() {
        let text = [
            line("a", "one", Some("2019-01-05")),
            line("b", "two", None),
            line("c", "three", Some("2020-02-29")),
        ]
        .join("\n");
        let (d, r) = read(&text).unwrap();
        assert_eq!(d.len(), 3);
        assert_eq!(r.kept, 3);
        assert_eq!(r.undated, 1);
    }

    #[test]
    fn ingest_malformed_date_becomes_absent() {
        let (d, r) = read(&line("a", "text", Some("not-a-date"))).unwrap();
        assert_eq!(d.len(), 1);
        assert_eq!(d.articles[0].published, None);
        assert_eq!(r.invalid_dates, 1);
        // before 2000 and after the ingestion date
        let text = [
            line("a", "x", Some("1999-12-31")),
            line("b", "y", Some("2030-01-01")),
        ]
        .join("\n");
        let (d, _) = read(&text).unwrap();
        assert!(d.articles.iter().all(|a| a.published.is_none()));
    }

    #[test]
    fn ingest_drops_empty_bodies() {
        // one empty body among five records
        let text = [
            line("a", "alpha", None),
            line("b", "", None),
            line("c", "gamma", None),
            line("d", "delta", None),
            line("e", "epsilon", None),
        ]
        .join("\n");
        let (d, r) = read(&text).unwrap();
        assert_eq!(d.len(), 4);
        assert_eq!(r.dropped_empty_body, 1);
        assert_eq!(r.records, 5);
    }

    #[test]
    fn ingest_parse_error_names_line() {
        let text = format!("{}\n\n{{not json\n", line("a", "x", None));
        match read(&text) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("unexpected {other:?}"),
        }
        let dup = [line("a", "x", None), line("a", "y", None)].join("\n");
        assert!(matches!(read(&dup), Err(Error::Parse { line: 2, .. })));
        let foreign = r#"{"id":"a","source_id":"s","source_class":"blog","title":"t","body":"b"}"#;
        assert!(matches!(read(foreign), Err(Error::Parse { line: 1, .. })));
    }

    #[test]
    fn ingest_missing_file_is_io_error() {
        let err = ingest(
            Path::new("/nonexistent/trendlens.jsonl"),
            "x",
            SourceClass::News,
            opts(),
        )
        .unwrap_err();
        assert!(matches!(err, Error::Io { .. }));
    }

    #[test]
    fn jsonl_round_trip() {
        let d = dataset(vec![
            article("a", "Title", "Body \"quoted\"", Some("2019-03-04")),
            article("b", "T2", "B2", None),
        ]);
        let mut buf = Vec::new();
        d.write_jsonl(&mut buf).unwrap();
        let (back, _) = read(std::str::from_utf8(&buf).unwrap()).unwrap();
        assert_eq!(back.articles, d.articles);
    }

    #[test]
    fn keyword_matching_rules() {
        let d = dataset(vec![article("a", "t", "Cybersecurity matters", None)]);
        assert_eq!(filter_by_keywords(&d, &["cybersecurity"]).unwrap().len(), 1);
        let d = dataset(vec![article("a", "t", "a cyberattack happened", None)]);
        assert_eq!(filter_by_keywords(&d, &["cyber attack"]).unwrap().len(), 0);
        let d = dataset(vec![article("a", "t", "we ate scampi", None)]);
        assert_eq!(filter_by_keywords(&d, &["scam"]).unwrap().len(), 0);
        let d = dataset(vec![article("a", "A Cyber  Attack!", "nothing", None)]);
        assert_eq!(filter_by_keywords(&d, &["cyber attack"]).unwrap().len(), 1);
        assert!(filter_by_keywords::<&str>(&d, &[]).is_err());
    }

    #[test]
    fn deduplicate_normalizes() {
        let d = dataset(vec![
            article("a", "Hello World", "same body", None),
            article("b", "hello   WORLD", "same  body", None),
            article("c", "Hello World", "other body", None),
        ]);
        let out = deduplicate(&d);
        let ids: Vec<&str> = out.articles.iter().map(|a| a.id.as_str()).collect();
        assert_eq!(ids, ["a", "c"]);
    }

    #[test]
    fn deduplicate_fixture_of_seven() {
        let d = dataset(vec![
            article("1", "A", "x", None),
            article("2", "B", "y", None),
            article("3", "a", "X", None),
            article("4", "C", "z", None),
            article("5", "D", "w", None),
            article("6", "b ", " y", None),
            article("7", "E", "v", None),
        ]);
        assert_eq!(deduplicate(&d).len(), 5);
    }

    #[test]
    fn bucket_months_gap_free() {
        let d = dataset(vec![
            article("a", "t", "b", Some("2019-01-05")),
            article("b", "t", "b", Some("2019-01-20")),
            article("c", "t", "b", Some("2019-03-02")),
        ]);
        let b = bucket_by_month(&d);
        let sizes: Vec<(String, usize)> = b
            .buckets
            .iter()
            .map(|b| (b.month.to_string(), b.len()))
            .collect();
        assert_eq!(
            sizes,
            [
                ("2019-01".to_string(), 2),
                ("2019-02".to_string(), 0),
                ("2019-03".to_string(), 1)
            ]
        );
        assert_eq!(b.undated, 0);
    }

    #[test]
    fn bucket_all_undated() {
        let d = dataset(vec![
            article("a", "t", "b", None),
            article("b", "t", "c", None),
        ]);
        let b = bucket_by_month(&d);
        assert!(b.buckets.is_empty());
        assert_eq!(b.undated, 2);
    }

    #[test]
    fn bucket_mixed_fixture() {
        // 12 articles: Nov-2019 x3, Dec-2019 x0, Jan-2020 x4, Feb-2020 x2, 3 undated
        let dates = [
            Some("2019-11-01"),
            Some("2020-01-31"),
            None,
            Some("2019-11-15"),
            Some("2020-02-10"),
            Some("2020-01-01"),
            None,
            Some("2020-01-12"),
            Some("2019-11-30"),
            Some("2020-02-28"),
            None,
            Some("2020-01-20"),
        ];
        let d = dataset(
            dates
                .iter()
                .enumerate()
                .map(|(i, dt)| article(&i.to_string(), "t", "b", *dt))
                .collect(),
        );
        let b = bucket_by_month(&d);
        let sizes: Vec<usize> = b.buckets.iter().map(MonthlyBucket::len).collect();
        assert_eq!(sizes, [3, 0, 4, 2]);
        assert_eq!(b.undated, 3);
        assert_eq!(b.buckets[0].members, [0, 3, 8]);

        let first: YearMonth = "2019-12".parse().unwrap();
        let last: YearMonth = "2020-04".parse().unwrap();
        let fixed = bucket_by_month_between(&d, first, last);
        let sizes: Vec<usize> = fixed.buckets.iter().map(MonthlyBucket::len).collect();
        assert_eq!(sizes, [0, 4, 2, 0, 0]);
        assert_eq!(fixed.undated, 6);
        assert_eq!(
            month_span(&d),
            Some(("2019-11".parse().unwrap(), "2020-02".parse().unwrap()))
        );
    }

    #[test]
    fn year_month_parse_and_order() {
        let m: YearMonth = "2019-12".parse().unwrap();
        assert_eq!(m.succ().to_string(), "2020-01");
        assert_eq!(m.months_until("2021-02".parse().unwrap()), 14);
        assert!("2019-13".parse::<YearMonth>().is_err());
    }

    fn arb_dataset() -> impl Strategy<Value = Dataset> {
        let art = (
            prop::sample::select(vec!["Alpha", "alpha ", "Beta", "GAMMA"]),
            prop::sample::select(vec![
                "malware spreads",
                "Malware  spreads",
                "phishing wave",
                "quiet day",
            ]),
            prop::option::of((2000i32..2003, 1u32..13, 1u32..28)),
        );
        prop::collection::vec(art, 0..30).prop_map(|items| {
            dataset(
                items
                    .into_iter()
                    .enumerate()
                    .map(|(i, (t, b, d))| Article {
                        id: i.to_string(),
                        source_id: "s".into(),
                        source_class: SourceClass::News,
                        title: t.into(),
                        body: b.into(),
                        published: d.and_then(|(y, m, dd)| NaiveDate::from_ymd_opt(y, m, dd)),
                    })
                    .collect(),
            )
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]

        #[test]
        fn deduplicate_is_idempotent(d in arb_dataset()) {
            let once = deduplicate(&d);
            prop_assert!(once.len() <= d.len());
            prop_assert_eq!(deduplicate(&once), once);
        }

        #[test]
        fn keyword_union_is_superset(d in arb_dataset(), split in 1usize..3) {
            let all = ["malware", "phishing wave", "gamma"];
            let (k1, _) = all.split_at(split);
            let small: HashSet<String> = filter_by_keywords(&d, k1).unwrap()
                .articles.into_iter().map(|a| a.id).collect();
            let big: HashSet<String> = filter_by_keywords(&d, &all).unwrap()
                .articles.into_iter().map(|a| a.id).collect();
            prop_assert!(small.is_subset(&big));
        }

        #[test]
        fn buckets_account_for_every_article(d in arb_dataset()) {
            let b = bucket_by_month(&d);
            let total: usize = b.buckets.iter().map(MonthlyBucket::len).sum();
            prop_assert_eq!(total + b.undated, d.len());
            for w in b.buckets.windows(2) {
                prop_assert_eq!(w[0].month.succ(), w[1].month);
            }
            for bucket in &b.buckets {
                for &i in &bucket.members {
                    prop_assert_eq!(YearMonth::of(d.articles[i].published.unwrap()), bucket.month);
                }
            }
        }
    }
}
