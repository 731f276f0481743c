//! Security-category corpora and per-document category profiles.
//!
//! A category corpus `C_k` is a set of terms, each with its variants. The
//! relevance of a document to a category is the fraction of the corpus'
//! terms that occur in it (a term counts once, whichever variant matched).
//! A category is dominant for a document when that fraction is strictly
//! above the category's threshold.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fmt;
use std::io::{BufRead, Write};
use std::path::Path;
use std::str::FromStr;

use crate::terms::{surface_string, Ngram, TermEntry};
use crate::text::{tokenize, TokenStream};
use crate::{Error, Result};

const SEED_TAXONOMY: &str = include_str!("../data/taxonomy_seed.tsv");

/// Most categories a labeller may give a single term.
pub const MAX_CATEGORIES_PER_TERM: usize = 3;

/// The 16 security categories, in their fixed reporting order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum CategoryId {
    CycmnAc,
    CysePrg,
    ElecSe,
    FMClm,
    IdtFncFrd,
    InfPry,
    IoTThr,
    MalVr,
    MbAppSe,
    NatSe,
    NetAtk,
    PwdEnc,
    SeSwServ,
    SeUdVnb,
    SpmPh,
    WbAtk,
}

pub const CATEGORY_COUNT: usize = 16;

impl CategoryId {
    pub const ALL: [CategoryId; CATEGORY_COUNT] = [
        CategoryId::CycmnAc,
        CategoryId::CysePrg,
        CategoryId::ElecSe,
        CategoryId::FMClm,
        CategoryId::IdtFncFrd,
        CategoryId::InfPry,
        CategoryId::IoTThr,
        CategoryId::MalVr,
        CategoryId::MbAppSe,
        CategoryId::NatSe,
        CategoryId::NetAtk,
        CategoryId::PwdEnc,
        CategoryId::SeSwServ,
        CategoryId::SeUdVnb,
        CategoryId::SpmPh,
        CategoryId::WbAtk,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn code(self) -> &'static str {
        match self {
            CategoryId::CycmnAc => "CycmnAc",
            CategoryId::CysePrg => "CysePrg",
            CategoryId::ElecSe => "ElecSe",
            CategoryId::FMClm => "FMClm",
            CategoryId::IdtFncFrd => "IdtFncFrd",
            CategoryId::InfPry => "InfPry",
            CategoryId::IoTThr => "IoTThr",
            CategoryId::MalVr => "MalVr",
            CategoryId::MbAppSe => "MbAppSe",
            CategoryId::NatSe => "NatSe",
            CategoryId::NetAtk => "NetAtk",
            CategoryId::PwdEnc => "PwdEnc",
            CategoryId::SeSwServ => "SeSwServ",
            CategoryId::SeUdVnb => "SeUdVnb",
            CategoryId::SpmPh => "SpmPh",
            CategoryId::WbAtk => "WbAtk",
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            CategoryId::CycmnAc => "cybercriminal activity",
            CategoryId::CysePrg => "cybersecurity program",
            CategoryId::ElecSe => "election security",
            CategoryId::FMClm => "false/misleading claim",
            CategoryId::IdtFncFrd => "identity theft/financial fraud",
            CategoryId::InfPry => "information privacy",
            CategoryId::IoTThr => "IoT threat",
            CategoryId::MalVr => "malware/virus",
            CategoryId::MbAppSe => "mobile/application security",
            CategoryId::NatSe => "national security",
            CategoryId::NetAtk => "network attack",
            CategoryId::PwdEnc => "password/encryption",
            CategoryId::SeSwServ => "security software/service",
            CategoryId::SeUdVnb => "security update/vulnerability",
            CategoryId::SpmPh => "spam/phishing",
            CategoryId::WbAtk => "web-based attack",
        }
    }
}

impl fmt::Display for CategoryId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.code())
    }
}

impl FromStr for CategoryId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        CategoryId::ALL
            .into_iter()
            .find(|c| c.code() == s.trim())
            .ok_or_else(|| Error::domain(format!("unknown category `{s}`")))
    }
}

/// One corpus term with the surface forms that count as it.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct CategoryTerm {
    pub surface: Ngram,
    /// Always contains `surface`.
    pub variants: BTreeSet<Ngram>,
}

impl CategoryTerm {
    /// Tokenizes `surface` and each variant the way documents are tokenized.
    pub fn from_text<S: AsRef<str>>(surface: &str, variants: &[S]) -> Result<Self> {
        let norm = |s: &str| -> Result<Ngram> {
            let t = tokenize(s, None).tokens;
            if t.is_empty() {
                Err(Error::domain(format!("term `{s}` has no indexable words")))
            } else {
                Ok(t)
            }
        };
        let surface = norm(surface)?;
        let mut all = BTreeSet::from([surface.clone()]);
        for v in variants {
            all.insert(norm(v.as_ref())?);
        }
        Ok(CategoryTerm {
            surface,
            variants: all,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CategoryCorpus {
    pub category: CategoryId,
    pub definition: String,
    /// Unique by surface, sorted.
    terms: Vec<CategoryTerm>,
}

impl CategoryCorpus {
    pub fn new(
        category: CategoryId,
        definition: impl Into<String>,
        terms: Vec<CategoryTerm>,
    ) -> Result<Self> {
        let mut by_surface: BTreeMap<Ngram, CategoryTerm> = BTreeMap::new();
        for t in terms {
            match by_surface.get_mut(&t.surface) {
                Some(existing) => existing.variants.extend(t.variants),
                None => {
                    by_surface.insert(t.surface.clone(), t);
                }
            }
        }
        if by_surface.is_empty() {
            return Err(Error::domain(format!("category {category} has no terms")));
        }
        Ok(CategoryCorpus {
            category,
            definition: definition.into(),
            terms: by_surface.into_values().collect(),
        })
    }

    pub fn terms(&self) -> &[CategoryTerm] {
        &self.terms
    }

    /// `|C_k|`.
    pub fn size(&self) -> usize {
        self.terms.len()
    }

    fn max_term_len(&self) -> usize {
        self.terms
            .iter()
            .flat_map(|t| t.variants.iter().map(Vec::len))
            .max()
            .unwrap_or(0)
    }
}

/// The corpora of all categories that have one.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CategoryCorpora {
    corpora: BTreeMap<CategoryId, CategoryCorpus>,
}

impl CategoryCorpora {
    pub fn new(corpora: impl IntoIterator<Item = CategoryCorpus>) -> Self {
        CategoryCorpora {
            corpora: corpora.into_iter().map(|c| (c.category, c)).collect(),
        }
    }

    /// Corpora built from the bundled seed taxonomy (the example terms of
    /// every category).
    pub fn seed() -> Self {
        Self::parse_tsv(SEED_TAXONOMY.as_bytes()).expect("bundled taxonomy is well-formed")
    }

    pub fn get(&self, category: CategoryId) -> Option<&CategoryCorpus> {
        self.corpora.get(&category)
    }

    pub fn size(&self, category: CategoryId) -> usize {
        self.get(category).map_or(0, CategoryCorpus::size)
    }

    pub fn iter(&self) -> impl Iterator<Item = &CategoryCorpus> {
        self.corpora.values()
    }

    pub fn is_complete(&self) -> bool {
        self.corpora.len() == CATEGORY_COUNT
    }

    fn max_term_len(&self) -> usize {
        self.iter()
            .map(CategoryCorpus::max_term_len)
            .max()
            .unwrap_or(0)
    }

    /// Widens every corpus term with the variants of the extracted term it
    /// matches (by surface or by any variant).
    pub fn attach_variants(&mut self, terms: &[TermEntry]) {
        for corpus in self.corpora.values_mut() {
            for t in &mut corpus.terms {
                for entry in terms {
                    if entry.variants.iter().any(|v| t.variants.contains(v)) {
                        t.variants.extend(entry.variants.iter().cloned());
                    }
                }
            }
        }
    }

    /// Table with columns category id, definition, term, variants
    /// (`|`-separated). The definition may be left empty after the first row
    /// of a category; `#` lines are comments.
    pub fn parse_tsv<R: BufRead>(input: R) -> Result<Self> {
        let mut definitions: BTreeMap<CategoryId, String> = BTreeMap::new();
        let mut terms: BTreeMap<CategoryId, Vec<CategoryTerm>> = BTreeMap::new();
        for (n, line) in input.lines().enumerate() {
            let line = line.map_err(|e| Error::parse(n + 1, e.to_string()))?;
            if line.trim().is_empty() || line.starts_with('#') {
                continue;
            }
            let cols: Vec<&str> = line.split('\t').collect();
            if cols.len() < 3 {
                return Err(Error::parse(
                    n + 1,
                    "expected category, definition, term[, variants]",
                ));
            }
            let category: CategoryId = cols[0]
                .parse()
                .map_err(|e: Error| Error::parse(n + 1, e.to_string()))?;
            if !cols[1].trim().is_empty() {
                definitions
                    .entry(category)
                    .or_insert_with(|| cols[1].trim().to_string());
            }
            let variants: Vec<&str> = cols
                .get(3)
                .map(|v| {
                    v.split('|')
                        .map(str::trim)
                        .filter(|v| !v.is_empty())
                        .collect()
                })
                .unwrap_or_default();
            let term = CategoryTerm::from_text(cols[2], &variants)
                .map_err(|e| Error::parse(n + 1, e.to_string()))?;
            terms.entry(category).or_default().push(term);
        }
        let corpora = terms
            .into_iter()
            .map(|(c, ts)| {
                let def = definitions.get(&c).cloned().unwrap_or_default();
                CategoryCorpus::new(c, def, ts)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self::new(corpora))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
        Self::parse_tsv(std::io::BufReader::new(file))
    }

    pub fn write_tsv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "# category\tdefinition\tterm\tvariants")?;
        for corpus in self.iter() {
            for (i, t) in corpus.terms.iter().enumerate() {
                let def = if i == 0 {
                    corpus.definition.as_str()
                } else {
                    ""
                };
                let variants: Vec<String> = t
                    .variants
                    .iter()
                    .filter(|v| **v != t.surface)
                    .map(|v| surface_string(v))
                    .collect();
                writeln!(
                    out,
                    "{}\t{}\t{}\t{}",
                    corpus.category,
                    def,
                    surface_string(&t.surface),
                    variants.join("|")
                )?;
            }
        }
        Ok(())
    }
}

/// One labeller's category assignments from the card sort.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabelSheet {
    pub labeller: String,
    /// Normalized term text → 1 to 3 categories.
    pub assignments: BTreeMap<String, BTreeSet<CategoryId>>,
}

fn normalize_term(term: &str) -> String {
    term.split_whitespace()
        .map(str::to_lowercase)
        .collect::<Vec<_>>()
        .join(" ")
}

impl LabelSheet {
    pub fn new(
        labeller: impl Into<String>,
        assignments: impl IntoIterator<Item = (String, BTreeSet<CategoryId>)>,
    ) -> Result<Self> {
        let mut map = BTreeMap::new();
        for (term, cats) in assignments {
            if cats.is_empty() || cats.len() > MAX_CATEGORIES_PER_TERM {
                return Err(Error::domain(format!(
                    "term `{term}` has {} categories; 1 to {MAX_CATEGORIES_PER_TERM} allowed",
                    cats.len()
                )));
            }
            map.insert(normalize_term(&term), cats);
        }
        Ok(LabelSheet {
            labeller: labeller.into(),
            assignments: map,
        })
    }

    /// `term<TAB>Cat1,Cat2` lines; `#` comments allowed.
    pub fn parse<R: BufRead>(labeller: &str, input: R) -> Result<Self> {
        let mut assignments = Vec::new();
        for (n, line) in input.lines().enumerate() {
            let line = line.map_err(|e| Error::parse(n + 1, e.to_string()))?;
            if line.trim().is_empty() || line.starts_with('#') {
                continue;
            }
            let (term, cats) = line
                .split_once('\t')
                .ok_or_else(|| Error::parse(n + 1, "expected `term<TAB>categories`"))?;
            let cats: BTreeSet<CategoryId> = cats
                .split(',')
                .map(str::parse)
                .collect::<Result<_>>()
                .map_err(|e| Error::parse(n + 1, e.to_string()))?;
            if cats.is_empty() || cats.len() > MAX_CATEGORIES_PER_TERM {
                return Err(Error::parse(n + 1, "a term takes 1 to 3 categories"));
            }
            assignments.push((term.to_string(), cats));
        }
        Self::new(labeller, assignments)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let labeller = path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_default();
        let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&labeller, std::io::BufReader::new(file))
    }

    fn universe(&self) -> BTreeSet<&str> {
        self.assignments.keys().map(String::as_str).collect()
    }

    fn has(&self, term: &str, category: CategoryId) -> bool {
        self.assignments
            .get(term)
            .is_some_and(|c| c.contains(&category))
    }
}

fn check_universes(a: &LabelSheet, b: &LabelSheet) -> Result<()> {
    let (ua, ub) = (a.universe(), b.universe());
    if ua != ub {
        let diff: Vec<&str> = ua.symmetric_difference(&ub).copied().collect();
        return Err(Error::domain(format!(
            "label sheets `{}` and `{}` cover different terms: {}",
            a.labeller,
            b.labeller,
            diff.join(", ")
        )));
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabelMerge {
    pub corpora: CategoryCorpora,
    /// Terms no category won a strict majority for.
    pub unresolved: Vec<String>,
}

/// Majority vote over at least three label sheets: a term joins a category
/// when strictly more than half of the labellers gave it that category.
pub fn merge_label_sheets(sheets: &[LabelSheet]) -> Result<LabelMerge> {
    if sheets.len() < 3 {
        return Err(Error::domain(format!(
            "majority voting needs at least 3 label sheets, got {}",
            sheets.len()
        )));
    }
    for s in &sheets[1..] {
        check_universes(&sheets[0], s)?;
    }
    let mut members: BTreeMap<CategoryId, Vec<CategoryTerm>> = BTreeMap::new();
    let mut unresolved = Vec::new();
    for term in sheets[0].assignments.keys() {
        let mut won = false;
        for c in CategoryId::ALL {
            let votes = sheets.iter().filter(|s| s.has(term, c)).count();
            if 2 * votes > sheets.len() {
                won = true;
                let t = CategoryTerm::from_text::<&str>(term, &[])?;
                members.entry(c).or_default().push(t);
            }
        }
        if !won {
            unresolved.push(term.clone());
        }
    }
    let corpora = members
        .into_iter()
        .map(|(c, ts)| CategoryCorpus::new(c, seed_definition(c), ts))
        .collect::<Result<Vec<_>>>()?;
    Ok(LabelMerge {
        corpora: CategoryCorpora::new(corpora),
        unresolved,
    })
}

fn seed_definition(category: CategoryId) -> String {
    thread_local! {
        static SEED: CategoryCorpora = CategoryCorpora::seed();
    }
    SEED.with(|s| {
        s.get(category)
            .map(|c| c.definition.clone())
            .unwrap_or_default()
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Kappa {
    pub value: f64,
    /// Chance agreement was 1 (both raters constant and identical), so the
    /// statistic is undefined and reported as 1.
    pub degenerate: bool,
}

/// Cohen's kappa on the binary "term belongs to `category`" ratings of two
/// labellers.
pub fn cohens_kappa(a: &LabelSheet, b: &LabelSheet, category: CategoryId) -> Result<Kappa> {
    check_universes(a, b)?;
    let n = a.assignments.len();
    if n == 0 {
        return Err(Error::domain("label sheets are empty"));
    }
    let ra: Vec<bool> = a.assignments.keys().map(|t| a.has(t, category)).collect();
    let rb: Vec<bool> = a.assignments.keys().map(|t| b.has(t, category)).collect();
    Ok(kappa_from_ratings(&ra, &rb))
}

pub(crate) fn kappa_from_ratings(a: &[bool], b: &[bool]) -> Kappa {
    let n = a.len() as f64;
    let agree = a.iter().zip(b).filter(|(x, y)| x == y).count() as f64;
    let pa = a.iter().filter(|&&x| x).count() as f64 / n;
    let pb = b.iter().filter(|&&x| x).count() as f64 / n;
    let p_o = agree / n;
    let p_e = pa * pb + (1.0 - pa) * (1.0 - pb);
    if p_e >= 1.0 {
        return Kappa {
            value: 1.0,
            degenerate: true,
        };
    }
    Kappa {
        value: (p_o - p_e) / (1.0 - p_e),
        degenerate: false,
    }
}

/// The contiguous token runs of a document, for term lookup.
pub struct DocumentIndex<'a> {
    grams: HashSet<&'a [String]>,
}

impl<'a> DocumentIndex<'a> {
    pub fn new(tokens: &'a TokenStream, max_len: usize) -> Self {
        let toks = &tokens.tokens;
        let mut grams = HashSet::new();
        for start in 0..toks.len() {
            for len in 1..=max_len.min(toks.len() - start) {
                grams.insert(&toks[start..start + len]);
            }
        }
        DocumentIndex { grams }
    }

    pub fn contains(&self, ngram: &[String]) -> bool {
        self.grams.contains(ngram)
    }
}

/// `|c_k|`: corpus terms with at least one variant in the document.
pub fn matched_terms(index: &DocumentIndex<'_>, corpus: &CategoryCorpus) -> usize {
    corpus
        .terms
        .iter()
        .filter(|t| t.variants.iter().any(|v| index.contains(v)))
        .count()
}

/// `γ(d, C_k) = |c_k| / |C_k|`.
pub fn relevance(tokens: &TokenStream, corpus: &CategoryCorpus) -> f64 {
    let index = DocumentIndex::new(tokens, corpus.max_term_len());
    matched_terms(&index, corpus) as f64 / corpus.size() as f64
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ThresholdRule {
    /// `θ_k = (matches - 0.5) / |C_k|`: dominance needs at least `matches`
    /// distinct corpus terms.
    MinMatches(u32),
    /// `θ_k` sits below the top `1 - q` of the nonzero relevance values of
    /// the category.
    Quantile(f64),
}

impl Default for ThresholdRule {
    fn default() -> Self {
        ThresholdRule::MinMatches(2)
    }
}

impl fmt::Display for ThresholdRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ThresholdRule::MinMatches(m) => write!(f, "min-matches {m}"),
            ThresholdRule::Quantile(q) => write!(f, "quantile {q}"),
        }
    }
}

impl FromStr for ThresholdRule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::domain(format!("unknown threshold rule `{s}`"));
        let (kind, value) = s.trim().split_once(' ').ok_or_else(bad)?;
        match kind {
            "min-matches" => Ok(ThresholdRule::MinMatches(
                value.trim().parse().map_err(|_| bad())?,
            )),
            "quantile" => Ok(ThresholdRule::Quantile(
                value.trim().parse().map_err(|_| bad())?,
            )),
            _ => Err(bad()),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ThresholdTable {
    pub theta: [f64; CATEGORY_COUNT],
    pub rule: ThresholdRule,
}

impl ThresholdTable {
    pub fn uniform(value: f64) -> Self {
        ThresholdTable {
            theta: [value; CATEGORY_COUNT],
            rule: ThresholdRule::Quantile(f64::NAN),
        }
    }

    pub fn get(&self, category: CategoryId) -> f64 {
        self.theta[category.index()]
    }

    pub fn write_tsv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "# rule: {}", self.rule)?;
        writeln!(out, "category\ttheta")?;
        for c in CategoryId::ALL {
            writeln!(out, "{c}\t{}", self.get(c))?;
        }
        Ok(())
    }

    pub fn parse_tsv<R: BufRead>(input: R) -> Result<Self> {
        let mut rule = None;
        let mut theta = [f64::NAN; CATEGORY_COUNT];
        for (n, line) in input.lines().enumerate() {
            let line = line.map_err(|e| Error::parse(n + 1, e.to_string()))?;
            if let Some(r) = line.strip_prefix("# rule: ") {
                rule = Some(
                    r.parse()
                        .map_err(|e: Error| Error::parse(n + 1, e.to_string()))?,
                );
                continue;
            }
            if line.starts_with('#') || line.starts_with("category\t") || line.trim().is_empty() {
                continue;
            }
            let (c, v) = line
                .split_once('\t')
                .ok_or_else(|| Error::parse(n + 1, "expected `category<TAB>theta`"))?;
            let c: CategoryId = c
                .parse()
                .map_err(|e: Error| Error::parse(n + 1, e.to_string()))?;
            theta[c.index()] = v
                .trim()
                .parse()
                .map_err(|_| Error::parse(n + 1, format!("bad threshold `{v}`")))?;
        }
        if theta.iter().any(|t| t.is_nan()) {
            return Err(Error::parse(
                0,
                "threshold table does not cover all 16 categories",
            ));
        }
        Ok(ThresholdTable {
            theta,
            rule: rule.unwrap_or_default(),
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CategoryProfile {
    pub article_id: String,
    pub relevance: [f64; CATEGORY_COUNT],
    /// In category order.
    pub dominant: Vec<CategoryId>,
    pub most_relevant: CategoryId,
}

impl CategoryProfile {
    pub fn relevance_of(&self, category: CategoryId) -> f64 {
        self.relevance[category.index()]
    }

    pub fn is_dominant(&self, category: CategoryId) -> bool {
        self.dominant.contains(&category)
    }
}

/// Builds a profile from a relevance vector.
pub fn profile_from_relevance(
    article_id: &str,
    relevance: [f64; CATEGORY_COUNT],
    thresholds: &ThresholdTable,
) -> CategoryProfile {
    let dominant = CategoryId::ALL
        .into_iter()
        .filter(|c| relevance[c.index()] > thresholds.get(*c))
        .collect();
    let most_relevant = CategoryId::ALL[crate::topic::argmax_first(&relevance)];
    CategoryProfile {
        article_id: article_id.to_string(),
        relevance,
        dominant,
        most_relevant,
    }
}

/// Relevance to every category, the dominant set and the most relevant
/// category of one document. Categories without a corpus score 0.
pub fn profile(
    article_id: &str,
    tokens: &TokenStream,
    corpora: &CategoryCorpora,
    thresholds: &ThresholdTable,
) -> CategoryProfile {
    let index = DocumentIndex::new(tokens, corpora.max_term_len());
    let mut relevance = [0.0; CATEGORY_COUNT];
    for corpus in corpora.iter() {
        relevance[corpus.category.index()] =
            matched_terms(&index, corpus) as f64 / corpus.size() as f64;
    }
    profile_from_relevance(article_id, relevance, thresholds)
}

/// Chooses per-category thresholds from reference profiles.
pub fn calibrate_thresholds(
    profiles: &[CategoryProfile],
    corpora: &CategoryCorpora,
    rule: ThresholdRule,
) -> Result<ThresholdTable> {
    if profiles.is_empty() {
        return Err(Error::domain(
            "threshold calibration needs reference profiles",
        ));
    }
    let mut theta = [0.0; CATEGORY_COUNT];
    for c in CategoryId::ALL {
        theta[c.index()] = match rule {
            ThresholdRule::MinMatches(m) => {
                if m == 0 {
                    return Err(Error::domain("min-matches rule needs at least 1 match"));
                }
                match corpora.size(c) {
                    0 => 0.0,
                    size => ((f64::from(m) - 0.5) / size as f64).min(1.0 - f64::EPSILON),
                }
            }
            ThresholdRule::Quantile(q) => {
                if !(0.0..1.0).contains(&q) {
                    return Err(Error::domain("quantile must lie in [0, 1)"));
                }
                let mut nonzero: Vec<f64> = profiles
                    .iter()
                    .map(|p| p.relevance_of(c))
                    .filter(|&r| r > 0.0)
                    .collect();
                nonzero.sort_by(f64::total_cmp);
                let cut = (q * nonzero.len() as f64).floor() as usize;
                if cut == 0 {
                    0.0
                } else {
                    nonzero[cut - 1].min(1.0 - f64::EPSILON)
                }
            }
        };
    }
    Ok(ThresholdTable { theta, rule })
}

/// CSV with `article_id`, one relevance column per category, the dominant
/// categories joined by `|`, and the most relevant category.
pub fn write_profiles_csv<W: Write>(profiles: &[CategoryProfile], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let to_err = |e: csv::Error| Error::domain(format!("csv: {e}"));
    let mut header = vec!["article_id".to_string()];
    header.extend(CategoryId::ALL.iter().map(|c| c.code().to_string()));
    header.push("dominant".into());
    header.push("most_relevant".into());
    w.write_record(&header).map_err(to_err)?;
    for p in profiles {
        let mut row = vec![p.article_id.clone()];
        row.extend(p.relevance.iter().map(|r| r.to_string()));
        row.push(
            p.dominant
                .iter()
                .map(|c| c.code())
                .collect::<Vec<_>>()
                .join("|"),
        );
        row.push(p.most_relevant.code().to_string());
        w.write_record(&row).map_err(to_err)?;
    }
    w.flush().map_err(|e| Error::domain(format!("csv: {e}")))?;
    Ok(())
}

pub fn read_profiles_csv<R: std::io::Read>(input: R) -> Result<Vec<CategoryProfile>> {
    let mut r = csv::Reader::from_reader(input);
    let mut out = Vec::new();
    for (n, rec) in r.records().enumerate() {
        let line = n + 2;
        let rec = rec.map_err(|e| Error::parse(line, e.to_string()))?;
        if rec.len() != CATEGORY_COUNT + 3 {
            return Err(Error::parse(line, "wrong number of columns"));
        }
        let mut relevance = [0.0; CATEGORY_COUNT];
        for (i, r) in relevance.iter_mut().enumerate() {
            *r = rec[i + 1]
                .parse()
                .map_err(|_| Error::parse(line, "bad relevance value"))?;
        }
        let dominant = rec[CATEGORY_COUNT + 1]
            .split('|')
            .filter(|s| !s.is_empty())
            .map(str::parse)
            .collect::<Result<Vec<CategoryId>>>()
            .map_err(|e| Error::parse(line, e.to_string()))?;
        let most_relevant = rec[CATEGORY_COUNT + 2]
            .parse()
            .map_err(|e: Error| Error::parse(line, e.to_string()))?;
        out.push(CategoryProfile {
            article_id: rec[0].to_string(),
            relevance,
            dominant,
            most_relevant,
        });
    }
    Ok(out)
}
