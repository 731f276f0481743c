//! Popularity, monthly impact series, category co-occurrence and the
//! distribution of dominant-category counts.

use std::collections::BTreeMap;
use std::fmt;
use std::io::Write;

use crate::category::{CategoryId, CategoryProfile, CATEGORY_COUNT};
use crate::corpus::{MonthlyBuckets, YearMonth};
use crate::{Error, Result};

/// Share of documents for which `category` is dominant.
pub fn popularity(profiles: &[CategoryProfile], category: CategoryId) -> Result<f64> {
    if profiles.is_empty() {
        return Err(Error::domain("popularity of an empty dataset is undefined"));
    }
    let hits = profiles.iter().filter(|p| p.is_dominant(category)).count();
    Ok(hits as f64 / profiles.len() as f64)
}

/// Summed relevance of the documents of one month.
pub fn absolute_impact<'a>(
    bucket: impl IntoIterator<Item = &'a CategoryProfile>,
    category: CategoryId,
) -> f64 {
    bucket.into_iter().map(|p| p.relevance_of(category)).sum()
}

/// Mean relevance of the documents of one month; `None` for an empty month.
pub fn relative_impact<'a>(
    bucket: impl IntoIterator<Item = &'a CategoryProfile>,
    category: CategoryId,
) -> Option<f64> {
    let (sum, n) = bucket.into_iter().fold((0.0, 0usize), |(s, n), p| {
        (s + p.relevance_of(category), n + 1)
    });
    (n > 0).then(|| sum / n as f64)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ImpactKind {
    Absolute,
    Relative,
}

impl fmt::Display for ImpactKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ImpactKind::Absolute => "absolute",
            ImpactKind::Relative => "relative",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ImpactPoint {
    pub month: YearMonth,
    /// `None` marks a gap (relative impact of an empty month).
    pub value: Option<f64>,
    pub n_articles: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ImpactSeries {
    pub category: CategoryId,
    /// Source class or group the series was computed over.
    pub source: String,
    pub kind: ImpactKind,
    /// Consecutive months.
    pub points: Vec<ImpactPoint>,
    /// Undated articles left out of every month.
    pub undated_excluded: usize,
}

impl ImpactSeries {
    pub fn values(&self) -> Vec<Option<f64>> {
        self.points.iter().map(|p| p.value).collect()
    }

    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "month,value,n_articles")?;
        for p in &self.points {
            let value = p.value.map(|v| v.to_string()).unwrap_or_default();
            writeln!(out, "{},{},{}", p.month, value, p.n_articles)?;
        }
        Ok(())
    }
}

/// One point per bucket. `profiles[i]` belongs to the article the buckets
/// refer to as index `i`.
pub fn build_series(
    buckets: &MonthlyBuckets,
    profiles: &[CategoryProfile],
    category: CategoryId,
    kind: ImpactKind,
    source: &str,
) -> Result<ImpactSeries> {
    let mut points = Vec::with_capacity(buckets.buckets.len());
    for b in &buckets.buckets {
        let members = b
            .members
            .iter()
            .map(|&i| {
                profiles.get(i).ok_or_else(|| {
                    Error::domain(format!("bucket {} refers to missing profile {i}", b.month))
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let value = match kind {
            ImpactKind::Absolute => Some(absolute_impact(members.iter().copied(), category)),
            ImpactKind::Relative => relative_impact(members.iter().copied(), category),
        };
        points.push(ImpactPoint {
            month: b.month,
            value,
            n_articles: members.len(),
        });
    }
    Ok(ImpactSeries {
        category,
        source: source.to_string(),
        kind,
        points,
        undated_excluded: buckets.undated,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum EdgeWeighting {
    /// Counts of documents where the category (or both) are dominant.
    #[default]
    Dominance,
    /// Summed relevance; an edge adds the smaller of the two relevances.
    Relevance,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CooccurrenceGraph {
    pub weighting: EdgeWeighting,
    pub nodes: [f64; CATEGORY_COUNT],
    /// Keys ordered `(low, high)`; zero-weight edges are absent.
    pub edges: BTreeMap<(CategoryId, CategoryId), f64>,
}

impl CooccurrenceGraph {
    pub fn node(&self, c: CategoryId) -> f64 {
        self.nodes[c.index()]
    }

    pub fn edge(&self, a: CategoryId, b: CategoryId) -> f64 {
        let key = if a <= b { (a, b) } else { (b, a) };
        self.edges.get(&key).copied().unwrap_or(0.0)
    }

    pub fn write_edges<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "source,target,weight")?;
        for ((a, b), w) in &self.edges {
            writeln!(out, "{a},{b},{w}")?;
        }
        Ok(())
    }

    pub fn write_nodes<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "id,label,weight")?;
        for c in CategoryId::ALL {
            writeln!(out, "{c},\"{}\",{}", c.name(), self.node(c))?;
        }
        Ok(())
    }
}

pub fn cooccurrence(profiles: &[CategoryProfile], weighting: EdgeWeighting) -> CooccurrenceGraph {
    let mut nodes = [0.0; CATEGORY_COUNT];
    let mut edges = BTreeMap::new();
    for p in profiles {
        let weight = |c: CategoryId| match weighting {
            EdgeWeighting::Dominance => f64::from(u8::from(p.is_dominant(c))),
            EdgeWeighting::Relevance => p.relevance_of(c),
        };
        for a in CategoryId::ALL {
            let wa = weight(a);
            nodes[a.index()] += wa;
            if wa == 0.0 {
                continue;
            }
            for b in CategoryId::ALL.into_iter().filter(|&b| b > a) {
                let wb = weight(b);
                if wb > 0.0 {
                    *edges.entry((a, b)).or_insert(0.0) += wa.min(wb);
                }
            }
        }
    }
    CooccurrenceGraph {
        weighting,
        nodes,
        edges,
    }
}

/// How many articles have 0, 1, ..., 16 dominant categories.
#[derive(Debug, Clone, PartialEq)]
pub struct DominantDistribution {
    pub histogram: [u64; CATEGORY_COUNT + 1],
    pub total: u64,
}

impl DominantDistribution {
    pub fn proportion(&self, k: usize) -> f64 {
        self.histogram[k] as f64 / self.total as f64
    }

    /// Share of articles with at most `k` dominant categories.
    pub fn cdf(&self, k: usize) -> f64 {
        let upto: u64 = self.histogram[..=k.min(CATEGORY_COUNT)].iter().sum();
        upto as f64 / self.total as f64
    }

    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "n_dominant,articles,proportion,cdf")?;
        for k in 0..=CATEGORY_COUNT {
            writeln!(
                out,
                "{k},{},{:.6},{:.6}",
                self.histogram[k],
                self.proportion(k),
                self.cdf(k)
            )?;
        }
        Ok(())
    }
}

pub fn dominant_count_distribution(profiles: &[CategoryProfile]) -> Result<DominantDistribution> {
    if profiles.is_empty() {
        return Err(Error::domain("no profiles to count"));
    }
    let mut histogram = [0u64; CATEGORY_COUNT + 1];
    for p in profiles {
        histogram[p.dominant.len()] += 1;
    }
    Ok(DominantDistribution {
        histogram,
        total: profiles.len() as u64,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::category::{profile_from_relevance, ThresholdTable};
    use crate::corpus::MonthlyBucket;
    use proptest::prelude::*;
    use CategoryId::*;

    fn with(rel: &[(CategoryId, f64)], theta: f64) -> CategoryProfile {
        let mut r = [0.0; CATEGORY_COUNT];
        for &(c, v) in rel {
            r[c.index()] = v;
        }
        profile_from_relevance("a", r, &ThresholdTable::uniform(theta))
    }

    #[test]
    fn popularity_fixtures() {
        let all: Vec<_> = (0..4).map(|_| with(&[(MalVr, 0.5)], 0.1)).collect();
        assert_eq!(popularity(&all, MalVr).unwrap(), 1.0);
        assert_eq!(popularity(&all, NetAtk).unwrap(), 0.0);
        let mixed: Vec<_> = (0..20)
            .map(|i| with(&[(InfPry, if i < 13 { 0.5 } else { 0.05 })], 0.1))
            .collect();
        assert_eq!(popularity(&mixed, InfPry).unwrap(), 0.65);
        assert!(popularity(&[], MalVr).is_err());
    }

    #[test]
    fn impact_fixtures() {
        let b: Vec<_> = [0.2, 0.3, 0.5]
            .iter()
            .map(|&v| with(&[(MalVr, v)], 0.0))
            .collect();
        assert_eq!(absolute_impact(&b, MalVr), 1.0);
        assert!((relative_impact(&b, MalVr).unwrap() - 1.0 / 3.0).abs() < 1e-15);
        assert_eq!(absolute_impact(&[], MalVr), 0.0);
        assert_eq!(relative_impact(&[], MalVr), None);
        assert_eq!(
            relative_impact(&[with(&[(MalVr, 0.4)], 0.0)], MalVr),
            Some(0.4)
        );
    }

    #[test]
    fn series_over_three_months() {
        let profiles: Vec<_> = [0.1, 0.2, 0.4, 0.8, 0.3]
            .iter()
            .map(|&v| with(&[(SpmPh, v)], 0.0))
            .collect();
        let m = |mo| YearMonth::new(2019, mo).unwrap();
        let buckets = MonthlyBuckets {
            buckets: vec![
                MonthlyBucket {
                    month: m(1),
                    members: vec![0, 1],
                },
                MonthlyBucket {
                    month: m(2),
                    members: vec![],
                },
                MonthlyBucket {
                    month: m(3),
                    members: vec![2, 3],
                },
            ],
            undated: 1,
        };
        let abs = build_series(&buckets, &profiles, SpmPh, ImpactKind::Absolute, "news").unwrap();
        let expected = [0.1 + 0.2, 0.0, 0.4 + 0.8];
        for (p, e) in abs.points.iter().zip(expected) {
            assert!((p.value.unwrap() - e).abs() < 1e-12);
        }
        assert_eq!(abs.undated_excluded, 1);
        let rel = build_series(&buckets, &profiles, SpmPh, ImpactKind::Relative, "news").unwrap();
        assert_eq!(rel.points[1].value, None);
        assert!((rel.points[2].value.unwrap() - 0.6).abs() < 1e-12);

        let mut buf = Vec::new();
        rel.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.contains("\n2019-02,,0\n"), "{text}");

        let bad = MonthlyBuckets {
            buckets: vec![MonthlyBucket {
                month: m(1),
                members: vec![9],
            }],
            undated: 0,
        };
        assert!(build_series(&bad, &profiles, SpmPh, ImpactKind::Absolute, "news").is_err());
    }

    #[test]
    fn cooccurrence_fixtures() {
        let single: Vec<_> = [MalVr, NetAtk, SpmPh]
            .iter()
            .map(|&c| with(&[(c, 0.5)], 0.1))
            .collect();
        assert!(cooccurrence(&single, EdgeWeighting::Dominance)
            .edges
            .is_empty());

        let pair: Vec<_> = (0..5)
            .map(|_| with(&[(InfPry, 0.5), (NetAtk, 0.6)], 0.1))
            .collect();
        let g = cooccurrence(&pair, EdgeWeighting::Dominance);
        assert_eq!(g.edge(NetAtk, InfPry), 5.0);
        assert_eq!(g.node(InfPry), 5.0);
        assert_eq!(g.node(NetAtk), 5.0);

        let g = cooccurrence(&pair, EdgeWeighting::Relevance);
        assert!((g.edge(InfPry, NetAtk) - 2.5).abs() < 1e-12);
        let mut buf = Vec::new();
        g.write_edges(&mut buf).unwrap();
        assert!(String::from_utf8(buf)
            .unwrap()
            .starts_with("source,target,weight\nInfPry,NetAtk,"));
    }

    #[test]
    fn distribution_fixtures() {
        let two: Vec<_> = (0..7)
            .map(|_| with(&[(MalVr, 0.5), (WbAtk, 0.5)], 0.1))
            .collect();
        let d = dominant_count_distribution(&two).unwrap();
        assert_eq!(d.histogram[2], 7);
        assert_eq!(d.cdf(1), 0.0);
        assert_eq!(d.cdf(2), 1.0);
        let none: Vec<_> = (0..3).map(|_| with(&[], 0.1)).collect();
        assert_eq!(dominant_count_distribution(&none).unwrap().histogram[0], 3);
        assert!(dominant_count_distribution(&[]).is_err());
    }

    fn arb_profiles() -> impl Strategy<Value = Vec<CategoryProfile>> {
        prop::collection::vec(
            (
                prop::array::uniform16(prop::sample::select(vec![0.0, 0.1, 0.25, 0.5, 0.75, 1.0])),
                0.0f64..0.6,
            ),
            0..40,
        )
        .prop_map(|v| {
            v.into_iter()
                .map(|(r, t)| profile_from_relevance("p", r, &ThresholdTable::uniform(t)))
                .collect()
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]

        #[test]
        fn impact_additive_and_consistent(ps in arb_profiles(), split in 0usize..40, c in 0usize..16) {
            let c = CategoryId::ALL[c];
            let split = split.min(ps.len());
            let whole = absolute_impact(&ps, c);
            let parts = absolute_impact(&ps[..split], c) + absolute_impact(&ps[split..], c);
            prop_assert!((whole - parts).abs() < 1e-12);
            match relative_impact(&ps, c) {
                Some(r) => prop_assert!((r * ps.len() as f64 - whole).abs() < 1e-12),
                None => prop_assert!(ps.is_empty()),
            }
        }

        #[test]
        fn cdf_monotone_and_complete(ps in arb_profiles()) {
            prop_assume!(!ps.is_empty());
            let d = dominant_count_distribution(&ps).unwrap();
            prop_assert_eq!(d.histogram.iter().sum::<u64>(), ps.len() as u64);
            for k in 1..=CATEGORY_COUNT {
                prop_assert!(d.cdf(k) >= d.cdf(k - 1));
            }
            prop_assert_eq!(d.cdf(CATEGORY_COUNT), 1.0);
        }

        #[test]
        fn edges_bounded_by_nodes(ps in arb_profiles(), relevance in any::<bool>()) {
            let w = if relevance { EdgeWeighting::Relevance } else { EdgeWeighting::Dominance };
            let g = cooccurrence(&ps, w);
            for (&(a, b), &weight) in &g.edges {
                prop_assert!(a < b);
                prop_assert!(weight <= g.node(a) + 1e-12 && weight <= g.node(b) + 1e-12);
            }
        }
    }
}
