//! Chi-squared tests, correlations, Mann-Kendall trend classification and
//! time-lagged cross-correlation.
//!
//! Series with gaps are passed as `&[Option<f64>]`; gap months are dropped
//! pairwise before anything is computed.

use std::fmt;
use std::io::Write;

use statrs::function::beta::beta_reg;
use statrs::function::erf::erfc;
use statrs::function::gamma::gamma_ur;

use crate::{Error, Result};

pub const DEFAULT_ALPHA: f64 = 0.05;
pub const DEFAULT_MAX_LAG: usize = 24;
/// Fewest overlapping points a lag needs to be reported.
pub const MIN_LAG_OVERLAP: usize = 6;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChiSquared {
    pub statistic: f64,
    pub dof: usize,
    pub p_value: f64,
}

/// Pearson's chi-squared test of homogeneity on an `r × c` table of counts.
pub fn chi_squared(table: &[Vec<u64>]) -> Result<ChiSquared> {
    let rows = table.len();
    let cols = table.first().map_or(0, Vec::len);
    if rows < 2 || cols < 2 {
        return Err(Error::domain("contingency table must be at least 2 x 2"));
    }
    if table.iter().any(|r| r.len() != cols) {
        return Err(Error::domain("contingency table rows differ in length"));
    }
    let row_sums: Vec<f64> = table.iter().map(|r| r.iter().sum::<u64>() as f64).collect();
    let col_sums: Vec<f64> = (0..cols)
        .map(|j| table.iter().map(|r| r[j]).sum::<u64>() as f64)
        .collect();
    if let Some(i) = row_sums.iter().position(|&s| s == 0.0) {
        return Err(Error::domain(format!("contingency row {i} is all zero")));
    }
    if let Some(j) = col_sums.iter().position(|&s| s == 0.0) {
        return Err(Error::domain(format!("contingency column {j} is all zero")));
    }
    let total: f64 = row_sums.iter().sum();
    let mut statistic = 0.0;
    for (i, row) in table.iter().enumerate() {
        for (j, &observed) in row.iter().enumerate() {
            let expected = row_sums[i] * col_sums[j] / total;
            let d = observed as f64 - expected;
            statistic += d * d / expected;
        }
    }
    let dof = (rows - 1) * (cols - 1);
    let p_value = if statistic <= 0.0 {
        1.0
    } else {
        gamma_ur(dof as f64 / 2.0, statistic / 2.0).clamp(0.0, 1.0)
    };
    Ok(ChiSquared {
        statistic,
        dof,
        p_value,
    })
}

/// Keeps the positions where both series have a value.
pub fn drop_gaps(x: &[Option<f64>], y: &[Option<f64>]) -> (Vec<f64>, Vec<f64>) {
    x.iter()
        .zip(y)
        .filter_map(|(a, b)| Some(((*a)?, (*b)?)))
        .unzip()
}

fn check_pair(x: &[f64], y: &[f64], min_len: usize) -> Result<()> {
    if x.len() != y.len() {
        return Err(Error::domain(format!(
            "series differ in length ({} vs {})",
            x.len(),
            y.len()
        )));
    }
    if x.len() < min_len {
        return Err(Error::domain(format!(
            "need at least {min_len} points, got {}",
            x.len()
        )));
    }
    if x.iter().chain(y).any(|v| !v.is_finite()) {
        return Err(Error::domain("series contain non-finite values"));
    }
    Ok(())
}

fn pearson_unchecked(x: &[f64], y: &[f64]) -> Result<f64> {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        let (dx, dy) = (a - mx, b - my);
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if sxx == 0.0 || syy == 0.0 {
        return Err(Error::domain("series has zero variance"));
    }
    Ok((sxy / (sxx * syy).sqrt()).clamp(-1.0, 1.0))
}

/// Sample Pearson correlation coefficient.
pub fn pearson(x: &[f64], y: &[f64]) -> Result<f64> {
    check_pair(x, y, 3)?;
    pearson_unchecked(x, y)
}

pub fn pearson_gapped(x: &[Option<f64>], y: &[Option<f64>]) -> Result<f64> {
    let (x, y) = drop_gaps(x, y);
    pearson(&x, &y)
}

/// 1-based ranks with ties given the mean of the ranks they span.
pub fn mid_ranks(x: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..x.len()).collect();
    order.sort_by(|&a, &b| x[a].total_cmp(&x[b]));
    let mut ranks = vec![0.0; x.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && x[order[j + 1]] == x[order[i]] {
            j += 1;
        }
        let rank = (i + j) as f64 / 2.0 + 1.0;
        for &k in &order[i..=j] {
            ranks[k] = rank;
        }
        i = j + 1;
    }
    ranks
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Spearman {
    pub rho: f64,
    pub p_value: f64,
}

/// Two-sided p-value of a correlation coefficient under the t
/// approximation with `n - 2` degrees of freedom.
fn correlation_p_value(r: f64, n: usize) -> f64 {
    if r.abs() >= 1.0 {
        return 0.0;
    }
    let df = (n - 2) as f64;
    let t2 = r * r * df / (1.0 - r * r);
    beta_reg(df / 2.0, 0.5, df / (df + t2)).clamp(0.0, 1.0)
}

/// Spearman's rank correlation: Pearson on mid-ranks.
pub fn spearman(x: &[f64], y: &[f64]) -> Result<Spearman> {
    check_pair(x, y, 4)?;
    let rho = pearson_unchecked(&mid_ranks(x), &mid_ranks(y))?;
    Ok(Spearman {
        rho,
        p_value: correlation_p_value(rho, x.len()),
    })
}

pub fn spearman_gapped(x: &[Option<f64>], y: &[Option<f64>]) -> Result<Spearman> {
    let (x, y) = drop_gaps(x, y);
    spearman(&x, &y)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TrendDirection {
    Increasing,
    Decreasing,
    Stable,
}

impl TrendDirection {
    pub fn symbol(self) -> &'static str {
        match self {
            TrendDirection::Increasing => "↑",
            TrendDirection::Decreasing => "↓",
            TrendDirection::Stable => "→",
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            TrendDirection::Increasing => "increasing",
            TrendDirection::Decreasing => "decreasing",
            TrendDirection::Stable => "stable",
        }
    }
}

impl fmt::Display for TrendDirection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrendVerdict {
    pub direction: TrendDirection,
    pub p_value: f64,
    pub s_statistic: i64,
    pub z: f64,
    pub alpha: f64,
}

/// Mann-Kendall S: the sum of signs of all later-minus-earlier differences.
pub fn mann_kendall_s(series: &[f64]) -> i64 {
    let mut s = 0i64;
    for i in 0..series.len() {
        for j in i + 1..series.len() {
            s += match series[j].partial_cmp(&series[i]) {
                Some(std::cmp::Ordering::Greater) => 1,
                Some(std::cmp::Ordering::Less) => -1,
                _ => 0,
            };
        }
    }
    s
}

/// Variance of S under no trend, corrected for tied groups.
pub fn mann_kendall_variance(series: &[f64]) -> f64 {
    let n = series.len() as f64;
    let mut sorted = series.to_vec();
    sorted.sort_by(f64::total_cmp);
    let mut ties = 0.0;
    for group in sorted.chunk_by(|a, b| a == b) {
        let t = group.len() as f64;
        ties += t * (t - 1.0) * (2.0 * t + 5.0);
    }
    (n * (n - 1.0) * (2.0 * n + 5.0) - ties) / 18.0
}

/// Mann-Kendall monotone trend test, normal approximation with continuity
/// correction, two-sided.
pub fn mann_kendall(series: &[f64], alpha: f64) -> Result<TrendVerdict> {
    if series.len() < 4 {
        return Err(Error::domain(format!(
            "Mann-Kendall needs at least 4 points, got {}",
            series.len()
        )));
    }
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::domain("alpha must lie in (0, 1)"));
    }
    if series.iter().any(|v| !v.is_finite()) {
        return Err(Error::domain("series contains non-finite values"));
    }
    let s = mann_kendall_s(series);
    let var = mann_kendall_variance(series);
    let z = if var <= 0.0 || s == 0 {
        0.0
    } else if s > 0 {
        (s - 1) as f64 / var.sqrt()
    } else {
        (s + 1) as f64 / var.sqrt()
    };
    let p_value = erfc(z.abs() / std::f64::consts::SQRT_2).clamp(0.0, 1.0);
    let direction = if p_value >= alpha {
        TrendDirection::Stable
    } else if s > 0 {
        TrendDirection::Increasing
    } else {
        TrendDirection::Decreasing
    };
    Ok(TrendVerdict {
        direction,
        p_value,
        s_statistic: s,
        z,
        alpha,
    })
}

pub fn mann_kendall_gapped(series: &[Option<f64>], alpha: f64) -> Result<TrendVerdict> {
    let present: Vec<f64> = series.iter().flatten().copied().collect();
    mann_kendall(&present, alpha)
}

/// Correlation of two monthly series at a range of relative shifts.
#[derive(Debug, Clone, PartialEq)]
pub struct LagCorrelation {
    /// Ascending; lags without enough overlap are left out.
    pub lags: Vec<i64>,
    pub correlations: Vec<f64>,
    pub peak_lag: i64,
}

impl LagCorrelation {
    pub fn at(&self, lag: i64) -> Option<f64> {
        self.lags
            .iter()
            .position(|&l| l == lag)
            .map(|i| self.correlations[i])
    }

    pub fn peak_correlation(&self) -> f64 {
        self.at(self.peak_lag).expect("peak lag is reported")
    }
}

/// Time-lagged cross-correlation.
///
/// At lag `L` the pairs are `(a[t], b[t - L])`: a negative lag shifts `b`
/// backwards, so if `b` trails `a` by `k` months the peak is at `-k`. The
/// peak is the largest correlation, ties going to the smaller `|L|` and then
/// to the negative lag.
pub fn tlcc(a: &[f64], b: &[f64], max_lag: usize) -> Result<LagCorrelation> {
    let a: Vec<Option<f64>> = a.iter().copied().map(Some).collect();
    let b: Vec<Option<f64>> = b.iter().copied().map(Some).collect();
    tlcc_gapped(&a, &b, max_lag)
}

pub fn tlcc_gapped(a: &[Option<f64>], b: &[Option<f64>], max_lag: usize) -> Result<LagCorrelation> {
    if a.len() != b.len() {
        return Err(Error::domain("TLCC series must cover the same months"));
    }
    if a.iter().chain(b).flatten().any(|v| !v.is_finite()) {
        return Err(Error::domain("series contain non-finite values"));
    }
    let n = a.len() as i64;
    let max_lag = max_lag as i64;
    let mut lags = Vec::new();
    let mut correlations = Vec::new();
    for lag in -max_lag..=max_lag {
        let lo = lag.max(0);
        let hi = n.min(n + lag);
        let (x, y): (Vec<f64>, Vec<f64>) = (lo..hi)
            .filter_map(|t| Some((a[t as usize]?, b[(t - lag) as usize]?)))
            .unzip();
        if x.len() < MIN_LAG_OVERLAP {
            continue;
        }
        if let Ok(r) = pearson_unchecked(&x, &y) {
            lags.push(lag);
            correlations.push(r);
        }
    }
    if lags.is_empty() {
        return Err(Error::domain(format!(
            "no lag has {MIN_LAG_OVERLAP} overlapping non-constant points"
        )));
    }
    let mut order: Vec<usize> = (0..lags.len()).collect();
    order.sort_by_key(|&i| (lags[i].abs(), lags[i]));
    let mut best = order[0];
    for &i in &order[1..] {
        if correlations[i] > correlations[best] {
            best = i;
        }
    }
    Ok(LagCorrelation {
        peak_lag: lags[best],
        lags,
        correlations,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct WindowedLag {
    pub start: usize,
    pub correlation: LagCorrelation,
}

/// TLCC over rolling windows of `window` months, advancing by `step`.
/// Windows where no lag qualifies are skipped.
pub fn windowed_tlcc(
    a: &[Option<f64>],
    b: &[Option<f64>],
    max_lag: usize,
    window: usize,
    step: usize,
) -> Result<Vec<WindowedLag>> {
    if step == 0 || window < MIN_LAG_OVERLAP {
        return Err(Error::domain(format!(
            "window must be at least {MIN_LAG_OVERLAP} and step positive"
        )));
    }
    if a.len() != b.len() {
        return Err(Error::domain("TLCC series must cover the same months"));
    }
    let mut out = Vec::new();
    let mut start = 0;
    while start + window <= a.len() {
        let end = start + window;
        if let Ok(correlation) = tlcc_gapped(&a[start..end], &b[start..end], max_lag) {
            out.push(WindowedLag { start, correlation });
        }
        start += step;
    }
    Ok(out)
}

/// Centred moving average of odd `width`; near the ends and around gaps the
/// mean of the available values is used, a gap only when none are.
pub fn centered_moving_average(series: &[Option<f64>], width: usize) -> Result<Vec<Option<f64>>> {
    if width == 0 || width.is_multiple_of(2) {
        return Err(Error::domain("moving-average width must be odd"));
    }
    let half = width / 2;
    Ok((0..series.len())
        .map(|i| {
            let lo = i.saturating_sub(half);
            let hi = (i + half + 1).min(series.len());
            let vals: Vec<f64> = series[lo..hi].iter().flatten().copied().collect();
            (!vals.is_empty()).then(|| vals.iter().sum::<f64>() / vals.len() as f64)
        })
        .collect())
}

/// One line of the statistics table.
#[derive(Debug, Clone, PartialEq)]
pub struct StatRow {
    pub test: String,
    pub inputs: String,
    pub statistic: f64,
    pub p_value: Option<f64>,
    pub verdict: String,
}

pub fn write_stat_rows_csv<W: Write>(rows: &[StatRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let csv_err = |e: csv::Error| Error::domain(format!("csv: {e}"));
    w.write_record(["test", "inputs", "statistic", "p_value", "verdict"])
        .map_err(csv_err)?;
    for r in rows {
        w.write_record([
            r.test.clone(),
            r.inputs.clone(),
            format!("{:.6}", r.statistic),
            r.p_value.map(|p| format!("{p:.6}")).unwrap_or_default(),
            r.verdict.clone(),
        ])
        .map_err(csv_err)?;
    }
    w.flush().map_err(|e| Error::domain(format!("csv: {e}")))
}

/// Heat-map layout: one row per series pair, one column per lag from
/// `-max_lag` to `max_lag`; omitted lags are empty cells.
pub fn write_tlcc_matrix<W: Write>(
    rows: &[(String, LagCorrelation)],
    max_lag: usize,
    out: W,
) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let csv_err = |e: csv::Error| Error::domain(format!("csv: {e}"));
    let max_lag = max_lag as i64;
    let mut header = vec!["series".to_string()];
    header.extend((-max_lag..=max_lag).map(|l| l.to_string()));
    header.push("peak_lag".into());
    w.write_record(&header).map_err(csv_err)?;
    for (name, lc) in rows {
        let mut rec = vec![name.clone()];
        rec.extend(
            (-max_lag..=max_lag).map(|l| lc.at(l).map(|r| format!("{r:.6}")).unwrap_or_default()),
        );
        rec.push(lc.peak_lag.to_string());
        w.write_record(&rec).map_err(csv_err)?;
    }
    w.flush().map_err(|e| Error::domain(format!("csv: {e}")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn chi_squared_fixtures() {
        let c = chi_squared(&[vec![10, 10], vec![10, 10]]).unwrap();
        assert_eq!(c.statistic, 0.0);
        assert_eq!(c.p_value, 1.0);
        let c = chi_squared(&[vec![20, 5], vec![5, 20]]).unwrap();
        assert!((c.statistic - 18.0).abs() < 1e-9);
        assert_eq!(c.dof, 1);
        // survival function of chi2(1) at 18
        assert!(
            (c.p_value - 2.209_049_699_858_5e-5).abs() < 1e-12,
            "{}",
            c.p_value
        );
        assert!(chi_squared(&[vec![0, 0], vec![1, 2]]).is_err());
        assert!(chi_squared(&[vec![1, 0], vec![2, 0]]).is_err());
        assert!(chi_squared(&[vec![1, 2]]).is_err());
    }

    #[test]
    fn pearson_lines() {
        let x = [1.0, 2.0, 3.0, 4.0];
        let y: Vec<f64> = x.iter().map(|v| 2.0 * v + 1.0).collect();
        assert!((pearson(&x, &y).unwrap() - 1.0).abs() < 1e-15);
        let y: Vec<f64> = x.iter().map(|v| -v).collect();
        assert!((pearson(&x, &y).unwrap() + 1.0).abs() < 1e-15);
        assert!(pearson(&x, &[1.0; 4]).is_err());
        assert!(pearson(&x[..2], &y[..2]).is_err());
    }

    #[test]
    fn spearman_hand_example() {
        let s = spearman(&[1.0, 2.0, 3.0, 4.0, 5.0], &[5.0, 6.0, 4.0, 8.0, 7.0]).unwrap();
        assert!((s.rho - 0.6).abs() < 1e-12);
        // t = 0.6 * sqrt(3 / 0.64) = 1.299, two-sided with 3 df
        assert!((s.p_value - 0.284_2).abs() < 1e-3, "{}", s.p_value);
        assert!(spearman(&[1.0; 5], &[1.0, 2.0, 3.0, 4.0, 5.0]).is_err());
    }

    #[test]
    fn mid_ranks_ties() {
        assert_eq!(mid_ranks(&[10.0, 20.0, 10.0, 30.0]), [1.5, 3.0, 1.5, 4.0]);
        assert_eq!(mid_ranks(&[5.0, 5.0, 5.0]), [2.0, 2.0, 2.0]);
    }

    #[test]
    fn mann_kendall_fixtures() {
        let up: Vec<f64> = (0..20).map(f64::from).collect();
        let v = mann_kendall(&up, DEFAULT_ALPHA).unwrap();
        assert_eq!(v.direction, TrendDirection::Increasing);
        assert_eq!(v.s_statistic, 190);
        assert!(v.p_value < 1e-4);
        let down: Vec<f64> = up.iter().rev().copied().collect();
        assert_eq!(
            mann_kendall(&down, DEFAULT_ALPHA).unwrap().direction,
            TrendDirection::Decreasing
        );

        let v = mann_kendall(&[1.0, 3.0, 2.0, 4.0, 3.0, 5.0, 4.0, 6.0], DEFAULT_ALPHA).unwrap();
        assert_eq!(v.s_statistic, 20);
        assert_eq!(v.direction, TrendDirection::Increasing);

        let flat = mann_kendall(&[2.0; 10], DEFAULT_ALPHA).unwrap();
        assert_eq!(flat.direction, TrendDirection::Stable);
        assert_eq!(flat.p_value, 1.0);
        assert!(mann_kendall(&[1.0, 2.0, 3.0], DEFAULT_ALPHA).is_err());
    }

    #[test]
    fn mann_kendall_skips_gaps() {
        let s = [
            Some(1.0),
            None,
            Some(2.0),
            Some(3.0),
            None,
            Some(4.0),
            Some(5.0),
        ];
        assert_eq!(mann_kendall_gapped(&s, 0.05).unwrap().s_statistic, 10);
    }

    fn noise(seed: u64, n: usize) -> Vec<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..n).map(|_| rng.random::<f64>()).collect()
    }

    #[test]
    fn tlcc_identity_and_planted_shift() {
        let a = noise(1, 80);
        let lc = tlcc(&a, &a, DEFAULT_MAX_LAG).unwrap();
        assert_eq!(lc.peak_lag, 0);
        assert!((lc.peak_correlation() - 1.0).abs() < 1e-12);
        assert_eq!(lc.lags.len(), 49);

        for k in [1usize, 3, 10, 24] {
            let base = noise(7 + k as u64, 80 + k);
            let a = base[k..].to_vec();
            let b = base[..80].to_vec();
            // b(t) = a(t - k)
            let lc = tlcc(&a, &b, DEFAULT_MAX_LAG).unwrap();
            assert_eq!(lc.peak_lag, -(k as i64));
        }
    }

    #[test]
    fn tlcc_omits_short_overlaps() {
        let a = noise(3, 10);
        let b = noise(4, 10);
        let lc = tlcc(&a, &b, 8).unwrap();
        assert_eq!(lc.lags, (-4..=4).collect::<Vec<_>>());
        assert!(tlcc(&a[..5], &b[..5], 2).is_err());
    }

    #[test]
    fn tlcc_matrix_layout() {
        let a = noise(5, 12);
        let lc = tlcc(&a, &a, 2).unwrap();
        let mut buf = Vec::new();
        write_tlcc_matrix(&[("x vs y".into(), lc)], 2, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next().unwrap(), "series,-2,-1,0,1,2,peak_lag");
        let row = lines.next().unwrap();
        assert!(
            row.starts_with("x vs y,") && row.contains(",1.000000,") && row.ends_with(",0"),
            "{row}"
        );
    }

    #[test]
    fn windowed_and_smoothed() {
        let a: Vec<Option<f64>> = noise(9, 40).into_iter().map(Some).collect();
        let w = windowed_tlcc(&a, &a, 3, 12, 6).unwrap();
        assert_eq!(
            w.iter().map(|x| x.start).collect::<Vec<_>>(),
            [0, 6, 12, 18, 24]
        );
        assert!(w.iter().all(|x| x.correlation.peak_lag == 0));
        let m = centered_moving_average(&[Some(1.0), None, Some(3.0), Some(5.0)], 3).unwrap();
        assert_eq!(m, [Some(1.0), Some(2.0), Some(4.0), Some(4.0)]);
        assert_eq!(
            centered_moving_average(&[None, None], 3).unwrap(),
            [None, None]
        );
        assert!(centered_moving_average(&[], 2).is_err());
    }

    #[test]
    fn stat_rows_csv() {
        let rows = [StatRow {
            test: "mann_kendall".into(),
            inputs: "MalVr, news".into(),
            statistic: 20.0,
            p_value: Some(0.017),
            verdict: "↑".into(),
        }];
        let mut buf = Vec::new();
        write_stat_rows_csv(&rows, &mut buf).unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            "test,inputs,statistic,p_value,verdict\nmann_kendall,\"MalVr, news\",20.000000,0.017000,↑\n"
        );
    }

    fn series(len: std::ops::Range<usize>) -> impl Strategy<Value = Vec<f64>> {
        prop::collection::vec((0i32..12).prop_map(f64::from), len)
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]

        #[test]
        fn pearson_symmetric(xy in prop::collection::vec((-50.0f64..50.0, -50.0f64..50.0), 3..30)) {
            let (x, y): (Vec<f64>, Vec<f64>) = xy.into_iter().unzip();
            if let Ok(r) = pearson(&x, &y) {
                prop_assert_eq!(r, pearson(&y, &x).unwrap());
                prop_assert!((-1.0..=1.0).contains(&r));
            }
        }

        #[test]
        fn spearman_monotone_invariant(x in series(4..30), y in series(4..30)) {
            let n = x.len().min(y.len());
            let (x, y) = (&x[..n], &y[..n]);
            let tx: Vec<f64> = x.iter().map(|v| (v * 0.3).exp() + 7.0).collect();
            let ty: Vec<f64> = y.iter().map(|v| v * v * v - 2.0).collect();
            match (spearman(x, y), spearman(&tx, &ty)) {
                (Ok(a), Ok(b)) => prop_assert!((a.rho - b.rho).abs() < 1e-12),
                (Err(_), Err(_)) => {}
                _ => prop_assert!(false, "one side failed"),
            }
        }

        #[test]
        fn mann_kendall_affine_invariant(x in series(4..40), scale in 0.01f64..100.0, shift in -1e3f64..1e3) {
            let t: Vec<f64> = x.iter().map(|v| v * scale + shift).collect();
            let a = mann_kendall(&x, DEFAULT_ALPHA).unwrap();
            let b = mann_kendall(&t, DEFAULT_ALPHA).unwrap();
            prop_assert_eq!(a.direction, b.direction);
            prop_assert_eq!(a.s_statistic, b.s_statistic);
            prop_assert!((0.0..=1.0).contains(&a.p_value));
            prop_assert_eq!(a.direction == TrendDirection::Stable, a.p_value >= DEFAULT_ALPHA);
        }

        #[test]
        fn tlcc_swap_negates_lag(seed in any::<u64>(), n in 8usize..40, max_lag in 0usize..10) {
            let a = noise(seed, n);
            let b = noise(seed ^ 0x5555, n);
            let ab = tlcc(&a, &b, max_lag).unwrap();
            let ba = tlcc(&b, &a, max_lag).unwrap();
            for (&l, &r) in ab.lags.iter().zip(&ab.correlations) {
                prop_assert_eq!(ba.at(-l), Some(r));
            }
            prop_assert_eq!(ab.lags.len(), ba.lags.len());
        }

        #[test]
        fn chi_squared_permutation_invariant(
            t in prop::collection::vec(prop::collection::vec(1u64..50, 3), 2..5),
            rot in 0usize..5,
        ) {
            let a = chi_squared(&t).unwrap();
            let mut p = t.clone();
            let k = rot % p.len();
            p.rotate_left(k);
            for row in &mut p {
                row.swap(0, 2);
            }
            let b = chi_squared(&p).unwrap();
            prop_assert!((a.statistic - b.statistic).abs() < 1e-9 * (1.0 + a.statistic));
            prop_assert_eq!(a.dof, b.dof);
        }
    }
}
