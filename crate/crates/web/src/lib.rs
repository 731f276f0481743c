//! WebAssembly bindings for the demo page in `www/`.
//!
//! Every export takes plain strings and returns a JSON string, or throws a
//! string error. The `*_json` functions hold the logic so they can be tested
//! natively.

use serde_json::json;
use trendlens::category::{
    calibrate_thresholds, profile, CategoryCorpora, CategoryId, ThresholdRule, ThresholdTable,
};
use trendlens::stats::{mann_kendall_gapped, tlcc_gapped};
use trendlens::text::tokenize;
use wasm_bindgen::prelude::*;

/// Numbers separated by commas, whitespace or semicolons. Empty cells and
/// `NA` / `-` are gaps.
pub fn parse_series(text: &str) -> Result<Vec<Option<f64>>, String> {
    let cells: Vec<&str> = if text.contains(',') || text.contains(';') {
        text.split([',', ';']).map(str::trim).collect()
    } else {
        text.split_whitespace().collect()
    };
    if cells == [""] {
        return Ok(Vec::new());
    }
    cells
        .into_iter()
        .map(|c| match c {
            "" | "-" | "NA" | "na" => Ok(None),
            _ => c
                .parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .map(Some)
                .ok_or_else(|| format!("`{c}` is not a number")),
        })
        .collect()
}

fn seed_thresholds(corpora: &CategoryCorpora) -> ThresholdTable {
    let empty = profile(
        "",
        &tokenize("", None),
        corpora,
        &ThresholdTable::uniform(0.0),
    );
    calibrate_thresholds(&[empty], corpora, ThresholdRule::default())
        .expect("seed taxonomy covers every category")
}

pub fn profile_text_json(text: &str) -> String {
    let corpora = CategoryCorpora::seed();
    let thresholds = seed_thresholds(&corpora);
    let tokens = tokenize(text, None);
    let p = profile("input", &tokens, &corpora, &thresholds);
    let categories: Vec<_> = CategoryId::ALL
        .iter()
        .map(|&c| {
            json!({
                "code": c.code(),
                "name": c.name(),
                "relevance": p.relevance_of(c),
                "threshold": thresholds.get(c),
                "dominant": p.is_dominant(c),
            })
        })
        .collect();
    let most_relevant = (p.relevance_of(p.most_relevant) > 0.0).then(|| p.most_relevant.code());
    json!({
        "tokens": tokens.len(),
        "categories": categories,
        "dominant": p.dominant.iter().map(|c| c.code()).collect::<Vec<_>>(),
        "most_relevant": most_relevant,
    })
    .to_string()
}

pub fn trend_test_json(series: &str, alpha: f64) -> Result<String, String> {
    let values = parse_series(series)?;
    let v = mann_kendall_gapped(&values, alpha).map_err(|e| e.to_string())?;
    Ok(json!({
        "n": values.iter().flatten().count(),
        "s": v.s_statistic,
        "z": v.z,
        "p_value": v.p_value,
        "direction": v.direction.as_str(),
        "symbol": v.direction.symbol(),
    })
    .to_string())
}

pub fn lag_correlation_json(a: &str, b: &str, max_lag: usize) -> Result<String, String> {
    let (a, b) = (parse_series(a)?, parse_series(b)?);
    let lc = tlcc_gapped(&a, &b, max_lag).map_err(|e| e.to_string())?;
    Ok(json!({
        "lags": lc.lags,
        "correlations": lc.correlations,
        "peak_lag": lc.peak_lag,
        "peak_correlation": lc.peak_correlation(),
    })
    .to_string())
}

/// Relevance of a piece of text to each of the 16 categories, using the
/// bundled seed taxonomy and the two-match dominance threshold.
#[wasm_bindgen(js_name = profileText)]
pub fn profile_text(text: &str) -> String {
    profile_text_json(text)
}

/// Mann-Kendall test on a monthly series.
#[wasm_bindgen(js_name = trendTest)]
pub fn trend_test(series: &str, alpha: f64) -> Result<String, JsError> {
    trend_test_json(series, alpha).map_err(|e| JsError::new(&e))
}

/// Lagged correlation of two series of equal length.
#[wasm_bindgen(js_name = lagCorrelation)]
pub fn lag_correlation(a: &str, b: &str, max_lag: usize) -> Result<String, JsError> {
    lag_correlation_json(a, b, max_lag).map_err(|e| JsError::new(&e))
}
