use serde_json::Value;
use trendlens_web::{lag_correlation_json, parse_series, profile_text_json, trend_test_json};

fn parse(s: &str) -> Value {
    serde_json::from_str(s).unwrap()
}

#[test]
fn series_parsing() {
    assert_eq!(
        parse_series("1, 2,,4").unwrap(),
        vec![Some(1.0), Some(2.0), None, Some(4.0)]
    );
    assert_eq!(
        parse_series("1 2\n3").unwrap(),
        vec![Some(1.0), Some(2.0), Some(3.0)]
    );
    assert_eq!(
        parse_series("1;NA;3").unwrap(),
        vec![Some(1.0), None, Some(3.0)]
    );
    assert_eq!(parse_series("  ").unwrap(), vec![]);
    assert!(parse_series("1, x").is_err());
    assert!(parse_series("inf").is_err());
}

#[test]
fn profile_flags_two_term_categories() {
    let v = parse(&profile_text_json(
        "A trojan and a worm spread through junk email. The flaw got a patch.",
    ));
    let dominant: Vec<&str> = v["dominant"]
        .as_array()
        .unwrap()
        .iter()
        .map(|d| d.as_str().unwrap())
        .collect();
    assert_eq!(dominant, ["MalVr", "SeUdVnb"]);
    assert_eq!(v["categories"].as_array().unwrap().len(), 16);
    // both at 2/4; ties go to the earlier category
    assert_eq!(v["most_relevant"], "MalVr");

    let none = parse(&profile_text_json("Nothing to see here."));
    assert!(none["most_relevant"].is_null());
    assert!(none["dominant"].as_array().unwrap().is_empty());
}

#[test]
fn trend_test_reports_direction() {
    let v = parse(&trend_test_json("1,2,3,4,5,6,7,8,9,10", 0.05).unwrap());
    assert_eq!(v["s"], 45);
    assert_eq!(v["symbol"], "↑");
    let flat = parse(&trend_test_json("3 1 4 1 5 9 2 6", 0.05).unwrap());
    assert_eq!(flat["symbol"], "→");
    assert!(trend_test_json("1,2", 0.05).is_err());
}

#[test]
fn lag_correlation_finds_shift() {
    let x: Vec<f64> = (0..40).map(|t| ((t * 37 % 11) as f64).sin()).collect();
    let a: Vec<String> = x[3..].iter().map(f64::to_string).collect();
    let b: Vec<String> = x[..37].iter().map(f64::to_string).collect();
    let v = parse(&lag_correlation_json(&a.join(","), &b.join(","), 6).unwrap());
    assert_eq!(v["peak_lag"], -3);
    assert!((v["peak_correlation"].as_f64().unwrap() - 1.0).abs() < 1e-9);
    assert!(lag_correlation_json("1,2,3", "1,2", 1).is_err());
}
