//! Regenerates the synthetic mini-corpus under `data/mini/`.
//!
//!     cargo run -p trendlens-cli --example gen_mini
//!
//! Four small datasets (news, blog, two web classes) over 2018-2019. Each
//! article mentions a keyword and a few category terms; the category mix
//! drifts over time so the trend and lag statistics have something to find.
//! A handful of records exercise ingestion edge cases.

use std::fmt::Write as _;
use std::path::PathBuf;

use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;

const CATEGORIES: &[(&str, &[&str])] = &[
    (
        "CycmnAc",
        &["hacker", "malicious action", "law enforcement action"],
    ),
    (
        "CysePrg",
        &[
            "cybersecurity conference",
            "CISO forum",
            "consumer education",
        ],
    ),
    (
        "ElecSe",
        &[
            "voting security",
            "election system",
            "electronic voting machine",
        ],
    ),
    (
        "IdtFncFrd",
        &["data breach", "financial crimes", "credit card fraud"],
    ),
    (
        "InfPry",
        &["customer privacy", "GDPR", "privacy protection"],
    ),
    (
        "IoTThr",
        &["firmware", "mobile device", "industrial control systems"],
    ),
    ("MalVr", &["spyware", "adware", "worm", "trojan"]),
    (
        "NatSe",
        &[
            "cyberespionage",
            "national cybersecurity",
            "transnational crime",
        ],
    ),
    (
        "NetAtk",
        &["DDoS attack", "zombie bot", "remote code execution"],
    ),
    ("SeUdVnb", &["flaw", "patch", "security bulletin"]),
    ("SpmPh", &["scam", "spam", "phishing email"]),
    (
        "WbAtk",
        &["SQL injection", "web extension", "drive-by download"],
    ),
];

const KEYWORDS: &[&str] = &[
    "cybersecurity",
    "malware",
    "hacking",
    "data security",
    "vulnerability",
    "ransomware",
];

const FILLER: &[&str] = &[
    "analysts said the company would review its systems next quarter",
    "officials confirmed the incident affected several regional offices",
    "the report was shared with partners across the industry",
    "customers were advised to update their accounts and settings",
    "researchers published technical details after a short delay",
    "the agency declined to comment on the ongoing investigation",
    "experts expect similar campaigns to continue through the year",
    "the vendor released guidance for administrators on monday",
];

struct Source {
    name: &'static str,
    class: &'static str,
    articles: usize,
    /// Months by which this source trails the news cycle.
    lag: i32,
}

const SOURCES: &[Source] = &[
    Source {
        name: "news",
        class: "news",
        articles: 90,
        lag: 0,
    },
    Source {
        name: "blogs",
        class: "blog",
        articles: 70,
        lag: 1,
    },
    Source {
        name: "gov",
        class: "web_governmental",
        articles: 45,
        lag: 4,
    },
    Source {
        name: "academic",
        class: "web_academic",
        articles: 45,
        lag: 4,
    },
];

const MONTHS: i32 = 24;

/// Category weights at a given month: malware rises, spam fades, elections
/// peak late in the second year.
fn weights(month: i32) -> Vec<f64> {
    let t = month.clamp(0, MONTHS - 1) as f64 / (MONTHS - 1) as f64;
    CATEGORIES
        .iter()
        .map(|(id, _)| match *id {
            "MalVr" => 0.5 + 2.5 * t,
            "SpmPh" => 3.0 - 2.5 * t,
            "ElecSe" => {
                if month >= 16 {
                    2.0
                } else {
                    0.2
                }
            }
            _ => 1.0,
        })
        .collect()
}

fn pick_weighted(rng: &mut ChaCha8Rng, w: &[f64]) -> usize {
    let total: f64 = w.iter().sum();
    let mut x = rng.random::<f64>() * total;
    for (i, v) in w.iter().enumerate() {
        if x < *v {
            return i;
        }
        x -= v;
    }
    w.len() - 1
}

fn date_of(month: i32, rng: &mut ChaCha8Rng) -> String {
    let year = 2018 + month / 12;
    format!(
        "{year}-{:02}-{:02}",
        month % 12 + 1,
        rng.random_range(1..=28)
    )
}

fn article_body(rng: &mut ChaCha8Rng, month: i32) -> (String, String) {
    let w = weights(month);
    let n_cats = rng.random_range(1..=3);
    let mut chosen: Vec<usize> = Vec::new();
    while chosen.len() < n_cats {
        let c = pick_weighted(rng, &w);
        if !chosen.contains(&c) {
            chosen.push(c);
        }
    }
    let keyword = KEYWORDS.choose(rng).expect("non-empty");
    let mut body = format!("A new {keyword} story.");
    let mut title = String::new();
    for &c in &chosen {
        let terms = CATEGORIES[c].1;
        let k = rng.random_range(2..=terms.len());
        let picked: Vec<&&str> = terms.choose_multiple(rng, k).collect();
        if title.is_empty() {
            title = format!("{} concerns grow", picked[0]);
        }
        for term in picked {
            let filler = FILLER.choose(rng).expect("non-empty");
            write!(body, " Reports about the {term} spread, and {filler}.").expect("string");
        }
    }
    (title, body)
}

fn main() {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data/mini");
    std::fs::create_dir_all(&dir).expect("create data/mini");
    let mut rng = ChaCha8Rng::seed_from_u64(2019);
    for source in SOURCES {
        let mut lines = Vec::new();
        for i in 0..source.articles {
            let month = rng.random_range(0..MONTHS);
            let (title, body) = article_body(&mut rng, month - source.lag);
            lines.push(json!({
                "id": format!("{}-{i:03}", source.name),
                "source_id": format!("{}.example.org", source.name),
                "source_class": source.class,
                "title": title,
                "body": body,
                "published": date_of(month, &mut rng),
            }));
        }
        // ingestion edge cases
        let first = lines[0].clone();
        let mut dup = first.clone();
        dup["id"] = json!(format!("{}-dup", source.name));
        lines.push(dup);
        lines.push(json!({
            "id": format!("{}-empty", source.name),
            "source_id": format!("{}.example.org", source.name),
            "source_class": source.class,
            "title": "Empty",
            "body": "   ",
            "published": "2018-05-01",
        }));
        lines.push(json!({
            "id": format!("{}-offtopic", source.name),
            "source_id": format!("{}.example.org", source.name),
            "source_class": source.class,
            "title": "Local bakery opens",
            "body": "The bakery on main street opened its doors with fresh bread and pastries.",
            "published": "2018-07-14",
        }));
        let (title, body) = article_body(&mut rng, 6);
        lines.push(json!({
            "id": format!("{}-baddate", source.name),
            "source_id": format!("{}.example.org", source.name),
            "source_class": source.class,
            "title": title,
            "body": body,
            "published": "2018-13-40",
        }));
        let (title, body) = article_body(&mut rng, 12);
        lines.push(json!({
            "id": format!("{}-undated", source.name),
            "source_id": format!("{}.example.org", source.name),
            "source_class": source.class,
            "title": title,
            "body": body,
        }));
        let text: String = lines.iter().map(|l| format!("{l}\n")).collect();
        std::fs::write(dir.join(format!("{}.jsonl", source.name)), text).expect("write dataset");
    }
}
