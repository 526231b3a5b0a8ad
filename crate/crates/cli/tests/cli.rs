use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;

use radar_cli::run;
use tempfile::TempDir;

const SMALL_SYNTH: &str = r#"
horizon_hours = 480
human_users = 3000
random_campaigns = 3

[[markets]]
market = "NASDAQ"
companies = 15
median_cap = 4e8
cap_sigma = 1.5

[[markets]]
market = "NYSE"
companies = 15
median_cap = 2e9
cap_sigma = 1.5

[[markets]]
market = "OTCMKTS"
companies = 15
median_cap = 3e7
cap_sigma = 2.3
"#;

const FAST_DETECT: &str = "bootstrap_samples = 500\nkde_grid = 16\n";

fn radar(args: &[&str]) -> i32 {
    run(std::iter::once("radar").chain(args.iter().copied()))
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

struct Fixture {
    dir: TempDir,
}

impl Fixture {
    fn new() -> Fixture {
        let dir = tempfile::tempdir().unwrap();
        fs::write(dir.path().join("synth.toml"), SMALL_SYNTH).unwrap();
        fs::write(dir.path().join("detect.toml"), FAST_DETECT).unwrap();
        let f = Fixture { dir };
        let code = radar(&[
            "synth",
            "--config",
            s(&f.p("synth.toml")),
            "--seed",
            "5",
            "--out-tweets",
            s(&f.p("tweets.jsonl")),
            "--out-companies",
            s(&f.p("companies.csv")),
            "--out-truth",
            s(&f.p("truth.json")),
        ]);
        assert_eq!(code, 0);
        f
    }

    fn p(&self, name: &str) -> PathBuf {
        self.dir.path().join(name)
    }

    fn detect(&self, out: &str, extra: &[&str]) -> i32 {
        let mut args = vec![
            "detect".to_string(),
            "--tweets".into(),
            s(&self.p("tweets.jsonl")).into(),
            "--companies".into(),
            s(&self.p("companies.csv")).into(),
            "--seed".into(),
            "42".into(),
            "--config".into(),
            s(&self.p("detect.toml")).into(),
            "--out".into(),
            s(&self.p(out)).into(),
        ];
        args.extend(extra.iter().map(|a| a.to_string()));
        radar(&args.iter().map(String::as_str).collect::<Vec<_>>())
    }
}

#[test]
fn usage_errors_exit_one() {
    assert_eq!(radar(&["detect", "--bogus"]), 1);
    assert_eq!(radar(&["frobnicate"]), 1);
    assert_eq!(radar(&[]), 1);
    assert_eq!(radar(&["--help"]), 0);
    assert_eq!(radar(&["detect", "--help"]), 0);
}

#[test]
fn binary_reports_usage_on_stderr() {
    let out = Command::new(env!("CARGO_BIN_EXE_radar"))
        .arg("--nope")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("Usage"));
}

#[test]
fn seed_is_mandatory() {
    let f = Fixture::new();
    let code = radar(&[
        "detect",
        "--tweets",
        s(&f.p("tweets.jsonl")),
        "--companies",
        s(&f.p("companies.csv")),
        "--out",
        s(&f.p("r.json")),
    ]);
    assert_eq!(code, 1);
    assert!(!f.p("r.json").exists());
    let code = radar(&[
        "synth",
        "--out-tweets",
        s(&f.p("a")),
        "--out-companies",
        s(&f.p("b")),
        "--out-truth",
        s(&f.p("c")),
    ]);
    assert_eq!(code, 1);
}

#[test]
fn missing_inputs_fail_before_work() {
    let f = Fixture::new();
    let code = radar(&[
        "summary",
        "--tweets",
        s(&f.p("absent.jsonl")),
        "--companies",
        s(&f.p("companies.csv")),
    ]);
    assert_eq!(code, 1);
    assert_eq!(f.detect("nested/dir/r.json", &[]), 1);
}

#[test]
fn detect_evaluate_export() {
    let f = Fixture::new();
    fs::create_dir(f.p("plots")).unwrap();
    assert_eq!(f.detect("report.json", &["--plots", s(&f.p("plots"))]), 0);
    let report: serde_json::Value =
        serde_json::from_slice(&fs::read(f.p("report.json")).unwrap()).unwrap();
    let keys: Vec<&str> = report
        .as_object()
        .unwrap()
        .keys()
        .map(String::as_str)
        .collect();
    for k in [
        "meta",
        "baselines",
        "peaks",
        "rank_correlations",
        "social_financial",
        "flags",
    ] {
        assert!(keys.contains(&k), "missing {k}");
    }
    let inputs = report["meta"]["inputs"].as_array().unwrap();
    assert_eq!(inputs.len(), 3);
    assert!(inputs
        .iter()
        .all(|i| i["sha256"].as_str().unwrap().len() == 64));
    assert_eq!(report["meta"]["seed"], 42);

    let eval = f.p("eval.json");
    assert_eq!(
        radar(&[
            "evaluate",
            "--report",
            s(&f.p("report.json")),
            "--truth",
            s(&f.p("truth.json")),
            "--out",
            s(&eval)
        ]),
        0
    );
    let eval: serde_json::Value = serde_json::from_slice(&fs::read(eval).unwrap()).unwrap();
    assert!(eval["recall"].as_f64().unwrap() > 0.5, "{eval}");
    assert!(eval["confusion"]["tp"].as_u64().unwrap() > 0);

    let cap = fs::read_to_string(f.p("plots/cap_std_vs_x.csv")).unwrap();
    assert!(
        cap.starts_with("x,all_tweets,all_mean_std,peak_tweets,peak_mean_std,bootstrap_mean_std")
    );
    let boot: Vec<f64> = report["baselines"]["bootstrap"]
        .as_array()
        .unwrap()
        .iter()
        .map(|b| b["mean_std"].as_f64().unwrap())
        .collect();
    let column: Vec<f64> = cap
        .lines()
        .skip(1)
        .map(|l| l.split(',').nth(5).unwrap().parse().unwrap())
        .collect();
    assert_eq!(column.len(), boot.len());
    assert!(column
        .iter()
        .zip(&boot)
        .all(|(a, b)| a.to_bits() == b.to_bits()));

    // Export from the written report reproduces the bundle.
    fs::create_dir(f.p("again")).unwrap();
    assert_eq!(
        radar(&[
            "export",
            "--report",
            s(&f.p("report.json")),
            "--out-dir",
            s(&f.p("again"))
        ]),
        0
    );
    for name in [
        "kde.csv",
        "assortativity_fit.csv",
        "entropy_by_level.csv",
        "peaks.csv",
    ] {
        assert_eq!(
            fs::read(f.p("plots").join(name)).unwrap(),
            fs::read(f.p("again").join(name)).unwrap()
        );
    }
}

#[test]
fn reports_are_byte_identical_and_hash_tracks_config() {
    let f = Fixture::new();
    assert_eq!(f.detect("a.json", &[]), 0);
    assert_eq!(f.detect("b.json", &[]), 0);
    assert_eq!(
        fs::read(f.p("a.json")).unwrap(),
        fs::read(f.p("b.json")).unwrap()
    );
    assert_eq!(f.detect("c.json", &["--k", "9"]), 0);
    let hash = |n: &str| {
        let v: serde_json::Value = serde_json::from_slice(&fs::read(f.p(n)).unwrap()).unwrap();
        v["meta"]["config_hash"].as_str().unwrap().to_string()
    };
    assert_eq!(hash("a.json"), hash("b.json"));
    assert_ne!(hash("a.json"), hash("c.json"));
}

#[test]
fn tampered_report_is_an_internal_error() {
    let f = Fixture::new();
    assert_eq!(f.detect("report.json", &[]), 0);
    let mut v: serde_json::Value =
        serde_json::from_slice(&fs::read(f.p("report.json")).unwrap()).unwrap();
    let peak = v["peaks"]
        .as_array_mut()
        .unwrap()
        .iter_mut()
        .find(|p| p["flagged"] == false)
        .unwrap();
    peak["flagged"] = true.into();
    fs::write(f.p("bad.json"), serde_json::to_vec(&v).unwrap()).unwrap();
    fs::create_dir(f.p("out")).unwrap();
    assert_eq!(
        radar(&[
            "export",
            "--report",
            s(&f.p("bad.json")),
            "--out-dir",
            s(&f.p("out"))
        ]),
        2
    );
}

#[test]
fn evaluate_rejects_foreign_truth() {
    let f = Fixture::new();
    assert_eq!(f.detect("report.json", &[]), 0);
    let mut truth: serde_json::Value =
        serde_json::from_slice(&fs::read(f.p("truth.json")).unwrap()).unwrap();
    truth["ids_digest"] = "beef".into();
    fs::write(f.p("other.json"), serde_json::to_vec(&truth).unwrap()).unwrap();
    assert_eq!(
        radar(&[
            "evaluate",
            "--report",
            s(&f.p("report.json")),
            "--truth",
            s(&f.p("other.json"))
        ]),
        1
    );
}

#[test]
fn peaks_and_graph() {
    let f = Fixture::new();
    let path = |n: &str| f.p(n).to_str().unwrap().to_string();
    let call = |args: &[&str]| {
        let mut v = vec![
            args[0].to_string(),
            "--tweets".into(),
            path("tweets.jsonl"),
            "--companies".into(),
            path("companies.csv"),
        ];
        v.extend(args[1..].iter().map(|a| a.to_string()));
        radar(&v.iter().map(String::as_str).collect::<Vec<_>>())
    };
    let code = call(&[
        "peaks",
        "--k",
        "10",
        "--out",
        &path("peaks.json"),
        "--curve",
        &path("curve.csv"),
    ]);
    assert_eq!(code, 0);
    let curve = fs::read_to_string(f.p("curve.csv")).unwrap();
    let counts: Vec<usize> = curve
        .lines()
        .skip(1)
        .map(|l| l.split(',').nth(1).unwrap().parse().unwrap())
        .collect();
    assert_eq!(counts.len(), 20);
    assert!(counts.windows(2).all(|w| w[0] >= w[1]));

    let code = call(&[
        "graph",
        "--peaks",
        &path("peaks.json"),
        "--min-degree",
        "1",
        "--out",
        &path("graph.csv"),
        "--assortativity",
        &path("assort.csv"),
    ]);
    assert_eq!(code, 0);
    let edges = fs::read_to_string(f.p("graph.csv")).unwrap();
    assert!(edges.starts_with("src,dst,weight\n"));
    assert!(edges.lines().count() > 1);
    let nodes = fs::read_to_string(f.p("graph.nodes.csv")).unwrap();
    assert!(nodes.starts_with("ticker,market,capitalization,degree\n"));
    assert!(nodes
        .lines()
        .skip(1)
        .all(|l| l.rsplit(',').next().unwrap().parse::<usize>().unwrap() >= 1));
    let fit = fs::read_to_string(f.p("assort.fit.csv")).unwrap();
    assert!(fit.lines().nth(1).unwrap().starts_with("ALL,log10-log10,"));
    assert!(f.p("graph.meta.json").exists());
}

#[test]
fn no_peak_report_exports_headers_only() {
    let dir = tempfile::tempdir().unwrap();
    let p = |n: &str| dir.path().join(n);
    fs::write(p("companies.csv"), "ticker,market,share_price,shares_outstanding,capitalization,trbc_l1,trbc_l2,trbc_l3,trbc_l4,trbc_l5\nAAA,NASDAQ,,,1e9,a,b,c,d,e\nBBB,NYSE,,,2e9,a,b,c,d,f\n").unwrap();
    let lines: String = (0..48)
        .map(|h| {
            format!(
                "{{\"id\":\"{h}\",\"created_at\":\"2017-05-01T{:02}:00:00Z\",\"user_id\":\"u\",\"text\":\"$AAA and $BBB\"}}\n",
                h % 24
            )
        })
        .collect();
    fs::write(p("tweets.jsonl"), lines).unwrap();
    fs::create_dir(p("plots")).unwrap();
    let code = radar(&[
        "detect",
        "--tweets",
        s(&p("tweets.jsonl")),
        "--companies",
        s(&p("companies.csv")),
        "--seed",
        "1",
        "--out",
        s(&p("report.json")),
        "--plots",
        s(&p("plots")),
    ]);
    assert_eq!(code, 0);
    for name in [
        "entropy_by_level.csv",
        "assortativity_points.csv",
        "assortativity_fit.csv",
        "kde.csv",
    ] {
        let text = fs::read_to_string(p("plots").join(name)).unwrap();
        assert_eq!(text.lines().count(), 1, "{name}: {text}");
    }
    let report: serde_json::Value =
        serde_json::from_slice(&fs::read(p("report.json")).unwrap()).unwrap();
    assert!(report["social_financial"].is_null());
    assert_eq!(report["flags"].as_array().unwrap().len(), 0);
}

#[test]
fn summary_puts_otc_retweets_on_top() {
    let f = Fixture::new();
    let code = radar(&[
        "summary",
        "--tweets",
        s(&f.p("tweets.jsonl")),
        "--companies",
        s(&f.p("companies.csv")),
        "--json",
        s(&f.p("summary.json")),
    ]);
    assert_eq!(code, 0);
    let v: serde_json::Value =
        serde_json::from_slice(&fs::read(f.p("summary.json")).unwrap()).unwrap();
    let rows = v["markets"].as_array().unwrap();
    let pct = |m: &str| {
        rows.iter()
            .find(|r| r["market"] == m)
            .and_then(|r| r["retweet_pct"].as_f64())
            .unwrap()
    };
    let otc = pct("OTCMKTS");
    for m in ["NASDAQ", "NYSE"] {
        assert!(otc > pct(m), "OTC {otc}% vs {m} {}%", pct(m));
    }
    assert_eq!(
        v["total"]["tweets"].as_u64().unwrap() as usize,
        fs::read_to_string(f.p("tweets.jsonl"))
            .unwrap()
            .lines()
            .count()
    );
}
