use std::path::{Path, PathBuf};

use radar_core::cooccur::{
    assortativity_points, build_graph, filter_by_degree, CoOccurrenceGraph, ASSORTATIVITY_TRANSFORM,
};
use radar_core::detect::{run_detection, DetectConfig, InputFile, TOOL_NAME};
use radar_core::ingest::{summarize, write_company_csv, IngestSummary, Market};
use radar_core::synth::{evaluate, generate, Evaluation, GroundTruth, SynthConfig};
use radar_core::timeseries::{collect_peak_tweets, detect_all_peaks, peak_count_curve, Peak};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::io::{self, check_input, check_output, csv_err, sibling};
use crate::{CliError, Command, StreamArgs};

/// Provenance block written by every subcommand.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunMeta {
    pub tool: String,
    pub version: String,
    pub command: String,
    pub seed: Option<u64>,
    pub config_hash: String,
    pub inputs: Vec<InputFile>,
}

impl RunMeta {
    fn new(
        command: &str,
        seed: Option<u64>,
        options: &impl Serialize,
        inputs: Vec<InputFile>,
    ) -> Self {
        let json = serde_json::to_vec(options).expect("options serialize");
        RunMeta {
            tool: TOOL_NAME.to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            command: command.to_string(),
            seed,
            config_hash: hex::encode(Sha256::digest(json)),
            inputs,
        }
    }
}

#[derive(Serialize)]
struct IngestOutput<'a> {
    meta: RunMeta,
    summary: &'a IngestSummary,
    tweets: usize,
    retweets: usize,
    users: usize,
    tickers: usize,
}

#[derive(Serialize, Deserialize)]
struct PeaksFile {
    meta: RunMeta,
    k: f64,
    span_start_hour: i64,
    span_hours: usize,
    peaks: Vec<Peak>,
}

#[derive(Serialize)]
struct Tagged<'a, T> {
    meta: RunMeta,
    #[serde(flatten)]
    body: &'a T,
}

fn require_seed(seed: Option<u64>) -> Result<u64, CliError> {
    seed.ok_or_else(|| {
        CliError::Input("--seed is required: every random draw is seeded explicitly".into())
    })
}

fn stream_options(s: &StreamArgs) -> serde_json::Value {
    serde_json::json!({ "keep_unknown": s.keep_unknown })
}

pub fn dispatch(command: Command) -> Result<(), CliError> {
    match command {
        Command::Ingest { stream, out } => ingest_cmd(&stream, out.as_deref()),
        Command::Peaks {
            stream,
            k,
            out,
            curve,
        } => peaks_cmd(&stream, k, &out, curve.as_deref()),
        Command::Graph {
            stream,
            peaks,
            min_degree,
            out,
            assortativity,
        } => graph_cmd(
            &stream,
            peaks.as_deref(),
            min_degree,
            &out,
            assortativity.as_deref(),
        ),
        Command::Detect {
            stream,
            k,
            seed,
            config,
            tz_offset,
            out,
            plots,
        } => detect_cmd(
            &stream,
            k,
            seed,
            config.as_deref(),
            tz_offset,
            &out,
            plots.as_deref(),
        ),
        Command::Synth {
            config,
            seed,
            out_tweets,
            out_companies,
            out_truth,
        } => synth_cmd(
            config.as_deref(),
            seed,
            &out_tweets,
            &out_companies,
            &out_truth,
        ),
        Command::Evaluate { report, truth, out } => evaluate_cmd(&report, &truth, out.as_deref()),
        Command::Summary { stream, json } => summary_cmd(&stream, json.as_deref()),
        Command::Export { report, out_dir } => export_cmd(&report, &out_dir),
    }
}

fn ingest_cmd(stream: &StreamArgs, out: Option<&Path>) -> Result<(), CliError> {
    if let Some(p) = out {
        check_output(p)?;
    }
    let inputs = io::load(&stream.tweets, &stream.companies, stream.keep_unknown)?;
    let ds = &inputs.dataset;
    let c = ds.counters();
    let output = IngestOutput {
        meta: RunMeta::new(
            "ingest",
            None,
            &stream_options(stream),
            inputs.files.clone(),
        ),
        summary: ds.ingest_summary(),
        tweets: c.tweets,
        retweets: c.retweets,
        users: c.users,
        tickers: ds.tickers().count(),
    };
    match out {
        Some(p) => io::write_json(p, &output),
        None => io::to_stdout(&output),
    }
}

fn peaks_cmd(
    stream: &StreamArgs,
    k: f64,
    out: &Path,
    curve: Option<&Path>,
) -> Result<(), CliError> {
    check_output(out)?;
    if let Some(p) = curve {
        check_output(p)?;
    }
    let inputs = io::load(&stream.tweets, &stream.companies, stream.keep_unknown)?;
    let ds = &inputs.dataset;
    let span = ds
        .hour_span()
        .ok_or_else(|| CliError::Input("no usable tweets in the stream".into()))?;
    let input_err = |e: radar_core::SeriesError| CliError::Input(e.to_string());
    let peaks = detect_all_peaks(ds, span, k, None).map_err(input_err)?;
    let options = serde_json::json!({ "k": k, "keep_unknown": stream.keep_unknown });
    io::write_json(
        out,
        &PeaksFile {
            meta: RunMeta::new("peaks", None, &options, inputs.files.clone()),
            k,
            span_start_hour: span.start_hour,
            span_hours: span.hours,
            peaks,
        },
    )?;
    if let Some(path) = curve {
        let tickers: Vec<String> = ds.tickers().map(String::from).collect();
        let ks: Vec<f64> = (1..=20).map(f64::from).collect();
        let mut w = io::csv_writer(path)?;
        w.write_record(["k", "peaks"]).map_err(csv_err)?;
        for row in peak_count_curve(ds, &tickers, span, &ks).map_err(input_err)? {
            w.write_record([row.k.to_string(), row.peaks.to_string()])
                .map_err(csv_err)?;
        }
        w.flush().map_err(|e| CliError::Input(e.to_string()))?;
    }
    Ok(())
}

fn graph_cmd(
    stream: &StreamArgs,
    peaks: Option<&Path>,
    min_degree: usize,
    out: &Path,
    assortativity: Option<&Path>,
) -> Result<(), CliError> {
    check_output(out)?;
    if let Some(p) = peaks {
        check_input(p)?;
    }
    if let Some(p) = assortativity {
        check_output(p)?;
    }
    let mut inputs = io::load(&stream.tweets, &stream.companies, stream.keep_unknown)?;
    let ds = &inputs.dataset;
    let graph = match peaks {
        Some(path) => {
            let (text, file) = io::read_text(path, "peaks")?;
            inputs.files.push(file);
            let parsed: PeaksFile = serde_json::from_str(&text)
                .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
            let mut union = Vec::new();
            for p in &parsed.peaks {
                let set = collect_peak_tweets(ds, p).map_err(|e| CliError::Input(e.to_string()))?;
                union.extend(set.tweets);
            }
            union.sort_unstable();
            union.dedup();
            build_graph(union.iter().map(|&i| ds.tweet(i)), &inputs.catalog)
        }
        None => build_graph(ds.tweets(), &inputs.catalog),
    };
    let graph = filter_by_degree(&graph, min_degree);
    write_graph(&graph, out)?;
    if let Some(path) = assortativity {
        write_assortativity(&graph, path)?;
    }
    let options = serde_json::json!({
        "keep_unknown": stream.keep_unknown,
        "min_degree": min_degree,
        "peaks_only": peaks.is_some(),
    });
    io::write_json(
        &sibling(out, "meta.json"),
        &RunMeta::new("graph", None, &options, inputs.files),
    )
}

fn write_graph(graph: &CoOccurrenceGraph, out: &Path) -> Result<(), CliError> {
    let mut w = io::csv_writer(out)?;
    w.write_record(["src", "dst", "weight"]).map_err(csv_err)?;
    for ((a, b), weight) in &graph.edges {
        w.write_record([a.as_str(), b.as_str(), &weight.to_string()])
            .map_err(csv_err)?;
    }
    w.flush().map_err(|e| CliError::Input(e.to_string()))?;

    let degrees = graph.degrees();
    let mut w = io::csv_writer(&sibling(out, "nodes.csv"))?;
    w.write_record(["ticker", "market", "capitalization", "degree"])
        .map_err(csv_err)?;
    for (ticker, node) in &graph.nodes {
        let cap = node
            .capitalization
            .map(|c| c.to_string())
            .unwrap_or_default();
        let degree = degrees.get(ticker.as_str()).copied().unwrap_or(0);
        w.write_record([
            ticker.as_str(),
            node.market.as_str(),
            &cap,
            &degree.to_string(),
        ])
        .map_err(csv_err)?;
    }
    w.flush().map_err(|e| CliError::Input(e.to_string()))
}

fn write_assortativity(graph: &CoOccurrenceGraph, path: &Path) -> Result<(), CliError> {
    let scopes = std::iter::once(None).chain(
        Market::ALL
            .into_iter()
            .filter(|m| graph.nodes.values().any(|n| n.market == *m))
            .map(Some),
    );
    let scope_name = |m: Option<Market>| m.map_or("ALL", Market::as_str);
    let mut points = io::csv_writer(path)?;
    points
        .write_record([
            "market",
            "ticker",
            "capitalization",
            "neighbor_mean",
            "log10_capitalization",
            "log10_neighbor_mean",
        ])
        .map_err(csv_err)?;
    let mut fits = io::csv_writer(&sibling(path, "fit.csv"))?;
    fits.write_record([
        "market",
        "transform",
        "slope",
        "intercept",
        "n_points",
        "excluded_zero_cap",
        "excluded_isolated",
        "error",
    ])
    .map_err(csv_err)?;
    for market in scopes {
        let pts = assortativity_points(graph, market);
        for p in &pts.points {
            let (lx, ly) = p.log_coords();
            points
                .write_record([
                    scope_name(market),
                    &p.ticker,
                    &p.capitalization.to_string(),
                    &p.neighbor_mean.to_string(),
                    &lx.to_string(),
                    &ly.to_string(),
                ])
                .map_err(csv_err)?;
        }
        let (n, zero, isolated) = (
            pts.points.len(),
            pts.excluded_zero_cap,
            pts.excluded_isolated,
        );
        let (slope, intercept, error) = match pts.fit() {
            Ok(f) => (f.slope.to_string(), f.intercept.to_string(), String::new()),
            Err(e) => (String::new(), String::new(), e.to_string()),
        };
        fits.write_record([
            scope_name(market),
            ASSORTATIVITY_TRANSFORM,
            &slope,
            &intercept,
            &n.to_string(),
            &zero.to_string(),
            &isolated.to_string(),
            &error,
        ])
        .map_err(csv_err)?;
    }
    points.flush().map_err(|e| CliError::Input(e.to_string()))?;
    fits.flush().map_err(|e| CliError::Input(e.to_string()))
}

fn detect_cmd(
    stream: &StreamArgs,
    k: Option<f64>,
    seed: Option<u64>,
    config: Option<&Path>,
    tz_offset: Option<i32>,
    out: &Path,
    plots: Option<&Path>,
) -> Result<(), CliError> {
    let seed = require_seed(seed)?;
    check_output(out)?;
    if let Some(p) = config {
        check_input(p)?;
    }
    if let Some(dir) = plots {
        if !dir.is_dir() {
            return Err(CliError::Input(format!(
                "plot directory does not exist: {}",
                dir.display()
            )));
        }
    }
    let (mut detect, config_file) = match config {
        Some(path) => {
            let (text, file) = io::read_text(path, "config")?;
            (DetectConfig::from_toml(&text)?, Some(file))
        }
        None => (DetectConfig::default(), None),
    };
    if let Some(k) = k {
        detect.k = k;
    }
    if let Some(h) = tz_offset {
        detect.display_offset_hours = h;
    }
    let inputs = io::load(&stream.tweets, &stream.companies, stream.keep_unknown)?;
    let mut report = run_detection(
        &inputs.dataset,
        &inputs.catalog,
        &detect,
        seed,
        stream.keep_unknown,
    )?;
    report.meta.inputs = inputs.files;
    report.meta.inputs.extend(config_file);
    io::write_json(out, &report)?;
    if let Some(dir) = plots {
        crate::export::export_plot_data(&report, dir)?;
    }
    Ok(())
}

fn synth_cmd(
    config: Option<&Path>,
    seed: Option<u64>,
    out_tweets: &Path,
    out_companies: &Path,
    out_truth: &Path,
) -> Result<(), CliError> {
    let seed = require_seed(seed)?;
    for p in [out_tweets, out_companies, out_truth] {
        check_output(p)?;
    }
    let (synth, inputs) = match config {
        Some(path) => {
            check_input(path)?;
            let (text, file) = io::read_text(path, "config")?;
            let parsed =
                SynthConfig::from_toml(&text).map_err(|e| CliError::Input(e.to_string()))?;
            (parsed, vec![file])
        }
        None => (SynthConfig::default(), Vec::new()),
    };
    let output = generate(&synth, seed).map_err(|e| CliError::Input(e.to_string()))?;
    io::write_bytes(out_tweets, output.tweets_jsonl().as_bytes())?;
    let mut companies = Vec::new();
    write_company_csv(&mut companies, &output.companies)
        .map_err(|e| CliError::Internal(e.to_string()))?;
    io::write_bytes(out_companies, &companies)?;
    io::write_json(
        out_truth,
        &Tagged {
            meta: RunMeta::new("synth", Some(seed), &synth, inputs),
            body: &output.truth,
        },
    )
}

fn evaluate_cmd(report: &Path, truth: &Path, out: Option<&Path>) -> Result<(), CliError> {
    check_input(report)?;
    check_input(truth)?;
    if let Some(p) = out {
        check_output(p)?;
    }
    let (report_text, report_file) = io::read_text(report, "report")?;
    let (truth_text, truth_file) = io::read_text(truth, "truth")?;
    let parsed_report = serde_json::from_str(&report_text)
        .map_err(|e| CliError::Input(format!("{}: {e}", report.display())))?;
    let parsed_truth: GroundTruth = serde_json::from_str(&truth_text)
        .map_err(|e| CliError::Input(format!("{}: {e}", truth.display())))?;
    let evaluation: Evaluation =
        evaluate(&parsed_report, &parsed_truth).map_err(|e| CliError::Input(e.to_string()))?;
    let tagged = Tagged {
        meta: RunMeta::new(
            "evaluate",
            None,
            &serde_json::Value::Null,
            vec![report_file, truth_file],
        ),
        body: &evaluation,
    };
    io::to_stdout(&tagged)?;
    match out {
        Some(p) => io::write_json(p, &tagged),
        None => Ok(()),
    }
}

fn summary_cmd(stream: &StreamArgs, json: Option<&Path>) -> Result<(), CliError> {
    if let Some(p) = json {
        check_output(p)?;
    }
    let inputs = io::load(&stream.tweets, &stream.companies, stream.keep_unknown)?;
    let summary = summarize(&inputs.dataset, &inputs.catalog);
    io::print_text(&summary.to_string())?;
    match json {
        Some(p) => io::write_json(
            p,
            &Tagged {
                meta: RunMeta::new("summary", None, &stream_options(stream), inputs.files),
                body: &summary,
            },
        ),
        None => Ok(()),
    }
}

fn export_cmd(report: &Path, out_dir: &Path) -> Result<(), CliError> {
    check_input(report)?;
    if !out_dir.is_dir() {
        return Err(CliError::Input(format!(
            "output directory does not exist: {}",
            out_dir.display()
        )));
    }
    let (text, _) = io::read_text(report, "report")?;
    let parsed: radar_core::detect::SuspicionReport = serde_json::from_str(&text)
        .map_err(|e| CliError::Input(format!("{}: {e}", report.display())))?;
    parsed.check()?;
    crate::export::export_plot_data(&parsed, out_dir).map(|_: Vec<PathBuf>| ())
}
