//! Plot-ready CSV bundle derived from a suspicion report.

use std::path::{Path, PathBuf};

use radar_core::detect::SuspicionReport;
use radar_core::ingest::Market;

use crate::io::{self, csv_err};
use crate::CliError;

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

fn scope(m: Option<Market>) -> &'static str {
    m.map_or("ALL", Market::as_str)
}

fn table(
    dir: &Path,
    name: &str,
    header: &[&str],
    rows: Vec<Vec<String>>,
) -> Result<PathBuf, CliError> {
    let path = dir.join(name);
    let mut w = io::csv_writer(&path)?;
    w.write_record(header).map_err(csv_err)?;
    for row in rows {
        w.write_record(&row).map_err(csv_err)?;
    }
    w.flush().map_err(|e| CliError::Input(e.to_string()))?;
    Ok(path)
}

/// Writes one CSV per figure into `dir` and returns the paths written.
/// Tables that depend on peaks keep their header when there are none.
pub fn export_plot_data(report: &SuspicionReport, dir: &Path) -> Result<Vec<PathBuf>, CliError> {
    let b = &report.baselines;
    let mut written = Vec::new();

    written.push(table(
        dir,
        "hourly_profile.csv",
        &["hour", "tweets", "share"],
        b.hourly_profile
            .iter()
            .map(|h| {
                vec![
                    h.hour.to_string(),
                    h.tweets.to_string(),
                    h.share.to_string(),
                ]
            })
            .collect(),
    )?);

    written.push(table(
        dir,
        "peaks_vs_k.csv",
        &["k", "peaks"],
        b.peak_curve
            .iter()
            .map(|r| vec![r.k.to_string(), r.peaks.to_string()])
            .collect(),
    )?);

    let mut entropy_rows = Vec::new();
    if let Some(union) = &b.peak_union {
        for (subset, summaries) in [("all", &b.entropy), ("peaks", &union.entropy)] {
            for s in summaries.iter() {
                let bins = s.histogram.len();
                for (i, count) in s.histogram.iter().enumerate() {
                    entropy_rows.push(vec![
                        s.level.to_string(),
                        subset.to_string(),
                        (i as f64 / bins as f64).to_string(),
                        ((i + 1) as f64 / bins as f64).to_string(),
                        count.to_string(),
                    ]);
                }
            }
        }
    }
    written.push(table(
        dir,
        "entropy_by_level.csv",
        &["level", "subset", "bin_lo", "bin_hi", "count"],
        entropy_rows,
    )?);

    let peak_bins = b
        .peak_union
        .as_ref()
        .map(|u| u.cap_spread.as_slice())
        .unwrap_or(&[]);
    written.push(table(
        dir,
        "cap_std_vs_x.csv",
        &[
            "x",
            "all_tweets",
            "all_mean_std",
            "peak_tweets",
            "peak_mean_std",
            "bootstrap_mean_std",
            "bootstrap_std_error",
        ],
        b.bootstrap
            .iter()
            .map(|boot| {
                let all = b.cap_spread.iter().find(|c| c.x == boot.x);
                let peak = peak_bins.iter().find(|c| c.x == boot.x);
                vec![
                    boot.x.to_string(),
                    all.map_or(0, |c| c.tweets).to_string(),
                    opt(all.map(|c| c.mean_std)),
                    peak.map_or(0, |c| c.tweets).to_string(),
                    opt(peak.map(|c| c.mean_std)),
                    boot.mean_std.to_string(),
                    boot.std_error.to_string(),
                ]
            })
            .collect(),
    )?);

    let sf = report.social_financial.as_ref();
    let assortativity = sf.map(|s| s.assortativity.as_slice()).unwrap_or(&[]);
    written.push(table(
        dir,
        "assortativity_points.csv",
        &[
            "market",
            "ticker",
            "capitalization",
            "neighbor_mean",
            "log10_capitalization",
            "log10_neighbor_mean",
        ],
        assortativity
            .iter()
            .flat_map(|a| {
                a.points.iter().map(move |p| {
                    let (lx, ly) = p.log_coords();
                    vec![
                        scope(a.market).to_string(),
                        p.ticker.clone(),
                        p.capitalization.to_string(),
                        p.neighbor_mean.to_string(),
                        lx.to_string(),
                        ly.to_string(),
                    ]
                })
            })
            .collect(),
    )?);
    written.push(table(
        dir,
        "assortativity_fit.csv",
        &[
            "market",
            "transform",
            "slope",
            "intercept",
            "n_points",
            "excluded_zero_cap",
            "excluded_isolated",
            "error",
        ],
        assortativity
            .iter()
            .map(|a| {
                vec![
                    scope(a.market).to_string(),
                    a.transform.clone(),
                    opt(a.slope),
                    opt(a.intercept),
                    a.points.len().to_string(),
                    a.excluded_zero_cap.to_string(),
                    a.excluded_isolated.to_string(),
                    a.error.clone().unwrap_or_default(),
                ]
            })
            .collect(),
    )?);

    let markets = sf.map(|s| s.markets.as_slice()).unwrap_or(&[]);
    let mut kde_rows = Vec::new();
    for m in markets {
        if let Some(k) = &m.kde {
            for (iy, y) in k.ys.iter().enumerate() {
                for (ix, x) in k.xs.iter().enumerate() {
                    kde_rows.push(vec![
                        m.market.to_string(),
                        x.to_string(),
                        y.to_string(),
                        k.at(ix, iy).to_string(),
                    ]);
                }
            }
        }
    }
    written.push(table(
        dir,
        "kde.csv",
        &[
            "market",
            "log10_capitalization",
            "log10_social_importance",
            "density",
        ],
        kde_rows,
    )?);

    let splits = sf.and_then(|s| s.splits);
    written.push(table(
        dir,
        "sectors.csv",
        &[
            "market",
            "stocks",
            "split_financial",
            "split_social",
            "A",
            "B",
            "C",
            "D",
            "kde_error",
        ],
        markets
            .iter()
            .map(|m| {
                let tally = |s| m.sectors.get(&s).copied().unwrap_or(0).to_string();
                use radar_core::stats::Sector::*;
                vec![
                    m.market.to_string(),
                    m.stocks.to_string(),
                    opt(splits.map(|s| s.financial)),
                    opt(splits.map(|s| s.social)),
                    tally(A),
                    tally(B),
                    tally(C),
                    tally(D),
                    m.kde_error.clone().unwrap_or_default(),
                ]
            })
            .collect(),
    )?);

    written.push(table(
        dir,
        "social_financial_stocks.csv",
        &[
            "ticker",
            "market",
            "capitalization",
            "social_importance",
            "peaks",
            "sector",
        ],
        sf.map(|s| s.stocks.as_slice())
            .unwrap_or(&[])
            .iter()
            .map(|s| {
                vec![
                    s.ticker.clone(),
                    s.market.to_string(),
                    opt(s.capitalization),
                    s.social_importance.to_string(),
                    s.peaks.to_string(),
                    s.sector.map(|x| format!("{x:?}")).unwrap_or_default(),
                ]
            })
            .collect(),
    )?);

    written.push(table(
        dir,
        "peaks.csv",
        &[
            "ticker",
            "hour_utc",
            "volume",
            "retweet_fraction",
            "mean_cashtags_per_tweet",
            "cap_spread_excess",
            "term_retweet",
            "term_cashtags",
            "term_entropy",
            "term_cap_spread",
            "score",
            "flagged",
        ],
        report
            .peaks
            .iter()
            .map(|p| {
                let a = &p.analysis;
                let t = p.scored.terms;
                vec![
                    a.ticker.clone(),
                    a.hour_utc.to_rfc3339(),
                    a.volume.to_string(),
                    a.retweet_fraction.to_string(),
                    a.mean_cashtags_per_tweet.to_string(),
                    opt(a.cap_spread_excess),
                    t.retweet.to_string(),
                    t.cashtags.to_string(),
                    t.entropy.to_string(),
                    t.cap_spread.to_string(),
                    p.scored.score.to_string(),
                    p.scored.flagged.to_string(),
                ]
            })
            .collect(),
    )?);

    let meta = dir.join("meta.json");
    io::write_json(&meta, &report.meta)?;
    written.push(meta);
    Ok(written)
}
