//! Results bundle and report files.
//!
//! A results bundle is a directory holding `results.json` (the full
//! [`ExperimentResults`]) next to flat CSV tables with one row per sample.
//! A report adds `summary.csv` with boxplot statistics per renewable share
//! and a set of SVG charts.

mod svg;

use std::fs;
use std::path::{Path, PathBuf};

use crate::engine::{ExperimentResults, PriceSample, ShareResults, WindComparison};
use crate::error::{Error, Result};
use crate::stats;

pub const RESULTS_FILE: &str = "results.json";

fn csv_error(path: &Path, e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::io(path, io),
        other => Error::Parse(format!("{}: {other:?}", path.display())),
    }
}

fn write_table(path: &Path, header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(|e| csv_error(path, e))?;
    w.write_record(header).map_err(|e| csv_error(path, e))?;
    for row in rows {
        w.write_record(&row).map_err(|e| csv_error(path, e))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

fn write_file(path: &Path, contents: &str) -> Result<()> {
    fs::write(path, contents).map_err(|e| Error::io(path, e))
}

fn prepare(results: &ExperimentResults, dir: &Path) -> Result<()> {
    if results.shares.is_empty() {
        return Err(Error::invalid("results hold no renewable share"));
    }
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))
}

fn num(x: f64) -> String {
    x.to_string()
}

/// `volumes.csv`, `costs.csv`, `prices.csv` and `profits.csv`.
pub fn write_tables(results: &ExperimentResults, dir: &Path) -> Result<Vec<PathBuf>> {
    prepare(results, dir)?;
    let shares = &results.shares;

    let volumes = dir.join("volumes.csv");
    write_table(
        &volumes,
        &["p_percent", "member", "volume_up_gwh", "volume_down_gwh", "shortfall_mwh"],
        shares.iter().flat_map(|s| {
            (0..s.daily_volume_up_gwh.len()).map(move |j| {
                vec![
                    num(s.p_percent),
                    j.to_string(),
                    num(s.daily_volume_up_gwh[j]),
                    num(s.daily_volume_down_gwh[j]),
                    num(s.daily_shortfall_mwh[j]),
                ]
            })
        }),
    )?;

    let costs = dir.join("costs.csv");
    write_table(
        &costs,
        &["p_percent", "member", "cost_up_eur", "cost_down_eur"],
        shares.iter().flat_map(|s| {
            (0..s.daily_cost_up_eur.len()).map(move |j| {
                vec![
                    num(s.p_percent),
                    j.to_string(),
                    num(s.daily_cost_up_eur[j]),
                    num(s.daily_cost_down_eur[j]),
                ]
            })
        }),
    )?;

    let prices = dir.join("prices.csv");
    let price_rows = |s: &ShareResults, dir: &'static str, v: &[PriceSample]| -> Vec<Vec<String>> {
        v.iter()
            .map(|p| {
                vec![
                    num(s.p_percent),
                    dir.to_string(),
                    p.hour.to_string(),
                    p.zone.clone(),
                    p.member.to_string(),
                    num(p.price),
                ]
            })
            .collect()
    };
    write_table(
        &prices,
        &["p_percent", "direction", "hour", "zone", "member", "price_eur_per_mwh"],
        shares.iter().flat_map(|s| {
            let mut rows = price_rows(s, "up", &s.prices_up);
            rows.extend(price_rows(s, "down", &s.prices_down));
            rows
        }),
    )?;

    let profits = dir.join("profits.csv");
    write_table(
        &profits,
        &["p_percent", "technology", "profit_up_eur", "profit_down_eur", "profit_total_eur"],
        shares.iter().flat_map(|s| {
            s.profits.iter().map(move |p| {
                vec![
                    num(s.p_percent),
                    p.technology.as_str().to_string(),
                    num(p.up),
                    num(p.down),
                    num(p.total),
                ]
            })
        }),
    )?;
    Ok(vec![volumes, costs, prices, profits])
}

/// Writes `results.json` and the sample tables.
pub fn write_results_bundle(results: &ExperimentResults, dir: &Path) -> Result<Vec<PathBuf>> {
    prepare(results, dir)?;
    let json = dir.join(RESULTS_FILE);
    let text = serde_json::to_string_pretty(results).expect("results serialize");
    write_file(&json, &text)?;
    let mut files = vec![json];
    files.extend(write_tables(results, dir)?);
    Ok(files)
}

pub fn load_results_bundle(dir: &Path) -> Result<ExperimentResults> {
    let path = dir.join(RESULTS_FILE);
    let text = fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
    serde_json::from_str(&text).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
}

fn summary_row(p: f64, observable: &str, values: &[f64]) -> Vec<String> {
    let mut row = vec![num(p), observable.to_string(), values.len().to_string()];
    match stats::summarize(values) {
        Ok(b) => {
            row.extend(
                [b.min, b.q1, b.median, b.q3, b.max, b.whisker_low, b.whisker_high].map(num),
            );
            row.push(b.outliers.len().to_string());
            row.push(num(stats::mean(values).unwrap_or(f64::NAN)));
            row.push(stats::skewness(values).map(num).unwrap_or_default());
        }
        Err(_) => row.extend(std::iter::repeat_n(String::new(), 10)),
    }
    row
}

fn label(p: f64) -> String {
    format!("P%={:.0}", p * 100.0)
}

fn boxes(shares: &[ShareResults], pick: impl Fn(&ShareResults) -> Vec<f64>) -> Vec<(String, stats::BoxplotStats)> {
    shares
        .iter()
        .filter_map(|s| stats::summarize(&pick(s)).ok().map(|b| (label(s.p_percent), b)))
        .collect()
}

/// Histogram of one observable per share on common bins.
fn grouped_histogram(
    title: &str,
    x_unit: &str,
    shares: &[ShareResults],
    pick: impl Fn(&ShareResults) -> Vec<f64>,
) -> Result<String> {
    let samples: Vec<Vec<f64>> = shares.iter().map(&pick).collect();
    let pooled: Vec<f64> = samples.iter().flatten().copied().collect();
    let edges = if pooled.is_empty() {
        vec![0.0, 1.0]
    } else {
        stats::histogram_with_width(&pooled, stats::freedman_diaconis_width(&pooled)?)?.edges
    };
    let series = samples
        .iter()
        .map(|v| {
            if v.is_empty() {
                Ok(vec![0.0; edges.len() - 1])
            } else {
                stats::histogram(v, &edges).map(|h| h.frequencies)
            }
        })
        .collect::<Result<Vec<_>>>()?;
    let categories: Vec<String> = edges.windows(2).map(|w| format!("{:.3}", 0.5 * (w[0] + w[1]))).collect();
    let names: Vec<String> = shares.iter().map(|s| label(s.p_percent)).collect();
    Ok(svg::grouped_bars(title, &format!("frequency (bin centre, {x_unit})"), &categories, &names, &series))
}

/// Writes the sample tables, `summary.csv` and the SVG charts into `dir`.
pub fn render_report(results: &ExperimentResults, dir: &Path) -> Result<Vec<PathBuf>> {
    prepare(results, dir)?;
    let shares = &results.shares;
    let mut files = write_tables(results, dir)?;

    let prices = |s: &ShareResults| s.prices_up.iter().map(|p| p.price).collect::<Vec<_>>();
    let summary = dir.join("summary.csv");
    write_table(
        &summary,
        &[
            "p_percent", "observable", "n", "min", "q1", "median", "q3", "max", "whisker_low",
            "whisker_high", "n_outliers", "mean", "skewness",
        ],
        shares.iter().flat_map(|s| {
            [
                summary_row(s.p_percent, "volume_up_gwh", &s.daily_volume_up_gwh),
                summary_row(s.p_percent, "volume_down_gwh", &s.daily_volume_down_gwh),
                summary_row(s.p_percent, "cost_up_eur", &s.daily_cost_up_eur),
                summary_row(s.p_percent, "cost_down_eur", &s.daily_cost_down_eur),
                summary_row(s.p_percent, "price_up_eur_per_mwh", &prices(s)),
            ]
        }),
    )?;
    files.push(summary);

    let mut charts: Vec<(&str, String)> = vec![
        (
            "volume_histogram.svg",
            grouped_histogram("Daily up-regulation volume", "GWh", shares, |s| s.daily_volume_up_gwh.clone())?,
        ),
        (
            "volume_boxplot.svg",
            svg::boxplots("Daily up-regulation volume", "GWh", &boxes(shares, |s| s.daily_volume_up_gwh.clone())),
        ),
        (
            "cost_histogram.svg",
            grouped_histogram("Daily up-regulation cost", "EUR", shares, |s| s.daily_cost_up_eur.clone())?,
        ),
        (
            "cost_boxplot.svg",
            svg::boxplots("Daily up-regulation cost", "EUR", &boxes(shares, |s| s.daily_cost_up_eur.clone())),
        ),
        (
            "price_boxplot.svg",
            svg::boxplots("Up-regulation price", "EUR/MWh", &boxes(shares, prices)),
        ),
    ];

    let tech_names: Vec<String> = shares[0].profits.iter().map(|p| p.technology.as_str().to_string()).collect();
    let share_names: Vec<String> = shares.iter().map(|s| label(s.p_percent)).collect();
    let profit_series: Vec<Vec<f64>> = shares
        .iter()
        .map(|s| s.profits.iter().map(|p| p.total).collect())
        .collect();
    charts.push((
        "profit_by_technology.svg",
        svg::grouped_bars(
            "Mean profit per session by technology",
            "EUR",
            &tech_names,
            &share_names,
            &profit_series,
        ),
    ));

    let mut hourly = Vec::new();
    for s in shares {
        let groups: Vec<(String, stats::BoxplotStats)> = (0..24)
            .filter_map(|h| {
                let v: Vec<f64> = s.prices_up.iter().filter(|p| p.hour == h).map(|p| p.price).collect();
                stats::summarize(&v).ok().map(|b| (format!("{h}"), b))
            })
            .collect();
        hourly.push((
            format!("price_by_hour_p{:.0}.svg", s.p_percent * 100.0),
            svg::boxplots(
                &format!("Up-regulation price by hour, {}", label(s.p_percent)),
                "EUR/MWh",
                &groups,
            ),
        ));
    }

    for (name, body) in charts.iter().map(|(n, b)| (n.to_string(), b)).chain(hourly.iter().map(|(n, b)| (n.clone(), b))) {
        let path = dir.join(name);
        write_file(&path, body)?;
        files.push(path);
    }
    Ok(files)
}

/// Writes both runs as bundles under `gaussian/` and `weibull/` plus
/// `wind_summary.csv`.
pub fn write_wind_comparison(cmp: &WindComparison, dir: &Path) -> Result<Vec<PathBuf>> {
    prepare(&cmp.gaussian, dir)?;
    let mut files = write_results_bundle(&cmp.gaussian, &dir.join("gaussian"))?;
    files.extend(write_results_bundle(&cmp.weibull, &dir.join("weibull"))?);
    let summary = dir.join("wind_summary.csv");
    write_table(
        &summary,
        &[
            "p_percent", "gaussian_mean_gwh", "gaussian_mode_gwh", "gaussian_iqr_gwh",
            "weibull_mean_gwh", "weibull_mode_gwh", "weibull_iqr_gwh",
        ],
        cmp.summary.iter().map(|w| {
            [
                w.p_percent, w.gaussian_mean_gwh, w.gaussian_mode_gwh, w.gaussian_iqr_gwh,
                w.weibull_mean_gwh, w.weibull_mode_gwh, w.weibull_iqr_gwh,
            ]
            .map(num)
            .to_vec()
        }),
    )?;
    files.push(summary);
    Ok(files)
}
