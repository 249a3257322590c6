//! Multi-run aggregation. Intervals are two-sided 95% Student-t intervals
//! over run-level accuracies: `mean ± t(0.975, n−1)·s/√n`.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::Args;
use ctrla_core::evalstats::{t_interval_halfwidth, welch_one_sided};
use serde::Serialize;

use crate::train::{RunMetrics, METRICS};

pub const INTERVAL_METHOD: &str =
    "95% two-sided Student-t interval over run-level accuracies: mean ± t(0.975, n-1) * s / sqrt(n), s the sample standard deviation";
pub const WELCH_ALTERNATIVE: &str =
    "one-sided Welch t-test, H1: mean validation accuracy > mean test accuracy";

#[derive(Args, Debug)]
pub struct ReportArgs {
    /// Run directories or metrics.json files.
    #[arg(required = true)]
    pub runs: Vec<PathBuf>,
    /// Directory for report.json and report.csv; only stdout when omitted.
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Serialize, PartialEq)]
pub struct Column {
    pub name: &'static str,
    pub n: usize,
    pub mean: f64,
    /// `None` for a single run.
    pub halfwidth: Option<f64>,
}

#[derive(Debug, Serialize, PartialEq)]
pub struct WelchSummary {
    pub t: f64,
    pub df: f64,
    pub p: f64,
    pub alternative: &'static str,
}

#[derive(Debug, Serialize)]
pub struct Report {
    pub runs: usize,
    pub sources: Vec<String>,
    pub interval_method: &'static str,
    pub columns: Vec<Column>,
    pub welch_val_vs_test: Option<WelchSummary>,
}

fn column(name: &'static str, xs: &[f64]) -> Result<Column> {
    let (mean, halfwidth) = if xs.len() >= 2 {
        let (m, h) = t_interval_halfwidth(xs)?;
        (m, Some(h))
    } else {
        (xs[0], None)
    };
    Ok(Column {
        name,
        n: xs.len(),
        mean,
        halfwidth,
    })
}

fn metrics_path(p: &Path) -> PathBuf {
    if p.is_dir() {
        p.join(METRICS)
    } else {
        p.to_path_buf()
    }
}

/// Runs must agree on everything except the seed.
fn check_compatible(runs: &[(String, RunMetrics)]) -> Result<()> {
    let key = |m: &RunMetrics| {
        (
            m.preset.clone(),
            m.dataset_format,
            m.model,
            m.mode,
            m.epochs,
            m.train_size,
            m.tta,
        )
    };
    let (first_src, first) = &runs[0];
    for (src, m) in &runs[1..] {
        if key(m) != key(first) {
            bail!("incompatible logs: {src} differs from {first_src} in preset, dataset, model, mode, epochs, training size or TTA");
        }
    }
    Ok(())
}

pub fn build_report(runs: &[(String, RunMetrics)]) -> Result<Report> {
    if runs.is_empty() {
        bail!("no runs given");
    }
    check_compatible(runs)?;
    let pick = |f: fn(&RunMetrics) -> f64| runs.iter().map(|(_, m)| f(m)).collect::<Vec<_>>();
    let val = pick(|m| m.val_accuracy);
    let test = pick(|m| m.test_accuracy);
    let tta = pick(|m| m.test_tta_accuracy);
    let welch = if runs.len() >= 2 {
        let w = welch_one_sided(&val, &test)?;
        Some(WelchSummary {
            t: w.t,
            df: w.df,
            p: w.p,
            alternative: WELCH_ALTERNATIVE,
        })
    } else {
        None
    };
    Ok(Report {
        runs: runs.len(),
        sources: runs.iter().map(|(s, _)| s.clone()).collect(),
        interval_method: INTERVAL_METHOD,
        columns: vec![
            column("val_accuracy", &val)?,
            column("test_accuracy", &test)?,
            column("test_tta_accuracy", &tta)?,
        ],
        welch_val_vs_test: welch,
    })
}

pub fn to_csv(r: &Report) -> String {
    let mut s = String::from("metric,n,mean,halfwidth\n");
    for c in &r.columns {
        let hw = c.halfwidth.map(|h| h.to_string()).unwrap_or_default();
        s.push_str(&format!("{},{},{},{hw}\n", c.name, c.n, c.mean));
    }
    if let Some(w) = &r.welch_val_vs_test {
        s.push_str(&format!("welch_val_gt_test_p,{},{},\n", r.runs, w.p));
    }
    s
}

pub fn run(a: ReportArgs) -> Result<()> {
    let mut runs = Vec::with_capacity(a.runs.len());
    for p in &a.runs {
        let path = metrics_path(p);
        let text =
            fs::read_to_string(&path).with_context(|| format!("reading {}", path.display()))?;
        let m: RunMetrics = serde_json::from_str(&text)
            .with_context(|| format!("incompatible log {}", path.display()))?;
        runs.push((path.display().to_string(), m));
    }
    let report = build_report(&runs)?;
    let json = serde_json::to_string_pretty(&report)?;
    if let Some(dir) = &a.output {
        fs::create_dir_all(dir)?;
        fs::write(dir.join("report.json"), &json)?;
        fs::write(dir.join("report.csv"), to_csv(&report))?;
    }
    writeln!(std::io::stdout().lock(), "{json}")?;
    Ok(())
}
