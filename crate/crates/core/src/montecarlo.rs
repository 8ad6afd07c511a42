//! Seeded simulation study: finite-sample bias and relative efficiency of the
//! truncated-moment estimator against the grouped MLE.
//!
//! For every sample size the study draws `batches x replications_per_batch`
//! exponential samples, groups them, and estimates `theta` for every window.
//! Each batch contributes the mean of its estimates and a finite-sample
//! relative efficiency `(1 / (n I(theta))) / var(theta_hat)`; the report
//! carries the mean and standard deviation of those batch statistics,
//! normalized by `theta` for the means.
//!
//! Replication `(k, b, i)` (size index, batch, replication) draws from the
//! ChaCha8 stream `(k * batches + b) * replications_per_batch + i` of the
//! configured seed, so results do not depend on how work is scheduled.

use std::fmt::Write as _;

use rand::distr::Open01;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::efficiency::{are_mtum_vs_mle, are_mtum_vs_ungrouped};
use crate::error::{Error, Result};
use crate::grouped::{group_raw, GroupBoundaries};
use crate::mle::{fisher_information, grouping_efficiency};
use crate::model::ExponentialModel;
use crate::mtum::{estimate_theta, SolverOptions};
use crate::window::{resolve_window, TruncationWindow};

/// Seed used when none is configured.
pub const DEFAULT_SEED: u64 = 20_240_611;

/// A counter-based random stream: one ChaCha8 keystream per `(seed, stream)`.
#[derive(Debug, Clone)]
pub struct RandomStream {
    rng: ChaCha8Rng,
}

impl RandomStream {
    pub fn new(seed: u64, stream: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        Self { rng }
    }

    /// Uniform on the open interval `(0, 1)`.
    pub fn open01(&mut self) -> f64 {
        self.rng.sample(Open01)
    }
}

/// `n` draws of `-theta ln(1 - U)`.
pub fn sample_exponential(
    model: &ExponentialModel,
    n: usize,
    stream: &mut RandomStream,
) -> Vec<f64> {
    let theta = model.theta();
    (0..n)
        .map(|_| -theta * (-stream.open01()).ln_1p())
        .collect()
}

fn default_replications() -> usize {
    1000
}

fn default_batches() -> usize {
    10
}

fn default_seed() -> u64 {
    DEFAULT_SEED
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulationConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    pub theta: f64,
    pub boundaries: GroupBoundaries,
    /// `(t, T)` pairs.
    pub windows: Vec<(f64, f64)>,
    pub sample_sizes: Vec<usize>,
    #[serde(default = "default_replications")]
    pub replications_per_batch: usize,
    #[serde(default = "default_batches")]
    pub batches: usize,
    #[serde(default = "default_seed")]
    pub seed: u64,
}

impl SimulationConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let config: Self = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<()> {
        ExponentialModel::new(self.theta)?;
        if self.windows.is_empty() || self.sample_sizes.is_empty() {
            return Err(Error::InvalidParameter(
                "need at least one window and one sample size".into(),
            ));
        }
        if self.sample_sizes.contains(&0) {
            return Err(Error::InvalidParameter(
                "sample sizes must be positive".into(),
            ));
        }
        if self.replications_per_batch < 2 || self.batches < 2 {
            return Err(Error::InvalidParameter(
                "need at least 2 batches and 2 replications per batch".into(),
            ));
        }
        Ok(())
    }
}

/// Analytic efficiencies for one window; `None` when the window is invalid.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WindowAnalytics {
    pub t: f64,
    #[serde(rename = "T")]
    pub big_t: f64,
    /// `ARE(MTuM, grouped MLE)`.
    pub are_grouped: Option<f64>,
    /// `ARE(MTuM, ungrouped MLE)`.
    pub are_ungrouped: Option<f64>,
    /// `ARE(grouped MLE, ungrouped MLE)`.
    pub are_mle_ratio: Option<f64>,
    /// Why the window was rejected, if it was.
    pub rejection: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CellStats {
    /// Mean of batch means, divided by `theta`.
    pub mean_ratio: f64,
    /// Standard deviation of batch means, divided by `theta`.
    pub se_mean: f64,
    pub re: f64,
    pub se_re: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReportRow {
    pub t: f64,
    #[serde(rename = "T")]
    pub big_t: f64,
    pub n: usize,
    /// `None` for windows that are not identifiable (`n/a`).
    pub stats: Option<CellStats>,
    /// Replications dropped because the estimator failed.
    pub failures: u64,
    pub replications: u64,
}

impl ReportRow {
    /// More than 1% of replications failed.
    pub fn flagged(&self) -> bool {
        self.failures as f64 > 0.01 * self.replications as f64
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimulationReport {
    pub config: SimulationConfig,
    pub windows: Vec<WindowAnalytics>,
    /// Ordered by window, then sample size.
    pub rows: Vec<ReportRow>,
}

fn mean_sd(values: &[f64]) -> (f64, f64) {
    let k = values.len() as f64;
    let mean = values.iter().sum::<f64>() / k;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (k - 1.0);
    (mean, var.sqrt())
}

/// Runs the full study described by `config`.
pub fn run_study(config: &SimulationConfig) -> Result<SimulationReport> {
    config.validate()?;
    let model = ExponentialModel::new(config.theta)?;
    let boundaries = &config.boundaries;
    let resolved: Vec<std::result::Result<TruncationWindow, Error>> = config
        .windows
        .iter()
        .map(|&(t, big_t)| resolve_window(boundaries, t, big_t))
        .collect();

    let mle_ratio = grouping_efficiency(&model, boundaries);
    let windows = config
        .windows
        .iter()
        .zip(&resolved)
        .map(|(&(t, big_t), w)| match w {
            Ok(w) => WindowAnalytics {
                t,
                big_t,
                are_grouped: Some(are_mtum_vs_mle(&model, w)),
                are_ungrouped: Some(are_mtum_vs_ungrouped(&model, w)),
                are_mle_ratio: Some(mle_ratio),
                rejection: None,
            },
            Err(e) => WindowAnalytics {
                t,
                big_t,
                are_grouped: None,
                are_ungrouped: None,
                are_mle_ratio: None,
                rejection: Some(e.name().to_string()),
            },
        })
        .collect::<Vec<_>>();

    let opts = SolverOptions::default();
    let info = fisher_information(&model, boundaries);
    let (batches, reps) = (config.batches, config.replications_per_batch);

    // estimates[size][window][batch] -> successful estimates
    let mut per_size = Vec::with_capacity(config.sample_sizes.len());
    for (k, &n) in config.sample_sizes.iter().enumerate() {
        let draws: Vec<Vec<Option<f64>>> = (0..batches * reps)
            .into_par_iter()
            .map(|idx| {
                let stream = (k * batches * reps + idx) as u64;
                let mut rng = RandomStream::new(config.seed, stream);
                let values = sample_exponential(&model, n, &mut rng);
                let sample = group_raw(&values, boundaries).expect("positive draws");
                resolved
                    .iter()
                    .map(|w| {
                        w.as_ref()
                            .ok()
                            .and_then(|w| estimate_theta(&sample, w, None, &opts).ok())
                            .map(|inv| inv.theta)
                    })
                    .collect()
            })
            .collect();
        per_size.push(draws);
    }

    let mut rows = Vec::new();
    for (wi, &(t, big_t)) in config.windows.iter().enumerate() {
        for (k, &n) in config.sample_sizes.iter().enumerate() {
            let replications = (batches * reps) as u64;
            if resolved[wi].is_err() {
                rows.push(ReportRow {
                    t,
                    big_t,
                    n,
                    stats: None,
                    failures: 0,
                    replications,
                });
                continue;
            }
            let mle_var = 1.0 / (n as f64 * info);
            let mut failures = 0u64;
            let mut batch_means = Vec::with_capacity(batches);
            let mut batch_re = Vec::with_capacity(batches);
            for b in 0..batches {
                let estimates: Vec<f64> = per_size[k][b * reps..(b + 1) * reps]
                    .iter()
                    .filter_map(|rep| rep[wi])
                    .collect();
                failures += (reps - estimates.len()) as u64;
                if estimates.len() >= 2 {
                    let (mean, sd) = mean_sd(&estimates);
                    batch_means.push(mean);
                    batch_re.push(mle_var / (sd * sd));
                }
            }
            let stats = (batch_means.len() >= 2).then(|| {
                let (mean, se) = mean_sd(&batch_means);
                let (re, se_re) = mean_sd(&batch_re);
                CellStats {
                    mean_ratio: mean / config.theta,
                    se_mean: se / config.theta,
                    re,
                    se_re,
                }
            });
            rows.push(ReportRow {
                t,
                big_t,
                n,
                stats,
                failures,
                replications,
            });
        }
    }

    Ok(SimulationReport {
        config: config.clone(),
        windows,
        rows,
    })
}

fn opt(v: Option<f64>) -> String {
    v.map_or_else(|| "n/a".to_string(), |x| x.to_string())
}

impl SimulationReport {
    pub fn row(&self, t: f64, big_t: f64, n: usize) -> Option<&ReportRow> {
        self.rows
            .iter()
            .find(|r| r.t == t && r.big_t == big_t && r.n == n)
    }

    pub fn window(&self, t: f64, big_t: f64) -> Option<&WindowAnalytics> {
        self.windows.iter().find(|w| w.t == t && w.big_t == big_t)
    }

    /// Full-precision CSV, one line per `(window, n)`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from(
            "window_t,window_T,n,mean_ratio,se_mean,re,se_re,are_grouped,are_ungrouped,are_mle_ratio,failures\n",
        );
        for row in &self.rows {
            let w = self.window(row.t, row.big_t).expect("row window");
            let s = row.stats;
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{},{},{},{},{}",
                row.t,
                row.big_t,
                row.n,
                opt(s.map(|s| s.mean_ratio)),
                opt(s.map(|s| s.se_mean)),
                opt(s.map(|s| s.re)),
                opt(s.map(|s| s.se_re)),
                opt(w.are_grouped),
                opt(w.are_ungrouped),
                opt(w.are_mle_ratio),
                row.failures
            );
        }
        out
    }

    /// Aligned text table with MEAN and RE blocks. Rows where
    /// more than 1% of replications failed carry a `*`.
    pub fn to_text(&self) -> String {
        let cfg = &self.config;
        let mut out = String::new();
        if let Some(label) = &cfg.label {
            let _ = writeln!(out, "{label}");
        }
        let _ = writeln!(
            out,
            "MTuM vs grouped MLE, Exp(theta = {}), G = ({}), {} batches x {} replications, seed {}",
            cfg.theta, cfg.boundaries, cfg.batches, cfg.replications_per_batch, cfg.seed
        );
        let mut header = format!("{:<5} {:>6} {:>6} |", "", "t", "T");
        for n in &cfg.sample_sizes {
            let _ = write!(header, " {:>14}", format!("n={n}"));
        }
        let _ = write!(header, " | {:>6} {:>6} {:>6}", "inf", "inf", "inf");
        let _ = writeln!(out, "{header}");
        let rule = "=".repeat(header.chars().count());

        for block in ["MEAN", "RE"] {
            let _ = writeln!(out, "{rule}");
            for (wi, w) in self.windows.iter().enumerate() {
                let label = if wi == 0 { block } else { "" };
                let mut line = format!("{:<5} {:>6} {:>6} |", label, w.t, w.big_t);
                for &n in &cfg.sample_sizes {
                    let row = self.row(w.t, w.big_t, n).expect("row");
                    let cell = match row.stats {
                        None => "n/a".to_string(),
                        Some(s) if block == "MEAN" => {
                            format!("{:.3} ({})", s.mean_ratio, se(s.se_mean))
                        }
                        Some(s) => format!("{:.3} ({})", s.re, se(s.se_re)),
                    };
                    let mark = if row.flagged() { "*" } else { "" };
                    let _ = write!(line, " {:>14}", format!("{cell}{mark}"));
                }
                let fmt3 =
                    |v: Option<f64>| v.map_or_else(|| "n/a".to_string(), |x| format!("{x:.3}"));
                if block == "MEAN" {
                    let first = if w.are_grouped.is_some() { "1" } else { "n/a" };
                    let _ = write!(line, " | {:>6} {:>6} {:>6}", first, "-", "-");
                } else {
                    let _ = write!(
                        line,
                        " | {:>6} {:>6} {:>6}",
                        fmt3(w.are_grouped),
                        fmt3(w.are_ungrouped),
                        fmt3(w.are_mle_ratio)
                    );
                }
                let _ = writeln!(out, "{line}");
            }
        }
        let _ = writeln!(out, "{rule}");
        let _ = writeln!(
            out,
            "inf columns: ARE vs grouped MLE, ARE vs ungrouped MLE, grouped vs ungrouped MLE (analytic)"
        );
        let dropped: u64 = self.rows.iter().map(|r| r.failures).sum();
        let _ = writeln!(out, "dropped replications (no MTuM solution): {dropped}");
        out
    }
}

fn se(v: f64) -> String {
    let s = format!("{v:.3}");
    s.strip_prefix('0').map(str::to_string).unwrap_or(s)
}
