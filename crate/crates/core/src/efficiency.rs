//! Asymptotic relative efficiency of the truncated-moment estimator.

use std::fmt::Write as _;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::Result;
use crate::grouped::GroupBoundaries;
use crate::mle::{fisher_information_with, TailTerm};
use crate::model::ExponentialModel;
use crate::mtum::asymptotic_variance;
use crate::window::{resolve_window, TruncationWindow};

/// `ARE(MTuM, grouped MLE) = I(theta)^-1 / (g_theta'(mu)^2 Sigma_mu)`.
pub fn are_mtum_vs_mle(model: &ExponentialModel, window: &TruncationWindow) -> f64 {
    are_mtum_vs_mle_with(model, window, TailTerm::Include)
}

pub fn are_mtum_vs_mle_with(
    model: &ExponentialModel,
    window: &TruncationWindow,
    tail: TailTerm,
) -> f64 {
    let mle_var = 1.0 / fisher_information_with(model, window.boundaries(), tail);
    mle_var / asymptotic_variance(model, 1, window)
}

/// `ARE(MTuM, ungrouped MLE) = theta^2 / (g_theta'(mu)^2 Sigma_mu)`.
pub fn are_mtum_vs_ungrouped(model: &ExponentialModel, window: &TruncationWindow) -> f64 {
    model.theta().powi(2) / asymptotic_variance(model, 1, window)
}

/// One `(t, T)` cell; `are` is `None` where the window is invalid.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EfficiencyCell {
    pub t: f64,
    #[serde(rename = "T")]
    pub big_t: f64,
    pub are: Option<f64>,
    /// `F(t)`.
    pub f_t: f64,
    /// `1 - F(T)`.
    pub tail_t: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AreTable {
    pub theta: f64,
    pub boundaries: GroupBoundaries,
    pub t_list: Vec<f64>,
    #[serde(rename = "T_list")]
    pub big_t_list: Vec<f64>,
    /// Row per `t`, column per `T`.
    pub cells: Vec<Vec<EfficiencyCell>>,
}

/// Evaluates every `(t, T)` pair; cells with an invalid window are left empty.
pub fn are_table(
    model: &ExponentialModel,
    boundaries: &GroupBoundaries,
    t_list: &[f64],
    big_t_list: &[f64],
) -> AreTable {
    are_table_with(model, boundaries, t_list, big_t_list, TailTerm::Include)
}

pub fn are_table_with(
    model: &ExponentialModel,
    boundaries: &GroupBoundaries,
    t_list: &[f64],
    big_t_list: &[f64],
    tail: TailTerm,
) -> AreTable {
    let cells = t_list
        .par_iter()
        .map(|&t| {
            big_t_list
                .iter()
                .map(|&big_t| EfficiencyCell {
                    t,
                    big_t,
                    are: resolve_window(boundaries, t, big_t)
                        .ok()
                        .map(|w| are_mtum_vs_mle_with(model, &w, tail))
                        .filter(|v| v.is_finite()),
                    f_t: model.cdf(t),
                    tail_t: 1.0 - model.cdf(big_t),
                })
                .collect()
        })
        .collect();
    AreTable {
        theta: model.theta(),
        boundaries: boundaries.clone(),
        t_list: t_list.to_vec(),
        big_t_list: big_t_list.to_vec(),
        cells,
    }
}

fn prob(p: f64) -> String {
    let s = format!("{p:.2}");
    s.strip_prefix('0').map(str::to_string).unwrap_or(s)
}

impl AreTable {
    pub fn cell(&self, t: f64, big_t: f64) -> Option<&EfficiencyCell> {
        self.cells
            .iter()
            .flatten()
            .find(|c| c.t == t && c.big_t == big_t)
    }

    /// Plain-text grid with `F(t)` / `1 - F(T)` annotations; invalid cells
    /// render as `-`.
    pub fn render_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "ARE(MTuM, grouped MLE), Exp(theta = {}), G = ({})",
            self.theta, self.boundaries
        );
        let _ = write!(out, "{:>12} |", "t (F(t))");
        for big_t in &self.big_t_list {
            let head = format!("{} ({})", big_t, prob((-big_t / self.theta).exp()));
            let _ = write!(out, " {head:>11}");
        }
        out.push('\n');
        let _ = writeln!(out, "{}", "-".repeat(14 + 12 * self.big_t_list.len()));
        for row in &self.cells {
            let label = format!("{:04.1} ({})", row[0].t, prob(row[0].f_t));
            let _ = write!(out, "{label:>12} |");
            for cell in row {
                let v = cell
                    .are
                    .map_or_else(|| "-".to_string(), |a| format!("{a:.3}"));
                let _ = write!(out, " {v:>11}");
            }
            out.push('\n');
        }
        out
    }

    /// Long-form CSV `t,T,F_t,tail_T,are`; invalid cells have an empty `are`.
    pub fn render_csv(&self) -> String {
        let mut out = String::from("t,T,F_t,tail_T,are\n");
        for cell in self.cells.iter().flatten() {
            let are = cell.are.map(|a| a.to_string()).unwrap_or_default();
            let _ = writeln!(
                out,
                "{},{},{},{},{}",
                cell.t, cell.big_t, cell.f_t, cell.tail_t, are
            );
        }
        out
    }

    pub fn render_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self).map_err(|e| crate::Error::Parse(e.to_string()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn degenerate_cells_are_empty() {
        let m = ExponentialModel::new(10.0).unwrap();
        let b: GroupBoundaries = "0:5:30,inf".parse().unwrap();
        let table = are_table(&m, &b, &[0.0, 23.0], &[30.0, 23.0]);
        assert!(table.cell(23.0, 23.0).unwrap().are.is_none());
        assert!(table.cell(0.0, 30.0).unwrap().are.is_some());
        let text = table.render_text();
        assert!(text.contains("0.493"), "{text}");
        assert!(text.lines().last().unwrap().trim_end().ends_with('-'));
        let csv = table.render_csv();
        assert!(
            csv.lines()
                .any(|l| l.starts_with("23,23,") && l.ends_with(',')),
            "{csv}"
        );
        let json = table.render_json().unwrap();
        assert!(json.contains("\"are\": null"));
    }
}
