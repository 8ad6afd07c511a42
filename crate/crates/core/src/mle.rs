//! Grouped maximum likelihood for the exponential mean.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grouped::{GroupBoundaries, GroupedSample};
use crate::model::ExponentialModel;
use crate::numeric::{brent_minimize, brent_root};

const THETA_MIN: f64 = 1e-8;
const THETA_MAX: f64 = 1e8;

/// Whether the open group `(c_m, inf)` contributes to the Fisher information.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum TailTerm {
    #[default]
    Include,
    Exclude,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MleEstimate {
    pub theta_hat: f64,
    /// `I(theta_hat)^-1 / n`.
    pub asymptotic_variance: f64,
    pub iterations: usize,
    /// Score `d loglik / d theta` at the estimate.
    pub score: f64,
}

impl MleEstimate {
    pub fn standard_error(&self) -> f64 {
        self.asymptotic_variance.sqrt()
    }
}

/// `ln P_j(theta)` for group `j` (1-based), computed without cancellation.
fn log_group_probability(boundaries: &GroupBoundaries, j: usize, theta: f64) -> f64 {
    let lo = boundaries.cut(j - 1);
    let hi = boundaries.cut(j);
    if hi.is_infinite() {
        -lo / theta
    } else {
        -lo / theta + (-(-(hi - lo) / theta).exp_m1()).ln()
    }
}

/// `d ln P_j / d theta`.
fn group_score(boundaries: &GroupBoundaries, j: usize, theta: f64) -> f64 {
    let lo = boundaries.cut(j - 1);
    let hi = boundaries.cut(j);
    let th2 = theta * theta;
    if hi.is_infinite() {
        return lo / th2;
    }
    let decay = (-(hi - lo) / theta).exp();
    (lo - hi * decay) / (th2 * -(-(hi - lo) / theta).exp_m1())
}

/// Multinomial log-likelihood `sum_j n_j ln P_j(theta)`.
pub fn log_likelihood(sample: &GroupedSample, theta: f64) -> f64 {
    let b = sample.boundaries();
    sample
        .counts()
        .iter()
        .enumerate()
        .filter(|(_, &n)| n > 0)
        .map(|(idx, &n)| n as f64 * log_group_probability(b, idx + 1, theta))
        .sum()
}

/// `d loglik / d theta`.
pub fn score(sample: &GroupedSample, theta: f64) -> f64 {
    let b = sample.boundaries();
    sample
        .counts()
        .iter()
        .enumerate()
        .filter(|(_, &n)| n > 0)
        .map(|(idx, &n)| n as f64 * group_score(b, idx + 1, theta))
        .sum()
}

/// Grouped MLE of `theta` over `[1e-8, 1e8]`.
///
/// A coarse log-spaced scan brackets the maximum, Brent's minimizer locates
/// it in `ln theta`, and the score root is then polished inside the bracket.
pub fn mle_estimate(sample: &GroupedSample) -> Result<MleEstimate> {
    let occupied = sample.counts().iter().filter(|&&n| n > 0).count();
    if occupied < 2 {
        return Err(Error::NonIdentifiable);
    }
    let neg_ll = |phi: f64| {
        let v = -log_likelihood(sample, phi.exp());
        if v.is_nan() {
            f64::INFINITY
        } else {
            v
        }
    };

    let (phi_min, phi_max) = (THETA_MIN.ln(), THETA_MAX.ln());
    let steps = 64;
    let grid: Vec<f64> = (0..=steps)
        .map(|k| phi_min + (phi_max - phi_min) * k as f64 / steps as f64)
        .collect();
    let values: Vec<f64> = grid.iter().map(|&phi| neg_ll(phi)).collect();
    let best = values
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .map(|(i, _)| i)
        .expect("non-empty grid");
    if best == 0 || best == steps {
        return Err(Error::SolverFailure(format!(
            "log-likelihood has no interior maximum in [{THETA_MIN}, {THETA_MAX}]"
        )));
    }
    let (lo, hi) = (grid[best - 1], grid[best + 1]);
    let coarse = brent_minimize(neg_ll, lo, hi, 0.0, 1e-12, 200);

    // The optimum is only located to ~sqrt(eps) by function values; the score
    // pins it down to machine precision.
    let score_phi = |phi: f64| score(sample, phi.exp());
    let polished = brent_root(score_phi, lo, hi, 0.0, 200);
    let (phi_hat, iterations) = match polished {
        Some(sol) => (sol.x, coarse.iterations + sol.iterations),
        None => (coarse.x, coarse.iterations),
    };
    let theta_hat = phi_hat.exp();
    let model = ExponentialModel::new(theta_hat)?;
    let info = fisher_information(&model, sample.boundaries());
    Ok(MleEstimate {
        theta_hat,
        asymptotic_variance: 1.0 / (info * sample.n() as f64),
        iterations,
        score: score(sample, theta_hat),
    })
}

/// Fisher information per observation of the grouped exponential model,
/// including the open tail group.
pub fn fisher_information(model: &ExponentialModel, boundaries: &GroupBoundaries) -> f64 {
    fisher_information_with(model, boundaries, TailTerm::Include)
}

/// `sum_j (c_{j-1} e^{-c_{j-1}/theta} - c_j e^{-c_j/theta})^2 / (theta^4 P_j)`.
///
/// Each term is evaluated as `e^{-c_{j-1}/theta} (c_{j-1} - c_j e^{-w/theta})^2
/// / (theta^4 (1 - e^{-w/theta}))` so far-tail groups underflow to zero
/// instead of `0/0`.
pub fn fisher_information_with(
    model: &ExponentialModel,
    boundaries: &GroupBoundaries,
    tail: TailTerm,
) -> f64 {
    let theta = model.theta();
    let th4 = theta.powi(4);
    let m = boundaries.num_cuts();
    let mut info = 0.0;
    for j in 1..=m {
        let (lo, hi) = (boundaries.cut(j - 1), boundaries.cut(j));
        let w = hi - lo;
        let lead = (-lo / theta).exp();
        if lead == 0.0 {
            break;
        }
        let diff = lo - hi * (-w / theta).exp();
        info += lead * diff * diff / (th4 * -(-w / theta).exp_m1());
    }
    if tail == TailTerm::Include {
        let c_m = boundaries.last_cut();
        info += c_m * c_m * (-c_m / theta).exp() / th4;
    }
    info
}

/// Variance `theta^2 / n` of the MLE from ungrouped data.
pub fn ungrouped_mle_variance(model: &ExponentialModel, sample_size: u64) -> f64 {
    model.theta().powi(2) / sample_size as f64
}

/// `ARE(grouped MLE, ungrouped MLE) = theta^2 I(theta)`.
pub fn grouping_efficiency(model: &ExponentialModel, boundaries: &GroupBoundaries) -> f64 {
    model.theta().powi(2) * fisher_information(model, boundaries)
}
