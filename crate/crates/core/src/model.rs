//! Exponential severity model, the Pareto I bridge, and the linearized cdf.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grouped::GroupBoundaries;

/// `Exp(theta)` with mean `theta`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExponentialModel {
    theta: f64,
}

impl ExponentialModel {
    pub fn new(theta: f64) -> Result<Self> {
        if !(theta.is_finite() && theta > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "theta = {theta} must be positive"
            )));
        }
        Ok(Self { theta })
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    /// `1 - exp(-x / theta)`; zero for `x <= 0`.
    pub fn cdf(&self, x: f64) -> f64 {
        if x <= 0.0 {
            0.0
        } else {
            -(-x / self.theta).exp_m1()
        }
    }

    /// `exp(-x / theta)`; one for `x <= 0`.
    pub fn survival(&self, x: f64) -> f64 {
        if x <= 0.0 {
            1.0
        } else {
            (-x / self.theta).exp()
        }
    }

    pub fn pdf(&self, x: f64) -> f64 {
        if x < 0.0 {
            0.0
        } else {
            (-x / self.theta).exp() / self.theta
        }
    }

    /// `-theta * ln(1 - s)`.
    pub fn quantile(&self, s: f64) -> f64 {
        -self.theta * (-s).ln_1p()
    }

    /// Probability `P_j = F(c_j) - F(c_{j-1})` of the interval `(lo, hi]`.
    pub fn interval_probability(&self, lo: f64, hi: f64) -> f64 {
        if hi.is_infinite() {
            return self.survival(lo);
        }
        self.survival(lo) * -(-(hi - lo) / self.theta).exp_m1()
    }

    /// Linearized population cdf: `F(.|theta)` interpolated between cuts,
    /// exact beyond the last cut.
    pub fn linearized_cdf(&self, boundaries: &GroupBoundaries, x: f64) -> f64 {
        if x <= 0.0 {
            return 0.0;
        }
        if x > boundaries.last_cut() {
            return self.cdf(x);
        }
        let j = boundaries.group_of(x);
        let (lo, hi) = (boundaries.cut(j - 1), boundaries.cut(j));
        let w = hi - lo;
        (hi - x) / w * self.cdf(lo) + (x - lo) / w * self.cdf(hi)
    }

    /// Inverse of [`linearized_cdf`](Self::linearized_cdf) on `(0, 1)`.
    pub fn linearized_quantile(&self, boundaries: &GroupBoundaries, s: f64) -> Result<f64> {
        if !(s > 0.0 && s < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "level {s} must lie in (0, 1)"
            )));
        }
        let m = boundaries.num_cuts();
        if s > self.cdf(boundaries.last_cut()) {
            return Ok(self.quantile(s));
        }
        let j = (1..=m)
            .find(|&j| s <= self.cdf(boundaries.cut(j)))
            .expect("s <= F(c_m)");
        let (lo, hi) = (boundaries.cut(j - 1), boundaries.cut(j));
        let (f_lo, f_hi) = (self.cdf(lo), self.cdf(hi));
        if s == f_hi {
            return Ok(hi);
        }
        Ok(lo + (hi - lo) * (s - f_lo) / (f_hi - f_lo))
    }
}

/// Free-function form of [`ExponentialModel::cdf`].
pub fn exp_cdf(model: &ExponentialModel, x: f64) -> f64 {
    model.cdf(x)
}

/// Single-parameter Pareto with known threshold `x0` and tail index `alpha`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ParetoModel {
    alpha: f64,
    x0: f64,
}

impl ParetoModel {
    pub fn new(alpha: f64, x0: f64) -> Result<Self> {
        if !(alpha.is_finite() && alpha > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "alpha = {alpha} must be positive"
            )));
        }
        if !(x0.is_finite() && x0 > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "x0 = {x0} must be positive"
            )));
        }
        Ok(Self { alpha, x0 })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn x0(&self) -> f64 {
        self.x0
    }

    /// `1 - (x0 / y)^alpha` for `y > x0`.
    pub fn cdf(&self, y: f64) -> f64 {
        if y <= self.x0 {
            0.0
        } else {
            -(self.alpha * (self.x0 / y).ln()).exp_m1()
        }
    }

    /// The exponential law of `ln(Y / x0)`, mean `1 / alpha`.
    pub fn to_exponential(&self) -> ExponentialModel {
        ExponentialModel {
            theta: 1.0 / self.alpha,
        }
    }

    /// `ln(y / x0)`; an exponential observation with mean `1 / alpha`.
    pub fn to_exp(&self, y: f64) -> Result<f64> {
        pareto_to_exp(y, self.x0)
    }
}

/// `ln(y / x0)` for `y > x0`.
pub fn pareto_to_exp(y: f64, x0: f64) -> Result<f64> {
    if !(y > x0) {
        return Err(Error::BelowThreshold { y, x0 });
    }
    Ok((y / x0).ln())
}
