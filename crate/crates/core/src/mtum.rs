//! Method of truncated moments for grouped exponential data.
//!
//! The sample statistic is the truncated mean of the ogive over `[t, T]`,
//!
//! ```text
//! mu_hat = N / H,  N = sum_i w_i (p_{i,n} - p_{i-1,n}),  H = F_n(T) - F_n(t),
//! ```
//!
//! where `w_i` is `u_l`, the midpoint `v_i` or `z_r` depending on whether
//! group `i` holds `t`, lies strictly inside, or holds `T`. The population
//! counterpart `g_tT(theta)` replaces `p_{j,n}` by `F(c_j | theta)`, and the
//! estimate solves `g_tT(theta) = mu_hat`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grouped::{GroupBoundaries, GroupedSample};
use crate::model::ExponentialModel;
use crate::numeric::brent_root;
use crate::window::TruncationWindow;

/// `(N, H)` from per-group masses over the window's groups.
fn numerator_denominator(window: &TruncationWindow, mass: impl Fn(usize) -> f64) -> (f64, f64) {
    let mut num = 0.0;
    let mut den = 0.0;
    for i in window.groups() {
        // t = c_l leaves group l with zero weight in both sums.
        if window.mass_weight(i) == 0.0 {
            continue;
        }
        let q = mass(i);
        num += window.numerator_weight(i) * q;
        den += window.mass_weight(i) * q;
    }
    (num, den)
}

/// `g_mu(p_1, ..., p_m)`: the truncated moment as a function of the cdf at
/// the cuts. `p` is indexed `0..=m` with `p[0] = 0`.
pub fn moment_from_cdf(window: &TruncationWindow, p: &[f64]) -> f64 {
    let (num, den) = numerator_denominator(window, |i| p[i] - p[i - 1]);
    num / den
}

/// Sample truncated moment `mu_hat` of a grouped sample.
pub fn sample_truncated_moment(sample: &GroupedSample, window: &TruncationWindow) -> Result<f64> {
    if sample.boundaries() != window.boundaries() {
        return Err(Error::InvalidParameter(
            "window was resolved against different group boundaries".into(),
        ));
    }
    let n = sample.n() as f64;
    let (num, den) = numerator_denominator(window, |i| sample.count(i) as f64 / n);
    if !(den > 0.0) {
        return Err(Error::EmptyWindow);
    }
    Ok(num / den)
}

/// Population truncated moment `g_tT(theta)` under the linearized cdf.
///
/// Group masses are rescaled by `exp(c / theta)`, with `c` the left edge of
/// the first group carrying weight (`c_{l-1}`, or `c_l` when `t = c_l`). This
/// leaves the ratio unchanged and keeps it finite as `theta -> 0`.
pub fn population_truncated_moment(model: &ExponentialModel, window: &TruncationWindow) -> f64 {
    let b = window.boundaries();
    let theta = model.theta();
    let origin = if window.a1() > 0.0 {
        b.cut(window.l() - 1)
    } else {
        b.cut(window.l())
    };
    let (num, den) = numerator_denominator(window, |i| {
        let (lo, hi) = (b.cut(i - 1), b.cut(i));
        (-(lo - origin) / theta).exp() * -(-(hi - lo) / theta).exp_m1()
    });
    num / den
}

fn g_tt(window: &TruncationWindow, theta: f64) -> f64 {
    population_truncated_moment(
        &ExponentialModel::new(theta).expect("positive theta"),
        window,
    )
}

/// Gradient `D_mu = (dg_mu/dp_1, ..., dg_mu/dp_m)` at `p` (indexed `0..=m`).
///
/// Only entries `l-1..=r+1` are non-zero. When `l = 1` the `p_0` entry is
/// identically zero and has no slot in the vector.
pub fn moment_gradient(window: &TruncationWindow, p: &[f64]) -> Vec<f64> {
    let b = window.boundaries();
    let m = b.num_cuts();
    let (l, r) = (window.l(), window.r());
    let (a1, b1, a2, b2) = (window.a1(), window.b1(), window.a2(), window.b2());
    let (u, z) = (window.u_l(), window.z_r());

    let mut num = u * (p[l] - p[l - 1]);
    for i in l + 1..=r {
        num += window.v(i) * (p[i] - p[i - 1]);
    }
    num += z * (p[r + 1] - p[r]);
    let h = a2 * p[r] + b2 * p[r + 1] - a1 * p[l - 1] - b1 * p[l];
    let h2 = h * h;

    let mut grad = vec![0.0; m];
    let mut set = |j: usize, value: f64| {
        if j >= 1 {
            grad[j - 1] = value;
        }
    };
    set(l - 1, (-u * h + a1 * num) / h2);
    if l < r {
        set(l, ((u - window.v(l + 1)) * h + b1 * num) / h2);
        for j in l + 1..r {
            set(j, (b.cut(j - 1) - b.cut(j + 1)) / (2.0 * h));
        }
        set(r, ((window.v(r) - z) * h - a2 * num) / h2);
        set(r + 1, (z * h - b2 * num) / h2);
    } else {
        set(l, ((u - z) * h - (a2 - b1) * num) / h2);
        set(l + 1, (z * h - b2 * num) / h2);
    }
    grad
}

/// Asymptotic covariance of `(F_n(c_1), ..., F_n(c_m))`, scaled by `n`:
/// `sigma_jk = F(c_j)(1 - F(c_k))` for `j <= k`.
#[derive(Debug, Clone, PartialEq)]
pub struct CovarianceMatrix {
    dim: usize,
    entries: Vec<f64>,
}

impl CovarianceMatrix {
    pub fn new(model: &ExponentialModel, boundaries: &GroupBoundaries) -> Self {
        let p: Vec<f64> = boundaries.cuts().iter().map(|&c| model.cdf(c)).collect();
        let dim = p.len();
        let mut entries = vec![0.0; dim * dim];
        for j in 0..dim {
            for k in 0..dim {
                let (lo, hi) = if j <= k { (j, k) } else { (k, j) };
                entries[j * dim + k] = p[lo] * (1.0 - p[hi]);
            }
        }
        Self { dim, entries }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// `sigma_jk` with 1-based indices.
    pub fn get(&self, j: usize, k: usize) -> f64 {
        self.entries[(j - 1) * self.dim + (k - 1)]
    }

    /// `d' Sigma d`.
    pub fn quadratic_form(&self, d: &[f64]) -> f64 {
        assert_eq!(d.len(), self.dim);
        let mut total = 0.0;
        for j in 0..self.dim {
            if d[j] == 0.0 {
                continue;
            }
            let row = &self.entries[j * self.dim..(j + 1) * self.dim];
            total += d[j] * row.iter().zip(d).map(|(s, dk)| s * dk).sum::<f64>();
        }
        total
    }
}

/// `d' Sigma d` in `O(m)` using the `min/max` structure of the covariance.
/// `p` holds `F(c_j)` indexed `0..=m`.
fn structured_quadratic_form(p: &[f64], d: &[f64]) -> f64 {
    let mut total = 0.0;
    let mut prefix = 0.0;
    for (k, &dk) in d.iter().enumerate() {
        let pk = p[k + 1];
        total += dk * dk * pk * (1.0 - pk) + 2.0 * dk * (1.0 - pk) * prefix;
        prefix += dk * pk;
    }
    total
}

/// `Sigma_mu = D_mu Sigma D_mu'`, the asymptotic variance of `sqrt(n) mu_hat`.
pub fn moment_variance(model: &ExponentialModel, window: &TruncationWindow) -> f64 {
    let p = cdf_at_cuts(model, window.boundaries());
    let d = moment_gradient(window, &p);
    structured_quadratic_form(&p, &d)
}

fn cdf_at_cuts(model: &ExponentialModel, boundaries: &GroupBoundaries) -> Vec<f64> {
    std::iter::once(0.0)
        .chain(boundaries.cuts().iter().map(|&c| model.cdf(c)))
        .collect()
}

/// Derivative of the inverse map `theta = g_theta(mu)` at `theta`, by
/// implicit differentiation of `mu H*(theta) = N*(theta)`.
pub fn dtheta_dmu(model: &ExponentialModel, window: &TruncationWindow, mu: f64) -> f64 {
    let b = window.boundaries();
    let theta = model.theta();
    let th2 = theta * theta;
    let (l, r) = (window.l(), window.r());
    let (a1, b1, a2, b2) = (window.a1(), window.b1(), window.a2(), window.b2());
    let e = |j: usize| (-b.cut(j) / theta).exp();
    let ce = |j: usize| b.cut(j) * e(j);

    let big_a = a2 + b2 - a1 - b1;
    let big_b = a2 * e(r) + b2 * e(r + 1) - a1 * e(l - 1) - b1 * e(l);
    let lambda =
        window.u_l() / th2 * (ce(l - 1) - ce(l)) + window.z_r() / th2 * (ce(r) - ce(r + 1));
    let delta = mu / th2 * (a2 * ce(r) + b2 * ce(r + 1) - a1 * ce(l - 1) - b1 * ce(l));
    if window.is_consecutive() {
        (big_a - big_b) / (lambda + delta)
    } else {
        let gamma = lambda
            + (l + 1..=r)
                .map(|i| window.v(i) / th2 * (ce(i - 1) - ce(i)))
                .sum::<f64>();
        (big_a - big_b) / (gamma + delta)
    }
}

/// Delta-method variance of `theta_hat` at sample size `n`:
/// `g_theta'(mu)^2 D_mu Sigma D_mu' / n`.
pub fn asymptotic_variance(
    model: &ExponentialModel,
    sample_size: u64,
    window: &TruncationWindow,
) -> f64 {
    let mu = population_truncated_moment(model, window);
    let slope = dtheta_dmu(model, window, mu);
    slope * slope * moment_variance(model, window) / sample_size as f64
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SolverKind {
    FixedPoint,
    Bracketed,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverOptions {
    /// Accept when `|g_tT(theta) - mu| <= rel_tol * max(1, mu)`.
    pub rel_tol: f64,
    pub max_iter: usize,
    pub theta_min: f64,
    pub theta_max: f64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            rel_tol: 1e-10,
            max_iter: 200,
            theta_min: 1e-8,
            theta_max: 1e8,
        }
    }
}

/// Solution of `g_tT(theta) = mu`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Inversion {
    pub theta: f64,
    pub solver: SolverKind,
    pub iterations: usize,
    pub residual: f64,
    /// The bracket scan saw `g_tT` decrease somewhere.
    pub non_monotone: bool,
}

/// Point estimate with delta-method variance and solver diagnostics.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MtumEstimate {
    pub theta_hat: f64,
    pub mu_hat: f64,
    /// Variance of `theta_hat` at the sample's size, with `Sigma` evaluated
    /// at the plug-in `theta_hat`.
    pub asymptotic_variance: f64,
    pub solver: SolverKind,
    pub iterations: usize,
    pub residual: f64,
    pub non_monotone: bool,
}

impl MtumEstimate {
    pub fn standard_error(&self) -> f64 {
        self.asymptotic_variance.sqrt()
    }
}

fn check_existence(window: &TruncationWindow, mu: f64) -> Result<()> {
    let (lower, upper) = (window.lower_limit(), window.upper_limit());
    if !(mu > lower && mu < upper) {
        return Err(Error::NoSolution { mu, lower, upper });
    }
    Ok(())
}

fn starting_point(mu: f64, start: Option<f64>, opts: &SolverOptions) -> f64 {
    start.unwrap_or(mu).clamp(opts.theta_min, opts.theta_max)
}

fn tolerance(mu: f64, opts: &SolverOptions) -> f64 {
    opts.rel_tol * mu.abs().max(1.0)
}

/// Iterates `theta <- G(theta) = -c_r / ln((mu A2 - P + mu Q) / (mu A2))`.
///
/// Fails if `T` is a cut (`A2 = 0`), if the log argument leaves `(0, 1)`,
/// or if the iteration does not settle within the budget.
pub fn invert_fixed_point(
    window: &TruncationWindow,
    mu: f64,
    start: Option<f64>,
    opts: &SolverOptions,
) -> Result<Inversion> {
    check_existence(window, mu)?;
    let a2 = window.a2();
    if a2 <= 0.0 {
        return Err(Error::SolverFailure(
            "fixed point needs A2 > 0 (T is a cut)".into(),
        ));
    }
    let b = window.boundaries();
    let (l, r) = (window.l(), window.r());
    let c_r = b.cut(r);
    let mut theta = starting_point(mu, start, opts);
    for iter in 1..=opts.max_iter {
        let e = |j: usize| (-b.cut(j) / theta).exp();
        let mut p = window.u_l() * (e(l - 1) - e(l));
        for i in l + 1..=r {
            p += window.v(i) * (e(i - 1) - e(i));
        }
        p += window.z_r() * (e(r) - e(r + 1));
        let q = window.b2() * (1.0 - e(r + 1))
            - window.a1() * (1.0 - e(l - 1))
            - window.b1() * (1.0 - e(l));
        let arg = (mu * a2 - p + mu * q) / (mu * a2);
        if !(arg > 0.0 && arg < 1.0) {
            return Err(Error::SolverFailure(format!(
                "fixed-point log argument {arg} left (0, 1) at theta = {theta}"
            )));
        }
        let next = -c_r / arg.ln();
        if !(next >= opts.theta_min && next <= opts.theta_max) {
            return Err(Error::SolverFailure(format!(
                "fixed-point iterate {next} left the search domain"
            )));
        }
        let step = (next - theta).abs();
        theta = next;
        if step <= 4.0 * f64::EPSILON * theta {
            let residual = (g_tt(window, theta) - mu).abs();
            if residual <= tolerance(mu, opts) {
                return Ok(Inversion {
                    theta,
                    solver: SolverKind::FixedPoint,
                    iterations: iter,
                    residual,
                    non_monotone: false,
                });
            }
            return Err(Error::SolverFailure(format!(
                "fixed point stalled at theta = {theta} with residual {residual}"
            )));
        }
    }
    Err(Error::SolverFailure(format!(
        "fixed point did not converge in {} iterations",
        opts.max_iter
    )))
}

/// Expands a bracket geometrically from the start point, then runs Brent's
/// method on `g_tT(theta) - mu`.
pub fn invert_bracketed(
    window: &TruncationWindow,
    mu: f64,
    start: Option<f64>,
    opts: &SolverOptions,
) -> Result<Inversion> {
    check_existence(window, mu)?;
    let h = |theta: f64| g_tt(window, theta) - mu;
    let theta0 = starting_point(mu, start, opts);
    let mut evals = 1;
    let mut non_monotone = false;
    let h0 = h(theta0);
    let (mut lo, mut hi) = (theta0, theta0);
    if h0 < 0.0 {
        let mut h_prev = h0;
        loop {
            if hi >= opts.theta_max {
                return Err(Error::SolverFailure(format!(
                    "no sign change below theta = {}; estimate exceeds the search domain",
                    opts.theta_max
                )));
            }
            lo = hi;
            hi = (hi * 2.0).min(opts.theta_max);
            let h_hi = h(hi);
            evals += 1;
            non_monotone |= h_hi < h_prev;
            if h_hi >= 0.0 {
                break;
            }
            h_prev = h_hi;
        }
    } else if h0 > 0.0 {
        let mut h_prev = h0;
        loop {
            if lo <= opts.theta_min {
                return Err(Error::SolverFailure(format!(
                    "no sign change above theta = {}; estimate below the search domain",
                    opts.theta_min
                )));
            }
            hi = lo;
            lo = (lo * 0.5).max(opts.theta_min);
            let h_lo = h(lo);
            evals += 1;
            non_monotone |= h_lo > h_prev;
            if h_lo <= 0.0 {
                break;
            }
            h_prev = h_lo;
        }
    }
    let sol = brent_root(h, lo, hi, 0.0, opts.max_iter)
        .ok_or_else(|| Error::SolverFailure(format!("Brent iteration failed on [{lo}, {hi}]")))?;
    let residual = sol.fx.abs();
    if residual > tolerance(mu, opts) {
        return Err(Error::SolverFailure(format!(
            "bracketed solve ended at theta = {} with residual {residual}",
            sol.x
        )));
    }
    Ok(Inversion {
        theta: sol.x,
        solver: SolverKind::Bracketed,
        iterations: evals + sol.iterations,
        residual,
        non_monotone,
    })
}

/// Solves `g_tT(theta) = mu`: the fixed point when `A2 > 0`, falling back to
/// the bracketed search.
pub fn invert_moment(
    window: &TruncationWindow,
    mu: f64,
    start: Option<f64>,
    opts: &SolverOptions,
) -> Result<Inversion> {
    check_existence(window, mu)?;
    if window.a2() > 0.0 {
        if let Ok(inv) = invert_fixed_point(window, mu, start, opts) {
            return Ok(inv);
        }
    }
    invert_bracketed(window, mu, start, opts)
}

/// Point estimate only (no variance), for simulation loops.
pub fn estimate_theta(
    sample: &GroupedSample,
    window: &TruncationWindow,
    hint: Option<f64>,
    opts: &SolverOptions,
) -> Result<Inversion> {
    let mu = sample_truncated_moment(sample, window)?;
    invert_moment(window, mu, hint, opts)
}

/// Estimates `theta` with default solver settings.
pub fn solve(
    sample: &GroupedSample,
    window: &TruncationWindow,
    model_hint: Option<f64>,
) -> Result<MtumEstimate> {
    solve_with(sample, window, model_hint, &SolverOptions::default())
}

pub fn solve_with(
    sample: &GroupedSample,
    window: &TruncationWindow,
    model_hint: Option<f64>,
    opts: &SolverOptions,
) -> Result<MtumEstimate> {
    let mu_hat = sample_truncated_moment(sample, window)?;
    let inv = invert_moment(window, mu_hat, model_hint, opts)?;
    let fitted = ExponentialModel::new(inv.theta)?;
    Ok(MtumEstimate {
        theta_hat: inv.theta,
        mu_hat,
        asymptotic_variance: asymptotic_variance(&fitted, sample.n(), window),
        solver: inv.solver,
        iterations: inv.iterations,
        residual: inv.residual,
        non_monotone: inv.non_monotone,
    })
}
