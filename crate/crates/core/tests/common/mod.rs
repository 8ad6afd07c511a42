//! Independent reference computations shared by the integration tests.
//!
//! Nothing here calls into the estimator internals: moments come from
//! numerical integration of piecewise densities, derivatives from finite
//! differences, and limits from their closed forms.

#![allow(dead_code)]

use mtum_core::{resolve_window, GroupBoundaries, TruncationWindow};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// 15-point Gauss-Kronrod rule with its embedded 7-point Gauss estimate.
fn gk15(f: &impl Fn(f64) -> f64, a: f64, b: f64) -> (f64, f64) {
    const XK: [f64; 8] = [
        0.991_455_371_120_812_6,
        0.949_107_912_342_758_5,
        0.864_864_423_359_769_1,
        0.741_531_185_599_394_4,
        0.586_087_235_467_691_1,
        0.405_845_151_377_397_2,
        0.207_784_955_007_898_5,
        0.0,
    ];
    const WK: [f64; 8] = [
        0.022_935_322_010_529_22,
        0.063_092_092_629_978_55,
        0.104_790_010_322_250_2,
        0.140_653_259_715_525_9,
        0.169_004_726_639_267_9,
        0.190_350_578_064_785_4,
        0.204_432_940_075_298_9,
        0.209_482_141_084_728,
    ];
    const WG: [f64; 4] = [
        0.129_484_966_168_869_7,
        0.279_705_391_489_276_7,
        0.381_830_050_505_118_9,
        0.417_959_183_673_469_4,
    ];
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kronrod = WK[7] * fc;
    let mut gauss = WG[3] * fc;
    for i in 0..7 {
        let x = h * XK[i];
        let s = f(c - x) + f(c + x);
        kronrod += WK[i] * s;
        if i % 2 == 1 {
            gauss += WG[i / 2] * s;
        }
    }
    (kronrod * h, ((kronrod - gauss) * h).abs())
}

/// Adaptive Gauss-Kronrod integration to absolute tolerance `tol`.
pub fn integrate(f: &impl Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    fn recurse(f: &impl Fn(f64) -> f64, a: f64, b: f64, tol: f64, depth: u32) -> f64 {
        let (value, err) = gk15(f, a, b);
        if err <= tol || depth == 0 {
            return value;
        }
        let mid = 0.5 * (a + b);
        recurse(f, a, mid, 0.5 * tol, depth - 1) + recurse(f, mid, b, 0.5 * tol, depth - 1)
    }
    if a == b {
        return 0.0;
    }
    recurse(f, a, b, tol, 40)
}

/// Integral over `[a, b]` split at `breaks`, for integrands that are smooth
/// between them.
pub fn integrate_piecewise(
    f: &impl Fn(f64) -> f64,
    a: f64,
    b: f64,
    breaks: &[f64],
    tol: f64,
) -> f64 {
    let mut points = vec![a];
    points.extend(breaks.iter().copied().filter(|&c| c > a && c < b));
    points.push(b);
    points
        .windows(2)
        .map(|w| integrate(f, w[0], w[1], tol))
        .sum()
}

/// Truncated mean `int_t^T x f(x) dx / int_t^T f(x) dx` of a density that is
/// constant on each finite group, `f = mass_j / width_j`.
pub fn truncated_mean_of_histogram(b: &GroupBoundaries, masses: &[f64], t: f64, big_t: f64) -> f64 {
    let density = |x: f64| {
        let j = b.cuts().partition_point(|&c| c < x) + 1;
        masses[j - 1] / (b.cut(j) - b.cut(j - 1))
    };
    let num = integrate_piecewise(&|x| x * density(x), t, big_t, b.cuts(), 1e-15);
    let den = integrate_piecewise(&density, t, big_t, b.cuts(), 1e-15);
    num / den
}

/// Exponential group masses `e^{-c_{j-1}/theta} - e^{-c_j/theta}` for the
/// finite groups and the open tail.
pub fn exp_masses(b: &GroupBoundaries, theta: f64) -> Vec<f64> {
    (1..=b.num_groups())
        .map(|j| (-b.cut(j - 1) / theta).exp() - (-b.cut(j) / theta).exp())
        .collect()
}

/// Closed-form large-`theta` limit of the population truncated moment.
pub fn upper_limit_closed_form(w: &TruncationWindow) -> f64 {
    let b = w.boundaries();
    let (l, r) = (w.l(), w.r());
    let mut num = w.u_l() * (b.cut(l - 1) - b.cut(l));
    for i in l + 1..=r {
        num += w.v(i) * (b.cut(i - 1) - b.cut(i));
    }
    num += w.z_r() * (b.cut(r) - b.cut(r + 1));
    let den = w.a1() * b.cut(l - 1) + w.b1() * b.cut(l) - w.a2() * b.cut(r) - w.b2() * b.cut(r + 1);
    num / den
}

/// Central first difference with one Richardson step.
pub fn derivative(f: impl Fn(f64) -> f64, x: f64, h: f64) -> f64 {
    let d = |h: f64| (f(x + h) - f(x - h)) / (2.0 * h);
    (4.0 * d(0.5 * h) - d(h)) / 3.0
}

/// Central second difference with one Richardson step.
pub fn second_derivative(f: impl Fn(f64) -> f64, x: f64, h: f64) -> f64 {
    let d2 = |h: f64| (f(x + h) - 2.0 * f(x) + f(x - h)) / (h * h);
    (4.0 * d2(0.5 * h) - d2(h)) / 3.0
}

pub fn rel_err(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
}

/// Random strictly increasing cuts: 2 to 14 groups with widths in `[0.2, 5)`.
pub fn random_boundaries(rng: &mut impl Rng) -> GroupBoundaries {
    let m = rng.random_range(2..15);
    let mut c = 0.0;
    let cuts = (0..m)
        .map(|_| {
            c += rng.random_range(0.2..5.0);
            c
        })
        .collect();
    GroupBoundaries::new(cuts).unwrap()
}

/// Random identifiable window inside the cuts. Each end is snapped to a cut
/// (or zero, for `t`) with probability 1/4.
pub fn random_window(rng: &mut impl Rng, b: &GroupBoundaries) -> TruncationWindow {
    let last = b.last_cut();
    loop {
        let (mut t, mut big_t) = (rng.random_range(0.0..last), rng.random_range(0.0..last));
        if t > big_t {
            std::mem::swap(&mut t, &mut big_t);
        }
        if rng.random_bool(0.25) {
            big_t = b.cut(rng.random_range(1..=b.num_cuts()));
        }
        if rng.random_bool(0.25) {
            t = b.cut(rng.random_range(0..b.num_cuts()));
        }
        if let Ok(w) = resolve_window(b, t, big_t) {
            return w;
        }
    }
}

/// Random window whose endpoints fall in the same or adjacent groups
/// (`l = r`).
pub fn random_consecutive_window(rng: &mut impl Rng, b: &GroupBoundaries) -> TruncationWindow {
    loop {
        let w = random_window(rng, b);
        if w.is_consecutive() {
            return w;
        }
        let j = rng.random_range(1..b.num_cuts());
        let t = rng.random_range(b.cut(j - 1)..b.cut(j));
        let big_t = rng.random_range(b.cut(j)..b.cut(j + 1));
        if let Ok(w) = resolve_window(b, t, big_t) {
            if w.is_consecutive() {
                return w;
            }
        }
    }
}

/// Inverse-cdf exponential draw.
pub fn exp_draw(rng: &mut impl Rng, theta: f64) -> f64 {
    let u: f64 = rng.random_range(f64::EPSILON..1.0);
    -theta * u.ln()
}

/// Kolmogorov-Smirnov distance between a sample and a continuous cdf.
pub fn ks_distance(mut xs: Vec<f64>, cdf: impl Fn(f64) -> f64) -> f64 {
    xs.sort_by(f64::total_cmp);
    let n = xs.len() as f64;
    xs.iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            (f - i as f64 / n).abs().max(((i + 1) as f64 / n - f).abs())
        })
        .fold(0.0, f64::max)
}

/// Asymptotic 1% critical value of the one-sample KS statistic.
pub fn ks_critical_1pct(n: usize) -> f64 {
    1.6276 / (n as f64).sqrt()
}
