//! Truncation window `[t, T]` resolved against the group boundaries.

use crate::error::{Error, Result};
use crate::grouped::GroupBoundaries;

/// A validated truncation window and its interpolation coefficients.
///
/// Indices are 1-based group numbers: `t` lies in group `l`, i.e.
/// `c_{l-1} < t <= c_l` (with `t = 0` placed in group 1), and
/// `c_r < T <= c_{r+1}`. Validity requires `l <= r`.
#[derive(Debug, Clone, PartialEq)]
pub struct TruncationWindow {
    boundaries: GroupBoundaries,
    left: f64,
    right: f64,
    l: usize,
    r: usize,
    a1: f64,
    b1: f64,
    a2: f64,
    b2: f64,
    u_l: f64,
    z_r: f64,
}

/// Resolves `(t, T)` into a [`TruncationWindow`].
///
/// Requires `0 <= t < T <= c_m` and that the two points do not share a group.
pub fn resolve_window(
    boundaries: &GroupBoundaries,
    t: f64,
    big_t: f64,
) -> Result<TruncationWindow> {
    if !(t.is_finite() && big_t.is_finite()) || t < 0.0 || t >= big_t {
        return Err(Error::InvalidWindow(format!(
            "need 0 <= t < T, got t = {t}, T = {big_t}"
        )));
    }
    let last_cut = boundaries.last_cut();
    if big_t > last_cut {
        return Err(Error::WindowBeyondCuts {
            right: big_t,
            last_cut,
        });
    }
    let l = if t == 0.0 { 1 } else { boundaries.group_of(t) };
    let r = boundaries.group_of(big_t) - 1;
    // r = l - 1: same group. t = c_l with T <= c_{l+1}: both in [c_l, c_{l+1}].
    if r < l || (r == l && t == boundaries.cut(l)) {
        return Err(Error::NonIdentifiableWindow {
            left: t,
            right: big_t,
        });
    }

    let (c_lm1, c_l) = (boundaries.cut(l - 1), boundaries.cut(l));
    let (c_r, c_rp1) = (boundaries.cut(r), boundaries.cut(r + 1));
    let w_l = c_l - c_lm1;
    let w_r = c_rp1 - c_r;
    Ok(TruncationWindow {
        boundaries: boundaries.clone(),
        left: t,
        right: big_t,
        l,
        r,
        a1: (c_l - t) / w_l,
        b1: (t - c_lm1) / w_l,
        a2: (c_rp1 - big_t) / w_r,
        b2: (big_t - c_r) / w_r,
        u_l: (c_l * c_l - t * t) / (2.0 * w_l),
        z_r: (big_t * big_t - c_r * c_r) / (2.0 * w_r),
    })
}

impl TruncationWindow {
    pub fn boundaries(&self) -> &GroupBoundaries {
        &self.boundaries
    }

    /// Left truncation point `t`.
    pub fn left(&self) -> f64 {
        self.left
    }

    /// Right truncation point `T`.
    pub fn right(&self) -> f64 {
        self.right
    }

    pub fn l(&self) -> usize {
        self.l
    }

    pub fn r(&self) -> usize {
        self.r
    }

    /// `(c_l - t) / (c_l - c_{l-1})`, weight of `F(c_{l-1})` in `F(t)`.
    pub fn a1(&self) -> f64 {
        self.a1
    }

    pub fn b1(&self) -> f64 {
        self.b1
    }

    /// `(c_{r+1} - T) / (c_{r+1} - c_r)`, weight of `F(c_r)` in `F(T)`.
    pub fn a2(&self) -> f64 {
        self.a2
    }

    pub fn b2(&self) -> f64 {
        self.b2
    }

    /// `(c_l^2 - t^2) / (2 (c_l - c_{l-1}))`.
    pub fn u_l(&self) -> f64 {
        self.u_l
    }

    /// `(T^2 - c_r^2) / (2 (c_{r+1} - c_r))`.
    pub fn z_r(&self) -> f64 {
        self.z_r
    }

    /// Midpoint `v_i = (c_i + c_{i-1}) / 2` of group `i`.
    pub fn v(&self, i: usize) -> f64 {
        0.5 * (self.boundaries.cut(i) + self.boundaries.cut(i - 1))
    }

    /// `l == r`: the two truncation points sit in consecutive groups.
    pub fn is_consecutive(&self) -> bool {
        self.l == self.r
    }

    /// `T` sits exactly on a cut, so `A2 = 0` and the fixed-point map is unusable.
    pub fn right_on_cut(&self) -> bool {
        self.a2 == 0.0
    }

    /// Weight of group `i`'s probability mass in the window's numerator,
    /// i.e. the integral of `x` over the part of group `i` inside the window
    /// divided by the group width.
    pub(crate) fn numerator_weight(&self, i: usize) -> f64 {
        if i == self.l {
            self.u_l
        } else if i == self.r + 1 {
            self.z_r
        } else {
            self.v(i)
        }
    }

    /// Fraction of group `i` covered by the window.
    pub(crate) fn mass_weight(&self, i: usize) -> f64 {
        if i == self.l {
            self.a1
        } else if i == self.r + 1 {
            self.b2
        } else {
            1.0
        }
    }

    /// Groups touched by the window, `l..=r+1`.
    pub(crate) fn groups(&self) -> std::ops::RangeInclusive<usize> {
        self.l..=self.r + 1
    }

    /// Limit of the population truncated moment as `theta -> 0+`: `u_l / A1`.
    ///
    /// When `t = c_l` exactly, `u_l = A1 = 0` and the first group with
    /// positive coverage is `l + 1`, whose limit is its midpoint.
    pub fn lower_limit(&self) -> f64 {
        if self.a1 > 0.0 {
            self.u_l / self.a1
        } else {
            self.v(self.l + 1)
        }
    }

    /// Limit of the population truncated moment as `theta -> inf`.
    pub fn upper_limit(&self) -> f64 {
        let b = &self.boundaries;
        let (l, r) = (self.l, self.r);
        let mut num = self.u_l * (b.cut(l - 1) - b.cut(l));
        for i in l + 1..=r {
            num += self.v(i) * (b.cut(i - 1) - b.cut(i));
        }
        num += self.z_r * (b.cut(r) - b.cut(r + 1));
        let den = self.a1 * b.cut(l - 1) + self.b1 * b.cut(l)
            - self.a2 * b.cut(r)
            - self.b2 * b.cut(r + 1);
        num / den
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn cuts_0_5_25() -> GroupBoundaries {
        "0:5:25".parse().unwrap()
    }

    #[test]
    fn coefficients_example() {
        let w = resolve_window(&cuts_0_5_25(), 2.0, 12.0).unwrap();
        assert_eq!((w.l(), w.r()), (1, 2));
        assert_relative_eq!(w.a1(), 0.6, max_relative = 1e-15);
        assert_relative_eq!(w.b1(), 0.4, max_relative = 1e-15);
        assert_relative_eq!(w.a2(), 0.6, max_relative = 1e-15);
        assert_relative_eq!(w.b2(), 0.4, max_relative = 1e-15);
        assert_relative_eq!(w.u_l(), 2.1, max_relative = 1e-15);
        assert_relative_eq!(w.z_r(), 4.4, max_relative = 1e-15);
        assert_eq!(w.v(2), 7.5);
        assert!(!w.is_consecutive());
    }

    #[test]
    fn same_group_is_rejected() {
        assert_eq!(
            resolve_window(&cuts_0_5_25(), 1.0, 4.0),
            Err(Error::NonIdentifiableWindow {
                left: 1.0,
                right: 4.0
            })
        );
        assert!(matches!(
            resolve_window(&cuts_0_5_25(), 0.0, 5.0),
            Err(Error::NonIdentifiableWindow { .. })
        ));
        // [c_l, T] with T inside the next group collapses to one group.
        assert!(matches!(
            resolve_window(&cuts_0_5_25(), 5.0, 8.0),
            Err(Error::NonIdentifiableWindow { .. })
        ));
    }

    #[test]
    fn invalid_windows() {
        assert!(matches!(
            resolve_window(&cuts_0_5_25(), 2.0, 26.0),
            Err(Error::WindowBeyondCuts { .. })
        ));
        assert!(matches!(
            resolve_window(&cuts_0_5_25(), 12.0, 2.0),
            Err(Error::InvalidWindow(_))
        ));
        assert!(matches!(
            resolve_window(&cuts_0_5_25(), -1.0, 2.0),
            Err(Error::InvalidWindow(_))
        ));
    }

    #[test]
    fn boundary_cases() {
        let w = resolve_window(&cuts_0_5_25(), 5.0, 12.0).unwrap();
        assert_eq!((w.l(), w.a1(), w.b1()), (1, 0.0, 1.0));
        assert_eq!(w.lower_limit(), 7.5);
        let w = resolve_window(&cuts_0_5_25(), 2.0, 15.0).unwrap();
        assert_eq!((w.r(), w.a2(), w.b2()), (2, 0.0, 1.0));
        assert!(w.right_on_cut());
        let w = resolve_window(&cuts_0_5_25(), 0.0, 7.0).unwrap();
        assert_eq!((w.l(), w.r(), w.a1()), (1, 1, 1.0));
        assert!(w.is_consecutive());
    }

    proptest! {
        #[test]
        fn interpolation_identities(a in 0.0f64..25.0, b in 0.0f64..25.0) {
            let (t, big_t) = if a < b { (a, b) } else { (b, a) };
            let bounds = cuts_0_5_25();
            if let Ok(w) = resolve_window(&bounds, t, big_t) {
                let (l, r) = (w.l(), w.r());
                prop_assert!((w.a1() * bounds.cut(l - 1) + w.b1() * bounds.cut(l) - t).abs() < 1e-12);
                prop_assert!((w.a2() * bounds.cut(r) + w.b2() * bounds.cut(r + 1) - big_t).abs() < 1e-12);
                prop_assert!((w.a1() + w.b1() - 1.0).abs() < 1e-15);
                prop_assert!((w.a2() + w.b2() - 1.0).abs() < 1e-15);
                prop_assert!(bounds.cut(l - 1) <= t && t <= bounds.cut(l));
                prop_assert!(bounds.cut(r) < big_t && big_t <= bounds.cut(r + 1));
                // The infinite-theta limit is the midpoint of the window.
                prop_assert!((w.upper_limit() - 0.5 * (t + big_t)).abs() < 1e-12 * big_t);
            }
        }
    }
}
