//! Grouped samples and their empirical distribution functions.
//!
//! Groups are the half-open intervals `(c_{j-1}, c_j]` for `j = 1..=m+1` with
//! `c_0 = 0` and `c_{m+1} = +inf`. Group indices in this crate follow that
//! 1-based convention; index `m + 1` is the open tail group.

use std::fmt;
use std::io::{Read, Write};
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Finite cuts `c_1 < ... < c_m`, with implicit `c_0 = 0` and `c_{m+1} = inf`.
#[derive(Debug, Clone, PartialEq)]
pub struct GroupBoundaries {
    cuts: Vec<f64>,
}

impl GroupBoundaries {
    pub fn new(cuts: Vec<f64>) -> Result<Self> {
        if cuts.len() < 2 {
            return Err(Error::InvalidBoundaries(format!(
                "need at least two finite cuts, got {}",
                cuts.len()
            )));
        }
        if let Some(c) = cuts.iter().find(|c| !c.is_finite() || **c <= 0.0) {
            return Err(Error::InvalidBoundaries(format!(
                "cuts must be finite and positive, got {c}"
            )));
        }
        if let Some(w) = cuts.windows(2).find(|w| w[0] >= w[1]) {
            return Err(Error::InvalidBoundaries(format!(
                "cuts must be strictly increasing, got {} then {}",
                w[0], w[1]
            )));
        }
        Ok(Self { cuts })
    }

    /// Cuts `a, a + s, ..., b` (the leading zero, if any, is `c_0` and dropped).
    pub fn arithmetic(start: f64, step: f64, end: f64) -> Result<Self> {
        let mut values = expand_range(start, step, end)?;
        if values.first() == Some(&0.0) {
            values.remove(0);
        }
        Self::new(values)
    }

    /// The finite cuts `c_1..=c_m`.
    pub fn cuts(&self) -> &[f64] {
        &self.cuts
    }

    /// Number of finite cuts, `m`.
    pub fn num_cuts(&self) -> usize {
        self.cuts.len()
    }

    /// Number of groups including the open tail, `m + 1`.
    pub fn num_groups(&self) -> usize {
        self.cuts.len() + 1
    }

    /// `c_j` for `0 <= j <= m + 1`.
    pub fn cut(&self, j: usize) -> f64 {
        match j {
            0 => 0.0,
            j if j <= self.cuts.len() => self.cuts[j - 1],
            j if j == self.cuts.len() + 1 => f64::INFINITY,
            _ => panic!("cut index {j} out of range 0..={}", self.cuts.len() + 1),
        }
    }

    pub fn last_cut(&self) -> f64 {
        self.cuts[self.cuts.len() - 1]
    }

    /// Width `c_j - c_{j-1}` of a finite group `1 <= j <= m`.
    pub fn width(&self, j: usize) -> f64 {
        self.cut(j) - self.cut(j - 1)
    }

    /// 1-based group `j` with `c_{j-1} < x <= c_j`, for `x > 0`.
    pub fn group_of(&self, x: f64) -> usize {
        self.cuts.partition_point(|&c| c < x) + 1
    }
}

fn expand_range(start: f64, step: f64, end: f64) -> Result<Vec<f64>> {
    if !(start.is_finite() && step.is_finite() && end.is_finite()) {
        return Err(Error::Parse(format!(
            "range {start}:{step}:{end} is not finite"
        )));
    }
    if step <= 0.0 || end < start {
        return Err(Error::Parse(format!(
            "range {start}:{step}:{end} must have a positive step and end >= start"
        )));
    }
    let count = ((end - start) / step + 1e-9).floor() as usize;
    let mut values: Vec<f64> = (0..=count).map(|k| start + k as f64 * step).collect();
    let last = values.last_mut().expect("non-empty range");
    if (*last - end).abs() <= 1e-9 * end.abs().max(1.0) {
        *last = end;
    }
    Ok(values)
}

/// Grammar: comma-separated numbers or `a:s:b` ranges, optionally ending in
/// `inf`. A leading `0` denotes `c_0` and is dropped.
impl FromStr for GroupBoundaries {
    type Err = Error;

    fn from_str(spec: &str) -> Result<Self> {
        let tokens: Vec<&str> = spec.split(',').map(str::trim).collect();
        let mut values = Vec::new();
        for (i, token) in tokens.iter().enumerate() {
            if token.is_empty() {
                return Err(Error::Parse(format!(
                    "empty element in boundary spec {spec:?}"
                )));
            }
            if token.eq_ignore_ascii_case("inf") || *token == "∞" {
                if i + 1 != tokens.len() {
                    return Err(Error::Parse("`inf` may only appear last".into()));
                }
                continue;
            }
            let parts: Vec<&str> = token.split(':').collect();
            match parts.as_slice() {
                [single] => values.push(parse_number(single)?),
                [a, s, b] => values.extend(expand_range(
                    parse_number(a)?,
                    parse_number(s)?,
                    parse_number(b)?,
                )?),
                _ => return Err(Error::Parse(format!("malformed range {token:?}"))),
            }
        }
        if values.first() == Some(&0.0) {
            values.remove(0);
        }
        GroupBoundaries::new(values)
    }
}

fn parse_number(s: &str) -> Result<f64> {
    let v: f64 = s
        .trim()
        .parse()
        .map_err(|_| Error::Parse(format!("not a number: {s:?}")))?;
    if !v.is_finite() {
        return Err(Error::Parse(format!("not a finite number: {s:?}")));
    }
    Ok(v)
}

/// Canonical spec string, compressing arithmetic runs where the compressed
/// form re-expands to exactly the same values.
impl fmt::Display for GroupBoundaries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut values = Vec::with_capacity(self.cuts.len() + 1);
        values.push(0.0);
        values.extend_from_slice(&self.cuts);

        let mut pieces = Vec::new();
        let mut i = 0;
        while i < values.len() {
            match longest_run(&values[i..]) {
                Some((len, text)) => {
                    pieces.push(text);
                    i += len;
                }
                None => {
                    pieces.push(values[i].to_string());
                    i += 1;
                }
            }
        }
        pieces.push("inf".to_string());
        write!(f, "{}", pieces.join(","))
    }
}

fn longest_run(values: &[f64]) -> Option<(usize, String)> {
    if values.len() < 3 {
        return None;
    }
    let mut best = None;
    // Try the longest candidate first; runs are short enough for the quadratic scan.
    for end in (2..values.len()).rev() {
        let raw_step = (values[end] - values[0]) / end as f64;
        let step: f64 = format!("{raw_step:.12e}").parse().ok()?;
        let text = format!("{}:{}:{}", values[0], step, values[end]);
        if let Ok(expanded) = expand_range(values[0], step, values[end]) {
            if expanded.as_slice() == &values[..=end] {
                best = Some((end + 1, text));
                break;
            }
        }
    }
    best
}

impl Serialize for GroupBoundaries {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for GroupBoundaries {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Spec(String),
            Cuts(Vec<f64>),
        }
        let parsed = match Repr::deserialize(deserializer)? {
            Repr::Spec(s) => s.parse(),
            Repr::Cuts(mut cuts) => {
                if cuts.first() == Some(&0.0) {
                    cuts.remove(0);
                }
                GroupBoundaries::new(cuts)
            }
        };
        parsed.map_err(serde::de::Error::custom)
    }
}

/// Counts per group over a fixed set of boundaries.
#[derive(Debug, Clone, PartialEq)]
pub struct GroupedSample {
    boundaries: GroupBoundaries,
    counts: Vec<u64>,
    n: u64,
}

impl GroupedSample {
    /// `counts` has one entry per group, the last being the open tail.
    pub fn new(boundaries: GroupBoundaries, counts: Vec<u64>) -> Result<Self> {
        if counts.len() != boundaries.num_groups() {
            return Err(Error::InvalidCounts(format!(
                "expected {} counts (m + 1), got {}",
                boundaries.num_groups(),
                counts.len()
            )));
        }
        let n: u64 = counts.iter().sum();
        if n == 0 {
            return Err(Error::EmptySample);
        }
        Ok(Self {
            boundaries,
            counts,
            n,
        })
    }

    pub fn boundaries(&self) -> &GroupBoundaries {
        &self.boundaries
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    /// Count `n_j` of group `j` (1-based).
    pub fn count(&self, j: usize) -> u64 {
        self.counts[j - 1]
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    /// `F_n(c_j)` for `j = 0..=m`, with `F_n(c_0) = 0`.
    pub fn cdf_at_cuts(&self) -> Vec<f64> {
        let n = self.n as f64;
        let mut out = Vec::with_capacity(self.boundaries.num_cuts() + 1);
        out.push(0.0);
        let mut running = 0u64;
        for &c in &self.counts[..self.boundaries.num_cuts()] {
            running += c;
            out.push(running as f64 / n);
        }
        out
    }

    fn check_domain(&self, x: f64) -> Result<()> {
        if x.is_nan() || x < 0.0 {
            return Err(Error::InvalidParameter(format!("x = {x} must be >= 0")));
        }
        let last_cut = self.boundaries.last_cut();
        if x > last_cut {
            return Err(Error::UndefinedBeyondLastCut { x, last_cut });
        }
        Ok(())
    }

    /// The ogive: `F_n` linearly interpolated between cuts on `[0, c_m]`.
    pub fn ogive(&self, x: f64) -> Result<f64> {
        self.check_domain(x)?;
        if x == 0.0 {
            return Ok(0.0);
        }
        let cdf = self.cdf_at_cuts();
        let j = self.boundaries.group_of(x);
        let (lo, hi) = (self.boundaries.cut(j - 1), self.boundaries.cut(j));
        let w = hi - lo;
        Ok((hi - x) / w * cdf[j - 1] + (x - lo) / w * cdf[j])
    }

    /// The histogram `n_j / (n (c_j - c_{j-1}))` on `(0, c_m]`.
    pub fn histogram(&self, x: f64) -> Result<f64> {
        self.check_domain(x)?;
        if x == 0.0 {
            return Err(Error::InvalidParameter(
                "histogram is defined for x > 0".into(),
            ));
        }
        let j = self.boundaries.group_of(x);
        Ok(self.count(j) as f64 / (self.n as f64 * self.boundaries.width(j)))
    }

    /// Inverse of the ogive for `0 < s <= F_n(c_m)`.
    ///
    /// Levels that coincide with a flat (zero-count) segment have a set-valued
    /// inverse and are rejected with [`Error::DegenerateInterval`].
    pub fn empirical_quantile(&self, s: f64) -> Result<f64> {
        let cdf = self.cdf_at_cuts();
        let m = self.boundaries.num_cuts();
        if s.is_nan() || s <= 0.0 {
            return Err(Error::InvalidParameter(format!("level {s} must be > 0")));
        }
        if s > cdf[m] {
            return Err(Error::UndefinedBeyondLastCut {
                x: s,
                last_cut: cdf[m],
            });
        }
        if let Some(j) = (1..=m).find(|&j| cdf[j - 1] == cdf[j] && cdf[j] == s) {
            return Err(Error::DegenerateInterval { level: s, group: j });
        }
        let j = (1..=m).find(|&j| s <= cdf[j]).expect("s <= F_n(c_m)");
        let (lo, hi) = (self.boundaries.cut(j - 1), self.boundaries.cut(j));
        if s == cdf[j] {
            return Ok(hi);
        }
        Ok(lo + (hi - lo) * (s - cdf[j - 1]) / (cdf[j] - cdf[j - 1]))
    }

    /// Reads the `lower,upper,count` CSV representation.
    ///
    /// Rows must be contiguous, start at 0, and only the final row may have
    /// `upper = inf`. A finite final `upper` means the open tail is empty.
    pub fn from_csv<R: Read>(reader: R) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new()
            .trim(csv::Trim::All)
            .from_reader(reader);
        let headers = rdr
            .headers()
            .map_err(|e| Error::Parse(e.to_string()))?
            .clone();
        if headers.iter().collect::<Vec<_>>() != ["lower", "upper", "count"] {
            return Err(Error::Parse(format!(
                "expected header `lower,upper,count`, got `{}`",
                headers.iter().collect::<Vec<_>>().join(",")
            )));
        }

        let mut uppers = Vec::new();
        let mut counts = Vec::new();
        let mut previous_upper = 0.0;
        let mut open_tail = false;
        for (line, record) in rdr.records().enumerate() {
            let record = record.map_err(|e| Error::Parse(e.to_string()))?;
            let row = line + 2;
            if open_tail {
                return Err(Error::Parse(format!("row {row}: rows after the open tail")));
            }
            if record.len() != 3 {
                return Err(Error::Parse(format!("row {row}: expected 3 fields")));
            }
            let lower = parse_bound(&record[0], row)?;
            let upper = parse_bound(&record[1], row)?;
            let count: u64 = record[2]
                .parse()
                .map_err(|_| Error::Parse(format!("row {row}: bad count {:?}", &record[2])))?;
            if lower != previous_upper {
                return Err(Error::Parse(format!(
                    "row {row}: lower {lower} does not continue from {previous_upper} \
                     (rows overlap or leave a gap)"
                )));
            }
            if upper <= lower {
                return Err(Error::Parse(format!(
                    "row {row}: upper {upper} <= lower {lower}"
                )));
            }
            if upper.is_infinite() {
                open_tail = true;
            } else {
                uppers.push(upper);
            }
            counts.push(count);
            previous_upper = upper;
        }
        if !open_tail {
            counts.push(0);
        }
        let boundaries = GroupBoundaries::new(uppers)?;
        GroupedSample::new(boundaries, counts)
    }

    /// Writes the `lower,upper,count` CSV, always with a final `inf` row.
    pub fn to_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut wtr = csv::Writer::from_writer(writer);
        let io = |e: csv::Error| Error::Parse(e.to_string());
        wtr.write_record(["lower", "upper", "count"]).map_err(io)?;
        for j in 1..=self.boundaries.num_groups() {
            let upper = self.boundaries.cut(j);
            let upper = if upper.is_infinite() {
                "inf".to_string()
            } else {
                upper.to_string()
            };
            wtr.write_record([
                self.boundaries.cut(j - 1).to_string(),
                upper,
                self.count(j).to_string(),
            ])
            .map_err(io)?;
        }
        wtr.flush().map_err(|e| Error::Parse(e.to_string()))
    }
}

fn parse_bound(field: &str, row: usize) -> Result<f64> {
    let v: f64 = field
        .parse()
        .map_err(|_| Error::Parse(format!("row {row}: not a number {field:?}")))?;
    if v.is_nan() || v < 0.0 || v == f64::NEG_INFINITY {
        return Err(Error::Parse(format!("row {row}: invalid bound {field:?}")));
    }
    Ok(v)
}

/// Tallies raw positive observations into their groups.
pub fn group_raw(values: &[f64], boundaries: &GroupBoundaries) -> Result<GroupedSample> {
    if values.is_empty() {
        return Err(Error::EmptySample);
    }
    let mut counts = vec![0u64; boundaries.num_groups()];
    for &x in values {
        if !(x > 0.0) {
            return Err(Error::NonPositiveValue(x));
        }
        counts[boundaries.group_of(x) - 1] += 1;
    }
    GroupedSample::new(boundaries.clone(), counts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn five_ten() -> GroupedSample {
        GroupedSample::new(
            GroupBoundaries::new(vec![5.0, 10.0]).unwrap(),
            vec![4, 4, 2],
        )
        .unwrap()
    }

    #[test]
    fn boundaries_reject_bad_cuts() {
        assert!(GroupBoundaries::new(vec![5.0]).is_err());
        assert!(GroupBoundaries::new(vec![5.0, 5.0]).is_err());
        assert!(GroupBoundaries::new(vec![0.0, 5.0]).is_err());
        assert!(GroupBoundaries::new(vec![5.0, f64::INFINITY]).is_err());
    }

    #[test]
    fn group_raw_half_open_convention() {
        let b = GroupBoundaries::new(vec![5.0, 10.0]).unwrap();
        let g = group_raw(&[1.0, 6.0, 100.0], &b).unwrap();
        assert_eq!(g.counts(), &[1, 1, 1]);
        let g = group_raw(&[5.0, 5.0, 10.0], &b).unwrap();
        assert_eq!(g.counts(), &[2, 1, 0]);
        assert_eq!(group_raw(&[], &b), Err(Error::EmptySample));
        assert_eq!(
            group_raw(&[1.0, 0.0], &b),
            Err(Error::NonPositiveValue(0.0))
        );
    }

    #[test]
    fn ogive_examples() {
        let g = five_ten();
        assert_eq!(g.ogive(0.0).unwrap(), 0.0);
        assert_abs_diff_eq!(g.ogive(7.5).unwrap(), 0.6, epsilon = 1e-15);
        assert_eq!(g.ogive(5.0).unwrap(), 0.4);
        assert_eq!(g.ogive(10.0).unwrap(), 0.8);
        assert!(matches!(
            g.ogive(10.5),
            Err(Error::UndefinedBeyondLastCut { .. })
        ));
    }

    #[test]
    fn histogram_examples() {
        let g = five_ten();
        assert_abs_diff_eq!(g.histogram(2.0).unwrap(), 0.08, epsilon = 1e-15);
        assert_abs_diff_eq!(g.histogram(10.0).unwrap(), 0.08, epsilon = 1e-15);
        assert!(matches!(
            g.histogram(11.0),
            Err(Error::UndefinedBeyondLastCut { .. })
        ));
        let area: f64 = (1..=2)
            .map(|j| g.histogram(g.boundaries().cut(j)).unwrap() * 5.0)
            .sum();
        assert_abs_diff_eq!(area, g.ogive(10.0).unwrap(), epsilon = 1e-12);
    }

    #[test]
    fn quantile_examples() {
        let g = five_ten();
        assert_eq!(g.empirical_quantile(0.4).unwrap(), 5.0);
        assert_eq!(g.empirical_quantile(0.8).unwrap(), 10.0);
        assert_abs_diff_eq!(g.empirical_quantile(0.6).unwrap(), 7.5, epsilon = 1e-12);
        assert!(matches!(
            g.empirical_quantile(0.9),
            Err(Error::UndefinedBeyondLastCut { .. })
        ));
    }

    #[test]
    fn quantile_on_flat_segment_is_degenerate() {
        let b = GroupBoundaries::new(vec![5.0, 10.0, 15.0]).unwrap();
        let g = GroupedSample::new(b, vec![4, 0, 4, 2]).unwrap();
        assert_eq!(g.ogive(7.0).unwrap(), 0.4);
        assert_eq!(
            g.empirical_quantile(0.4),
            Err(Error::DegenerateInterval {
                level: 0.4,
                group: 2
            })
        );
        assert_abs_diff_eq!(g.empirical_quantile(0.6).unwrap(), 12.5, epsilon = 1e-12);
    }

    #[test]
    fn spec_grammar() {
        let b: GroupBoundaries = "0:5:30,inf".parse().unwrap();
        assert_eq!(b.cuts(), &[5.0, 10.0, 15.0, 20.0, 25.0, 30.0]);
        assert_eq!(b.to_string(), "0:5:30,inf");
        let g1: GroupBoundaries = "0:1:100,200".parse().unwrap();
        assert_eq!(g1.num_cuts(), 101);
        assert_eq!(g1.last_cut(), 200.0);
        assert_eq!(g1.to_string(), "0:1:100,200,inf");
        let odd: GroupBoundaries = "1.5,2,7".parse().unwrap();
        assert_eq!(odd.to_string(), "0,1.5,2,7,inf");
        assert!("0:5:30,inf,40".parse::<GroupBoundaries>().is_err());
        assert!("0:0:30".parse::<GroupBoundaries>().is_err());
        assert!("5,abc".parse::<GroupBoundaries>().is_err());
        assert!("5,,10".parse::<GroupBoundaries>().is_err());
    }

    #[test]
    fn csv_rejects_gaps_and_overlaps() {
        let ok = "lower,upper,count\n0,5,4\n5,10,4\n10,inf,2\n";
        let g = GroupedSample::from_csv(ok.as_bytes()).unwrap();
        assert_eq!(g, five_ten());

        let gap = "lower,upper,count\n0,5,4\n6,10,4\n10,inf,2\n";
        assert!(matches!(
            GroupedSample::from_csv(gap.as_bytes()),
            Err(Error::Parse(_))
        ));
        let overlap = "lower,upper,count\n0,5,4\n4,10,4\n10,inf,2\n";
        assert!(matches!(
            GroupedSample::from_csv(overlap.as_bytes()),
            Err(Error::Parse(_))
        ));
        let after_tail = "lower,upper,count\n0,5,4\n5,inf,4\ninf,inf,2\n";
        assert!(GroupedSample::from_csv(after_tail.as_bytes()).is_err());
        let header = "lo,hi,n\n0,5,4\n5,10,4\n";
        assert!(GroupedSample::from_csv(header.as_bytes()).is_err());

        let closed = "lower,upper,count\n0,5,4\n5,10,4\n";
        let g = GroupedSample::from_csv(closed.as_bytes()).unwrap();
        assert_eq!(g.counts(), &[4, 4, 0]);
    }

    #[test]
    fn csv_write_read() {
        let g = five_ten();
        let mut buf = Vec::new();
        g.to_csv(&mut buf).unwrap();
        assert_eq!(
            String::from_utf8(buf.clone()).unwrap(),
            "lower,upper,count\n0,5,4\n5,10,4\n10,inf,2\n"
        );
        assert_eq!(GroupedSample::from_csv(buf.as_slice()).unwrap(), g);
    }

    fn sample_strategy() -> impl Strategy<Value = GroupedSample> {
        (2usize..12)
            .prop_flat_map(|m| {
                (
                    proptest::collection::vec(0.05f64..5.0, m),
                    proptest::collection::vec(0u64..20, m + 1),
                )
            })
            .prop_filter_map("empty sample", |(widths, counts)| {
                let cuts = widths
                    .iter()
                    .scan(0.0, |acc, w| {
                        *acc += w;
                        Some(*acc)
                    })
                    .collect();
                GroupedSample::new(GroupBoundaries::new(cuts).ok()?, counts).ok()
            })
    }

    proptest! {
        #[test]
        fn spec_round_trips(cuts in proptest::collection::vec(0.01f64..10.0, 2..30)) {
            let mut acc = 0.0;
            let cuts: Vec<f64> = cuts.iter().map(|w| { acc += w; acc }).collect();
            let b = GroupBoundaries::new(cuts).unwrap();
            let again: GroupBoundaries = b.to_string().parse().unwrap();
            prop_assert_eq!(again, b);
        }

        #[test]
        fn arithmetic_spec_round_trips(step in 1u32..50, count in 2u32..60, scale in prop::sample::select(vec![1.0, 0.1, 0.25, 0.01])) {
            let spec = format!("0:{}:{},inf", step as f64 * scale, (step * count) as f64 * scale);
            let b: GroupBoundaries = spec.parse().unwrap();
            let again: GroupBoundaries = b.to_string().parse().unwrap();
            prop_assert_eq!(again, b);
        }

        #[test]
        fn ogive_monotone_and_bounded(g in sample_strategy(), a in 0.0f64..1.0, b in 0.0f64..1.0) {
            let cm = g.boundaries().last_cut();
            let (x, y) = if a <= b { (a * cm, b * cm) } else { (b * cm, a * cm) };
            let (fx, fy) = (g.ogive(x).unwrap(), g.ogive(y).unwrap());
            prop_assert!(fx <= fy + 1e-15);
            prop_assert!((0.0..=1.0).contains(&fx) && (0.0..=1.0).contains(&fy));
            let tail = *g.counts().last().unwrap() as f64 / g.n() as f64;
            prop_assert!((g.ogive(cm).unwrap() - (1.0 - tail)).abs() < 1e-15);
        }

        #[test]
        fn quantile_and_ogive_invert(g in sample_strategy(), u in 0.0f64..1.0) {
            let m = g.boundaries().num_cuts();
            let cdf = g.cdf_at_cuts();
            prop_assume!(cdf[m] > 0.0);
            let s = (u * cdf[m]).max(1e-9 * cdf[m]);
            if let Ok(x) = g.empirical_quantile(s) {
                prop_assert!((g.ogive(x).unwrap() - s).abs() < 1e-12);
            }
            // x inside a positive-count group maps back to itself.
            let j = 1 + (u * m as f64) as usize % m;
            if g.count(j) > 0 {
                let x = g.boundaries().cut(j - 1) + 0.37 * g.boundaries().width(j);
                let back = g.empirical_quantile(g.ogive(x).unwrap()).unwrap();
                prop_assert!((back - x).abs() < 1e-12 * x.max(1.0));
            }
        }
    }
}
