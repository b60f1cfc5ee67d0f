//! The point sets `{sqrt(n) mod 1}` (perfect squares removed) and
//! `{n^a mod 1}`, stored sorted on the circle `[0, 1)`.
//!
//! Square roots use the hardware `f64` square root. For `n <= 10^12` the
//! relative error is below `2^-52`, far under the `1/N` scale of every
//! statistic computed here.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::interval::Interval;
use crate::numeric::isqrt;

const CHUNK: u64 = 1 << 16;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SequenceKind {
    /// `sqrt(n) mod 1` for `c^2 T < n <= T`, squares removed.
    SqrtN { c: f64 },
    /// `n^exponent mod 1` for `1 <= n <= T`.
    Power { exponent: f64 },
    /// Points supplied directly.
    Explicit,
}

/// Sorted fractional parts together with the parameters that produced them.
#[derive(Debug, Clone)]
pub struct FracSequence {
    values: Vec<f64>,
    t: u64,
    kind: SequenceKind,
    source_indices: Option<Vec<u64>>,
}

impl FracSequence {
    /// Wraps arbitrary points of `[0, 1)`. Used for hand-made examples and by
    /// the statistics tests.
    pub fn from_values(mut values: Vec<f64>) -> Result<Self> {
        if let Some(bad) = values.iter().find(|v| !(0.0..1.0).contains(*v)) {
            return Err(Error::domain(format!("value {bad} outside [0, 1)")));
        }
        values.sort_by(f64::total_cmp);
        let t = values.len() as u64;
        Ok(FracSequence { values, t, kind: SequenceKind::Explicit, source_indices: None })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn t(&self) -> u64 {
        self.t
    }

    pub fn kind(&self) -> SequenceKind {
        self.kind
    }

    /// The `n` that produced each entry of `values()`, if recorded.
    pub fn source_indices(&self) -> Option<&[u64]> {
        self.source_indices.as_deref()
    }

    /// Number of points in the periodic extension that are `< x`
    /// (`inclusive = false`) or `<= x` (`inclusive = true`).
    pub(crate) fn cumulative(&self, x: f64, inclusive: bool) -> i64 {
        let n = self.values.len() as i64;
        let k = x.floor();
        let r = x - k;
        let below = if inclusive {
            self.values.partition_point(|&v| v <= r)
        } else {
            self.values.partition_point(|&v| v < r)
        };
        k as i64 * n + below as i64
    }

    /// Number of points of the periodic extension lying in `[lo, hi]` with
    /// the endpoint conventions of `interval`.
    pub(crate) fn count_periodic(&self, window: &Interval) -> u64 {
        if window.is_empty() {
            return 0;
        }
        let upper = self.cumulative(window.right, window.right_closed);
        let lower = self.cumulative(window.left, !window.left_closed);
        (upper - lower).max(0) as u64
    }
}

/// `{sqrt(n) mod 1 : c^2 T < n <= T, n not a square}`, sorted.
pub fn generate(t: u64, c: f64) -> Result<FracSequence> {
    generate_with_indices(t, c, false)
}

/// As [`generate`], optionally recording the `n` behind each value.
pub fn generate_with_indices(t: u64, c: f64, keep_indices: bool) -> Result<FracSequence> {
    if t == 0 {
        return Err(Error::EmptySequence("T must be at least 1".into()));
    }
    if !(0.0..1.0).contains(&c) {
        return Err(Error::domain(format!("c = {c} outside [0, 1)")));
    }
    // First n strictly above c^2 T.
    let start = ((c * c * t as f64).floor() as u64 + 1).max(1);
    let mut pairs: Vec<(f64, u64)> = chunk_ranges(start, t)
        .into_par_iter()
        .flat_map_iter(|(lo, hi)| {
            (lo..=hi).filter_map(|n| {
                let r = isqrt(n);
                if r * r == n {
                    return None;
                }
                let s = (n as f64).sqrt();
                Some((s - s.floor(), n))
            })
        })
        .collect();
    pairs.par_sort_unstable_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    let (values, idx): (Vec<f64>, Vec<u64>) = pairs.into_iter().unzip();
    Ok(FracSequence {
        values,
        t,
        kind: SequenceKind::SqrtN { c },
        source_indices: keep_indices.then_some(idx),
    })
}

/// `{n^exponent mod 1 : 1 <= n <= T}`, sorted. Exact integer powers give 0
/// and are kept.
pub fn generate_alpha_power(t: u64, exponent: f64) -> Result<FracSequence> {
    if t == 0 {
        return Err(Error::EmptySequence("T must be at least 1".into()));
    }
    if !(exponent > 0.0 && exponent < 1.0) {
        return Err(Error::domain(format!("exponent {exponent} outside (0, 1)")));
    }
    if exponent == 0.5 {
        // Keep the square-root convention: squares are removed.
        let mut s = generate(t, 0.0)?;
        s.kind = SequenceKind::Power { exponent };
        return Ok(s);
    }
    let mut values: Vec<f64> = chunk_ranges(1, t)
        .into_par_iter()
        .flat_map_iter(|(lo, hi)| {
            (lo..=hi).map(move |n| {
                let p = (n as f64).powf(exponent);
                let r = p.round();
                // Exact integer powers: round-off must not leave 0.99999...
                if (p - r).abs() < 1e-9 * p.max(1.0) && is_exact_power(n, r as u64, exponent) {
                    0.0
                } else {
                    let f = p - p.floor();
                    if f >= 1.0 { 0.0 } else { f }
                }
            })
        })
        .collect();
    values.par_sort_unstable_by(f64::total_cmp);
    Ok(FracSequence { values, t, kind: SequenceKind::Power { exponent }, source_indices: None })
}

/// Whether `root^(1/exponent) == n` exactly, for exponents of the form `1/k`.
fn is_exact_power(n: u64, root: u64, exponent: f64) -> bool {
    let k = (1.0 / exponent).round();
    if (1.0 / exponent - k).abs() > 1e-12 || k < 1.0 {
        return false;
    }
    let mut acc: u128 = 1;
    for _ in 0..k as u32 {
        acc = acc.saturating_mul(root as u128);
    }
    acc == n as u128
}

fn chunk_ranges(lo: u64, hi: u64) -> Vec<(u64, u64)> {
    if lo > hi {
        return Vec::new();
    }
    let mut out = Vec::new();
    let mut a = lo;
    loop {
        let b = a.saturating_add(CHUNK - 1).min(hi);
        out.push((a, b));
        if b == hi {
            break;
        }
        a = b + 1;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn t10_values() {
        let s = generate(10, 0.0).unwrap();
        assert_eq!(s.len(), 7);
        let mut expect: Vec<f64> = [2u64, 3, 5, 6, 7, 8, 10]
            .iter()
            .map(|&n| {
                let r = (n as f64).sqrt();
                r - r.floor()
            })
            .collect();
        expect.sort_by(f64::total_cmp);
        assert_eq!(s.values(), &expect[..]);
    }

    #[test]
    fn t4_values() {
        let s = generate(4, 0.0).unwrap();
        assert_eq!(s.len(), 2);
        assert!((s.values()[0] - 0.414214).abs() < 1e-6);
        assert!((s.values()[1] - 0.732051).abs() < 1e-6);
    }

    #[test]
    fn t2000_count() {
        assert_eq!(generate(2000, 0.0).unwrap().len(), 1956);
    }

    #[test]
    fn count_formula_many_t() {
        for t in 1..400u64 {
            let s = generate(t, 0.0).unwrap();
            assert_eq!(s.len() as u64, t - isqrt(t), "T = {t}");
        }
    }

    #[test]
    fn restricted_range() {
        // c = 0.5, T = 100: 25 < n <= 100, minus squares 36, 49, 64, 81, 100.
        let s = generate_with_indices(100, 0.5, true).unwrap();
        assert_eq!(s.len(), 75 - 5);
        let idx = s.source_indices().unwrap();
        assert!(idx.iter().all(|&n| n > 25 && n <= 100));
    }

    #[test]
    fn errors() {
        assert!(matches!(generate(0, 0.0), Err(Error::EmptySequence(_))));
        assert!(matches!(generate(10, 1.0), Err(Error::Domain(_))));
        assert!(matches!(generate(10, -0.1), Err(Error::Domain(_))));
        assert!(matches!(generate_alpha_power(10, 1.0), Err(Error::Domain(_))));
        assert!(matches!(generate_alpha_power(10, 0.0), Err(Error::Domain(_))));
    }

    #[test]
    fn cube_roots() {
        let s = generate_alpha_power(3, 1.0 / 3.0).unwrap();
        let v = s.values();
        assert_eq!(v[0], 0.0);
        assert!((v[1] - 0.259921).abs() < 1e-6);
        assert!((v[2] - 0.442250).abs() < 1e-6);
        assert_eq!(generate_alpha_power(1, 0.9).unwrap().values(), &[0.0]);
        let big = generate_alpha_power(200_000, 1.0 / 3.0).unwrap();
        assert_eq!(big.len(), 200_000);
        // 1, 8, ..., 58^3 = 195112
        assert_eq!(big.values().iter().filter(|&&v| v == 0.0).count(), 58);
    }

    #[test]
    fn distance_to_integer_bound() {
        for t in [100u64, 10_000, 1_000_000] {
            let s = generate(t, 0.0).unwrap();
            let bound = 0.5 / ((t + 1) as f64).sqrt();
            let worst = s.values().iter().map(|&v| v.min(1.0 - v)).fold(f64::INFINITY, f64::min);
            assert!(worst >= bound, "T = {t}: {worst} < {bound}");
            assert!(s.values().windows(2).all(|w| w[0] <= w[1]));
            assert!(s.values().iter().all(|&v| v > 0.0 && v < 1.0));
        }
    }
}
