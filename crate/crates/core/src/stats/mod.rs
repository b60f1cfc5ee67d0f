//! Local statistics of a point set on the circle: scaled gaps, two-point
//! correlation, windowed counts and their moments.

mod testfn;
mod window;

use rayon::prelude::*;
use serde::Serialize;

pub use testfn::TestFunction;
pub use window::{
    count_in_window, empirical_count_distribution, mixed_moment, restricted_moment, AlphaMode, AlphaSampler,
    CountDistribution,
};

use crate::error::{Error, Result};
use crate::seq::FracSequence;

/// Pair loops are split into blocks of this many points; partial sums are
/// added in block order so results do not depend on the thread count.
const PAIR_BLOCK: usize = 4096;

/// Circular nearest-neighbour gaps multiplied by `N`. The gap after the
/// largest value wraps through 1 to the smallest.
pub fn scaled_gaps(seq: &FracSequence) -> Result<Vec<f64>> {
    let v = seq.values();
    let n = v.len();
    if n < 2 {
        return Err(Error::InsufficientData(format!("need at least 2 points for gaps, got {n}")));
    }
    let scale = n as f64;
    let mut gaps: Vec<f64> = v.windows(2).map(|w| (w[1] - w[0]) * scale).collect();
    gaps.push((v[0] + 1.0 - v[n - 1]) * scale);
    Ok(gaps)
}

/// `R_N^2(f) = (1/N) sum_m sum_{i != j} f(N (a_i - a_j + m))`.
pub fn pair_correlation(seq: &FracSequence, f: &TestFunction) -> Result<f64> {
    pair_sum(seq, f, None)
}

/// Pair correlation with a position-dependent weight:
/// `(1/N) sum_m sum_{i != j} g(a_i) g(a_j) h(N (a_i - a_j + m))`.
pub fn pair_correlation_weighted<G>(seq: &FracSequence, g: G, h: &TestFunction) -> Result<f64>
where
    G: Fn(f64) -> f64 + Sync,
{
    pair_sum(seq, h, Some(&g))
}

fn pair_sum(seq: &FracSequence, f: &TestFunction, weight: Option<&(dyn Fn(f64) -> f64 + Sync)>) -> Result<f64> {
    f.validate()?;
    let v = seq.values();
    let n = v.len();
    if n < 2 {
        return Err(Error::InsufficientData(format!("need at least 2 points for pair correlation, got {n}")));
    }
    let nf = n as f64;
    let (a, b) = f.support();
    let pad = 1e-12;
    let partials: Vec<f64> = (0..n)
        .collect::<Vec<_>>()
        .par_chunks(PAIR_BLOCK)
        .map(|block| {
            let mut acc = 0.0;
            for &i in block {
                let ai = v[i];
                let wi = weight.map_or(1.0, |g| g(ai));
                if wi == 0.0 {
                    continue;
                }
                // Need a_i - (a_j + k) in [a/N, b/N].
                let lo = ai - b / nf - pad;
                let hi = ai - a / nf + pad;
                let mut k = lo.floor() as i64;
                while (k as f64) <= hi {
                    let kf = k as f64;
                    let start = v.partition_point(|&x| x < lo - kf);
                    let end = v.partition_point(|&x| x <= hi - kf);
                    for (j, &aj) in v.iter().enumerate().take(end).skip(start) {
                        if j == i {
                            continue;
                        }
                        let val = f.eval(nf * (ai - aj - kf));
                        if val != 0.0 {
                            acc += wi * weight.map_or(1.0, |g| g(aj)) * val;
                        }
                    }
                    k += 1;
                }
            }
            acc
        })
        .collect();
    Ok(partials.iter().sum::<f64>() / nf)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HistogramBin {
    pub left: f64,
    pub right: f64,
    pub density: f64,
}

/// Density-normalised histogram with `bins` equal bins on `[lo, hi]`.
/// Normalisation uses the total number of data points, so mass outside the
/// range is lost rather than redistributed.
pub fn histogram(data: &[f64], bins: usize, lo: f64, hi: f64) -> Result<Vec<HistogramBin>> {
    if data.is_empty() {
        return Err(Error::InsufficientData("histogram of empty data".into()));
    }
    if bins == 0 || !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
        return Err(Error::domain(format!("bad histogram range [{lo}, {hi}] with {bins} bins")));
    }
    let width = (hi - lo) / bins as f64;
    let mut counts = vec![0u64; bins];
    for &x in data {
        if x < lo || x > hi {
            continue;
        }
        let idx = (((x - lo) / width) as usize).min(bins - 1);
        counts[idx] += 1;
    }
    let norm = data.len() as f64 * width;
    Ok(counts
        .iter()
        .enumerate()
        .map(|(i, &c)| HistogramBin {
            left: lo + width * i as f64,
            right: if i + 1 == bins { hi } else { lo + width * (i + 1) as f64 },
            density: c as f64 / norm,
        })
        .collect())
}

/// Kolmogorov–Smirnov distance between the empirical law of `data` and the
/// unit-mean exponential distribution.
pub fn ks_distance_exponential(data: &[f64]) -> Result<f64> {
    if data.is_empty() {
        return Err(Error::InsufficientData("KS distance of empty data".into()));
    }
    let mut xs = data.to_vec();
    xs.par_sort_unstable_by(f64::total_cmp);
    let n = xs.len() as f64;
    let d = xs
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let cdf = if x <= 0.0 { 0.0 } else { -(-x).exp_m1() };
            (cdf - i as f64 / n).max((i + 1) as f64 / n - cdf)
        })
        .fold(0.0, f64::max);
    Ok(d)
}
