//! Counts of points in randomly placed windows of length `|I|/N`, their
//! joint distribution over boxes `I_1 x ... x I_m`, and mixed moments.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::interval::{Interval, IntervalBox};
use crate::numeric::adaptive_simpson;
use crate::seq::FracSequence;

const SAMPLE_BLOCK: usize = 8192;

/// `#{j : a_j in N^{-1} I + alpha mod 1}`.
pub fn count_in_window(seq: &FracSequence, interval: &Interval, alpha: f64) -> u64 {
    let n = seq.len();
    if n == 0 {
        return 0;
    }
    let nf = n as f64;
    let window = Interval { left: alpha + interval.left / nf, right: alpha + interval.right / nf, ..*interval };
    seq.count_periodic(&window)
}

/// Density of the shift distribution on the circle.
pub type CircleDensity = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

#[derive(Clone)]
pub enum AlphaMode {
    /// `alpha_k = (k + 1/2) / S`, unit weights.
    UniformGrid,
    /// `S` independent uniform shifts from a seeded ChaCha8 stream.
    SeededRandom { seed: u64 },
    /// Grid points weighted by a probability density on the circle.
    Density { density: CircleDensity },
}

impl fmt::Debug for AlphaMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AlphaMode::UniformGrid => write!(f, "UniformGrid"),
            AlphaMode::SeededRandom { seed } => write!(f, "SeededRandom {{ seed: {seed} }}"),
            AlphaMode::Density { .. } => write!(f, "Density"),
        }
    }
}

/// How the window position `alpha` is drawn.
#[derive(Debug, Clone)]
pub struct AlphaSampler {
    mode: AlphaMode,
    samples: usize,
}

impl AlphaSampler {
    pub fn grid(samples: usize) -> Self {
        AlphaSampler { mode: AlphaMode::UniformGrid, samples }
    }

    pub fn random(samples: usize, seed: u64) -> Self {
        AlphaSampler { mode: AlphaMode::SeededRandom { seed }, samples }
    }

    /// Grid sampler with importance weights `density(alpha_k)`. The density
    /// must be non-negative on the grid and integrate to 1 within `1e-9`.
    pub fn with_density<F>(samples: usize, density: F) -> Result<Self>
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        let total = adaptive_simpson(&density, 0.0, 1.0, 1e-12, 50);
        if (total - 1.0).abs() > 1e-9 {
            return Err(Error::domain(format!("density integrates to {total}, not 1")));
        }
        let density: CircleDensity = Arc::new(density);
        let n = samples.max(1);
        if (0..n).any(|k| !(density((k as f64 + 0.5) / n as f64) >= 0.0)) {
            return Err(Error::domain("density must be non-negative"));
        }
        Ok(AlphaSampler { mode: AlphaMode::Density { density }, samples })
    }

    pub fn samples(&self) -> usize {
        self.samples
    }

    pub fn mode(&self) -> &AlphaMode {
        &self.mode
    }

    /// `(alpha, weight)` pairs; weights sum to the sample count.
    pub fn points(&self) -> Vec<(f64, f64)> {
        let s = self.samples;
        let grid = |k: usize| (k as f64 + 0.5) / s as f64;
        match &self.mode {
            AlphaMode::UniformGrid => (0..s).map(|k| (grid(k), 1.0)).collect(),
            AlphaMode::SeededRandom { seed } => {
                let mut rng = ChaCha8Rng::seed_from_u64(*seed);
                (0..s).map(|_| (rng.gen::<f64>(), 1.0)).collect()
            }
            AlphaMode::Density { density } => {
                let raw: Vec<f64> = (0..s).map(|k| density(grid(k))).collect();
                let total: f64 = raw.iter().sum();
                let scale = if total > 0.0 { s as f64 / total } else { 0.0 };
                raw.iter().enumerate().map(|(k, w)| (grid(k), w * scale)).collect()
            }
        }
    }
}

/// Joint distribution of a count vector `k in Z_{>=0}^m`, stored as
/// (possibly weighted) frequencies that add up to the number of samples.
#[derive(Debug, Clone, PartialEq)]
pub struct CountDistribution {
    dim: usize,
    freq: BTreeMap<Vec<u32>, f64>,
    samples: u64,
}

impl CountDistribution {
    pub fn new(dim: usize) -> Self {
        CountDistribution { dim, freq: BTreeMap::new(), samples: 0 }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn samples(&self) -> u64 {
        self.samples
    }

    pub fn record(&mut self, key: Vec<u32>, weight: f64) {
        debug_assert_eq!(key.len(), self.dim);
        *self.freq.entry(key).or_insert(0.0) += weight;
        self.samples += 1;
    }

    pub fn merge(&mut self, other: CountDistribution) {
        for (k, w) in other.freq {
            *self.freq.entry(k).or_insert(0.0) += w;
        }
        self.samples += other.samples;
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Vec<u32>, f64)> {
        self.freq.iter().map(|(k, &w)| (k, w))
    }

    pub fn total_weight(&self) -> f64 {
        self.freq.values().sum()
    }

    pub fn probability(&self, key: &[u32]) -> f64 {
        let total = self.total_weight();
        if total == 0.0 {
            return 0.0;
        }
        self.freq.get(key).copied().unwrap_or(0.0) / total
    }

    /// `sum_k g(k) P(k)`, with numerator and denominator accumulated in the
    /// same pass so that `g == 1` gives exactly 1.
    pub fn expectation<G: Fn(&[u32]) -> f64>(&self, g: G) -> f64 {
        let mut num = 0.0;
        let mut den = 0.0;
        for (k, &w) in &self.freq {
            num += w * g(k);
            den += w;
        }
        num / den
    }

    pub fn mean(&self, coord: usize) -> f64 {
        self.expectation(|k| k[coord] as f64)
    }

    /// Probabilities of the `coord`-th marginal for `k = 0..=kmax`, with the
    /// mass of `k > kmax` in a final extra entry.
    pub fn marginal(&self, coord: usize, kmax: u32) -> Vec<f64> {
        let mut out = vec![0.0; kmax as usize + 2];
        let total = self.total_weight();
        for (k, &w) in &self.freq {
            let slot = (k[coord].min(kmax + 1)) as usize;
            out[slot] += w / total;
        }
        out
    }

    pub fn max_count(&self) -> u32 {
        self.freq.keys().flat_map(|k| k.iter().copied()).max().unwrap_or(0)
    }

    /// Total variation distance between first marginals, counts above
    /// `kmax` lumped together.
    pub fn total_variation(&self, other: &CountDistribution, kmax: u32) -> f64 {
        let p = self.marginal(0, kmax);
        let q = other.marginal(0, kmax);
        0.5 * p.iter().zip(&q).map(|(a, b)| (a - b).abs()).sum::<f64>()
    }
}

/// Tallies the count vector `(N_T(I_1, a), ..., N_T(I_m, a))` over the
/// sampler's shifts.
pub fn empirical_count_distribution(
    seq: &FracSequence,
    intervals: &IntervalBox,
    sampler: &AlphaSampler,
) -> Result<CountDistribution> {
    if sampler.samples() == 0 {
        return Err(Error::domain("sampler needs at least one sample"));
    }
    let points = sampler.points();
    let m = intervals.dim();
    let partials: Vec<CountDistribution> = points
        .par_chunks(SAMPLE_BLOCK)
        .map(|block| {
            let mut d = CountDistribution::new(m);
            for &(alpha, w) in block {
                let key = intervals
                    .intervals
                    .iter()
                    .map(|i| count_in_window(seq, i, alpha) as u32)
                    .collect();
                d.record(key, w);
            }
            d
        })
        .collect();
    let mut dist = CountDistribution::new(m);
    for p in partials {
        dist.merge(p);
    }
    Ok(dist)
}

/// Estimate of `int prod_j (N_T(I_j, a) + 1)^{s_j} d lambda(a)`.
pub fn mixed_moment(seq: &FracSequence, intervals: &IntervalBox, s: &[f64], sampler: &AlphaSampler) -> Result<f64> {
    moment_impl(seq, intervals, s, None, sampler)
}

/// As [`mixed_moment`] with the integrand set to zero wherever some count
/// exceeds `k_max`.
pub fn restricted_moment(
    seq: &FracSequence,
    intervals: &IntervalBox,
    s: &[f64],
    k_max: u32,
    sampler: &AlphaSampler,
) -> Result<f64> {
    moment_impl(seq, intervals, s, Some(k_max), sampler)
}

fn moment_impl(
    seq: &FracSequence,
    intervals: &IntervalBox,
    s: &[f64],
    k_max: Option<u32>,
    sampler: &AlphaSampler,
) -> Result<f64> {
    if s.len() != intervals.dim() {
        return Err(Error::domain(format!("{} exponents for a box of dimension {}", s.len(), intervals.dim())));
    }
    let dist = empirical_count_distribution(seq, intervals, sampler)?;
    Ok(dist.expectation(|k| moment_integrand(k, s, k_max)))
}

pub(crate) fn moment_integrand(k: &[u32], s: &[f64], k_max: Option<u32>) -> f64 {
    if let Some(cap) = k_max {
        if k.iter().any(|&x| x > cap) {
            return 0.0;
        }
    }
    k.iter().zip(s).map(|(&x, &e)| (x as f64 + 1.0).powf(e)).product()
}
