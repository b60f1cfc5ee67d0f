//! Haar-random affine lattices and the limiting count distribution.

use std::f64::consts::{PI, TAU};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::{count_in_triangle, AffineLattice, Triangle};
use crate::error::{Error, Result};
use crate::interval::IntervalBox;
use crate::numeric::{jackknife_mean_se, stream_seed};
use crate::stats::CountDistribution;

const CHUNK: usize = 4096;
const JACKKNIFE_GROUPS: usize = 50;

/// Draws `(tau, phi; xi)` from the normalized Haar measure
/// `(3/pi) du dv / v^2 dphi/(2 pi) dxi` on the fundamental domain
/// `|u| <= 1/2, |tau| >= 1`, `phi in [0, 2 pi)`, `xi in [0, 1)^2`.
///
/// `v` is proposed from `v^{-2}` on `[sqrt(3)/2, inf)` by inversion and
/// kept when `|tau| >= 1`; the acceptance rate is `pi sqrt(3)/6`.
#[derive(Debug, Clone)]
pub struct HaarSampler {
    rng: ChaCha8Rng,
    proposed: u64,
    accepted: u64,
}

impl HaarSampler {
    pub fn new(seed: u64) -> Self {
        HaarSampler { rng: ChaCha8Rng::seed_from_u64(seed), proposed: 0, accepted: 0 }
    }

    pub fn sample(&mut self) -> AffineLattice {
        let h = 0.75f64.sqrt();
        loop {
            self.proposed += 1;
            let u = self.rng.gen::<f64>() - 0.5;
            let v = h / (1.0 - self.rng.gen::<f64>());
            if u * u + v * v >= 1.0 {
                self.accepted += 1;
                let phi = self.rng.gen::<f64>() * TAU;
                let xi = [self.rng.gen::<f64>(), self.rng.gen::<f64>()];
                return AffineLattice { u, v, phi, xi };
            }
        }
    }

    pub fn acceptance_rate(&self) -> f64 {
        if self.proposed == 0 {
            return f64::NAN;
        }
        self.accepted as f64 / self.proposed as f64
    }

    /// `pi sqrt(3) / 6`
    pub fn expected_acceptance_rate() -> f64 {
        PI * 3f64.sqrt() / 6.0
    }
}

/// Runs `f` on `samples` Haar lattices split into fixed chunks, each with
/// its own stream, so the output does not depend on the thread count.
fn map_samples<T, F>(samples: usize, seed: u64, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(&AffineLattice) -> Result<T> + Sync,
{
    let chunks = samples.div_ceil(CHUNK);
    let parts: Vec<Result<Vec<T>>> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut sampler = HaarSampler::new(stream_seed(seed, c as u64));
            let n = CHUNK.min(samples - c * CHUNK);
            (0..n).map(|_| f(&sampler.sample())).collect()
        })
        .collect();
    let mut out = Vec::with_capacity(samples);
    for p in parts {
        out.extend(p?);
    }
    Ok(out)
}

/// Monte Carlo estimate of the limiting distribution `E(k, I)`: the law of
/// `(#(Z^2 g ∩ T(I_1)), ..., #(Z^2 g ∩ T(I_m)))` for Haar-random `g`, where
/// `T(I) = {0 < x < 1, y in 2xI}` has area `|I|`.
pub fn limit_process_distribution(intervals: &IntervalBox, samples: usize, seed: u64) -> Result<CountDistribution> {
    if samples == 0 {
        return Err(Error::domain("need at least one lattice sample"));
    }
    let tris: Vec<Triangle> = intervals.intervals.iter().map(|&i| Triangle::unit(i)).collect();
    let keys = map_samples(samples, seed, |x| {
        tris.iter().map(|t| count_in_triangle(x, t).map(|k| k as u32)).collect::<Result<Vec<u32>>>()
    })?;
    let mut dist = CountDistribution::new(intervals.dim());
    for k in keys {
        dist.record(k, 1.0);
    }
    Ok(dist)
}

/// One moment compared with its Siegel mean value.
#[derive(Debug, Clone, Serialize)]
pub struct SiegelLine {
    pub name: String,
    pub estimate: f64,
    pub std_error: f64,
    pub target: f64,
    /// `(estimate - target) / std_error`
    pub z: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct SiegelReport {
    pub samples: usize,
    pub seed: u64,
    pub lines: Vec<SiegelLine>,
}

impl SiegelReport {
    pub fn max_abs_z(&self) -> f64 {
        self.lines.iter().map(|l| l.z.abs()).fold(0.0, f64::max)
    }

    pub fn passes(&self, sigmas: f64) -> bool {
        self.max_abs_z() <= sigmas
    }
}

/// Checks `E[k] = |I|`, `E[k^2] = |I| + |I|^2` for each interval and, for
/// two intervals, `E[k_1 k_2] = |I_1 ∩ I_2| + |I_1||I_2|`, with jackknife
/// standard errors.
pub fn siegel_moment_check(intervals: &IntervalBox, samples: usize, seed: u64) -> Result<SiegelReport> {
    let m = intervals.dim();
    if !(1..=2).contains(&m) {
        return Err(Error::domain(format!("moment check takes one or two intervals, got {m}")));
    }
    if samples < 2 * JACKKNIFE_GROUPS {
        return Err(Error::InsufficientData(format!("{samples} samples, need at least {}", 2 * JACKKNIFE_GROUPS)));
    }
    let tris: Vec<Triangle> = intervals.intervals.iter().map(|&i| Triangle::unit(i)).collect();
    let counts = map_samples(samples, seed, |x| {
        tris.iter().map(|t| count_in_triangle(x, t).map(|k| k as f64)).collect::<Result<Vec<f64>>>()
    })?;

    let mut lines = Vec::new();
    let mut push = |name: String, values: Vec<f64>, target: f64| {
        let estimate = values.iter().sum::<f64>() / values.len() as f64;
        let std_error = jackknife_mean_se(&values, JACKKNIFE_GROUPS);
        lines.push(SiegelLine { name, estimate, std_error, target, z: (estimate - target) / std_error });
    };
    for (j, i) in intervals.intervals.iter().enumerate() {
        let len = i.length();
        push(format!("E[k{}]", j + 1), counts.iter().map(|k| k[j]).collect(), len);
        push(format!("E[k{}^2]", j + 1), counts.iter().map(|k| k[j] * k[j]).collect(), len + len * len);
    }
    if m == 2 {
        let (a, b) = (&intervals.intervals[0], &intervals.intervals[1]);
        push("E[k1 k2]".into(), counts.iter().map(|k| k[0] * k[1]).collect(), a.overlap(b) + a.length() * b.length());
    }
    Ok(SiegelReport { samples, seed, lines })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::interval::Interval;
    use crate::numeric::adaptive_simpson;

    #[test]
    fn samples_lie_in_fundamental_domain() {
        let mut s = HaarSampler::new(7);
        for _ in 0..10_000 {
            let x = s.sample();
            assert!(x.u.abs() <= 0.5 && x.u * x.u + x.v * x.v >= 1.0);
            assert!((0.0..TAU).contains(&x.phi));
            assert!(x.xi.iter().all(|t| (0.0..1.0).contains(t)));
        }
        let rate = s.acceptance_rate();
        assert!((rate - HaarSampler::expected_acceptance_rate()).abs() < 0.01, "{rate}");
    }

    #[test]
    fn mean_of_inverse_height_matches_quadrature() {
        // E[1/v] = (3/pi) int_{-1/2}^{1/2} int_{sqrt(1-u^2)}^inf v^{-3} dv du.
        let inner = |u: f64| 0.5 / (1.0 - u * u);
        let exact = 3.0 / PI * adaptive_simpson(&inner, -0.5, 0.5, 1e-12, 40);
        let mut s = HaarSampler::new(11);
        let n = 200_000;
        let mean = (0..n).map(|_| 1.0 / s.sample().v).sum::<f64>() / n as f64;
        assert!((mean - exact).abs() < 0.005, "{mean} vs {exact}");
    }

    #[test]
    fn limit_distribution_has_mean_length() {
        let b = IntervalBox::single(Interval::half_open(0.0, 1.0).unwrap());
        let d = limit_process_distribution(&b, 40_000, 3).unwrap();
        assert!((d.mean(0) - 1.0).abs() < 0.05, "{}", d.mean(0));
    }

    #[test]
    fn fixed_seed_gives_identical_points() {
        let a = HaarSampler::new(42).sample();
        let b = HaarSampler::new(42).sample();
        assert_eq!(a.u.to_bits(), b.u.to_bits());
        assert_eq!(a.v.to_bits(), b.v.to_bits());
        assert_eq!(a.phi.to_bits(), b.phi.to_bits());
        assert_eq!(a.xi.map(f64::to_bits), b.xi.map(f64::to_bits));
    }

    #[test]
    fn shift_is_uniform() {
        let (n, bins) = (100_000, 20);
        let mut s = HaarSampler::new(5);
        let mut hist = vec![0u32; bins];
        for _ in 0..n {
            hist[(s.sample().xi[0] * bins as f64) as usize] += 1;
        }
        let p = 1.0 / bins as f64;
        let (mean, sd) = (n as f64 * p, (n as f64 * p * (1.0 - p)).sqrt());
        for h in hist {
            assert!((h as f64 - mean).abs() < 3.5 * sd, "{h}");
        }
    }

    #[test]
    fn degenerate_boxes_give_point_mass() {
        let d = limit_process_distribution(&IntervalBox::new(vec![]), 100, 1).unwrap();
        assert_eq!(d.probability(&[]), 1.0);
        let b = IntervalBox::single(Interval::half_open(0.3, 0.3).unwrap());
        let d = limit_process_distribution(&b, 1000, 1).unwrap();
        assert_eq!(d.probability(&[0]), 1.0);
    }

    #[test]
    fn siegel_targets() {
        let i = |a, b| Interval::half_open(a, b).unwrap();
        let same = siegel_moment_check(&IntervalBox::new(vec![i(0.0, 1.0), i(0.0, 1.0)]), 2000, 1).unwrap();
        let cross = same.lines.iter().find(|l| l.name == "E[k1 k2]").unwrap();
        let second = same.lines.iter().find(|l| l.name == "E[k1^2]").unwrap();
        assert_eq!(cross.estimate, second.estimate);

        let disjoint = siegel_moment_check(&IntervalBox::new(vec![i(0.0, 1.0), i(1.0, 2.0)]), 200, 1).unwrap();
        assert_eq!(disjoint.lines.last().unwrap().target, 1.0);
        let wide = siegel_moment_check(&IntervalBox::single(i(0.0, 2.0)), 200, 1).unwrap();
        assert_eq!(wide.lines[1].target, 6.0);
        assert!(siegel_moment_check(&IntervalBox::single(i(0.0, 1.0)), 10, 1).is_err());
    }

    #[test]
    fn seeds_are_reproducible() {
        let b = IntervalBox::single(Interval::half_open(-0.5, 0.5).unwrap());
        let a = limit_process_distribution(&b, 5000, 9).unwrap();
        let c = limit_process_distribution(&b, 5000, 9).unwrap();
        assert_eq!(a.marginal(0, 10), c.marginal(0, 10));
    }
}
