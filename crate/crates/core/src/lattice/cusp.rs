//! Cusp-majorant functions on the space of affine lattices:
//!
//! ```text
//! F_{R,beta}(x) = sum over gamma in Gamma_inf \ Gamma of
//!                 sum_m f(((xi gamma^{-1})_1 + m) v_gamma^{1/2}) v_gamma^beta chi_R(v_gamma)
//! ```
//!
//! with `chi_R` the indicator of `[R, inf)`, together with the
//! `xi`-free majorant `F_bar`, its zeroth Fourier coefficient in `u` and
//! integrals along the horocycle.

use serde::Serialize;

use super::{AffineLattice, Triangle};
use crate::error::{Error, Result};
use crate::numeric::{adaptive_simpson, adaptive_simpson_panels, gcd};
use crate::numth::totient;
use crate::stats::TestFunction;

const QUAD_TOL: f64 = 1e-10;
const QUAD_DEPTH: u32 = 40;

/// Parameters `(f, R, beta)` of `F_{R,beta}`.
#[derive(Debug, Clone, Serialize)]
pub struct CuspFunction {
    pub f: TestFunction,
    pub r: f64,
    pub beta: f64,
}

impl CuspFunction {
    pub fn new(f: TestFunction, r: f64, beta: f64) -> Result<Self> {
        f.validate()?;
        if !(r >= 1.0) || !r.is_finite() {
            return Err(Error::domain(format!("cutoff R must be >= 1, got {r}")));
        }
        if !(0.0..1.5).contains(&beta) {
            return Err(Error::domain(format!("beta must lie in [0, 3/2), got {beta}")));
        }
        Ok(CuspFunction { f, r, beta })
    }

    /// Inner sum `sum_m f((x + m) s)`, `s > 0`.
    fn periodized(&self, x: f64, s: f64) -> f64 {
        let (a, b) = self.f.support();
        let lo = (a / s - x).ceil() as i64;
        let hi = (b / s - x).floor() as i64;
        (lo..=hi).map(|m| self.f.eval((x + m as f64) * s)).sum()
    }
}

/// A truncated coset sum. `exact` is false when the enumeration stopped
/// at the caller's bound before reaching all non-zero terms.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CosetSum {
    pub value: f64,
    pub exact: bool,
    /// Largest bottom-row entry `c` with a non-zero term.
    pub c_needed: u64,
}

/// Largest `c` for which some `(c, d)` has `v_gamma >= R`.
fn c_limit(v: f64, r: f64) -> u64 {
    (1.0 / (v * r)).sqrt().floor() as u64
}

/// Range of `d` with `(c u + d)^2 + c^2 v^2 <= v / R`, padded by one.
fn d_range(c: u64, u: f64, v: f64, r: f64) -> Option<(i64, i64)> {
    let cf = c as f64;
    let slack = v / r - cf * cf * v * v;
    if slack < 0.0 {
        return None;
    }
    let rho = slack.sqrt();
    Some(((-cf * u - rho).floor() as i64 - 1, (-cf * u + rho).ceil() as i64 + 1))
}

/// Visits every coset `Gamma_inf gamma` with `v_gamma >= R` and
/// `c <= c_bound`: the identity, then each coprime `(c, d)` with `c > 0`.
/// The callback receives `(c, d, v_gamma)`.
fn for_each_coset<F: FnMut(u64, i64, f64)>(u: f64, v: f64, r: f64, c_bound: u64, mut visit: F) -> CosetSum {
    let needed = c_limit(v, r);
    if v >= r {
        visit(0, 1, v);
    }
    for c in 1..=needed.min(c_bound) {
        let Some((dlo, dhi)) = d_range(c, u, v, r) else { continue };
        let cf = c as f64;
        for d in dlo..=dhi {
            if gcd(c, d.unsigned_abs()) != 1 {
                continue;
            }
            let w = cf * u + d as f64;
            let vg = v / (w * w + cf * cf * v * v);
            if vg >= r {
                visit(c, d, vg);
            }
        }
    }
    CosetSum { value: 0.0, exact: c_bound >= needed, c_needed: needed }
}

/// `F_{R,beta}(x)`, enumerating cosets with `c <= coset_bound`.
pub fn f_r_beta(x: &AffineLattice, cf: &CuspFunction, coset_bound: u64) -> CosetSum {
    let mut total = 0.0;
    let [x1, x2] = x.xi;
    let mut sum = for_each_coset(x.u, x.v, cf.r, coset_bound, |c, d, vg| {
        // First coordinate of xi gamma^{-1} for gamma with bottom row (c, d).
        let first = d as f64 * x1 - c as f64 * x2;
        total += cf.periodized(first, vg.sqrt()) * vg.powf(cf.beta);
    });
    sum.value = total;
    sum
}

/// `F_bar(tau) = v^beta chi_R(v) + 2 sum_{c >= 1} sum_{(c,d) = 1} v_gamma^beta chi_R(v_gamma)`.
pub fn f_bar(u: f64, v: f64, r: f64, beta: f64, coset_bound: u64) -> CosetSum {
    let mut total = 0.0;
    let mut sum = for_each_coset(u, v, r, coset_bound, |c, _, vg| {
        let weight = if c == 0 { 1.0 } else { 2.0 };
        total += weight * vg.powf(beta);
    });
    sum.value = total;
    sum
}

/// `int_0^1 F_bar(u + iv) du`
/// `= v^beta chi_R(v) + 2 v^{1-beta} sum_c phi(c) c^{-2 beta} int_{|t| <= t_c} (1 + t^2)^{-beta} dt`
/// with `t_c = sqrt(1/(R v c^2) - 1)`. Requires `0 <= beta < 1`.
pub fn zeroth_fourier_coefficient(v: f64, r: f64, beta: f64, c_max: u64) -> Result<CosetSum> {
    if !(0.0..1.0).contains(&beta) {
        return Err(Error::domain(format!("zeroth coefficient needs 0 <= beta < 1, got {beta}")));
    }
    if !(v > 0.0) || !(r >= 1.0) {
        return Err(Error::domain(format!("need v > 0 and R >= 1, got v={v}, R={r}")));
    }
    let needed = c_limit(v, r);
    let kernel = |t: f64| (1.0 + t * t).powf(-beta);
    let mut total = if v >= r { v.powf(beta) } else { 0.0 };
    for c in 1..=needed.min(c_max) {
        let cf = c as f64;
        let reach = 1.0 / (r * v * cf * cf) - 1.0;
        if reach <= 0.0 {
            continue;
        }
        let half = adaptive_simpson(&kernel, 0.0, reach.sqrt(), QUAD_TOL, QUAD_DEPTH);
        total += 2.0 * v.powf(1.0 - beta) * totient(c) as f64 * cf.powf(-2.0 * beta) * 2.0 * half;
    }
    Ok(CosetSum { value: total, exact: c_max >= needed, c_needed: needed })
}

/// `int_J F_{R,beta}(n~(u) a(v)) du` along the horocycle, where
/// `J = [-1, 1]` for `beta < 1` and `J = [-1, -theta v^eta] ∪ [theta v^eta, 1]`
/// otherwise (which requires `0 <= eta < beta / (2 (beta - 1))`).
///
/// Each coset term is integrated separately over its support with
/// `quadrature_points` initial panels.
pub fn escape_mass_integral(v: f64, cf: &CuspFunction, eta: f64, theta: f64, quadrature_points: usize) -> Result<f64> {
    if !(v > 0.0) {
        return Err(Error::domain(format!("height must be positive, got {v}")));
    }
    if !(theta > 0.0 && theta < 1.0) {
        return Err(Error::domain(format!("theta must lie in (0, 1), got {theta}")));
    }
    let pieces: Vec<(f64, f64)> = if cf.beta < 1.0 {
        vec![(-1.0, 1.0)]
    } else {
        let cap = if cf.beta > 1.0 { cf.beta / (2.0 * (cf.beta - 1.0)) } else { f64::INFINITY };
        if !(eta >= 0.0 && eta < cap) {
            return Err(Error::domain(format!("eta must lie in [0, {cap}) for beta = {}, got {eta}", cf.beta)));
        }
        let gap = theta * v.powf(eta);
        if gap >= 1.0 {
            return Ok(0.0);
        }
        vec![(-1.0, -gap), (gap, 1.0)]
    };
    let r = cf.r;
    let panels = quadrature_points.max(1);
    let integrate = |lo: f64, hi: f64, term: &dyn Fn(f64) -> f64| -> f64 {
        pieces
            .iter()
            .map(|&(a, b)| {
                let (a, b) = (a.max(lo), b.min(hi));
                if b > a {
                    adaptive_simpson_panels(term, a, b, QUAD_TOL, panels, QUAD_DEPTH)
                } else {
                    0.0
                }
            })
            .sum()
    };

    let mut total = 0.0;
    if v >= r {
        let s = v.sqrt();
        let weight = v.powf(cf.beta);
        total += integrate(-1.0, 1.0, &|u: f64| cf.periodized(0.5 * u, s) * weight);
    }
    for c in 1..=c_limit(v, r) {
        let cf_ = c as f64;
        let slack = v / r - cf_ * cf_ * v * v;
        if slack <= 0.0 {
            continue;
        }
        // Support of the (c, d) term in u: |c u + d| <= sqrt(slack).
        let half = slack.sqrt() / cf_;
        let dmax = (cf_ * (1.0 + half)).ceil() as i64;
        for d in -dmax..=dmax {
            if gcd(c, d.unsigned_abs()) != 1 {
                continue;
            }
            let centre = -(d as f64) / cf_;
            let (lo, hi) = (centre - half, centre + half);
            if hi <= -1.0 || lo >= 1.0 {
                continue;
            }
            let term = |u: f64| {
                let w = cf_ * u + d as f64;
                let vg = v / (w * w + cf_ * cf_ * v * v);
                if vg < r {
                    return 0.0;
                }
                // xi gamma^{-1} first coordinate on the horocycle: c u^2/4 + d u/2.
                let first = 0.25 * cf_ * u * u + 0.5 * d as f64 * u;
                cf.periodized(first, vg.sqrt()) * vg.powf(cf.beta)
            };
            total += integrate(lo, hi, &term);
        }
    }
    Ok(total)
}

/// A choice of `(f, R, beta)` for which `F_{R,beta}(x) >= N(x)^sigma`
/// whenever the triangle count `N(x)` reaches `threshold`.
///
/// `f` equals `(diam + 1)^sigma` on `[-r, r]`, `r` the triangle's radius,
/// and decays linearly to 0 at `2r`; `beta = sigma / 2` and `R = 4 r^2 + 1`.
/// If the lattice has a representative with `v >= R` its points in the
/// triangle lie on one line, at most `diam sqrt(v) + 1` of them, and the
/// identity term of that representative already dominates. Otherwise
/// every representative has `v < R` and the count stays below `threshold`.
#[derive(Debug, Clone, Serialize)]
pub struct Majorant {
    pub cusp: CuspFunction,
    pub sigma: f64,
    pub threshold: u64,
}

impl Majorant {
    pub fn for_triangle(tri: &Triangle, sigma: f64) -> Result<Self> {
        if !(0.0..3.0).contains(&sigma) {
            return Err(Error::domain(format!("sigma must lie in [0, 3), got {sigma}")));
        }
        let radius = tri.radius();
        let diam = tri.diameter();
        let height = (diam + 1.0).powf(sigma);
        let f = TestFunction::piecewise_linear(vec![
            (-2.0 * radius, 0.0),
            (-radius, height),
            (radius, height),
            (2.0 * radius, 0.0),
        ])?;
        let r = 4.0 * radius * radius + 1.0;
        // Reduced bases have v >= sqrt(3)/2, so lines are at least
        // (sqrt(3)/2)^{1/2} apart.
        let lines = (2.0 * radius / 0.75f64.sqrt().sqrt()).floor() + 1.0;
        let per_line = (diam * r.sqrt()).floor() + 1.0;
        Ok(Majorant { cusp: CuspFunction::new(f, r, sigma / 2.0)?, sigma, threshold: (lines * per_line) as u64 + 1 })
    }
}
