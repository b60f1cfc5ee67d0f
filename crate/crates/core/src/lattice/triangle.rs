//! Counting affine lattice points in the triangles
//! `{(x, y) : 0 < x < w, y in 2xI}`.

use serde::Serialize;

use super::{horocycle_point, AffineLattice};
use crate::error::{Error, Result};
use crate::interval::Interval;
use crate::numeric::isqrt;

/// Largest tolerated estimate of the round-off in lattice coordinates.
const CONDITIONING_LIMIT: f64 = 1e-6;

/// The open triangle `{(x, y) : 0 < x < width, y in 2x * profile}`.
///
/// The `y` constraint inherits the endpoint flags of `profile`; the lines
/// `x = 0` and `x = width` are excluded.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Triangle {
    pub profile: Interval,
    pub width: f64,
}

impl Triangle {
    /// Width 2, area `4|I|`: the triangle a window of the sequence maps into.
    pub fn new(profile: Interval) -> Self {
        Triangle { profile, width: 2.0 }
    }

    /// Width 1, area `|I|`: the triangle whose counts give the limit process.
    pub fn unit(profile: Interval) -> Self {
        Triangle { profile, width: 1.0 }
    }

    pub fn with_width(profile: Interval, width: f64) -> Result<Self> {
        if !(width > 0.0) || !width.is_finite() {
            return Err(Error::domain(format!("triangle width must be positive, got {width}")));
        }
        Ok(Triangle { profile, width })
    }

    pub fn area(&self) -> f64 {
        self.width * self.width * self.profile.length()
    }

    pub fn vertices(&self) -> [[f64; 2]; 3] {
        let w = self.width;
        [[0.0, 0.0], [w, 2.0 * w * self.profile.left], [w, 2.0 * w * self.profile.right]]
    }

    /// Largest distance from the origin to a point of the triangle.
    pub fn radius(&self) -> f64 {
        self.vertices().iter().map(|p| p[0].hypot(p[1])).fold(0.0, f64::max)
    }

    /// Largest distance between two points of the triangle.
    pub fn diameter(&self) -> f64 {
        let v = self.vertices();
        let mut d: f64 = 0.0;
        for i in 0..3 {
            for j in i + 1..3 {
                d = d.max((v[i][0] - v[j][0]).hypot(v[i][1] - v[j][1]));
            }
        }
        d
    }

    pub fn contains(&self, p: [f64; 2]) -> bool {
        p[0] > 0.0 && p[0] < self.width && self.profile.contains(p[1] / (2.0 * p[0]))
    }

    /// Half-planes `g . p + offset >= 0` (or `> 0` when strict) cutting out
    /// the triangle.
    fn constraints(&self) -> [([f64; 2], f64, bool); 4] {
        let (p, q) = (self.profile.left, self.profile.right);
        [
            ([1.0, 0.0], 0.0, true),
            ([-1.0, 0.0], self.width, true),
            ([-2.0 * p, 1.0], 0.0, !self.profile.left_closed),
            ([2.0 * q, -1.0], 0.0, !self.profile.right_closed),
        ]
    }
}

/// `#(Z^2 g ∩ triangle)`.
///
/// Walks the lattice lines parallel to whichever basis vector gives fewer
/// lines through the triangle and solves the linear constraints on each.
pub fn count_in_triangle(x: &AffineLattice, tri: &Triangle) -> Result<u64> {
    if tri.profile.is_empty() {
        return Ok(0);
    }
    let x = x.reduced();
    let m = x.matrix();
    let rows = [[m.a, m.b], [m.c, m.d]];
    let xi = x.xi;

    // Lattice coordinates s = p M^{-1} of the vertices.
    let (mut lo, mut hi) = ([f64::INFINITY; 2], [f64::NEG_INFINITY; 2]);
    for p in tri.vertices() {
        let s = [p[0] * m.d - p[1] * m.c, -p[0] * m.b + p[1] * m.a];
        for k in 0..2 {
            lo[k] = lo[k].min(s[k] - xi[k]);
            hi[k] = hi[k].max(s[k] - xi[k]);
        }
    }
    let range = |k: usize| ((lo[k] - 1e-9).ceil() as i64, (hi[k] + 1e-9).floor() as i64);
    let ranges = [range(0), range(1)];
    let len = |(a, b): (i64, i64)| if b < a { 0 } else { b - a + 1 };
    let (outer, inner) = if len(ranges[0]) <= len(ranges[1]) { (0, 1) } else { (1, 0) };
    let constraints = tri.constraints();
    let mut total = 0u64;
    let mut worst: f64 = 0.0;
    for i in ranges[outer].0..=ranges[outer].1 {
        // Base point with inner index 0, moving along rows[inner].
        let t = i as f64 + xi[outer];
        let base = [t * rows[outer][0] + xi[inner] * rows[inner][0], t * rows[outer][1] + xi[inner] * rows[inner][1]];
        let dir = rows[inner];
        let (mut jlo, mut jhi) = ranges[inner];
        for (g, off, strict) in constraints {
            let g0 = g[0] * base[0] + g[1] * base[1] + off;
            let g1 = g[0] * dir[0] + g[1] * dir[1];
            if g1 == 0.0 {
                if g0 < 0.0 || (strict && g0 == 0.0) {
                    jhi = jlo - 1;
                }
                continue;
            }
            let bound = -g0 / g1;
            if bound >= (jlo - 1) as f64 && bound <= (jhi + 1) as f64 {
                let scale = (g[0].abs() + g[1].abs()) * (base[0].abs() + base[1].abs()) + off.abs();
                worst = worst.max(4.0 * f64::EPSILON * scale / g1.abs() + f64::EPSILON * bound.abs());
            }
            if g1 > 0.0 {
                let b = if strict { bound.floor() + 1.0 } else { bound.ceil() };
                jlo = jlo.max(b as i64);
            } else {
                let b = if strict { bound.ceil() - 1.0 } else { bound.floor() };
                jhi = jhi.min(b as i64);
            }
        }
        if jhi >= jlo {
            total += (jhi - jlo + 1) as u64;
        }
    }
    if worst > CONDITIONING_LIMIT {
        return Err(Error::Conditioning(worst));
    }
    Ok(total)
}

/// Lattice-side bound for the window count `N_T(I, alpha)`:
///
/// `#(Z^2 n~(2 alpha) a(v) ∩ c(-I)) + #(Z^2 n~(-2 alpha) a(v) ∩ c(-I))`
///
/// with `v = (1 + rho/N)/N`, `rho = max |I|` and `-I` taken closed. The
/// first term covers `k + alpha > 0`, the second `k + alpha < 0`. Valid when
/// the closure of `I` contains 0 and `T >= crude_bound_threshold(I)`.
pub fn crude_window_bound(t: u64, interval: &Interval, alpha: f64) -> Result<u64> {
    check_contains_zero(interval)?;
    let n = t.saturating_sub(isqrt(t));
    if n == 0 {
        return Err(Error::EmptySequence(format!("T = {t}")));
    }
    let n = n as f64;
    let v = (1.0 + interval.max_abs() / n) / n;
    let tri = Triangle::new(interval.reflect().with_closure());
    let plus = count_in_triangle(&horocycle_point(2.0 * alpha, v)?, &tri)?;
    let minus = count_in_triangle(&horocycle_point(-2.0 * alpha, v)?, &tri)?;
    Ok(plus + minus)
}

/// Smallest `T0` such that [`crude_window_bound`] dominates the window
/// count for every `T >= T0`.
pub fn crude_bound_threshold(interval: &Interval) -> Result<u64> {
    check_contains_zero(interval)?;
    let rho = interval.max_abs();
    let ok = |t: u64| {
        let n = (t - isqrt(t)) as f64;
        if n < 1.0 || interval.length() >= n || rho / n > 0.9 {
            return false;
        }
        let e = rho / n;
        let reach = (t as f64).sqrt() + e;
        reach * reach * (1.0 + e) / n < 4.0
    };
    let limit = 64 * ((rho + 2.0) * (rho + 2.0)).ceil() as u64 + 10_000;
    let last_bad = (1..=limit).rev().find(|&t| !ok(t)).unwrap_or(0);
    Ok(last_bad + 1)
}

fn check_contains_zero(interval: &Interval) -> Result<()> {
    if interval.left > 0.0 || interval.right < 0.0 {
        return Err(Error::domain(format!(
            "window [{}, {}] must contain 0 in its closure",
            interval.left, interval.right
        )));
    }
    Ok(())
}
