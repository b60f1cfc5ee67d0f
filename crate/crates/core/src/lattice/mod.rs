//! Affine lattices `Z^2 g`, `g in SL(2,R) x R^2`, in Iwasawa coordinates.
//!
//! A point `(tau, phi; xi)` with `tau = u + iv` stands for
//! `g = (1, xi) n(u) a(v) k(phi)`, where
//!
//! ```text
//! n(u) = [1 u; 0 1],  a(v) = [v^{1/2} 0; 0 v^{-1/2}],  k(phi) = [cos -sin; sin cos]
//! ```
//!
//! and the lattice itself is `{(m + xi) M : m in Z^2}` with `M = n(u)a(v)k(phi)`.

mod cusp;
mod haar;
mod triangle;

use std::f64::consts::TAU;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};

pub use cusp::{
    escape_mass_integral, f_bar, f_r_beta, zeroth_fourier_coefficient, CosetSum, CuspFunction, Majorant,
};
pub use haar::{limit_process_distribution, siegel_moment_check, HaarSampler, SiegelReport};
pub use triangle::{count_in_triangle, crude_bound_threshold, crude_window_bound, Triangle};

/// A 2x2 real matrix `[a b; c d]` acting on row vectors from the right.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Mat2 {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
}

impl Mat2 {
    pub const IDENTITY: Mat2 = Mat2 { a: 1.0, b: 0.0, c: 0.0, d: 1.0 };

    pub fn new(a: f64, b: f64, c: f64, d: f64) -> Self {
        Mat2 { a, b, c, d }
    }

    pub fn det(&self) -> f64 {
        self.a * self.d - self.b * self.c
    }

    pub fn mul(&self, o: &Mat2) -> Mat2 {
        Mat2 {
            a: self.a * o.a + self.b * o.c,
            b: self.a * o.b + self.b * o.d,
            c: self.c * o.a + self.d * o.c,
            d: self.c * o.b + self.d * o.d,
        }
    }

    /// Inverse of a unimodular matrix.
    pub fn inverse_unimodular(&self) -> Mat2 {
        Mat2 { a: self.d, b: -self.b, c: -self.c, d: self.a }
    }

    /// Row vector times matrix.
    pub fn apply(&self, x: [f64; 2]) -> [f64; 2] {
        [x[0] * self.a + x[1] * self.c, x[0] * self.b + x[1] * self.d]
    }

    pub fn translation(u: f64) -> Mat2 {
        Mat2::new(1.0, u, 0.0, 1.0)
    }

    pub fn diagonal(v: f64) -> Mat2 {
        let s = v.sqrt();
        Mat2::new(s, 0.0, 0.0, 1.0 / s)
    }

    pub fn rotation(phi: f64) -> Mat2 {
        let (s, c) = phi.sin_cos();
        Mat2::new(c, -s, s, c)
    }

    pub fn max_abs(&self) -> f64 {
        self.a.abs().max(self.b.abs()).max(self.c.abs()).max(self.d.abs())
    }
}

/// A point of `G' = SL(2,R) x R^2` in coordinates `(tau, phi; xi)`.
///
/// `xi` is kept as a real vector so that the left action of non-integral
/// elements stays well defined; [`AffineLattice::reduced`] gives the torus
/// representative, which determines the same lattice.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AffineLattice {
    pub u: f64,
    pub v: f64,
    pub phi: f64,
    pub xi: [f64; 2],
}

impl AffineLattice {
    pub fn new(u: f64, v: f64, phi: f64, xi: [f64; 2]) -> Result<Self> {
        if !(v > 0.0) || !v.is_finite() || !u.is_finite() || !phi.is_finite() {
            return Err(Error::domain(format!("need finite u, phi and v > 0, got u={u}, v={v}, phi={phi}")));
        }
        Ok(AffineLattice { u, v, phi: phi.rem_euclid(TAU), xi })
    }

    pub fn tau(&self) -> Complex64 {
        Complex64::new(self.u, self.v)
    }

    /// `xi` reduced to `[0, 1)^2`.
    pub fn reduced(&self) -> AffineLattice {
        AffineLattice { xi: [frac(self.xi[0]), frac(self.xi[1])], ..*self }
    }

    /// `M = n(u) a(v) k(phi)`.
    pub fn matrix(&self) -> Mat2 {
        Mat2::translation(self.u).mul(&Mat2::diagonal(self.v)).mul(&Mat2::rotation(self.phi))
    }

    /// Translation part of `g` as an element `(M, xi M)` of `G'`.
    pub fn translation_part(&self) -> [f64; 2] {
        self.matrix().apply(self.xi)
    }

    pub fn from_matrix(m: &Mat2, xi: [f64; 2]) -> Result<Self> {
        let (tau, phi) = iwasawa_decompose(m)?;
        AffineLattice::new(tau.re, tau.im, phi, xi)
    }
}

fn frac(x: f64) -> f64 {
    let r = x - x.floor();
    if r >= 1.0 {
        0.0
    } else {
        r
    }
}

/// Unique `(tau, phi)` with `M = n(u) a(v) k(phi)`, `tau = u + iv`.
pub fn iwasawa_decompose(m: &Mat2) -> Result<(Complex64, f64)> {
    let det = m.det();
    if !((det - 1.0).abs() < 1e-9) {
        return Err(Error::domain(format!("matrix has determinant {det}, expected 1")));
    }
    let norm = m.c * m.c + m.d * m.d;
    let v = 1.0 / norm;
    let u = (m.a * m.c + m.b * m.d) / norm;
    let phi = m.c.atan2(m.d).rem_euclid(TAU);
    Ok((Complex64::new(u, v), phi))
}

/// An element acting on the left: `tau -> (a tau + b)/(c tau + d)`,
/// `phi -> phi + arg(c tau + d)`, `xi -> xi A^{-1} - shift`.
///
/// When `matrix` is integral and `shift` is in `Z^2` the element lies in
/// `Gamma' = SL(2,Z) x Z^2` and preserves the lattice `Z^2 g`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GroupElement {
    pub matrix: Mat2,
    pub shift: [f64; 2],
}

impl GroupElement {
    pub fn new(matrix: Mat2, shift: [f64; 2]) -> Result<Self> {
        if !((matrix.det() - 1.0).abs() < 1e-9) {
            return Err(Error::domain(format!("group element has determinant {}", matrix.det())));
        }
        Ok(GroupElement { matrix, shift })
    }

    pub fn identity() -> Self {
        GroupElement { matrix: Mat2::IDENTITY, shift: [0.0, 0.0] }
    }

    /// `self * other`, so that acting by the product equals acting by
    /// `other` first and then by `self`.
    pub fn compose(&self, other: &GroupElement) -> GroupElement {
        let inv = self.matrix.inverse_unimodular();
        let moved = inv.apply(other.shift);
        GroupElement {
            matrix: self.matrix.mul(&other.matrix),
            shift: [self.shift[0] + moved[0], self.shift[1] + moved[1]],
        }
    }
}

/// Left action `g . (tau, phi; xi)`.
pub fn group_action(g: &GroupElement, x: &AffineLattice) -> AffineLattice {
    let Mat2 { a, b, c, d } = g.matrix;
    let tau = x.tau();
    let j = tau * c + d;
    let new_tau = (tau * a + b) / j;
    let moved = g.matrix.inverse_unimodular().apply(x.xi);
    AffineLattice {
        u: new_tau.re,
        v: new_tau.im,
        phi: (x.phi + j.arg()).rem_euclid(TAU),
        xi: [moved[0] - g.shift[0], moved[1] - g.shift[1]],
    }
}

/// `n~(u) a(v) = (u + iv, 0; (u/2, -u^2/4))`, with `xi` reduced mod 1.
pub fn horocycle_point(u: f64, v: f64) -> Result<AffineLattice> {
    if !(v > 0.0) {
        return Err(Error::domain(format!("horocycle height must be positive, got {v}")));
    }
    Ok(AffineLattice::new(u, v, 0.0, [0.5 * u, -0.25 * u * u])?.reduced())
}
