//! Bounded real intervals with explicit endpoint conventions, and boxes of
//! them.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A bounded interval of the real line.
///
/// Windows on the circle default to half-open `[left, right)` so that a grid
/// of adjacent windows partitions it exactly.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub left: f64,
    pub right: f64,
    #[serde(default = "default_true")]
    pub left_closed: bool,
    #[serde(default)]
    pub right_closed: bool,
}

fn default_true() -> bool {
    true
}

impl Interval {
    pub fn new(left: f64, right: f64, left_closed: bool, right_closed: bool) -> Result<Self> {
        if !left.is_finite() || !right.is_finite() {
            return Err(Error::domain(format!("unbounded interval [{left}, {right}]")));
        }
        if left > right {
            return Err(Error::domain(format!("interval with left {left} > right {right}")));
        }
        Ok(Interval { left, right, left_closed, right_closed })
    }

    /// `[left, right)`
    pub fn half_open(left: f64, right: f64) -> Result<Self> {
        Self::new(left, right, true, false)
    }

    /// `[left, right]`
    pub fn closed(left: f64, right: f64) -> Result<Self> {
        Self::new(left, right, true, true)
    }

    pub fn length(&self) -> f64 {
        self.right - self.left
    }

    pub fn is_empty(&self) -> bool {
        self.left == self.right && !(self.left_closed && self.right_closed)
    }

    pub fn contains(&self, x: f64) -> bool {
        let lo = if self.left_closed { x >= self.left } else { x > self.left };
        let hi = if self.right_closed { x <= self.right } else { x < self.right };
        lo && hi
    }

    /// Image under `x -> -x`; endpoint flags travel with their endpoints.
    pub fn reflect(&self) -> Self {
        Interval {
            left: -self.right,
            right: -self.left,
            left_closed: self.right_closed,
            right_closed: self.left_closed,
        }
    }

    /// Image under `x -> s x` for `s >= 0`.
    pub fn scale(&self, s: f64) -> Self {
        Interval { left: self.left * s, right: self.right * s, ..*self }
    }

    pub fn with_closure(&self) -> Self {
        Interval { left_closed: true, right_closed: true, ..*self }
    }

    /// Length of the intersection with `other`.
    pub fn overlap(&self, other: &Interval) -> f64 {
        (self.right.min(other.right) - self.left.max(other.left)).max(0.0)
    }

    pub fn max_abs(&self) -> f64 {
        self.left.abs().max(self.right.abs())
    }
}

/// Product `I_1 x ... x I_m` of bounded intervals.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct IntervalBox {
    pub intervals: Vec<Interval>,
}

impl IntervalBox {
    pub fn new(intervals: Vec<Interval>) -> Self {
        IntervalBox { intervals }
    }

    pub fn single(i: Interval) -> Self {
        IntervalBox { intervals: vec![i] }
    }

    pub fn dim(&self) -> usize {
        self.intervals.len()
    }

    pub fn lengths(&self) -> Vec<f64> {
        self.intervals.iter().map(Interval::length).collect()
    }
}
