use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::interval::Interval;

/// A compactly supported real function on the line.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TestFunction {
    /// Indicator of an interval; the interval's flags decide the endpoints.
    Indicator { support: Interval },
    /// `height * max(0, 1 - |x - center| / half_width)`.
    Triangle { center: f64, half_width: f64, height: f64 },
    /// Continuous piecewise-linear interpolation of `(x, y)` knots, zero
    /// outside the first and last knot.
    PiecewiseLinear { knots: Vec<(f64, f64)> },
}

impl TestFunction {
    pub fn indicator(support: Interval) -> Self {
        TestFunction::Indicator { support }
    }

    /// Indicator of the closed interval `[a, b]`.
    pub fn indicator_closed(a: f64, b: f64) -> Result<Self> {
        Ok(TestFunction::Indicator { support: Interval::closed(a, b)? })
    }

    /// `max(0, 1 - |x|)`.
    pub fn unit_triangle() -> Self {
        TestFunction::Triangle { center: 0.0, half_width: 1.0, height: 1.0 }
    }

    pub fn piecewise_linear(knots: Vec<(f64, f64)>) -> Result<Self> {
        let f = TestFunction::PiecewiseLinear { knots };
        f.validate()?;
        Ok(f)
    }

    /// The zero function, supported on `[-1, 1]`.
    pub fn zero() -> Self {
        TestFunction::PiecewiseLinear { knots: vec![(-1.0, 0.0), (1.0, 0.0)] }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            TestFunction::Indicator { support } => {
                if !support.left.is_finite() || !support.right.is_finite() || support.left > support.right {
                    return Err(Error::domain("indicator support must be a bounded interval"));
                }
            }
            TestFunction::Triangle { center, half_width, height } => {
                if !center.is_finite() || !height.is_finite() || !(*half_width > 0.0 && half_width.is_finite()) {
                    return Err(Error::domain("triangle needs finite center/height and positive half width"));
                }
            }
            TestFunction::PiecewiseLinear { knots } => {
                if knots.len() < 2 {
                    return Err(Error::domain("piecewise-linear function needs at least two knots"));
                }
                if knots.iter().any(|(x, y)| !x.is_finite() || !y.is_finite()) {
                    return Err(Error::domain("unbounded piecewise-linear knot"));
                }
                if knots.windows(2).any(|w| w[1].0 <= w[0].0) {
                    return Err(Error::domain("knots must be strictly increasing"));
                }
                let (first, last) = (knots[0].1, knots[knots.len() - 1].1);
                if first != 0.0 || last != 0.0 {
                    return Err(Error::domain("piecewise-linear function must vanish at its end knots"));
                }
            }
        }
        Ok(())
    }

    /// `[a, b]` outside of which the function vanishes.
    pub fn support(&self) -> (f64, f64) {
        match self {
            TestFunction::Indicator { support } => (support.left, support.right),
            TestFunction::Triangle { center, half_width, .. } => (center - half_width, center + half_width),
            TestFunction::PiecewiseLinear { knots } => (knots[0].0, knots[knots.len() - 1].0),
        }
    }

    pub fn eval(&self, x: f64) -> f64 {
        match self {
            TestFunction::Indicator { support } => {
                if support.contains(x) {
                    1.0
                } else {
                    0.0
                }
            }
            TestFunction::Triangle { center, half_width, height } => {
                height * (1.0 - (x - center).abs() / half_width).max(0.0)
            }
            TestFunction::PiecewiseLinear { knots } => {
                let (a, b) = (knots[0].0, knots[knots.len() - 1].0);
                if x <= a || x >= b {
                    return 0.0;
                }
                let i = knots.partition_point(|k| k.0 <= x);
                let (x0, y0) = knots[i - 1];
                let (x1, y1) = knots[i];
                y0 + (y1 - y0) * (x - x0) / (x1 - x0)
            }
        }
    }

    /// Exact integral over the line.
    pub fn integral(&self) -> f64 {
        match self {
            TestFunction::Indicator { support } => support.length(),
            TestFunction::Triangle { half_width, height, .. } => height * half_width,
            TestFunction::PiecewiseLinear { knots } => {
                knots.windows(2).map(|w| 0.5 * (w[0].1 + w[1].1) * (w[1].0 - w[0].0)).sum()
            }
        }
    }

    pub fn max_abs_support(&self) -> f64 {
        let (a, b) = self.support();
        a.abs().max(b.abs())
    }

    /// Sum of the two functions as a piecewise-linear function, when both
    /// are continuous.
    pub fn add(&self, other: &TestFunction) -> Option<TestFunction> {
        let a = self.as_knots()?;
        let b = other.as_knots()?;
        let mut xs: Vec<f64> = a.iter().chain(b.iter()).map(|k| k.0).collect();
        xs.sort_by(f64::total_cmp);
        xs.dedup();
        let last = xs.len() - 1;
        let knots = xs
            .into_iter()
            .enumerate()
            .map(|(i, x)| (x, if i == 0 || i == last { 0.0 } else { self.eval(x) + other.eval(x) }))
            .collect();
        Some(TestFunction::PiecewiseLinear { knots })
    }

    fn as_knots(&self) -> Option<Vec<(f64, f64)>> {
        match self {
            TestFunction::Indicator { .. } => None,
            TestFunction::Triangle { center, half_width, height } => Some(vec![
                (center - half_width, 0.0),
                (*center, *height),
                (center + half_width, 0.0),
            ]),
            TestFunction::PiecewiseLinear { knots } => Some(knots.clone()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn evaluation_and_support() {
        let t = TestFunction::unit_triangle();
        assert_eq!(t.eval(0.25), 0.75);
        assert_eq!(t.eval(-0.875), 0.125);
        assert_eq!(t.eval(1.5), 0.0);
        assert_eq!(t.support(), (-1.0, 1.0));
        assert_eq!(t.integral(), 1.0);

        let ind = TestFunction::indicator_closed(-0.5, 0.5).unwrap();
        assert_eq!(ind.eval(0.5), 1.0);
        let half = TestFunction::indicator(Interval::half_open(-0.5, 0.5).unwrap());
        assert_eq!(half.eval(0.5), 0.0);

        let pl = TestFunction::piecewise_linear(vec![(-2.0, 0.0), (-1.0, 3.0), (1.0, 3.0), (2.0, 0.0)]).unwrap();
        assert_eq!(pl.eval(0.0), 3.0);
        assert_eq!(pl.eval(1.5), 1.5);
        assert_eq!(pl.integral(), 9.0);
    }

    #[test]
    fn invalid_functions() {
        assert!(TestFunction::piecewise_linear(vec![(0.0, 1.0), (1.0, 0.0)]).is_err());
        assert!(TestFunction::piecewise_linear(vec![(1.0, 0.0), (0.0, 0.0)]).is_err());
        let t = TestFunction::Triangle { center: 0.0, half_width: 0.0, height: 1.0 };
        assert!(t.validate().is_err());
    }

    #[test]
    fn sum_of_triangles() {
        let a = TestFunction::unit_triangle();
        let b = TestFunction::Triangle { center: 0.5, half_width: 2.0, height: 0.5 };
        let s = a.add(&b).unwrap();
        for x in [-2.0, -0.7, 0.0, 0.3, 1.1, 2.4] {
            assert!((s.eval(x) - a.eval(x) - b.eval(x)).abs() < 1e-15);
        }
    }
}
