//! Piecewise-linear functions with optional jumps at breakpoints.
//!
//! Between consecutive breakpoints `x_k < x_{k+1}` the function is linear,
//! running from the right limit at `x_k` to the left limit at `x_{k+1}`.
//! At a breakpoint itself the value is the left limit or the right limit,
//! depending on [`Side`]. Outside the breakpoint range the function is
//! extended linearly.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Extension rule beyond the outermost breakpoint.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Extrapolation {
    Constant,
    Linear { slope: f64 },
}

impl Extrapolation {
    pub fn slope(&self) -> f64 {
        match self {
            Extrapolation::Constant => 0.0,
            Extrapolation::Linear { slope } => *slope,
        }
    }
}

/// Which one-sided limit a function takes at its breakpoints.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    Left,
    Right,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PiecewiseFn {
    breakpoints: Vec<f64>,
    /// Right limits at the breakpoints.
    values: Vec<f64>,
    left_limits: Vec<f64>,
    at_break: Side,
    left: Extrapolation,
    right: Extrapolation,
    #[serde(default)]
    nondecreasing: bool,
}

impl PiecewiseFn {
    pub fn new(
        breakpoints: Vec<f64>,
        values: Vec<f64>,
        left_limits: Vec<f64>,
        at_break: Side,
        left: Extrapolation,
        right: Extrapolation,
    ) -> Result<Self> {
        if breakpoints.is_empty() {
            return Err(Error::InvalidArgument("no breakpoints".into()));
        }
        if values.len() != breakpoints.len() || left_limits.len() != breakpoints.len() {
            return Err(Error::Shape(format!(
                "{} breakpoints, {} values, {} left limits",
                breakpoints.len(),
                values.len(),
                left_limits.len()
            )));
        }
        let finite = breakpoints
            .iter()
            .chain(&values)
            .chain(&left_limits)
            .chain([left.slope(), right.slope()].iter())
            .all(|v| v.is_finite());
        if !finite {
            return Err(Error::InvalidArgument("non-finite entry".into()));
        }
        if breakpoints.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidArgument(
                "breakpoints must be strictly increasing".into(),
            ));
        }
        Ok(Self {
            breakpoints,
            values,
            left_limits,
            at_break,
            left,
            right,
            nondecreasing: false,
        })
    }

    /// Continuous piecewise-linear interpolant.
    pub fn continuous(
        breakpoints: Vec<f64>,
        values: Vec<f64>,
        left: Extrapolation,
        right: Extrapolation,
    ) -> Result<Self> {
        let ll = values.clone();
        Self::new(breakpoints, values, ll, Side::Right, left, right)
    }

    /// Marks the function as non-decreasing after verifying it at every
    /// breakpoint and on both extrapolation rays.
    pub fn with_nondecreasing(mut self) -> Result<Self> {
        if !self.check_nondecreasing() {
            return Err(Error::InvalidArgument(
                "function is not non-decreasing".into(),
            ));
        }
        self.nondecreasing = true;
        Ok(self)
    }

    pub fn is_nondecreasing(&self) -> bool {
        self.nondecreasing
    }

    fn check_nondecreasing(&self) -> bool {
        if self.left.slope() < 0.0 || self.right.slope() < 0.0 {
            return false;
        }
        let n = self.breakpoints.len();
        (0..n).all(|k| self.left_limits[k] <= self.values[k])
            && (0..n.saturating_sub(1)).all(|k| self.values[k] <= self.left_limits[k + 1])
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn left_limits(&self) -> &[f64] {
        &self.left_limits
    }

    pub fn left_extrapolation(&self) -> Extrapolation {
        self.left
    }

    pub fn right_extrapolation(&self) -> Extrapolation {
        self.right
    }

    pub fn at_break(&self) -> Side {
        self.at_break
    }

    pub fn is_continuous(&self) -> bool {
        self.values
            .iter()
            .zip(&self.left_limits)
            .all(|(v, l)| (v - l).abs() <= 1e-12 * (1.0 + v.abs()))
    }

    pub fn eval(&self, x: f64) -> f64 {
        let xs = &self.breakpoints;
        let n = xs.len();
        if x < xs[0] {
            return self.left_limits[0] + self.left.slope() * (x - xs[0]);
        }
        if x > xs[n - 1] {
            return self.values[n - 1] + self.right.slope() * (x - xs[n - 1]);
        }
        // first index with xs[k] >= x
        let k = xs.partition_point(|&b| b < x);
        if xs[k] == x {
            return match self.at_break {
                Side::Left => self.left_limits[k],
                Side::Right => self.values[k],
            };
        }
        let (a, b) = (xs[k - 1], xs[k]);
        let (fa, fb) = (self.values[k - 1], self.left_limits[k]);
        fa + (fb - fa) * (x - a) / (b - a)
    }

    /// Slope of each linear piece, including the two rays:
    /// `[left ray, (x_0,x_1), …, right ray]`.
    pub fn slopes(&self) -> Vec<f64> {
        let xs = &self.breakpoints;
        let mut s = Vec::with_capacity(xs.len() + 1);
        s.push(self.left.slope());
        for k in 1..xs.len() {
            s.push((self.left_limits[k] - self.values[k - 1]) / (xs[k] - xs[k - 1]));
        }
        s.push(self.right.slope());
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eval_interior_and_rays() {
        let f = PiecewiseFn::continuous(
            vec![0.0, 1.0, 2.0],
            vec![1.0, 0.0, 0.0],
            Extrapolation::Linear { slope: -1.0 },
            Extrapolation::Constant,
        )
        .unwrap();
        assert_eq!(f.eval(-2.0), 3.0);
        assert_eq!(f.eval(0.5), 0.5);
        assert_eq!(f.eval(7.0), 0.0);
        assert_eq!(f.slopes(), vec![-1.0, -1.0, 0.0, 0.0]);
    }

    #[test]
    fn jumps_respect_side() {
        let f = PiecewiseFn::new(
            vec![0.0],
            vec![1.0],
            vec![0.0],
            Side::Left,
            Extrapolation::Constant,
            Extrapolation::Constant,
        )
        .unwrap()
        .with_nondecreasing()
        .unwrap();
        assert_eq!(f.eval(0.0), 0.0);
        assert_eq!(f.eval(1e-300), 1.0);
        assert!(!f.is_continuous());
    }

    #[test]
    fn rejects_unsorted() {
        let r = PiecewiseFn::continuous(
            vec![1.0, 0.0],
            vec![0.0, 0.0],
            Extrapolation::Constant,
            Extrapolation::Constant,
        );
        assert!(r.is_err());
    }
}
