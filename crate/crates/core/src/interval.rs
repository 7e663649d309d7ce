//! Open real intervals with a numeric evaluation margin.

use serde::Serialize;

use crate::error::{Error, Result};

/// An open interval `(lo, hi)` together with a relative inset `margin`.
///
/// The underlying theory works on open intervals; numerically we only ever
/// sample the closed subinterval
/// `[lo + margin * (hi - lo), hi - margin * (hi - lo)]`, which keeps endpoint
/// singularities (poles of `tan`, zeros of generators) out of every grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
    pub margin: f64,
}

/// Default relative inset used when none is given.
pub const DEFAULT_MARGIN: f64 = 1e-6;

impl Interval {
    /// New interval with the default margin. Requires `lo < hi`, both finite.
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        Self::with_margin(lo, hi, DEFAULT_MARGIN)
    }

    /// New interval with an explicit margin in `[0, 0.1)`.
    pub fn with_margin(lo: f64, hi: f64, margin: f64) -> Result<Self> {
        if !(lo.is_finite() && hi.is_finite() && lo < hi)
            || !(0.0..0.1).contains(&margin)
        {
            return Err(Error::InvalidInterval { lo, hi, margin });
        }
        Ok(Interval { lo, hi, margin })
    }

    pub fn length(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn midpoint(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }

    /// Bounds of the inset closed subinterval actually used for sampling.
    pub fn inset_bounds(&self) -> (f64, f64) {
        let pad = self.margin * self.length();
        (self.lo + pad, self.hi - pad)
    }

    /// `n` uniformly spaced points on the inset subinterval (endpoints
    /// included). Requires `n >= 2`.
    pub fn grid(&self, n: usize) -> Vec<f64> {
        assert!(n >= 2, "grid needs at least two points");
        let (a, b) = self.inset_bounds();
        let step = (b - a) / (n - 1) as f64;
        (0..n).map(|i| a + step * i as f64).collect()
    }

    /// `n` Chebyshev nodes on the inset subinterval, in increasing order.
    pub fn chebyshev_nodes(&self, n: usize) -> Vec<f64> {
        assert!(n >= 1);
        let (a, b) = self.inset_bounds();
        let mid = 0.5 * (a + b);
        let half = 0.5 * (b - a);
        let mut nodes: Vec<f64> = (0..n)
            .map(|i| {
                let theta = std::f64::consts::PI * (2 * i + 1) as f64 / (2 * n) as f64;
                mid + half * theta.cos()
            })
            .collect();
        nodes.reverse();
        nodes
    }

    /// Whether `x` lies in the closed inset subinterval (with a small slack
    /// for floating-point fuzz at the boundary).
    pub fn contains_inset(&self, x: f64) -> bool {
        let (a, b) = self.inset_bounds();
        let slack = 1e-12 * self.length().max(1.0);
        x >= a - slack && x <= b + slack
    }

    /// Intersection of two intervals, keeping the larger margin.
    pub fn intersect(&self, other: &Interval) -> Result<Interval> {
        let lo = self.lo.max(other.lo);
        let hi = self.hi.min(other.hi);
        Interval::with_margin(lo, hi, self.margin.max(other.margin))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_bounds() {
        assert!(Interval::new(1.0, 1.0).is_err());
        assert!(Interval::new(2.0, 1.0).is_err());
        assert!(Interval::new(f64::NAN, 1.0).is_err());
        assert!(Interval::with_margin(0.0, 1.0, 0.1).is_err());
        assert!(Interval::with_margin(0.0, 1.0, -0.01).is_err());
    }

    #[test]
    fn grid_includes_midpoint_for_odd_count() {
        let iv = Interval::with_margin(-1.0, 1.0, 0.0).unwrap();
        let g = iv.grid(257);
        assert_eq!(g.len(), 257);
        assert!((g[128] - 0.0).abs() < 1e-15);
        assert!((g[0] + 1.0).abs() < 1e-15);
        assert!((g[256] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn chebyshev_nodes_sorted_and_inside() {
        let iv = Interval::new(0.0, 2.0).unwrap();
        let nodes = iv.chebyshev_nodes(16);
        assert_eq!(nodes.len(), 16);
        for w in nodes.windows(2) {
            assert!(w[0] < w[1]);
        }
        let (a, b) = iv.inset_bounds();
        assert!(nodes[0] > a && nodes[15] < b);
    }
}
