//! Weighted quasi-arithmetic means A_φ and Bajraktarević means B_{g,f}.

use crate::error::Error;
use crate::generator::{Generator, GeneratorRef, Ratio};
use crate::interval::Interval;
use crate::tolerances::GRID_POINTS;
use std::sync::Arc;

/// Points with nonnegative weights, at least one of them positive.
#[derive(Debug, Clone)]
pub struct WeightedSample {
    points: Vec<f64>,
    weights: Vec<f64>,
}

impl WeightedSample {
    pub fn new(points: Vec<f64>, weights: Vec<f64>) -> crate::Result<Self> {
        if points.is_empty() {
            return Err(Error::InvalidSample("no points".to_string()));
        }
        if points.len() != weights.len() {
            return Err(Error::InvalidSample(format!(
                "{} points but {} weights",
                points.len(),
                weights.len()
            )));
        }
        if points.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidSample("non-finite point".to_string()));
        }
        if weights.iter().any(|w| !w.is_finite() || *w < 0.0) {
            return Err(Error::InvalidSample(
                "weights must be finite and nonnegative".to_string(),
            ));
        }
        if weights.iter().sum::<f64>() <= 0.0 {
            return Err(Error::InvalidSample("weights sum to zero".to_string()));
        }
        Ok(WeightedSample { points, weights })
    }

    /// Equal weights 1 on every point.
    pub fn unweighted(points: Vec<f64>) -> crate::Result<Self> {
        let weights = vec![1.0; points.len()];
        WeightedSample::new(points, weights)
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Entries with strictly positive weight, the ones the mean may depend on.
    pub fn positive_entries(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.points
            .iter()
            .zip(&self.weights)
            .filter(|(_, w)| **w > 0.0)
            .map(|(x, w)| (*x, *w))
    }

    /// Min and max over the positive-weight points.
    pub fn positive_bounds(&self) -> (f64, f64) {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for (x, _) in self.positive_entries() {
            lo = lo.min(x);
            hi = hi.max(x);
        }
        (lo, hi)
    }

    /// All points strictly inside the open interval.
    pub fn fits_in(&self, interval: &Interval) -> bool {
        self.points
            .iter()
            .all(|x| *x > interval.lo && *x < interval.hi)
    }
}

/// A pair (f, g) of generators on a common domain, validated for the base
/// regularity class: f positive, g/f strictly monotone on the sampled grid.
pub struct GeneratorPair {
    f: GeneratorRef,
    g: GeneratorRef,
    domain: Interval,
}

/// Strict monotonicity on the sampled grid: sign-constant first derivative
/// when jets are available, strictly sorted values otherwise.
pub(crate) fn check_strictly_monotone(gen: &dyn Generator, grid: &[f64]) -> crate::Result<()> {
    if gen.has_derivatives() {
        let mut sign = 0.0;
        for &x in grid {
            let d = gen.jet(x)?.derivative(1)?;
            if d == 0.0 {
                return Err(Error::Precondition(format!(
                    "{} has vanishing derivative at x = {x}",
                    gen.name()
                )));
            }
            if sign == 0.0 {
                sign = d.signum();
            } else if d.signum() != sign {
                return Err(Error::Precondition(format!(
                    "{} is not strictly monotone: derivative changes sign near x = {x}",
                    gen.name()
                )));
            }
        }
    } else {
        let mut values = Vec::with_capacity(grid.len());
        for &x in grid {
            values.push(gen.value(x)?);
        }
        let increasing = values.windows(2).all(|w| w[1] > w[0]);
        let decreasing = values.windows(2).all(|w| w[1] < w[0]);
        if !increasing && !decreasing {
            return Err(Error::Precondition(format!(
                "{} is not strictly monotone on the sampled grid",
                gen.name()
            )));
        }
    }
    Ok(())
}

impl GeneratorPair {
    pub fn new(f: GeneratorRef, g: GeneratorRef, domain: Interval) -> crate::Result<Self> {
        let grid = domain.grid(GRID_POINTS);
        for &x in &grid {
            let fv = f.value(x)?;
            if fv <= 0.0 {
                return Err(Error::FVanishes { x });
            }
        }
        let ratio = Ratio::new(Arc::clone(&g), Arc::clone(&f));
        check_strictly_monotone(&ratio, &grid)?;
        Ok(GeneratorPair { f, g, domain })
    }

    /// Build a pair without class validation. Mean evaluation still assumes
    /// the validated class; this constructor exists for span comparisons,
    /// where the compared pair need not be positive or monotone.
    pub fn unchecked(f: GeneratorRef, g: GeneratorRef, domain: Interval) -> Self {
        GeneratorPair { f, g, domain }
    }

    pub fn f(&self) -> &GeneratorRef {
        &self.f
    }

    pub fn g(&self) -> &GeneratorRef {
        &self.g
    }

    pub fn domain(&self) -> &Interval {
        &self.domain
    }

    /// The ratio φ = g/f that B_{g,f} inverts.
    pub fn ratio(&self) -> GeneratorRef {
        Arc::new(Ratio::new(Arc::clone(&self.g), Arc::clone(&self.f)))
    }

    /// Swap f and g; valid for the symmetry identity when g is nowhere zero.
    pub fn swapped(&self) -> crate::Result<Self> {
        GeneratorPair::new(
            Arc::clone(&self.g),
            Arc::clone(&self.f),
            self.domain,
        )
    }

    fn check_sample(&self, sample: &WeightedSample) -> crate::Result<()> {
        if !sample.fits_in(&self.domain) {
            return Err(Error::InvalidSample(format!(
                "sample leaves the domain ({}, {})",
                self.domain.lo, self.domain.hi
            )));
        }
        Ok(())
    }
}

/// Solve φ(u) = target for u inside `bracket` by a bracketed
/// bisection–secant hybrid.
///
/// The residual criterion is `|φ(u) − target| ≤ tol·max(1, |target|)`.
/// Alternating secant and bisection steps keeps the bracket shrinking
/// geometrically while preserving the sign change.
pub fn invert_monotone(
    phi: &dyn Generator,
    target: f64,
    bracket: &Interval,
    tol: f64,
) -> crate::Result<f64> {
    let scale = target.abs().max(1.0);
    let (mut a, mut b) = (bracket.lo, bracket.hi);
    let mut fa = phi.value(a)? - target;
    let mut fb = phi.value(b)? - target;
    if fa.abs() <= tol * scale {
        return Ok(a);
    }
    if fb.abs() <= tol * scale {
        return Ok(b);
    }
    if fa * fb > 0.0 {
        return Err(Error::Bracket {
            target,
            image_lo: fa + target,
            image_hi: fb + target,
        });
    }
    // Cheap monotonicity scan; plateaus are tolerated, sign reversals not.
    let up = fb > fa;
    let mut prev = fa;
    for i in 1..=7 {
        let x = a + (b - a) * i as f64 / 8.0;
        let v = phi.value(x)? - target;
        if (up && v < prev) || (!up && v > prev) {
            return Err(Error::Precondition(format!(
                "function is not monotone on the bracket near x = {x}"
            )));
        }
        prev = v;
    }
    if (up && fb < prev) || (!up && fb > prev) {
        return Err(Error::Precondition(
            "function is not monotone on the bracket".to_string(),
        ));
    }
    for iter in 0..200 {
        let width = b - a;
        if width <= 4.0 * f64::EPSILON * a.abs().max(b.abs()).max(1.0) {
            return Ok(if fa.abs() <= fb.abs() { a } else { b });
        }
        let x = if iter % 2 == 0 {
            // Secant through the bracket endpoints, midpoint as fallback.
            let s = (a * fb - b * fa) / (fb - fa);
            if s.is_finite() && s > a && s < b {
                s
            } else {
                0.5 * (a + b)
            }
        } else {
            0.5 * (a + b)
        };
        let fx = phi.value(x)? - target;
        if fx.abs() <= tol * scale {
            return Ok(x);
        }
        if (fx > 0.0) == (fa > 0.0) {
            a = x;
            fa = fx;
        } else {
            b = x;
            fb = fx;
        }
    }
    Ok(if fa.abs() <= fb.abs() { a } else { b })
}

/// Weighted quasi-arithmetic mean `φ⁻¹(Σλφ(x)/Σλ)`.
///
/// The inversion bracket is the positive-weight min–max range expanded by
/// one tolerance unit; the result is clamped back into that range.
pub fn quasi_arithmetic_mean(
    phi: &dyn Generator,
    sample: &WeightedSample,
    tol: f64,
) -> crate::Result<f64> {
    let (lo, hi) = sample.positive_bounds();
    if lo == hi {
        return Ok(lo);
    }
    let mut num = 0.0;
    let mut den = 0.0;
    for (x, w) in sample.positive_entries() {
        num += w * phi.value(x)?;
        den += w;
    }
    let target = num / den;
    let pad = tol * (hi - lo).max(1.0);
    let bracket = Interval::new(lo - pad, hi + pad)?;
    let u = invert_monotone(phi, target, &bracket, tol)?;
    Ok(u.clamp(lo, hi))
}

/// Bajraktarević mean `(g/f)⁻¹(Σλg(x) / Σλf(x))`.
pub fn bajraktarevic_mean(
    pair: &GeneratorPair,
    sample: &WeightedSample,
    tol: f64,
) -> crate::Result<f64> {
    pair.check_sample(sample)?;
    let (lo, hi) = sample.positive_bounds();
    if lo == hi {
        return Ok(lo);
    }
    let mut num = 0.0;
    let mut den = 0.0;
    for (x, w) in sample.positive_entries() {
        num += w * pair.g.value(x)?;
        den += w * pair.f.value(x)?;
    }
    let target = num / den;
    let ratio = pair.ratio();
    let pad = tol * (hi - lo).max(1.0);
    let bracket = Interval::new(lo - pad, hi + pad)?;
    let u = invert_monotone(ratio.as_ref(), target, &bracket, tol)?;
    Ok(u.clamp(lo, hi))
}

/// Check the defining mean property: the value lies in the closed hull of
/// the positive-weight points, within `1e-12` of the range.
pub fn mean_property_check(
    pair: &GeneratorPair,
    sample: &WeightedSample,
    tol: f64,
) -> crate::Result<bool> {
    let m = bajraktarevic_mean(pair, sample, tol)?;
    let (lo, hi) = sample.positive_bounds();
    let slack = 1e-12 * (hi - lo);
    Ok(m >= lo - slack && m <= hi + slack)
}
