//! Instances of the fundamental functional equation
//!
//!   (t·f(x) + (1−t)·f(y)) · φ(tx + (1−t)y) = t·f(x)φ(x) + (1−t)·f(y)φ(y),
//!
//! their residual reports, the first integral f²φ′ = γ, and the second-order
//! identity 2f′φ′ + fφ″ = 0 that characterizes smooth solutions.

mod classify;
mod construct;

pub use classify::{
    classify_m3, classify_m4, weighted_equality_oracle, ClassificationReport, OracleOutcome,
    Verdict,
};
pub use construct::{construct_from_kernel, construct_from_polynomial};

use crate::error::Error;
use crate::generator::{Generator, GeneratorRef};
use crate::interval::Interval;
use crate::means::check_strictly_monotone;
use crate::tolerances::GRID_POINTS;
use serde::Serialize;

/// Weights closer to ½ than this are treated as exactly symmetric when the
/// (t − ½)·p = 0 constraint is enforced.
pub const HALF_SNAP: f64 = 1e-9;

/// A candidate solution (φ, f) of the functional equation with weight t on
/// an open interval. φ must be strictly monotone; f is unconstrained (the
/// trivial solution f ≡ 0 is admitted).
pub struct FEInstance {
    phi: GeneratorRef,
    f: GeneratorRef,
    t: f64,
    domain: Interval,
}

impl FEInstance {
    pub fn new(phi: GeneratorRef, f: GeneratorRef, t: f64, domain: Interval) -> crate::Result<Self> {
        if !(t > 0.0 && t < 1.0) {
            return Err(Error::Precondition(format!(
                "weight t must lie strictly inside (0, 1), got {t}"
            )));
        }
        let grid = domain.grid(GRID_POINTS);
        check_strictly_monotone(phi.as_ref(), &grid)?;
        Ok(FEInstance { phi, f, t, domain })
    }

    /// Same φ, f, and domain with a different weight.
    pub fn with_t(&self, t: f64) -> crate::Result<Self> {
        if !(t > 0.0 && t < 1.0) {
            return Err(Error::Precondition(format!(
                "weight t must lie strictly inside (0, 1), got {t}"
            )));
        }
        Ok(FEInstance {
            phi: self.phi.clone(),
            f: self.f.clone(),
            t,
            domain: self.domain,
        })
    }

    pub fn phi(&self) -> &GeneratorRef {
        &self.phi
    }

    pub fn f(&self) -> &GeneratorRef {
        &self.f
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn domain(&self) -> &Interval {
        &self.domain
    }

    /// Whether the weight counts as t = ½.
    pub fn symmetric(&self) -> bool {
        (self.t - 0.5).abs() < HALF_SNAP
    }
}

/// Residual survey of the functional equation over a square grid.
#[derive(Debug, Clone, Serialize)]
pub struct FEReport {
    /// Max |residual| over the grid, normalized by the scale of f·φ.
    pub max_residual: f64,
    /// Raw residuals, row i = x fixed at `grid[i]`, column j = y at `grid[j]`.
    /// Externalized to CSV on request rather than serialized inline.
    #[serde(skip)]
    pub residual_grid: Vec<Vec<f64>>,
    /// The shared axis for both grid dimensions.
    #[serde(skip)]
    pub grid: Vec<f64>,
    /// Grid mean of the first integral f²φ′; absent when φ′ is unavailable.
    pub gamma_estimate: Option<f64>,
    /// Relative spread of f²φ′ across the grid.
    pub gamma_variance: Option<f64>,
    /// Set when f vanishes identically on the grid: the equation holds with
    /// zero residual regardless of φ.
    pub trivial: bool,
}

/// Evaluate the equation residual
/// (t·f(x)+(1−t)·f(y))·φ(tx+(1−t)y) − t·f(x)φ(x) − (1−t)·f(y)φ(y)
/// over a `grid_n`×`grid_n` inset grid.
pub fn fe_residual(instance: &FEInstance, grid_n: usize) -> crate::Result<FEReport> {
    if grid_n < 16 {
        return Err(Error::Precondition(format!(
            "residual grid needs at least 16 points per axis, got {grid_n}"
        )));
    }
    let grid = instance.domain.grid(grid_n);
    let t = instance.t;
    let s = 1.0 - t;
    let mut fv = Vec::with_capacity(grid_n);
    let mut phv = Vec::with_capacity(grid_n);
    for &x in &grid {
        fv.push(instance.f.value(x)?);
        phv.push(instance.phi.value(x)?);
    }
    let trivial = fv.iter().all(|v| *v == 0.0);
    let mut scale = 1.0f64;
    for i in 0..grid_n {
        scale = scale.max((fv[i] * phv[i]).abs());
    }

    let mut rows = Vec::with_capacity(grid_n);
    let mut max_abs = 0.0f64;
    for i in 0..grid_n {
        let mut row = Vec::with_capacity(grid_n);
        for j in 0..grid_n {
            // tx+(1−t)y stays in the convex hull of the inset grid.
            let z = t * grid[i] + s * grid[j];
            let pz = instance.phi.value(z)?;
            let r = (t * fv[i] + s * fv[j]) * pz - t * fv[i] * phv[i] - s * fv[j] * phv[j];
            max_abs = max_abs.max(r.abs());
            row.push(r);
        }
        rows.push(row);
    }

    let (gamma_estimate, gamma_variance) = match gamma_stats(instance, &grid, &fv) {
        Ok((g, v)) => (finite(g), finite(v)),
        Err(_) => (None, None),
    };
    Ok(FEReport {
        max_residual: max_abs / scale,
        residual_grid: rows,
        grid,
        gamma_estimate,
        gamma_variance,
        trivial,
    })
}

fn finite(v: f64) -> Option<f64> {
    v.is_finite().then_some(v)
}

/// Mean and relative spread of f²φ′ along the one-dimensional grid.
fn gamma_stats(instance: &FEInstance, grid: &[f64], fv: &[f64]) -> crate::Result<(f64, f64)> {
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    let mut sum = 0.0;
    for (i, &x) in grid.iter().enumerate() {
        let g = fv[i] * fv[i] * phi_slope(instance, x)?;
        lo = lo.min(g);
        hi = hi.max(g);
        sum += g;
    }
    let mean = sum / grid.len() as f64;
    let spread = hi - lo;
    let variance = if spread == 0.0 { 0.0 } else { spread / mean.abs() };
    Ok((mean, variance))
}

/// φ′ at an inset grid point: by jet when available, otherwise by a central
/// difference whose step stays inside the interval margin.
fn phi_slope(instance: &FEInstance, x: f64) -> crate::Result<f64> {
    if instance.phi.has_derivatives() {
        return Ok(instance.phi.jet(x)?.derivative(1)?);
    }
    let h = 0.45 * instance.domain.margin.max(1e-9) * instance.domain.length();
    let hi = instance.phi.value(x + h)?;
    let lo = instance.phi.value(x - h)?;
    Ok((hi - lo) / (2.0 * h))
}

/// Estimate the first integral γ = f²φ′ and decide whether it is a nonzero
/// grid constant. `pass` requires relative spread ≤ tol and |γ| > 1e-12.
///
/// A zero or sign change of f on the grid is reported as an error: nontrivial
/// solutions have f nowhere zero.
pub fn check_first_integral(
    instance: &FEInstance,
    grid_n: usize,
    tol: f64,
) -> crate::Result<(f64, bool)> {
    if grid_n < 2 {
        return Err(Error::Precondition(
            "first-integral check needs at least 2 grid points".to_string(),
        ));
    }
    let grid = instance.domain.grid(grid_n);
    let mut fv = Vec::with_capacity(grid_n);
    let mut sign = 0.0f64;
    for &x in &grid {
        let v = instance.f.value(x)?;
        if v == 0.0 || (sign != 0.0 && v.signum() != sign) {
            return Err(Error::FVanishes { x });
        }
        sign = v.signum();
        fv.push(v);
    }
    let (gamma, variance) = gamma_stats(instance, &grid, &fv)?;
    let pass = gamma.abs() > 1e-12 && variance <= tol;
    Ok((gamma, pass))
}

/// Pointwise check of 2f′φ′ + fφ″ = 0, the derivative form of the constancy
/// of f²φ′.
pub fn check_second_order_identity(
    f: &dyn Generator,
    phi: &dyn Generator,
    grid: &[f64],
    tol: f64,
) -> crate::Result<bool> {
    for &x in grid {
        let fj = f.jet(x)?;
        let pj = phi.jet(x)?;
        let cross = 2.0 * fj.derivative(1)? * pj.derivative(1)?;
        let curve = fj.value() * pj.derivative(2)?;
        let scale = cross.abs().max(curve.abs()).max(1.0);
        if (cross + curve).abs() > tol * scale {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generator::from_expr;

    fn instance(phi: &str, f: &str, t: f64, lo: f64, hi: f64) -> FEInstance {
        FEInstance::new(
            from_expr(phi).unwrap(),
            from_expr(f).unwrap(),
            t,
            Interval::new(lo, hi).unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn affine_phi_constant_f_is_exact() {
        let inst = instance("x", "1", 0.37, 0.0, 1.0);
        let rep = fe_residual(&inst, 16).unwrap();
        assert!(rep.max_residual <= 1e-15, "{}", rep.max_residual);
        assert!(!rep.trivial);
        assert_eq!(rep.gamma_estimate, Some(1.0));
    }

    #[test]
    fn reciprocal_solution_is_exact_for_any_weight() {
        for &t in &[0.2, 0.5, 0.81] {
            let inst = instance("-1/x", "-x", t, -5.0, -0.1);
            let rep = fe_residual(&inst, 24).unwrap();
            assert!(rep.max_residual <= 1e-12, "t={t}: {}", rep.max_residual);
            let g = rep.gamma_estimate.unwrap();
            assert!((g - 1.0).abs() <= 1e-9, "gamma = {g}");
            assert!(rep.gamma_variance.unwrap() <= 1e-9);
        }
        let inst = instance("-1/x", "-x", 0.4, -5.0, -0.1);
        let (gamma, pass) = check_first_integral(&inst, 64, 1e-8).unwrap();
        assert!(pass);
        assert!((gamma - 1.0).abs() <= 1e-9);
    }

    #[test]
    fn exp_with_constant_f_fails_loudly() {
        let inst = instance("exp(x)", "1", 0.5, 0.0, 1.0);
        let rep = fe_residual(&inst, 33).unwrap();
        assert!(rep.max_residual > 1e-3, "max = {}", rep.max_residual);
    }

    #[test]
    fn identically_zero_f_is_flagged_trivial() {
        let inst = instance("x", "0", 0.5, 0.0, 1.0);
        let rep = fe_residual(&inst, 16).unwrap();
        assert_eq!(rep.max_residual, 0.0);
        assert!(rep.trivial);
    }

    #[test]
    fn first_integral_examples() {
        let inst = instance("tan(x)", "cos(x)", 0.5, -1.2, 1.2);
        let (gamma, pass) = check_first_integral(&inst, 64, 1e-8).unwrap();
        assert!(pass);
        assert!((gamma - 1.0).abs() <= 1e-10, "gamma = {gamma}");

        let inst = instance("x", "2", 0.5, 0.0, 1.0);
        let (gamma, pass) = check_first_integral(&inst, 16, 1e-8).unwrap();
        assert!(pass);
        assert_eq!(gamma, 4.0);

        let inst = instance("x", "x", 0.5, -1.0, 1.0);
        assert!(matches!(
            check_first_integral(&inst, 65, 1e-8),
            Err(Error::FVanishes { .. })
        ));
    }

    #[test]
    fn second_order_identity_examples() {
        let grid = Interval::new(-1.2, 1.2).unwrap().grid(65);
        let cos = from_expr("cos(x)").unwrap();
        let tan = from_expr("tan(x)").unwrap();
        assert!(check_second_order_identity(cos.as_ref(), tan.as_ref(), &grid, 1e-8).unwrap());

        let grid = Interval::new(0.0, 1.0).unwrap().grid(17);
        let one = from_expr("1").unwrap();
        let id = from_expr("x").unwrap();
        assert!(check_second_order_identity(one.as_ref(), id.as_ref(), &grid, 1e-8).unwrap());

        let grid = Interval::new(1.0, 2.0).unwrap().grid(17);
        let sq = from_expr("x^2").unwrap();
        assert!(!check_second_order_identity(one.as_ref(), sq.as_ref(), &grid, 1e-8).unwrap());
    }

    #[test]
    fn instance_validation() {
        let mk = |t: f64| {
            FEInstance::new(
                from_expr("x").unwrap(),
                from_expr("1").unwrap(),
                t,
                Interval::new(0.0, 1.0).unwrap(),
            )
        };
        assert!(mk(0.0).is_err());
        assert!(mk(1.0).is_err());
        assert!(mk(0.5).is_ok());
        // non-monotone φ
        assert!(FEInstance::new(
            from_expr("x^2").unwrap(),
            from_expr("1").unwrap(),
            0.5,
            Interval::new(-1.0, 1.0).unwrap(),
        )
        .is_err());
        // coarse grids are rejected
        let inst = mk(0.5).unwrap();
        assert!(matches!(
            fe_residual(&inst, 8),
            Err(Error::Precondition(_))
        ));
    }
}
