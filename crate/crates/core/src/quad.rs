//! Adaptive Simpson quadrature and tabulated antiderivatives.

use crate::error::{Error, EvalError};
use crate::generator::{Generator, GeneratorRef};
use crate::interval::Interval;
use crate::expr::Jet;

const MAX_DEPTH: u32 = 48;

/// Adaptive Simpson integral of `f` over `[a, b]`.
///
/// `tol` is relative to `max(1, |I|)` where `I` is the first whole-interval
/// estimate. Each refinement halves the budget; accepted panels apply the
/// `(S2 - S1)/15` Richardson correction.
pub fn integrate<F>(f: F, a: f64, b: f64, tol: f64) -> crate::Result<f64>
where
    F: Fn(f64) -> Result<f64, EvalError>,
{
    if a == b {
        return Ok(0.0);
    }
    if a > b {
        return Ok(-integrate(f, b, a, tol)?);
    }
    let fa = f(a)?;
    let m = 0.5 * (a + b);
    let fm = f(m)?;
    let fb = f(b)?;
    let whole = simpson(a, b, fa, fm, fb);
    let eps = tol * whole.abs().max(1.0);
    recurse(&f, a, b, fa, fm, fb, whole, eps, MAX_DEPTH)
}

fn simpson(a: f64, b: f64, fa: f64, fm: f64, fb: f64) -> f64 {
    (b - a) / 6.0 * (fa + 4.0 * fm + fb)
}

#[allow(clippy::too_many_arguments)]
fn recurse<F>(
    f: &F,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    eps: f64,
    depth: u32,
) -> crate::Result<f64>
where
    F: Fn(f64) -> Result<f64, EvalError>,
{
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm)?;
    let frm = f(rm)?;
    let left = simpson(a, m, fa, flm, fm);
    let right = simpson(m, b, fm, frm, fb);
    let delta = left + right - whole;
    if delta.abs() <= 15.0 * eps {
        return Ok(left + right + delta / 15.0);
    }
    if depth == 0 {
        return Err(Error::Quadrature {
            a,
            b,
            detail: format!("tolerance not reached, residual {:.3e}", delta.abs() / 15.0),
        });
    }
    let l = recurse(f, a, m, fa, flm, fm, left, 0.5 * eps, depth - 1)?;
    let r = recurse(f, m, b, fm, frm, fb, right, 0.5 * eps, depth - 1)?;
    Ok(l + r)
}

/// An antiderivative `h(x) = ∫ g` tabulated on a uniform grid.
///
/// Node values come from per-cell adaptive Simpson sums; between nodes the
/// table uses cubic Hermite interpolation with the exact slopes `h' = g`.
/// When the integrand has jets, so does the table: the derivative
/// coefficients of `h` are the shifted jet of `g`.
pub struct CumulativeIntegral {
    integrand: GeneratorRef,
    name: String,
    lo: f64,
    step: f64,
    values: Vec<f64>,
    slopes: Vec<f64>,
}

impl CumulativeIntegral {
    /// Tabulate `∫_anchor^x integrand` over the inset of `interval` with
    /// `nodes` grid points. The anchor is snapped to the nearest grid node.
    pub fn build(
        integrand: GeneratorRef,
        interval: &Interval,
        anchor: f64,
        nodes: usize,
        tol: f64,
    ) -> crate::Result<Self> {
        if nodes < 2 {
            return Err(Error::Precondition(
                "cumulative table needs at least 2 nodes".to_string(),
            ));
        }
        let (lo, hi) = interval.inset_bounds();
        let cells = nodes - 1;
        let step = (hi - lo) / cells as f64;
        let xs: Vec<f64> = (0..nodes).map(|i| lo + step * i as f64).collect();
        let mut slopes = Vec::with_capacity(nodes);
        for &x in &xs {
            slopes.push(integrand.value(x)?);
        }
        let cell_tol = tol / cells as f64;
        let mut values = vec![0.0; nodes];
        for i in 0..cells {
            let cell = integrate(|x| integrand.value(x), xs[i], xs[i + 1], cell_tol)?;
            values[i + 1] = values[i] + cell;
        }
        let anchor_idx = ((anchor - lo) / step).round().clamp(0.0, cells as f64) as usize;
        let shift = values[anchor_idx];
        for v in &mut values {
            *v -= shift;
        }
        let name = format!("integral({})", integrand.name());
        Ok(CumulativeIntegral {
            integrand,
            name,
            lo,
            step,
            values,
            slopes,
        })
    }

    pub fn range(&self) -> (f64, f64) {
        (self.lo, self.lo + self.step * (self.values.len() - 1) as f64)
    }
}

impl Generator for CumulativeIntegral {
    fn value(&self, x: f64) -> Result<f64, EvalError> {
        let cells = self.values.len() - 1;
        let span = self.step * cells as f64;
        let slack = 1e-9 * span.max(1.0);
        let t = (x - self.lo) / self.step;
        if t < -slack / self.step || t > cells as f64 + slack / self.step {
            return Err(EvalError::Domain {
                node: self.name.clone(),
                point: x,
                detail: "outside tabulated range".to_string(),
            });
        }
        let i = (t.floor() as usize).min(cells - 1);
        let s = t - i as f64;
        let (v0, v1) = (self.values[i], self.values[i + 1]);
        let (d0, d1) = (self.slopes[i] * self.step, self.slopes[i + 1] * self.step);
        let h00 = (1.0 + 2.0 * s) * (1.0 - s) * (1.0 - s);
        let h10 = s * (1.0 - s) * (1.0 - s);
        let h01 = s * s * (3.0 - 2.0 * s);
        let h11 = s * s * (s - 1.0);
        Ok(h00 * v0 + h10 * d0 + h01 * v1 + h11 * d1)
    }

    fn jet(&self, x: f64) -> Result<Jet, EvalError> {
        let h = self.value(x)?;
        let g = self.integrand.jet(x)?;
        let mut c = [0.0; 5];
        c[0] = h;
        for (k, slot) in c.iter_mut().enumerate().skip(1) {
            *slot = g.c[k - 1] / k as f64;
        }
        Ok(Jet { c })
    }

    fn has_derivatives(&self) -> bool {
        self.integrand.has_derivatives()
    }

    fn name(&self) -> String {
        self.name.clone()
    }
}
