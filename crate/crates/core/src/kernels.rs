//! Sine/cosine type kernel functions, the two-variable determinant Δ, and
//! detectors for pair equivalence and affine relatedness of generators.

use crate::error::{Error, EvalError};
use crate::expr::Jet;
use crate::fit::least_squares;
use crate::generator::{Generator, GeneratorRef};
use crate::interval::Interval;
use crate::means::GeneratorPair;
use crate::tolerances::GRID_POINTS;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

/// S_p: sin(√−p·x), x, or sinh(√p·x) by the sign of p.
pub fn s_kernel(p: f64, x: f64) -> f64 {
    if p < 0.0 {
        ((-p).sqrt() * x).sin()
    } else if p == 0.0 {
        x
    } else {
        (p.sqrt() * x).sinh()
    }
}

/// C_p: cos(√−p·x), 1, or cosh(√p·x) by the sign of p.
pub fn c_kernel(p: f64, x: f64) -> f64 {
    if p < 0.0 {
        ((-p).sqrt() * x).cos()
    } else if p == 0.0 {
        1.0
    } else {
        (p.sqrt() * x).cosh()
    }
}

/// Jet of S_p at `x`; both kernels solve h″ = p·h, so derivatives cycle.
pub fn s_jet(p: f64, x: f64) -> Jet {
    let c = if p < 0.0 {
        let w = (-p).sqrt();
        let (s, co) = (w * x).sin_cos();
        [s, w * co, p * s / 2.0, p * w * co / 6.0, p * p * s / 24.0]
    } else if p == 0.0 {
        [x, 1.0, 0.0, 0.0, 0.0]
    } else {
        let w = p.sqrt();
        let s = (w * x).sinh();
        let co = (w * x).cosh();
        [s, w * co, p * s / 2.0, p * w * co / 6.0, p * p * s / 24.0]
    };
    Jet { c }
}

/// Jet of C_p at `x`.
pub fn c_jet(p: f64, x: f64) -> Jet {
    let c = if p < 0.0 {
        let w = (-p).sqrt();
        let (s, co) = (w * x).sin_cos();
        [co, -w * s, p * co / 2.0, -p * w * s / 6.0, p * p * co / 24.0]
    } else if p == 0.0 {
        [1.0, 0.0, 0.0, 0.0, 0.0]
    } else {
        let w = p.sqrt();
        let s = (w * x).sinh();
        let co = (w * x).cosh();
        [co, w * s, p * co / 2.0, p * w * s / 6.0, p * p * co / 24.0]
    };
    Jet { c }
}

/// Generator `coef_s·S_p + coef_c·C_p` with closed-form jets.
#[derive(Debug, Clone)]
pub struct KernelCombination {
    pub p: f64,
    pub coef_s: f64,
    pub coef_c: f64,
}

impl Generator for KernelCombination {
    fn value(&self, x: f64) -> Result<f64, EvalError> {
        Ok(self.coef_s * s_kernel(self.p, x) + self.coef_c * c_kernel(self.p, x))
    }

    fn jet(&self, x: f64) -> Result<Jet, EvalError> {
        Ok(s_jet(self.p, x).scale(self.coef_s) + c_jet(self.p, x).scale(self.coef_c))
    }

    fn name(&self) -> String {
        format!(
            "{}*S[p={}] + {}*C[p={}]",
            self.coef_s, self.p, self.coef_c, self.p
        )
    }
}

/// S_p∘h or C_p∘h for an inner generator h, with jets by composition.
#[derive(Clone)]
pub struct ComposedKernel {
    p: f64,
    sine_part: bool,
    inner: GeneratorRef,
}

impl ComposedKernel {
    pub fn s(p: f64, inner: GeneratorRef) -> Self {
        ComposedKernel {
            p,
            sine_part: true,
            inner,
        }
    }

    pub fn c(p: f64, inner: GeneratorRef) -> Self {
        ComposedKernel {
            p,
            sine_part: false,
            inner,
        }
    }
}

impl Generator for ComposedKernel {
    fn value(&self, x: f64) -> Result<f64, EvalError> {
        let u = self.inner.value(x)?;
        Ok(if self.sine_part {
            s_kernel(self.p, u)
        } else {
            c_kernel(self.p, u)
        })
    }

    fn jet(&self, x: f64) -> Result<Jet, EvalError> {
        let inner = self.inner.jet(x)?;
        let outer = if self.sine_part {
            s_jet(self.p, inner.value())
        } else {
            c_jet(self.p, inner.value())
        };
        Ok(inner.compose_outer(outer.c))
    }

    fn has_derivatives(&self) -> bool {
        self.inner.has_derivatives()
    }

    fn name(&self) -> String {
        format!(
            "{}[p={}]({})",
            if self.sine_part { "S" } else { "C" },
            self.p,
            self.inner.name()
        )
    }
}

/// Two-variable determinant Δ_{f,g}(x, y) = f(x)g(y) − f(y)g(x).
pub fn delta(
    f: &dyn Generator,
    g: &dyn Generator,
    x: f64,
    y: f64,
) -> Result<f64, EvalError> {
    Ok(f.value(x)? * g.value(y)? - f.value(y)? * g.value(x)?)
}

/// Invertible 2×2 change of basis carrying (f, g) to (h, k), with
/// h = a·f + b·g and k = c·f + d·g, scaled so a² + b² + c² + d² = 1.
/// Acceptance requires ad − cb ≠ 0.
#[derive(Debug, Clone, Serialize)]
pub struct EquivalenceWitness {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
    /// Worst relative residual of the two fits on the validation grid.
    pub residual: f64,
    /// ad − cb of the normalized coefficients.
    pub determinant: f64,
    /// Set when the determinant clears the acceptance threshold but is still
    /// small enough (< 1e-6) that the witness is close to singular.
    pub near_singular: bool,
}

const DETERMINANT_FLOOR: f64 = 1e-9;
const NEAR_SINGULAR: f64 = 1e-6;

/// Decide whether (h, k) = pair2 lies in the linear span of (f, g) = pair1
/// with an invertible coefficient matrix.
///
/// Coefficients are fitted at `nodes` Chebyshev points and accepted against
/// an independent uniform validation grid; accepted witnesses are then
/// cross-checked on the determinant identity Δ_{h,k} = (ad−bc)·Δ_{f,g} at
/// seeded random argument pairs.
pub fn detect_equivalence(
    pair1: &GeneratorPair,
    pair2: &GeneratorPair,
    nodes: usize,
    tol: f64,
) -> crate::Result<Option<EquivalenceWitness>> {
    if nodes < 4 {
        return Err(Error::Precondition(
            "equivalence detection needs at least 4 fit nodes".to_string(),
        ));
    }
    let common = pair1
        .domain()
        .intersect(pair2.domain())
        .map_err(|_| Error::Precondition("pair domains do not overlap".to_string()))?;

    let ([a, b, c, d], residual) = span_fit(
        pair1,
        pair2.f().as_ref(),
        pair2.g().as_ref(),
        &common,
        nodes,
    )?;
    if residual > tol {
        return Ok(None);
    }

    let norm = (a * a + b * b + c * c + d * d).sqrt();
    if norm == 0.0 {
        return Ok(None);
    }
    let determinant = (a * d - c * b) / (norm * norm);
    if determinant.abs() <= DETERMINANT_FLOOR {
        return Ok(None);
    }

    // Determinant identity spot check with the unnormalized coefficients.
    let gamma = a * d - b * c;
    let (lo, hi) = common.inset_bounds();
    let mut rng = ChaCha8Rng::seed_from_u64(0x4550);
    for _ in 0..20 {
        let x = rng.gen_range(lo..hi);
        let y = rng.gen_range(lo..hi);
        let dhk = delta(pair2.f().as_ref(), pair2.g().as_ref(), x, y)?;
        let dfg = delta(pair1.f().as_ref(), pair1.g().as_ref(), x, y)?;
        if (dhk - gamma * dfg).abs() > tol * dhk.abs().max(1.0) {
            return Ok(None);
        }
    }

    Ok(Some(EquivalenceWitness {
        a: a / norm,
        b: b / norm,
        c: c / norm,
        d: d / norm,
        residual,
        determinant,
        near_singular: determinant.abs() < NEAR_SINGULAR,
    }))
}

/// Fit h ≈ a·f + b·g and k ≈ c·f + d·g at Chebyshev nodes on `common` and
/// measure the fits on an independent uniform grid. Returns ([a, b, c, d],
/// worst relative validation error). Errors when f, g are numerically
/// dependent at the fit nodes.
pub(crate) fn span_fit(
    pair1: &GeneratorPair,
    h: &dyn Generator,
    k: &dyn Generator,
    common: &Interval,
    nodes: usize,
) -> crate::Result<([f64; 4], f64)> {
    let cheb = common.chebyshev_nodes(nodes);
    let mut f_col = Vec::with_capacity(nodes);
    let mut g_col = Vec::with_capacity(nodes);
    let mut h_rhs = Vec::with_capacity(nodes);
    let mut k_rhs = Vec::with_capacity(nodes);
    for &x in &cheb {
        f_col.push(pair1.f().value(x)?);
        g_col.push(pair1.g().value(x)?);
        h_rhs.push(h.value(x)?);
        k_rhs.push(k.value(x)?);
    }
    let fit_h = least_squares(&[f_col.clone(), g_col.clone()], &h_rhs)?;
    if !fit_h.full_rank() {
        return Err(Error::DegeneratePair(
            "f and g are numerically dependent".to_string(),
        ));
    }
    let fit_k = least_squares(&[f_col, g_col], &k_rhs)?;
    let (a, b) = (fit_h.coeffs[0], fit_h.coeffs[1]);
    let (c, d) = (fit_k.coeffs[0], fit_k.coeffs[1]);

    let grid = common.grid(GRID_POINTS);
    let mut scale = 1.0f64;
    let mut max_err = 0.0f64;
    for &x in &grid {
        let fv = pair1.f().value(x)?;
        let gv = pair1.g().value(x)?;
        let hv = h.value(x)?;
        let kv = k.value(x)?;
        scale = scale.max(hv.abs()).max(kv.abs());
        max_err = max_err
            .max((hv - (a * fv + b * gv)).abs())
            .max((kv - (c * fv + d * gv)).abs());
    }
    Ok(([a, b, c, d], max_err / scale))
}

/// Decide whether ψ = a·φ + b on the domain, the equality test for
/// quasi-arithmetic means. Returns the coefficients on acceptance.
pub fn detect_affine(
    phi: &dyn Generator,
    psi: &dyn Generator,
    domain: &Interval,
    tol: f64,
) -> crate::Result<Option<(f64, f64)>> {
    let cheb = domain.chebyshev_nodes(crate::tolerances::FIT_NODES);
    let mut phi_col = Vec::with_capacity(cheb.len());
    let mut psi_rhs = Vec::with_capacity(cheb.len());
    for &x in &cheb {
        phi_col.push(phi.value(x)?);
        psi_rhs.push(psi.value(x)?);
    }
    let spread = phi_col.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
        - phi_col.iter().cloned().fold(f64::INFINITY, f64::min);
    let phi_scale = phi_col.iter().fold(1.0f64, |m, v| m.max(v.abs()));
    if spread <= 1e-10 * phi_scale {
        return Err(Error::Precondition(
            "φ is numerically constant on the domain".to_string(),
        ));
    }
    let ones = vec![1.0; cheb.len()];
    let fit = least_squares(&[phi_col, ones], &psi_rhs)?;
    if !fit.full_rank() {
        return Err(Error::Precondition(
            "affine fit is rank deficient".to_string(),
        ));
    }
    let (a, b) = (fit.coeffs[0], fit.coeffs[1]);
    if a == 0.0 {
        return Ok(None);
    }
    let grid = domain.grid(GRID_POINTS);
    let mut scale = 1.0f64;
    let mut max_err = 0.0f64;
    for &x in &grid {
        let pv = phi.value(x)?;
        let sv = psi.value(x)?;
        scale = scale.max(sv.abs());
        max_err = max_err.max((sv - (a * pv + b)).abs());
    }
    if max_err <= tol * scale {
        Ok(Some((a, b)))
    } else {
        Ok(None)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generator::{from_expr, LinearCombo};
    use std::sync::Arc;

    fn pair(f: &str, g: &str, lo: f64, hi: f64) -> GeneratorPair {
        GeneratorPair::new(
            from_expr(f).unwrap(),
            from_expr(g).unwrap(),
            Interval::new(lo, hi).unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn kernel_values_by_regime() {
        assert_eq!(s_kernel(0.0, 7.0), 7.0);
        assert_eq!(c_kernel(0.0, 7.0), 1.0);
        let half_pi = std::f64::consts::FRAC_PI_2;
        assert!((s_kernel(-1.0, half_pi) - 1.0).abs() < 1e-15);
        assert!(c_kernel(-1.0, half_pi).abs() < 1e-15);
        let c = c_kernel(4.0, 1.0);
        let s = s_kernel(4.0, 1.0);
        assert!((c * c - s * s - 1.0).abs() < 1e-12);
    }

    #[test]
    fn kernel_jets_solve_the_ode() {
        for &p in &[-2.0, -1.0, 0.0, 1.0, 2.0] {
            for i in 0..10 {
                let x = -1.0 + 0.22 * i as f64;
                let s = s_jet(p, x);
                let c = c_jet(p, x);
                assert!(
                    (s.derivative(2).unwrap() - p * s.value()).abs() < 1e-12,
                    "S''=pS failed at p={p}, x={x}"
                );
                assert!(
                    (c.derivative(2).unwrap() - p * c.value()).abs() < 1e-12,
                    "C''=pC failed at p={p}, x={x}"
                );
            }
        }
    }

    #[test]
    fn delta_examples() {
        let one = from_expr("1").unwrap();
        let id = from_expr("x").unwrap();
        assert_eq!(delta(one.as_ref(), id.as_ref(), 3.0, 3.0).unwrap(), 0.0);
        assert_eq!(delta(one.as_ref(), id.as_ref(), 2.0, 5.0).unwrap(), 3.0);
        let cos = from_expr("cos(x)").unwrap();
        let sin = from_expr("sin(x)").unwrap();
        let d = delta(
            cos.as_ref(),
            sin.as_ref(),
            0.0,
            std::f64::consts::FRAC_PI_2,
        )
        .unwrap();
        assert!((d - 1.0).abs() < 1e-15);
    }

    #[test]
    fn equivalence_of_exact_linear_combination() {
        let p1 = pair("cos(x)", "sin(x)", -0.5, 0.5);
        let cos = from_expr("cos(x)").unwrap();
        let sin = from_expr("sin(x)").unwrap();
        let h = Arc::new(LinearCombo::new(
            vec![(1.0, Arc::clone(&cos)), (1.0, Arc::clone(&sin))],
            0.0,
        ));
        let k = Arc::new(LinearCombo::new(vec![(2.0, cos)], 0.0));
        let p2 = GeneratorPair::new(h, k, Interval::new(-0.5, 0.5).unwrap()).unwrap();
        let w = detect_equivalence(&p1, &p2, 16, 1e-8)
            .unwrap()
            .expect("exact combination must be detected");
        assert!(w.residual <= 1e-12);
        // (a, b, c, d) proportional to (1, 1, 2, 0)
        let scale = w.a * 6.0f64.sqrt();
        assert!((scale.abs() - 1.0).abs() < 1e-9);
        assert!((w.b - w.a).abs() < 1e-9);
        assert!((w.c - 2.0 * w.a).abs() < 1e-9);
        assert!(w.d.abs() < 1e-9);
        assert!(!w.near_singular);
    }

    #[test]
    fn non_equivalence_of_exp_against_affine() {
        let p1 = pair("1", "x", 0.0, 1.0);
        let p2 = pair("1", "exp(x)", 0.0, 1.0);
        assert!(detect_equivalence(&p1, &p2, 16, 1e-8).unwrap().is_none());
        // The best affine fit to exp really does miss by more than 1e-3.
        let grid = Interval::new(0.0, 1.0).unwrap().grid(GRID_POINTS);
        let ones = vec![1.0; grid.len()];
        let xs = grid.clone();
        let ys: Vec<f64> = grid.iter().map(|x| x.exp()).collect();
        let fit = least_squares(&[ones, xs], &ys).unwrap();
        let worst = grid
            .iter()
            .map(|x| (x.exp() - fit.coeffs[0] - fit.coeffs[1] * x).abs())
            .fold(0.0f64, f64::max);
        assert!(worst > 1e-3, "worst = {worst}");
    }

    #[test]
    fn equivalence_is_reflexive() {
        let p1 = pair("cos(x)", "sin(x)", -0.5, 0.5);
        let p2 = pair("cos(x)", "sin(x)", -0.5, 0.5);
        let w = detect_equivalence(&p1, &p2, 16, 1e-8).unwrap().unwrap();
        let inv_sqrt2 = 0.5f64.sqrt();
        assert!((w.a.abs() - inv_sqrt2).abs() < 1e-9);
        assert!((w.d.abs() - inv_sqrt2).abs() < 1e-9);
        assert!(w.b.abs() < 1e-9 && w.c.abs() < 1e-9);
        assert!(w.determinant.abs() > 0.4);
    }

    #[test]
    fn degenerate_pair_is_an_error() {
        // g/f = 2 + 1e-11·x is strictly monotone, so the pair passes class
        // validation, but the sampled columns are dependent to 1e-12 relative,
        // far below the rank cutoff.
        let dep = pair("x", "2*x + 0.00000000001*x^2", 1.0, 2.0);
        let p2 = pair("1", "x", 1.0, 2.0);
        assert!(matches!(
            detect_equivalence(&dep, &p2, 16, 1e-8),
            Err(Error::DegeneratePair(_))
        ));
    }

    #[test]
    fn affine_detection_examples() {
        let log = from_expr("log(x)").unwrap();
        let shifted = from_expr("2*log(x) + 3").unwrap();
        let id = from_expr("x").unwrap();
        let dom = Interval::new(1.0, 2.0).unwrap();
        let (a, b) = detect_affine(log.as_ref(), shifted.as_ref(), &dom, 1e-8)
            .unwrap()
            .unwrap();
        assert!((a - 2.0).abs() < 1e-10 && (b - 3.0).abs() < 1e-10);
        assert!(detect_affine(log.as_ref(), id.as_ref(), &dom, 1e-8)
            .unwrap()
            .is_none());
        let (a, b) = detect_affine(log.as_ref(), log.as_ref(), &dom, 1e-8)
            .unwrap()
            .unwrap();
        assert!((a - 1.0).abs() < 1e-10 && b.abs() < 1e-10);
    }

    #[test]
    fn affine_rejects_constant_phi() {
        let c = from_expr("1").unwrap();
        let id = from_expr("x").unwrap();
        let dom = Interval::new(0.0, 1.0).unwrap();
        assert!(matches!(
            detect_affine(c.as_ref(), id.as_ref(), &dom, 1e-8),
            Err(Error::Precondition(_))
        ));
    }
}
