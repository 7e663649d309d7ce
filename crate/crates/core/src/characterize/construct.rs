//! Solution constructors: the kernel route (f, f·φ spanned by S_p, C_p) and
//! the quadratic-polynomial route (ψ a primitive of 1/P, φ = ψ⁻¹, f = 1/√(P∘φ)).

use super::{FEInstance, HALF_SNAP};
use crate::error::{Error, EvalError};
use crate::expr::{outer_powf, Jet};
use crate::generator::{Generator, Ratio};
use crate::interval::Interval;
use crate::kernels::KernelCombination;
use crate::quad::CumulativeIntegral;
use crate::tolerances::{GRID_POINTS, TABLE_POINTS};
use crate::wronskians::QuadraticPolynomial;
use std::sync::Arc;

/// Build the instance with f = a·S_p + b·C_p and φ = (c·S_p + d·C_p)/f.
///
/// The weight is stored as ½: for p ≠ 0 the equation only holds
/// symmetrically, and for p = 0 it holds for every weight, so callers may
/// rebind t with [`FEInstance::with_t`].
pub fn construct_from_kernel(
    p: f64,
    a: f64,
    b: f64,
    c: f64,
    d: f64,
    domain: &Interval,
) -> crate::Result<FEInstance> {
    let det = a * d - b * c;
    let scale = (a * a + b * b + c * c + d * d).max(f64::MIN_POSITIVE);
    if det.abs() <= 1e-12 * scale {
        return Err(Error::Precondition(format!(
            "coefficient determinant ad − bc = {det} vanishes"
        )));
    }
    let f = Arc::new(KernelCombination {
        p,
        coef_s: a,
        coef_c: b,
    });
    let num = Arc::new(KernelCombination {
        p,
        coef_s: c,
        coef_c: d,
    });

    let grid = domain.grid(GRID_POINTS);
    let mut prev: Option<(f64, f64)> = None;
    for &x in &grid {
        let v = f.value(x)?;
        if v == 0.0 {
            return Err(Error::DomainSplit { zero: x });
        }
        if let Some((px, pv)) = prev {
            if pv.signum() != v.signum() {
                let zero = refine_zero(f.as_ref(), px, x)?;
                return Err(Error::DomainSplit { zero });
            }
        }
        prev = Some((x, v));
    }

    let phi = Arc::new(Ratio::new(num, f.clone()));
    FEInstance::new(phi, f, 0.5, *domain)
}

/// Locate a sign change of f between two grid points by bisection.
fn refine_zero(f: &dyn Generator, mut lo: f64, mut hi: f64) -> crate::Result<f64> {
    let mut flo = f.value(lo)?;
    for _ in 0..80 {
        let mid = 0.5 * (lo + hi);
        let fm = f.value(mid)?;
        if fm == 0.0 {
            return Ok(mid);
        }
        if fm.signum() == flo.signum() {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Quadrature tolerance for tabulating ψ; fixed rather than scaled so the
/// constructors always meet their stated residual bounds.
const PSI_QUAD_TOL: f64 = 1e-11;

/// Build the instance from a positive quadratic P: ψ = ∫1/P anchored at the
/// domain midpoint, φ = ψ⁻¹ on ψ(domain), f = 1/√(P∘φ). Asymmetric weights
/// require a vanishing discriminant.
pub fn construct_from_polynomial(
    poly: &QuadraticPolynomial,
    domain: &Interval,
    t: f64,
) -> crate::Result<FEInstance> {
    if !(t > 0.0 && t < 1.0) {
        return Err(Error::Precondition(format!(
            "weight t must lie strictly inside (0, 1), got {t}"
        )));
    }
    poly.ensure_positive_on(domain.lo, domain.hi)?;
    let disc = poly.discriminant();
    if (t - 0.5).abs() >= HALF_SNAP && ((t - 0.5) * disc).abs() > 1e-12 {
        return Err(Error::Precondition(format!(
            "weight t = {t} is asymmetric but the discriminant is {disc}; \
             (t − ½)·D_P must vanish"
        )));
    }
    let core = Arc::new(PolyFlowCore::build(*poly, domain)?);
    let phi = Arc::new(PolyPhi { core: core.clone() });
    let f = Arc::new(PolyEll { core: core.clone() });
    let target = Interval::new(core.v_lo, core.v_hi)?;
    FEInstance::new(phi, f, t, target)
}

/// 1/P(x) with exact degree-4 jets; the integrand of ψ.
struct RecipPoly {
    poly: QuadraticPolynomial,
}

impl RecipPoly {
    fn describe(poly: &QuadraticPolynomial) -> String {
        format!(
            "{} + {}*u + {}*u^2",
            poly.alpha, poly.beta, poly.gamma
        )
    }
}

impl Generator for RecipPoly {
    fn value(&self, x: f64) -> Result<f64, EvalError> {
        let v = self.poly.eval(x);
        if v == 0.0 {
            return Err(EvalError::Domain {
                node: self.name(),
                point: x,
                detail: "polynomial vanishes".to_string(),
            });
        }
        Ok(1.0 / v)
    }

    fn jet(&self, x: f64) -> Result<Jet, EvalError> {
        let p = Jet {
            c: [
                self.poly.eval(x),
                self.poly.derivative(x),
                self.poly.gamma,
                0.0,
                0.0,
            ],
        };
        p.recip_checked().ok_or_else(|| EvalError::Domain {
            node: self.name(),
            point: x,
            detail: "polynomial vanishes".to_string(),
        })
    }

    fn name(&self) -> String {
        format!("1/({})", RecipPoly::describe(&self.poly))
    }
}

/// Shared state of the polynomial pipeline: the tabulated primitive ψ on the
/// source interval and its image (v_lo, v_hi).
struct PolyFlowCore {
    poly: QuadraticPolynomial,
    psi: CumulativeIntegral,
    u_lo: f64,
    u_hi: f64,
    v_lo: f64,
    v_hi: f64,
}

impl PolyFlowCore {
    fn build(poly: QuadraticPolynomial, domain: &Interval) -> crate::Result<Self> {
        let integrand = Arc::new(RecipPoly { poly });
        let psi = CumulativeIntegral::build(
            integrand,
            domain,
            domain.midpoint(),
            TABLE_POINTS,
            PSI_QUAD_TOL,
        )?;
        let (u_lo, u_hi) = psi.range();
        let v_lo = psi.value(u_lo)?;
        let v_hi = psi.value(u_hi)?;
        Ok(PolyFlowCore {
            poly,
            psi,
            u_lo,
            u_hi,
            v_lo,
            v_hi,
        })
    }

    /// Solve ψ(u) = v by bracketed Newton steps; ψ′ = 1/P makes the update
    /// u ← u − (ψ(u) − v)·P(u).
    fn invert(&self, v: f64) -> Result<f64, EvalError> {
        let span = self.v_hi - self.v_lo;
        let slack = 1e-9 * span.max(1.0);
        if v < self.v_lo - slack || v > self.v_hi + slack {
            return Err(EvalError::Domain {
                node: "psi_inv".to_string(),
                point: v,
                detail: format!(
                    "outside the image ({}, {}) of psi",
                    self.v_lo, self.v_hi
                ),
            });
        }
        let v = v.clamp(self.v_lo, self.v_hi);
        let (mut lo, mut hi) = (self.u_lo, self.u_hi);
        let mut u = lo + (hi - lo) * (v - self.v_lo) / span;
        for _ in 0..60 {
            let r = self.psi.value(u)? - v;
            if r == 0.0 {
                break;
            }
            // ψ is strictly increasing, so the residual sign locates u.
            if r > 0.0 {
                hi = u;
            } else {
                lo = u;
            }
            let mut next = u - r * self.poly.eval(u);
            if !(next > lo && next < hi) {
                next = 0.5 * (lo + hi);
            }
            if (next - u).abs() <= f64::EPSILON * u.abs().max(1.0) {
                u = next;
                break;
            }
            u = next;
        }
        Ok(u)
    }

    /// Jet of φ = ψ⁻¹ at v from the closed-form derivative ladder
    /// φ′ = P∘φ, φ″ = (P′P)∘φ, φ‴ = ((P″P + P′²)P)∘φ,
    /// φ⁗ = ((4PP′P″ + P′³)P)∘φ.
    fn phi_jet(&self, v: f64) -> Result<Jet, EvalError> {
        let u = self.invert(v)?;
        let p0 = self.poly.eval(u);
        let p1 = self.poly.derivative(u);
        let p2 = self.poly.second_derivative();
        let d1 = p0;
        let d2 = p1 * p0;
        let d3 = (p2 * p0 + p1 * p1) * p0;
        let d4 = (4.0 * p0 * p1 * p2 + p1 * p1 * p1) * p0;
        Ok(Jet {
            c: [u, d1, d2 / 2.0, d3 / 6.0, d4 / 24.0],
        })
    }
}

/// φ = ψ⁻¹ as a generator.
struct PolyPhi {
    core: Arc<PolyFlowCore>,
}

impl Generator for PolyPhi {
    fn value(&self, x: f64) -> Result<f64, EvalError> {
        self.core.invert(x)
    }

    fn jet(&self, x: f64) -> Result<Jet, EvalError> {
        self.core.phi_jet(x)
    }

    fn name(&self) -> String {
        format!("psi_inv[{}]", RecipPoly::describe(&self.core.poly))
    }
}

/// f = 1/√(P∘φ) as a generator.
struct PolyEll {
    core: Arc<PolyFlowCore>,
}

impl Generator for PolyEll {
    fn value(&self, x: f64) -> Result<f64, EvalError> {
        let u = self.core.invert(x)?;
        Ok(1.0 / self.core.poly.eval(u).sqrt())
    }

    fn jet(&self, x: f64) -> Result<Jet, EvalError> {
        let phi = self.core.phi_jet(x)?;
        let u = phi.value();
        let p_of_phi = phi.compose_outer([
            self.core.poly.eval(u),
            self.core.poly.derivative(u),
            self.core.poly.gamma,
            0.0,
            0.0,
        ]);
        Ok(p_of_phi.compose_outer(outer_powf(p_of_phi.value(), -0.5)))
    }

    fn name(&self) -> String {
        format!("recip_sqrt[{}]", RecipPoly::describe(&self.core.poly))
    }
}
