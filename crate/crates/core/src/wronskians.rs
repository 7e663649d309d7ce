//! Derivative determinants W^{i,j}, the ratios Φ and Ψ, and the quadratic
//! discriminant identity.

use crate::error::{Error, EvalError};
use crate::generator::Generator;
use crate::interval::Interval;
use crate::tolerances::WRONSKIAN_GUARD;
use serde::Serialize;

/// W^{i,j}(x) = f^{(i)}(x)·g^{(j)}(x) − f^{(j)}(x)·g^{(i)}(x), orders ≤ 3.
///
/// Antisymmetry in (i, j) and in (f, g) is exact as computed: the two
/// products are the same floats, subtracted in opposite order.
pub fn wronskian(
    f: &dyn Generator,
    g: &dyn Generator,
    i: usize,
    j: usize,
    x: f64,
) -> crate::Result<f64> {
    if i > 3 || j > 3 {
        return Err(Error::Eval(EvalError::DerivativeOrder {
            order: i.max(j),
            max: 3,
        }));
    }
    let fj = f.jet(x)?;
    let gj = g.jet(x)?;
    Ok(fj.derivative(i)? * gj.derivative(j)? - fj.derivative(j)? * gj.derivative(i)?)
}

fn guarded_w10(fd: &[f64; 4], gd: &[f64; 4], x: f64) -> crate::Result<f64> {
    let w10 = fd[1] * gd[0] - fd[0] * gd[1];
    let scale = (fd[1] * gd[0]).abs() + (fd[0] * gd[1]).abs();
    if w10 == 0.0 || w10.abs() < WRONSKIAN_GUARD * scale {
        return Err(Error::SingularWronskian { x });
    }
    Ok(w10)
}

fn derivatives(gen: &dyn Generator, x: f64) -> crate::Result<[f64; 4]> {
    let jet = gen.jet(x)?;
    Ok([
        jet.derivative(0)?,
        jet.derivative(1)?,
        jet.derivative(2)?,
        jet.derivative(3)?,
    ])
}

/// (Φ, Ψ) = (W²⁰/W¹⁰, −W²¹/W¹⁰) at `x`.
pub fn phi_psi(f: &dyn Generator, g: &dyn Generator, x: f64) -> crate::Result<(f64, f64)> {
    let fd = derivatives(f, x)?;
    let gd = derivatives(g, x)?;
    let w10 = guarded_w10(&fd, &gd, x)?;
    let w20 = fd[2] * gd[0] - fd[0] * gd[2];
    let w21 = fd[2] * gd[1] - fd[1] * gd[2];
    Ok((w20 / w10, -w21 / w10))
}

/// Ψ′ by the quotient rule, using (W²¹)′ = f‴g′ − f′g‴ and (W¹⁰)′ = W²⁰.
///
/// The third derivatives come from the order-4 jets directly, so no
/// finite-difference step enters.
pub fn psi_prime(f: &dyn Generator, g: &dyn Generator, x: f64) -> crate::Result<f64> {
    let fd = derivatives(f, x)?;
    let gd = derivatives(g, x)?;
    let w10 = guarded_w10(&fd, &gd, x)?;
    let w20 = fd[2] * gd[0] - fd[0] * gd[2];
    let w21 = fd[2] * gd[1] - fd[1] * gd[2];
    let w21_prime = fd[3] * gd[1] - fd[1] * gd[3];
    Ok((w21 * w20 - w21_prime * w10) / (w10 * w10))
}

/// Grid evaluation of the Wronskian determinants and their ratios.
#[derive(Debug, Clone, Serialize)]
pub struct WronskianProfile {
    pub grid: Vec<f64>,
    pub w10: Vec<f64>,
    pub w20: Vec<f64>,
    pub w21: Vec<f64>,
    pub phi: Vec<f64>,
    pub psi: Vec<f64>,
}

impl WronskianProfile {
    /// Evaluate on `n` uniform points over the inset of `interval`.
    /// Fails with a singular-Wronskian error if W¹⁰ vanishes anywhere.
    pub fn build(
        f: &dyn Generator,
        g: &dyn Generator,
        interval: &Interval,
        n: usize,
    ) -> crate::Result<Self> {
        let grid = interval.grid(n);
        let mut profile = WronskianProfile {
            grid: grid.clone(),
            w10: Vec::with_capacity(n),
            w20: Vec::with_capacity(n),
            w21: Vec::with_capacity(n),
            phi: Vec::with_capacity(n),
            psi: Vec::with_capacity(n),
        };
        for &x in &grid {
            let fd = derivatives(f, x)?;
            let gd = derivatives(g, x)?;
            let w10 = guarded_w10(&fd, &gd, x)?;
            let w20 = fd[2] * gd[0] - fd[0] * gd[2];
            let w21 = fd[2] * gd[1] - fd[1] * gd[2];
            profile.w10.push(w10);
            profile.w20.push(w20);
            profile.w21.push(w21);
            profile.phi.push(w20 / w10);
            profile.psi.push(-w21 / w10);
        }
        Ok(profile)
    }

    /// CSV rendering with LF line endings and `.` decimal separators.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("x,W10,W20,W21,Phi,Psi\n");
        for i in 0..self.grid.len() {
            out.push_str(&format!(
                "{},{},{},{},{},{}\n",
                self.grid[i], self.w10[i], self.w20[i], self.w21[i], self.phi[i], self.psi[i]
            ));
        }
        out
    }
}

/// Confirm Y″ = Φ·Y′ + Ψ·Y for Y ∈ {f, g} at every grid point.
///
/// The identity holds by construction of Φ and Ψ, so this validates the
/// derivative pipeline rather than a property of the pair.
pub fn verify_fundamental_ode(
    f: &dyn Generator,
    g: &dyn Generator,
    grid: &[f64],
    tol: f64,
) -> crate::Result<bool> {
    for &x in grid {
        let fd = derivatives(f, x)?;
        let gd = derivatives(g, x)?;
        let w10 = guarded_w10(&fd, &gd, x)?;
        let w20 = fd[2] * gd[0] - fd[0] * gd[2];
        let w21 = fd[2] * gd[1] - fd[1] * gd[2];
        let (phi, psi) = (w20 / w10, -w21 / w10);
        for d in [&fd, &gd] {
            let lhs = d[2];
            let rhs = phi * d[1] + psi * d[0];
            let scale = lhs
                .abs()
                .max((phi * d[1]).abs())
                .max((psi * d[0]).abs())
                .max(1.0);
            if (lhs - rhs).abs() > tol * scale {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// P(u) = α + β·u + γ·u².
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QuadraticPolynomial {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
}

impl QuadraticPolynomial {
    pub fn new(alpha: f64, beta: f64, gamma: f64) -> Self {
        QuadraticPolynomial { alpha, beta, gamma }
    }

    pub fn eval(&self, u: f64) -> f64 {
        self.alpha + u * (self.beta + u * self.gamma)
    }

    pub fn derivative(&self, u: f64) -> f64 {
        self.beta + 2.0 * self.gamma * u
    }

    pub fn second_derivative(&self) -> f64 {
        2.0 * self.gamma
    }

    pub fn discriminant(&self) -> f64 {
        self.beta * self.beta - 4.0 * self.alpha * self.gamma
    }

    /// Minimum over a closed interval by vertex analysis: the only interior
    /// critical point of a quadratic is its vertex.
    pub fn min_on(&self, lo: f64, hi: f64) -> (f64, f64) {
        let mut witness = lo;
        let mut value = self.eval(lo);
        let at_hi = self.eval(hi);
        if at_hi < value {
            witness = hi;
            value = at_hi;
        }
        if self.gamma != 0.0 {
            let vertex = -self.beta / (2.0 * self.gamma);
            if vertex > lo && vertex < hi {
                let at_vertex = self.eval(vertex);
                if at_vertex < value {
                    witness = vertex;
                    value = at_vertex;
                }
            }
        }
        (witness, value)
    }

    /// Error with the minimizing witness unless P > 0 on the closed interval.
    pub fn ensure_positive_on(&self, lo: f64, hi: f64) -> crate::Result<()> {
        let (witness, value) = self.min_on(lo, hi);
        if value <= 0.0 {
            return Err(Error::NotPositive { witness, value });
        }
        Ok(())
    }
}

/// Check (P′)² − 2·P″·P = β² − 4αγ pointwise; an exact polynomial identity,
/// so this validates the arithmetic rather than the inputs.
pub fn discriminant_identity_check(p: &QuadraticPolynomial, points: &[f64], tol: f64) -> bool {
    let d = p.discriminant();
    points.iter().all(|&u| {
        let lhs = p.derivative(u) * p.derivative(u) - 2.0 * p.second_derivative() * p.eval(u);
        (lhs - d).abs() <= tol * d.abs().max(1.0)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generator::from_expr;

    #[test]
    fn wronskian_examples() {
        let cos = from_expr("cos(x)").unwrap();
        let sin = from_expr("sin(x)").unwrap();
        for i in 0..7 {
            let x = -1.0 + 0.35 * i as f64;
            let w = wronskian(cos.as_ref(), sin.as_ref(), 1, 0, x).unwrap();
            assert!((w + 1.0).abs() < 1e-14, "x = {x}");
            let ww = wronskian(cos.as_ref(), sin.as_ref(), 2, 2, x).unwrap();
            assert_eq!(ww, 0.0);
        }
        let one = from_expr("1").unwrap();
        let log = from_expr("log(x)").unwrap();
        assert_eq!(wronskian(one.as_ref(), log.as_ref(), 2, 1, 2.0).unwrap(), 0.0);
    }

    #[test]
    fn wronskian_rejects_high_orders() {
        let f = from_expr("x").unwrap();
        let g = from_expr("x^2").unwrap();
        assert!(wronskian(f.as_ref(), g.as_ref(), 4, 0, 1.0).is_err());
    }

    #[test]
    fn phi_psi_examples() {
        let cos = from_expr("cos(x)").unwrap();
        let sin = from_expr("sin(x)").unwrap();
        let (phi, psi) = phi_psi(cos.as_ref(), sin.as_ref(), 0.7).unwrap();
        assert!(phi.abs() < 1e-13 && (psi + 1.0).abs() < 1e-13);

        let one = from_expr("1").unwrap();
        let log = from_expr("log(x)").unwrap();
        let (phi, psi) = phi_psi(one.as_ref(), log.as_ref(), 2.0).unwrap();
        assert!((phi + 0.5).abs() < 1e-13, "phi = {phi}");
        assert!(psi.abs() < 1e-13);

        let id = from_expr("x").unwrap();
        let (phi, psi) = phi_psi(one.as_ref(), id.as_ref(), 0.3).unwrap();
        assert_eq!((phi, psi), (0.0, 0.0));
    }

    #[test]
    fn psi_prime_by_quotient_rule_matches_finite_difference() {
        let f = from_expr("exp(x)").unwrap();
        let g = from_expr("x * exp(x)").unwrap();
        // Φ = 2, Ψ = −1 for this pair, so Ψ′ must vanish.
        let d = psi_prime(f.as_ref(), g.as_ref(), 0.4).unwrap();
        assert!(d.abs() < 1e-12, "d = {d}");

        let one = from_expr("1").unwrap();
        let cube = from_expr("x^3 + x").unwrap();
        // Ψ ≡ 0 for f = 1 (W21 has f′ = f″ = 0 throughout).
        let d = psi_prime(one.as_ref(), cube.as_ref(), 0.9).unwrap();
        assert_eq!(d, 0.0);

        // Generic pair: finite difference of Ψ itself.
        let f = from_expr("exp(x)").unwrap();
        let g = from_expr("sin(x)").unwrap();
        let ps = |x: f64| phi_psi(f.as_ref(), g.as_ref(), x).unwrap().1;
        let h = 1e-5;
        let fd = (ps(0.5 + h) - ps(0.5 - h)) / (2.0 * h);
        let exact = psi_prime(f.as_ref(), g.as_ref(), 0.5).unwrap();
        assert!(
            (fd - exact).abs() <= 1e-6 * exact.abs().max(1.0),
            "fd = {fd}, exact = {exact}"
        );
    }

    #[test]
    fn fundamental_ode_holds() {
        let grid: Vec<f64> = (0..100).map(|i| 0.1 + 0.01 * i as f64).collect();
        let cos = from_expr("cos(x)").unwrap();
        let sin = from_expr("sin(x)").unwrap();
        assert!(verify_fundamental_ode(cos.as_ref(), sin.as_ref(), &grid, 1e-10).unwrap());

        let f = from_expr("exp(x)").unwrap();
        let g = from_expr("x * exp(x)").unwrap();
        assert!(verify_fundamental_ode(f.as_ref(), g.as_ref(), &grid, 1e-10).unwrap());
    }

    #[test]
    fn singular_wronskian_guard_triggers() {
        // g/f = x² has derivative zero at the origin, so W¹⁰ vanishes there.
        let one = from_expr("1").unwrap();
        let sq = from_expr("x^2").unwrap();
        assert!(matches!(
            phi_psi(one.as_ref(), sq.as_ref(), 0.0),
            Err(Error::SingularWronskian { .. })
        ));
        let grid = vec![-0.5, 0.0, 0.5];
        assert!(matches!(
            verify_fundamental_ode(one.as_ref(), sq.as_ref(), &grid, 1e-10),
            Err(Error::SingularWronskian { .. })
        ));
    }

    #[test]
    fn profile_csv_layout() {
        let cos = from_expr("cos(x)").unwrap();
        let sin = from_expr("sin(x)").unwrap();
        let dom = Interval::new(0.0, 1.0).unwrap();
        let profile = WronskianProfile::build(cos.as_ref(), sin.as_ref(), &dom, 5).unwrap();
        let csv = profile.to_csv();
        let mut lines = csv.lines();
        assert_eq!(lines.next().unwrap(), "x,W10,W20,W21,Phi,Psi");
        assert_eq!(csv.lines().count(), 6);
        assert!(!csv.contains('\r'));
        assert!(profile.w10.iter().all(|w| (w + 1.0).abs() < 1e-12));
    }

    #[test]
    fn discriminant_identity_examples() {
        let us = [-3.0, -1.0, 0.0, 0.5, 2.0, 10.0];
        let p = QuadraticPolynomial::new(1.0, 0.0, 1.0);
        assert_eq!(p.discriminant(), -4.0);
        assert!(discriminant_identity_check(&p, &us, 1e-12));
        let p = QuadraticPolynomial::new(0.0, 1.0, 0.0);
        assert_eq!(p.discriminant(), 1.0);
        assert!(discriminant_identity_check(&p, &us, 1e-12));
        let p = QuadraticPolynomial::new(1.0, -2.0, 1.0);
        assert_eq!(p.discriminant(), 0.0);
        assert!(discriminant_identity_check(&p, &us, 1e-12));
    }

    #[test]
    fn quadratic_positivity_by_vertex_analysis() {
        let p = QuadraticPolynomial::new(1.0, 0.0, 1.0);
        assert!(p.ensure_positive_on(-10.0, 10.0).is_ok());
        // vertex of u² − u + 0.2 at u = 0.5 dips below zero inside (0, 1)
        let p = QuadraticPolynomial::new(0.2, -1.0, 1.0);
        let err = p.ensure_positive_on(0.0, 1.0).unwrap_err();
        match err {
            Error::NotPositive { witness, value } => {
                assert!((witness - 0.5).abs() < 1e-12);
                assert!((value + 0.05).abs() < 1e-12);
            }
            other => panic!("unexpected error {other:?}"),
        }
        // endpoints only: decreasing linear part positive on the interval
        let p = QuadraticPolynomial::new(1.0, -0.5, 0.0);
        assert!(p.ensure_positive_on(0.0, 1.0).is_ok());
        assert!(p.ensure_positive_on(0.0, 3.0).is_err());
    }
}
