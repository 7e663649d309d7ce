//! Degree-4 truncated Taylor series ("jets") for forward-mode derivatives.
//!
//! A [`Jet`] stores the coefficients of a truncated expansion
//! `f(p + h) = c0 + c1 h + c2 h^2 + c3 h^3 + c4 h^4 + O(h^5)`,
//! i.e. `c[k] = f^(k)(p) / k!`. Arithmetic on jets is exact truncated Taylor
//! arithmetic: composing two degree-4 jets and truncating equals the jet of
//! the composition.

use crate::error::EvalError;

/// Highest derivative order carried by a [`Jet`].
pub const JET_ORDER: usize = 4;

const LEN: usize = JET_ORDER + 1;

/// Truncated Taylor expansion of a scalar function at a point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jet {
    /// `c[k] = f^(k) / k!` at the expansion point.
    pub c: [f64; LEN],
}

impl Jet {
    /// Jet of the constant function `v`.
    pub fn constant(v: f64) -> Self {
        let mut c = [0.0; LEN];
        c[0] = v;
        Jet { c }
    }

    /// Jet of the identity evaluated at `v` (the seed for the variable).
    pub fn variable(v: f64) -> Self {
        let mut c = [0.0; LEN];
        c[0] = v;
        c[1] = 1.0;
        Jet { c }
    }

    pub fn value(&self) -> f64 {
        self.c[0]
    }

    /// `k`-th derivative, recovered as `k! * c[k]`.
    pub fn derivative(&self, k: usize) -> Result<f64, EvalError> {
        if k > JET_ORDER {
            return Err(EvalError::DerivativeOrder {
                order: k,
                max: JET_ORDER,
            });
        }
        const FACT: [f64; LEN] = [1.0, 1.0, 2.0, 6.0, 24.0];
        Ok(self.c[k] * FACT[k])
    }

    pub fn is_finite(&self) -> bool {
        self.c.iter().all(|v| v.is_finite())
    }

    pub fn scale(&self, s: f64) -> Self {
        let mut c = self.c;
        for v in &mut c {
            *v *= s;
        }
        Jet { c }
    }

    /// Cauchy product truncated to degree 4.
    pub fn mul(&self, rhs: &Jet) -> Self {
        let a = &self.c;
        let b = &rhs.c;
        let mut c = [0.0; LEN];
        for (k, ck) in c.iter_mut().enumerate() {
            let mut acc = 0.0;
            for j in 0..=k {
                acc += a[j] * b[k - j];
            }
            *ck = acc;
        }
        Jet { c }
    }

    /// Truncated series division; `None` when the divisor's constant term is
    /// exactly zero.
    pub fn div_checked(&self, rhs: &Jet) -> Option<Self> {
        let b0 = rhs.c[0];
        if b0 == 0.0 {
            return None;
        }
        let a = &self.c;
        let b = &rhs.c;
        let mut q = [0.0; LEN];
        for k in 0..LEN {
            let mut acc = a[k];
            for j in 1..=k {
                acc -= b[j] * q[k - j];
            }
            q[k] = acc / b0;
        }
        Some(Jet { c: q })
    }

    /// Multiplicative inverse `1 / self`.
    pub fn recip_checked(&self) -> Option<Self> {
        Jet::constant(1.0).div_checked(self)
    }

    /// Compose outer Taylor coefficients `outer[k] = F^(k)(u0)/k!` with this
    /// jet, whose value must be `u0`. Exact to degree 4 because the inner
    /// perturbation has zero constant term.
    pub fn compose_outer(&self, outer: [f64; LEN]) -> Self {
        let mut inner = *self;
        inner.c[0] = 0.0;
        // Horner evaluation in the perturbation series.
        let mut acc = Jet::constant(outer[JET_ORDER]);
        for k in (0..JET_ORDER).rev() {
            acc = acc.mul(&inner);
            acc.c[0] += outer[k];
        }
        acc
    }

    /// Jet of the derivative function, accurate to degree 3 (the degree-4
    /// coefficient is unknown and set to zero).
    pub fn derivative_jet(&self) -> Self {
        let mut c = [0.0; LEN];
        for k in 1..LEN {
            c[k - 1] = k as f64 * self.c[k];
        }
        Jet { c }
    }

    /// Integer power by repeated squaring; valid for any base sign.
    pub fn powi(&self, n: i64) -> Option<Self> {
        if n == 0 {
            return Some(Jet::constant(1.0));
        }
        if n < 0 {
            return self.powi(-n)?.recip_checked();
        }
        let mut acc = Jet::constant(1.0);
        let mut base = *self;
        let mut k = n;
        while k > 0 {
            if k & 1 == 1 {
                acc = acc.mul(&base);
            }
            base = base.mul(&base);
            k >>= 1;
        }
        Some(acc)
    }
}

impl std::ops::Add for Jet {
    type Output = Jet;
    fn add(self, rhs: Jet) -> Jet {
        let mut c = self.c;
        for (a, b) in c.iter_mut().zip(rhs.c.iter()) {
            *a += b;
        }
        Jet { c }
    }
}

impl std::ops::Sub for Jet {
    type Output = Jet;
    fn sub(self, rhs: Jet) -> Jet {
        let mut c = self.c;
        for (a, b) in c.iter_mut().zip(rhs.c.iter()) {
            *a -= b;
        }
        Jet { c }
    }
}

impl std::ops::Neg for Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        self.scale(-1.0)
    }
}

impl std::ops::Mul for Jet {
    type Output = Jet;
    fn mul(self, rhs: Jet) -> Jet {
        Jet::mul(&self, &rhs)
    }
}

// Elementary outer coefficient tables F^(k)(u0)/k!.

pub(crate) fn outer_exp(u0: f64) -> [f64; LEN] {
    let e = u0.exp();
    [e, e, e / 2.0, e / 6.0, e / 24.0]
}

pub(crate) fn outer_log(u0: f64) -> [f64; LEN] {
    let r = 1.0 / u0;
    [
        u0.ln(),
        r,
        -r * r / 2.0,
        r * r * r / 3.0,
        -r * r * r * r / 4.0,
    ]
}

pub(crate) fn outer_sin(u0: f64) -> [f64; LEN] {
    let (s, c) = u0.sin_cos();
    [s, c, -s / 2.0, -c / 6.0, s / 24.0]
}

pub(crate) fn outer_cos(u0: f64) -> [f64; LEN] {
    let (s, c) = u0.sin_cos();
    [c, -s, -c / 2.0, s / 6.0, c / 24.0]
}

pub(crate) fn outer_sinh(u0: f64) -> [f64; LEN] {
    let s = u0.sinh();
    let c = u0.cosh();
    [s, c, s / 2.0, c / 6.0, s / 24.0]
}

pub(crate) fn outer_cosh(u0: f64) -> [f64; LEN] {
    let s = u0.sinh();
    let c = u0.cosh();
    [c, s, c / 2.0, s / 6.0, c / 24.0]
}

pub(crate) fn outer_sqrt(u0: f64) -> [f64; LEN] {
    let s = u0.sqrt();
    [
        s,
        0.5 / s,
        -1.0 / (8.0 * s * u0),
        1.0 / (16.0 * s * u0 * u0),
        -5.0 / (128.0 * s * u0 * u0 * u0),
    ]
}

/// `u^r` for real constant `r`; requires `u0 > 0`.
pub(crate) fn outer_powf(u0: f64, r: f64) -> [f64; LEN] {
    let mut out = [0.0; LEN];
    let mut coeff = u0.powf(r);
    out[0] = coeff;
    let mut fact = 1.0;
    for (k, slot) in out.iter_mut().enumerate().skip(1) {
        coeff *= (r - (k as f64 - 1.0)) / u0;
        fact *= k as f64;
        *slot = coeff / fact;
    }
    out
}

pub(crate) fn outer_asin(u0: f64) -> [f64; LEN] {
    let w = 1.0 - u0 * u0;
    let w12 = w.sqrt();
    let d1 = 1.0 / w12;
    let d2 = u0 / (w * w12);
    let d3 = (1.0 + 2.0 * u0 * u0) / (w * w * w12);
    let d4 = u0 * (9.0 + 6.0 * u0 * u0) / (w * w * w * w12);
    [u0.asin(), d1, d2 / 2.0, d3 / 6.0, d4 / 24.0]
}

pub(crate) fn outer_acos(u0: f64) -> [f64; LEN] {
    let a = outer_asin(u0);
    [u0.acos(), -a[1], -a[2], -a[3], -a[4]]
}

pub(crate) fn outer_atan(u0: f64) -> [f64; LEN] {
    let w = 1.0 + u0 * u0;
    let d1 = 1.0 / w;
    let d2 = -2.0 * u0 / (w * w);
    let d3 = (6.0 * u0 * u0 - 2.0) / (w * w * w);
    let d4 = 24.0 * u0 * (1.0 - u0 * u0) / (w * w * w * w);
    [u0.atan(), d1, d2 / 2.0, d3 / 6.0, d4 / 24.0]
}
