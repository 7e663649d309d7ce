//! Generator functions: the scalar functions f, g, φ that parameterize means.
//!
//! Everything downstream consumes `dyn Generator`, so expression-defined
//! functions, closed-form kernels, and tabulated antiderivatives are
//! interchangeable. Implementations must be pure; all are usable from many
//! threads at once.

use crate::error::EvalError;
use crate::expr::{Expression, Jet};
use std::sync::Arc;

pub trait Generator: Send + Sync {
    /// Function value at `x`.
    fn value(&self, x: f64) -> Result<f64, EvalError>;

    /// Degree-4 Taylor jet at `x`. Implementations without derivative data
    /// return [`EvalError::DerivativesUnavailable`].
    fn jet(&self, x: f64) -> Result<Jet, EvalError>;

    /// Whether [`Generator::jet`] is expected to succeed on the domain.
    fn has_derivatives(&self) -> bool {
        true
    }

    /// Human-readable name used in diagnostics and reports.
    fn name(&self) -> String;

    /// `order`-th derivative at `x`, orders 0 through 4.
    fn derivative(&self, x: f64, order: usize) -> Result<f64, EvalError> {
        if order == 0 {
            return self.value(x);
        }
        self.jet(x)?.derivative(order)
    }
}

pub type GeneratorRef = Arc<dyn Generator>;

impl Generator for Expression {
    fn value(&self, x: f64) -> Result<f64, EvalError> {
        Expression::value(self, x)
    }

    fn jet(&self, x: f64) -> Result<Jet, EvalError> {
        self.eval_jet(x)
    }

    fn name(&self) -> String {
        self.source().trim().to_string()
    }
}

/// Closure-backed generator carrying values only, for functions that are
/// defined pointwise (tabulations, numerical inverses).
pub struct ValueFn<F: Fn(f64) -> Result<f64, EvalError> + Send + Sync> {
    name: String,
    f: F,
}

impl<F: Fn(f64) -> Result<f64, EvalError> + Send + Sync> ValueFn<F> {
    pub fn new(name: impl Into<String>, f: F) -> Self {
        ValueFn { name: name.into(), f }
    }
}

impl<F: Fn(f64) -> Result<f64, EvalError> + Send + Sync> Generator for ValueFn<F> {
    fn value(&self, x: f64) -> Result<f64, EvalError> {
        (self.f)(x)
    }

    fn jet(&self, _x: f64) -> Result<Jet, EvalError> {
        Err(EvalError::DerivativesUnavailable { name: self.name.clone() })
    }

    fn has_derivatives(&self) -> bool {
        false
    }

    fn name(&self) -> String {
        self.name.clone()
    }
}

/// `Σ cᵢ·gᵢ + constant` over other generators.
pub struct LinearCombo {
    terms: Vec<(f64, GeneratorRef)>,
    constant: f64,
}

impl LinearCombo {
    pub fn new(terms: Vec<(f64, GeneratorRef)>, constant: f64) -> Self {
        LinearCombo { terms, constant }
    }
}

impl Generator for LinearCombo {
    fn value(&self, x: f64) -> Result<f64, EvalError> {
        let mut acc = self.constant;
        for (c, g) in &self.terms {
            acc += c * g.value(x)?;
        }
        Ok(acc)
    }

    fn jet(&self, x: f64) -> Result<Jet, EvalError> {
        let mut acc = Jet::constant(self.constant);
        for (c, g) in &self.terms {
            acc = acc + g.jet(x)?.scale(*c);
        }
        Ok(acc)
    }

    fn has_derivatives(&self) -> bool {
        self.terms.iter().all(|(_, g)| g.has_derivatives())
    }

    fn name(&self) -> String {
        let mut parts: Vec<String> = self
            .terms
            .iter()
            .map(|(c, g)| {
                if *c == 1.0 {
                    g.name()
                } else {
                    format!("{c}*({})", g.name())
                }
            })
            .collect();
        if self.constant != 0.0 {
            parts.push(format!("{}", self.constant));
        }
        if parts.is_empty() {
            "0".to_string()
        } else {
            parts.join(" + ")
        }
    }
}

/// Quotient `num/den`, the φ = g/f used by Bajraktarević means.
pub struct Ratio {
    num: GeneratorRef,
    den: GeneratorRef,
}

impl Ratio {
    pub fn new(num: GeneratorRef, den: GeneratorRef) -> Self {
        Ratio { num, den }
    }
}

impl Generator for Ratio {
    fn value(&self, x: f64) -> Result<f64, EvalError> {
        let d = self.den.value(x)?;
        if d == 0.0 {
            return Err(EvalError::Domain {
                node: self.name(),
                point: x,
                detail: "division by zero".to_string(),
            });
        }
        Ok(self.num.value(x)? / d)
    }

    fn jet(&self, x: f64) -> Result<Jet, EvalError> {
        let n = self.num.jet(x)?;
        let d = self.den.jet(x)?;
        n.div_checked(&d).ok_or_else(|| EvalError::Domain {
            node: self.name(),
            point: x,
            detail: "division by zero".to_string(),
        })
    }

    fn has_derivatives(&self) -> bool {
        self.num.has_derivatives() && self.den.has_derivatives()
    }

    fn name(&self) -> String {
        format!("({}) / ({})", self.num.name(), self.den.name())
    }
}

/// Parse an expression string into a shareable generator.
pub fn from_expr(source: &str) -> Result<GeneratorRef, crate::error::ParseError> {
    Ok(Arc::new(Expression::parse(source)?))
}
