//! Test support: the expression catalog exercised by the property suites,
//! and finite-difference oracles for validating jet derivatives.

use crate::error::Error;
use crate::generator::{from_expr, Generator, GeneratorRef};
use crate::interval::Interval;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// (expression, lo, hi): smooth on an open neighborhood of [lo, hi].
/// Covers every grammar function, both power forms, and the constants.
pub const CATALOG: [(&str, f64, f64); 28] = [
    ("x", -2.0, 2.0),
    ("x^2", -2.0, 2.0),
    ("x^3 - 2*x + 1", -2.0, 2.0),
    ("1/x", 0.2, 3.0),
    ("1/(1 + x^2)", -2.0, 2.0),
    ("sqrt(x)", 0.25, 4.0),
    ("exp(x)", -2.0, 2.0),
    ("log(x)", 0.3, 5.0),
    ("sin(x)", -1.5, 1.5),
    ("cos(x)", -1.5, 1.5),
    ("tan(x)", -1.2, 1.2),
    ("sinh(x)", -2.0, 2.0),
    ("cosh(x)", -2.0, 2.0),
    ("tanh(x)", -2.0, 2.0),
    ("asin(x)", -0.8, 0.8),
    ("acos(x)", -0.8, 0.8),
    ("atan(x)", -3.0, 3.0),
    ("abs(x)", 0.5, 3.0),
    ("x^1.5", 0.3, 4.0),
    ("x^x", 0.4, 2.0),
    ("exp(-x^2/2)", -2.0, 2.0),
    ("sin(x)*cos(x) + x^2/4", -1.5, 1.5),
    ("log(1 + exp(x))", -2.0, 2.0),
    ("(1 + x^2)/(2 - x)", -1.0, 1.5),
    ("sqrt(1 + x^2)", -2.0, 2.0),
    ("pi * x + e", -2.0, 2.0),
    ("sin(cos(x))", -1.5, 1.5),
    ("exp(sin(x)) - tanh(x/2)", -1.5, 1.5),
];

/// Parsed catalog with domains.
pub fn catalog() -> Vec<(GeneratorRef, Interval)> {
    CATALOG
        .iter()
        .map(|&(src, lo, hi)| {
            (
                from_expr(src).expect(src),
                Interval::new(lo, hi).expect(src),
            )
        })
        .collect()
}

/// Central finite difference of order `k` ∈ {1, 2, 3}. The third order uses
/// one Richardson step so its truncation error stays below the validation
/// tolerances even for fast-growing catalog functions.
pub fn fd_derivative(g: &dyn Generator, x: f64, k: usize) -> crate::Result<f64> {
    match k {
        1 => {
            let h = 1e-5;
            Ok((g.value(x + h)? - g.value(x - h)?) / (2.0 * h))
        }
        2 => {
            let h = 2e-4;
            Ok((g.value(x + h)? - 2.0 * g.value(x)? + g.value(x - h)?) / (h * h))
        }
        3 => {
            let d = |h: f64| -> crate::Result<f64> {
                Ok((g.value(x + 2.0 * h)? - 2.0 * g.value(x + h)? + 2.0 * g.value(x - h)?
                    - g.value(x - 2.0 * h)?)
                    / (2.0 * h * h * h))
            };
            let h = 2e-3;
            Ok((4.0 * d(h)? - d(2.0 * h)?) / 3.0)
        }
        _ => Err(Error::Precondition(format!(
            "finite differences support orders 1..3, got {k}"
        ))),
    }
}

/// `n` seeded uniform points, padded from the endpoints so every FD stencil
/// (reach 8e-3) stays inside the interval.
pub fn interior_points(interval: &Interval, n: usize, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pad = 0.02 * interval.length() + 0.01;
    (0..n)
        .map(|_| rng.gen_range((interval.lo + pad)..(interval.hi - pad)))
        .collect()
}
