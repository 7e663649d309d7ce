//! Property suite: parser round-trips, jet arithmetic against oracles,
//! mean axioms, kernel identities, and Wronskian covariance.

use meanlab::expr::Expression;
use meanlab::generator::{from_expr, GeneratorRef, LinearCombo};
use meanlab::kernels::{delta, s_jet, c_jet, KernelCombination};
use meanlab::means::{
    bajraktarevic_mean, quasi_arithmetic_mean, GeneratorPair, WeightedSample,
};
use meanlab::testing::{catalog, fd_derivative, interior_points};
use meanlab::wronskians::wronskian;
use meanlab::Interval;
use proptest::prelude::*;
use std::sync::Arc;

const FUNCS: [&str; 13] = [
    "sin", "cos", "tan", "sinh", "cosh", "tanh", "exp", "log", "sqrt", "abs", "asin", "acos",
    "atan",
];

fn expr_strategy() -> impl Strategy<Value = String> {
    let leaf = prop_oneof![
        (0u32..100).prop_map(|n| n.to_string()),
        (1u32..40, 1u32..10).prop_map(|(a, b)| format!("{a}.{b}")),
        Just("x".to_string()),
        Just("pi".to_string()),
        Just("e".to_string()),
    ];
    leaf.prop_recursive(4, 24, 3, |inner| {
        prop_oneof![
            inner.clone().prop_map(|a| format!("-({a})")),
            (
                inner.clone(),
                inner.clone(),
                prop::sample::select(vec!["+", "-", "*", "/"])
            )
                .prop_map(|(a, b, op)| format!("({a}) {op} ({b})")),
            (inner.clone(), 0u32..5).prop_map(|(a, k)| format!("({a})^{k}")),
            (inner, prop::sample::select(FUNCS.to_vec())).prop_map(|(a, f)| format!("{f}({a})")),
        ]
    })
}

proptest! {
    /// Printing a parsed tree and re-parsing it reproduces the tree.
    #[test]
    fn parser_round_trip(source in expr_strategy()) {
        let first = Expression::parse(&source).unwrap();
        let printed = first.to_string();
        let second = Expression::parse(&printed).unwrap();
        prop_assert_eq!(first.ast(), second.ast(), "printed: {}", printed);
    }
}

proptest! {
    /// Jet of a product equals the product of jets, same for quotients with
    /// a nonvanishing denominator.
    #[test]
    fn jet_product_consistency(
        i in 0usize..meanlab::testing::CATALOG.len(),
        j in 0usize..meanlab::testing::CATALOG.len(),
        x in 0.55f64..0.75,
    ) {
        let (src1, ..) = meanlab::testing::CATALOG[i];
        let (src2, ..) = meanlab::testing::CATALOG[j];
        let product = Expression::parse(&format!("({src1}) * ({src2})")).unwrap();
        let j1 = Expression::parse(src1).unwrap().eval_jet(x).unwrap();
        let j2 = Expression::parse(src2).unwrap().eval_jet(x).unwrap();
        let direct = product.eval_jet(x).unwrap();
        let composed = j1 * j2;
        for k in 0..=4 {
            let a = direct.c[k];
            let b = composed.c[k];
            prop_assert!(
                (a - b).abs() <= 1e-12 * a.abs().max(b.abs()).max(1.0),
                "coefficient {}: {} vs {}", k, a, b
            );
        }
    }
}

/// Finite-difference cross-check at a handful of seeded points per catalog
/// entry; the full 50-point sweep runs in the acceptance suite.
#[test]
fn jets_match_finite_differences() {
    for (gen, interval) in catalog() {
        for &x in &interior_points(&interval, 5, 0xFD) {
            for k in 1..=3usize {
                let exact = gen.derivative(x, k).unwrap();
                let approx = fd_derivative(gen.as_ref(), x, k).unwrap();
                let tol = if k == 3 { 1e-4 } else { 1e-6 };
                assert!(
                    (exact - approx).abs() <= tol * approx.abs().max(1.0),
                    "{} order {k} at {x}: jet {exact} vs fd {approx}",
                    gen.name()
                );
            }
        }
    }
}

fn quasi_generators() -> Vec<(GeneratorRef, Interval)> {
    [
        ("x", 0.2, 3.0),
        ("log(x)", 0.2, 3.0),
        ("exp(x)", 0.2, 3.0),
        ("1/x", 0.2, 3.0),
        ("x^3", 0.2, 3.0),
    ]
    .iter()
    .map(|&(s, lo, hi)| (from_expr(s).unwrap(), Interval::new(lo, hi).unwrap()))
    .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    /// A mean of copies of one point is that point.
    #[test]
    fn mean_reflexivity(
        gi in 0usize..5,
        x in 0.25f64..2.9,
        n in 1usize..5,
        w in 0.1f64..3.0,
    ) {
        let (phi, _) = &quasi_generators()[gi];
        let sample = WeightedSample::new(vec![x; n], vec![w; n]).unwrap();
        let m = quasi_arithmetic_mean(phi.as_ref(), &sample, 1e-12).unwrap();
        prop_assert!((m - x).abs() <= 1e-10 * x.abs().max(1.0), "m = {}", m);
    }

    /// Scaling all weights by a positive factor leaves the mean unchanged,
    /// and so does reversing the sample order.
    #[test]
    fn mean_weight_homogeneity_and_symmetry(
        gi in 0usize..5,
        points in prop::collection::vec(0.25f64..2.9, 2..6),
        scale in 0.1f64..10.0,
    ) {
        let (phi, _) = &quasi_generators()[gi];
        let n = points.len();
        let weights: Vec<f64> = (1..=n).map(|k| k as f64).collect();
        let sample = WeightedSample::new(points.clone(), weights.clone()).unwrap();
        let m = quasi_arithmetic_mean(phi.as_ref(), &sample, 1e-12).unwrap();

        let scaled = WeightedSample::new(
            points.clone(),
            weights.iter().map(|w| w * scale).collect(),
        ).unwrap();
        let ms = quasi_arithmetic_mean(phi.as_ref(), &scaled, 1e-12).unwrap();
        prop_assert!((m - ms).abs() <= 1e-10 * m.abs().max(1.0));

        let reversed = WeightedSample::new(
            points.iter().rev().cloned().collect(),
            weights.iter().rev().cloned().collect(),
        ).unwrap();
        let mr = quasi_arithmetic_mean(phi.as_ref(), &reversed, 1e-12).unwrap();
        prop_assert!((m - mr).abs() <= 1e-10 * m.abs().max(1.0));

        let (lo, hi) = sample.positive_bounds();
        prop_assert!(m >= lo - 1e-10 && m <= hi + 1e-10, "internality: {}", m);
    }

    /// With f ≡ 1 the Bajraktarevic mean collapses to the quasi-arithmetic
    /// mean generated by g.
    #[test]
    fn bajraktarevic_reduces_to_quasi(
        points in prop::collection::vec(1.1f64..2.9, 2..6),
        wseed in 1u32..100,
    ) {
        let one = from_expr("1").unwrap();
        let g = from_expr("log(x)").unwrap();
        let pair = GeneratorPair::new(one, g.clone(), Interval::new(1.0, 3.0).unwrap()).unwrap();
        let weights: Vec<f64> = (0..points.len())
            .map(|k| 0.3 + ((wseed as usize + k) % 7) as f64)
            .collect();
        let sample = WeightedSample::new(points, weights).unwrap();
        let b = bajraktarevic_mean(&pair, &sample, 1e-12).unwrap();
        let a = quasi_arithmetic_mean(g.as_ref(), &sample, 1e-12).unwrap();
        prop_assert!((b - a).abs() <= 1e-10 * a.abs().max(1.0), "b = {}, a = {}", b, a);
    }
}

proptest! {
    /// Kernel jets solve h'' = p·h, and the fundamental identity
    /// (trigonometric or hyperbolic Pythagoras) holds.
    #[test]
    fn kernel_ode_and_identity(p in -10.0f64..10.0, x in -2.0f64..2.0) {
        for jet in [s_jet(p, x), c_jet(p, x)] {
            let scale = jet.value().abs().max(1.0);
            let second = 2.0 * jet.c[2];
            prop_assert!((second - p * jet.value()).abs() <= 1e-10 * scale.max(p.abs()));
            let third = 6.0 * jet.c[3];
            let first = jet.c[1];
            prop_assert!((third - p * first).abs() <= 1e-10 * first.abs().max(1.0).max(p.abs()));
        }
        let s = s_jet(p, x).value();
        let c = c_jet(p, x).value();
        let identity = if p < 0.0 {
            s * s + c * c - 1.0
        } else if p > 0.0 {
            c * c - s * s - 1.0
        } else {
            c - 1.0
        };
        let scale = (c * c).abs().max(1.0);
        prop_assert!(identity.abs() <= 1e-10 * scale, "p = {}, x = {}", p, x);
    }

    /// W¹⁰ of the kernel pair is the constant √|p| (1 at p = 0).
    #[test]
    fn kernel_wronskian_is_constant(p in -10.0f64..10.0, x in -2.0f64..2.0) {
        let s = KernelCombination { p, coef_s: 1.0, coef_c: 0.0 };
        let c = KernelCombination { p, coef_s: 0.0, coef_c: 1.0 };
        let w = wronskian(&s, &c, 1, 0, x).unwrap();
        let expected = if p == 0.0 { 1.0 } else { p.abs().sqrt() };
        prop_assert!((w - expected).abs() <= 1e-10 * expected.max(1.0));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    /// Both Wronskians and the two-point determinant scale by ad − bc under
    /// a change of basis, and swapping the pair flips the sign.
    #[test]
    fn wronskian_covariance(
        coeffs in (
            -3.0f64..3.0, -3.0f64..3.0, -3.0f64..3.0, -3.0f64..3.0,
        ),
        x in -0.6f64..0.6,
        y in -0.6f64..0.6,
        pair_index in 0usize..2,
    ) {
        let (a, b, c, d) = coeffs;
        let det = a * d - b * c;
        prop_assume!(det.abs() > 0.05);
        let (f, g) = if pair_index == 0 {
            (from_expr("cos(x)").unwrap(), from_expr("sin(x)").unwrap())
        } else {
            (from_expr("1").unwrap(), from_expr("x").unwrap())
        };
        let h = Arc::new(LinearCombo::new(
            vec![(a, f.clone()), (b, g.clone())],
            0.0,
        ));
        let k = Arc::new(LinearCombo::new(
            vec![(c, f.clone()), (d, g.clone())],
            0.0,
        ));
        for (i, j) in [(1, 0), (2, 0), (2, 1), (3, 1), (3, 2)] {
            let base = wronskian(f.as_ref(), g.as_ref(), i, j, x).unwrap();
            let image = wronskian(h.as_ref(), k.as_ref(), i, j, x).unwrap();
            prop_assert!(
                (image - det * base).abs() <= 1e-10 * (det * base).abs().max(1.0),
                "W{}{}: {} vs {}", i, j, image, det * base
            );
            let swapped = wronskian(g.as_ref(), f.as_ref(), i, j, x).unwrap();
            prop_assert!((swapped + base).abs() <= 1e-12 * base.abs().max(1.0));
        }
        let base = delta(f.as_ref(), g.as_ref(), x, y).unwrap();
        let image = delta(h.as_ref(), k.as_ref(), x, y).unwrap();
        prop_assert!((image - det * base).abs() <= 1e-10 * (det * base).abs().max(1.0));
    }
}

/// Spot check of the built-in mean diagnostics on a known-good pair.
#[test]
fn mean_property_check_passes_for_trig_pair() {
    let pair = GeneratorPair::new(
        from_expr("cos(x)").unwrap(),
        from_expr("sin(x)").unwrap(),
        Interval::new(-0.7, 0.7).unwrap(),
    )
    .unwrap();
    let sample = WeightedSample::new(vec![0.3, -0.5, 0.62], vec![1.0, 2.0, 0.5]).unwrap();
    assert!(meanlab::means::mean_property_check(&pair, &sample, 1e-12).unwrap());
}
