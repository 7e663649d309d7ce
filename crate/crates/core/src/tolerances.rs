//! Central tolerance ladder.
//!
//! Every acceptance threshold used by the checkers lives here so that a single
//! scale factor (CLI: `MEANLAB_TOLERANCE_SCALE`) can widen or tighten all of
//! them coherently.

/// Tolerance settings for all numerical acceptance decisions.
///
/// Identity-style checks (residuals of algebraic identities evaluated with
/// exact jets) use `identity`; quantities that consume one derivative order
/// beyond what the identity needs use the looser `derivative`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    /// Normalized residual bound for the fundamental functional equation.
    pub fe_residual: f64,
    /// Scale-relative bound for algebraic identity checks.
    pub identity: f64,
    /// Bound for checks involving numerically differentiated quantities.
    pub derivative: f64,
    /// Validation-grid residual bound for least-squares fits
    /// (equivalence, affine, quadratic-form and linear-form detectors).
    pub fit: f64,
    /// Absolute gap bound for mean-equality comparisons.
    pub mean_equality: f64,
    /// Relative tolerance of monotone inversion on the generator scale.
    pub root: f64,
    /// Absolute tolerance of adaptive quadrature.
    pub quadrature: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            fe_residual: 1e-8,
            identity: 1e-8,
            derivative: 1e-6,
            fit: 1e-8,
            mean_equality: 1e-8,
            root: 1e-12,
            quadrature: 1e-11,
        }
    }
}

impl Tolerances {
    /// Multiply every tolerance by `factor` (used by the CLI scale override).
    pub fn scaled(&self, factor: f64) -> Self {
        Tolerances {
            fe_residual: self.fe_residual * factor,
            identity: self.identity * factor,
            derivative: self.derivative * factor,
            fit: self.fit * factor,
            mean_equality: self.mean_equality * factor,
            root: self.root * factor,
            quadrature: self.quadrature * factor,
        }
    }
}

/// Default number of grid points for dense validation sweeps: a power of two
/// plus one, so the midpoint is always a node.
pub const GRID_POINTS: usize = 257;

/// Default number of Chebyshev nodes used when fitting coefficients.
pub const FIT_NODES: usize = 16;

/// Number of nodes in tabulated antiderivatives, midpoint included.
pub const TABLE_POINTS: usize = 1025;

/// Relative guard under which `W10` counts as vanishing; fixed rather than
/// part of [`Tolerances`] because it separates class violations from
/// cancellation noise and should not widen with the scale override.
pub const WRONSKIAN_GUARD: f64 = 1e-13;
