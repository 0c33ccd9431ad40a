//! Numeric configuration and the tolerance constants shared across the crate.
//!
//! Every comparison made by the metrics or the invariant checks goes through
//! a constant defined here; nothing asserts against an ad-hoc magic number.

use serde::{Deserialize, Serialize};

/// Convexity slack for sampled midpoint tests. Grid interpolants are
/// multilinear per cell, which violates convexity by O(h^2) on convex data.
pub const EPS_CONVEXITY: f64 = 1e-7;

/// Tolerance for minimizer values returned by `global_min`.
pub const EPS_OPT: f64 = 1e-8;

/// Weight inversion tolerance. Inverses feed the isometry maps where the
/// error compounds, so this is fixed and not configurable.
pub const EPS_INV: f64 = 1e-10;

/// Volume threshold (relative to the reference scale) below which a sublevel
/// set counts as degenerate, i.e. `dim dom u < n`.
pub const EPS_VOL: f64 = 1e-9;

/// Absolute floor added to summed error budgets in triangle-inequality
/// tests, so the axiom is assertable even when all budgets are zero.
pub const EPS_TRIANGLE_FLOOR: f64 = 1e-9;

/// Relative tail target: the truncation radius is grown until the analytic
/// tail bound drops below this fraction of the current value estimate.
pub const EPS_TAIL_REL: f64 = 1e-8;

/// Default absolute fallback for the tail target when the value estimate is
/// itself tiny.
pub const EPS_TAIL_ABS: f64 = 1e-12;

/// Safety factor applied to quadrature error estimates before they are
/// reported as budgets.
pub const QUAD_SAFETY: f64 = 8.0;

/// Numeric settings for quadrature, direction sampling and the fixed-point
/// solves. All metric evaluations are deterministic for a fixed config and
/// seed, regardless of thread count.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct NumericConfig {
    /// Target tolerance for 1-d adaptive quadrature.
    pub quad_tol: f64,
    /// Maximum recursion depth for 1-d adaptive quadrature.
    pub quad_max_depth: u32,
    /// Base resolution per axis for 2-d tensor quadrature.
    pub grid_2d: usize,
    /// Number of step-doubling refinements for 2-d quadrature.
    pub refine_2d: u32,
    /// Number of sampled directions on the circle (2-d geometry fallbacks).
    pub directions: usize,
    /// Node count per axis for dual grids in discrete conjugation.
    pub dual_grid: usize,
    /// Bisection tolerance for the conjugate-metric fixed point.
    pub fixed_point_tol: f64,
    /// Truncation parameter for the Rockafellar-Wets integral over rho.
    pub rho_max: f64,
    /// Monte Carlo sample budget (n >= 3 fallbacks).
    pub mc_samples: usize,
    /// Relative tail target for truncation radii (defaults to
    /// `EPS_TAIL_REL`).
    pub eps_tail_rel: f64,
    /// Seed for every randomized fallback.
    pub seed: u64,
}

impl Default for NumericConfig {
    fn default() -> Self {
        Self {
            quad_tol: 1e-11,
            quad_max_depth: 48,
            grid_2d: 192,
            refine_2d: 2,
            directions: 720,
            dual_grid: 2048,
            fixed_point_tol: 1e-9,
            rho_max: 30.0,
            mc_samples: 200_000,
            eps_tail_rel: EPS_TAIL_REL,
            seed: 0,
        }
    }
}

impl NumericConfig {
    /// Cheap profile for property tests that sweep many random inputs.
    pub fn fast() -> Self {
        Self {
            quad_tol: 1e-9,
            grid_2d: 96,
            refine_2d: 1,
            mc_samples: 20_000,
            ..Self::default()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    #[allow(clippy::assertions_on_constants)]
    fn tolerance_ordering() {
        assert!(EPS_TAIL_ABS < EPS_INV);
        assert!(EPS_INV < EPS_OPT);
        assert!(EPS_OPT < EPS_CONVEXITY);
        assert!(QUAD_SAFETY >= 1.0);
    }

    #[test]
    fn default_config_is_sane() {
        let c = NumericConfig::default();
        assert!(c.quad_tol > 0.0 && c.grid_2d >= 16 && c.directions >= 8);
    }
}
