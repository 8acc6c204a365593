//! Numerical kernels shared by the rest of the crate: special functions,
//! Gauss-Legendre quadrature, a small dense complex matrix and its
//! exponential, and the moment-problem weight functions.

pub mod expm;
pub mod matrix;
pub mod quadrature;
pub mod special;
pub mod weights;

use serde::{Deserialize, Serialize};

use crate::C64;

/// `e^{i a b}` with the rounding error of the product `a b` folded back in,
/// so phases such as `α e_n` stay accurate when `α e_n` is large.
pub fn cis_product(a: f64, b: f64) -> C64 {
    let p = a * b;
    let err = a.mul_add(b, -p);
    C64::from_polar(1.0, p) * C64::from_polar(1.0, err)
}

/// Tolerances for the numerical kernels.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NumericsConfig {
    /// Relative tail below which a power series is considered summed.
    pub series_tail: f64,
    /// Relative target for adaptive quadrature.
    pub quadrature_target: f64,
    /// Maximum bisection depth of adaptive quadrature.
    pub max_refinement_depth: usize,
}

impl Default for NumericsConfig {
    fn default() -> Self {
        Self { series_tail: 1e-14, quadrature_target: 1e-10, max_refinement_depth: 12 }
    }
}
