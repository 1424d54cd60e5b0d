//! The certainty functionals and the report type shared by the spin and
//! single-mode treatments.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// Tolerance used when asserting the certainty bounds.
pub const BOUND_TOL: f64 = 1e-9;
/// Tolerance used when asserting Gram-determinant positivity.
pub const DET_TOL: f64 = 1e-10;

/// Determinant of the Gram matrix
///
/// ```text
/// | 1      a      b |
/// | a*     1      c |
/// | b*     c*     last |
/// ```
///
/// written out as `last (1 - |a|^2) - |b|^2 - |c|^2 + 2 Re(a c b*)`.
pub fn gram_det(a: Complex64, b: Complex64, c: Complex64, last: f64) -> f64 {
    last * (1.0 - a.norm_sqr()) - b.norm_sqr() - c.norm_sqr() + 2.0 * (a * c * b.conj()).re
}

/// Distances of each functional to its bound (positive means satisfied).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Slack {
    pub u: f64,
    pub u_prime: Option<f64>,
    pub u_double_prime: Option<f64>,
    pub v: f64,
}

/// Values of the certainty functionals for one state and one `(k, phi)`
/// or `(k, ell)` configuration.
///
/// `U = |Phi|^2 + |PhiT|^2`, `U' = U + |Omega|^2`,
/// `U'' = U' + Pi_k (1 - |Phi|^2) / 2`, `V = |Phi| |PhiT|`.
/// The sums are bounded by `bound` and the product by `bound / 2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UncertaintyReport {
    pub u: f64,
    /// Absent for spin systems away from `gamma = pi`.
    pub u_prime: Option<f64>,
    /// Only defined for the single mode.
    pub u_double_prime: Option<f64>,
    pub v: f64,
    pub det_plus: f64,
    pub det_minus: f64,
    pub bound: f64,
    /// Whether the bounds were derived for this configuration.
    pub applicable: bool,
    /// Present exactly when `applicable`.
    pub slack: Option<Slack>,
}

impl UncertaintyReport {
    pub(crate) fn slack_for(
        bound: f64,
        u: f64,
        u_prime: Option<f64>,
        u_double_prime: Option<f64>,
        v: f64,
    ) -> Slack {
        Slack {
            u: bound - u,
            u_prime: u_prime.map(|x| bound - x),
            u_double_prime: u_double_prime.map(|x| bound - x),
            v: bound / 2.0 - v,
        }
    }

    /// Human-readable descriptions of every violated invariant: negative
    /// Gram determinants always, bound violations when applicable.
    pub fn violations(&self) -> Vec<String> {
        let mut out = Vec::new();
        if self.det_plus < -DET_TOL {
            out.push(format!("det G+ = {:e} < -{DET_TOL:e}", self.det_plus));
        }
        if self.det_minus < -DET_TOL {
            out.push(format!("det G- = {:e} < -{DET_TOL:e}", self.det_minus));
        }
        if let Some(slack) = &self.slack {
            let mut check = |name: &str, s: Option<f64>| {
                if let Some(s) = s {
                    if s < -BOUND_TOL {
                        out.push(format!("{name} exceeds its bound by {:e}", -s));
                    }
                }
            };
            check("U", Some(slack.u));
            check("U'", slack.u_prime);
            check("U''", slack.u_double_prime);
            check("V", Some(slack.v));
        }
        out
    }

    pub fn is_valid(&self) -> bool {
        self.violations().is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gram_det_matches_cofactor_expansion() {
        let a = Complex64::new(0.3, -0.2);
        let b = Complex64::new(-0.1, 0.4);
        let c = Complex64::new(0.25, 0.05);
        let g = crate::numerics::Hermitian3::new([1.0, 1.0, 0.7], a, b, c);
        assert!((gram_det(a, b, c, 0.7) - g.det()).abs() < 1e-15);
    }

    #[test]
    fn violations_respect_applicability() {
        let mut r = UncertaintyReport {
            u: 1.2,
            u_prime: Some(1.2),
            u_double_prime: Some(1.2),
            v: 0.1,
            det_plus: 0.0,
            det_minus: 0.0,
            bound: 1.0,
            applicable: false,
            slack: None,
        };
        assert!(r.is_valid());
        r.applicable = true;
        r.slack = Some(UncertaintyReport::slack_for(1.0, 1.2, Some(1.2), Some(1.2), 0.1));
        assert_eq!(r.violations().len(), 3);
        r.det_minus = -1e-9;
        assert_eq!(r.violations().len(), 4);
    }
}
