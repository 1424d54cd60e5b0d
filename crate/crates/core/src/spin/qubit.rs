//! The `j = 1/2` case, written in Bloch-vector form with `F = sigma_z` and
//! `E = sigma_x`. Mixed states are allowed here.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{bound_b, QuditState, SpinCharSet, SpinSystem, SquareMatrix};
use crate::error::{domain, Result};

/// Note attached to every qubit report.
pub const OMEGA_NOTE: &str = "omega is tr(rho sigma_z sigma_x) = i s_y from the general \
definition <F^-l E^k>; the published qubit formula quotes omega = i s_x s_y s_z and the \
corresponding triple relation s_x^2 + s_z^2 + s_x^2 s_y^2 s_z^2 <= 1, reported here as \
'stated_*' for comparison only and not asserted";

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BlochVector {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl BlochVector {
    pub fn new(x: f64, y: f64, z: f64) -> Result<Self> {
        let s = Self { x, y, z };
        if !(x.is_finite() && y.is_finite() && z.is_finite()) || s.norm() > 1.0 + 1e-12 {
            return Err(domain(format!(
                "Bloch vector ({x}, {y}, {z}) has length {} > 1",
                s.norm()
            )));
        }
        Ok(s)
    }

    pub fn norm(&self) -> f64 {
        (self.x * self.x + self.y * self.y + self.z * self.z).sqrt()
    }

    /// Density matrix `(1 + s.sigma) / 2` in the Pauli basis.
    pub fn density_matrix(&self) -> SquareMatrix {
        let c = Complex64::new;
        SquareMatrix::from_rows(&[
            vec![c(0.5 * (1.0 + self.z), 0.0), c(0.5 * self.x, -0.5 * self.y)],
            vec![c(0.5 * self.x, 0.5 * self.y), c(0.5 * (1.0 - self.z), 0.0)],
        ])
    }

    /// The pure state with this Bloch vector, expressed in the native
    /// `|m>` basis of [`SpinSystem`] (`d = 2`). Requires `|s| = 1`.
    pub fn pure_state(&self) -> Result<QuditState> {
        if (self.norm() - 1.0).abs() > 1e-9 {
            return Err(domain(format!(
                "pure qubit state needs |s| = 1, got {}",
                self.norm()
            )));
        }
        let theta = self.z.clamp(-1.0, 1.0).acos();
        let azimuth = self.y.atan2(self.x);
        let pauli = [
            Complex64::new((theta / 2.0).cos(), 0.0),
            Complex64::from_polar((theta / 2.0).sin(), azimuth),
        ];
        let frame = pauli_frame();
        QuditState::normalized(SpinSystem::new(2)?, frame.basis.apply(&pauli))
    }
}

/// Relates the native `d = 2` operators to Pauli matrices:
/// `F = f_factor U sigma_z U^dag` and `E = e_factor U sigma_x U^dag`.
#[derive(Debug, Clone, PartialEq)]
pub struct PauliFrame {
    pub basis: SquareMatrix,
    pub f_factor: Complex64,
    pub e_factor: Complex64,
}

impl PauliFrame {
    /// `conj(factor) U^dag op U`.
    pub fn to_pauli(&self, op: &SquareMatrix, factor: Complex64) -> SquareMatrix {
        self.basis
            .adjoint()
            .mul(op)
            .mul(&self.basis)
            .scale(factor.conj())
    }
}

pub fn pauli_frame() -> PauliFrame {
    let c = Complex64::new;
    PauliFrame {
        basis: SquareMatrix::diagonal(&[c(1.0, 0.0), c(0.0, 1.0)]),
        f_factor: c(0.0, -1.0),
        e_factor: c(0.0, -1.0),
    }
}

pub fn sigma_x() -> SquareMatrix {
    let c = Complex64::new;
    SquareMatrix::from_rows(&[vec![c(0.0, 0.0), c(1.0, 0.0)], vec![c(1.0, 0.0), c(0.0, 0.0)]])
}

pub fn sigma_y() -> SquareMatrix {
    let c = Complex64::new;
    SquareMatrix::from_rows(&[vec![c(0.0, 0.0), c(0.0, -1.0)], vec![c(0.0, 1.0), c(0.0, 0.0)]])
}

pub fn sigma_z() -> SquareMatrix {
    let c = Complex64::new;
    SquareMatrix::from_rows(&[vec![c(1.0, 0.0), c(0.0, 0.0)], vec![c(0.0, 0.0), c(-1.0, 0.0)]])
}

/// Characteristic functions for `k = ell = 1`: `(s_z, s_x, i s_y)`.
pub fn qubit_char(s: &BlochVector) -> Result<SpinCharSet> {
    qubit_char_with(s, 1, 1)
}

/// Characteristic functions `<sigma_z^ell>`, `<sigma_x^k>` and
/// `<sigma_z^ell sigma_x^k>`; only the parities of `k` and `ell` matter.
pub fn qubit_char_with(s: &BlochVector, k: i64, ell: i64) -> Result<SpinCharSet> {
    let s = BlochVector::new(s.x, s.y, s.z)?;
    let one = Complex64::new(1.0, 0.0);
    let (k_odd, l_odd) = (k.rem_euclid(2) == 1, ell.rem_euclid(2) == 1);
    let phi = if l_odd { Complex64::new(s.z, 0.0) } else { one };
    let phi_tilde = if k_odd { Complex64::new(s.x, 0.0) } else { one };
    let omega = match (l_odd, k_odd) {
        (true, true) => Complex64::new(0.0, s.y),
        (true, false) => Complex64::new(s.z, 0.0),
        (false, true) => Complex64::new(s.x, 0.0),
        (false, false) => one,
    };
    Ok(SpinCharSet {
        phi,
        phi_tilde,
        omega,
        k,
        ell,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QubitReport {
    pub bloch: BlochVector,
    pub chars: SpinCharSet,
    pub gamma: f64,
    pub bound: f64,
    pub u: f64,
    /// `U + |Omega|^2`, only at `gamma = pi`.
    pub u_prime: Option<f64>,
    pub v: f64,
    pub stated_omega: Complex64,
    pub stated_triple: f64,
    pub notes: Vec<String>,
}

pub fn qubit_report(s: &BlochVector, k: i64, ell: i64) -> Result<QubitReport> {
    let chars = qubit_char_with(s, k, ell)?;
    let gamma_pi = (k * ell).rem_euclid(2) == 1;
    let gamma = if gamma_pi { PI } else { 0.0 };
    let p2 = chars.phi.norm_sqr();
    let t2 = chars.phi_tilde.norm_sqr();
    let u = p2 + t2;
    Ok(QubitReport {
        bloch: *s,
        chars,
        gamma,
        bound: bound_b(gamma),
        u,
        u_prime: gamma_pi.then(|| u + chars.omega.norm_sqr()),
        v: (p2 * t2).sqrt(),
        stated_omega: Complex64::new(0.0, s.x * s.y * s.z),
        stated_triple: s.x * s.x + s.z * s.z + (s.x * s.y * s.z).powi(2),
        notes: vec![OMEGA_NOTE.to_string()],
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spin::{char_set_spin, op_e, op_f, spin_report};

    fn trace_oracle(s: &BlochVector, op: &SquareMatrix) -> Complex64 {
        let prod = s.density_matrix().mul(op);
        prod[(0, 0)] + prod[(1, 1)]
    }

    #[test]
    fn frame_reproduces_pauli_matrices() {
        let sys = SpinSystem::new(2).unwrap();
        let frame = pauli_frame();
        let f = frame.to_pauli(&op_f(sys), frame.f_factor);
        let e = frame.to_pauli(&op_e(sys), frame.e_factor);
        assert!(f.max_abs_diff(&sigma_z()) < 1e-15);
        assert!(e.max_abs_diff(&sigma_x()) < 1e-15);
    }

    #[test]
    fn examples() {
        let z = qubit_char(&BlochVector::new(0.0, 0.0, 1.0).unwrap()).unwrap();
        assert_eq!((z.phi, z.phi_tilde, z.omega.norm()), (1.0.into(), 0.0.into(), 0.0));
        let x = qubit_char(&BlochVector::new(1.0, 0.0, 0.0).unwrap()).unwrap();
        assert_eq!((x.phi, x.phi_tilde, x.omega.norm()), (0.0.into(), 1.0.into(), 0.0));
        let y = qubit_char(&BlochVector::new(0.0, 1.0, 0.0).unwrap()).unwrap();
        assert_eq!(y.omega, Complex64::new(0.0, 1.0));
        let oracle = trace_oracle(&BlochVector::new(0.0, 1.0, 0.0).unwrap(), &sigma_z().mul(&sigma_x()));
        assert!((oracle - Complex64::new(0.0, 1.0)).norm() < 1e-15);
        assert!(BlochVector::new(1.0, 0.1, 0.0).is_err());
    }

    #[test]
    fn higher_powers_match_trace_oracle() {
        let s = BlochVector::new(0.3, -0.4, 0.5).unwrap();
        for k in -3..=3i64 {
            for ell in -3..=3i64 {
                let cs = qubit_char_with(&s, k, ell).unwrap();
                let pow = |m: SquareMatrix, n: i64| {
                    let mut acc = SquareMatrix::identity(2);
                    for _ in 0..n.unsigned_abs() {
                        acc = acc.mul(&m);
                    }
                    acc
                };
                let zl = pow(sigma_z(), ell);
                let xk = pow(sigma_x(), k);
                assert!((cs.phi - trace_oracle(&s, &zl)).norm() < 1e-15);
                assert!((cs.phi_tilde - trace_oracle(&s, &xk)).norm() < 1e-15);
                assert!((cs.omega - trace_oracle(&s, &zl.adjoint().mul(&xk))).norm() < 1e-15);
            }
        }
    }

    #[test]
    fn native_state_matches_bloch_form() {
        let s = BlochVector::new(0.48, -0.6, 0.64).unwrap();
        let psi = s.pure_state().unwrap();
        let native = char_set_spin(&psi, 1, 1);
        let frame = pauli_frame();
        let cs = qubit_char(&s).unwrap();
        assert!((native.phi - frame.f_factor * cs.phi).norm() < 1e-12);
        assert!((native.phi_tilde - frame.e_factor * cs.phi_tilde).norm() < 1e-12);
        assert!((native.omega - cs.omega).norm() < 1e-12);
    }

    #[test]
    fn saturating_states() {
        let h = 0.5f64.sqrt();
        let r = spin_report(&BlochVector::new(h, 0.0, h).unwrap().pure_state().unwrap(), 1, 1);
        assert!((r.u - 1.0).abs() < 1e-12);
        assert!((r.v - 0.5).abs() < 1e-12);
        let r = spin_report(&BlochVector::new(0.0, 0.0, 1.0).unwrap().pure_state().unwrap(), 1, 1);
        assert!((r.u - 1.0).abs() < 1e-12);
        assert!(r.v.abs() < 1e-12);
    }

    #[test]
    fn report_surfaces_stated_values() {
        let s = BlochVector::new(0.5, 0.5, 0.5).unwrap();
        let r = qubit_report(&s, 1, 1).unwrap();
        assert_eq!(r.bound, 1.0);
        assert!((r.u - 0.5).abs() < 1e-15);
        assert!((r.u_prime.unwrap() - 0.75).abs() < 1e-15);
        assert!((r.stated_omega.im - 0.125).abs() < 1e-15);
        assert!((r.stated_triple - (0.5 + 0.125f64.powi(2))).abs() < 1e-15);
        assert_eq!(r.notes.len(), 1);
        assert!(qubit_report(&s, 2, 1).unwrap().u_prime.is_none());
    }
}
