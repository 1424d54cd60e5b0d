//! Finite-dimensional (spin-like) Weyl pair.
//!
//! A spin `j` system has dimension `d = 2j + 1`. Basis states `|m>` are the
//! eigenstates of `j_3` with `m = -j, ..., j`, stored in ascending order so
//! that the vector index is `m + j`. `F = exp(i 2 pi j_3 / d)` is diagonal
//! in this basis and `E` is diagonal in the phase basis `|m~>`. Together they
//! satisfy the Weyl relation `E^k F^l = exp(-i 2 pi k l / d) F^l E^k`.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::relations::{gram_det, UncertaintyReport};

mod matrix;
pub mod qubit;

pub use matrix::SquareMatrix;
pub use qubit::{pauli_frame, qubit_char, qubit_char_with, qubit_report, BlochVector, PauliFrame, QubitReport};

const NORM_TOL: f64 = 1e-12;

/// `exp(i pi num / den)` with the numerator reduced modulo `2 den` first,
/// so large exponents do not lose precision.
fn unit_phase(num: i64, den: i64) -> Complex64 {
    let r = num.rem_euclid(2 * den);
    Complex64::from_polar(1.0, PI * r as f64 / den as f64)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpinSystem {
    dim: usize,
}

impl SpinSystem {
    pub fn new(dim: usize) -> Result<Self> {
        if dim < 2 {
            return Err(domain(format!("spin dimension must be >= 2, got {dim}")));
        }
        Ok(Self { dim })
    }

    /// System of spin `j`, given as `2j`.
    pub fn from_two_j(two_j: usize) -> Result<Self> {
        Self::new(two_j + 1)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn j(&self) -> f64 {
        (self.dim as f64 - 1.0) / 2.0
    }

    /// `2m` for the basis index `index = m + j`.
    fn two_m(&self, index: usize) -> i64 {
        2 * index as i64 - (self.dim as i64 - 1)
    }

    /// Basis index of the quantum number `m` (integer or half-integer).
    pub fn index_of(&self, m: f64) -> Result<usize> {
        let idx = m + self.j();
        let rounded = idx.round();
        if (idx - rounded).abs() > 1e-9 || rounded < 0.0 || rounded >= self.dim as f64 {
            return Err(domain(format!(
                "m = {m} is not one of -j..j for j = {}",
                self.j()
            )));
        }
        Ok(rounded as usize)
    }

    /// Diagonal of `F^ell`: `exp(i 2 pi m ell / d)`.
    pub fn f_pow_diag(&self, ell: i64) -> Vec<Complex64> {
        let d = self.dim as i64;
        (0..self.dim)
            .map(|i| unit_phase(self.two_m(i) * ell, d))
            .collect()
    }

    /// Sign picked up by `E` when it wraps `|j>` around to `|-j>`.
    fn wrap_sign(&self) -> f64 {
        // (-1)^(2j)
        if self.dim.is_multiple_of(2) {
            -1.0
        } else {
            1.0
        }
    }
}

/// A pure state of a spin-like system.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuditState {
    system: SpinSystem,
    amplitudes: Vec<Complex64>,
}

impl QuditState {
    /// Wraps amplitudes that must already be normalized.
    pub fn new(system: SpinSystem, amplitudes: Vec<Complex64>) -> Result<Self> {
        if amplitudes.len() != system.dim() {
            return Err(domain(format!(
                "expected {} amplitudes, got {}",
                system.dim(),
                amplitudes.len()
            )));
        }
        let norm_sq: f64 = amplitudes.iter().map(|c| c.norm_sqr()).sum();
        if !norm_sq.is_finite() || (norm_sq - 1.0).abs() > NORM_TOL {
            return Err(Error::NotNormalized {
                deviation: (norm_sq - 1.0).abs(),
            });
        }
        Ok(Self { system, amplitudes })
    }

    /// Normalizes the amplitudes first.
    pub fn normalized(system: SpinSystem, mut amplitudes: Vec<Complex64>) -> Result<Self> {
        let norm = amplitudes.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        if !(norm > 0.0) || !norm.is_finite() {
            return Err(domain("cannot normalize a zero or non-finite vector"));
        }
        amplitudes.iter_mut().for_each(|c| *c /= norm);
        Self::new(system, amplitudes)
    }

    /// The `j_3` eigenstate with basis index `index = m + j`.
    pub fn basis(system: SpinSystem, index: usize) -> Result<Self> {
        if index >= system.dim() {
            return Err(domain(format!("basis index {index} out of range")));
        }
        let mut amps = vec![Complex64::new(0.0, 0.0); system.dim()];
        amps[index] = Complex64::new(1.0, 0.0);
        Self::new(system, amps)
    }

    /// Haar-random pure state: independent standard complex Gaussian
    /// amplitudes, normalized.
    pub fn random<R: Rng + ?Sized>(system: SpinSystem, rng: &mut R) -> Self {
        loop {
            let amps: Vec<Complex64> = (0..system.dim())
                .map(|_| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
                .collect();
            if let Ok(s) = Self::normalized(system, amps) {
                return s;
            }
        }
    }

    pub fn system(&self) -> SpinSystem {
        self.system
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }
}

/// Phase state `|m~>` with `m~ = index - j`:
/// `c_m = exp(-i 2 pi m m~ / d) / sqrt(d)`.
pub fn phase_state(system: SpinSystem, index: usize) -> Result<QuditState> {
    if index >= system.dim() {
        return Err(domain(format!(
            "phase-state index {index} out of range for d = {}",
            system.dim()
        )));
    }
    let d = system.dim() as i64;
    let norm = (system.dim() as f64).sqrt().recip();
    let b = system.two_m(index);
    let amps = (0..system.dim())
        .map(|i| unit_phase(-system.two_m(i) * b, 2 * d) * norm)
        .collect();
    QuditState::new(system, amps)
}

/// `E^k psi` using the shift structure of `E` in the `|m>` basis:
/// `E|m> = |m+1>` for `m < j` and `E|j> = (-1)^(2j) |-j>`.
pub fn apply_e_pow(system: SpinSystem, amps: &[Complex64], k: i64) -> Vec<Complex64> {
    let d = system.dim() as i64;
    let sign = system.wrap_sign();
    let mut out = vec![Complex64::new(0.0, 0.0); amps.len()];
    for (i, &c) in amps.iter().enumerate() {
        let target = i as i64 + k;
        let wraps = target.div_euclid(d);
        let idx = target.rem_euclid(d) as usize;
        let s = if wraps.rem_euclid(2) == 1 { sign } else { 1.0 };
        out[idx] = c * s;
    }
    out
}

/// `F^ell psi`.
pub fn apply_f_pow(system: SpinSystem, amps: &[Complex64], ell: i64) -> Vec<Complex64> {
    system
        .f_pow_diag(ell)
        .into_iter()
        .zip(amps)
        .map(|(f, c)| f * c)
        .collect()
}

/// Dense `E^k`, built spectrally from the phase states:
/// `E^k = sum_m~ exp(i 2 pi k m~ / d) |m~><m~|`.
pub fn op_e_pow(system: SpinSystem, k: i64) -> SquareMatrix {
    let n = system.dim();
    let d = n as i64;
    let mut m = SquareMatrix::zeros(n);
    for r in 0..n {
        let ar = system.two_m(r);
        for c in 0..n {
            let ac = system.two_m(c);
            let mut acc = Complex64::new(0.0, 0.0);
            for t in 0..n {
                let b = system.two_m(t);
                // exp(i pi b k / d) * exp(-i pi a_r b / 2d) * exp(i pi a_c b / 2d)
                acc += unit_phase(b * (2 * k - ar + ac), 2 * d);
            }
            m[(r, c)] = acc / n as f64;
        }
    }
    m
}

pub fn op_e(system: SpinSystem) -> SquareMatrix {
    op_e_pow(system, 1)
}

/// Dense `F^ell`.
pub fn op_f_pow(system: SpinSystem, ell: i64) -> SquareMatrix {
    SquareMatrix::diagonal(&system.f_pow_diag(ell))
}

pub fn op_f(system: SpinSystem) -> SquareMatrix {
    op_f_pow(system, 1)
}

fn weyl_defect_from(system: SpinSystem, e_k: &SquareMatrix, k: i64, ell: i64) -> f64 {
    let f = system.f_pow_diag(ell);
    let omega = unit_phase(-2 * k * ell, system.dim() as i64);
    let n = system.dim();
    let mut worst = 0.0f64;
    for r in 0..n {
        for c in 0..n {
            // (E^k F^l - w F^l E^k)_{rc} = E^k_{rc} (f_c - w f_r)
            let x = e_k[(r, c)] * (f[c] - omega * f[r]);
            worst = worst.max(x.norm());
        }
    }
    worst
}

/// Largest entry of `E^k F^ell - exp(-i 2 pi k ell / d) F^ell E^k`, from
/// dense matrices.
pub fn weyl_defect(system: SpinSystem, k: i64, ell: i64) -> f64 {
    let e_k = op_e_pow(system, k);
    weyl_defect_from(system, &e_k, k, ell)
}

/// Maximum Weyl defect over `k` in `ks` and `ell` in `ells`. Each `E^k`
/// is built once.
pub fn weyl_defect_max(
    system: SpinSystem,
    ks: impl IntoIterator<Item = i64>,
    ells: impl IntoIterator<Item = i64> + Clone,
) -> f64 {
    let mut worst = 0.0f64;
    for k in ks {
        let e_k = op_e_pow(system, k);
        for ell in ells.clone() {
            worst = worst.max(weyl_defect_from(system, &e_k, k, ell));
        }
    }
    worst
}

/// `gamma = 2 pi k ell / d` reduced to `(-pi, pi]`.
pub fn gamma_angle(system: SpinSystem, k: i64, ell: i64) -> f64 {
    let d = system.dim() as i64;
    let r = (k * ell).rem_euclid(d);
    let twice = if 2 * r > d { 2 * r - 2 * d } else { 2 * r };
    PI * twice as f64 / d as f64
}

/// Whether `gamma` is exactly `pi` for this configuration.
pub fn gamma_is_pi(system: SpinSystem, k: i64, ell: i64) -> bool {
    let d = system.dim() as i64;
    2 * (k * ell).rem_euclid(d) == d
}

/// Upper bound on `|Phi|^2 + |PhiT|^2` for a Weyl pair with angle gamma:
///
/// `B = 2 sqrt2 (sqrt2 - sqrt(1 - cos g)) / (1 + cos g)`
///
/// Evaluated as `2 / (1 + |sin(g/2)|)`, which is the same function without
/// the removable singularity at `g = pi` or cancellation near `g = 0`.
pub fn bound_b(gamma: f64) -> f64 {
    2.0 / (1.0 + (0.5 * gamma).sin().abs())
}

/// Characteristic functions of a spin state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpinCharSet {
    /// `<F^ell>`
    pub phi: Complex64,
    /// `<E^k>`
    pub phi_tilde: Complex64,
    /// `<F^-ell E^k>`
    pub omega: Complex64,
    pub k: i64,
    pub ell: i64,
}

impl SpinCharSet {
    pub fn theta(&self) -> Complex64 {
        self.omega * self.phi * self.phi_tilde.conj()
    }

    /// Determinant of the Gram matrix of `psi, F^ell psi, E^k psi`.
    pub fn gram_det(&self) -> f64 {
        gram_det(self.phi, self.phi_tilde, self.omega, 1.0)
    }
}

fn inner(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

pub fn char_set_spin(state: &QuditState, k: i64, ell: i64) -> SpinCharSet {
    let sys = state.system();
    let psi = state.amplitudes();
    let f_psi = apply_f_pow(sys, psi, ell);
    let e_psi = apply_e_pow(sys, psi, k);
    SpinCharSet {
        phi: inner(psi, &f_psi),
        phi_tilde: inner(psi, &e_psi),
        omega: inner(&f_psi, &e_psi),
        k,
        ell,
    }
}

/// Gram determinants for `(k, ell)` and `(-k, -ell)`.
pub fn gram_dets_spin(state: &QuditState, k: i64, ell: i64) -> (f64, f64) {
    (
        char_set_spin(state, k, ell).gram_det(),
        char_set_spin(state, -k, -ell).gram_det(),
    )
}

/// Evaluates the sum and product relations. `U'` is only reported at
/// `gamma = pi`, the only angle where the triple relation holds.
pub fn spin_report(state: &QuditState, k: i64, ell: i64) -> UncertaintyReport {
    let sys = state.system();
    let cs = char_set_spin(state, k, ell);
    let bound = bound_b(gamma_angle(sys, k, ell));
    let p2 = cs.phi.norm_sqr();
    let t2 = cs.phi_tilde.norm_sqr();
    let u = p2 + t2;
    let v = (p2 * t2).sqrt();
    let u_prime = gamma_is_pi(sys, k, ell).then(|| u + cs.omega.norm_sqr());
    let (det_plus, det_minus) = (cs.gram_det(), char_set_spin(state, -k, -ell).gram_det());
    let report = UncertaintyReport {
        u,
        u_prime,
        u_double_prime: None,
        v,
        det_plus,
        det_minus,
        bound,
        applicable: true,
        slack: Some(UncertaintyReport::slack_for(bound, u, u_prime, None, v)),
    };
    debug_assert!(report.is_valid(), "{:?}", report.violations());
    report
}

/// `<psi| E^-k F^-ell E^k F^ell |psi>`, which the Weyl relation fixes to
/// `exp(-i 2 pi k ell / d)` for every state.
pub fn cyclic_excursion(state: &QuditState, k: i64, ell: i64) -> Complex64 {
    let sys = state.system();
    let psi = state.amplitudes();
    let mut v = apply_f_pow(sys, psi, ell);
    v = apply_e_pow(sys, &v, k);
    v = apply_f_pow(sys, &v, -ell);
    v = apply_e_pow(sys, &v, -k);
    inner(psi, &v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn sys(d: usize) -> SpinSystem {
        SpinSystem::new(d).unwrap()
    }

    fn expect(m: &SquareMatrix, psi: &[Complex64]) -> Complex64 {
        inner(psi, &m.apply(psi))
    }

    #[test]
    fn rejects_small_dimension() {
        assert!(SpinSystem::new(1).is_err());
        assert_eq!(SpinSystem::from_two_j(1).unwrap().dim(), 2);
        assert_eq!(sys(4).index_of(-1.5).unwrap(), 0);
        assert!(sys(4).index_of(-1.0).is_err());
    }

    #[test]
    fn phase_state_examples() {
        let s2 = phase_state(sys(2), 1).unwrap();
        for c in s2.amplitudes() {
            assert!((c.norm() - 0.5f64.sqrt()).abs() < 1e-15);
        }
        let s3 = phase_state(sys(3), 1).unwrap();
        for c in s3.amplitudes() {
            assert!((c - Complex64::new(3f64.sqrt().recip(), 0.0)).norm() < 1e-15);
        }
        // d = 5, m~ = 2 is index 4; E eigenvalue exp(i 2 pi 2 / 5).
        let s5 = phase_state(sys(5), 4).unwrap();
        let e = op_e(sys(5));
        let lhs = e.apply(s5.amplitudes());
        let ev = Complex64::from_polar(1.0, 2.0 * PI * 2.0 / 5.0);
        for (x, y) in lhs.iter().zip(s5.amplitudes()) {
            assert!((x - ev * y).norm() < 1e-12);
        }
        assert!(phase_state(sys(5), 5).is_err());
    }

    #[test]
    fn operators_are_unitary_and_periodic() {
        for d in [2usize, 3, 4, 7] {
            let s = sys(d);
            let e = op_e(s);
            let f = op_f(s);
            let id = SquareMatrix::identity(d);
            assert!(e.mul(&e.adjoint()).max_abs_diff(&id) < 1e-12);
            assert!(f.mul(&f.adjoint()).max_abs_diff(&id) < 1e-12);
        }
        let s = sys(4);
        let e = op_e(s);
        let f = op_f(s);
        let e4 = e.mul(&e).mul(&e).mul(&e);
        let f4 = f.mul(&f).mul(&f).mul(&f);
        // E^4 = F^4 = (-1)^(2j) I for half-integer j... with d = 4, j = 3/2,
        // exp(i 2 pi * 4 m / 4) = exp(i 2 pi m) = -1.
        let minus_id = SquareMatrix::identity(4).scale(Complex64::new(-1.0, 0.0));
        assert!(e4.max_abs_diff(&minus_id) < 1e-12);
        assert!(f4.max_abs_diff(&minus_id) < 1e-12);
        // Spectral powers agree with repeated products.
        assert!(op_e_pow(s, 4).max_abs_diff(&e4) < 1e-12);
        assert!(op_e_pow(s, -1).max_abs_diff(&e.adjoint()) < 1e-12);
        let s5 = sys(5);
        let e5 = op_e(s5);
        let mut p = SquareMatrix::identity(5);
        for _ in 0..5 {
            p = p.mul(&e5);
        }
        assert!(p.max_abs_diff(&SquareMatrix::identity(5)) < 1e-12);
    }

    #[test]
    fn shift_action_matches_dense_operator() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for d in [2usize, 3, 4, 6, 9] {
            let s = sys(d);
            let psi = QuditState::random(s, &mut rng);
            for k in -2 * d as i64..=2 * d as i64 {
                let fast = apply_e_pow(s, psi.amplitudes(), k);
                let dense = op_e_pow(s, k).apply(psi.amplitudes());
                for (a, b) in fast.iter().zip(&dense) {
                    assert!((a - b).norm() < 1e-12, "d {d} k {k}");
                }
            }
        }
    }

    #[test]
    fn weyl_defect_examples() {
        assert!(weyl_defect(sys(2), 1, 1) < 1e-15);
        assert!(weyl_defect(sys(5), 2, 3) < 1e-12);
        assert!(weyl_defect(sys(3), 3, 1) < 1e-12);
        assert!(weyl_defect(sys(6), -4, 7) < 1e-12);
    }

    #[test]
    fn gamma_examples() {
        assert_eq!(gamma_angle(sys(2), 1, 1), PI);
        assert!((gamma_angle(sys(4), 1, 1) - PI / 2.0).abs() < 1e-15);
        assert_eq!(gamma_angle(sys(3), 3, 2), 0.0);
        assert!((gamma_angle(sys(3), 1, 2) + 2.0 * PI / 3.0).abs() < 1e-15);
        assert!(gamma_is_pi(sys(2), 1, 1));
        assert!(gamma_is_pi(sys(6), 3, 1));
        assert!(!gamma_is_pi(sys(6), 2, 1));
    }

    #[test]
    fn bound_examples() {
        assert_eq!(bound_b(PI), 1.0);
        assert!((bound_b(0.0) - 2.0).abs() < 1e-15);
        // Near zero B ~ 4 / (2 + gamma).
        assert!((bound_b(1e-6) - 4.0 / (2.0 + 1e-6)).abs() < 1e-12);
        assert!((bound_b(PI / 2.0) - (4.0 - 2.0 * 2f64.sqrt())).abs() < 1e-15);
        // Literal quotient where it is well conditioned.
        for i in 1..100 {
            let g = PI * f64::from(i) / 120.0;
            let c = g.cos();
            let lit = 2.0 * 2f64.sqrt() * (2f64.sqrt() - (1.0 - c).sqrt()) / (1.0 + c);
            assert!((bound_b(g) - lit).abs() < 1e-12, "gamma {g}");
            assert_eq!(bound_b(g), bound_b(-g));
        }
    }

    #[test]
    fn char_set_examples() {
        let s = sys(5);
        for idx in 0..5 {
            let st = QuditState::basis(s, idx).unwrap();
            let cs = char_set_spin(&st, 2, 3);
            let m = idx as f64 - 2.0;
            let expected = Complex64::from_polar(1.0, 2.0 * PI * m * 3.0 / 5.0);
            assert!((cs.phi - expected).norm() < 1e-12);
            assert!(cs.phi_tilde.norm() < 1e-15);
            let ph = phase_state(s, idx).unwrap();
            let cs = char_set_spin(&ph, 1, 2);
            assert!((cs.phi_tilde.norm() - 1.0).abs() < 1e-12);
            assert!(cs.phi.norm() < 1e-12);
        }
    }

    #[test]
    fn char_set_matches_dense_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for d in [2usize, 3, 5, 8] {
            let s = sys(d);
            for _ in 0..10 {
                let psi = QuditState::random(s, &mut rng);
                for k in -3..=3i64 {
                    for ell in -3..=3i64 {
                        let cs = char_set_spin(&psi, k, ell);
                        let ek = op_e_pow(s, k);
                        let fl = op_f_pow(s, ell);
                        let a = psi.amplitudes();
                        assert!((cs.phi - expect(&fl, a)).norm() < 1e-12);
                        assert!((cs.phi_tilde - expect(&ek, a)).norm() < 1e-12);
                        let om = expect(&fl.adjoint().mul(&ek), a);
                        assert!((cs.omega - om).norm() < 1e-12);
                    }
                }
            }
        }
    }

    #[test]
    fn gram_det_examples() {
        let s = sys(3);
        for idx in 0..3 {
            let st = QuditState::basis(s, idx).unwrap();
            let (p, m) = gram_dets_spin(&st, 1, 1);
            assert!(p.abs() < 1e-12 && m.abs() < 1e-12);
        }
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let psi = QuditState::random(sys(4), &mut rng);
        let (p, m) = gram_dets_spin(&psi, 4, 4);
        assert!(p.abs() < 1e-12 && m.abs() < 1e-12);
    }

    #[test]
    fn report_bounds_hold_for_random_states() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let s = sys(5);
        for _ in 0..50 {
            let psi = QuditState::random(s, &mut rng);
            for k in 1..=5 {
                for ell in 1..=5 {
                    let r = spin_report(&psi, k, ell);
                    assert!(r.u <= bound_b(gamma_angle(s, k, ell)) + 1e-9);
                    assert!(r.is_valid());
                    assert!(r.u_prime.is_none());
                }
            }
        }
    }

    #[test]
    fn cyclic_excursion_phase() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for d in [2usize, 3, 6] {
            let s = sys(d);
            let psi = QuditState::random(s, &mut rng);
            for k in 1..=d as i64 {
                for ell in 1..=d as i64 {
                    let expected = Complex64::from_polar(1.0, -2.0 * PI * (k * ell) as f64 / d as f64);
                    assert!((cyclic_excursion(&psi, k, ell) - expected).norm() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn non_normalized_rejected() {
        let s = sys(2);
        let err = QuditState::new(s, vec![Complex64::new(1.0, 0.0); 2]).unwrap_err();
        assert!(matches!(err, Error::NotNormalized { .. }));
    }
}
