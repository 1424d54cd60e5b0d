//! Single-mode field in a truncated Fock basis.
//!
//! The exponential of the phase is the one-sided shift
//! `E = sum_n |n><n+1|` (Susskind-Glogower). It is only an isometry from one
//! side: `E^k E^dag^k = I` while `E^dag^k E^k = I - Pi_k`, with `Pi_k` the
//! projector onto fewer than `k` photons. All operators act by index shifts;
//! no dense matrices are formed here.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::relations::{gram_det, UncertaintyReport};

const NORM_TOL: f64 = 1e-12;
/// Modular distance below which `k phi` counts as `pi`.
pub const APPLICABILITY_TOL: f64 = 1e-9;

/// A normalized pure state with support on `0..=n_max`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FockState {
    amplitudes: Vec<Complex64>,
    /// Upper bound on the probability mass of the underlying state that lies
    /// above `n_max`. Zero for states that are exactly finite.
    tail_bound: f64,
}

impl FockState {
    pub fn new(amplitudes: Vec<Complex64>) -> Result<Self> {
        Self::with_tail_bound(amplitudes, 0.0)
    }

    pub fn with_tail_bound(amplitudes: Vec<Complex64>, tail_bound: f64) -> Result<Self> {
        if amplitudes.is_empty() {
            return Err(domain("a Fock state needs at least one amplitude"));
        }
        let norm_sq: f64 = amplitudes.iter().map(|c| c.norm_sqr()).sum();
        if !norm_sq.is_finite() || (norm_sq - 1.0).abs() > NORM_TOL {
            return Err(Error::NotNormalized {
                deviation: (norm_sq - 1.0).abs(),
            });
        }
        Ok(Self {
            amplitudes,
            tail_bound,
        })
    }

    /// Normalizes `amplitudes` and records `tail_bound`.
    pub fn normalized(mut amplitudes: Vec<Complex64>, tail_bound: f64) -> Result<Self> {
        let norm = amplitudes.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        if !(norm > 0.0) || !norm.is_finite() {
            return Err(domain("cannot normalize a zero or non-finite vector"));
        }
        amplitudes.iter_mut().for_each(|c| *c /= norm);
        Self::with_tail_bound(amplitudes, tail_bound)
    }

    /// Number state `|n>`, truncated at `n_max = n`.
    pub fn number(n: usize) -> Self {
        let mut amps = vec![Complex64::new(0.0, 0.0); n + 1];
        amps[n] = Complex64::new(1.0, 0.0);
        Self {
            amplitudes: amps,
            tail_bound: 0.0,
        }
    }

    pub fn vacuum() -> Self {
        Self::number(0)
    }

    /// Random state on `0..=n_max` with i.i.d. standard complex Gaussian
    /// amplitudes.
    pub fn random<R: Rng + ?Sized>(n_max: usize, rng: &mut R) -> Self {
        loop {
            let amps: Vec<Complex64> = (0..=n_max)
                .map(|_| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
                .collect();
            if let Ok(s) = Self::normalized(amps, 0.0) {
                return s;
            }
        }
    }

    pub fn n_max(&self) -> usize {
        self.amplitudes.len() - 1
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn tail_bound(&self) -> f64 {
        self.tail_bound
    }

    pub fn probabilities(&self) -> impl Iterator<Item = f64> + '_ {
        self.amplitudes.iter().map(|c| c.norm_sqr())
    }
}

/// `exp(i n phi)`, with `n phi` reduced modulo `2 pi` using the exact
/// rounding error of the product so large photon numbers keep full
/// precision.
pub(crate) fn cis_n(n: f64, phi: f64) -> Complex64 {
    const TWO_PI_HI: f64 = std::f64::consts::TAU;
    const TWO_PI_LO: f64 = 2.449_293_598_294_706_4e-16;
    let p = n * phi;
    let err = n.mul_add(phi, -p);
    let q = (p / TWO_PI_HI).round();
    let r = q.mul_add(-TWO_PI_HI, p) - q * TWO_PI_LO + err;
    Complex64::from_polar(1.0, r)
}

fn check_power(len: usize, k: usize) -> Result<()> {
    if k == 0 {
        return Err(domain("operator power k must be >= 1"));
    }
    if k > len.saturating_sub(1) {
        return Err(domain(format!(
            "k = {k} exceeds n_max = {}",
            len.saturating_sub(1)
        )));
    }
    Ok(())
}

/// `E^k psi`: `c'_n = c_{n+k}`, the top `k` entries become zero.
pub fn apply_e_pow(amps: &[Complex64], k: usize) -> Result<Vec<Complex64>> {
    check_power(amps.len(), k)?;
    let mut out = vec![Complex64::new(0.0, 0.0); amps.len()];
    out[..amps.len() - k].copy_from_slice(&amps[k..]);
    Ok(out)
}

/// `E^dag^k psi`: `c'_n = c_{n-k}`, the bottom `k` entries are zero. The
/// result has `k` more entries than the input, so nothing is lost.
pub fn apply_e_dag_pow(amps: &[Complex64], k: usize) -> Result<Vec<Complex64>> {
    check_power(amps.len(), k)?;
    let mut out = vec![Complex64::new(0.0, 0.0); amps.len() + k];
    out[k..].copy_from_slice(amps);
    Ok(out)
}

/// `exp(i phi n) psi` on an arbitrary amplitude vector.
pub fn phase_shift_amplitudes(amps: &[Complex64], phi: f64) -> Vec<Complex64> {
    amps.iter()
        .enumerate()
        .map(|(n, c)| c * cis_n(n as f64, phi))
        .collect()
}

/// `exp(i phi n) psi`.
pub fn apply_phase_shift(state: &FockState, phi: f64) -> FockState {
    FockState {
        amplitudes: phase_shift_amplitudes(state.amplitudes(), phi),
        tail_bound: state.tail_bound,
    }
}

/// `Pi_k psi`: keeps the components with fewer than `k` photons.
pub fn apply_projector(amps: &[Complex64], k: usize) -> Vec<Complex64> {
    amps.iter()
        .enumerate()
        .map(|(n, &c)| if n < k { c } else { Complex64::new(0.0, 0.0) })
        .collect()
}

/// `|| E^k exp(i phi n) psi - exp(i k phi) exp(i phi n) E^k psi ||`, which
/// the single-mode Weyl relation sets to zero.
pub fn weyl_residual(amps: &[Complex64], k: usize, phi: f64) -> Result<f64> {
    let lhs = apply_e_pow(&phase_shift_amplitudes(amps, phi), k)?;
    let rhs = phase_shift_amplitudes(&apply_e_pow(amps, k)?, phi);
    let twist = cis_n(k as f64, phi);
    Ok(lhs
        .iter()
        .zip(&rhs)
        .map(|(a, b)| (a - twist * b).norm_sqr())
        .sum::<f64>()
        .sqrt())
}

/// Characteristic functions of a single-mode state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FockCharSet {
    /// `<exp(i phi n)>`
    pub phi: Complex64,
    /// `<E^dag^k>`
    pub phi_tilde: Complex64,
    /// `<exp(-i phi n) E^dag^k>`
    pub omega: Complex64,
    /// `<Pi_k>`
    pub pi_k: f64,
    pub k: usize,
    pub phase_arg: f64,
}

impl FockCharSet {
    pub fn theta(&self) -> Complex64 {
        self.omega * self.phi * self.phi_tilde.conj()
    }

    /// Gram matrix of `psi, exp(i phi n) psi, E^dag^k psi` has unit diagonal
    /// and off-diagonal `(Phi, PhiT, Omega)`.
    pub fn det_plus(&self) -> f64 {
        gram_det(self.phi, self.phi_tilde, self.omega, 1.0)
    }

    /// Gram matrix of `psi, exp(-i phi n) psi, E^k psi`. Its last diagonal
    /// entry is `1 - Pi_k` and the Weyl relation turns its (2,3) entry into
    /// `exp(-i k phi) Omega*`.
    pub fn det_minus(&self) -> f64 {
        let twist = cis_n(-(self.k as f64), self.phase_arg);
        gram_det(
            self.phi.conj(),
            self.phi_tilde.conj(),
            twist * self.omega.conj(),
            1.0 - self.pi_k,
        )
    }
}

fn check_normalized(state: &FockState) -> Result<()> {
    let norm_sq: f64 = state.probabilities().sum();
    if (norm_sq - 1.0).abs() > NORM_TOL {
        return Err(Error::NotNormalized {
            deviation: (norm_sq - 1.0).abs(),
        });
    }
    Ok(())
}

/// Characteristic functions for `(k, phi)`.
///
/// Any `k >= 1` is accepted: when `k > n_max` the overlap sums are empty and
/// `PhiT = Omega = 0` exactly.
pub fn char_set(state: &FockState, k: usize, phi: f64) -> Result<FockCharSet> {
    if k == 0 {
        return Err(domain("k must be >= 1"));
    }
    if !phi.is_finite() {
        return Err(domain("phase argument must be finite"));
    }
    check_normalized(state)?;
    let c = state.amplitudes();
    let mut phi_cf = Complex64::new(0.0, 0.0);
    for (n, a) in c.iter().enumerate() {
        phi_cf += cis_n(n as f64, phi) * a.norm_sqr();
    }
    let mut phi_tilde = Complex64::new(0.0, 0.0);
    let mut omega = Complex64::new(0.0, 0.0);
    for n in 0..c.len().saturating_sub(k) {
        let overlap = c[n + k].conj() * c[n];
        phi_tilde += overlap;
        omega += overlap * cis_n(-((n + k) as f64), phi);
    }
    let pi_k = c.iter().take(k).map(|a| a.norm_sqr()).sum();
    Ok(FockCharSet {
        phi: phi_cf,
        phi_tilde,
        omega,
        pi_k,
        k,
        phase_arg: phi,
    })
}

/// `(det G+, det G-)`.
pub fn gram_dets(state: &FockState, k: usize, phi: f64) -> Result<(f64, f64)> {
    let cs = char_set(state, k, phi)?;
    Ok((cs.det_plus(), cs.det_minus()))
}

/// Whether `k phi = pi (mod 2 pi)` within [`APPLICABILITY_TOL`].
pub fn is_applicable(k: usize, phi: f64) -> bool {
    let d = (k as f64 * phi - PI).rem_euclid(2.0 * PI);
    d.min(2.0 * PI - d) < APPLICABILITY_TOL
}

/// Builds the report from an already computed characteristic set.
pub fn report_from_chars(cs: &FockCharSet) -> UncertaintyReport {
    let p2 = cs.phi.norm_sqr();
    let t2 = cs.phi_tilde.norm_sqr();
    let u = p2 + t2;
    let u_prime = u + cs.omega.norm_sqr();
    let u_double_prime = u_prime + 0.5 * cs.pi_k * (1.0 - p2);
    let v = (p2 * t2).sqrt();
    let applicable = is_applicable(cs.k, cs.phase_arg);
    UncertaintyReport {
        u,
        u_prime: Some(u_prime),
        u_double_prime: Some(u_double_prime),
        v,
        det_plus: cs.det_plus(),
        det_minus: cs.det_minus(),
        bound: 1.0,
        applicable,
        slack: applicable.then(|| {
            UncertaintyReport::slack_for(1.0, u, Some(u_prime), Some(u_double_prime), v)
        }),
    }
}

/// `U, U', U'', V` and both Gram determinants. The bounds are only attached
/// (as slack) when `k phi = pi`.
pub fn report(state: &FockState, k: usize, phi: f64) -> Result<UncertaintyReport> {
    let r = report_from_chars(&char_set(state, k, phi)?);
    debug_assert!(r.is_valid(), "{:?}", r.violations());
    Ok(r)
}

/// `M` equally spaced phases covering `[-pi, pi)`.
pub fn phase_grid(m: usize) -> Vec<f64> {
    (0..m)
        .map(|i| -PI + 2.0 * PI * i as f64 / m as f64)
        .collect()
}

/// Phase distribution `P(phi) = |<phi|psi>|^2 = |sum_n c_n e^{-i n phi}|^2 / 2 pi`
/// sampled on `grid`.
pub fn phase_distribution(state: &FockState, grid: &[f64]) -> Result<Vec<f64>> {
    if grid.len() < 2 {
        return Err(domain("phase grid needs at least 2 points"));
    }
    Ok(grid
        .iter()
        .map(|&phi| {
            let amp: Complex64 = state
                .amplitudes()
                .iter()
                .enumerate()
                .map(|(n, c)| c * cis_n(-(n as f64), phi))
                .sum();
            amp.norm_sqr() / (2.0 * PI)
        })
        .collect())
}

/// Trapezoid rule for a periodic function sampled on [`phase_grid`].
pub fn integrate_periodic(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() * 2.0 * PI / values.len() as f64
}

/// `sum_n n |c_n|^2`.
pub fn mean_photon(state: &FockState) -> f64 {
    state
        .probabilities()
        .enumerate()
        .map(|(n, p)| n as f64 * p)
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn vnorm(v: &[Complex64]) -> f64 {
        v.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
    }

    fn diff(a: &[Complex64], b: &[Complex64]) -> f64 {
        let n = a.len().max(b.len());
        let z = Complex64::new(0.0, 0.0);
        (0..n)
            .map(|i| (a.get(i).copied().unwrap_or(z) - b.get(i).copied().unwrap_or(z)).norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    #[test]
    fn shift_examples() {
        let vac = FockState::number(0);
        let padded = [Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)];
        assert!(vnorm(&apply_e_pow(&padded, 1).unwrap()) == 0.0);
        let up = apply_e_dag_pow(vac.amplitudes(), 1);
        assert!(up.is_err(), "n_max = 0 cannot represent k = 1");
        let up = apply_e_dag_pow(&padded, 1).unwrap();
        assert_eq!(up[1], Complex64::new(1.0, 0.0));
        let back = apply_e_pow(&up, 1).unwrap();
        assert!(diff(&back, &padded) < 1e-15);
        let down_up = apply_e_dag_pow(&apply_e_pow(&padded, 1).unwrap(), 1).unwrap();
        assert!(vnorm(&down_up) == 0.0);
        assert!(apply_e_pow(&padded, 0).is_err());
        assert!(apply_e_pow(&padded, 2).is_err());
    }

    #[test]
    fn weyl_residual_vanishes() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let s = FockState::random(12, &mut rng);
        for k in 1..=8 {
            assert!(weyl_residual(s.amplitudes(), k, 0.731).unwrap() < 1e-14);
        }
        assert!(weyl_residual(s.amplitudes(), 13, 0.5).is_err());
    }

    #[test]
    fn phase_shift_two_pi_is_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let s = FockState::random(300, &mut rng);
        let t = apply_phase_shift(&s, 2.0 * PI);
        assert!(diff(s.amplitudes(), t.amplitudes()) < 1e-12);
    }

    #[test]
    fn one_sided_unitarity() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for n_max in [8usize, 32] {
            let s = FockState::random(n_max, &mut rng);
            let a = s.amplitudes();
            for k in 1..=4 {
                let ee_dag = apply_e_pow(&apply_e_dag_pow(a, k).unwrap(), k).unwrap();
                assert!(diff(&ee_dag, a) < 1e-12);
                let e_dag_e = apply_e_dag_pow(&apply_e_pow(a, k).unwrap(), k).unwrap();
                let expected: Vec<_> = a
                    .iter()
                    .zip(apply_projector(a, k))
                    .map(|(x, p)| x - p)
                    .collect();
                assert!(diff(&e_dag_e, &expected) < 1e-12);
            }
        }
    }

    #[test]
    fn number_state_chars() {
        for n in 0..5usize {
            let s = FockState::number(n);
            for k in 1..4usize {
                let cs = char_set(&s, k, 0.7).unwrap();
                assert!((cs.phi - cis_n(n as f64, 0.7)).norm() < 1e-15);
                assert_eq!(cs.phi_tilde.norm(), 0.0);
                assert_eq!(cs.omega.norm(), 0.0);
                assert_eq!(cs.pi_k, if n < k { 1.0 } else { 0.0 });
            }
        }
        let cs = char_set(&FockState::vacuum(), 1, PI).unwrap();
        assert_eq!(cs.phi, Complex64::new(1.0, 0.0));
        assert_eq!(cs.pi_k, 1.0);
    }

    #[test]
    fn gram_det_examples() {
        let (dp, _) = gram_dets(&FockState::number(3), 2, 1.1).unwrap();
        assert!(dp.abs() < 1e-15);
        let (_, dm) = gram_dets(&FockState::vacuum(), 1, PI).unwrap();
        assert!(dm.abs() < 1e-15);
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let s = FockState::random(16, &mut rng);
        for k in 1..4 {
            let (dp, _) = gram_dets(&s, k, 0.0).unwrap();
            assert!(dp.abs() < 1e-12);
        }
    }

    #[test]
    fn report_for_number_state() {
        let r = report(&FockState::number(4), 1, PI).unwrap();
        assert!(r.applicable);
        assert!((r.u - 1.0).abs() < 1e-15);
        assert!((r.u_prime.unwrap() - 1.0).abs() < 1e-15);
        assert!((r.u_double_prime.unwrap() - 1.0).abs() < 1e-15);
        assert_eq!(r.v, 0.0);
        let r = report(&FockState::number(4), 1, 1.0).unwrap();
        assert!(!r.applicable);
        assert!(r.slack.is_none());
    }

    #[test]
    fn applicability() {
        assert!(is_applicable(1, PI));
        assert!(is_applicable(2, PI / 2.0));
        assert!(is_applicable(3, PI / 3.0));
        assert!(is_applicable(1, -PI));
        assert!(is_applicable(1, 3.0 * PI));
        assert!(!is_applicable(2, PI));
        assert!(!is_applicable(1, PI + 1e-8));
    }

    #[test]
    fn phase_distribution_flat_for_number_state() {
        let grid = phase_grid(64);
        let p = phase_distribution(&FockState::number(5), &grid).unwrap();
        for x in &p {
            assert!((x - 1.0 / (2.0 * PI)).abs() < 1e-15);
        }
        assert!(phase_distribution(&FockState::number(5), &[0.0]).is_err());
    }

    #[test]
    fn char_set_rejects_bad_input() {
        let s = FockState::number(2);
        assert!(char_set(&s, 0, PI).is_err());
        assert!(char_set(&s, 1, f64::NAN).is_err());
        assert!(FockState::new(vec![Complex64::new(0.5, 0.0)]).is_err());
        // k beyond n_max is exact: nothing overlaps.
        let cs = char_set(&s, 7, PI).unwrap();
        assert_eq!(cs.phi_tilde.norm(), 0.0);
        assert_eq!(cs.pi_k, 1.0);
    }

    #[test]
    fn mean_photon_examples() {
        assert_eq!(mean_photon(&FockState::number(3)), 3.0);
    }

    #[test]
    fn cis_n_is_accurate_for_large_n() {
        for n in [0u32, 1, 17, 1000, 4095] {
            let z = cis_n(f64::from(n), PI);
            let expected = if n % 2 == 0 { 1.0 } else { -1.0 };
            assert!((z.re - expected).abs() < 1e-12 && z.im.abs() < 1e-12, "n {n}");
        }
    }
}
