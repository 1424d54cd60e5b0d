//! Randomized invariant suites behind `weyl-uncert verify`.
//!
//! Every suite draws its states from its own ChaCha stream seeded with the
//! user's seed, so a suite's outcome does not depend on which other suites
//! run alongside it.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::families::{build, oracle_check, FamilySpec, Truncation};
use crate::fock::{
    self, apply_e_dag_pow, apply_e_pow, char_set, integrate_periodic, phase_distribution, phase_grid,
    phase_shift_amplitudes, weyl_residual, FockState,
};
use crate::numerics::{det3, min_eig3, Hermitian3};
use crate::relations::{BOUND_TOL, DET_TOL};
use crate::spin::{
    self, bound_b, cyclic_excursion, gamma_angle, gamma_is_pi, gram_dets_spin, spin_report, weyl_defect_max,
    QuditState, SpinSystem,
};

/// Tolerance on operator identities.
pub const IDENTITY_TOL: f64 = 1e-12;
/// How many samples per suite are cross-checked with the eigenvalue route.
pub const EIGEN_CROSS_CHECKS: usize = 100;
/// Truncation cap used by the families suite, large enough for `|xi| = 0.999`.
pub const FAMILIES_MAX_NMAX: usize = 32768;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Spin,
    Fock,
    Families,
    All,
}

impl Suite {
    fn expand(self) -> Vec<Suite> {
        match self {
            Suite::All => vec![Suite::Spin, Suite::Fock, Suite::Families],
            s => vec![s],
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Suite::Spin => "spin",
            Suite::Fock => "fock",
            Suite::Families => "families",
            Suite::All => "all",
        })
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "spin" => Ok(Suite::Spin),
            "fock" => Ok(Suite::Fock),
            "families" => Ok(Suite::Families),
            "all" => Ok(Suite::All),
            _ => Err(Error::Unknown {
                kind: "suite",
                name: s.to_string(),
            }),
        }
    }
}

/// Outcome of one invariant, phrased as `worst <= threshold`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckOutcome {
    pub suite: Suite,
    pub name: String,
    pub threshold: f64,
    /// Largest observed value of the checked quantity.
    pub worst: f64,
    pub evaluated: usize,
    pub failures: usize,
    /// Description and serialized amplitudes of the first violating case.
    pub first_failure: Option<String>,
}

impl CheckOutcome {
    pub fn passed(&self) -> bool {
        self.failures == 0 && self.evaluated > 0
    }
}

impl fmt::Display for CheckOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} {}/{}: worst {:.3e} (limit {:.1e}, {} cases)",
            if self.passed() { "PASS" } else { "FAIL" },
            self.suite,
            self.name,
            self.worst,
            self.threshold,
            self.evaluated
        )?;
        if let Some(detail) = &self.first_failure {
            write!(f, "\n    first failure: {detail}")?;
        }
        Ok(())
    }
}

struct Check {
    outcome: CheckOutcome,
}

impl Check {
    fn new(suite: Suite, name: &str, threshold: f64) -> Self {
        Self {
            outcome: CheckOutcome {
                suite,
                name: name.to_string(),
                threshold,
                worst: f64::NEG_INFINITY,
                evaluated: 0,
                failures: 0,
                first_failure: None,
            },
        }
    }

    fn record(&mut self, value: f64, detail: impl FnOnce() -> String) {
        let o = &mut self.outcome;
        o.evaluated += 1;
        if value > o.worst || value.is_nan() {
            o.worst = value;
        }
        if !(value <= o.threshold) {
            o.failures += 1;
            if o.first_failure.is_none() {
                o.first_failure = Some(format!("value {value:e}; {}", detail()));
            }
        }
    }

    fn finish(self) -> CheckOutcome {
        self.outcome
    }
}

fn amplitudes_json(amps: &[Complex64]) -> String {
    serde_json::to_string(amps).unwrap_or_else(|e| format!("<unserializable: {e}>"))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub seed: u64,
    pub samples: usize,
    pub checks: Vec<CheckOutcome>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(CheckOutcome::passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &CheckOutcome> {
        self.checks.iter().filter(|c| !c.passed())
    }
}

/// Runs `suite` with `samples` random states per randomized check.
pub fn run(suite: Suite, seed: u64, samples: usize) -> Result<VerifyReport> {
    if samples == 0 {
        return Err(domain("samples must be at least 1"));
    }
    let mut checks = Vec::new();
    for s in suite.expand() {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        checks.extend(match s {
            Suite::Spin => spin_suite(&mut rng, samples),
            Suite::Fock => fock_suite(&mut rng, samples)?,
            Suite::Families => families_suite(&mut rng, samples)?,
            Suite::All => unreachable!(),
        });
    }
    Ok(VerifyReport {
        seed,
        samples,
        checks,
    })
}

/// Dimensions used for the deterministic Weyl-relation sweep.
pub fn weyl_dimensions() -> Vec<usize> {
    (2..=16).chain([32, 64]).collect()
}

fn spin_suite(rng: &mut ChaCha8Rng, samples: usize) -> Vec<CheckOutcome> {
    let suite = Suite::Spin;
    let mut weyl = Check::new(suite, "weyl defect, d in 2..16,32,64, k,l in 1..2d", IDENTITY_TOL);
    for d in weyl_dimensions() {
        let sys = SpinSystem::new(d).expect("d >= 2");
        let range = 1..=2 * d as i64;
        weyl.record(weyl_defect_max(sys, range.clone(), range), || format!("d = {d}"));
    }

    let mut excursion = Check::new(suite, "cyclic excursion phase", IDENTITY_TOL);
    let mut det = Check::new(suite, "-det G (both sign choices)", DET_TOL);
    let mut eig = Check::new(suite, "-min eigenvalue of G", DET_TOL);
    let mut det_agree = Check::new(suite, "|det3(G) - closed-form det|", IDENTITY_TOL);
    let mut sum = Check::new(suite, "U - B(gamma)", BOUND_TOL);
    let mut product = Check::new(suite, "V - B(gamma)/2", BOUND_TOL);
    let mut triple = Check::new(suite, "U' - 1 at gamma = pi", BOUND_TOL);

    for i in 0..samples {
        let d = rng.random_range(2..=16usize);
        let sys = SpinSystem::new(d).expect("d >= 2");
        let (k, ell) = if i % 2 == 0 && d % 2 == 0 {
            // Force gamma = pi: k l = d/2 (mod d) with a random odd multiple.
            let h = (d / 2) as i64;
            let m = 2 * rng.random_range(0..4i64) + 1;
            if rng.random_bool(0.5) {
                (m, h)
            } else {
                (h, m)
            }
        } else {
            (
                rng.random_range(1..=2 * d as i64),
                rng.random_range(1..=2 * d as i64),
            )
        };
        let state = QuditState::random(sys, rng);
        let psi = state.amplitudes();
        let describe = || format!("d = {d}, k = {k}, l = {ell}, amplitudes {}", amplitudes_json(psi));

        let expected = Complex64::from_polar(1.0, -gamma_angle(sys, k, ell));
        excursion.record((cyclic_excursion(&state, k, ell) - expected).norm(), describe);

        let (dp, dm) = gram_dets_spin(&state, k, ell);
        det.record(-dp.min(dm), describe);

        let r = spin_report(&state, k, ell);
        let bound = bound_b(gamma_angle(sys, k, ell));
        sum.record(r.u - bound, describe);
        product.record(r.v - bound / 2.0, describe);
        if gamma_is_pi(sys, k, ell) {
            triple.record(r.u_prime.unwrap_or(f64::NAN) - 1.0, describe);
        }

        if i < EIGEN_CROSS_CHECKS {
            for sign in [1i64, -1] {
                let f_psi = spin::apply_f_pow(sys, psi, sign * ell);
                let e_psi = spin::apply_e_pow(sys, psi, sign * k);
                let g = Hermitian3::gram([psi, &f_psi, &e_psi]);
                eig.record(-min_eig3(&g), describe);
                let closed = if sign == 1 { dp } else { dm };
                det_agree.record((det3(&g) - closed).abs(), describe);
            }
        }
    }
    [weyl, excursion, det, eig, det_agree, sum, product, triple]
        .into_iter()
        .map(Check::finish)
        .collect()
}

fn random_phase(rng: &mut ChaCha8Rng, k: usize, stringent: bool) -> f64 {
    if stringent {
        // k phi = pi + 2 pi m
        let m = rng.random_range(0..k) as f64;
        (PI + 2.0 * PI * m) / k as f64
    } else {
        rng.random_range(-PI..PI)
    }
}

fn fock_suite(rng: &mut ChaCha8Rng, samples: usize) -> Result<Vec<CheckOutcome>> {
    let suite = Suite::Fock;
    let mut weyl = Check::new(suite, "single-mode weyl residual, k <= 8", IDENTITY_TOL);
    let mut det = Check::new(suite, "-det G+/G-", DET_TOL);
    let mut eig = Check::new(suite, "-min eigenvalue of G+/G-", DET_TOL);
    let mut det_agree = Check::new(suite, "|det3(G+/-) - closed-form det|", IDENTITY_TOL);
    let mut u = Check::new(suite, "U - 1 at k phi = pi", BOUND_TOL);
    let mut up = Check::new(suite, "U' - 1 at k phi = pi", BOUND_TOL);
    let mut upp = Check::new(suite, "U'' - 1 at k phi = pi", BOUND_TOL);
    let mut v = Check::new(suite, "V - 1/2 at k phi = pi", BOUND_TOL);
    let mut dist = Check::new(suite, "|integral of phase distribution - 1|", IDENTITY_TOL);

    for i in 0..samples {
        // Small supports exercise the Pi_k correction.
        let n_max = if i % 4 == 0 {
            rng.random_range(0..=4usize)
        } else {
            rng.random_range(8..=40usize)
        };
        let k = rng.random_range(1..=8usize);
        let stringent = i % 2 == 0;
        let phi = random_phase(rng, k, stringent);
        let state = FockState::random(n_max, rng);
        let psi = state.amplitudes();
        let describe = || {
            format!(
                "n_max = {n_max}, k = {k}, phi = {phi}, amplitudes {}",
                amplitudes_json(psi)
            )
        };

        if k <= n_max {
            weyl.record(weyl_residual(psi, k, phi)?, describe);
        }

        let cs = char_set(&state, k, phi)?;
        let (dp, dm) = (cs.det_plus(), cs.det_minus());
        det.record(-dp.min(dm), describe);

        let r = fock::report_from_chars(&cs);
        if r.applicable {
            u.record(r.u - 1.0, describe);
            up.record(r.u_prime.unwrap_or(f64::NAN) - 1.0, describe);
            upp.record(r.u_double_prime.unwrap_or(f64::NAN) - 1.0, describe);
            v.record(r.v - 0.5, describe);
        }

        if i < EIGEN_CROSS_CHECKS {
            let plus = [
                psi.to_vec(),
                phase_shift_amplitudes(psi, phi),
                raise(psi, k),
            ];
            let minus_e = if k <= n_max {
                apply_e_pow(psi, k)?
            } else {
                vec![Complex64::new(0.0, 0.0); psi.len()]
            };
            let minus = [psi.to_vec(), phase_shift_amplitudes(psi, -phi), minus_e];
            for (vecs, closed) in [(plus, dp), (minus, dm)] {
                let g = Hermitian3::gram([&vecs[0], &vecs[1], &vecs[2]]);
                eig.record(-min_eig3(&g), describe);
                det_agree.record((det3(&g) - closed).abs(), describe);
            }
            if i < 20 {
                let grid = phase_grid(2 * n_max + 2);
                let p = phase_distribution(&state, &grid)?;
                dist.record((integrate_periodic(&p) - 1.0).abs(), describe);
            }
        }
    }
    Ok([weyl, det, eig, det_agree, u, up, upp, v, dist]
        .into_iter()
        .map(Check::finish)
        .collect())
}

/// Fixed family members checked against their closed forms, with the
/// threshold that applies to each.
pub fn oracle_cases() -> Vec<(FamilySpec, usize, f64, f64)> {
    let mut out = Vec::new();
    let pc = |xi: Complex64| FamilySpec::PhaseCoherent { xi };
    for xi in [
        Complex64::new(0.1, 0.0),
        Complex64::new(0.49, 0.0),
        Complex64::new(0.7, 0.0),
        Complex64::new(0.9, 0.0),
        Complex64::from_polar(0.99, PI / 3.0),
    ] {
        for k in 1..=3 {
            for phi in [PI, PI / 2.0] {
                out.push((pc(xi), k, phi, 1e-10));
            }
        }
    }
    for lambda in [0.3, 0.77, 0.88, 1.5, 3.0] {
        for k in 1..=3 {
            for phi in [PI, PI / 2.0] {
                out.push((FamilySpec::Bessel { lambda }, k, phi, 1e-8));
            }
        }
    }
    for a in [0.002, 0.005, 0.01, 0.02, 0.05] {
        out.push((FamilySpec::Gaussian { nbar: 400.0, a, b: 0.0 }, 1, PI, 1e-2));
    }
    for akk in [0.5, PI / 2.0, 5.0] {
        for b in [0.0, 0.002] {
            out.push((
                FamilySpec::Gaussian {
                    nbar: 400.0,
                    a: akk / 256.0,
                    b,
                },
                16,
                PI / 16.0,
                1e-2,
            ));
        }
    }
    for alpha2 in [0.1, 0.5, 0.9] {
        out.push((
            FamilySpec::intermediate(alpha2, 3, Complex64::new(0.999, 0.0)),
            1,
            PI,
            5e-2,
        ));
    }
    out
}

fn random_family(rng: &mut ChaCha8Rng) -> FamilySpec {
    match rng.random_range(0..5) {
        0 => FamilySpec::Number {
            n: rng.random_range(0..20),
        },
        1 => FamilySpec::PhaseCoherent {
            xi: Complex64::from_polar(rng.random_range(0.0..0.99), rng.random_range(-PI..PI)),
        },
        2 => {
            let a = rng.random_range(0.005..0.1);
            FamilySpec::Gaussian {
                nbar: 5.0 / f64::sqrt(a) + rng.random_range(0.0..100.0),
                a,
                b: rng.random_range(-2.0..2.0),
            }
        }
        3 => FamilySpec::Bessel {
            lambda: rng.random_range(0.05..4.0),
        },
        _ => FamilySpec::intermediate(
            rng.random_range(0.0..1.0),
            rng.random_range(1..10),
            Complex64::from_polar(rng.random_range(0.0..0.99), rng.random_range(-PI..PI)),
        ),
    }
}

fn families_suite(rng: &mut ChaCha8Rng, samples: usize) -> Result<Vec<CheckOutcome>> {
    let suite = Suite::Families;
    let trunc = Truncation::with_cap(FAMILIES_MAX_NMAX);
    let mut oracle = Check::new(suite, "closed-form deviation / family threshold", 1.0);
    for (spec, k, phi, threshold) in oracle_cases() {
        let dev = oracle_check(&spec, k, phi, &trunc)?;
        oracle.record(dev / threshold, || format!("{spec}, k = {k}, phi = {phi}, deviation {dev:e}"));
    }

    let mut eigen = Check::new(suite, "bessel eigen residual", 1e-8);
    for lambda in [0.1, 0.5, 0.77, 0.88, 1.5, 3.0, 6.0] {
        let state = build(&FamilySpec::Bessel { lambda }, &trunc)?;
        eigen.record(bessel_residual(&state, lambda), || format!("lambda = {lambda}"));
    }

    let mut tail = Check::new(suite, "certified truncation tail", 1e-14);
    let mut det = Check::new(suite, "-det G+/G-", DET_TOL);
    let mut sum = Check::new(suite, "max(U, U', U'') - 1 at k phi = pi", BOUND_TOL);
    let mut product = Check::new(suite, "V - 1/2 at k phi = pi", BOUND_TOL);
    for _ in 0..samples {
        let spec = random_family(rng);
        let k = rng.random_range(1..=3usize);
        let phi = random_phase(rng, k, true);
        let state = build(&spec, &trunc)?;
        let describe = || format!("{spec}, k = {k}, phi = {phi}");
        tail.record(state.tail_bound(), describe);
        let r = fock::report(&state, k, phi)?;
        det.record(-r.det_plus.min(r.det_minus), describe);
        let worst_sum = [r.u, r.u_prime.unwrap_or(f64::NAN), r.u_double_prime.unwrap_or(f64::NAN)]
            .into_iter()
            .fold(f64::NEG_INFINITY, f64::max);
        sum.record(worst_sum - 1.0, describe);
        product.record(r.v - 0.5, describe);
    }
    Ok([oracle, eigen, tail, det, sum, product]
        .into_iter()
        .map(Check::finish)
        .collect())
}

/// `E^dag^k psi` without the `k <= n_max` restriction of the operator API.
fn raise(psi: &[Complex64], k: usize) -> Vec<Complex64> {
    let mut out = vec![Complex64::new(0.0, 0.0); k];
    out.extend_from_slice(psi);
    out
}

/// `|| (n + i lambda E^dag) psi ||` over the levels kept by truncation.
pub fn bessel_residual(state: &FockState, lambda: f64) -> f64 {
    let a = state.amplitudes();
    let up = apply_e_dag_pow(a, 1).expect("k = 1");
    (0..a.len())
        .map(|n| (a[n] * n as f64 + Complex64::new(0.0, lambda) * up[n]).norm_sqr())
        .sum::<f64>()
        .sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_samples_rejected() {
        assert!(run(Suite::Spin, 1, 0).is_err());
    }

    #[test]
    fn small_runs_pass() {
        for suite in [Suite::Fock, Suite::Families] {
            let r = run(suite, 11, 20).unwrap();
            for c in &r.checks {
                assert!(c.passed(), "{c}");
            }
        }
    }

    #[test]
    fn deterministic() {
        assert_eq!(run(Suite::Fock, 5, 30).unwrap(), run(Suite::Fock, 5, 30).unwrap());
    }

    #[test]
    fn failure_carries_detail() {
        let mut c = Check::new(Suite::Fock, "x", 1.0);
        c.record(0.5, || unreachable!());
        c.record(2.0, || amplitudes_json(&[Complex64::new(1.0, 0.0)]));
        let o = c.finish();
        assert!(!o.passed());
        assert_eq!(o.worst, 2.0);
        assert!(o.first_failure.unwrap().contains("[[1.0,0.0]]"));
    }
}
