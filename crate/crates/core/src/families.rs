//! Example state families and their closed-form characteristic functions.
//!
//! | family | amplitudes `<n|psi>` |
//! |---|---|
//! | number | `delta_{n,n0}` |
//! | phase-coherent | `sqrt(1 - |xi|^2) xi^n` (eigenstate of `E`) |
//! | gaussian | `exp(-(a + i b)(n - nbar)^2)`, renormalized on the lattice |
//! | bessel | `(-i lambda)^n / n!`, the `mu = 0` eigenstate of `n + i lambda E^dag` |
//! | intermediate | `alpha |n0> + beta |xi>`, exactly normalized |
//!
//! Every constructor truncates at the smallest `n_max` whose discarded tail
//! mass is certified below [`TAIL_TARGET`].

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{domain, Error, Result};
use crate::fock::{char_set, FockCharSet, FockState};
use crate::numerics::bessel_i;

/// Certified bound on the probability mass dropped by truncation.
pub const TAIL_TARGET: f64 = 1e-14;
/// Default truncation cap on `n_max`.
pub const DEFAULT_MAX_NMAX: usize = 4096;
/// Environment variable overriding [`DEFAULT_MAX_NMAX`].
pub const MAX_NMAX_ENV: &str = "WEYL_UNCERT_MAX_NMAX";
/// Floor used when comparing squared magnitudes relatively.
pub const MAGNITUDE_FLOOR: f64 = 1e-12;

/// Truncation policy for the family constructors.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Truncation {
    pub max_nmax: usize,
}

impl Default for Truncation {
    fn default() -> Self {
        Self {
            max_nmax: DEFAULT_MAX_NMAX,
        }
    }
}

impl Truncation {
    pub fn with_cap(max_nmax: usize) -> Self {
        Self { max_nmax }
    }

    /// Reads [`MAX_NMAX_ENV`], falling back to the default when unset.
    pub fn from_env() -> Result<Self> {
        match std::env::var(MAX_NMAX_ENV) {
            Ok(v) => v
                .trim()
                .parse::<usize>()
                .map(Self::with_cap)
                .map_err(|_| domain(format!("{MAX_NMAX_ENV}='{v}' is not a non-negative integer"))),
            Err(_) => Ok(Self::default()),
        }
    }

    fn check(&self, required: usize) -> Result<()> {
        if required > self.max_nmax {
            return Err(Error::TruncationCap {
                required,
                cap: self.max_nmax,
            });
        }
        Ok(())
    }
}

/// One member of a state family.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FamilySpec {
    Number {
        n: usize,
    },
    PhaseCoherent {
        xi: Complex64,
    },
    Gaussian {
        nbar: f64,
        a: f64,
        b: f64,
    },
    Bessel {
        lambda: f64,
    },
    Intermediate {
        alpha: Complex64,
        beta: Complex64,
        n: usize,
        xi: Complex64,
    },
}

impl FamilySpec {
    pub fn tag(&self) -> &'static str {
        match self {
            FamilySpec::Number { .. } => "number",
            FamilySpec::PhaseCoherent { .. } => "phase-coherent",
            FamilySpec::Gaussian { .. } => "gaussian",
            FamilySpec::Bessel { .. } => "bessel",
            FamilySpec::Intermediate { .. } => "intermediate",
        }
    }

    /// Intermediate state with real non-negative `alpha = sqrt(alpha2)` and
    /// `beta = sqrt(1 - alpha2)`.
    pub fn intermediate(alpha2: f64, n: usize, xi: Complex64) -> Self {
        FamilySpec::Intermediate {
            alpha: Complex64::new(alpha2.max(0.0).sqrt(), 0.0),
            beta: Complex64::new((1.0 - alpha2).max(0.0).sqrt(), 0.0),
            n,
            xi,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            FamilySpec::Number { .. } => Ok(()),
            FamilySpec::PhaseCoherent { xi } => check_xi(xi),
            FamilySpec::Gaussian { nbar, a, b } => {
                if !(a > 0.0 && a <= 0.1) {
                    return Err(domain(format!("gaussian needs 0 < a <= 0.1, got a = {a}")));
                }
                if !b.is_finite() {
                    return Err(domain("gaussian b must be finite"));
                }
                let min_nbar = 5.0 / a.sqrt();
                if !(nbar >= min_nbar) {
                    return Err(domain(format!(
                        "gaussian needs nbar >= 5/sqrt(a) = {min_nbar}, got {nbar}"
                    )));
                }
                Ok(())
            }
            FamilySpec::Bessel { lambda } => {
                if !(lambda > 0.0 && lambda <= 0.5 * crate::numerics::BESSEL_MAX_ARG) {
                    return Err(domain(format!("bessel needs 0 < lambda <= 50, got {lambda}")));
                }
                Ok(())
            }
            FamilySpec::Intermediate { alpha, beta, n, xi } => {
                if n == 0 {
                    return Err(domain("intermediate needs n > 0"));
                }
                let s = alpha.norm_sqr() + beta.norm_sqr();
                if !((s - 1.0).abs() <= 1e-6) {
                    return Err(domain(format!(
                        "intermediate needs |alpha|^2 + |beta|^2 = 1, got {s}"
                    )));
                }
                check_xi(xi)
            }
        }
    }

    /// Copy of this spec with one parameter replaced. `k` is only used by
    /// the `akk` axis of the Gaussian family (`a = akk / k^2`).
    pub fn with_param(&self, name: &str, value: f64, k: usize) -> Result<FamilySpec> {
        let unknown = || Error::Unknown {
            kind: "parameter",
            name: format!("{}:{name}", self.tag()),
        };
        let mut out = *self;
        match (&mut out, name) {
            (FamilySpec::Number { n }, "n") => *n = integral(value, "n")?,
            (FamilySpec::PhaseCoherent { xi }, "xi") => *xi = Complex64::from_polar(value, xi.arg()),
            (FamilySpec::PhaseCoherent { xi }, "arg") => *xi = Complex64::from_polar(xi.norm(), value),
            (FamilySpec::Gaussian { nbar, .. }, "nbar") => *nbar = value,
            (FamilySpec::Gaussian { a, .. }, "a") => *a = value,
            (FamilySpec::Gaussian { a, .. }, "var") => *a = 1.0 / (4.0 * value),
            (FamilySpec::Gaussian { a, .. }, "akk") => *a = value / (k * k) as f64,
            (FamilySpec::Gaussian { b, .. }, "b") => *b = value,
            (FamilySpec::Bessel { lambda }, "lambda") => *lambda = value,
            (FamilySpec::Intermediate { alpha, beta, .. }, "alpha2") => {
                *alpha = Complex64::from_polar(value.max(0.0).sqrt(), alpha.arg());
                *beta = Complex64::from_polar((1.0 - value).max(0.0).sqrt(), beta.arg());
            }
            (FamilySpec::Intermediate { xi, .. }, "xi") => *xi = Complex64::from_polar(value, xi.arg()),
            (FamilySpec::Intermediate { n, .. }, "n") => *n = integral(value, "n")?,
            _ => return Err(unknown()),
        }
        Ok(out)
    }

    /// Names accepted by [`FamilySpec::with_param`].
    pub fn param_names(&self) -> &'static [&'static str] {
        match self {
            FamilySpec::Number { .. } => &["n"],
            FamilySpec::PhaseCoherent { .. } => &["xi", "arg"],
            FamilySpec::Gaussian { .. } => &["nbar", "a", "var", "akk", "b"],
            FamilySpec::Bessel { .. } => &["lambda"],
            FamilySpec::Intermediate { .. } => &["alpha2", "xi", "n"],
        }
    }
}

fn check_xi(xi: Complex64) -> Result<()> {
    if !(xi.norm() <= 1.0 - 1e-6) {
        return Err(domain(format!("|xi| must be <= 1 - 1e-6, got {}", xi.norm())));
    }
    Ok(())
}

fn integral(value: f64, name: &str) -> Result<usize> {
    let r = value.round();
    if (value - r).abs() > 1e-9 || r < 0.0 {
        return Err(domain(format!("{name} must be a non-negative integer, got {value}")));
    }
    Ok(r as usize)
}

/// Smallest `n_max` with `t^(n_max + 1) < TAIL_TARGET` (geometric tail of a
/// phase-coherent state with `t = |xi|^2`).
fn geometric_cutoff(t: f64) -> usize {
    if t <= 0.0 {
        return 0;
    }
    let terms = (TAIL_TARGET.ln() / t.ln()).floor() as usize + 1;
    let mut n_max = terms.saturating_sub(1);
    while t.powf((n_max + 1) as f64) >= TAIL_TARGET {
        n_max += 1;
    }
    n_max
}

/// Unnormalized phase-coherent amplitudes `sqrt(1 - t) xi^n` for `0..=n_max`.
fn phase_coherent_amps(xi: Complex64, n_max: usize) -> Vec<Complex64> {
    let pre = (1.0 - xi.norm_sqr()).sqrt();
    let mut out = Vec::with_capacity(n_max + 1);
    let mut p = Complex64::new(pre, 0.0);
    for _ in 0..=n_max {
        out.push(p);
        p *= xi;
    }
    out
}

/// Builds the truncated state with a certified tail bound.
pub fn build(spec: &FamilySpec, trunc: &Truncation) -> Result<FockState> {
    spec.validate()?;
    match *spec {
        FamilySpec::Number { n } => {
            trunc.check(n)?;
            Ok(FockState::number(n))
        }
        FamilySpec::PhaseCoherent { xi } => {
            let t = xi.norm_sqr();
            let n_max = geometric_cutoff(t);
            trunc.check(n_max)?;
            let tail = if t > 0.0 { t.powf((n_max + 1) as f64) } else { 0.0 };
            FockState::normalized(phase_coherent_amps(xi, n_max), tail)
        }
        FamilySpec::Gaussian { nbar, a, b } => build_gaussian(nbar, a, b, trunc),
        FamilySpec::Bessel { lambda } => build_bessel(lambda, trunc),
        FamilySpec::Intermediate { alpha, beta, n, xi } => {
            let t = xi.norm_sqr();
            let mut n_max = geometric_cutoff(t).max(n);
            trunc.check(n_max)?;
            let mut amps: Vec<Complex64> = phase_coherent_amps(xi, n_max)
                .into_iter()
                .map(|c| c * beta)
                .collect();
            amps[n] += alpha;
            let norm_sq: f64 = amps.iter().map(|c| c.norm_sqr()).sum();
            if norm_sq < 1e-12 {
                return Err(domain("intermediate superposition cancels to zero"));
            }
            // Interference can leave norm_sq below 1, which inflates the
            // relative tail; extend until the normalized tail is certified.
            let tail_at = |m: usize| beta.norm_sqr() * t.powf((m + 1) as f64) / norm_sq;
            let mut top = beta * (1.0 - t).sqrt() * xi.powu(n_max as u32);
            while tail_at(n_max) >= TAIL_TARGET {
                n_max += 1;
                trunc.check(n_max)?;
                top *= xi;
                amps.push(top);
            }
            let norm_sq: f64 = amps.iter().map(|c| c.norm_sqr()).sum();
            FockState::normalized(amps, beta.norm_sqr() * t.powf((n_max + 1) as f64) / norm_sq)
        }
    }
}

fn build_gaussian(nbar: f64, a: f64, b: f64, trunc: &Truncation) -> Result<FockState> {
    let weight = |x: f64| (-2.0 * a * x * x).exp();
    // Tail above n_max: sum_{n > n_max} w(n - nbar) <= int_X^inf w = e^{-2aX^2} / (4aX),
    // with X = n_max - nbar > 0.
    let tail_integral = |x: f64| weight(x) / (4.0 * a * x);
    let approx_mass = (std::f64::consts::PI / (2.0 * a)).sqrt();
    let mut x = (-(TAIL_TARGET * approx_mass).ln() / (2.0 * a)).sqrt().max(1.0);
    while tail_integral(x) >= 0.1 * TAIL_TARGET * approx_mass {
        x += 1.0;
    }
    let n_max = (nbar + x).ceil() as usize;
    trunc.check(n_max)?;
    let amps: Vec<Complex64> = (0..=n_max)
        .map(|n| {
            let d = n as f64 - nbar;
            (Complex64::new(-a, -b) * (d * d)).exp()
        })
        .collect();
    let mass: f64 = amps.iter().map(|c| c.norm_sqr()).sum();
    let tail = tail_integral(n_max as f64 - nbar) / mass;
    if tail >= TAIL_TARGET {
        return Err(domain(format!("gaussian tail bound {tail:e} not certified")));
    }
    FockState::normalized(amps, tail)
}

fn build_bessel(lambda: f64, trunc: &Truncation) -> Result<FockState> {
    let l2 = lambda * lambda;
    let i0 = bessel_i(0, Complex64::new(2.0 * lambda, 0.0))?.re;
    // Probabilities p_n = lambda^{2n} / (n!)^2 / I0(2 lambda). Once the ratio
    // p_{n+1}/p_n = lambda^2/(n+1)^2 is below 1 the tail is bounded by a
    // geometric series.
    let mut amps = vec![Complex64::new(1.0, 0.0)];
    let mut weight = 1.0f64;
    let mut n = 0usize;
    let tail = loop {
        let next = weight * l2 / ((n + 1) as f64).powi(2);
        let ratio = l2 / ((n + 2) as f64).powi(2);
        if ratio < 1.0 {
            let bound = next / (1.0 - ratio) / i0;
            if bound < TAIL_TARGET {
                break bound;
            }
        }
        n += 1;
        trunc.check(n)?;
        let prev = amps[n - 1];
        amps.push(prev * Complex64::new(0.0, -lambda) / n as f64);
        weight = next;
    };
    FockState::normalized(amps, tail)
}

/// Squared magnitudes of the characteristic functions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CharMagnitudes {
    pub phi_sq: f64,
    pub phi_tilde_sq: f64,
    pub omega_sq: f64,
    pub pi_k: f64,
}

impl CharMagnitudes {
    pub fn of(cs: &FockCharSet) -> Self {
        Self {
            phi_sq: cs.phi.norm_sqr(),
            phi_tilde_sq: cs.phi_tilde.norm_sqr(),
            omega_sq: cs.omega.norm_sqr(),
            pi_k: cs.pi_k,
        }
    }

    pub fn u(&self) -> f64 {
        self.phi_sq + self.phi_tilde_sq
    }

    pub fn u_prime(&self) -> f64 {
        self.u() + self.omega_sq
    }

    pub fn v(&self) -> f64 {
        (self.phi_sq * self.phi_tilde_sq).sqrt()
    }
}

/// Closed-form characteristic functions of a family member.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ClosedForm {
    /// Exact values.
    Exact(FockCharSet),
    /// Continuum approximation, magnitudes only (Gaussian family).
    Magnitudes(CharMagnitudes),
    /// Leading-order values in an asymptotic regime (intermediate family).
    Asymptotic(FockCharSet),
}

/// Continuum Gaussian expressions with a real-valued `k`:
/// `|Phi|^2 = exp(-phi^2 / 4a)`, `|PhiT|^2 = exp(-(a^2 + b^2) k^2 / a)`,
/// `|Omega|^2 = |Phi|^2 |PhiT|^2 exp(b k phi / a)`, `Pi_k = 0`.
pub fn gaussian_continuum(a: f64, b: f64, k: f64, phi: f64) -> CharMagnitudes {
    let phi_sq = (-phi * phi / (4.0 * a)).exp();
    let phi_tilde_sq = (-(a * a + b * b) * k * k / a).exp();
    // Combined exponent; the product form underflows for large b.
    let omega_sq = (-phi * phi / (4.0 * a) - (a * a + b * b) * k * k / a + b * k * phi / a).exp();
    CharMagnitudes {
        phi_sq,
        phi_tilde_sq,
        omega_sq,
        pi_k: 0.0,
    }
}

/// Closed-form characteristic set for `(k, phi)`, or
/// [`Error::Unavailable`] outside the regime where the formulas hold.
pub fn closed_form_char(spec: &FamilySpec, k: usize, phi: f64) -> Result<ClosedForm> {
    spec.validate()?;
    if k == 0 {
        return Err(domain("k must be >= 1"));
    }
    let i = Complex64::new(0.0, 1.0);
    let cis = |x: f64| Complex64::from_polar(1.0, x);
    let kf = k as f64;
    match *spec {
        FamilySpec::Number { n } => Ok(ClosedForm::Exact(FockCharSet {
            phi: cis(phi * n as f64),
            phi_tilde: Complex64::new(0.0, 0.0),
            omega: Complex64::new(0.0, 0.0),
            pi_k: if n < k { 1.0 } else { 0.0 },
            k,
            phase_arg: phi,
        })),
        FamilySpec::PhaseCoherent { xi } => {
            let t = xi.norm_sqr();
            let phi_cf = Complex64::new(1.0 - t, 0.0) / (1.0 - cis(phi) * t);
            let phi_tilde = xi.conj().powu(k as u32);
            Ok(ClosedForm::Exact(FockCharSet {
                phi: phi_cf,
                phi_tilde,
                omega: cis(-kf * phi) * phi_tilde * phi_cf.conj(),
                pi_k: 1.0 - t.powi(k as i32),
                k,
                phase_arg: phi,
            }))
        }
        FamilySpec::Gaussian { nbar, a, b } => {
            if kf > nbar.sqrt() {
                return Err(Error::Unavailable(format!(
                    "gaussian closed form needs k <= sqrt(nbar) = {}",
                    nbar.sqrt()
                )));
            }
            Ok(ClosedForm::Magnitudes(gaussian_continuum(a, b, kf, phi)))
        }
        FamilySpec::Bessel { lambda } => {
            if k > crate::numerics::BESSEL_MAX_ORDER as usize {
                return Err(Error::Unavailable(format!("bessel closed form needs k <= 64, got {k}")));
            }
            let i0 = bessel_i(0, Complex64::new(2.0 * lambda, 0.0))?.re;
            let ik = bessel_i(k as u32, Complex64::new(2.0 * lambda, 0.0))?;
            let i_pow_k = i.powu(k as u32);
            let mut pi_k = 0.0;
            let mut w = 1.0;
            for n in 0..k {
                if n > 0 {
                    w *= lambda * lambda / (n * n) as f64;
                }
                pi_k += w;
            }
            Ok(ClosedForm::Exact(FockCharSet {
                phi: bessel_i(0, cis(phi / 2.0) * (2.0 * lambda))? / i0,
                phi_tilde: i_pow_k * ik / i0,
                omega: i_pow_k * cis(-kf * phi / 2.0) * bessel_i(k as u32, cis(-phi / 2.0) * (2.0 * lambda))?
                    / i0,
                pi_k: pi_k / i0,
                k,
                phase_arg: phi,
            }))
        }
        FamilySpec::Intermediate { alpha, beta, n, xi } => {
            if xi.norm() < 0.99 {
                return Err(Error::Unavailable(format!(
                    "intermediate closed form needs |xi| >= 0.99, got {}",
                    xi.norm()
                )));
            }
            Ok(ClosedForm::Asymptotic(FockCharSet {
                phi: cis(phi * n as f64) * alpha.norm_sqr(),
                phi_tilde: xi.conj().powu(k as u32) * beta.norm_sqr(),
                omega: Complex64::new(0.0, 0.0),
                pi_k: 0.0,
                k,
                phase_arg: phi,
            }))
        }
    }
}

/// Largest deviation between the numeric characteristic set of the built
/// state and the closed form.
///
/// Exact and asymptotic forms are compared by absolute difference of
/// `Phi, PhiT, Omega, Pi_k`. Gaussian magnitudes are compared relatively,
/// `|numeric - closed| / max(closed, MAGNITUDE_FLOOR)`, since the continuum
/// values fall below double-precision resolution in parts of the window.
pub fn oracle_check(spec: &FamilySpec, k: usize, phi: f64, trunc: &Truncation) -> Result<f64> {
    let closed = closed_form_char(spec, k, phi)?;
    let numeric = char_set(&build(spec, trunc)?, k, phi)?;
    Ok(match closed {
        ClosedForm::Exact(cf) | ClosedForm::Asymptotic(cf) => [
            (numeric.phi - cf.phi).norm(),
            (numeric.phi_tilde - cf.phi_tilde).norm(),
            (numeric.omega - cf.omega).norm(),
            (numeric.pi_k - cf.pi_k).abs(),
        ]
        .into_iter()
        .fold(0.0, f64::max),
        ClosedForm::Magnitudes(cf) => {
            let nm = CharMagnitudes::of(&numeric);
            let rel = |x: f64, y: f64| (x - y).abs() / y.max(MAGNITUDE_FLOOR);
            [
                rel(nm.phi_sq, cf.phi_sq),
                rel(nm.phi_tilde_sq, cf.phi_tilde_sq),
                rel(nm.omega_sq, cf.omega_sq),
                rel(nm.pi_k, cf.pi_k),
            ]
            .into_iter()
            .fold(0.0, f64::max)
        }
    })
}

// Textual form: `tag[:key=value(,key=value)*]`.

fn fmt_f64(x: f64) -> String {
    format!("{x}")
}

/// Moduli and arguments are recomputed from complex fields, so they are
/// printed at 15 significant digits to absorb the last-bit noise of
/// `sqrt`/`hypot`/`atan2`. Re-parsing the output reproduces it exactly.
fn fmt_derived(x: f64) -> String {
    let rounded: f64 = format!("{x:.14e}").parse().unwrap_or(x);
    format!("{rounded}")
}

impl fmt::Display for FamilySpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            FamilySpec::Number { n } => write!(f, "number:n={n}"),
            FamilySpec::PhaseCoherent { xi } => {
                write!(f, "phase-coherent:xi={}", fmt_derived(xi.norm()))?;
                if xi.arg() != 0.0 {
                    write!(f, ",arg={}", fmt_derived(xi.arg()))?;
                }
                Ok(())
            }
            FamilySpec::Gaussian { nbar, a, b } => write!(
                f,
                "gaussian:nbar={},a={},b={}",
                fmt_f64(nbar),
                fmt_f64(a),
                fmt_f64(b)
            ),
            FamilySpec::Bessel { lambda } => write!(f, "bessel:lambda={}", fmt_f64(lambda)),
            FamilySpec::Intermediate { alpha, beta, n, xi } => {
                write!(
                    f,
                    "intermediate:alpha2={},n={n},xi={}",
                    fmt_derived(alpha.norm_sqr()),
                    fmt_derived(xi.norm())
                )?;
                if xi.arg() != 0.0 {
                    write!(f, ",arg={}", fmt_derived(xi.arg()))?;
                }
                if alpha.arg() != 0.0 {
                    write!(f, ",alpha_arg={}", fmt_derived(alpha.arg()))?;
                }
                if beta.arg() != 0.0 {
                    write!(f, ",beta_arg={}", fmt_derived(beta.arg()))?;
                }
                Ok(())
            }
        }
    }
}

impl FromStr for FamilySpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let perr = |position: usize, message: String| Error::Parse { position, message };
        let (tag, rest, rest_offset) = match s.find(':') {
            Some(i) => (&s[..i], &s[i + 1..], i + 1),
            None => (s, "", s.len()),
        };

        let mut pairs: Vec<(usize, &str, f64)> = Vec::new();
        if !rest.is_empty() {
            let mut offset = rest_offset;
            for item in rest.split(',') {
                let Some(eq) = item.find('=') else {
                    return Err(perr(offset, format!("expected key=value, found '{item}'")));
                };
                let key = &item[..eq];
                let raw = &item[eq + 1..];
                let value: f64 = raw
                    .parse()
                    .map_err(|_| perr(offset + eq + 1, format!("'{raw}' is not a number")))?;
                if !value.is_finite() {
                    return Err(perr(offset + eq + 1, format!("'{raw}' is not finite")));
                }
                if pairs.iter().any(|(_, k, _)| *k == key) {
                    return Err(perr(offset, format!("duplicate key '{key}'")));
                }
                pairs.push((offset, key, value));
                offset += item.len() + 1;
            }
        }

        let allowed: &[&str] = match tag {
            "number" => &["n"],
            "phase-coherent" => &["xi", "arg"],
            "gaussian" => &["nbar", "a", "var", "b"],
            "bessel" => &["lambda"],
            "intermediate" => &["alpha2", "n", "xi", "arg", "alpha_arg", "beta_arg"],
            _ => {
                return Err(perr(
                    0,
                    format!(
                        "unknown family '{tag}' (expected number, phase-coherent, gaussian, bessel or intermediate)"
                    ),
                ))
            }
        };
        for (pos, key, _) in &pairs {
            if !allowed.contains(key) {
                return Err(perr(*pos, format!("unknown key '{key}' for family '{tag}'")));
            }
        }
        let get = |key: &str, default: f64| {
            pairs
                .iter()
                .find(|(_, k, _)| *k == key)
                .map(|(_, _, v)| *v)
                .unwrap_or(default)
        };
        let pos_of = |key: &str| {
            pairs
                .iter()
                .find(|(_, k, _)| *k == key)
                .map(|(p, _, _)| *p)
                .unwrap_or(0)
        };
        let int = |key: &str, default: f64| -> Result<usize> {
            integral(get(key, default), key).map_err(|e| perr(pos_of(key), e.to_string()))
        };

        let spec = match tag {
            "number" => FamilySpec::Number { n: int("n", 0.0)? },
            "phase-coherent" => FamilySpec::PhaseCoherent {
                xi: Complex64::from_polar(get("xi", 0.5), get("arg", 0.0)),
            },
            "gaussian" => {
                if pairs.iter().any(|(_, k, _)| *k == "a") && pairs.iter().any(|(_, k, _)| *k == "var") {
                    return Err(perr(pos_of("var"), "give either 'a' or 'var', not both".into()));
                }
                let a = if pairs.iter().any(|(_, k, _)| *k == "var") {
                    1.0 / (4.0 * get("var", 50.0))
                } else {
                    get("a", 0.005)
                };
                FamilySpec::Gaussian {
                    nbar: get("nbar", 400.0),
                    a,
                    b: get("b", 0.0),
                }
            }
            "bessel" => FamilySpec::Bessel {
                lambda: get("lambda", 1.0),
            },
            _ => {
                let alpha2 = get("alpha2", 0.5);
                if !(0.0..=1.0).contains(&alpha2) {
                    return Err(perr(pos_of("alpha2"), format!("alpha2 must lie in [0, 1], got {alpha2}")));
                }
                FamilySpec::Intermediate {
                    alpha: Complex64::from_polar(alpha2.sqrt(), get("alpha_arg", 0.0)),
                    beta: Complex64::from_polar((1.0 - alpha2).sqrt(), get("beta_arg", 0.0)),
                    n: int("n", 3.0)?,
                    xi: Complex64::from_polar(get("xi", 0.999), get("arg", 0.0)),
                }
            }
        };
        Ok(spec)
    }
}

impl Serialize for FamilySpec {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for FamilySpec {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}
