//! Parameter scans, extremum search and the four figure datasets.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::families::{build, FamilySpec, Truncation};
use crate::fock::{char_set, mean_photon, report_from_chars};
use crate::relations::BOUND_TOL;

/// Points of the coarse grid used to bracket an extremum.
pub const COARSE_POINTS: usize = 64;
/// Parameter tolerance of the golden-section refinement.
pub const PARAM_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Spacing {
    #[default]
    Linear,
    Log,
}

/// A one-parameter grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sweep {
    pub param: String,
    pub lo: f64,
    pub hi: f64,
    pub steps: usize,
    pub spacing: Spacing,
}

impl Sweep {
    pub fn linear(param: &str, lo: f64, hi: f64, steps: usize) -> Self {
        Self {
            param: param.to_string(),
            lo,
            hi,
            steps,
            spacing: Spacing::Linear,
        }
    }

    pub fn log(param: &str, lo: f64, hi: f64, steps: usize) -> Self {
        Self {
            spacing: Spacing::Log,
            ..Self::linear(param, lo, hi, steps)
        }
    }

    /// Grid points, strictly ascending, with both endpoints exact.
    pub fn points(&self) -> Result<Vec<f64>> {
        if self.steps < 2 {
            return Err(domain(format!("steps must be >= 2, got {}", self.steps)));
        }
        if !(self.lo < self.hi) || !self.lo.is_finite() || !self.hi.is_finite() {
            return Err(domain(format!("need lo < hi, got [{}, {}]", self.lo, self.hi)));
        }
        let last = (self.steps - 1) as f64;
        let pts: Vec<f64> = match self.spacing {
            Spacing::Linear => (0..self.steps)
                .map(|i| self.lo + (self.hi - self.lo) * (i as f64 / last))
                .collect(),
            Spacing::Log => {
                if self.lo <= 0.0 {
                    return Err(domain("log spacing needs lo > 0"));
                }
                let (a, b) = (self.lo.ln(), self.hi.ln());
                (0..self.steps)
                    .map(|i| (a + (b - a) * (i as f64 / last)).exp())
                    .collect()
            }
        };
        let mut pts = pts;
        pts[0] = self.lo;
        pts[self.steps - 1] = self.hi;
        if pts.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(domain("grid is not strictly ascending at double precision"));
        }
        Ok(pts)
    }
}

/// One grid point of a scan.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScanRow {
    pub param: f64,
    pub u: f64,
    pub u_prime: f64,
    pub u_double_prime: f64,
    pub v: f64,
    pub abs_phi: f64,
    pub abs_phi_tilde: f64,
    pub abs_omega: f64,
    pub pi_k: f64,
    pub nbar: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanTable {
    pub family: FamilySpec,
    pub swept_parameter: String,
    pub spacing: Spacing,
    pub k: usize,
    pub phi: f64,
    /// Whether `k phi = pi`, i.e. whether the bounds apply to every row.
    pub bounded: bool,
    pub rows: Vec<ScanRow>,
}

impl ScanTable {
    /// Rows breaking `U, U', U'' <= 1` or `V <= 1/2` (only when `bounded`).
    pub fn bound_violations(&self) -> Vec<(f64, String)> {
        if !self.bounded {
            return Vec::new();
        }
        let mut out = Vec::new();
        for r in &self.rows {
            for (name, x, b) in [
                ("U", r.u, 1.0),
                ("U'", r.u_prime, 1.0),
                ("U''", r.u_double_prime, 1.0),
                ("V", r.v, 0.5),
            ] {
                if x > b + BOUND_TOL {
                    out.push((r.param, format!("{name} = {x} > {b}")));
                }
            }
        }
        out
    }

    /// Row with the smallest or largest value of `functional`.
    pub fn extreme_row(&self, functional: Functional, kind: ExtremumKind) -> Option<&ScanRow> {
        let better = |a: f64, b: f64| match kind {
            ExtremumKind::Min => a < b,
            ExtremumKind::Max => a > b,
        };
        let mut best: Option<&ScanRow> = None;
        for r in &self.rows {
            if best.is_none_or(|b| better(functional.of(r), functional.of(b))) {
                best = Some(r);
            }
        }
        best
    }

    /// Row whose parameter is closest to `x`.
    pub fn nearest_row(&self, x: f64) -> Option<&ScanRow> {
        self.rows
            .iter()
            .min_by(|a, b| (a.param - x).abs().total_cmp(&(b.param - x).abs()))
    }
}

/// Evaluates one family member at `(k, phi)`.
pub fn evaluate(spec: &FamilySpec, k: usize, phi: f64, trunc: &Truncation) -> Result<ScanRow> {
    let state = build(spec, trunc)?;
    let cs = char_set(&state, k, phi)?;
    let r = report_from_chars(&cs);
    Ok(ScanRow {
        param: f64::NAN,
        u: r.u,
        u_prime: r.u_prime.unwrap_or(f64::NAN),
        u_double_prime: r.u_double_prime.unwrap_or(f64::NAN),
        v: r.v,
        abs_phi: cs.phi.norm(),
        abs_phi_tilde: cs.phi_tilde.norm(),
        abs_omega: cs.omega.norm(),
        pi_k: cs.pi_k,
        nbar: mean_photon(&state),
    })
}

fn evaluate_at(
    template: &FamilySpec,
    param: &str,
    x: f64,
    k: usize,
    phi: f64,
    trunc: &Truncation,
) -> Result<ScanRow> {
    let wrap = |e: Error| Error::ScanPoint {
        param: param.to_string(),
        value: x,
        source: Box::new(e),
    };
    let spec = template.with_param(param, x, k).map_err(|e| match e {
        Error::Unknown { .. } => e,
        other => wrap(other),
    })?;
    let mut row = evaluate(&spec, k, phi, trunc).map_err(wrap)?;
    row.param = x;
    Ok(row)
}

/// Evaluates every grid point of `sweep`. Any failing point aborts the scan
/// and reports its parameter value.
pub fn scan(
    template: &FamilySpec,
    sweep: &Sweep,
    k: usize,
    phi: f64,
    trunc: &Truncation,
) -> Result<ScanTable> {
    let points = sweep.points()?;
    let rows = points
        .iter()
        .map(|&x| evaluate_at(template, &sweep.param, x, k, phi, trunc))
        .collect::<Result<Vec<_>>>()?;
    Ok(ScanTable {
        family: *template,
        swept_parameter: sweep.param.clone(),
        spacing: sweep.spacing,
        k,
        phi,
        bounded: crate::fock::is_applicable(k, phi),
        rows,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Functional {
    U,
    Uprime,
    Udoubleprime,
    V,
}

impl Functional {
    pub fn of(&self, row: &ScanRow) -> f64 {
        match self {
            Functional::U => row.u,
            Functional::Uprime => row.u_prime,
            Functional::Udoubleprime => row.u_double_prime,
            Functional::V => row.v,
        }
    }
}

impl fmt::Display for Functional {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Functional::U => "U",
            Functional::Uprime => "Uprime",
            Functional::Udoubleprime => "Udoubleprime",
            Functional::V => "V",
        })
    }
}

impl FromStr for Functional {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "U" => Ok(Functional::U),
            "Uprime" => Ok(Functional::Uprime),
            "Udoubleprime" => Ok(Functional::Udoubleprime),
            "V" => Ok(Functional::V),
            _ => Err(Error::Unknown {
                kind: "functional",
                name: s.to_string(),
            }),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ExtremumKind {
    Min,
    Max,
}

impl FromStr for ExtremumKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "min" => Ok(ExtremumKind::Min),
            "max" => Ok(ExtremumKind::Max),
            _ => Err(Error::Unknown {
                kind: "extremum kind",
                name: s.to_string(),
            }),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExtremumResult {
    pub param: f64,
    pub value: f64,
    pub kind: ExtremumKind,
    pub functional: String,
    /// Search interval handed to the caller.
    pub bracket: (f64, f64),
    /// Golden-section iterations after the coarse grid.
    pub iterations: usize,
    /// The extremum sits on an end of `bracket`.
    pub at_boundary: bool,
    /// Mean photon number of the extremal state, when a state exists.
    pub nbar: Option<f64>,
}

/// Minimizes a unimodal `f` on `[lo, hi]` down to an interval of width `tol`.
/// Returns `(x, f(x), iterations)`.
pub fn golden_section<F>(mut f: F, lo: f64, hi: f64, tol: f64) -> Result<(f64, f64, usize)>
where
    F: FnMut(f64) -> Result<f64>,
{
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = (lo, hi);
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let mut fc = f(c)?;
    let mut fd = f(d)?;
    let mut iterations = 0;
    while (b - a).abs() > tol {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d)?;
        }
        iterations += 1;
    }
    let x = 0.5 * (a + b);
    Ok((x, f(x)?, iterations))
}

/// Coarse grid followed by golden-section refinement for an arbitrary
/// function of one variable. The caller vouches for unimodality near the
/// coarse optimum.
pub fn find_extremum_by<F>(
    mut f: F,
    kind: ExtremumKind,
    lo: f64,
    hi: f64,
) -> Result<(f64, f64, usize, bool)>
where
    F: FnMut(f64) -> Result<f64>,
{
    let grid = Sweep::linear("x", lo, hi, COARSE_POINTS).points()?;
    let sign = match kind {
        ExtremumKind::Min => 1.0,
        ExtremumKind::Max => -1.0,
    };
    let mut best = (0usize, f64::INFINITY);
    for (i, &x) in grid.iter().enumerate() {
        let y = sign * f(x)?;
        if y < best.1 {
            best = (i, y);
        }
    }
    let i = best.0;
    let a = grid[i.saturating_sub(1)];
    let b = grid[(i + 1).min(grid.len() - 1)];
    let (x, y, iterations) = golden_section(|x| Ok(sign * f(x)?), a, b, PARAM_TOL)?;
    // The refinement never leaves the coarse cell, but a grid point may
    // still be better when the function is flat or sits on an edge.
    let (x, y) = if best.1 < y { (grid[i], best.1) } else { (x, y) };
    let at_boundary = (x - lo).abs() <= PARAM_TOL || (hi - x).abs() <= PARAM_TOL;
    Ok((x, sign * y, iterations, at_boundary))
}

/// Locates the minimum or maximum of `functional` along `param`.
#[allow(clippy::too_many_arguments)]
pub fn find_extremum(
    template: &FamilySpec,
    param: &str,
    functional: Functional,
    kind: ExtremumKind,
    bracket: (f64, f64),
    k: usize,
    phi: f64,
    trunc: &Truncation,
) -> Result<ExtremumResult> {
    let eval = |x: f64| evaluate_at(template, param, x, k, phi, trunc);
    let (x, _, iterations, at_boundary) =
        find_extremum_by(|x| Ok(functional.of(&eval(x)?)), kind, bracket.0, bracket.1)?;
    let row = eval(x)?;
    Ok(ExtremumResult {
        param: x,
        value: functional.of(&row),
        kind,
        functional: functional.to_string(),
        bracket,
        iterations,
        at_boundary,
        nbar: Some(row.nbar),
    })
}

/// Fixed configuration behind one figure.
#[derive(Debug, Clone, PartialEq)]
pub struct FigureConfig {
    pub id: u8,
    pub template: FamilySpec,
    pub sweep: Sweep,
    pub k: usize,
    pub phi: f64,
    pub columns: &'static [&'static str],
    pub note: &'static str,
}

/// The grid and family for figure `id`.
pub fn figure_config(id: u8) -> Result<FigureConfig> {
    let parse = |s: &str| s.parse::<FamilySpec>();
    Ok(match id {
        1 => FigureConfig {
            id,
            template: parse("phase-coherent:xi=0.5")?,
            sweep: Sweep::linear("xi", 0.01, 0.995, 256),
            k: 1,
            phi: PI,
            columns: &["U", "Uprime", "Udoubleprime", "V"],
            note: "phase-coherent states against |xi|, k = 1, phi = pi",
        },
        2 => FigureConfig {
            id,
            template: parse("gaussian:nbar=400,a=0.01,b=0")?,
            sweep: Sweep::log("akk", 0.05, 20.0, 128),
            k: 16,
            phi: PI / 16.0,
            columns: &["U", "Uprime"],
            note: "gaussian states with b = 0 against a k^2, realized at nbar = 400, k = 16, \
                   phi = pi/16 so the lattice sums follow the continuum expressions",
        },
        3 => FigureConfig {
            id,
            template: parse("gaussian:nbar=100,var=10,b=0")?,
            sweep: Sweep::linear("b", -0.5, 2.5, 241),
            k: 1,
            phi: PI,
            columns: &["U", "Uprime"],
            note: "gaussian states with number variance 10 (a = 1/40), nbar = 100, against b",
        },
        4 => FigureConfig {
            id,
            template: parse("bessel:lambda=1")?,
            sweep: Sweep::linear("lambda", 0.1, 3.0, 256),
            k: 1,
            phi: PI,
            columns: &["U", "Uprime"],
            note: "bessel eigenstates against lambda, k = 1, phi = pi",
        },
        _ => {
            return Err(Error::Unknown {
                kind: "figure",
                name: id.to_string(),
            })
        }
    })
}

/// Computes the dataset behind figure `id` (1 to 4).
pub fn figure_dataset(id: u8, trunc: &Truncation) -> Result<ScanTable> {
    let cfg = figure_config(id)?;
    scan(&cfg.template, &cfg.sweep, cfg.k, cfg.phi, trunc)
}
