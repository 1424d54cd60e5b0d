//! Numeric kernels shared by the rest of the crate.
//!
//! Two families of routines live here: modified Bessel functions of the
//! first kind `I_n(z)` for integer order and complex argument, evaluated
//! by their power series, and closed-form routines for 3x3 Hermitian
//! matrices (determinant and eigenvalues). Both are small enough that a
//! direct implementation with explicit error control is preferable to a
//! general-purpose library.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};

/// Largest Bessel order accepted by [`bessel_i`].
pub const BESSEL_MAX_ORDER: u32 = 64;
/// Largest argument modulus accepted by [`bessel_i`].
pub const BESSEL_MAX_ARG: f64 = 100.0;
const BESSEL_MAX_TERMS: usize = 500;

/// Modified Bessel function of the first kind `I_order(z)`.
///
/// Sums `(z/2)^(2m+order) / (m! (m+order)!)` until a term drops below
/// `1e-16 * (|partial sum| + 1e-300)`, capped at 500 terms. Accuracy is
/// limited by cancellation for arguments far from the positive real axis
/// (where the terms alternate); within `|z| <= 20` the loss stays at a few
/// ulps of the largest term.
pub fn bessel_i(order: u32, z: Complex64) -> Result<Complex64> {
    if order > BESSEL_MAX_ORDER {
        return Err(domain(format!(
            "bessel_i: order {order} exceeds the maximum {BESSEL_MAX_ORDER}"
        )));
    }
    if !(z.re.is_finite() && z.im.is_finite()) || z.norm() > BESSEL_MAX_ARG {
        return Err(domain(format!(
            "bessel_i: |z| = {} exceeds the maximum {BESSEL_MAX_ARG}",
            z.norm()
        )));
    }

    let half = z * 0.5;
    let half_sq = half * half;

    // (z/2)^order / order!
    let mut term = Complex64::new(1.0, 0.0);
    for j in 1..=order {
        term = term * half / f64::from(j);
    }
    let mut sum = term;
    for m in 1..BESSEL_MAX_TERMS {
        let m = m as f64;
        term = term * half_sq / (m * (m + f64::from(order)));
        sum += term;
        if term.norm() < 1e-16 * (sum.norm() + 1e-300) {
            break;
        }
    }
    Ok(sum)
}

/// A 3x3 Hermitian matrix.
///
/// Only the real diagonal and the three upper off-diagonal entries are
/// stored, so Hermitian symmetry holds by construction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Hermitian3 {
    diag: [f64; 3],
    /// Entries (0,1), (0,2), (1,2).
    upper: [Complex64; 3],
}

impl Hermitian3 {
    pub fn new(diag: [f64; 3], upper01: Complex64, upper02: Complex64, upper12: Complex64) -> Self {
        Self {
            diag,
            upper: [upper01, upper02, upper12],
        }
    }

    pub fn identity() -> Self {
        let zero = Complex64::new(0.0, 0.0);
        Self::new([1.0; 3], zero, zero, zero)
    }

    /// Gram matrix `G_ij = <v_i | v_j>` of three vectors.
    ///
    /// Vectors of different lengths are treated as zero-padded.
    pub fn gram(vectors: [&[Complex64]; 3]) -> Self {
        let inner = |a: &[Complex64], b: &[Complex64]| -> Complex64 {
            a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
        };
        let norm_sq = |a: &[Complex64]| -> f64 { a.iter().map(|x| x.norm_sqr()).sum() };
        Self::new(
            [
                norm_sq(vectors[0]),
                norm_sq(vectors[1]),
                norm_sq(vectors[2]),
            ],
            inner(vectors[0], vectors[1]),
            inner(vectors[0], vectors[2]),
            inner(vectors[1], vectors[2]),
        )
    }

    pub fn entry(&self, i: usize, j: usize) -> Complex64 {
        match (i, j) {
            (i, j) if i == j => Complex64::new(self.diag[i], 0.0),
            (0, 1) => self.upper[0],
            (0, 2) => self.upper[1],
            (1, 2) => self.upper[2],
            (1, 0) => self.upper[0].conj(),
            (2, 0) => self.upper[1].conj(),
            (2, 1) => self.upper[2].conj(),
            _ => panic!("Hermitian3 index ({i}, {j}) out of range"),
        }
    }

    fn dense(&self) -> [[Complex64; 3]; 3] {
        let mut m = [[Complex64::new(0.0, 0.0); 3]; 3];
        for (i, row) in m.iter_mut().enumerate() {
            for (j, x) in row.iter_mut().enumerate() {
                *x = self.entry(i, j);
            }
        }
        m
    }

    /// Frobenius norm.
    pub fn norm(&self) -> f64 {
        let off: f64 = self.upper.iter().map(|x| x.norm_sqr()).sum();
        let diag: f64 = self.diag.iter().map(|x| x * x).sum();
        (diag + 2.0 * off).sqrt()
    }

    /// Determinant by cofactor expansion along the first row.
    pub fn det(&self) -> f64 {
        let a = self.dense();
        let det = a[0][0] * (a[1][1] * a[2][2] - a[1][2] * a[2][1])
            - a[0][1] * (a[1][0] * a[2][2] - a[1][2] * a[2][0])
            + a[0][2] * (a[1][0] * a[2][1] - a[1][1] * a[2][0]);
        let scale = self.norm().max(1.0).powi(3);
        debug_assert!(
            det.im.abs() <= 1e-12 * scale,
            "Hermitian determinant has imaginary residue {}",
            det.im
        );
        det.re
    }

    /// All three eigenvalues in ascending order.
    ///
    /// The trigonometric solution of the characteristic cubic is only
    /// accurate to about `sqrt(eps)` near a double root, so the root with
    /// the largest gap is turned into an eigenvector, refined with a
    /// Rayleigh quotient, and the remaining pair is taken from the 2x2
    /// compression onto its orthogonal complement.
    pub fn eigenvalues(&self) -> [f64; 3] {
        let q = (self.diag[0] + self.diag[1] + self.diag[2]) / 3.0;
        let p1: f64 = self.upper.iter().map(|x| x.norm_sqr()).sum();
        let p2: f64 = self.diag.iter().map(|d| (d - q) * (d - q)).sum::<f64>() + 2.0 * p1;
        let scale = self.norm();
        if p2 <= (1e-300f64).max(scale * scale * 1e-32) {
            let mut d = self.diag;
            d.sort_by(f64::total_cmp);
            return d;
        }
        let p = (p2 / 6.0).sqrt();

        let shifted = Hermitian3::new(
            [
                (self.diag[0] - q) / p,
                (self.diag[1] - q) / p,
                (self.diag[2] - q) / p,
            ],
            self.upper[0] / p,
            self.upper[1] / p,
            self.upper[2] / p,
        );
        let r = (shifted.det() / 2.0).clamp(-1.0, 1.0);
        let phi = r.acos() / 3.0;
        let hi = q + 2.0 * p * phi.cos();
        let lo = q + 2.0 * p * (phi + 2.0 * PI / 3.0).cos();
        let mid = 3.0 * q - hi - lo;

        let separated = if hi - mid >= mid - lo { hi } else { lo };
        match self.deflate(separated) {
            Some(mut eig) => {
                eig.sort_by(f64::total_cmp);
                eig
            }
            None => [lo, mid, hi],
        }
    }

    /// Smallest eigenvalue; see [`Hermitian3::eigenvalues`].
    pub fn min_eig(&self) -> f64 {
        self.eigenvalues()[0]
    }

    fn deflate(&self, lambda: f64) -> Option<[f64; 3]> {
        let a = self.dense();
        let mut rows = a;
        for (i, row) in rows.iter_mut().enumerate() {
            row[i] -= lambda;
        }
        // A null vector of the (rank-2) shifted matrix is the bilinear cross
        // product of two of its rows.
        let candidates = [
            cross(rows[0], rows[1]),
            cross(rows[0], rows[2]),
            cross(rows[1], rows[2]),
        ];
        let v = candidates
            .into_iter()
            .max_by(|x, y| vnorm(x).total_cmp(&vnorm(y)))?;
        let nv = vnorm(&v);
        if !(nv > 0.0) || !nv.is_finite() {
            return None;
        }
        let v = scale(v, 1.0 / nv);

        // Unit vector orthogonal to v, started from the axis where v is smallest.
        let axis = (0..3)
            .min_by(|&i, &j| v[i].norm().total_cmp(&v[j].norm()))
            .unwrap_or(0);
        let mut u = [Complex64::new(0.0, 0.0); 3];
        u[axis] = Complex64::new(1.0, 0.0);
        let proj = v[axis].conj();
        for k in 0..3 {
            u[k] -= v[k] * proj;
        }
        let nu = vnorm(&u);
        let u = scale(u, 1.0 / nu);
        let x = cross(v, u);
        let w = [x[0].conj(), x[1].conj(), x[2].conj()];

        let rayleigh = |x: &[Complex64; 3], y: &[Complex64; 3]| -> Complex64 {
            let mut acc = Complex64::new(0.0, 0.0);
            for i in 0..3 {
                for j in 0..3 {
                    acc += x[i].conj() * a[i][j] * y[j];
                }
            }
            acc
        };
        let lv = rayleigh(&v, &v).re;
        let auu = rayleigh(&u, &u).re;
        let aww = rayleigh(&w, &w).re;
        let auw = rayleigh(&u, &w);
        let mean = 0.5 * (auu + aww);
        let rad = (0.25 * (auu - aww) * (auu - aww) + auw.norm_sqr()).sqrt();
        Some([lv, mean - rad, mean + rad])
    }
}

fn cross(a: [Complex64; 3], b: [Complex64; 3]) -> [Complex64; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

fn vnorm(v: &[Complex64; 3]) -> f64 {
    v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}

fn scale(v: [Complex64; 3], s: f64) -> [Complex64; 3] {
    [v[0] * s, v[1] * s, v[2] * s]
}

/// Determinant of a 3x3 Hermitian matrix.
pub fn det3(g: &Hermitian3) -> f64 {
    g.det()
}

/// Smallest eigenvalue of a 3x3 Hermitian matrix.
pub fn min_eig3(g: &Hermitian3) -> f64 {
    g.min_eig()
}
