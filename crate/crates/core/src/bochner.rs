//! Discrete Bochner test: a state is classical only if the matrix
//! `M[l][k] = Phi(alpha_k - alpha_l)` is positive semidefinite for every
//! finite point set. A negative eigenvalue certifies nonclassicality.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::states::CharFn;

/// Default absolute eigenvalue tolerance for the verdict.
pub const DEFAULT_TOL: f64 = 1e-9;
/// Largest tolerated violation of `Phi(-beta) = Phi(beta)^*`.
pub const SYMMETRY_TOL: f64 = 1e-8;

/// A phase-space point in its JSON form `{"re": .., "im": ..}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub re: f64,
    pub im: f64,
}

impl From<Complex64> for Point {
    fn from(z: Complex64) -> Self {
        Point { re: z.re, im: z.im }
    }
}

impl From<Point> for Complex64 {
    fn from(p: Point) -> Self {
        Complex64::new(p.re, p.im)
    }
}

/// Parses a JSON array of `{"re": .., "im": ..}` objects.
pub fn parse_points(text: &str) -> Result<Vec<Complex64>> {
    let pts: Vec<Point> = serde_json::from_str(text)?;
    let pts: Vec<Complex64> = pts.into_iter().map(Complex64::from).collect();
    if pts.iter().any(|p| !(p.re.is_finite() && p.im.is_finite())) {
        return Err(Error::param("points", "coordinates must be finite"));
    }
    Ok(pts)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Nonclassical,
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Minor {
    pub indices: Vec<usize>,
    pub determinant: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BochnerReport {
    pub points: Vec<Point>,
    pub matrix: Vec<Vec<Point>>,
    pub min_eigenvalue: f64,
    pub verdict: Verdict,
    pub worst_minor: Minor,
}

fn check_points(points: &[Complex64]) -> Result<()> {
    if points.len() < 2 {
        return Err(Error::param("points", "need at least two points"));
    }
    for (i, p) in points.iter().enumerate() {
        if points[..i].contains(p) {
            return Err(Error::param("points", format!("duplicate point {p}")));
        }
    }
    Ok(())
}

/// Hermitian matrix with entry `(l, k) = Phi(alpha_k - alpha_l)`.
///
/// Both triangles are evaluated; a mismatch beyond [`SYMMETRY_TOL`] means a
/// broken characteristic function and is reported rather than averaged away.
pub fn build_bochner_matrix(phi: &CharFn, points: &[Complex64]) -> Result<DMatrix<Complex64>> {
    check_points(points)?;
    let n = points.len();
    let mut m = DMatrix::from_element(n, n, Complex64::new(0.0, 0.0));
    for l in 0..n {
        m[(l, l)] = Complex64::new(phi.eval(Complex64::new(0.0, 0.0))?.re, 0.0);
        for k in (l + 1)..n {
            let upper = phi.eval(points[k] - points[l])?;
            let lower = phi.eval(points[l] - points[k])?;
            let deviation = (upper - lower.conj()).norm();
            if deviation > SYMMETRY_TOL {
                return Err(Error::Symmetry { deviation });
            }
            let v = (upper + lower.conj()) * 0.5;
            m[(l, k)] = v;
            m[(k, l)] = v.conj();
        }
    }
    Ok(m)
}

pub fn min_eigenvalue(m: &DMatrix<Complex64>) -> f64 {
    m.clone()
        .symmetric_eigenvalues()
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min)
}

fn det_of(m: &DMatrix<Complex64>, idx: &[usize]) -> f64 {
    let sub = DMatrix::from_fn(idx.len(), idx.len(), |i, j| m[(idx[i], idx[j])]);
    sub.determinant().re
}

/// Most negative 2x2 principal minor, then the most negative 3x3 minor
/// extending it. Diagnostic only.
pub fn worst_minor(m: &DMatrix<Complex64>) -> Minor {
    let n = m.nrows();
    let mut best = Minor {
        indices: vec![0, 1],
        determinant: det_of(m, &[0, 1]),
    };
    for i in 0..n {
        for j in (i + 1)..n {
            let d = det_of(m, &[i, j]);
            if d < best.determinant {
                best = Minor {
                    indices: vec![i, j],
                    determinant: d,
                };
            }
        }
    }
    let pair = best.indices.clone();
    for k in (0..n).filter(|k| !pair.contains(k)) {
        let mut idx = vec![pair[0], pair[1], k];
        idx.sort_unstable();
        let d = det_of(m, &idx);
        if d < best.determinant {
            best = Minor {
                indices: idx,
                determinant: d,
            };
        }
    }
    best
}

/// Eigenvalue decision plus a minor for human consumption.
pub fn certify(phi: &CharFn, points: &[Complex64], tol: f64) -> Result<BochnerReport> {
    if !(tol > 0.0 && tol.is_finite()) {
        return Err(Error::param("tol", format!("must be > 0, got {tol}")));
    }
    let m = build_bochner_matrix(phi, points)?;
    let min_eigenvalue = min_eigenvalue(&m);
    let verdict = if min_eigenvalue < -tol {
        Verdict::Nonclassical
    } else {
        Verdict::Inconclusive
    };
    Ok(BochnerReport {
        points: points.iter().map(|&p| p.into()).collect(),
        matrix: (0..m.nrows())
            .map(|l| (0..m.ncols()).map(|k| m[(l, k)].into()).collect())
            .collect(),
        min_eigenvalue,
        verdict,
        worst_minor: worst_minor(&m),
    })
}

/// Radii in `[r_min, r_max]` (`steps` intervals, along the real axis) where
/// the pair determinant `1 - |Phi(r)|^2` is negative.
pub fn scan_pair_radius(
    phi: &CharFn,
    r_min: f64,
    r_max: f64,
    steps: usize,
) -> Result<Vec<(f64, f64)>> {
    if !(r_min > 0.0 && r_max > r_min && r_max.is_finite()) {
        return Err(Error::param(
            "radius",
            format!("need 0 < r_min < r_max, got [{r_min}, {r_max}]"),
        ));
    }
    if steps == 0 {
        return Err(Error::param("steps", "must be >= 1"));
    }
    let h = (r_max - r_min) / steps as f64;
    let mut out = Vec::new();
    for i in 0..=steps {
        let r = r_min + i as f64 * h;
        let det = 1.0 - phi.eval(Complex64::new(r, 0.0))?.norm_sqr();
        if det < 0.0 {
            out.push((r, det));
        }
    }
    Ok(out)
}
