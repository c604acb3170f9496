use nalgebra::DMatrix;
use num_complex::Complex64;

use super::spec::StateSpec;
use crate::error::{Error, Result};
use crate::special::{assoc_laguerre_log_seq, ln_factorials};

pub type CMatrix = DMatrix<Complex64>;

/// Default Fock truncation.
pub const DEFAULT_DIM: usize = 64;
/// Largest probability mass a truncated representation may drop.
pub const TAIL_TOL: f64 = 1e-10;

const HERMITIAN_TOL: f64 = 1e-12;
const PSD_TOL: f64 = 1e-10;

/// A state in the truncated Fock basis `|0>, ..., |dim-1>`.
///
/// `tail_mass` is the probability that the truncation discarded, so the
/// trace equals `1 - tail_mass` up to rounding.
#[derive(Debug, Clone)]
pub struct DensityMatrix {
    entries: CMatrix,
    tail_mass: f64,
}

impl DensityMatrix {
    /// Validates Hermiticity, trace and positivity.
    pub fn new(entries: CMatrix, tail_tol: f64) -> Result<Self> {
        let dim = entries.nrows();
        if dim == 0 || entries.ncols() != dim {
            return Err(Error::InvalidDensityMatrix(format!(
                "expected a nonempty square matrix, got {}x{}",
                entries.nrows(),
                entries.ncols()
            )));
        }
        for i in 0..dim {
            for j in 0..=i {
                let d = (entries[(i, j)] - entries[(j, i)].conj()).norm();
                if d > HERMITIAN_TOL {
                    return Err(Error::InvalidDensityMatrix(format!(
                        "not Hermitian at ({i}, {j}): deviation {d:e}"
                    )));
                }
            }
        }
        let trace = entries.trace();
        if trace.im.abs() > HERMITIAN_TOL || trace.re > 1.0 + 1e-12 || trace.re < 1.0 - tail_tol {
            return Err(Error::InvalidDensityMatrix(format!(
                "trace {trace} outside [1 - {tail_tol:e}, 1]"
            )));
        }
        let dm = DensityMatrix {
            tail_mass: (1.0 - trace.re).max(0.0),
            entries,
        };
        let min_eig = dm.min_eigenvalue();
        if min_eig < -PSD_TOL {
            return Err(Error::InvalidDensityMatrix(format!(
                "smallest eigenvalue {min_eig:e} is negative"
            )));
        }
        Ok(dm)
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn entries(&self) -> &CMatrix {
        &self.entries
    }

    pub fn tail_mass(&self) -> f64 {
        self.tail_mass
    }

    pub fn trace(&self) -> f64 {
        self.entries.trace().re
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.entries
            .clone()
            .symmetric_eigenvalues()
            .iter()
            .cloned()
            .fold(f64::INFINITY, f64::min)
    }

    /// Photon-number populations `<n|rho|n>`.
    pub fn populations(&self) -> Vec<f64> {
        (0..self.dim()).map(|n| self.entries[(n, n)].re).collect()
    }

    pub fn mean_photons(&self) -> f64 {
        self.populations()
            .iter()
            .enumerate()
            .map(|(n, p)| n as f64 * p)
            .sum()
    }

    /// `<a> = sum_n sqrt(n) rho_{n, n-1}`... i.e. `Tr(rho a)`.
    pub fn mean_amplitude(&self) -> Complex64 {
        (1..self.dim())
            .map(|n| self.entries[(n, n - 1)] * (n as f64).sqrt())
            .sum()
    }
}

/// Builds `spec` in a `dim`-dimensional Fock space with the default tail tolerance.
pub fn build_density_matrix(spec: &StateSpec, dim: usize) -> Result<DensityMatrix> {
    build_density_matrix_with_tol(spec, dim, TAIL_TOL)
}

pub fn build_density_matrix_with_tol(
    spec: &StateSpec,
    dim: usize,
    tail_tol: f64,
) -> Result<DensityMatrix> {
    if dim == 0 {
        return Err(Error::param("dim", "must be at least 1"));
    }
    spec.validate()?;
    let lnf = ln_factorials(dim);
    let (entries, tail_mass) = raw_matrix(spec, dim, &lnf);
    if tail_mass >= tail_tol {
        return Err(Error::Truncation {
            dim,
            tail_mass,
            tolerance: tail_tol,
        });
    }
    DensityMatrix::new(entries, tail_tol)
}

fn raw_matrix(spec: &StateSpec, dim: usize, lnf: &[f64]) -> (CMatrix, f64) {
    match spec {
        StateSpec::Fock { n } => {
            let n = *n as usize;
            let mut m = CMatrix::zeros(dim, dim);
            if n < dim {
                m[(n, n)] = Complex64::new(1.0, 0.0);
                (m, 0.0)
            } else {
                (m, 1.0)
            }
        }
        StateSpec::Coherent { amplitude } => {
            let amps = coherent_amplitudes(*amplitude, dim, lnf);
            let m = CMatrix::from_fn(dim, dim, |i, j| amps[i] * amps[j].conj());
            (m, poisson_tail(amplitude.norm_sqr(), dim))
        }
        StateSpec::Thermal { mean_photons } => {
            let q = mean_photons / (1.0 + mean_photons);
            let mut m = CMatrix::zeros(dim, dim);
            for n in 0..dim {
                m[(n, n)] = Complex64::new(q.powi(n as i32) / (1.0 + mean_photons), 0.0);
            }
            (m, q.powi(dim as i32))
        }
        StateSpec::Mixture(cs) => {
            let mut m = CMatrix::zeros(dim, dim);
            let mut tail = 0.0;
            for c in cs {
                let (cm, ct) = raw_matrix(&c.state, dim, lnf);
                m += cm * Complex64::new(c.weight, 0.0);
                tail += c.weight * ct;
            }
            (m, tail)
        }
    }
}

/// `<m|gamma> = exp(-|gamma|^2/2) gamma^m / sqrt(m!)` for `m < dim`.
pub(crate) fn coherent_amplitudes(gamma: Complex64, dim: usize, lnf: &[f64]) -> Vec<Complex64> {
    let r2 = gamma.norm_sqr();
    if r2 == 0.0 {
        let mut v = vec![Complex64::new(0.0, 0.0); dim];
        v[0] = Complex64::new(1.0, 0.0);
        return v;
    }
    let (r, theta) = gamma.to_polar();
    (0..dim)
        .map(|m| {
            let ln_mag = -r2 / 2.0 + m as f64 * r.ln() - lnf[m] / 2.0;
            Complex64::from_polar(ln_mag.exp(), m as f64 * theta)
        })
        .collect()
}

/// Poisson probability mass at `n >= dim` for mean `mu`.
fn poisson_tail(mu: f64, dim: usize) -> f64 {
    if mu == 0.0 {
        return 0.0;
    }
    // Sum the upper tail directly; terms decay once n > mu.
    let mut ln_term = -mu + dim as f64 * mu.ln() - ln_factorials(dim)[dim];
    let mut tail = 0.0;
    let mut n = dim;
    loop {
        let t = ln_term.exp();
        tail += t;
        n += 1;
        ln_term += mu.ln() - (n as f64).ln();
        if (n as f64 > mu && t < tail * 1e-17) || n > dim + 100_000 {
            break;
        }
    }
    tail
}

/// Matrix elements `<m|D(beta)|n>` of the displacement operator
/// `D(beta) = exp(beta a^dagger - beta^* a)` for `m, n < dim`.
///
/// Uses the associated-Laguerre closed form with all factorials and powers
/// carried as logarithms, so the entries are exact (not a truncated
/// exponential) and stay finite for large occupations.
pub fn displacement_matrix(beta: Complex64, dim: usize) -> CMatrix {
    let mut d = CMatrix::zeros(dim, dim);
    if beta.norm_sqr() == 0.0 {
        d.fill_with_identity();
        return d;
    }
    let x = beta.norm_sqr();
    let (r, theta) = beta.to_polar();
    let ln_r = r.ln();
    let lnf = ln_factorials(dim);
    for k in 0..dim {
        let lag = assoc_laguerre_log_seq(k, x, dim - k);
        for (lo, &(ln_l, sign)) in lag.iter().enumerate() {
            if sign == 0.0 {
                continue;
            }
            let hi = lo + k;
            let ln_mag = 0.5 * (lnf[lo] - lnf[hi]) + k as f64 * ln_r - x / 2.0 + ln_l;
            let mag = sign * ln_mag.exp();
            let phase = k as f64 * theta;
            // <hi|D|lo> carries beta^k, <lo|D|hi> carries (-beta^*)^k.
            d[(hi, lo)] = Complex64::from_polar(mag, phase);
            if k > 0 {
                let s = if k % 2 == 0 { 1.0 } else { -1.0 };
                d[(lo, hi)] = Complex64::from_polar(s * mag, -phase);
            }
        }
    }
    d
}

/// Largest `|beta|^2` for which `exp(|beta|^2/2) Tr(rho D(beta))` keeps an
/// absolute rounding error below about 1e-6.
pub fn char_fn_guard(dim: usize) -> f64 {
    2.0 * (1e-6 / (f64::EPSILON * dim as f64)).ln()
}

/// `Phi(beta) = exp(|beta|^2/2) Tr(rho D(beta))`, the normally ordered
/// characteristic function of a Fock-basis state.
pub fn char_fn_from_dm(dm: &DensityMatrix, beta: Complex64) -> Result<Complex64> {
    let dim = dm.dim();
    let x = beta.norm_sqr();
    let limit = char_fn_guard(dim);
    if !(x <= limit) {
        return Err(Error::Overflow {
            beta_sq: x,
            limit,
            dim,
        });
    }
    let d = displacement_matrix(beta, dim);
    let rho = dm.entries();
    let mut tr = Complex64::new(0.0, 0.0);
    for m in 0..dim {
        for n in 0..dim {
            tr += rho[(n, m)] * d[(m, n)];
        }
    }
    Ok(tr * (x / 2.0).exp())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn fock_one_is_basis_projector() {
        let dm = build_density_matrix(&StateSpec::fock(1), 4).unwrap();
        for i in 0..4 {
            for j in 0..4 {
                let e = if i == 1 && j == 1 { 1.0 } else { 0.0 };
                assert_eq!(dm.entries()[(i, j)], c(e, 0.0));
            }
        }
    }

    #[test]
    fn thermal_is_geometric() {
        let dm = build_density_matrix(&StateSpec::thermal(1.0), 64).unwrap();
        for n in 0..20 {
            assert!((dm.entries()[(n, n)].re - 0.5f64.powi(n as i32 + 1)).abs() < 1e-15);
        }
        assert!(dm.tail_mass() < TAIL_TOL);
    }

    #[test]
    fn zero_coherent_is_vacuum() {
        let dm = build_density_matrix(&StateSpec::coherent(0.0, 0.0), 5).unwrap();
        assert_eq!(dm.entries()[(0, 0)], c(1.0, 0.0));
        assert!((dm.trace() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn truncation_reports_tail() {
        match build_density_matrix(&StateSpec::thermal(2.0), 10) {
            Err(Error::Truncation { tail_mass, .. }) => {
                assert!((tail_mass - (2.0f64 / 3.0).powi(10)).abs() < 1e-15)
            }
            other => panic!("expected truncation error, got {other:?}"),
        }
        assert!(build_density_matrix(&StateSpec::fock(5), 5).is_err());
        assert!(build_density_matrix(&StateSpec::fock(0), 0).is_err());
    }

    #[test]
    fn rejects_non_hermitian() {
        let mut m = CMatrix::zeros(2, 2);
        m[(0, 0)] = c(0.5, 0.0);
        m[(1, 1)] = c(0.5, 0.0);
        m[(0, 1)] = c(0.1, 0.0);
        assert!(DensityMatrix::new(m, TAIL_TOL).is_err());
    }

    #[test]
    fn rejects_negative_eigenvalue() {
        let mut m = CMatrix::zeros(2, 2);
        m[(0, 0)] = c(0.5, 0.0);
        m[(1, 1)] = c(0.5, 0.0);
        m[(0, 1)] = c(0.8, 0.0);
        m[(1, 0)] = c(0.8, 0.0);
        assert!(DensityMatrix::new(m, TAIL_TOL).is_err());
    }

    #[test]
    fn displacement_at_zero_is_identity() {
        let d = displacement_matrix(c(0.0, 0.0), 6);
        assert_eq!(d, CMatrix::identity(6, 6));
    }

    #[test]
    fn vacuum_overlap() {
        let d = displacement_matrix(c(1.0, 0.0), 8);
        assert!((d[(0, 0)].re - 0.606_530_659_712_633_4).abs() < 1e-15);
    }

    #[test]
    fn first_column_is_coherent_state() {
        // brute-force series: exp(-|b|^2/2) b^m / sqrt(m!)
        let beta = c(0.7, -1.1);
        let d = displacement_matrix(beta, 20);
        let mut fact = 1.0;
        for m in 0..20 {
            if m > 0 {
                fact *= m as f64;
            }
            let expect = (-beta.norm_sqr() / 2.0).exp() * beta.powu(m as u32) / fact.sqrt();
            assert!((d[(m, 0)] - expect).norm() < 1e-13, "m={m}");
        }
    }

    #[test]
    fn unitary_on_low_occupations() {
        // Below dim 128 the image of |dim/2> under |beta| = 2 leaks past the
        // truncation at the 1e-4 level, so the check starts there.
        for (dim, beta) in [(128, c(1.3, 0.4)), (128, c(-2.0, 0.0)), (256, c(0.5, 1.9))] {
            let d = displacement_matrix(beta, dim);
            let g = d.adjoint() * &d;
            for i in 0..dim / 2 {
                for j in 0..dim / 2 {
                    let e = if i == j { 1.0 } else { 0.0 };
                    assert!((g[(i, j)] - c(e, 0.0)).norm() < 1e-8, "({i},{j})");
                }
            }
        }
    }

    #[test]
    fn displacement_inverse_is_adjoint() {
        // <m|D(-b)|n> = conj(<n|D(b)|m>)
        let b = c(0.8, 0.3);
        let d = displacement_matrix(b, 12);
        let dm = displacement_matrix(-b, 12);
        assert!((dm - d.adjoint()).norm() < 1e-13);
    }

    #[test]
    fn fock_char_fn_from_dm() {
        let dm = build_density_matrix(&StateSpec::fock(1), 8).unwrap();
        let v = char_fn_from_dm(&dm, c(1.5, 0.0)).unwrap();
        assert!((v - c(-1.25, 0.0)).norm() < 1e-8);
        assert!((char_fn_from_dm(&dm, c(0.0, 0.0)).unwrap() - c(1.0, 0.0)).norm() < 1e-15);
        let vac = build_density_matrix(&StateSpec::vacuum(), 8).unwrap();
        assert!((char_fn_from_dm(&vac, c(1.0, 0.0)).unwrap() - c(1.0, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn overflow_guard() {
        let dm = build_density_matrix(&StateSpec::vacuum(), 8).unwrap();
        assert!(matches!(
            char_fn_from_dm(&dm, c(10.0, 0.0)),
            Err(Error::Overflow { .. })
        ));
    }
}
