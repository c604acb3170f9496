//! Polar-grid Fourier quadrature of a characteristic function.
//!
//! `P(alpha, s) = pi^-2 \int d^2 beta Phi(beta) exp(-(1-s)|beta|^2/2) exp(alpha beta^* - alpha^* beta)`
//!
//! Trapezoid rule in angle, composite Gauss-Legendre in radius with panel
//! doubling until two successive estimates agree.

use std::f64::consts::PI;

use num_complex::Complex64;

use super::charfn::CharFn;
use super::density::char_fn_guard;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy)]
pub struct QuadratureOptions {
    pub angles: usize,
    pub tolerance: f64,
    pub max_panels: usize,
}

impl Default for QuadratureOptions {
    fn default() -> Self {
        QuadratureOptions {
            angles: 256,
            tolerance: 1e-12,
            max_panels: 512,
        }
    }
}

const GL_ORDER: usize = 16;
/// Gaussian damping below which the integrand is dropped.
const DAMPING_CUTOFF: f64 = 1e-14;

/// Gauss-Legendre nodes and weights on [-1, 1].
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

/// s-parameterized distribution of `phi` by direct numerical Fourier
/// inversion, touching `phi` only through `eval`.
pub fn s_distribution_quadrature(phi: &CharFn, alpha: Complex64, s: f64) -> Result<f64> {
    s_distribution_quadrature_with(phi, alpha, s, QuadratureOptions::default())
}

pub fn s_distribution_quadrature_with(
    phi: &CharFn,
    alpha: Complex64,
    s: f64,
    opts: QuadratureOptions,
) -> Result<f64> {
    let smoothing = (1.0 - s) / 2.0;
    let decay = smoothing + phi.damping();
    if !(decay > 0.0) {
        return Err(Error::Singular { s, width: decay });
    }
    // Fock-basis sources can only be evaluated inside their overflow guard.
    let max_radius = phi
        .density_matrix()
        .map(|dm| char_fn_guard(dm.dim()).sqrt() / phi.scale() * (1.0 - 1e-9));
    fourier_invert(|b| phi.eval(b), smoothing, decay, max_radius, alpha, opts)
}

/// `pi^-2 \int d^2 beta f(beta) exp(-smoothing |beta|^2) exp(alpha beta^* - c.c.)`.
/// `decay` is the Gaussian rate that dominates `f` at large radius;
/// `max_radius` caps the integration disk when `f` cannot be evaluated
/// beyond it, in which case the integrand must already be negligible there.
pub fn fourier_invert<F>(
    f: F,
    smoothing: f64,
    decay: f64,
    max_radius: Option<f64>,
    alpha: Complex64,
    opts: QuadratureOptions,
) -> Result<f64>
where
    F: Fn(Complex64) -> Result<Complex64>,
{
    let dirs: Vec<Complex64> = (0..opts.angles)
        .map(|j| Complex64::from_polar(1.0, 2.0 * PI * j as f64 / opts.angles as f64))
        .collect();
    // Angular average times r, i.e. the radial integrand of the polar form.
    let ring = |r: f64| -> Result<f64> {
        let damp = (-smoothing * r * r).exp();
        let mut acc = 0.0;
        for d in &dirs {
            let b = *d * r;
            let phase = 2.0 * (alpha * b.conj()).im;
            acc += (f(b)? * Complex64::from_polar(1.0, phase)).re;
        }
        Ok(acc / opts.angles as f64 * damp * r * 2.0 / PI)
    };

    let cap = max_radius.unwrap_or(f64::INFINITY);
    let mut r_max = (-DAMPING_CUTOFF.ln() / decay).sqrt().min(cap);
    // Extend while slowly decaying prefactors (e.g. Fock polynomials) matter.
    for _ in 0..40 {
        let edge = ring(r_max)?.abs().max(ring(r_max * 0.9)?.abs());
        if edge < DAMPING_CUTOFF * 1e-3 {
            break;
        }
        if r_max >= cap {
            // Gaussian tail beyond the cap, estimated from the edge value.
            let tail = ring(cap)?.abs() / (2.0 * decay * cap);
            if tail > 1e-10 {
                return Err(Error::Quadrature { residual: tail });
            }
            break;
        }
        r_max = (r_max * 1.2).min(cap);
    }

    let (nodes, weights) = gauss_legendre(GL_ORDER);
    let integrate = |panels: usize| -> Result<f64> {
        let h = r_max / panels as f64;
        let mut total = 0.0;
        for p in 0..panels {
            let mid = (p as f64 + 0.5) * h;
            for (x, w) in nodes.iter().zip(&weights) {
                total += w * ring(mid + 0.5 * h * x)?;
            }
        }
        Ok(total * 0.5 * h)
    };

    let mut panels = 4;
    let mut prev = integrate(panels)?;
    while panels < opts.max_panels {
        panels *= 2;
        let cur = integrate(panels)?;
        let residual = (cur - prev).abs();
        if residual <= opts.tolerance * cur.abs().max(1.0) {
            return Ok(cur);
        }
        prev = cur;
        if panels >= opts.max_panels {
            return Err(Error::Quadrature { residual });
        }
    }
    Ok(prev)
}
