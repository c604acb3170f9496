//! Thermal-loss channel `a_out = sqrt(eta) a_in + sqrt(1 - eta) c_in`, with
//! the environment mode `c` in a thermal state of mean `nbar`.
//!
//! On characteristic functions the channel acts as
//! `Phi_out(beta) = Phi_in(sqrt(eta) beta) exp(-nbar (1 - eta) |beta|^2)`,
//! which is the definition every other routine here is checked against.
//! The matching diffusion generator on P-functions is the mixed derivative
//! `d^2 / (d alpha d alpha^*)`, a quarter of the real Laplacian.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::PhaseGrid;
use crate::states::{s_distribution, CMatrix, CharFn, DensityMatrix, StateSpec};

/// Thermal tail the ancilla truncation may drop.
pub const ANCILLA_TAIL_TOL: f64 = 1e-12;
/// Largest Fock dimension `apply_channel_dm` will produce.
pub const MAX_OUTPUT_DIM: usize = 2048;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChannelParams {
    pub eta: f64,
    pub nbar: f64,
}

impl ChannelParams {
    pub fn new(eta: f64, nbar: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&eta) {
            return Err(Error::param("eta", format!("must lie in [0, 1], got {eta}")));
        }
        if !(nbar >= 0.0 && nbar.is_finite()) {
            return Err(Error::param("nbar", format!("must be >= 0, got {nbar}")));
        }
        Ok(ChannelParams { eta, nbar })
    }

    pub fn identity() -> Self {
        ChannelParams { eta: 1.0, nbar: 0.0 }
    }

    /// Added noise `nbar (1 - eta)`, the Gaussian rate multiplying `|beta|^2`.
    pub fn added_noise(&self) -> f64 {
        self.nbar * (1.0 - self.eta)
    }

    /// The single channel equal to `self` followed by `then`.
    pub fn then(&self, then: &ChannelParams) -> ChannelParams {
        let eta = self.eta * then.eta;
        let noise = self.added_noise() * then.eta + then.added_noise();
        let nbar = if eta < 1.0 { noise / (1.0 - eta) } else { 0.0 };
        ChannelParams { eta, nbar }
    }
}

/// `eta / (1 - eta)`: above this many thermal photons no state stays nonclassical.
pub fn thermal_threshold(eta: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&eta) {
        return Err(Error::param("eta", format!("must lie in [0, 1), got {eta}")));
    }
    if eta == 1.0 {
        return Err(Error::Unbounded);
    }
    Ok(eta / (1.0 - eta))
}

/// `s' = 1 - 2 nbar (1 - eta) / eta`, the ordering parameter at which the
/// input distribution reproduces the output P-function.
pub fn output_s_param(ch: &ChannelParams) -> Result<f64> {
    if ch.eta <= 0.0 {
        return Err(Error::param("eta", "must be > 0"));
    }
    Ok(1.0 - 2.0 * ch.added_noise() / ch.eta)
}

pub fn apply_channel_charfn(phi: &CharFn, ch: &ChannelParams) -> CharFn {
    phi.transformed(ch.eta.sqrt(), ch.added_noise())
}

/// Output P-function `P_out(alpha) = P_in(alpha / sqrt(eta), s') / eta`.
pub fn output_p_function(spec: &StateSpec, ch: &ChannelParams, alpha: Complex64) -> Result<f64> {
    let s_prime = output_s_param(ch)?;
    let root = ch.eta.sqrt();
    Ok(s_distribution(spec, alpha / root, s_prime)? / ch.eta)
}

/// Smallest ancilla dimension whose thermal tail is below `ANCILLA_TAIL_TOL`.
pub fn thermal_ancilla_dim(nbar: f64) -> usize {
    if nbar <= 0.0 {
        return 1;
    }
    let q = nbar / (1.0 + nbar);
    (ANCILLA_TAIL_TOL.ln() / q.ln()).floor() as usize + 1
}

/// Fock-basis channel: beam splitter of transmissivity `eta` against a
/// thermal ancilla truncated at `ancilla_dim`, then a partial trace.
///
/// The result lives in dimension `dm.dim() + ancilla_dim - 1`, which holds
/// every photon of the truncated input exactly.
pub fn apply_channel_dm(
    dm: &DensityMatrix,
    ch: &ChannelParams,
    ancilla_dim: usize,
) -> Result<DensityMatrix> {
    if ancilla_dim == 0 {
        return Err(Error::param("ancilla_dim", "must be at least 1"));
    }
    let q = ch.nbar / (1.0 + ch.nbar);
    let ancilla_tail = q.powi(ancilla_dim as i32);
    if ancilla_tail >= ANCILLA_TAIL_TOL {
        return Err(Error::Truncation {
            dim: ancilla_dim,
            tail_mass: ancilla_tail,
            tolerance: ANCILLA_TAIL_TOL,
        });
    }
    let dim = dm.dim();
    let out_dim = dim + ancilla_dim - 1;
    if out_dim > MAX_OUTPUT_DIM {
        return Err(Error::param(
            "ancilla_dim",
            format!("output dimension {out_dim} exceeds {MAX_OUTPUT_DIM}"),
        ));
    }

    let t = ch.eta.sqrt();
    let r = (1.0 - ch.eta).sqrt();
    let rho = dm.entries();
    let mut out = CMatrix::zeros(out_dim, out_dim);
    let mut amps = vec![Complex64::new(0.0, 0.0); dim];

    for k in 0..ancilla_dim {
        let weight = q.powi(k as i32) / (1.0 + ch.nbar);
        if weight == 0.0 {
            continue;
        }
        let images = beam_splitter_images(dim, k, t, r);
        // Tracing out q ancilla photons leaves system photon number m + k - q.
        for anc in 0..dim + k {
            let lo = anc.saturating_sub(k);
            if lo >= dim {
                continue;
            }
            for m in lo..dim {
                amps[m] = Complex64::new(images[m][m + k - anc], 0.0);
            }
            for m in lo..dim {
                let p = m + k - anc;
                let am = amps[m] * weight;
                if am.re == 0.0 {
                    continue;
                }
                for mp in lo..dim {
                    let pp = mp + k - anc;
                    out[(p, pp)] += rho[(m, mp)] * am * amps[mp].conj();
                }
            }
        }
    }
    let out = (&out + out.adjoint()) * Complex64::new(0.5, 0.0);
    let tol = dm.tail_mass() + ancilla_tail + 1e-12;
    DensityMatrix::new(out, tol.max(crate::states::TAIL_TOL))
}

/// `U |m, k>` for `m < dim`, as amplitudes over the system photon number
/// `p` in the `(m + k)`-photon subspace. `U` satisfies
/// `U^dagger a U = t a + r c`, so `U a^dagger U^dagger = t a^dagger - r c^dagger`
/// and `U c^dagger U^dagger = r a^dagger + t c^dagger`. All amplitudes are real.
fn beam_splitter_images(dim: usize, k: usize, t: f64, r: f64) -> Vec<Vec<f64>> {
    // (x a^dagger + y c^dagger) applied to a vector in the N-photon subspace.
    let raise = |u: &[f64], x: f64, y: f64, norm: f64| -> Vec<f64> {
        let n = u.len() - 1;
        let mut w = vec![0.0; n + 2];
        for (p, &up) in u.iter().enumerate() {
            if up == 0.0 {
                continue;
            }
            w[p + 1] += x * ((p + 1) as f64).sqrt() * up / norm;
            w[p] += y * ((n - p + 1) as f64).sqrt() * up / norm;
        }
        w
    };
    let mut base = vec![1.0];
    for j in 1..=k {
        base = raise(&base, r, t, (j as f64).sqrt());
    }
    let mut images = Vec::with_capacity(dim);
    images.push(base);
    for m in 1..dim {
        let next = raise(&images[m - 1], t, -r, (m as f64).sqrt());
        images.push(next);
    }
    images
}

/// Finite-difference residual of the diffusion law
/// `dP/dnbar = (1 - eta) d^2 P / (d alpha d alpha^*)` for the output
/// P-function, maximized over `grid`.
///
/// Central differences in `nbar` (step `d_nbar`) and a sixth-order
/// Laplacian stencil with the grid step, so the residual is
/// `O(d_nbar^2) + O(step^6)`. The noisy P-function is narrow near the
/// threshold, and a five-point Laplacian would swamp the `nbar` term.
/// Sixth-order central second-derivative weights for offsets 0, 1, 2, 3.
const LAPLACE_STENCIL: [f64; 4] = [-49.0 / 18.0, 1.5, -0.15, 1.0 / 90.0];

pub fn diffusion_residual(
    spec: &StateSpec,
    ch: &ChannelParams,
    grid: &PhaseGrid,
    d_nbar: f64,
) -> Result<f64> {
    if !(d_nbar > 0.0) {
        return Err(Error::param("d_nbar", "must be > 0"));
    }
    if !(ch.eta > 0.0 && ch.eta < 1.0) {
        return Err(Error::param("eta", "must lie in (0, 1)"));
    }
    let threshold = thermal_threshold(ch.eta)?;
    if ch.nbar + d_nbar >= threshold {
        return Err(Error::AboveThreshold {
            nbar: ch.nbar + d_nbar,
            threshold,
        });
    }
    if ch.nbar - d_nbar <= 0.0 {
        return Err(Error::param(
            "d_nbar",
            "nbar - d_nbar must stay > 0 for a regular P-function",
        ));
    }
    let at = |nbar: f64, alpha: Complex64| -> Result<f64> {
        output_p_function(spec, &ChannelParams { eta: ch.eta, nbar }, alpha)
    };
    let h = grid.step;
    let dx = Complex64::new(h, 0.0);
    let dy = Complex64::new(0.0, h);
    let mut worst: f64 = 0.0;
    for alpha in grid.points() {
        let time = (at(ch.nbar + d_nbar, alpha)? - at(ch.nbar - d_nbar, alpha)?) / (2.0 * d_nbar);
        let mut lap = 2.0 * LAPLACE_STENCIL[0] * at(ch.nbar, alpha)?;
        for d in [dx, dy] {
            for (j, w) in LAPLACE_STENCIL.iter().enumerate().skip(1) {
                let off = d * j as f64;
                lap += w * (at(ch.nbar, alpha + off)? + at(ch.nbar, alpha - off)?);
            }
        }
        lap /= h * h;
        let residual = time - (1.0 - ch.eta) * lap / 4.0;
        worst = worst.max(residual.abs());
    }
    Ok(worst)
}
