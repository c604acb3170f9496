//! Witness functions: nonnegative normally ordered symbols whose mean over a
//! state's P-function goes negative only for nonclassical states.
//!
//! Two families are provided. The Gaussian witness has mean equal to an
//! s-parameterized distribution at its center, and survives thermal-loss
//! noise in compensated form as long as its width stays positive. The
//! discrete witness `|sum_k xi_k exp(alpha^* alpha_k - alpha alpha_k^*)|^2`
//! is the symbol behind the discrete Bochner test. Its anti-diffused
//! version goes negative for any added noise whenever the original symbol
//! has a zero and the pair distances are equal, e.g. two points with equal
//! weights. Equal weights alone are not enough once there are three points.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use crate::channel::ChannelParams;
use crate::error::{Error, Result};
use crate::grid::PhaseGrid;
use crate::states::{s_distribution, CharFn, StateSpec};

/// `W(alpha) = exp(-|alpha - center|^2 / a2) / (pi a2)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GaussianWitness {
    pub a2: f64,
    pub center: Complex64,
}

impl GaussianWitness {
    pub fn new(a2: f64, center: Complex64) -> Result<Self> {
        if !(a2 > 0.0 && a2.is_finite()) {
            return Err(Error::param("a2", format!("must be > 0, got {a2}")));
        }
        Ok(GaussianWitness { a2, center })
    }

    /// Ordering parameter of the distribution this witness samples.
    pub fn s_param(&self) -> f64 {
        1.0 - 2.0 * self.a2
    }

    pub fn value(&self, alpha: Complex64) -> f64 {
        gaussian_witness_value(self, alpha)
    }
}

pub fn gaussian_witness_value(w: &GaussianWitness, alpha: Complex64) -> f64 {
    (-(alpha - w.center).norm_sqr() / w.a2).exp() / (PI * w.a2)
}

/// Mean of `w` over the state's P-function, i.e. `P(center, 1 - 2 a2)`.
/// Negative values certify nonclassicality.
pub fn gaussian_witness_mean(spec: &StateSpec, w: &GaussianWitness) -> Result<f64> {
    s_distribution(spec, w.center, w.s_param())
}

/// Same mean for an arbitrary characteristic function (e.g. a noisy output).
pub fn gaussian_witness_mean_charfn(phi: &CharFn, w: &GaussianWitness) -> Result<f64> {
    phi.s_distribution(w.center, w.s_param())
}

/// Anti-diffused, rescaled Gaussian witness for a noisy state:
/// `W_th(alpha) = scale / (pi a2_eff) exp(-|alpha - center|^2 / a2_eff)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CompensatedGaussianWitness {
    pub scale: f64,
    pub a2_eff: f64,
    pub center: Complex64,
}

impl CompensatedGaussianWitness {
    pub fn value(&self, alpha: Complex64) -> f64 {
        self.scale * (-(alpha - self.center).norm_sqr() / self.a2_eff).exp() / (PI * self.a2_eff)
    }
}

/// Largest `nbar` for which `w` has a compensated counterpart:
/// `eta a2 / (1 - eta)` (infinite for a lossless channel).
pub fn compensation_bound(w: &GaussianWitness, eta: f64) -> f64 {
    if eta >= 1.0 {
        f64::INFINITY
    } else {
        eta * w.a2 / (1.0 - eta)
    }
}

/// Solves the backward diffusion for the Gaussian witness.
///
/// Width `eta a2 - nbar (1 - eta)`, center `gamma sqrt(eta)`, weight `eta`.
/// Fails when the width is not positive: past that point the anti-diffused
/// symbol is no longer a positive function.
pub fn compensate_gaussian(
    w: &GaussianWitness,
    ch: &ChannelParams,
) -> Result<CompensatedGaussianWitness> {
    let a2_eff = ch.eta * w.a2 - ch.added_noise();
    if !(a2_eff > 0.0) {
        return Err(Error::WitnessCondition {
            nbar: ch.nbar,
            bound: compensation_bound(w, ch.eta),
            a2_eff,
        });
    }
    Ok(CompensatedGaussianWitness {
        scale: ch.eta,
        a2_eff,
        center: w.center * ch.eta.sqrt(),
    })
}

/// Mean of the compensated witness over the noisy state's P-function,
/// evaluated through the noisy characteristic function.
pub fn compensated_witness_mean(noisy: &CharFn, cw: &CompensatedGaussianWitness) -> Result<f64> {
    Ok(cw.scale * noisy.s_distribution(cw.center, 1.0 - 2.0 * cw.a2_eff)?)
}

/// Mean of the *uncompensated* witness over the noisy state:
/// `P_in(gamma / sqrt(eta), s') / eta` with
/// `s' = 1 - 2 (nbar (1 - eta) + a2) / eta`.
pub fn uncompensated_noisy_mean(
    spec: &StateSpec,
    ch: &ChannelParams,
    w: &GaussianWitness,
) -> Result<f64> {
    if !(ch.eta > 0.0) {
        return Err(Error::param("eta", "must be > 0"));
    }
    let s_prime = 1.0 - 2.0 * (ch.added_noise() + w.a2) / ch.eta;
    Ok(s_distribution(spec, w.center / ch.eta.sqrt(), s_prime)? / ch.eta)
}

/// Witness built from point masses `xi_k` at `alpha_k`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DiscreteWitness {
    points: Vec<Complex64>,
    coeffs: Vec<Complex64>,
}

impl DiscreteWitness {
    pub fn new(points: Vec<Complex64>, coeffs: Vec<Complex64>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::param("points", "need at least one point"));
        }
        if points.len() != coeffs.len() {
            return Err(Error::param(
                "coeffs",
                format!("{} coefficients for {} points", coeffs.len(), points.len()),
            ));
        }
        for (i, p) in points.iter().enumerate() {
            if points[..i].contains(p) {
                return Err(Error::param("points", format!("duplicate point {p}")));
            }
        }
        if coeffs.iter().all(|c| c.norm_sqr() == 0.0) {
            return Err(Error::param("coeffs", "all coefficients are zero"));
        }
        Ok(DiscreteWitness { points, coeffs })
    }

    pub fn points(&self) -> &[Complex64] {
        &self.points
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn max_separation(&self) -> f64 {
        pairwise(&self.points).fold(0.0, f64::max)
    }

    pub fn min_separation(&self) -> f64 {
        pairwise(&self.points).fold(f64::INFINITY, f64::min)
    }
}

fn pairwise(points: &[Complex64]) -> impl Iterator<Item = f64> + '_ {
    points
        .iter()
        .enumerate()
        .flat_map(move |(i, a)| points[i + 1..].iter().map(move |b| (a - b).norm()))
}

/// `exp(alpha^* x - alpha x^*)`, a unit-modulus phase.
fn plane_wave(alpha: Complex64, x: Complex64) -> Complex64 {
    Complex64::from_polar(1.0, 2.0 * (alpha.conj() * x).im)
}

/// `|sum_k xi_k exp(alpha^* alpha_k - alpha alpha_k^*)|^2`.
pub fn discrete_witness_value(dw: &DiscreteWitness, alpha: Complex64) -> f64 {
    dw.points
        .iter()
        .zip(&dw.coeffs)
        .map(|(p, c)| c * plane_wave(alpha, *p))
        .sum::<Complex64>()
        .norm_sqr()
}

/// The anti-diffused discrete symbol
/// `sum_{k,l} xi_k xi_l^* exp(nbar (1-eta)/eta |d_kl|^2) exp((alpha^* d_kl - alpha d_kl^*)/sqrt(eta))`
/// with `d_kl = alpha_k - alpha_l`. With `nbar = 0` it is a rescaled copy
/// of the original witness.
pub fn evolved_discrete_witness_value(
    dw: &DiscreteWitness,
    ch: &ChannelParams,
    alpha: Complex64,
) -> f64 {
    let gain = ch.added_noise() / ch.eta;
    let root = ch.eta.sqrt();
    let mut acc = Complex64::new(0.0, 0.0);
    for (pk, ck) in dw.points.iter().zip(&dw.coeffs) {
        for (pl, cl) in dw.points.iter().zip(&dw.coeffs) {
            let d = pk - pl;
            acc += ck * cl.conj() * (gain * d.norm_sqr()).exp() * plane_wave(alpha, d / root);
        }
    }
    acc.re
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GridMinimum {
    pub value: f64,
    pub at: Complex64,
}

/// Largest grid step that still resolves the fastest phase of the evolved symbol.
pub fn max_resolving_step(dw: &DiscreteWitness, eta: f64) -> f64 {
    PI / (4.0 * dw.max_separation() / eta.sqrt())
}

/// Grid over two periods of the slowest phase, at half the coarsest
/// admissible step.
pub fn default_discrete_grid(dw: &DiscreteWitness, eta: f64) -> Result<PhaseGrid> {
    if dw.points.len() < 2 {
        return Err(Error::param("points", "need at least two points"));
    }
    let root = eta.sqrt();
    let radius = 2.0 * PI * root / dw.min_separation();
    PhaseGrid::centered(radius, max_resolving_step(dw, eta) / 2.0)
}

/// Minimum of the evolved discrete symbol: a grid scan followed by a
/// compass-search polish around the best grid point.
pub fn evolved_discrete_witness_min(
    dw: &DiscreteWitness,
    ch: &ChannelParams,
    grid: &PhaseGrid,
) -> Result<GridMinimum> {
    if !(ch.eta > 0.0) {
        return Err(Error::param("eta", "must be > 0"));
    }
    if dw.points.len() < 2 {
        return Err(Error::param("points", "need at least two distinct points"));
    }
    let max_step = max_resolving_step(dw, ch.eta);
    if grid.step > max_step {
        return Err(Error::GridTooCoarse {
            step: grid.step,
            max_step,
        });
    }
    let f = |a: Complex64| evolved_discrete_witness_value(dw, ch, a);
    let mut best = GridMinimum {
        value: f64::INFINITY,
        at: grid.center,
    };
    for a in grid.points() {
        let v = f(a);
        if v < best.value {
            best = GridMinimum { value: v, at: a };
        }
    }
    Ok(polish(f, best, grid.step))
}

fn polish<F: Fn(Complex64) -> f64>(f: F, start: GridMinimum, step: f64) -> GridMinimum {
    let dirs = [
        Complex64::new(1.0, 0.0),
        Complex64::new(-1.0, 0.0),
        Complex64::new(0.0, 1.0),
        Complex64::new(0.0, -1.0),
        Complex64::new(1.0, 1.0),
        Complex64::new(-1.0, -1.0),
        Complex64::new(1.0, -1.0),
        Complex64::new(-1.0, 1.0),
    ];
    let mut best = start;
    let mut h = step;
    let mut iters = 0;
    while h > 1e-11 && iters < 100_000 {
        iters += 1;
        let mut moved = false;
        for d in &dirs {
            let a = best.at + d * h;
            let v = f(a);
            if v < best.value {
                best = GridMinimum { value: v, at: a };
                moved = true;
                break;
            }
        }
        if !moved {
            h /= 2.0;
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn gaussian_values() {
        let w = GaussianWitness::new(1.0, c(0.0, 0.0)).unwrap();
        assert!((w.value(c(0.0, 0.0)) - 1.0 / PI).abs() < 1e-16);
        let w = GaussianWitness::new(0.5, c(0.0, 0.0)).unwrap();
        let v = w.value(Complex64::from_polar(0.5f64.sqrt(), 0.3));
        assert!((v - 2.0 / PI * (-1.0f64).exp()).abs() < 1e-15);
        assert!((v - 0.234_199_326_097_276_67).abs() < 1e-12);
        assert!(GaussianWitness::new(0.0, c(0.0, 0.0)).is_err());
    }

    #[test]
    fn single_photon_gaussian_means() {
        let f1 = StateSpec::fock(1);
        let w = GaussianWitness::new(0.5, c(0.0, 0.0)).unwrap();
        assert!((gaussian_witness_mean(&f1, &w).unwrap() + 2.0 / PI).abs() < 1e-14);
        let w = GaussianWitness::new(1.0, c(0.0, 0.0)).unwrap();
        assert!(gaussian_witness_mean(&f1, &w).unwrap().abs() < 1e-15);
    }

    #[test]
    fn coherent_means_are_positive() {
        let coh = StateSpec::coherent(1.2, -0.3);
        for a2 in [0.05, 0.3, 1.0, 3.0] {
            for g in [c(0.0, 0.0), c(1.2, -0.3), c(-2.0, 2.0)] {
                let w = GaussianWitness::new(a2, g).unwrap();
                assert!(gaussian_witness_mean(&coh, &w).unwrap() > 0.0);
            }
        }
    }

    #[test]
    fn compensation_examples() {
        let w = GaussianWitness::new(0.8, c(0.0, 0.0)).unwrap();
        let cw = compensate_gaussian(&w, &ChannelParams::new(0.8, 2.0).unwrap()).unwrap();
        assert!((cw.scale - 0.8).abs() < 1e-15);
        assert!((cw.a2_eff - 0.24).abs() < 1e-15);
        assert_eq!(cw.center, c(0.0, 0.0));

        let w = GaussianWitness::new(0.6, c(0.5, -0.2)).unwrap();
        let cw = compensate_gaussian(&w, &ChannelParams::new(0.7, 0.0).unwrap()).unwrap();
        assert!((cw.a2_eff - 0.42).abs() < 1e-15);
        assert!((cw.center - c(0.5, -0.2) * 0.7f64.sqrt()).norm() < 1e-15);

        let w = GaussianWitness::new(0.9, c(0.0, 0.0)).unwrap();
        match compensate_gaussian(&w, &ChannelParams::new(0.5, 1.0).unwrap()) {
            Err(Error::WitnessCondition { bound, .. }) => assert!((bound - 0.9).abs() < 1e-15),
            other => panic!("expected witness-condition error, got {other:?}"),
        }
    }

    #[test]
    fn compensated_value_is_nonnegative() {
        let w = GaussianWitness::new(0.8, c(0.3, 0.1)).unwrap();
        let cw = compensate_gaussian(&w, &ChannelParams::new(0.9, 0.5).unwrap()).unwrap();
        for a in [c(0.0, 0.0), c(3.0, -1.0), c(0.27, 0.09)] {
            assert!(cw.value(a) >= 0.0);
        }
    }

    #[test]
    fn uncompensated_single_photon() {
        let f1 = StateSpec::fock(1);
        let ch = ChannelParams::new(0.8, 1.0).unwrap();
        let w = GaussianWitness::new(0.5, c(0.0, 0.0)).unwrap();
        let v = uncompensated_noisy_mean(&f1, &ch, &w).unwrap();
        // s' = -0.75: (2 / (pi 1.75^3)) (-1 + 0.5625) / 0.8
        let expect = 2.0 / (PI * 1.75f64.powi(3)) * (0.5625 - 1.0) / 0.8;
        assert!((v - expect).abs() < 1e-15);
        assert!((v + 0.064_955).abs() < 1e-5);
    }

    #[test]
    fn discrete_values() {
        let one = DiscreteWitness::new(vec![c(0.3, 0.2)], vec![c(1.0, 0.0)]).unwrap();
        assert!((discrete_witness_value(&one, c(1.7, -0.4)) - 1.0).abs() < 1e-15);
        let two = DiscreteWitness::new(vec![c(0.0, 0.0), c(1.0, 0.0)], vec![c(1.0, 0.0); 2]).unwrap();
        assert!((discrete_witness_value(&two, c(0.0, 0.0)) - 4.0).abs() < 1e-15);
        assert!(discrete_witness_value(&two, c(0.0, PI / 2.0)) < 1e-30);
    }

    #[test]
    fn expanded_double_sum_equals_squared_modulus() {
        let dw = DiscreteWitness::new(
            vec![c(0.0, 0.0), c(0.7, -0.2), c(-0.4, 1.1)],
            vec![c(1.0, 0.5), c(-0.3, 0.2), c(0.8, -1.0)],
        )
        .unwrap();
        let ch = ChannelParams::identity();
        for a in [c(0.1, 0.2), c(-1.5, 0.7), c(2.0, 2.0)] {
            let lhs = discrete_witness_value(&dw, a);
            let rhs = evolved_discrete_witness_value(&dw, &ch, a);
            assert!((lhs - rhs).abs() < 1e-12);
        }
    }

    #[test]
    fn discrete_witness_validation() {
        assert!(DiscreteWitness::new(vec![], vec![]).is_err());
        assert!(DiscreteWitness::new(vec![c(0.0, 0.0)], vec![]).is_err());
        assert!(DiscreteWitness::new(vec![c(1.0, 0.0), c(1.0, 0.0)], vec![c(1.0, 0.0); 2]).is_err());
        assert!(DiscreteWitness::new(vec![c(1.0, 0.0)], vec![c(0.0, 0.0)]).is_err());
    }

    #[test]
    fn two_point_evolved_minimum() {
        let dw = DiscreteWitness::new(vec![c(0.0, 0.0), c(1.0, 0.0)], vec![c(1.0, 0.0); 2]).unwrap();
        let ch = ChannelParams::new(0.5, 0.1).unwrap();
        let grid = default_discrete_grid(&dw, ch.eta).unwrap();
        let m = evolved_discrete_witness_min(&dw, &ch, &grid).unwrap();
        let expect = 2.0 - 2.0 * (0.1f64).exp();
        assert!((m.value - expect).abs() < 1e-8, "{} vs {expect}", m.value);
        assert!((m.value + 0.210_34).abs() < 1e-5);

        let quiet = ChannelParams::new(0.5, 0.0).unwrap();
        let m0 = evolved_discrete_witness_min(&dw, &quiet, &grid).unwrap();
        assert!(m0.value.abs() < 1e-8);
    }

    #[test]
    fn equilateral_triple_goes_negative() {
        let pts = vec![
            c(0.0, 0.0),
            c(1.0, 0.0),
            c(0.5, 3f64.sqrt() / 2.0),
        ];
        let dw = DiscreteWitness::new(pts, vec![c(1.0, 0.0); 3]).unwrap();
        for nbar in [1e-3, 0.1, 1.0] {
            let ch = ChannelParams::new(0.6, nbar).unwrap();
            let grid = default_discrete_grid(&dw, ch.eta).unwrap();
            let m = evolved_discrete_witness_min(&dw, &ch, &grid).unwrap();
            // Where the three phases cancel the symbol is 3 (1 - E).
            let e = (nbar * 0.4 / 0.6f64).exp();
            assert!(m.value < 0.0);
            assert!(m.value <= 3.0 * (1.0 - e) + 1e-8, "{} vs {}", m.value, 3.0 * (1.0 - e));
        }
    }

    #[test]
    fn equal_moduli_alone_do_not_force_negativity() {
        // Collinear 0, 1, 2 with xi = (1, i, 1): |1 + i z + z^2| >= 1 on the unit circle.
        let dw = DiscreteWitness::new(
            vec![c(0.0, 0.0), c(1.0, 0.0), c(2.0, 0.0)],
            vec![c(1.0, 0.0), c(0.0, 1.0), c(1.0, 0.0)],
        )
        .unwrap();
        let ch = ChannelParams::new(0.5, 0.01).unwrap();
        let grid = default_discrete_grid(&dw, ch.eta).unwrap();
        let m = evolved_discrete_witness_min(&dw, &ch, &grid).unwrap();
        assert!(m.value > 0.5, "{}", m.value);
    }

    #[test]
    fn compensated_mean_examples() {
        let f1 = StateSpec::fock(1);
        let w = GaussianWitness::new(0.5, c(0.0, 0.0)).unwrap();
        let ch = ChannelParams::new(0.8, 1.0).unwrap();
        let cw = compensate_gaussian(&w, &ch).unwrap();
        let noisy = crate::channel::apply_channel_charfn(&crate::states::char_fn(&f1), &ch);
        let v = compensated_witness_mean(&noisy, &cw).unwrap();
        assert!((v + 2.0 / PI).abs() < 1e-14);

        // Fock-basis channel output, by numerical Fourier inversion. The wider
        // witness keeps the integrand negligible inside the evaluation guard.
        let wide = GaussianWitness::new(0.9, c(0.0, 0.0)).unwrap();
        let cw_wide = compensate_gaussian(&wide, &ch).unwrap();
        let dm = crate::states::build_density_matrix(&f1, 8).unwrap();
        let out = crate::channel::apply_channel_dm(&dm, &ch, crate::channel::thermal_ancilla_dim(1.0)).unwrap();
        let v = compensated_witness_mean(&CharFn::from_density_matrix(out), &cw_wide).unwrap();
        let clean = gaussian_witness_mean(&f1, &wide).unwrap();
        assert!((v - clean).abs() < 1e-9, "{v} vs {clean}");

        let quiet = ChannelParams::new(0.7, 0.0).unwrap();
        let w = GaussianWitness::new(0.6, c(0.2, -0.1)).unwrap();
        let cw = compensate_gaussian(&w, &quiet).unwrap();
        let noisy = crate::channel::apply_channel_charfn(&crate::states::char_fn(&f1), &quiet);
        let a = compensated_witness_mean(&noisy, &cw).unwrap();
        let b = gaussian_witness_mean(&f1, &w).unwrap();
        assert!((a - b).abs() < 1e-15);

        let vac = crate::channel::apply_channel_charfn(&crate::states::char_fn(&StateSpec::vacuum()), &ch);
        assert!(compensated_witness_mean(&vac, &cw).unwrap() >= 0.0);
    }

    #[test]
    fn uncompensated_sign_boundary() {
        let f1 = StateSpec::fock(1);
        let eta = 0.8;
        for nbar in [0.0, 0.5, 1.0, 2.0] {
            let ch = ChannelParams::new(eta, nbar).unwrap();
            let edge = eta - nbar * (1.0 - eta);
            for a2 in [edge, edge + 0.1, edge + 1.0] {
                if a2 <= 0.0 {
                    continue;
                }
                let w = GaussianWitness::new(a2, c(0.0, 0.0)).unwrap();
                assert!(uncompensated_noisy_mean(&f1, &ch, &w).unwrap() >= -1e-15);
            }
            if edge > 0.05 {
                let w = GaussianWitness::new(edge - 0.05, c(0.0, 0.0)).unwrap();
                assert!(uncompensated_noisy_mean(&f1, &ch, &w).unwrap() < 0.0);
            }
        }
        let ch = ChannelParams::new(0.8, 1.0).unwrap();
        let w = GaussianWitness::new(0.4, c(0.0, 0.0)).unwrap();
        let v = uncompensated_noisy_mean(&f1, &ch, &w).unwrap();
        let expect = s_distribution(&f1, c(0.0, 0.0), -0.5).unwrap() / 0.8;
        assert!((v - expect).abs() < 1e-15);
    }

    #[test]
    fn coarse_grid_is_rejected() {
        let dw = DiscreteWitness::new(vec![c(0.0, 0.0), c(1.0, 0.0)], vec![c(1.0, 0.0); 2]).unwrap();
        let ch = ChannelParams::new(0.5, 0.1).unwrap();
        let grid = PhaseGrid::centered(3.0, 1.0).unwrap();
        assert!(matches!(
            evolved_discrete_witness_min(&dw, &ch, &grid),
            Err(Error::GridTooCoarse { .. })
        ));
    }
}
