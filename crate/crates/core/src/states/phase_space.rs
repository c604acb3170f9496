//! s-parameterized phase-space distributions (P at s = 1, Wigner at s = 0,
//! Husimi Q at s = -1) evaluated pointwise.

use std::f64::consts::PI;

use num_complex::Complex64;

use super::charfn::CharFn;
use super::quadrature::s_distribution_quadrature;
use super::spec::StateSpec;
use crate::error::{Error, Result};
use crate::special::{laguerre, ln_binomial, ln_factorials};

/// `P(alpha, s)` for a catalog state. Requires `s < 1`; the Glauber-Sudarshan
/// limit `s = 1` is a distribution for nonclassical states and is refused.
pub fn s_distribution(spec: &StateSpec, alpha: Complex64, s: f64) -> Result<f64> {
    if !(s < 1.0) {
        return Err(Error::Singular {
            s,
            width: (1.0 - s) / 2.0,
        });
    }
    Ok(smoothed(spec, alpha, (1.0 - s) / 2.0))
}

/// Closed forms, parameterized by the Gaussian smoothing width
/// `w = (1 - s)/2 > 0` applied to the P-function.
pub(crate) fn smoothed(spec: &StateSpec, alpha: Complex64, w: f64) -> f64 {
    match spec {
        StateSpec::Fock { n } => fock_smoothed(*n as usize, alpha.norm_sqr(), w),
        StateSpec::Coherent { amplitude } => gaussian(alpha - amplitude, w),
        StateSpec::Thermal { mean_photons } => gaussian(alpha, w + mean_photons),
        StateSpec::Mixture(cs) => cs.iter().map(|c| c.weight * smoothed(&c.state, alpha, w)).sum(),
    }
}

fn gaussian(delta: Complex64, width: f64) -> f64 {
    (-delta.norm_sqr() / width).exp() / (PI * width)
}

/// `|n>` smoothed with width `w`:
/// `exp(-x)/(pi w) * sum_k C(n,k) (-1/w)^k L_k(x)`, `x = |alpha|^2 / w`.
/// The finite sum has no singularity at the Q-function point `w = 1`.
fn fock_smoothed(n: usize, alpha_sq: f64, w: f64) -> f64 {
    let x = alpha_sq / w;
    let lnf = ln_factorials(n);
    let mut sum = 0.0;
    for k in 0..=n {
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        sum += sign * ln_binomial(&lnf, n, k).exp() * w.powi(-(k as i32)) * laguerre(k, x);
    }
    (-x).exp() / (PI * w) * sum
}

impl CharFn {
    /// s-parameterized distribution of the state this characteristic
    /// function describes. Channel noise already present in `self` counts
    /// toward the smoothing, so `s = 1` is allowed for noisy states.
    pub fn s_distribution(&self, alpha: Complex64, s: f64) -> Result<f64> {
        let width = self.damping() + (1.0 - s) / 2.0;
        if !(width > 0.0) {
            return Err(Error::Singular { s, width });
        }
        match self.spec() {
            Some(spec) => {
                let t = self.scale();
                if t == 0.0 {
                    // Source fully attenuated: only the added noise is left.
                    Ok(gaussian(alpha, width))
                } else {
                    Ok(smoothed(spec, alpha / t, width / (t * t)) / (t * t))
                }
            }
            None => s_distribution_quadrature(self, alpha, s),
        }
    }

    /// Glauber-Sudarshan P-function, defined pointwise only when the state
    /// carries noise (`damping > 0`).
    pub fn p_function(&self, alpha: Complex64) -> Result<f64> {
        self.s_distribution(alpha, 1.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    /// Single-photon closed form valid for -1 <= s < 1.
    fn fock1_closed(alpha: Complex64, s: f64) -> f64 {
        let a2 = alpha.norm_sqr();
        2.0 / (PI * (1.0 - s).powi(3)) * (4.0 * a2 - 1.0 + s * s) * (-2.0 * a2 / (1.0 - s)).exp()
    }

    /// Fock-state form with the ((s+1)/(s-1))^n prefactor; singular at s = -1.
    fn fock_prefactor_form(n: usize, alpha: Complex64, s: f64) -> f64 {
        let a2 = alpha.norm_sqr();
        2.0 / (PI * (1.0 - s))
            * ((s + 1.0) / (s - 1.0)).powi(n as i32)
            * (-2.0 * a2 / (1.0 - s)).exp()
            * laguerre(n, 4.0 * a2 / (1.0 - s * s))
    }

    #[test]
    fn single_photon_examples() {
        let f1 = StateSpec::fock(1);
        let o = c(0.0, 0.0);
        assert!((s_distribution(&f1, o, 0.0).unwrap() + 2.0 / PI).abs() < 1e-14);
        assert!(s_distribution(&f1, o, -1.0).unwrap().abs() < 1e-15);
        assert!((s_distribution(&f1, o, -0.5).unwrap() + 0.141_471_060_526_129_2).abs() < 1e-14);
    }

    #[test]
    fn single_photon_matches_closed_form() {
        let f1 = StateSpec::fock(1);
        for &s in &[-2.0, -1.0, -0.6, 0.0, 0.3, 0.9] {
            for a in [c(0.0, 0.0), c(0.4, -0.2), c(1.5, 1.0)] {
                let v = s_distribution(&f1, a, s).unwrap();
                assert!((v - fock1_closed(a, s)).abs() < 1e-13, "s={s} a={a}");
            }
        }
    }

    #[test]
    fn higher_fock_matches_prefactor_form() {
        for n in 0..6 {
            for &s in &[-0.5, 0.0, 0.5] {
                for a in [c(0.0, 0.0), c(0.7, 0.1), c(1.2, -0.9)] {
                    let v = s_distribution(&StateSpec::fock(n as u32), a, s).unwrap();
                    let e = fock_prefactor_form(n, a, s);
                    assert!((v - e).abs() < 1e-12, "n={n} s={s}: {v} vs {e}");
                }
            }
        }
    }

    #[test]
    fn q_function_of_fock_is_poissonian() {
        // Q(alpha) = |alpha|^{2n} e^{-|alpha|^2} / (pi n!)
        let a = c(1.1, 0.5);
        let x = a.norm_sqr();
        let mut fact = 1.0;
        for n in 0..8u32 {
            if n > 0 {
                fact *= n as f64;
            }
            let q = s_distribution(&StateSpec::fock(n), a, -1.0).unwrap();
            let e = x.powi(n as i32) * (-x).exp() / (PI * fact);
            assert!((q - e).abs() < 1e-13, "n={n}");
        }
    }

    #[test]
    fn s_one_is_refused() {
        assert!(matches!(
            s_distribution(&StateSpec::fock(1), c(0.0, 0.0), 1.0),
            Err(Error::Singular { .. })
        ));
    }

    #[test]
    fn mixture_is_affine() {
        let a = c(0.3, -0.8);
        let p = StateSpec::coherent(0.5, 0.1);
        let q = StateSpec::fock(2);
        let mix = StateSpec::mixture(vec![(0.3, p.clone()), (0.7, q.clone())]).unwrap();
        let lhs = s_distribution(&mix, a, -0.2).unwrap();
        let rhs = 0.3 * s_distribution(&p, a, -0.2).unwrap() + 0.7 * s_distribution(&q, a, -0.2).unwrap();
        assert!((lhs - rhs).abs() < 1e-15);
    }

    #[test]
    fn dm_source_uses_quadrature() {
        let dm = crate::states::build_density_matrix(&StateSpec::fock(1), 6).unwrap();
        let phi = CharFn::from_density_matrix(dm);
        let v = phi.s_distribution(c(0.2, 0.1), -0.5).unwrap();
        assert!((v - fock1_closed(c(0.2, 0.1), -0.5)).abs() < 1e-10, "{v}");
    }
}
