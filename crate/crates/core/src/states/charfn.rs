use num_complex::Complex64;
use serde::Serialize;

use super::density::{char_fn_from_dm, DensityMatrix};
use super::spec::StateSpec;
use crate::error::Result;
use crate::special::laguerre;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    Analytic,
    FromDensityMatrix,
}

#[derive(Debug, Clone)]
enum Source {
    Analytic(StateSpec),
    Matrix(DensityMatrix),
}

/// Normally ordered characteristic function `Phi(beta)` of a single mode.
///
/// Stored as a source state plus an attenuation/noise transform, so that
/// `Phi(beta) = Phi_source(scale * beta) * exp(-damping * |beta|^2)`. The
/// thermal-loss channel only ever changes `scale` and `damping`.
#[derive(Debug, Clone)]
pub struct CharFn {
    source: Source,
    scale: f64,
    damping: f64,
}

pub fn char_fn(spec: &StateSpec) -> CharFn {
    CharFn::analytic(spec.clone())
}

impl CharFn {
    pub fn analytic(spec: StateSpec) -> Self {
        CharFn {
            source: Source::Analytic(spec),
            scale: 1.0,
            damping: 0.0,
        }
    }

    pub fn from_density_matrix(dm: DensityMatrix) -> Self {
        CharFn {
            source: Source::Matrix(dm),
            scale: 1.0,
            damping: 0.0,
        }
    }

    pub fn provenance(&self) -> Provenance {
        match self.source {
            Source::Analytic(_) => Provenance::Analytic,
            Source::Matrix(_) => Provenance::FromDensityMatrix,
        }
    }

    /// The analytic source state, if any.
    pub fn spec(&self) -> Option<&StateSpec> {
        match &self.source {
            Source::Analytic(s) => Some(s),
            Source::Matrix(_) => None,
        }
    }

    pub fn density_matrix(&self) -> Option<&DensityMatrix> {
        match &self.source {
            Source::Matrix(dm) => Some(dm),
            Source::Analytic(_) => None,
        }
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn damping(&self) -> f64 {
        self.damping
    }

    /// `beta -> self(factor * beta) * exp(-extra_damping |beta|^2)`.
    pub(crate) fn transformed(&self, factor: f64, extra_damping: f64) -> CharFn {
        CharFn {
            source: self.source.clone(),
            scale: self.scale * factor,
            damping: self.damping * factor * factor + extra_damping,
        }
    }

    pub fn eval(&self, beta: Complex64) -> Result<Complex64> {
        let inner = beta * self.scale;
        let base = match &self.source {
            Source::Analytic(spec) => analytic_value(spec, inner),
            Source::Matrix(dm) => char_fn_from_dm(dm, inner)?,
        };
        Ok(base * (-self.damping * beta.norm_sqr()).exp())
    }
}

/// Closed forms: `L_n(|b|^2)` for `|n>`, `exp(b g^* - b^* g)` for `|g>`,
/// `exp(-m |b|^2)` for a thermal state, weighted sums for mixtures.
pub(crate) fn analytic_value(spec: &StateSpec, beta: Complex64) -> Complex64 {
    match spec {
        StateSpec::Fock { n } => Complex64::new(laguerre(*n as usize, beta.norm_sqr()), 0.0),
        StateSpec::Coherent { amplitude } => {
            let exponent = beta * amplitude.conj() - beta.conj() * amplitude;
            Complex64::from_polar(1.0, exponent.im)
        }
        StateSpec::Thermal { mean_photons } => {
            Complex64::new((-mean_photons * beta.norm_sqr()).exp(), 0.0)
        }
        StateSpec::Mixture(cs) => cs
            .iter()
            .map(|c| analytic_value(&c.state, beta) * c.weight)
            .sum(),
    }
}
