//! Unbalanced homodyne detection: the signal is mixed with a strong local
//! oscillator on a highly transmitting beam splitter, which displaces it by
//! `-gamma`, and photons are counted with efficiency `eta_h`.
//!
//! The alternating series
//! `(1 / (pi a2)) sum_n [-(1 - eta_h a2) / (eta_h a2)]^n P_n`
//! turns those counts into the Gaussian-witness mean `P(gamma, 1 - 2 a2)`.
//! Its compensated form reads the clean-state value off counts taken after
//! a thermal-loss channel.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::channel::ChannelParams;
use crate::error::{Error, Result};
use crate::special::{ln_binomial, ln_factorials};
use crate::states::{displacement_matrix, DensityMatrix};
use crate::witness::{compensate_gaussian, GaussianWitness};

/// Probability mass a count distribution may leave outside its bins.
pub const COUNT_TAIL_TOL: f64 = 1e-9;
/// Default target for the series truncation bound.
pub const DEFAULT_SERIES_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CountDistribution {
    pub probs: Vec<f64>,
    pub tail_mass: f64,
}

impl CountDistribution {
    pub fn mean(&self) -> f64 {
        self.probs.iter().enumerate().map(|(n, p)| n as f64 * p).sum()
    }
}

fn check_eta_h(eta_h: f64) -> Result<()> {
    if !(eta_h > 0.0 && eta_h <= 1.0) {
        return Err(Error::param("eta_h", format!("must lie in (0, 1], got {eta_h}")));
    }
    Ok(())
}

/// Photon-count statistics of `D^dagger(gamma) rho D(gamma)` behind a
/// detector of efficiency `eta_h`, for counts `n < dim`.
pub fn count_distribution(
    dm: &DensityMatrix,
    gamma: Complex64,
    eta_h: f64,
    dim: usize,
) -> Result<CountDistribution> {
    count_distribution_with_tol(dm, gamma, eta_h, dim, COUNT_TAIL_TOL)
}

pub fn count_distribution_with_tol(
    dm: &DensityMatrix,
    gamma: Complex64,
    eta_h: f64,
    dim: usize,
    tail_tol: f64,
) -> Result<CountDistribution> {
    check_eta_h(eta_h)?;
    let full = dm.dim();
    if dim == 0 || dim > full {
        return Err(Error::param(
            "dim",
            format!("must lie in 1..={full}, got {dim}"),
        ));
    }
    // Populations of the displaced state. Entries <m|D|k> of the truncated
    // operator are exact, so only mass displaced beyond `full` is lost.
    let d = displacement_matrix(-gamma, full);
    let a = &d * dm.entries();
    let pops: Vec<f64> = (0..full)
        .map(|m| {
            (0..full)
                .map(|l| (a[(m, l)] * d[(m, l)].conj()).re)
                .sum::<f64>()
                .max(0.0)
        })
        .collect();

    let probs: Vec<f64> = if eta_h == 1.0 {
        pops[..dim].to_vec()
    } else {
        let lnf = ln_factorials(full);
        let (ln_e, ln_1me) = (eta_h.ln(), (1.0 - eta_h).ln());
        (0..dim)
            .map(|n| {
                (n..full)
                    .map(|m| {
                        let w = ln_binomial(&lnf, m, n) + n as f64 * ln_e + (m - n) as f64 * ln_1me;
                        w.exp() * pops[m]
                    })
                    .sum()
            })
            .collect()
    };
    let tail_mass = (1.0 - probs.iter().sum::<f64>()).max(0.0);
    if tail_mass >= tail_tol {
        return Err(Error::Truncation {
            dim,
            tail_mass,
            tolerance: tail_tol,
        });
    }
    Ok(CountDistribution { probs, tail_mass })
}

/// A linear functional `prefactor * sum_n base^n P_n` on count data.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeriesFunctional {
    pub prefactor: f64,
    pub base: f64,
}

impl SeriesFunctional {
    fn checked(prefactor: f64, base: f64) -> Result<Self> {
        let ratio = base.abs();
        if !(ratio < 1.0) {
            return Err(Error::Divergent { ratio });
        }
        Ok(SeriesFunctional { prefactor, base })
    }

    /// Plain reconstruction of `P(gamma, 1 - 2 a2)`.
    pub fn wall(a2: f64, eta_h: f64) -> Result<Self> {
        if !(a2 > 0.0 && a2.is_finite()) {
            return Err(Error::param("a2", format!("must be > 0, got {a2}")));
        }
        check_eta_h(eta_h)?;
        let x = eta_h * a2;
        Self::checked(1.0 / (PI * a2), -(1.0 - x) / x)
    }

    /// Compensated reconstruction from counts on the channel output taken at
    /// displacement `gamma sqrt(eta)`, with effective width
    /// `a2_eff = eta a2 - nbar (1 - eta)`.
    pub fn modified(w: &GaussianWitness, ch: &ChannelParams, eta_h: f64) -> Result<Self> {
        check_eta_h(eta_h)?;
        let cw = compensate_gaussian(w, ch)?;
        let x = eta_h * cw.a2_eff;
        Self::checked(cw.scale / (PI * cw.a2_eff), -(1.0 - x) / x)
    }

    pub fn ratio(&self) -> f64 {
        self.base.abs()
    }

    pub fn weight(&self, n: usize) -> f64 {
        self.prefactor * self.base.powi(n as i32)
    }

    /// Sums the series until the remainder bound drops below `tolerance`,
    /// using at most one term per count bin. Since every later weight has
    /// magnitude at most `|base|^(n+1)`, the remainder after `n` terms is
    /// bounded by `prefactor |base|^(n+1) P(count > n)`.
    pub fn evaluate(&self, counts: &CountDistribution, tolerance: f64) -> SeriesResult {
        let q = self.ratio();
        let len = counts.probs.len();
        // Probability above bin n, including mass outside the table.
        let mut above = vec![counts.tail_mass; len];
        for n in (0..len.saturating_sub(1)).rev() {
            above[n] = above[n + 1] + counts.probs[n + 1];
        }
        let mut value = 0.0;
        let mut power = 1.0;
        let mut bound = f64::INFINITY;
        let mut terms_used = 0;
        for (n, (p, rest)) in counts.probs.iter().zip(&above).enumerate() {
            value += power * p;
            power *= self.base;
            terms_used = n + 1;
            bound = self.prefactor * q.powi(n as i32 + 1) * rest;
            if bound < tolerance {
                break;
            }
        }
        SeriesResult {
            value: self.prefactor * value,
            terms_used,
            ratio: q,
            converged: bound < tolerance,
            truncation_bound: bound,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeriesResult {
    pub value: f64,
    pub terms_used: usize,
    pub ratio: f64,
    pub converged: bool,
    pub truncation_bound: f64,
}

pub fn wall_series(
    counts: &CountDistribution,
    a2: f64,
    eta_h: f64,
    tolerance: f64,
) -> Result<SeriesResult> {
    Ok(SeriesFunctional::wall(a2, eta_h)?.evaluate(counts, tolerance))
}

/// `noisy_counts` must be measured at displacement `w.center * sqrt(eta)`.
/// The result estimates the clean-state `P(w.center, 1 - 2 a2)`.
pub fn modified_series(
    noisy_counts: &CountDistribution,
    w: &GaussianWitness,
    ch: &ChannelParams,
    eta_h: f64,
    tolerance: f64,
) -> Result<SeriesResult> {
    Ok(SeriesFunctional::modified(w, ch, eta_h)?.evaluate(noisy_counts, tolerance))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Histogram {
    pub bins: Vec<u64>,
    pub shots: u64,
}

impl Histogram {
    pub fn frequencies(&self) -> Vec<f64> {
        self.bins.iter().map(|&k| k as f64 / self.shots as f64).collect()
    }
}

/// Draws `shots` outcomes from the tabulated bins with a ChaCha8 stream
/// seeded by `seed`. The tail outside the table is not sampled.
pub fn sample_counts(counts: &CountDistribution, shots: u64, seed: u64) -> Result<Histogram> {
    if shots == 0 {
        return Err(Error::param("shots", "must be >= 1"));
    }
    let dist = WeightedIndex::new(&counts.probs)
        .map_err(|e| Error::param("counts", e.to_string()))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut bins = vec![0u64; counts.probs.len()];
    for _ in 0..shots {
        bins[dist.sample(&mut rng)] += 1;
    }
    Ok(Histogram { bins, shots })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ShotEstimate {
    pub estimate: f64,
    pub stderr: f64,
}

/// Plugs empirical frequencies into the series. The standard error follows
/// from the multinomial covariance: `Var = (sum_n w_n^2 p_n - (sum_n w_n p_n)^2) / N`.
pub fn reconstruct_with_shot_noise(hist: &Histogram, f: &SeriesFunctional) -> ShotEstimate {
    let freqs = hist.frequencies();
    let (mut m1, mut m2) = (0.0, 0.0);
    for (n, p) in freqs.iter().enumerate() {
        let w = f.weight(n);
        m1 += w * p;
        m2 += w * w * p;
    }
    let var = ((m2 - m1 * m1) / hist.shots as f64).max(0.0);
    ShotEstimate {
        estimate: m1,
        stderr: var.sqrt(),
    }
}
