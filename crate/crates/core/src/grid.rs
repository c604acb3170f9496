use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Square lattice of phase-space points restricted to a disk.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhaseGrid {
    pub center: Complex64,
    pub radius: f64,
    pub step: f64,
}

impl PhaseGrid {
    pub fn new(center: Complex64, radius: f64, step: f64) -> Result<Self> {
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(Error::param("radius", format!("must be > 0, got {radius}")));
        }
        if !(step > 0.0 && step.is_finite()) {
            return Err(Error::param("step", format!("must be > 0, got {step}")));
        }
        Ok(PhaseGrid { center, radius, step })
    }

    pub fn centered(radius: f64, step: f64) -> Result<Self> {
        Self::new(Complex64::new(0.0, 0.0), radius, step)
    }

    /// Lattice points `center + step (i + i j)` with `|offset| <= radius`,
    /// ordered row by row (imaginary part outer).
    pub fn points(&self) -> Vec<Complex64> {
        let n = (self.radius / self.step + 1e-9).floor() as i64;
        let r2 = self.radius * self.radius * (1.0 + 1e-12);
        let mut out = Vec::new();
        for j in -n..=n {
            for i in -n..=n {
                let off = Complex64::new(i as f64 * self.step, j as f64 * self.step);
                if off.norm_sqr() <= r2 {
                    out.push(self.center + off);
                }
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn includes_center_and_axis_extremes() {
        let g = PhaseGrid::centered(1.0, 0.5).unwrap();
        let pts = g.points();
        assert!(pts.contains(&Complex64::new(0.0, 0.0)));
        assert!(pts.contains(&Complex64::new(1.0, 0.0)));
        assert!(!pts.contains(&Complex64::new(1.0, 0.5)));
        assert_eq!(pts.len(), 13);
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(PhaseGrid::centered(0.0, 0.1).is_err());
        assert!(PhaseGrid::centered(1.0, -0.1).is_err());
    }
}
