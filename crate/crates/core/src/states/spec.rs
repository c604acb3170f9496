use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Mixture weights must sum to one within this tolerance.
pub const WEIGHT_SUM_TOL: f64 = 1e-12;
/// Deepest mixture nesting accepted by the parser.
pub const MAX_NESTING: usize = 16;

/// A single-mode bosonic state described declaratively.
#[derive(Debug, Clone, PartialEq)]
pub enum StateSpec {
    Fock { n: u32 },
    Coherent { amplitude: Complex64 },
    Thermal { mean_photons: f64 },
    Mixture(Vec<Component>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Component {
    pub weight: f64,
    pub state: StateSpec,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
enum RawSpec {
    Fock { n: u32 },
    Coherent { re: f64, im: f64 },
    Thermal { nbar: f64 },
    Mixture { components: Vec<RawComponent> },
}

#[derive(Debug, Serialize, Deserialize)]
struct RawComponent {
    weight: f64,
    state: RawSpec,
}

impl StateSpec {
    pub fn fock(n: u32) -> Self {
        StateSpec::Fock { n }
    }

    pub fn vacuum() -> Self {
        StateSpec::Fock { n: 0 }
    }

    pub fn coherent(re: f64, im: f64) -> Self {
        StateSpec::Coherent {
            amplitude: Complex64::new(re, im),
        }
    }

    pub fn thermal(mean_photons: f64) -> Self {
        StateSpec::Thermal { mean_photons }
    }

    /// Builds and validates a mixture. Weights are checked, never renormalized.
    pub fn mixture(components: Vec<(f64, StateSpec)>) -> Result<Self> {
        let spec = StateSpec::Mixture(
            components
                .into_iter()
                .map(|(weight, state)| Component { weight, state })
                .collect(),
        );
        spec.validate()?;
        Ok(spec)
    }

    /// `eta |1><1| + (1 - eta) |0><0|`, the lossy single photon.
    pub fn lossy_single_photon(eta: f64) -> Result<Self> {
        Self::mixture(vec![(eta, Self::fock(1)), (1.0 - eta, Self::vacuum())])
    }

    pub fn validate(&self) -> Result<()> {
        self.validate_at(0)
    }

    fn validate_at(&self, depth: usize) -> Result<()> {
        if depth > MAX_NESTING {
            return Err(Error::InvalidSpec(format!(
                "mixture nesting deeper than {MAX_NESTING}"
            )));
        }
        match self {
            StateSpec::Fock { .. } => Ok(()),
            StateSpec::Coherent { amplitude } => {
                if amplitude.re.is_finite() && amplitude.im.is_finite() {
                    Ok(())
                } else {
                    Err(Error::InvalidSpec("coherent amplitude must be finite".into()))
                }
            }
            StateSpec::Thermal { mean_photons } => {
                if mean_photons.is_finite() && *mean_photons >= 0.0 {
                    Ok(())
                } else {
                    Err(Error::InvalidSpec(format!(
                        "thermal mean photon number must be >= 0, got {mean_photons}"
                    )))
                }
            }
            StateSpec::Mixture(components) => {
                if components.is_empty() {
                    return Err(Error::InvalidSpec("mixture has no components".into()));
                }
                let mut total = 0.0;
                for c in components {
                    if !(c.weight.is_finite() && c.weight >= 0.0) {
                        return Err(Error::InvalidSpec(format!(
                            "mixture weight must be >= 0, got {}",
                            c.weight
                        )));
                    }
                    total += c.weight;
                    c.state.validate_at(depth + 1)?;
                }
                if (total - 1.0).abs() > WEIGHT_SUM_TOL {
                    return Err(Error::InvalidSpec(format!(
                        "mixture weights sum to {total}, not 1"
                    )));
                }
                Ok(())
            }
        }
    }

    /// Mean photon number `<a^dagger a>`.
    pub fn mean_photons(&self) -> f64 {
        match self {
            StateSpec::Fock { n } => *n as f64,
            StateSpec::Coherent { amplitude } => amplitude.norm_sqr(),
            StateSpec::Thermal { mean_photons } => *mean_photons,
            StateSpec::Mixture(cs) => cs.iter().map(|c| c.weight * c.state.mean_photons()).sum(),
        }
    }

    /// True for states whose P-function is a probability density
    /// (coherent, thermal, and mixtures of those; the vacuum counts as coherent).
    pub fn is_classical_by_construction(&self) -> bool {
        match self {
            StateSpec::Fock { n } => *n == 0,
            StateSpec::Coherent { .. } | StateSpec::Thermal { .. } => true,
            StateSpec::Mixture(cs) => cs.iter().all(|c| c.state.is_classical_by_construction()),
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let raw: RawSpec =
            serde_json::from_str(text).map_err(|e| Error::MalformedSpec(e.to_string()))?;
        let spec = StateSpec::from(raw);
        spec.validate()?;
        Ok(spec)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&RawSpec::from(self)).expect("state spec serializes")
    }
}

impl From<RawSpec> for StateSpec {
    fn from(raw: RawSpec) -> Self {
        match raw {
            RawSpec::Fock { n } => StateSpec::Fock { n },
            RawSpec::Coherent { re, im } => StateSpec::coherent(re, im),
            RawSpec::Thermal { nbar } => StateSpec::Thermal { mean_photons: nbar },
            RawSpec::Mixture { components } => StateSpec::Mixture(
                components
                    .into_iter()
                    .map(|c| Component {
                        weight: c.weight,
                        state: c.state.into(),
                    })
                    .collect(),
            ),
        }
    }
}

impl From<&StateSpec> for RawSpec {
    fn from(spec: &StateSpec) -> Self {
        match spec {
            StateSpec::Fock { n } => RawSpec::Fock { n: *n },
            StateSpec::Coherent { amplitude } => RawSpec::Coherent {
                re: amplitude.re,
                im: amplitude.im,
            },
            StateSpec::Thermal { mean_photons } => RawSpec::Thermal {
                nbar: *mean_photons,
            },
            StateSpec::Mixture(cs) => RawSpec::Mixture {
                components: cs
                    .iter()
                    .map(|c| RawComponent {
                        weight: c.weight,
                        state: (&c.state).into(),
                    })
                    .collect(),
            },
        }
    }
}

/// A small set of named states used across tests, examples and the CLI docs.
/// All have mean photon number <= 2.
pub fn catalog() -> Vec<(&'static str, StateSpec)> {
    let mix = |parts: Vec<(f64, StateSpec)>| StateSpec::mixture(parts).expect("valid catalog mixture");
    vec![
        ("vacuum", StateSpec::vacuum()),
        ("fock1", StateSpec::fock(1)),
        ("fock2", StateSpec::fock(2)),
        ("coherent", StateSpec::coherent(0.6, -0.4)),
        ("coherent_far", StateSpec::coherent(-1.0, 0.7)),
        ("thermal", StateSpec::thermal(0.7)),
        ("lossy_photon", mix(vec![(0.8, StateSpec::fock(1)), (0.2, StateSpec::vacuum())])),
        (
            "classical_mix",
            mix(vec![(0.5, StateSpec::coherent(0.5, 0.5)), (0.5, StateSpec::thermal(0.4))]),
        ),
        (
            "nested_mix",
            mix(vec![
                (0.25, StateSpec::fock(2)),
                (
                    0.75,
                    mix(vec![(0.5, StateSpec::fock(1)), (0.5, StateSpec::coherent(0.3, 0.2))]),
                ),
            ]),
        ),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_fock() {
        assert_eq!(StateSpec::from_json(r#"{"type":"fock","n":1}"#).unwrap(), StateSpec::fock(1));
    }

    #[test]
    fn parses_lossy_photon_mixture() {
        let text = r#"{"type":"mixture","components":[
            {"weight":0.8,"state":{"type":"fock","n":1}},
            {"weight":0.2,"state":{"type":"fock","n":0}}]}"#;
        let spec = StateSpec::from_json(text).unwrap();
        let expect =
            StateSpec::mixture(vec![(0.8, StateSpec::fock(1)), (0.2, StateSpec::vacuum())]).unwrap();
        assert_eq!(spec, expect);
    }

    #[test]
    fn rejects_underweight_mixture() {
        let text = r#"{"type":"mixture","components":[{"weight":0.7,"state":{"type":"fock","n":1}}]}"#;
        let err = StateSpec::from_json(text).unwrap_err();
        assert!(matches!(err, Error::InvalidSpec(_)), "{err}");
    }

    #[test]
    fn rejects_negative_values() {
        assert!(StateSpec::from_json(r#"{"type":"thermal","nbar":-0.1}"#).is_err());
        assert!(StateSpec::from_json(r#"{"type":"fock","n":-1}"#).is_err());
        let text = r#"{"type":"mixture","components":[
            {"weight":1.5,"state":{"type":"fock","n":1}},
            {"weight":-0.5,"state":{"type":"fock","n":0}}]}"#;
        assert!(StateSpec::from_json(text).is_err());
    }

    #[test]
    fn rejects_malformed() {
        assert!(matches!(
            StateSpec::from_json(r#"{"type":"squeezed","r":1}"#),
            Err(Error::MalformedSpec(_))
        ));
        assert!(StateSpec::from_json(r#"{"type":"coherent","re":1}"#).is_err());
        assert!(StateSpec::from_json("not json").is_err());
    }

    #[test]
    fn rejects_deep_nesting() {
        let mut text = r#"{"type":"fock","n":0}"#.to_string();
        for _ in 0..(MAX_NESTING + 2) {
            text = format!(r#"{{"type":"mixture","components":[{{"weight":1.0,"state":{text}}}]}}"#);
        }
        assert!(matches!(StateSpec::from_json(&text), Err(Error::InvalidSpec(_))));
    }

    #[test]
    fn json_round_trip_of_catalog() {
        for (name, spec) in catalog() {
            let back = StateSpec::from_json(&spec.to_json()).unwrap();
            assert_eq!(back, spec, "{name}");
        }
    }

    #[test]
    fn catalog_mean_photons_bounded() {
        for (name, spec) in catalog() {
            assert!(spec.mean_photons() <= 2.0, "{name}");
        }
    }
}
