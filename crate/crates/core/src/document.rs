//! JSON state documents: one constructor plus an ordered channel chain.
//!
//! ```json
//! {"schema": 1, "type": "cat", "alpha": 2.0,
//!  "channels": [{"type": "loss", "eta": 0.5}]}
//! ```

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::channels::GaussianChannel;
use crate::error::{Error, Result};
use crate::linalg::{CMatrix, CVector};
use crate::state::{GaussianSumState, GaussianTerm};
use crate::states::{self, BreedingSpec, CatSpec, Cutoff, GkpSpec, Protocol};

pub const SCHEMA_VERSION: u32 = 1;

/// A complex number written either as a bare real or as `[re, im]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ComplexValue {
    Real(f64),
    Pair([f64; 2]),
}

impl ComplexValue {
    pub fn to_complex(self) -> Complex64 {
        match self {
            ComplexValue::Real(re) => Complex64::new(re, 0.0),
            ComplexValue::Pair([re, im]) => Complex64::new(re, im),
        }
    }

    pub fn from_complex(z: Complex64) -> Self {
        if z.im == 0.0 {
            ComplexValue::Real(z.re)
        } else {
            ComplexValue::Pair([z.re, z.im])
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TermDocument {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub log_coeff: Option<ComplexValue>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coeff: Option<ComplexValue>,
    pub mean: Vec<ComplexValue>,
    /// Row-major.
    pub cov: Vec<Vec<ComplexValue>>,
}

impl TermDocument {
    fn build(&self, dim: usize) -> Result<GaussianTerm> {
        if self.mean.len() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: self.mean.len(),
            });
        }
        if self.cov.len() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: self.cov.len(),
            });
        }
        for row in &self.cov {
            if row.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: row.len(),
                });
            }
        }
        let mean = CVector::from_iterator(dim, self.mean.iter().map(|z| z.to_complex()));
        let cov =
            CMatrix::from_row_iterator(dim, dim, self.cov.iter().flatten().map(|z| z.to_complex()));
        match (self.log_coeff, self.coeff) {
            (Some(l), None) => GaussianTerm::from_log_coeff(l.to_complex(), mean, cov),
            (None, Some(c)) => GaussianTerm::new(c.to_complex(), mean, cov),
            _ => Err(Error::InvalidParameter(
                "each term needs exactly one of log_coeff or coeff".into(),
            )),
        }
    }

    fn from_term(t: &GaussianTerm) -> Self {
        let dim = t.dim();
        TermDocument {
            log_coeff: Some(ComplexValue::from_complex(t.log_coeff())),
            coeff: None,
            mean: t
                .mean()
                .iter()
                .map(|&z| ComplexValue::from_complex(z))
                .collect(),
            cov: (0..dim)
                .map(|i| {
                    (0..dim)
                        .map(|j| ComplexValue::from_complex(t.cov()[(i, j)]))
                        .collect()
                })
                .collect(),
        }
    }
}

fn one() -> usize {
    1
}

fn yes() -> bool {
    true
}

fn unit() -> ComplexValue {
    ComplexValue::Real(1.0)
}

fn nothing() -> ComplexValue {
    ComplexValue::Real(0.0)
}

fn adaptive() -> Cutoff {
    Cutoff::Adaptive
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum StateKind {
    Vacuum {
        #[serde(default = "one")]
        n_modes: usize,
    },
    Coherent {
        alpha: f64,
        #[serde(default)]
        alpha_im: f64,
    },
    Squeezed {
        r: f64,
    },
    Cat {
        alpha: f64,
        #[serde(default)]
        alpha_im: f64,
    },
    Gkp {
        epsilon: f64,
        #[serde(default = "unit")]
        a0: ComplexValue,
        #[serde(default = "nothing")]
        a1: ComplexValue,
        #[serde(default = "adaptive")]
        cutoff: Cutoff,
    },
    Breed {
        /// Defaults to the amplitude giving a `2√π` final spacing.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        alpha: Option<f64>,
        r: f64,
        rounds: u32,
        protocol: Protocol,
        #[serde(default = "yes")]
        recenter: bool,
    },
    Custom {
        n_modes: usize,
        terms: Vec<TermDocument>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum ChannelDocument {
    /// Loss on every mode.
    Loss { eta: f64 },
    /// One-mode translation by `(x, p)`.
    Displacement {
        d: [f64; 2],
        #[serde(default)]
        mode: usize,
    },
    Rotation {
        theta: f64,
        #[serde(default)]
        mode: usize,
    },
    Squeezing {
        r: f64,
        #[serde(default)]
        mode: usize,
    },
}

impl ChannelDocument {
    pub fn build(&self, n_modes: usize) -> Result<GaussianChannel> {
        match *self {
            ChannelDocument::Loss { eta } => GaussianChannel::loss(eta, n_modes),
            ChannelDocument::Displacement { d, mode } => {
                GaussianChannel::displacement(&d).on_mode(mode, n_modes)
            }
            ChannelDocument::Rotation { theta, mode } => {
                GaussianChannel::rotation(theta).on_mode(mode, n_modes)
            }
            ChannelDocument::Squeezing { r, mode } => {
                GaussianChannel::squeezing(r).on_mode(mode, n_modes)
            }
        }
    }
}

/// Parameters that `sweep` can vary.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    Eta,
    Alpha,
    Epsilon,
    R,
}

impl Axis {
    pub fn name(self) -> &'static str {
        match self {
            Axis::Eta => "eta",
            Axis::Alpha => "alpha",
            Axis::Epsilon => "epsilon",
            Axis::R => "r",
        }
    }
}

impl std::str::FromStr for Axis {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "eta" => Ok(Axis::Eta),
            "alpha" => Ok(Axis::Alpha),
            "epsilon" => Ok(Axis::Epsilon),
            "r" => Ok(Axis::R),
            other => Err(Error::InvalidParameter(format!(
                "unknown sweep axis '{other}' (expected eta, alpha, epsilon or r)"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StateDocument {
    pub state: StateKind,
    pub channels: Vec<ChannelDocument>,
}

impl StateDocument {
    pub fn new(state: StateKind) -> Self {
        StateDocument {
            state,
            channels: Vec::new(),
        }
    }

    pub fn with_channel(mut self, channel: ChannelDocument) -> Self {
        self.channels.push(channel);
        self
    }

    pub fn parse(text: &str) -> Result<Self> {
        let value: Value = serde_json::from_str(text)
            .map_err(|e| Error::InvalidParameter(format!("malformed JSON: {e}")))?;
        Self::from_value(value)
    }

    pub fn from_value(value: Value) -> Result<Self> {
        let Value::Object(mut map) = value else {
            return Err(Error::InvalidParameter(
                "state document must be a JSON object".into(),
            ));
        };
        if let Some(schema) = map.remove("schema") {
            if schema.as_u64() != Some(SCHEMA_VERSION as u64) {
                return Err(Error::InvalidParameter(format!(
                    "unsupported schema {schema}, expected {SCHEMA_VERSION}"
                )));
            }
        }
        let channels = match map.remove("channels") {
            Some(v) => serde_json::from_value(v)
                .map_err(|e| Error::InvalidParameter(format!("bad channel list: {e}")))?,
            None => Vec::new(),
        };
        let state = serde_json::from_value(Value::Object(map))
            .map_err(|e| Error::InvalidParameter(format!("bad state: {e}")))?;
        Ok(StateDocument { state, channels })
    }

    pub fn to_value(&self) -> Value {
        let mut v = serde_json::to_value(&self.state).expect("state kinds serialize");
        let map = v.as_object_mut().expect("tagged enum is an object");
        map.insert("schema".into(), Value::from(SCHEMA_VERSION));
        if !self.channels.is_empty() {
            map.insert(
                "channels".into(),
                serde_json::to_value(&self.channels).expect("channels serialize"),
            );
        }
        v
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_value()).expect("value prints")
    }

    /// A `custom` document listing every term of `state` exactly.
    pub fn from_state(state: &GaussianSumState) -> Self {
        StateDocument::new(StateKind::Custom {
            n_modes: state.n_modes(),
            terms: state.terms().iter().map(TermDocument::from_term).collect(),
        })
    }

    pub fn n_modes(&self) -> usize {
        match &self.state {
            StateKind::Vacuum { n_modes } | StateKind::Custom { n_modes, .. } => *n_modes,
            _ => 1,
        }
    }

    pub fn build(&self) -> Result<GaussianSumState> {
        self.build_capped(states::DEFAULT_MAX_TERMS)
    }

    pub fn build_capped(&self, max_terms: usize) -> Result<GaussianSumState> {
        let mut state = match &self.state {
            StateKind::Vacuum { n_modes } => {
                if *n_modes == 0 {
                    return Err(Error::InvalidParameter("n_modes must be positive".into()));
                }
                states::vacuum(*n_modes)
            }
            StateKind::Coherent { alpha, alpha_im } => {
                states::coherent(finite(Complex64::new(*alpha, *alpha_im))?)
            }
            StateKind::Squeezed { r } => states::squeezed_vacuum(finite_real(*r)?),
            StateKind::Cat { alpha, alpha_im } => CatSpec {
                alpha: finite(Complex64::new(*alpha, *alpha_im))?,
            }
            .build(),
            StateKind::Gkp {
                epsilon,
                a0,
                a1,
                cutoff,
            } => GkpSpec {
                epsilon: *epsilon,
                a0: a0.to_complex(),
                a1: a1.to_complex(),
                cutoff: *cutoff,
            }
            .build_capped(max_terms)?,
            StateKind::Breed {
                alpha,
                r,
                rounds,
                protocol,
                recenter,
            } => BreedingSpec {
                alpha: alpha.unwrap_or_else(|| BreedingSpec::gkp_amplitude(*rounds)),
                r: *r,
                rounds: *rounds,
                protocol: *protocol,
                recenter: *recenter,
            }
            .build_capped(max_terms)?,
            StateKind::Custom { n_modes, terms } => {
                if terms.len() > max_terms {
                    return Err(Error::TermCapExceeded {
                        terms: terms.len(),
                        cap: max_terms,
                    });
                }
                let built = terms
                    .iter()
                    .map(|t| t.build(2 * n_modes))
                    .collect::<Result<Vec<_>>>()?;
                GaussianSumState::new(*n_modes, built)?
            }
        };
        for ch in &self.channels {
            state = ch.build(state.n_modes())?.apply(&state)?;
        }
        Ok(state)
    }

    /// Copy with one parameter replaced. `eta` sets the last loss channel,
    /// appending one if the chain has none.
    pub fn with_param(&self, axis: Axis, value: f64) -> Result<Self> {
        let mut doc = self.clone();
        let mismatch = || {
            Error::InvalidParameter(format!(
                "axis '{}' does not apply to this state",
                axis.name()
            ))
        };
        match axis {
            Axis::Eta => {
                match doc
                    .channels
                    .iter_mut()
                    .rev()
                    .find(|c| matches!(c, ChannelDocument::Loss { .. }))
                {
                    Some(ChannelDocument::Loss { eta }) => *eta = value,
                    _ => doc.channels.push(ChannelDocument::Loss { eta: value }),
                }
            }
            Axis::Alpha => match &mut doc.state {
                StateKind::Coherent { alpha, .. } | StateKind::Cat { alpha, .. } => *alpha = value,
                StateKind::Breed { alpha, .. } => *alpha = Some(value),
                _ => return Err(mismatch()),
            },
            Axis::Epsilon => match &mut doc.state {
                StateKind::Gkp { epsilon, .. } => *epsilon = value,
                _ => return Err(mismatch()),
            },
            Axis::R => match &mut doc.state {
                StateKind::Squeezed { r } | StateKind::Breed { r, .. } => *r = value,
                _ => return Err(mismatch()),
            },
        }
        Ok(doc)
    }
}

fn finite(z: Complex64) -> Result<Complex64> {
    if z.is_finite() {
        Ok(z)
    } else {
        Err(Error::InvalidParameter("amplitude must be finite".into()))
    }
}

fn finite_real(v: f64) -> Result<f64> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::InvalidParameter("parameter must be finite".into()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine;

    #[test]
    fn parses_cat_with_loss() {
        let doc = StateDocument::parse(
            r#"{"schema": 1, "type": "cat", "alpha": 2.0, "channels": [{"type": "loss", "eta": 0.5}]}"#,
        )
        .unwrap();
        let r = engine::qcs(&doc.build().unwrap()).unwrap();
        assert!((r.qcs_squared - 1.0).abs() < 1e-9);
    }

    #[test]
    fn rejects_unknown_fields_and_schemas() {
        for text in [
            r#"{"type": "cat", "alpha": 2.0, "beta": 1}"#,
            r#"{"schema": 2, "type": "vacuum"}"#,
            r#"{"type": "laser"}"#,
            r#"{"type": "vacuum", "channels": [{"type": "loss", "eta": 0.5, "x": 1}]}"#,
            r#"[1, 2]"#,
            r#"{"type": "cat""#,
        ] {
            assert!(StateDocument::parse(text).is_err(), "{text}");
        }
    }

    #[test]
    fn builtin_documents_round_trip() {
        let docs = [
            StateKind::Vacuum { n_modes: 2 },
            StateKind::Cat {
                alpha: 1.5,
                alpha_im: -0.25,
            },
            StateKind::Gkp {
                epsilon: 0.3,
                a0: ComplexValue::Real(1.0),
                a1: ComplexValue::Pair([0.0, 1.0]),
                cutoff: Cutoff::Fixed(6),
            },
            StateKind::Breed {
                alpha: None,
                r: 1.2,
                rounds: 2,
                protocol: Protocol::Efficient,
                recenter: true,
            },
        ];
        for kind in docs {
            let doc = StateDocument::new(kind).with_channel(ChannelDocument::Loss { eta: 0.9 });
            let again = StateDocument::parse(&doc.to_json()).unwrap();
            assert_eq!(again, doc);
            let state = doc.build().unwrap();
            let custom =
                StateDocument::parse(&StateDocument::from_state(&state).to_json()).unwrap();
            assert_eq!(custom.build().unwrap(), state);
        }
    }

    #[test]
    fn custom_terms() {
        let doc = StateDocument::parse(
            r#"{"type": "custom", "n_modes": 1, "terms": [
                {"coeff": 1.0, "mean": [0.0, 0.0], "cov": [[0.5, 0.0], [0.0, 0.5]]}]}"#,
        )
        .unwrap();
        assert_eq!(doc.build().unwrap(), states::vacuum(1));
        let bad = StateDocument::parse(
            r#"{"type": "custom", "n_modes": 1, "terms": [
                {"mean": [0.0, 0.0], "cov": [[0.5, 0.0], [0.0, 0.5]]}]}"#,
        )
        .unwrap();
        assert!(bad.build().is_err());
    }

    #[test]
    fn with_param_axes() {
        let doc = StateDocument::parse(r#"{"type": "cat", "alpha": 1.0}"#).unwrap();
        let d = doc.with_param(Axis::Eta, 0.7).unwrap();
        assert_eq!(d.channels, vec![ChannelDocument::Loss { eta: 0.7 }]);
        let d = d.with_param(Axis::Eta, 0.6).unwrap();
        assert_eq!(d.channels, vec![ChannelDocument::Loss { eta: 0.6 }]);
        let d = d.with_param(Axis::Alpha, 2.0).unwrap();
        assert!(matches!(d.state, StateKind::Cat { alpha, .. } if alpha == 2.0));
        assert!(doc.with_param(Axis::Epsilon, 0.1).is_err());
        assert!("zeta".parse::<Axis>().is_err());
    }
}
