use serde::{Deserialize, Serialize};

use crate::{Error, Mat2, Vec2};

/// Single-valued gauge function `χ(r)` with analytic gradient and Hessian.
///
/// Deserialization goes through [`GaugeSpec`], which is where multivalued
/// forms are rejected.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "GaugeSpec", into = "GaugeSpec")]
pub enum GaugeFunction {
    Zero,
    Constant(f64),
    /// `g·r + c`
    Linear { gradient: Vec2, offset: f64 },
    /// `a·exp(−|r − c|²/(2w²))`
    Gaussian {
        amplitude: f64,
        center: Vec2,
        width: f64,
    },
    /// `a·sin(k·r + φ)`
    PlaneWave {
        amplitude: f64,
        wavevector: Vec2,
        phase: f64,
    },
    Sum(Vec<GaugeFunction>),
}

/// Declarative form of a gauge function, as written in configs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GaugeSpec {
    Zero,
    Constant {
        value: f64,
    },
    Linear {
        gradient: Vec2,
        #[serde(default)]
        offset: f64,
    },
    Gaussian {
        amplitude: f64,
        center: Vec2,
        width: f64,
    },
    PlaneWave {
        amplitude: f64,
        wavevector: Vec2,
        #[serde(default)]
        phase: f64,
    },
    /// `c·θ(r)` about a center. Its gradient is curl-free but it jumps by
    /// `2πc` across a branch cut, so it is never accepted as a gauge.
    Angular {
        center: Vec2,
        coefficient: f64,
    },
    Sum {
        terms: Vec<GaugeSpec>,
    },
}

impl TryFrom<GaugeSpec> for GaugeFunction {
    type Error = Error;

    fn try_from(spec: GaugeSpec) -> Result<Self, Error> {
        Ok(match spec {
            GaugeSpec::Zero => GaugeFunction::Zero,
            GaugeSpec::Constant { value } => GaugeFunction::Constant(value),
            GaugeSpec::Linear { gradient, offset } => GaugeFunction::Linear { gradient, offset },
            GaugeSpec::Gaussian {
                amplitude,
                center,
                width,
            } => {
                if !(width > 0.0) {
                    return Err(Error::invalid("width", "gaussian gauge width must be > 0"));
                }
                GaugeFunction::Gaussian {
                    amplitude,
                    center,
                    width,
                }
            }
            GaugeSpec::PlaneWave {
                amplitude,
                wavevector,
                phase,
            } => GaugeFunction::PlaneWave {
                amplitude,
                wavevector,
                phase,
            },
            GaugeSpec::Angular { coefficient, .. } if coefficient == 0.0 => GaugeFunction::Zero,
            GaugeSpec::Angular { coefficient, .. } => {
                return Err(Error::MultivaluedGauge(format!(
                    "angular gauge jumps by 2π·{coefficient} around its center"
                )))
            }
            GaugeSpec::Sum { terms } => GaugeFunction::Sum(
                terms
                    .into_iter()
                    .map(GaugeFunction::try_from)
                    .collect::<Result<_, _>>()?,
            ),
        })
    }
}

impl From<GaugeFunction> for GaugeSpec {
    fn from(g: GaugeFunction) -> Self {
        match g {
            GaugeFunction::Zero => GaugeSpec::Zero,
            GaugeFunction::Constant(value) => GaugeSpec::Constant { value },
            GaugeFunction::Linear { gradient, offset } => GaugeSpec::Linear { gradient, offset },
            GaugeFunction::Gaussian {
                amplitude,
                center,
                width,
            } => GaugeSpec::Gaussian {
                amplitude,
                center,
                width,
            },
            GaugeFunction::PlaneWave {
                amplitude,
                wavevector,
                phase,
            } => GaugeSpec::PlaneWave {
                amplitude,
                wavevector,
                phase,
            },
            GaugeFunction::Sum(terms) => GaugeSpec::Sum {
                terms: terms.into_iter().map(GaugeSpec::from).collect(),
            },
        }
    }
}

impl GaugeFunction {
    pub fn value(&self, p: Vec2) -> f64 {
        match self {
            GaugeFunction::Zero => 0.0,
            GaugeFunction::Constant(c) => *c,
            GaugeFunction::Linear { gradient, offset } => gradient.dot(&p) + offset,
            GaugeFunction::Gaussian {
                amplitude,
                center,
                width,
            } => amplitude * (-(p - center).norm_squared() / (2.0 * width * width)).exp(),
            GaugeFunction::PlaneWave {
                amplitude,
                wavevector,
                phase,
            } => amplitude * (wavevector.dot(&p) + phase).sin(),
            GaugeFunction::Sum(terms) => terms.iter().map(|t| t.value(p)).sum(),
        }
    }

    pub fn gradient(&self, p: Vec2) -> Vec2 {
        match self {
            GaugeFunction::Zero | GaugeFunction::Constant(_) => Vec2::zeros(),
            GaugeFunction::Linear { gradient, .. } => *gradient,
            GaugeFunction::Gaussian { center, width, .. } => {
                -(p - center) * (self.value(p) / (width * width))
            }
            GaugeFunction::PlaneWave {
                amplitude,
                wavevector,
                phase,
            } => wavevector * (amplitude * (wavevector.dot(&p) + phase).cos()),
            GaugeFunction::Sum(terms) => terms.iter().map(|t| t.gradient(p)).sum(),
        }
    }

    pub fn hessian(&self, p: Vec2) -> Mat2 {
        match self {
            GaugeFunction::Zero | GaugeFunction::Constant(_) | GaugeFunction::Linear { .. } => {
                Mat2::zeros()
            }
            GaugeFunction::Gaussian { center, width, .. } => {
                let d = p - center;
                let w2 = width * width;
                (d * d.transpose() / (w2 * w2) - Mat2::identity() / w2) * self.value(p)
            }
            GaugeFunction::PlaneWave {
                amplitude,
                wavevector,
                phase,
            } => wavevector * wavevector.transpose() * (-amplitude * (wavevector.dot(&p) + phase).sin()),
            GaugeFunction::Sum(terms) => terms.iter().map(|t| t.hessian(p)).sum(),
        }
    }
}
