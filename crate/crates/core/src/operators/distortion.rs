use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::feasibility::IntervalSet;

/// Largest supported bit depth; beyond this Δ underflows the f64 mantissa
/// relative to unit-range signals.
pub const MAX_BITS: u32 = 48;

/// Forward distortion applied to a clean signal.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DistortionSpec {
    Clip { theta_plus: f64, theta_minus: f64 },
    /// Midriser quantizer on `[−1, 1]` with bin width `2^(1−n_bits)`.
    QuantizeMidriser { n_bits: u32 },
    None,
}

impl DistortionSpec {
    /// Symmetric clipper at `±theta`.
    pub fn clip_symmetric(theta: f64) -> Result<Self> {
        Self::clip(theta, -theta)
    }

    pub fn clip(theta_plus: f64, theta_minus: f64) -> Result<Self> {
        let spec = DistortionSpec::Clip {
            theta_plus,
            theta_minus,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn quantize(n_bits: u32) -> Result<Self> {
        let spec = DistortionSpec::QuantizeMidriser { n_bits };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            DistortionSpec::Clip {
                theta_plus,
                theta_minus,
            } => {
                if !(theta_plus > theta_minus) || !theta_plus.is_finite() || !theta_minus.is_finite() {
                    return Err(Error::InvalidArgument(format!(
                        "clip thresholds must be finite with theta_plus > theta_minus (got {theta_plus}, {theta_minus})"
                    )));
                }
            }
            DistortionSpec::QuantizeMidriser { n_bits } => {
                if n_bits == 0 || n_bits > MAX_BITS {
                    return Err(Error::InvalidArgument(format!(
                        "bit depth must be in 1..={MAX_BITS} (got {n_bits})"
                    )));
                }
            }
            DistortionSpec::None => {}
        }
        Ok(())
    }

    /// Quantizer bin width, if this is a quantizer.
    pub fn delta(&self) -> Option<f64> {
        match *self {
            DistortionSpec::QuantizeMidriser { n_bits } => Some(midriser_delta(n_bits)),
            _ => None,
        }
    }

    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        match *self {
            DistortionSpec::Clip {
                theta_plus,
                theta_minus,
            } => clip(x, theta_plus, theta_minus),
            DistortionSpec::QuantizeMidriser { n_bits } => quantize_midriser(x, n_bits),
            DistortionSpec::None => x.to_vec(),
        }
    }

    /// Pre-image of `y` under this distortion.
    pub fn feasibility_set(&self, y: &[f64]) -> Result<IntervalSet> {
        self.validate()?;
        match *self {
            DistortionSpec::Clip {
                theta_plus,
                theta_minus,
            } => IntervalSet::from_clipping(y, theta_plus, theta_minus),
            DistortionSpec::QuantizeMidriser { n_bits } => {
                IntervalSet::from_quantization(y, midriser_delta(n_bits), 1.0)
            }
            DistortionSpec::None => IntervalSet::singleton(y),
        }
    }

    /// Sweep coordinate: the upper clip level, or the bit depth.
    pub fn parameter(&self) -> f64 {
        match *self {
            DistortionSpec::Clip { theta_plus, .. } => theta_plus,
            DistortionSpec::QuantizeMidriser { n_bits } => f64::from(n_bits),
            DistortionSpec::None => 0.0,
        }
    }

    pub fn task_name(&self) -> &'static str {
        match self {
            DistortionSpec::Clip { .. } => "declipping",
            DistortionSpec::QuantizeMidriser { .. } => "dequantization",
            DistortionSpec::None => "none",
        }
    }
}

impl fmt::Display for DistortionSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            DistortionSpec::Clip {
                theta_plus,
                theta_minus,
            } if theta_minus == -theta_plus => write!(f, "clip:{theta_plus}"),
            DistortionSpec::Clip {
                theta_plus,
                theta_minus,
            } => write!(f, "clip:{theta_plus}:{theta_minus}"),
            DistortionSpec::QuantizeMidriser { n_bits } => write!(f, "quant:{n_bits}"),
            DistortionSpec::None => f.write_str("none"),
        }
    }
}

/// Parses `clip:θ`, `clip:θ⁺:θ⁻`, `quant:Nb` or `none`.
impl FromStr for DistortionSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidArgument(format!("unrecognized distortion {s:?} (expected clip:θ or quant:Nb)"));
        let parts: Vec<&str> = s.trim().split(':').collect();
        let num = |p: &str| p.trim().parse::<f64>().map_err(|_| bad());
        match parts.as_slice() {
            ["none"] => Ok(DistortionSpec::None),
            ["clip", t] => DistortionSpec::clip_symmetric(num(t)?),
            ["clip", tp, tm] => DistortionSpec::clip(num(tp)?, num(tm)?),
            ["quant", b] => DistortionSpec::quantize(b.trim().parse().map_err(|_| bad())?),
            _ => Err(bad()),
        }
    }
}

/// Element-wise hard clipping to `[theta_minus, theta_plus]`.
pub fn clip(x: &[f64], theta_plus: f64, theta_minus: f64) -> Vec<f64> {
    x.iter().map(|&v| v.max(theta_minus).min(theta_plus)).collect()
}

/// Bin width `Δ = 2^(1−n_bits)`; exact in binary floating point.
pub fn midriser_delta(n_bits: u32) -> f64 {
    2f64.powi(1 - n_bits as i32)
}

/// Uniform midriser quantizer on `[−1, 1]`: `Δ·(⌊x/Δ⌋ + ½)`, saturated to
/// the outermost levels `±(1 − Δ/2)`. Zero is never an output level.
pub fn quantize_midriser(x: &[f64], n_bits: u32) -> Vec<f64> {
    let delta = midriser_delta(n_bits);
    let top = 1.0 - 0.5 * delta;
    x.iter()
        .map(|&v| (delta * ((v / delta).floor() + 0.5)).clamp(-top, top))
        .collect()
}
