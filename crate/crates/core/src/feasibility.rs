//! Feasibility sets: the pre-image of an observation as a box of intervals.
//!
//! Every distortion handled here (clipping, midriser quantization, exact
//! observation) acts sample by sample, so its pre-image is an axis-aligned
//! box `[lower₀, upper₀] × … × [lower_{N−1}, upper_{N−1}]` whose bounds may be
//! infinite. The Euclidean projection onto such a box is an element-wise
//! clamp, and the gradient of `½·dist(x, box)²` is `x − Π(x)`.

use serde::{Deserialize, Serialize};

use crate::error::{check_len, Error, Result};

/// Per-sample closed intervals `[lower[i], upper[i]]`, possibly unbounded.
///
/// A sample with `lower[i] == upper[i]` is known exactly.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "IntervalSetRepr", into = "IntervalSetRepr")]
pub struct IntervalSet {
    lower: Vec<f64>,
    upper: Vec<f64>,
}

impl IntervalSet {
    /// Builds a box from explicit bounds.
    ///
    /// Rejects NaN bounds, `lower[i] > upper[i]`, and degenerate infinite
    /// intervals (`lower = +∞` or `upper = −∞`), which would be empty.
    pub fn new(lower: Vec<f64>, upper: Vec<f64>) -> Result<Self> {
        check_len(lower.len(), upper.len())?;
        for (i, (&l, &u)) in lower.iter().zip(&upper).enumerate() {
            if l.is_nan() || u.is_nan() {
                return Err(Error::InvalidArgument(format!("NaN bound at sample {i}")));
            }
            if l > u || l == f64::INFINITY || u == f64::NEG_INFINITY {
                return Err(Error::InvalidArgument(format!(
                    "empty interval [{l}, {u}] at sample {i}"
                )));
            }
        }
        Ok(Self { lower, upper })
    }

    /// Pre-image of a clipped observation.
    ///
    /// Samples equal to `theta_plus` become `[θ⁺, +∞)`, samples equal to
    /// `theta_minus` become `(−∞, θ⁻]`, everything else is an exact sample.
    /// Detection uses exact equality: the clipper emits the thresholds
    /// verbatim.
    pub fn from_clipping(y: &[f64], theta_plus: f64, theta_minus: f64) -> Result<Self> {
        if !(theta_plus > theta_minus) {
            return Err(Error::InvalidArgument(format!(
                "clipping thresholds must satisfy theta_plus > theta_minus (got {theta_plus}, {theta_minus})"
            )));
        }
        let mut lower = Vec::with_capacity(y.len());
        let mut upper = Vec::with_capacity(y.len());
        for (i, &v) in y.iter().enumerate() {
            if !v.is_finite() || v > theta_plus || v < theta_minus {
                return Err(Error::InconsistentObservation {
                    index: i,
                    reason: format!("{v} lies outside [{theta_minus}, {theta_plus}]"),
                });
            }
            if v == theta_plus {
                lower.push(theta_plus);
                upper.push(f64::INFINITY);
            } else if v == theta_minus {
                lower.push(f64::NEG_INFINITY);
                upper.push(theta_minus);
            } else {
                lower.push(v);
                upper.push(v);
            }
        }
        Ok(Self { lower, upper })
    }

    /// Pre-image of a midriser-quantized observation with bin width `delta`
    /// and output range `[−saturation, saturation]`.
    ///
    /// Interior levels map to `[y − Δ/2, y + Δ/2]` (closure of the half-open
    /// bin). The outermost levels are saturated and open towards infinity.
    pub fn from_quantization(y: &[f64], delta: f64, saturation: f64) -> Result<Self> {
        const LEVEL_TOL: f64 = 1e-9;
        if !(delta > 0.0) || !delta.is_finite() {
            return Err(Error::InvalidArgument(format!("bin width must be positive (got {delta})")));
        }
        if !(saturation > 0.0) || !saturation.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "saturation must be positive (got {saturation})"
            )));
        }
        let half = 0.5 * delta;
        let top = saturation - half;
        let bottom = -saturation + half;
        if top < bottom - LEVEL_TOL {
            return Err(Error::InvalidArgument(format!(
                "bin width {delta} leaves no level inside ±{saturation}"
            )));
        }

        let mut lower = Vec::with_capacity(y.len());
        let mut upper = Vec::with_capacity(y.len());
        for (i, &v) in y.iter().enumerate() {
            let index = (v / delta - 0.5).round();
            let level = delta * (index + 0.5);
            if !v.is_finite()
                || (v - level).abs() > LEVEL_TOL
                || v > top + LEVEL_TOL
                || v < bottom - LEVEL_TOL
            {
                return Err(Error::InconsistentObservation {
                    index: i,
                    reason: format!("{v} is not a quantizer level for Δ = {delta}, saturation {saturation}"),
                });
            }
            let lo = if (v - bottom).abs() <= LEVEL_TOL {
                f64::NEG_INFINITY
            } else {
                v - half
            };
            let hi = if (v - top).abs() <= LEVEL_TOL {
                f64::INFINITY
            } else {
                v + half
            };
            lower.push(lo);
            upper.push(hi);
        }
        Ok(Self { lower, upper })
    }

    /// The set `{x}`: every sample known exactly.
    pub fn singleton(x: &[f64]) -> Result<Self> {
        if let Some(i) = x.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument(format!("non-finite sample at index {i}")));
        }
        Ok(Self {
            lower: x.to_vec(),
            upper: x.to_vec(),
        })
    }

    pub fn len(&self) -> usize {
        self.lower.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lower.is_empty()
    }

    pub fn lower(&self) -> &[f64] {
        &self.lower
    }

    pub fn upper(&self) -> &[f64] {
        &self.upper
    }

    /// Number of samples whose interval is a single point.
    pub fn exact_count(&self) -> usize {
        self.lower.iter().zip(&self.upper).filter(|(l, u)| l == u).count()
    }

    /// Euclidean projection: element-wise `min(upper, max(lower, x))`.
    pub fn project(&self, x: &[f64]) -> Result<Vec<f64>> {
        check_len(self.len(), x.len())?;
        let mut out = vec![0.0; x.len()];
        self.project_into(x, &mut out);
        Ok(out)
    }

    /// Unchecked projection into a caller-owned buffer.
    pub(crate) fn project_into(&self, x: &[f64], out: &mut [f64]) {
        for (((o, &v), &l), &u) in out.iter_mut().zip(x).zip(&self.lower).zip(&self.upper) {
            *o = v.max(l).min(u);
        }
    }

    /// Squared Euclidean distance from `x` to the box.
    pub fn distance_sq(&self, x: &[f64]) -> Result<f64> {
        check_len(self.len(), x.len())?;
        Ok(self.distance_sq_unchecked(x))
    }

    pub(crate) fn distance_sq_unchecked(&self, x: &[f64]) -> f64 {
        x.iter()
            .zip(&self.lower)
            .zip(&self.upper)
            .map(|((&v, &l), &u)| {
                let below = (l - v).max(0.0);
                let above = (v - u).max(0.0);
                below * below + above * above
            })
            .sum()
    }

    /// Gradient of `½·dist(x, box)²`, which is `x − Π(x)`.
    pub fn grad_distance_sq_half(&self, x: &[f64]) -> Result<Vec<f64>> {
        check_len(self.len(), x.len())?;
        let mut out = vec![0.0; x.len()];
        self.residual_into(x, &mut out);
        Ok(out)
    }

    /// `out = x − Π(x)`, unchecked.
    pub(crate) fn residual_into(&self, x: &[f64], out: &mut [f64]) {
        for (((o, &v), &l), &u) in out.iter_mut().zip(x).zip(&self.lower).zip(&self.upper) {
            *o = v - v.max(l).min(u);
        }
    }

    /// Membership test with an absolute tolerance band.
    pub fn contains(&self, x: &[f64], tol: f64) -> Result<bool> {
        check_len(self.len(), x.len())?;
        if !(tol >= 0.0) {
            return Err(Error::InvalidArgument(format!("tolerance must be ≥ 0 (got {tol})")));
        }
        Ok(x
            .iter()
            .zip(&self.lower)
            .zip(&self.upper)
            .all(|((&v, &l), &u)| l - tol <= v && v <= u + tol))
    }
}

/// JSON shape: `{"lower": [...], "upper": [...]}` with infinities as the
/// strings `"-inf"` / `"inf"`.
#[derive(Serialize, Deserialize)]
struct IntervalSetRepr {
    lower: Vec<ExtendedReal>,
    upper: Vec<ExtendedReal>,
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum ExtendedReal {
    Finite(f64),
    Symbol(String),
}

impl From<f64> for ExtendedReal {
    fn from(v: f64) -> Self {
        if v == f64::INFINITY {
            ExtendedReal::Symbol("inf".into())
        } else if v == f64::NEG_INFINITY {
            ExtendedReal::Symbol("-inf".into())
        } else {
            ExtendedReal::Finite(v)
        }
    }
}

impl TryFrom<ExtendedReal> for f64 {
    type Error = String;

    fn try_from(v: ExtendedReal) -> std::result::Result<Self, String> {
        match v {
            ExtendedReal::Finite(x) => Ok(x),
            ExtendedReal::Symbol(s) => match s.as_str() {
                "inf" | "+inf" => Ok(f64::INFINITY),
                "-inf" => Ok(f64::NEG_INFINITY),
                other => Err(format!("unrecognized bound {other:?}")),
            },
        }
    }
}

impl From<IntervalSet> for IntervalSetRepr {
    fn from(set: IntervalSet) -> Self {
        Self {
            lower: set.lower.into_iter().map(Into::into).collect(),
            upper: set.upper.into_iter().map(Into::into).collect(),
        }
    }
}

impl TryFrom<IntervalSetRepr> for IntervalSet {
    type Error = String;

    fn try_from(repr: IntervalSetRepr) -> std::result::Result<Self, String> {
        let lower = repr
            .lower
            .into_iter()
            .map(f64::try_from)
            .collect::<std::result::Result<Vec<_>, _>>()?;
        let upper = repr
            .upper
            .into_iter()
            .map(f64::try_from)
            .collect::<std::result::Result<Vec<_>, _>>()?;
        IntervalSet::new(lower, upper).map_err(|e| e.to_string())
    }
}
