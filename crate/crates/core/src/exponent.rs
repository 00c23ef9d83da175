use std::fmt;
use std::str::FromStr;

use serde::{Serialize, Serializer};

use crate::error::{Error, Result};

/// A norm exponent in `(0, ∞]`.
///
/// Infinity is stored as `f64::INFINITY`, which is exact, so `p = ∞` never
/// collapses into a large finite value.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd)]
pub struct Exponent(f64);

impl Exponent {
    pub const ONE: Exponent = Exponent(1.0);
    pub const TWO: Exponent = Exponent(2.0);
    pub const INFINITY: Exponent = Exponent(f64::INFINITY);

    pub fn new(value: f64) -> Result<Self> {
        if value.is_nan() || value <= 0.0 {
            return Err(Error::Parameter(format!(
                "exponent must lie in (0, inf], got {value}"
            )));
        }
        Ok(Exponent(value))
    }

    #[inline]
    pub fn value(self) -> f64 {
        self.0
    }

    #[inline]
    pub fn is_infinite(self) -> bool {
        self.0.is_infinite()
    }

    #[inline]
    pub fn is_finite(self) -> bool {
        self.0.is_finite()
    }

    /// `‖v‖_p` for this exponent. Uses the max-coordinate limit at infinity.
    pub fn norm(self, v: &[f64]) -> f64 {
        if self.is_infinite() {
            return v.iter().fold(0.0_f64, |m, x| m.max(x.abs()));
        }
        let p = self.0;
        if p == 2.0 {
            return v.iter().map(|x| x * x).sum::<f64>().sqrt();
        }
        if p == 1.0 {
            return v.iter().map(|x| x.abs()).sum();
        }
        // Scale by the largest magnitude so tiny or huge coordinates stay in range.
        let scale = v.iter().fold(0.0_f64, |m, x| m.max(x.abs()));
        if scale == 0.0 || !scale.is_finite() {
            return scale;
        }
        let s: f64 = v.iter().map(|x| (x.abs() / scale).powf(p)).sum();
        scale * s.powf(1.0 / p)
    }

    /// `‖(a, b)‖_p` for a pair.
    #[inline]
    pub fn norm2(self, a: f64, b: f64) -> f64 {
        self.norm(&[a, b])
    }

    /// Whether `q` is the Hölder conjugate of `self` (or `self ∈ {1, ∞}`),
    /// i.e. the q-length element along the p-circle is a constant multiple of
    /// the area parameter. In that case projecting the volume onto the sphere
    /// already yields the surface-uniform law.
    pub fn projection_is_surface_uniform(self, q: Exponent) -> bool {
        let p = self.0;
        if self.is_infinite() || p == 1.0 {
            return true;
        }
        if p <= 1.0 {
            return false;
        }
        if q.is_infinite() {
            return false;
        }
        ((p - 1.0) * q.0 - p).abs() <= 1e-12 * p
    }
}

impl fmt::Display for Exponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_infinite() {
            f.write_str("inf")
        } else {
            write!(f, "{}", self.0)
        }
    }
}

impl FromStr for Exponent {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        match s.to_ascii_lowercase().as_str() {
            "inf" | "infinity" | "∞" => Ok(Exponent::INFINITY),
            other => {
                let v: f64 = other
                    .parse()
                    .map_err(|_| Error::Parameter(format!("cannot parse exponent {s:?}")))?;
                if v.is_infinite() {
                    return Ok(Exponent::INFINITY);
                }
                Exponent::new(v)
            }
        }
    }
}

/// JSON has no infinity, so `∞` is written as the string `"inf"`.
impl Serialize for Exponent {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        if self.is_infinite() {
            serializer.serialize_str("inf")
        } else {
            serializer.serialize_f64(self.0)
        }
    }
}
