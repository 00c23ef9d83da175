//! The p-normal family `f_p(x) = c_p exp(-|x|^p / p)`.
//!
//! `c_p = 1 / (2 p^{1/p} Γ(1 + 1/p))` and `f_∞ = ½ 1{|x| < 1}`. The joint
//! density of i.i.d. p-normal coordinates depends on `x` only through
//! `‖x‖_p`, which is what makes normalising such a vector a p-isotropic
//! direction generator.

use rand::Rng;
use rand_distr::StandardNormal;
use statrs::function::gamma::gamma;

use crate::error::{param, Result};
use crate::exponent::Exponent;

/// A p-normal law with scale `b`, i.e. the law of `b X` with `X ~ f_p`.
#[derive(Clone, Copy, Debug)]
pub struct PNormal {
    p: Exponent,
    scale: f64,
    c_p: f64,
}

impl PNormal {
    pub fn new(p: Exponent) -> Self {
        PNormal {
            p,
            scale: 1.0,
            c_p: normalization_constant(p),
        }
    }

    pub fn with_scale(p: Exponent, scale: f64) -> Result<Self> {
        if !scale.is_finite() || scale <= 0.0 {
            return param(format!("scale must be positive and finite, got {scale}"));
        }
        Ok(PNormal {
            scale,
            ..PNormal::new(p)
        })
    }

    pub fn p(&self) -> Exponent {
        self.p
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn c_p(&self) -> f64 {
        self.c_p
    }

    /// Density at `x`. A scale `b` enters as `(1/b) f_p(x/b)`.
    pub fn density(&self, x: f64) -> f64 {
        let z = x / self.scale;
        let unit = if self.p.is_infinite() {
            if z.abs() < 1.0 {
                self.c_p
            } else {
                0.0
            }
        } else {
            let p = self.p.value();
            self.c_p * (-z.abs().powf(p) / p).exp()
        };
        unit / self.scale
    }

    /// Product of the marginal densities.
    pub fn joint_density(&self, x: &[f64]) -> f64 {
        x.iter().map(|&v| self.density(v)).product()
    }

    /// The joint density written through the p-norm alone:
    /// `b^{-n} c_p^{n-1} f_p(‖x / b‖_p)`.
    pub fn isotropic_joint_density(&self, x: &[f64]) -> f64 {
        let n = x.len() as i32;
        let r = self.p.norm(x) / self.scale;
        let unit = PNormal::new(self.p);
        self.c_p.powi(n - 1) * unit.density(r) / self.scale.powi(n)
    }

    /// Draws one variate: `|X| = (p G)^{1/p}` with `G ~ Gamma(1/p, 1)` and a
    /// fair random sign; uniform on `(-b, b)` for `p = ∞`.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let magnitude = if self.p.is_infinite() {
            rng.random::<f64>()
        } else {
            ln_magnitude(self.p.value(), rng).exp()
        };
        let sign = if rng.random::<bool>() { 1.0 } else { -1.0 };
        sign * magnitude * self.scale
    }
}

/// `c_p`, with the limit `c_∞ = 1/2`.
pub fn normalization_constant(p: Exponent) -> f64 {
    if p.is_infinite() {
        return 0.5;
    }
    let p = p.value();
    1.0 / (2.0 * p.powf(1.0 / p) * gamma(1.0 + 1.0 / p))
}

/// Unnormalised density `r^{n-1} exp(-(n/p) r^p)` (`r^{n-1} 1{r<1}` at
/// infinity). This is the law of the mean-scaled radius `‖X‖_p / n^{1/p}`
/// of a vector of n i.i.d. p-normal coordinates.
pub fn radius_density(p: Exponent, n: usize, r: f64) -> Result<f64> {
    check_radius(n, r)?;
    let shell = r.powi(n as i32 - 1);
    if p.is_infinite() {
        return Ok(if r < 1.0 { shell } else { 0.0 });
    }
    let p = p.value();
    Ok(shell * (-(n as f64 / p) * r.powf(p)).exp())
}

/// Unnormalised density `r^{n-1} f_p(r)`: the law of `‖X‖_p` itself.
pub fn norm_density(p: Exponent, n: usize, r: f64) -> Result<f64> {
    check_radius(n, r)?;
    Ok(r.powi(n as i32 - 1) * PNormal::new(p).density(r))
}

fn check_radius(n: usize, r: f64) -> Result<()> {
    if n < 1 {
        return param("radius law needs n >= 1");
    }
    if r.is_nan() || r < 0.0 {
        return param(format!("radius must be non-negative, got {r}"));
    }
    Ok(())
}

/// `ln |X|` for `X ~ f_p` with finite `p`. Working in logs keeps tiny
/// magnitudes (large `p`, shape `1/p → 0`) from underflowing.
pub fn ln_magnitude<R: Rng + ?Sized>(p: f64, rng: &mut R) -> f64 {
    (p.ln() + ln_gamma_variate(1.0 / p, rng)) / p
}

/// `ln G` for `G ~ Gamma(shape, 1)`.
///
/// Marsaglia-Tsang squeeze/rejection for `shape ≥ 1`. Smaller shapes are
/// boosted: `G_a = G_{a+1} U^{1/a}`, evaluated in logs.
pub fn ln_gamma_variate<R: Rng + ?Sized>(shape: f64, rng: &mut R) -> f64 {
    debug_assert!(shape > 0.0);
    if shape < 1.0 {
        let u = open_unit(rng);
        return ln_gamma_variate(shape + 1.0, rng) + u.ln() / shape;
    }
    let d = shape - 1.0 / 3.0;
    let c = 1.0 / (9.0 * d).sqrt();
    loop {
        let z: f64 = rng.sample(StandardNormal);
        let v = 1.0 + c * z;
        if v <= 0.0 {
            continue;
        }
        let v = v * v * v;
        let u = open_unit(rng);
        let z2 = z * z;
        if u < 1.0 - 0.0331 * z2 * z2 || u.ln() < 0.5 * z2 + d * (1.0 - v + v.ln()) {
            return d.ln() + v.ln();
        }
    }
}

/// Uniform on `(0, 1]`.
#[inline]
pub(crate) fn open_unit<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    1.0 - rng.random::<f64>()
}
