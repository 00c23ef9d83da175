//! Areas, q-lengths, ball volumes and hyper-surface measures of p-balls,
//! all evaluated as quadratures over a [`PCircleGrid`].
//!
//! With `J_k = ∫ sin_p(t)^k dt` and `I_k = ∫ sin_p(t)^k dL_q(t)` over the
//! first quadrant, the totals satisfy
//!
//! ```text
//! V_n     = 2 V_{n-1} (n-1)/n J_{n-2}   = (2^n / n) ∏_{k=0}^{n-2} J_k,   V_1 = 2
//! S_{n,q} = 2 S_{n-1,q} I_{n-2}         =  2^n      ∏_{k=0}^{n-2} I_k,   S_{1,q} = 2
//! ```

use serde::Serialize;

use crate::error::{param, Result};
use crate::exponent::Exponent;
use crate::squigonometry::PCircleGrid;

/// Which measure the `sin_p` powers are integrated against.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Measure {
    /// The area parameter `dt` (volume).
    Area,
    /// The q-length element `dL_q` (surface).
    Length,
}

/// A monotone cumulative distribution tabulated over the area parameter.
#[derive(Clone, Debug)]
pub struct CdfTable {
    t: Vec<f64>,
    cdf: Vec<f64>,
}

impl CdfTable {
    /// Wraps abscissae and non-decreasing cumulative values. The values are
    /// normalised so that the table runs from 0 to 1.
    pub fn from_cumulative(t: Vec<f64>, mut cum: Vec<f64>) -> Result<Self> {
        if t.len() != cum.len() || t.len() < 2 {
            return param("cdf table needs at least two matching nodes");
        }
        let first = cum[0];
        let total = cum[cum.len() - 1] - first;
        if !total.is_finite() || total <= 0.0 {
            return param("cdf table has no mass");
        }
        for c in cum.iter_mut() {
            *c = (*c - first) / total;
        }
        let last = cum.len() - 1;
        cum[last] = 1.0;
        Ok(CdfTable { t, cdf: cum })
    }

    pub fn t(&self) -> &[f64] {
        &self.t
    }

    pub fn values(&self) -> &[f64] {
        &self.cdf
    }

    /// CDF at `t`, linearly interpolated and clamped to `[0, 1]`.
    pub fn eval(&self, t: f64) -> f64 {
        interp(&self.t, &self.cdf, t)
    }

    /// Quantile function. Flat stretches resolve to their left-most `t`.
    pub fn invert(&self, u: f64) -> f64 {
        let u = u.clamp(0.0, 1.0);
        let i = self.cdf.partition_point(|&c| c < u);
        if i == 0 {
            return self.t[0];
        }
        if i >= self.cdf.len() {
            return self.t[self.t.len() - 1];
        }
        let (c0, c1) = (self.cdf[i - 1], self.cdf[i]);
        if c1 == c0 {
            return self.t[i];
        }
        let f = (u - c0) / (c1 - c0);
        self.t[i - 1] + f * (self.t[i] - self.t[i - 1])
    }

    /// Largest absolute difference to `other`, evaluated on both node sets.
    pub fn sup_distance(&self, other: &CdfTable) -> f64 {
        let a = self
            .t
            .iter()
            .zip(&self.cdf)
            .map(|(&t, &c)| (c - other.eval(t)).abs());
        let b = other
            .t
            .iter()
            .zip(&other.cdf)
            .map(|(&t, &c)| (c - self.eval(t)).abs());
        a.chain(b).fold(0.0, f64::max)
    }
}

/// Summary constants for an n-dimensional p-ball measured in the q-norm.
#[derive(Clone, Debug, Serialize)]
pub struct GeometryReport {
    pub p: Exponent,
    pub q: Exponent,
    pub n: usize,
    /// Total volume `V_n`.
    #[serde(rename = "V_n")]
    pub volume: f64,
    /// Total hyper-area `S_{n,q}`.
    #[serde(rename = "S_nq")]
    pub surface: f64,
    /// Unsigned (n-1)-ball hyper-area, `V_{n-1} / 2^{n-1}`.
    #[serde(rename = "R")]
    pub section_area: f64,
    /// Unsigned (n-1)-sphere hyper-length, `S_{n-1,q} / 2^{n-1}`.
    #[serde(rename = "P_q")]
    pub section_perimeter: f64,
}

/// Difference between relative q-length and relative area along the
/// first-quadrant arc.
#[derive(Clone, Debug)]
pub struct RelDiffCurve {
    pub p: Exponent,
    pub q: Exponent,
    /// `(relative area, relative length - relative area)` pairs.
    pub points: Vec<(f64, f64)>,
    pub max_abs_diff: f64,
}

/// `A(t) = t / 2`, the area swept from `(1, 0)` to `(cos_p t, sin_p t)`.
pub fn area_at(grid: &PCircleGrid, t: f64) -> Result<f64> {
    check_range(grid, t)?;
    Ok(0.5 * t)
}

/// Swept area at every grid point evaluated independently of `t`, as the
/// triangle `½ cos_p sin_p` plus the region under the arc,
/// `∫ sin_p d(-cos_p)` (trapezoid rule).
pub fn accumulated_area(grid: &PCircleGrid) -> Vec<f64> {
    let (x, y) = (grid.x(), grid.y());
    let mut under = 0.0;
    let mut out = Vec::with_capacity(x.len());
    out.push(0.5 * x[0] * y[0]);
    for i in 1..x.len() {
        under += 0.5 * (y[i - 1] + y[i]) * (x[i - 1] - x[i]);
        out.push(0.5 * x[i] * y[i] + under);
    }
    out
}

/// Cumulative q-length `L_{p,q}(t)` of the arc from `(1, 0)`.
pub fn length_at(grid: &PCircleGrid, t: f64) -> Result<f64> {
    check_range(grid, t)?;
    Ok(interp(grid.t(), grid.lq(), t))
}

/// `∫_0^{π_p/2} sin_p(t)^k` against the chosen measure (trapezoid rule).
pub fn sin_power_integral(grid: &PCircleGrid, k: u32, measure: Measure) -> f64 {
    let (y, t, dl) = (grid.y(), grid.t(), grid.d_lq());
    let mut acc = 0.0;
    let mut prev = pow_k(y[0], k);
    for i in 1..y.len() {
        let cur = pow_k(y[i], k);
        let step = match measure {
            Measure::Area => t[i] - t[i - 1],
            Measure::Length => dl[i],
        };
        acc += 0.5 * (prev + cur) * step;
        prev = cur;
    }
    acc
}

/// Normalised cumulative of `sin_p^k` against `measure`, tabulated on the grid.
pub fn sin_power_cdf(grid: &PCircleGrid, k: u32, measure: Measure) -> Result<CdfTable> {
    let (y, t, dl) = (grid.y(), grid.t(), grid.d_lq());
    let mut cum = Vec::with_capacity(y.len());
    cum.push(0.0);
    let mut acc = 0.0;
    let mut prev = pow_k(y[0], k);
    for i in 1..y.len() {
        let cur = pow_k(y[i], k);
        let step = match measure {
            Measure::Area => t[i] - t[i - 1],
            Measure::Length => dl[i],
        };
        acc += 0.5 * (prev + cur) * step;
        cum.push(acc);
        prev = cur;
    }
    CdfTable::from_cumulative(t.to_vec(), cum)
}

/// `t ↦ V(t) / V(π_p/2)`: the law of the last angular coordinate of the
/// projected volume-uniform distribution in dimension `n`.
pub fn volume_cdf(grid: &PCircleGrid, n: usize) -> Result<CdfTable> {
    if n < 2 {
        return param(format!("volume_cdf needs n >= 2, got {n}"));
    }
    sin_power_cdf(grid, (n - 2) as u32, Measure::Area)
}

/// `t ↦ S_q(t) / S_q(π_p/2)`: the same law for the surface-uniform
/// distribution measured in the grid's q-norm.
pub fn surface_cdf(grid: &PCircleGrid, n: usize) -> Result<CdfTable> {
    if n < 2 {
        return param(format!("surface_cdf needs n >= 2, got {n}"));
    }
    sin_power_cdf(grid, (n - 2) as u32, Measure::Length)
}

/// Volume of the n-dimensional unit p-ball (`V_1 = 2`).
pub fn ball_volume(grid: &PCircleGrid, n: usize) -> Result<f64> {
    if n < 1 {
        return param("ball_volume needs n >= 1");
    }
    let prod: f64 = (0..n.saturating_sub(1))
        .map(|k| sin_power_integral(grid, k as u32, Measure::Area))
        .product();
    Ok(2f64.powi(n as i32) / n as f64 * prod)
}

/// Same as [`ball_volume`], built up one dimension at a time from the
/// volume of the (n-1)-dimensional section.
pub fn ball_volume_recursive(grid: &PCircleGrid, n: usize) -> Result<f64> {
    if n < 1 {
        return param("ball_volume needs n >= 1");
    }
    let mut v = 2.0;
    for m in 2..=n {
        let section = v / 2f64.powi(m as i32 - 1);
        let quarter = section * (m - 1) as f64 / m as f64
            * sin_power_integral(grid, (m - 2) as u32, Measure::Area);
        v = 2f64.powi(m as i32) * quarter;
    }
    Ok(v)
}

/// Hyper-area of the n-dimensional unit p-sphere measured in the grid's
/// q-norm. Defined for `n ≥ 2`.
pub fn surface_measure(grid: &PCircleGrid, n: usize) -> Result<f64> {
    if n < 2 {
        return param(format!("surface_measure needs n >= 2, got {n}"));
    }
    let prod: f64 = (0..n - 1)
        .map(|k| sin_power_integral(grid, k as u32, Measure::Length))
        .product();
    Ok(2f64.powi(n as i32) * prod)
}

pub fn geometry_report(grid: &PCircleGrid, n: usize) -> Result<GeometryReport> {
    if n < 2 {
        return param(format!("geometry report needs n >= 2, got {n}"));
    }
    let lower = 2f64.powi(n as i32 - 1);
    let section_area = ball_volume(grid, n - 1)? / lower;
    // The unsigned 0-sphere is a single point.
    let section_perimeter = if n == 2 {
        1.0
    } else {
        surface_measure(grid, n - 1)? / lower
    };
    Ok(GeometryReport {
        p: grid.p(),
        q: grid.q(),
        n,
        volume: ball_volume(grid, n)?,
        surface: surface_measure(grid, n)?,
        section_area,
        section_perimeter,
    })
}

/// Relative q-length minus relative area, sampled at `resolution + 1`
/// evenly spaced relative areas.
pub fn rel_diff_curve(grid: &PCircleGrid, resolution: usize) -> Result<RelDiffCurve> {
    if resolution < 100 {
        return param(format!("resolution must be at least 100, got {resolution}"));
    }
    let half = grid.half_pi_p();
    let total = grid.quarter_length_q();
    let mut points = Vec::with_capacity(resolution + 1);
    let mut max_abs_diff = 0.0_f64;
    for j in 0..=resolution {
        let a = j as f64 / resolution as f64;
        let diff = if j == 0 || j == resolution {
            0.0
        } else {
            interp(grid.t(), grid.lq(), a * half) / total - a
        };
        max_abs_diff = max_abs_diff.max(diff.abs());
        points.push((a, diff));
    }
    Ok(RelDiffCurve {
        p: grid.p(),
        q: grid.q(),
        points,
        max_abs_diff,
    })
}

fn check_range(grid: &PCircleGrid, t: f64) -> Result<()> {
    let half = grid.half_pi_p();
    if !(t >= 0.0 && t <= half) {
        return param(format!("t = {t} outside [0, {half}]"));
    }
    Ok(())
}

#[inline]
fn pow_k(y: f64, k: u32) -> f64 {
    if k == 0 {
        1.0
    } else {
        y.powi(k as i32)
    }
}

/// Piecewise-linear interpolation on increasing `xs`, clamped at the ends.
pub(crate) fn interp(xs: &[f64], ys: &[f64], x: f64) -> f64 {
    let i = xs.partition_point(|&v| v < x);
    if i == 0 {
        return ys[0];
    }
    if i >= xs.len() {
        return ys[ys.len() - 1];
    }
    let (x0, x1) = (xs[i - 1], xs[i]);
    let f = (x - x0) / (x1 - x0);
    ys[i - 1] + f * (ys[i] - ys[i - 1])
}
