//! Squigonometric functions on a tabulated first-quadrant p-circle.
//!
//! The circle `|x|^p + |y|^p = 1` is discretised with the driver variable
//! `w = sin_p(t)^p`, so that `x = (1 - w)^{1/p}` and `y = w^{1/p}` are exact
//! points of the curve. The area parameter `t` is twice the accumulated area
//! swept from the origin, which makes it the area-based parametrisation in
//! which `cos_p`/`sin_p` solve
//!
//! ```text
//! C'(t) = -S(t)^{p-1},  S'(t) = C(t)^{p-1},  C(0) = 1,  S(0) = 0.
//! ```
//!
//! Only the first octant (`w ≤ 1/2`) is computed; the second octant is its
//! mirror image under `x ↔ y`, which makes `cos_p(t) = sin_p(π_p/2 - t)` hold
//! exactly on the grid.

use crate::error::{param, Error, Result};
use crate::exponent::Exponent;

/// Grid size used when a caller does not choose one.
pub const DEFAULT_PRECISION: usize = 100_000;

/// Smallest admissible grid precision.
pub const MIN_PRECISION: usize = 1_000;

// Endpoint refinement: geometric spacing of w from GEOM_START to GEOM_END
// (5% of the points), then linear up to LIN_END (40%), mirrored about 1/2.
const GEOM_START: f64 = 1e-16;
const GEOM_END: f64 = 0.1;
const LIN_END: f64 = 0.4;
const GEOM_SHARE: f64 = 0.05;
const LIN_SHARE: f64 = 0.4;

/// Tabulated first quadrant of the unit p-circle together with its q-length.
#[derive(Clone, Debug)]
pub struct PCircleGrid {
    p: Exponent,
    q: Exponent,
    w: Vec<f64>,
    x: Vec<f64>,
    y: Vec<f64>,
    t: Vec<f64>,
    d_lq: Vec<f64>,
    lq: Vec<f64>,
    /// Index of the octant point `x = y`.
    mid: usize,
    pi_p: f64,
    quarter_length_q: f64,
}

impl PCircleGrid {
    /// Grid with [`DEFAULT_PRECISION`] points.
    pub fn new(p: Exponent, q: Exponent) -> Result<Self> {
        build_grid(p, q, DEFAULT_PRECISION)
    }

    pub fn p(&self) -> Exponent {
        self.p
    }

    pub fn q(&self) -> Exponent {
        self.q
    }

    /// Area of the unit p-circle.
    pub fn pi_p(&self) -> f64 {
        self.pi_p
    }

    /// `π_p / 2`, the end of the first quadrant in the area parameter.
    pub fn half_pi_p(&self) -> f64 {
        self.t[self.t.len() - 1]
    }

    /// q-length of the first-quadrant arc from `(1, 0)` to `(0, 1)`.
    pub fn quarter_length_q(&self) -> f64 {
        self.quarter_length_q
    }

    pub fn len(&self) -> usize {
        self.t.len()
    }

    pub fn is_empty(&self) -> bool {
        self.t.is_empty()
    }

    /// Driver variable `w = sin_p^p` at each grid point.
    pub fn w(&self) -> &[f64] {
        &self.w
    }

    /// `cos_p` at each grid point, decreasing from 1 to 0.
    pub fn x(&self) -> &[f64] {
        &self.x
    }

    /// `sin_p` at each grid point, increasing from 0 to 1.
    pub fn y(&self) -> &[f64] {
        &self.y
    }

    /// Area parameter at each grid point.
    pub fn t(&self) -> &[f64] {
        &self.t
    }

    /// q-length of the step ending at each grid point (`d_lq[0] = 0`).
    pub fn d_lq(&self) -> &[f64] {
        &self.d_lq
    }

    /// Cumulative q-length.
    pub fn lq(&self) -> &[f64] {
        &self.lq
    }

    /// `(cos_p(t), sin_p(t))` for any real `t`.
    pub fn cos_sin(&self, t: f64) -> (f64, f64) {
        if self.p.is_infinite() {
            return (cos_inf(t), cos_inf(t - 2.0));
        }
        let period = 2.0 * self.pi_p;
        let half = 0.5 * self.pi_p;
        let mut r = t.rem_euclid(period);
        if r >= period {
            r = 0.0;
        }
        match (r / half) as u32 {
            0 => self.quadrant_cos_sin(r),
            1 => {
                let (c, s) = self.quadrant_cos_sin(self.pi_p - r);
                (-c, s)
            }
            2 => {
                let (c, s) = self.quadrant_cos_sin(r - self.pi_p);
                (-c, -s)
            }
            _ => {
                let (c, s) = self.quadrant_cos_sin(period - r);
                (c, -s)
            }
        }
    }

    pub fn cos_p(&self, t: f64) -> f64 {
        self.cos_sin(t).0
    }

    pub fn sin_p(&self, t: f64) -> f64 {
        self.cos_sin(t).1
    }

    /// `(cos_p(t), sin_p(t))` for `t ∈ [0, π_p/2]` (clamped), both non-negative.
    ///
    /// `sin_p` is interpolated linearly in `t` on the first octant and the
    /// partner coordinate is recovered from the curve equation, so the pair
    /// has unit p-norm to rounding.
    pub fn quadrant_cos_sin(&self, t: f64) -> (f64, f64) {
        let half = self.half_pi_p();
        let t = t.clamp(0.0, half);
        if self.p.is_infinite() {
            return if t <= 1.0 { (1.0, t) } else { (2.0 - t, 1.0) };
        }
        let t_mid = self.t[self.mid];
        if t <= t_mid {
            let s = self.octant_sin(t);
            (self.partner(s), s)
        } else {
            let c = self.octant_sin(half - t);
            (c, self.partner(c))
        }
    }

    /// Inverse of `sin_p` restricted to the first octant; `s` is clamped to
    /// `[0, sin_p(π_p/4)]`.
    pub fn octant_arcsin(&self, s: f64) -> f64 {
        if self.p.is_infinite() {
            return s.clamp(0.0, 1.0);
        }
        let ys = &self.y[..=self.mid];
        let ts = &self.t[..=self.mid];
        let s = s.clamp(0.0, ys[self.mid]);
        let i = ys.partition_point(|&v| v < s);
        if i == 0 {
            return ts[0];
        }
        let (y0, y1) = (ys[i - 1], ys[i]);
        let f = (s - y0) / (y1 - y0);
        ts[i - 1] + f * (ts[i] - ts[i - 1])
    }

    /// Area parameter of the unsigned direction `(c, s)` (any positive
    /// multiple of a first-quadrant point works).
    pub fn angle_of(&self, c: f64, s: f64) -> f64 {
        let c = c.abs();
        let s = s.abs();
        let r = self.p.norm2(c, s);
        if r == 0.0 {
            return 0.0;
        }
        if s <= c {
            self.octant_arcsin(s / r)
        } else {
            self.half_pi_p() - self.octant_arcsin(c / r)
        }
    }

    /// Integrates the defining ODE with classical RK4 from `(1, 0)` to
    /// `π_p/2` and returns the largest deviation from the tabulated
    /// `(cos_p, sin_p)` along the way.
    pub fn ode_cross_check(&self, step: f64) -> Result<f64> {
        let p = self.p.value();
        if !self.p.is_finite() || p < 1.0 {
            return param(format!(
                "ODE cross-check needs a finite p >= 1, got {}",
                self.p
            ));
        }
        if !step.is_finite() || step <= 0.0 {
            return param(format!("step must be positive, got {step}"));
        }
        let end = self.half_pi_p();
        let steps = (end / step).ceil().max(1.0) as usize;
        let h = end / steps as f64;
        let field = |c: f64, s: f64| (-signed_pow(s, p - 1.0), signed_pow(c, p - 1.0));

        let (mut c, mut s) = (1.0_f64, 0.0_f64);
        let mut worst = 0.0_f64;
        for i in 1..=steps {
            let (k1c, k1s) = field(c, s);
            let (k2c, k2s) = field(c + 0.5 * h * k1c, s + 0.5 * h * k1s);
            let (k3c, k3s) = field(c + 0.5 * h * k2c, s + 0.5 * h * k2s);
            let (k4c, k4s) = field(c + h * k3c, s + h * k3s);
            c += h / 6.0 * (k1c + 2.0 * k2c + 2.0 * k3c + k4c);
            s += h / 6.0 * (k1s + 2.0 * k2s + 2.0 * k3s + k4s);

            let t = i as f64 * h;
            let drift = (self.p.norm2(c, s) - 1.0).abs();
            if !drift.is_finite() || drift > 1e-3 {
                return Err(Error::Numerical {
                    t,
                    reason: format!(
                        "ODE trajectory left the unit p-circle (|‖(C,S)‖-1| = {drift:e})"
                    ),
                });
            }
            let (gc, gs) = self.quadrant_cos_sin(t);
            worst = worst.max((c - gc).abs()).max((s - gs).abs());
        }
        Ok(worst)
    }

    fn octant_sin(&self, t: f64) -> f64 {
        let ts = &self.t[..=self.mid];
        let ys = &self.y[..=self.mid];
        let i = ts.partition_point(|&v| v < t);
        if i == 0 {
            return ys[0];
        }
        if i > self.mid {
            return ys[self.mid];
        }
        let f = (t - ts[i - 1]) / (ts[i] - ts[i - 1]);
        ys[i - 1] + f * (ys[i] - ys[i - 1])
    }

    /// The other coordinate of the first-octant point with coordinate `v`.
    fn partner(&self, v: f64) -> f64 {
        let p = self.p.value();
        (1.0 - v.powf(p)).max(0.0).powf(1.0 / p)
    }
}

/// Builds the tabulated first quadrant of the unit p-circle, measuring arc
/// length with the q-norm. Roughly `precision` points are produced.
pub fn build_grid(p: Exponent, q: Exponent, precision: usize) -> Result<PCircleGrid> {
    if precision < MIN_PRECISION {
        return param(format!(
            "grid precision must be at least {MIN_PRECISION}, got {precision}"
        ));
    }
    let half = driver_half_grid(precision);

    // First octant, w from 0 to 1/2.
    let mut ox: Vec<f64> = Vec::with_capacity(half.len());
    let mut oy: Vec<f64> = Vec::with_capacity(half.len());
    let mut ow: Vec<f64> = Vec::with_capacity(half.len());
    for &s in &half {
        let (x, y) = if p.is_infinite() {
            ((2.0 * (1.0 - s)).min(1.0), (2.0 * s).min(1.0))
        } else {
            let inv = 1.0 / p.value();
            ((1.0 - s).powf(inv), s.powf(inv))
        };
        if let (Some(&px), Some(&py)) = (ox.last(), oy.last()) {
            // Keep only points that advance along the curve; steps below the
            // resolution of `powf` would give a zero or negative swept area.
            let sweep = 0.5 * (x * (y - py) - y * (x - px));
            let last = s == 0.5;
            if !(y > py && x <= px && sweep > 0.0) {
                if last {
                    // The octant must end exactly on the diagonal.
                    ox.pop();
                    oy.pop();
                    ow.pop();
                } else {
                    continue;
                }
            }
        }
        ox.push(x);
        oy.push(y);
        ow.push(s);
    }
    let (ot, _, _) = accumulate(p, q, &ox, &oy);

    // The second octant stores `π_p/2 - t`; drop points whose parameter step
    // would vanish there at f64 resolution.
    let floor = 4.0 * f64::EPSILON * ot[ot.len() - 1];
    let last = ox.len() - 1;
    let mut keep = vec![0usize];
    for i in 1..last {
        if ot[i] - ot[*keep.last().unwrap()] > floor && ot[last] - ot[i] > floor {
            keep.push(i);
        }
    }
    keep.push(last);
    let ox: Vec<f64> = keep.iter().map(|&i| ox[i]).collect();
    let oy: Vec<f64> = keep.iter().map(|&i| oy[i]).collect();
    let ow: Vec<f64> = keep.iter().map(|&i| ow[i]).collect();

    let mid = ox.len() - 1;
    debug_assert_eq!(ox[mid], oy[mid]);
    let (ot, od, ol) = accumulate(p, q, &ox, &oy);

    let len = 2 * mid + 1;
    let mut x = Vec::with_capacity(len);
    let mut y = Vec::with_capacity(len);
    let mut w = Vec::with_capacity(len);
    let mut t = Vec::with_capacity(len);
    let mut d_lq = Vec::with_capacity(len);
    let mut lq = Vec::with_capacity(len);
    x.extend_from_slice(&ox);
    y.extend_from_slice(&oy);
    w.extend_from_slice(&ow);
    t.extend_from_slice(&ot);
    d_lq.extend_from_slice(&od);
    lq.extend_from_slice(&ol);
    let (t_mid, l_mid) = (ot[mid], ol[mid]);
    for j in 1..=mid {
        let m = mid - j;
        x.push(oy[m]);
        y.push(ox[m]);
        w.push(1.0 - ow[m]);
        t.push(2.0 * t_mid - ot[m]);
        d_lq.push(od[m + 1]);
        lq.push(2.0 * l_mid - ol[m]);
    }

    let half_pi = t[len - 1];
    Ok(PCircleGrid {
        p,
        q,
        w,
        x,
        y,
        t,
        d_lq,
        lq,
        mid,
        pi_p: 2.0 * half_pi,
        quarter_length_q: 2.0 * l_mid,
    })
}

/// Area parameter, step q-lengths and cumulative q-length along an octant.
fn accumulate(p: Exponent, q: Exponent, ox: &[f64], oy: &[f64]) -> (Vec<f64>, Vec<f64>, Vec<f64>) {
    let m = ox.len();
    let mut ot = vec![0.0; m];
    let mut od = vec![0.0; m];
    let mut ol = vec![0.0; m];
    for i in 1..m {
        let dx = ox[i] - ox[i - 1];
        let dy = oy[i] - oy[i - 1];
        let da = 0.5 * dx * oy[i] + 0.5 * ox[i] * dy - oy[i] * dx;
        ot[i] = if p.is_infinite() {
            oy[i]
        } else {
            ot[i - 1] + 2.0 * da
        };
        od[i] = q.norm2(dx.abs(), dy.abs());
        ol[i] = ol[i - 1] + od[i];
    }
    (ot, od, ol)
}

/// Convenience wrapper around [`PCircleGrid::ode_cross_check`] on a default grid.
pub fn ode_cross_check(p: Exponent, step: f64) -> Result<f64> {
    PCircleGrid::new(p, p)?.ode_cross_check(step)
}

/// `cos_∞`, the piecewise-linear limit of `cos_p` with period 8.
pub fn cos_inf(t: f64) -> f64 {
    let r = t.rem_euclid(8.0);
    ((r - 4.0).abs() - 2.0).clamp(-1.0, 1.0)
}

/// `sin_∞(t) = cos_∞(t - 2)`.
pub fn sin_inf(t: f64) -> f64 {
    cos_inf(t - 2.0)
}

/// Sorted, de-duplicated values of the driver `w` on `[0, 1/2]`.
fn driver_half_grid(precision: usize) -> Vec<f64> {
    let n_geom = ((GEOM_SHARE * precision as f64) as usize).max(2);
    let n_lin = ((LIN_SHARE * precision as f64) as usize).max(2);
    let geom = geomspace(GEOM_START, GEOM_END, n_geom);
    let lin = linspace(GEOM_END, LIN_END, n_lin);

    let mut s = Vec::with_capacity(2 * n_geom + n_lin + 2);
    s.push(0.0);
    s.extend_from_slice(&geom);
    s.extend_from_slice(&lin);
    s.extend(geom.iter().rev().map(|g| 0.5 - g));
    s.push(0.5);
    s.sort_by(f64::total_cmp);
    s.dedup();
    s
}

fn geomspace(start: f64, end: f64, n: usize) -> Vec<f64> {
    let (a, b) = (start.ln(), end.ln());
    let mut v: Vec<f64> = (0..n)
        .map(|i| (a + (b - a) * i as f64 / (n - 1) as f64).exp())
        .collect();
    v[0] = start;
    v[n - 1] = end;
    v
}

fn linspace(start: f64, end: f64, n: usize) -> Vec<f64> {
    let mut v: Vec<f64> = (0..n)
        .map(|i| start + (end - start) * i as f64 / (n - 1) as f64)
        .collect();
    v[n - 1] = end;
    v
}

#[inline]
fn signed_pow(v: f64, e: f64) -> f64 {
    if e == 0.0 {
        return v.signum() * (v != 0.0) as u8 as f64;
    }
    v.signum() * v.abs().powf(e)
}
