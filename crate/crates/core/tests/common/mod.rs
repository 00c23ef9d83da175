//! Reference values computed without the library's grid: gamma closed
//! forms, direct quadrature of the p-circle arc, and quadrature of the
//! p-normal density.
#![allow(dead_code)]

use std::sync::Arc;

use pball::{build_grid, Exponent, PCircleGrid};
use statrs::distribution::{Binomial, DiscreteCDF};
use statrs::function::gamma::{gamma, ln_gamma};

pub fn e(p: f64) -> Exponent {
    Exponent::new(p).unwrap()
}

pub fn grid(p: f64, q: f64, precision: usize) -> Arc<PCircleGrid> {
    Arc::new(build_grid(e(p), e(q), precision).unwrap())
}

/// Area of the unit p-disk, `(2Γ(1+1/p))² / Γ(1+2/p)`.
pub fn pi_p(p: f64) -> f64 {
    if p.is_infinite() {
        return 4.0;
    }
    (2.0 * gamma(1.0 + 1.0 / p)).powi(2) / gamma(1.0 + 2.0 / p)
}

/// Volume of the unit n-dimensional p-ball, `(2Γ(1+1/p))^n / Γ(1+n/p)`.
pub fn ball_volume(p: f64, n: usize) -> f64 {
    if p.is_infinite() {
        return 2f64.powi(n as i32);
    }
    let n = n as f64;
    (n * (2.0 * gamma(1.0 + 1.0 / p)).ln() - ln_gamma(1.0 + n / p)).exp()
}

/// Adaptive Simpson on `[a, b]`.
pub fn simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64) -> f64 {
    #[allow(clippy::too_many_arguments)]
    fn rec<F: Fn(f64) -> f64>(
        f: &F,
        a: f64,
        b: f64,
        fa: f64,
        fm: f64,
        fb: f64,
        whole: f64,
        tol: f64,
        depth: u32,
    ) -> f64 {
        let m = 0.5 * (a + b);
        let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
        let (flm, frm) = (f(lm), f(rm));
        let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
        let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= 15.0 * tol {
            return left + right + delta / 15.0;
        }
        rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
            + rec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
    }
    let (fa, fm, fb) = (f(a), f(0.5 * (a + b)), f(b));
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    rec(f, a, b, fa, fm, fb, whole, tol, 48)
}

/// Arc of the first quadrant of the unit p-circle, `1 ≤ p < ∞`, measured
/// in the q-norm and tabulated over the first octant (`y ≤ x`).
///
/// The octant is parametrised by `y = u²`. Along it the area parameter
/// satisfies `dt = x^{1-p} dy` and the q-length `dL = ‖(y^{p-1} x^{1-p}, 1)‖_q dy`.
/// Each step is integrated with Simpson's rule.
pub struct OctantArc {
    pub p: f64,
    pub q: f64,
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    pub t: Vec<f64>,
    pub l: Vec<f64>,
}

impl OctantArc {
    pub fn new(p: f64, q: f64, steps: usize) -> Self {
        assert!(p >= 1.0 && p.is_finite());
        let y_end = 0.5f64.powf(1.0 / p);
        let u_end = y_end.sqrt();
        let xf = |y: f64| (1.0 - y.powf(p)).max(0.0).powf(1.0 / p);
        let qnorm = |a: f64, b: f64| {
            if q.is_infinite() {
                a.max(b)
            } else {
                let m = a.max(b);
                if m == 0.0 {
                    return 0.0;
                }
                m * ((a / m).powf(q) + (b / m).powf(q)).powf(1.0 / q)
            }
        };
        // Integrands with respect to u.
        let dt = |u: f64| {
            let y = u * u;
            2.0 * u * xf(y).powf(1.0 - p)
        };
        let dl = |u: f64| {
            let y = u * u;
            let x = xf(y);
            // 2u·‖(y^{p-1} x^{1-p}, 1)‖_q, written to stay finite at u = 0.
            let slope = u.powf(2.0 * p - 1.0) * x.powf(1.0 - p);
            qnorm(2.0 * slope, 2.0 * u)
        };
        let mut x = Vec::with_capacity(steps + 1);
        let mut y = Vec::with_capacity(steps + 1);
        let mut t = Vec::with_capacity(steps + 1);
        let mut l = Vec::with_capacity(steps + 1);
        let (mut ct, mut cl) = (0.0, 0.0);
        let h = u_end / steps as f64;
        let (mut ft, mut fl) = (dt(0.0), dl(0.0));
        for i in 0..=steps {
            let u = if i == steps { u_end } else { i as f64 * h };
            if i > 0 {
                let um = u - 0.5 * h;
                let (gt, gl) = (dt(u), dl(u));
                ct += h / 6.0 * (ft + 4.0 * dt(um) + gt);
                cl += h / 6.0 * (fl + 4.0 * dl(um) + gl);
                ft = gt;
                fl = gl;
            }
            let yy = u * u;
            y.push(yy);
            x.push(xf(yy));
            t.push(ct);
            l.push(cl);
        }
        OctantArc { p, q, x, y, t, l }
    }

    /// `π_p` from the octant: the quadrant spans twice the octant's `t`.
    pub fn pi_p(&self) -> f64 {
        4.0 * self.t.last().unwrap()
    }

    pub fn quarter_length(&self) -> f64 {
        2.0 * self.l.last().unwrap()
    }

    /// `max |L(t)/L(π_p/2) − t/(π_p/2)|` over the nodes. The second octant
    /// mirrors the first with the sign of the difference flipped, so the
    /// first octant carries the whole supremum.
    pub fn rel_diff_max(&self) -> f64 {
        let (tt, lt) = (2.0 * self.t.last().unwrap(), self.quarter_length());
        self.t
            .iter()
            .zip(&self.l)
            .map(|(&t, &l)| (l / lt - t / tt).abs())
            .fold(0.0, f64::max)
    }

    /// Normalised `∫ sin_p^{n-2} dt` (volume) and `∫ sin_p^{n-2} dL_q`
    /// (surface) CDFs over the whole quadrant, as `(t, F_vol, F_surf)`.
    pub fn quadrant_cdfs(&self, n: usize) -> Vec<(f64, f64, f64)> {
        let k = (n - 2) as i32;
        let cum = |w: &[f64], m: &[f64]| {
            let mut acc = vec![0.0; w.len()];
            for i in 1..w.len() {
                let (a, b) = (w[i - 1].powi(k), w[i].powi(k));
                acc[i] = acc[i - 1] + 0.5 * (a + b) * (m[i] - m[i - 1]);
            }
            acc
        };
        // First octant uses sin = y; the mirrored second octant uses sin = x.
        let (vy, vx) = (cum(&self.y, &self.t), cum(&self.x, &self.t));
        let (sy, sx) = (cum(&self.y, &self.l), cum(&self.x, &self.l));
        let last = self.t.len() - 1;
        let vtot = vy[last] + vx[last];
        let stot = sy[last] + sx[last];
        let half = 2.0 * self.t[last];
        let mut out: Vec<(f64, f64, f64)> = (0..=last)
            .map(|i| (self.t[i], vy[i] / vtot, sy[i] / stot))
            .collect();
        out.extend(
            (0..last)
                .rev()
                .map(|i| (half - self.t[i], 1.0 - vx[i] / vtot, 1.0 - sx[i] / stot)),
        );
        out
    }
}

/// Linear interpolation on increasing `xs`, clamped.
pub fn interp(xs: &[f64], ys: &[f64], x: f64) -> f64 {
    let i = xs.partition_point(|&v| v < x);
    if i == 0 {
        return ys[0];
    }
    if i >= xs.len() {
        return ys[ys.len() - 1];
    }
    let f = (x - xs[i - 1]) / (xs[i] - xs[i - 1]);
    ys[i - 1] + f * (ys[i] - ys[i - 1])
}

/// CDF table built from `(t, F_vol, F_surf)` triples.
pub struct OracleCdf {
    pub t: Vec<f64>,
    pub f: Vec<f64>,
}

impl OracleCdf {
    pub fn volume(rows: &[(f64, f64, f64)]) -> Self {
        OracleCdf {
            t: rows.iter().map(|r| r.0).collect(),
            f: rows.iter().map(|r| r.1).collect(),
        }
    }

    pub fn surface(rows: &[(f64, f64, f64)]) -> Self {
        OracleCdf {
            t: rows.iter().map(|r| r.0).collect(),
            f: rows.iter().map(|r| r.2).collect(),
        }
    }

    pub fn eval(&self, t: f64) -> f64 {
        interp(&self.t, &self.f, t)
    }
}

/// `c_p exp(-|x|^p / p)` with `c_p` from the gamma function.
pub fn pnormal_density(p: f64, x: f64) -> f64 {
    if p.is_infinite() {
        return if x.abs() < 1.0 { 0.5 } else { 0.0 };
    }
    let c = 1.0 / (2.0 * p.powf(1.0 / p) * gamma(1.0 + 1.0 / p));
    c * (-x.abs().powf(p) / p).exp()
}

/// Point beyond which `exp(-x^p/p) < 1e-300`.
pub fn pnormal_cutoff(p: f64) -> f64 {
    (p * 300.0 * std::f64::consts::LN_10).powf(1.0 / p)
}

/// CDF of the unit-mass density `exp(-|x|^p/p)` (normalised by its own
/// quadrature total), tabulated on a geometric grid of `|x|` and integrated
/// with adaptive Simpson between nodes.
pub struct PNormalCdf {
    xs: Vec<f64>,
    half: Vec<f64>,
}

impl PNormalCdf {
    pub fn new(p: f64, nodes: usize) -> Self {
        let hi = pnormal_cutoff(p);
        let lo = 1e-12f64;
        let mut xs = vec![0.0];
        let r = (hi / lo).ln() / (nodes - 1) as f64;
        xs.extend((0..nodes).map(|i| lo * (r * i as f64).exp()));
        let f = |x: f64| (-x.powf(p) / p).exp();
        let mut half = vec![0.0];
        for w in xs.windows(2) {
            let prev = *half.last().unwrap();
            half.push(prev + simpson(&f, w[0], w[1], 1e-15));
        }
        let total = *half.last().unwrap();
        for v in half.iter_mut() {
            *v /= total;
        }
        PNormalCdf { xs, half }
    }

    pub fn eval(&self, x: f64) -> f64 {
        let h = 0.5 * interp(&self.xs, &self.half, x.abs());
        if x < 0.0 {
            0.5 - h
        } else {
            0.5 + h
        }
    }
}

/// Two-sided `1 - level` acceptance region for the number of rejections in
/// `reps` independent level-`alpha` tests, via the exact binomial law.
pub fn binomial_interval(reps: u64, alpha: f64, level: f64) -> (u64, u64) {
    let b = Binomial::new(alpha, reps).unwrap();
    let tail = 0.5 * level;
    let lo = (0..=reps).find(|&k| b.cdf(k) > tail).unwrap();
    let hi = (0..=reps).find(|&k| b.cdf(k) >= 1.0 - tail).unwrap();
    (lo, hi)
}

#[derive(serde::Deserialize)]
pub struct Thresholds {
    pub oracle_resolution: usize,
    pub margin: f64,
    pub rel_diff: Vec<RelDiffEntry>,
    pub cdf_gap: Vec<CdfGapEntry>,
}

#[derive(serde::Deserialize)]
pub struct RelDiffEntry {
    pub p: f64,
    pub q: f64,
    pub oracle: f64,
    pub delta: f64,
}

#[derive(serde::Deserialize)]
pub struct CdfGapEntry {
    pub p: f64,
    pub q: f64,
    pub n: usize,
    pub oracle: f64,
    pub delta: f64,
}

pub fn thresholds() -> Thresholds {
    let raw = include_str!("../fixtures/thresholds.json");
    serde_json::from_str(raw).unwrap()
}
