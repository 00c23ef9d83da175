//! Goodness-of-fit tests and the volume/surface equivalence suite.
//!
//! Kolmogorov-Smirnov tests use the asymptotic Kolmogorov distribution for
//! both critical values and p-values.

use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;
use statrs::distribution::{ChiSquared, ContinuousCDF};

use crate::error::{param, Error, Result};
use crate::exponent::Exponent;
use crate::geometry::{surface_cdf, volume_cdf};
use crate::rng::{derive_seed, DEFAULT_SEED};
use crate::samplers::{pnormal_sample, Mode, SampleBatch, SquigSampler};
use crate::squigonometry::{build_grid, PCircleGrid, DEFAULT_PRECISION};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Reject,
}

#[derive(Clone, Debug, Serialize)]
pub struct TestReport {
    pub name: String,
    pub statistic: f64,
    pub critical_value: f64,
    pub alpha: f64,
    /// Sample size(s) entering the test.
    pub sizes: Vec<usize>,
    pub p_value: f64,
    /// `Pass` iff `statistic < critical_value`.
    pub verdict: Verdict,
    /// Verdict the suite requires, if any.
    pub expected: Option<Verdict>,
}

impl TestReport {
    fn new(
        name: impl Into<String>,
        statistic: f64,
        critical_value: f64,
        alpha: f64,
        sizes: Vec<usize>,
        p_value: f64,
    ) -> Self {
        let verdict = if statistic < critical_value {
            Verdict::Pass
        } else {
            Verdict::Reject
        };
        TestReport {
            name: name.into(),
            statistic,
            critical_value,
            alpha,
            sizes,
            p_value,
            verdict,
            expected: None,
        }
    }

    pub fn expect(mut self, verdict: Verdict) -> Self {
        self.expected = Some(verdict);
        self
    }

    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }

    /// False only when an expectation exists and was not met.
    pub fn as_expected(&self) -> bool {
        self.expected.is_none_or(|e| e == self.verdict)
    }
}

/// `P(K > x)` for the Kolmogorov distribution.
pub fn kolmogorov_survival(x: f64) -> f64 {
    if x <= 0.0 {
        return 1.0;
    }
    if x < 1.0 {
        // Jacobi-transformed series, accurate for small x.
        let c = std::f64::consts::PI * std::f64::consts::PI / (8.0 * x * x);
        let s: f64 = (0..20)
            .map(|j| {
                let m = (2 * j + 1) as f64;
                (-m * m * c).exp()
            })
            .sum();
        return (1.0 - (2.0 * std::f64::consts::PI).sqrt() / x * s).clamp(0.0, 1.0);
    }
    let mut s = 0.0;
    for k in 1..=100 {
        let kf = k as f64;
        let term = (-2.0 * kf * kf * x * x).exp();
        s += if k % 2 == 1 { term } else { -term };
        if term < 1e-18 {
            break;
        }
    }
    (2.0 * s).clamp(0.0, 1.0)
}

/// `x` with `P(K > x) = alpha`.
pub fn kolmogorov_quantile(alpha: f64) -> f64 {
    let (mut lo, mut hi) = (0.1_f64, 10.0_f64);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if kolmogorov_survival(mid) > alpha {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

fn check_alpha(alpha: f64) -> Result<()> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return param(format!("alpha must lie in (0, 1), got {alpha}"));
    }
    Ok(())
}

fn sorted(xs: &[f64]) -> Result<Vec<f64>> {
    if xs.iter().any(|v| v.is_nan()) {
        return Err(Error::Data("NaN in sample".into()));
    }
    let mut v = xs.to_vec();
    v.sort_by(f64::total_cmp);
    Ok(v)
}

/// KS statistic `sup |F_n - F|` of `samples` against a continuous CDF.
pub fn ks_statistic<F: Fn(f64) -> f64>(samples: &[f64], cdf: F) -> Result<f64> {
    if samples.is_empty() {
        return Err(Error::Data("KS test on an empty sample".into()));
    }
    let xs = sorted(samples)?;
    let n = xs.len() as f64;
    Ok(xs.iter().enumerate().fold(0.0_f64, |d, (i, &x)| {
        let f = cdf(x);
        d.max((i + 1) as f64 / n - f).max(f - i as f64 / n)
    }))
}

pub fn ks_one_sample<F: Fn(f64) -> f64>(
    name: &str,
    samples: &[f64],
    cdf: F,
    alpha: f64,
) -> Result<TestReport> {
    check_alpha(alpha)?;
    let d = ks_statistic(samples, cdf)?;
    let n = samples.len();
    let root = (n as f64).sqrt();
    Ok(TestReport::new(
        name,
        d,
        kolmogorov_quantile(alpha) / root,
        alpha,
        vec![n],
        kolmogorov_survival(d * root),
    ))
}

/// Two-sample KS statistic `sup |F_a - F_b|`.
pub fn ks_two_sample_statistic(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::Data("KS test on an empty sample".into()));
    }
    let (xs, ys) = (sorted(a)?, sorted(b)?);
    let (na, nb) = (xs.len() as f64, ys.len() as f64);
    let (mut i, mut j) = (0usize, 0usize);
    let mut d = 0.0_f64;
    while i < xs.len() && j < ys.len() {
        let v = xs[i].min(ys[j]);
        while i < xs.len() && xs[i] <= v {
            i += 1;
        }
        while j < ys.len() && ys[j] <= v {
            j += 1;
        }
        d = d.max((i as f64 / na - j as f64 / nb).abs());
    }
    Ok(d)
}

pub fn ks_two_sample(name: &str, a: &[f64], b: &[f64], alpha: f64) -> Result<TestReport> {
    check_alpha(alpha)?;
    let d = ks_two_sample_statistic(a, b)?;
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let root = (na * nb / (na + nb)).sqrt();
    Ok(TestReport::new(
        name,
        d,
        kolmogorov_quantile(alpha) / root,
        alpha,
        vec![a.len(), b.len()],
        kolmogorov_survival(d * root),
    ))
}

/// Normal approximation to the power of a two-sample KS test with `n` per
/// sample when the two laws are `sup_distance` apart.
pub fn ks_two_sample_power(sup_distance: f64, n: usize, alpha: f64) -> f64 {
    let scale = (2.0 / n as f64).sqrt();
    let critical = kolmogorov_quantile(alpha) * scale;
    // The empirical difference at the arg-max has standard deviation at most ½·scale.
    let z = (sup_distance - critical) / (0.5 * scale);
    0.5 * statrs::function::erf::erfc(-z / std::f64::consts::SQRT_2)
}

/// Pearson chi-square test of `counts` against equal cell probabilities.
pub fn chi_square_uniform(name: &str, counts: &[u64], alpha: f64) -> Result<TestReport> {
    check_alpha(alpha)?;
    if counts.len() < 2 {
        return param("chi-square test needs at least two bins");
    }
    let total: u64 = counts.iter().sum();
    if total == 0 {
        return Err(Error::Data("chi-square test on empty counts".into()));
    }
    let expected = total as f64 / counts.len() as f64;
    let stat: f64 = counts
        .iter()
        .map(|&c| (c as f64 - expected).powi(2) / expected)
        .sum();
    let dist =
        ChiSquared::new((counts.len() - 1) as f64).map_err(|e| Error::Parameter(e.to_string()))?;
    Ok(TestReport::new(
        name,
        stat,
        dist.inverse_cdf(1.0 - alpha),
        alpha,
        vec![total as usize],
        dist.sf(stat),
    ))
}

/// Recovers the angle `T_k` of every row by undoing the coordinate
/// recursion: `T_k` is the area parameter of the direction
/// `(|x_k|, ‖(x_1..x_{k-1})‖_p)`. Rows need not be normalised. A row whose
/// first `k` coordinates all vanish yields `0`.
pub fn recover_t(grid: &PCircleGrid, batch: &SampleBatch, k: usize) -> Result<Vec<f64>> {
    let p = batch.p;
    if grid.p() != p {
        return param(format!(
            "grid exponent {} differs from batch exponent {p}",
            grid.p()
        ));
    }
    if k < 2 || k > batch.n {
        return param(format!("k must lie in 2..={}, got {k}", batch.n));
    }
    let mut out = Vec::with_capacity(batch.len());
    for (i, row) in batch.rows().enumerate() {
        if let Some(bad) = row.iter().find(|v| v.is_nan() || v.abs() > 1.0 + 1e-9) {
            return Err(Error::Data(format!(
                "row {i} has coordinate {bad} outside [-1, 1]"
            )));
        }
        let rest = p.norm(&row[..k - 1]);
        out.push(grid.angle_of(row[k - 1], rest));
    }
    Ok(out)
}

/// Configuration of the equivalence/dichotomy suite.
#[derive(Clone, Debug)]
pub struct SuiteConfig {
    pub exponents: Vec<Exponent>,
    pub dims: Vec<usize>,
    pub count: usize,
    pub seed: u64,
    pub precision: usize,
    /// Level for tests expected to pass.
    pub alpha: f64,
    /// Level for tests expected to reject.
    pub alpha_reject: f64,
    /// Minimum predicted power before a rejection is required.
    pub min_power: f64,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig {
            exponents: [1.0, 1.5, 2.0, 3.0, f64::INFINITY]
                .iter()
                .map(|&p| Exponent::new(p).expect("valid exponent"))
                .collect(),
            dims: vec![2, 3, 5],
            count: 50_000,
            seed: DEFAULT_SEED,
            precision: DEFAULT_PRECISION,
            alpha: 0.01,
            alpha_reject: 1e-3,
            min_power: 0.99,
        }
    }
}

/// Runs, for every `(p, n)` cell with `q = p`:
///
/// * volume: squig vs p-normal two-sample KS on the p-radius and on every
///   recovered angle (expected to pass), plus one-sample KS of both radii
///   against `r^n`;
/// * surface: squig vs p-normal two-sample KS on every recovered angle.
///   Expected to pass when projection is surface-uniform; otherwise expected
///   to reject when the predicted power from the analytic sup-distance
///   between the volume and surface angle laws reaches `min_power`, and
///   reported without expectation when it does not.
pub fn run_suite(cfg: &SuiteConfig) -> Result<Vec<TestReport>> {
    let cells: Vec<(usize, Exponent, usize)> = cfg
        .exponents
        .iter()
        .flat_map(|&p| cfg.dims.iter().map(move |&n| (p, n)))
        .enumerate()
        .map(|(i, (p, n))| (i, p, n))
        .collect();
    let per_cell = cells
        .par_iter()
        .map(|&(i, p, n)| run_cell(cfg, i as u64, p, n))
        .collect::<Result<Vec<_>>>()?;
    Ok(per_cell.into_iter().flatten().collect())
}

fn run_cell(cfg: &SuiteConfig, cell: u64, p: Exponent, n: usize) -> Result<Vec<TestReport>> {
    let grid = Arc::new(build_grid(p, p, cfg.precision)?);
    let sampler = SquigSampler::new(grid.clone(), n)?;
    let seed = |role: u64| derive_seed(cfg.seed, cell * 8 + role);
    let mut out = Vec::new();
    let tag = format!("p={p} n={n}");

    let v1 = sampler.sample(Mode::Volume, cfg.count, seed(0))?;
    let v2 = pnormal_sample(p, n, Mode::Volume, cfg.count, seed(1))?;
    let (r1, r2) = (v1.norms(), v2.norms());
    out.push(
        ks_two_sample(
            &format!("volume radius squig~pnormal {tag}"),
            &r1,
            &r2,
            cfg.alpha,
        )?
        .expect(Verdict::Pass),
    );
    let power_law = |r: f64| r.clamp(0.0, 1.0).powi(n as i32);
    out.push(
        ks_one_sample(
            &format!("volume radius squig~r^n {tag}"),
            &r1,
            power_law,
            cfg.alpha,
        )?
        .expect(Verdict::Pass),
    );
    out.push(
        ks_one_sample(
            &format!("volume radius pnormal~r^n {tag}"),
            &r2,
            power_law,
            cfg.alpha,
        )?
        .expect(Verdict::Pass),
    );
    for k in 2..=n {
        let (a, b) = (recover_t(&grid, &v1, k)?, recover_t(&grid, &v2, k)?);
        out.push(
            ks_two_sample(
                &format!("volume t_{k} squig~pnormal {tag}"),
                &a,
                &b,
                cfg.alpha,
            )?
            .expect(Verdict::Pass),
        );
    }

    let s1 = sampler.sample(Mode::Surface, cfg.count, seed(2))?;
    let s2 = pnormal_sample(p, n, Mode::Surface, cfg.count, seed(3))?;
    let equivalent = p.projection_is_surface_uniform(p);
    for k in 2..=n {
        let (a, b) = (recover_t(&grid, &s1, k)?, recover_t(&grid, &s2, k)?);
        let name = format!("surface t_{k} squig~pnormal {tag}");
        let report = if equivalent {
            ks_two_sample(&name, &a, &b, cfg.alpha)?.expect(Verdict::Pass)
        } else {
            let gap = volume_cdf(&grid, k)?.sup_distance(&surface_cdf(&grid, k)?);
            let r = ks_two_sample(&name, &a, &b, cfg.alpha_reject)?;
            if ks_two_sample_power(gap, cfg.count, cfg.alpha_reject) >= cfg.min_power {
                r.expect(Verdict::Reject)
            } else {
                r
            }
        };
        out.push(report);
    }
    Ok(out)
}
