//! Batch generators for points in (volume) or on (surface) the unit p-ball.
//!
//! * [`Algorithm::Squig`]: coordinate-by-coordinate construction. For
//!   `k = 2..n` an angle `T_k` is drawn by inverting a tabulated CDF of
//!   `sin_p(t)^{k-2}` against `dt` (volume) or `dL_q` (surface); coordinate
//!   `k` becomes `cos_p(T_k)` and the earlier coordinates are multiplied by
//!   `sin_p(T_k)`. The angular recursion alone gives the projected volume
//!   law on the sphere, so volume mode also scales by `R = U^{1/n}`.
//! * [`Algorithm::PNormal`]: i.i.d. p-normal coordinates normalised by their
//!   p-norm, then scaled by `R = U^{1/n}` (volume) or left on the sphere
//!   (surface). The surface variant is only Hausdorff-uniform when the
//!   q-length element is proportional to `dt`.
//!
//! Rows are generated in fixed-size chunks in parallel. Chunk `c` uses RNG
//! stream `c` of the batch seed, so output is identical for any thread count.

use std::sync::Arc;

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{param, Error, Result};
use crate::exponent::Exponent;
use crate::geometry::{sin_power_cdf, CdfTable, Measure};
use crate::pnormal::ln_magnitude;
use crate::rng::{stream, StreamRng};
use crate::squigonometry::PCircleGrid;

const CHUNK_ROWS: usize = 1024;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Volume,
    Surface,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Algorithm {
    Squig,
    #[value(name = "pnormal")]
    PNormal,
}

/// How the squigonometric surface sampler treats exponents for which
/// projecting the volume is already surface-uniform.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum SurfaceStrategy {
    /// Always invert the surface tables.
    #[default]
    Tables,
    /// Project p-normal volume samples when that is equivalent.
    ProjectWhenEquivalent,
}

/// `N × n` row-major sample matrix with its generation parameters.
#[derive(Clone, Debug)]
pub struct SampleBatch {
    pub data: Vec<f64>,
    pub n: usize,
    pub p: Exponent,
    pub q: Exponent,
    pub mode: Mode,
    pub algorithm: Algorithm,
    pub seed: u64,
}

impl SampleBatch {
    pub fn len(&self) -> usize {
        self.data.len() / self.n
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    pub fn rows(&self) -> std::slice::ChunksExact<'_, f64> {
        self.data.chunks_exact(self.n)
    }

    /// p-norm of every row.
    pub fn norms(&self) -> Vec<f64> {
        self.rows().map(|r| self.p.norm(r)).collect()
    }

    /// Checks the norm bound of the batch's mode on every row: unit norm
    /// within `1e-9` for surfaces, at most `1 + 1e-12` for volumes.
    pub fn check_norms(&self) -> Result<()> {
        for (i, row) in self.rows().enumerate() {
            let r = self.p.norm(row);
            let ok = match self.mode {
                Mode::Surface => (r - 1.0).abs() <= 1e-9,
                Mode::Volume => r <= 1.0 + 1e-12,
            };
            if !ok {
                return Err(Error::Data(format!(
                    "row {i} has p-norm {r} in a {:?} batch",
                    self.mode
                )));
            }
        }
        Ok(())
    }
}

/// Inverse-CDF table of the angle `T_k`.
#[derive(Clone, Debug)]
pub struct InverseCdfTable {
    pub k: usize,
    pub mode: Mode,
    table: CdfTable,
}

impl InverseCdfTable {
    pub fn new(grid: &PCircleGrid, k: usize, mode: Mode) -> Result<Self> {
        if k < 2 {
            return param(format!("angle index k must be at least 2, got {k}"));
        }
        let measure = match mode {
            Mode::Volume => Measure::Area,
            Mode::Surface => Measure::Length,
        };
        Ok(InverseCdfTable {
            k,
            mode,
            table: sin_power_cdf(grid, (k - 2) as u32, measure)?,
        })
    }

    /// Cumulative probabilities at the grid nodes (the u-grid).
    pub fn u(&self) -> &[f64] {
        self.table.values()
    }

    pub fn cdf(&self) -> &CdfTable {
        &self.table
    }

    #[inline]
    pub fn sample_angle(&self, u: f64) -> f64 {
        self.table.invert(u)
    }
}

/// Squigonometric sampler for a fixed dimension; angle tables for
/// `k = 2..=n` are built once per mode and reused for every row.
#[derive(Clone, Debug)]
pub struct SquigSampler {
    grid: Arc<PCircleGrid>,
    n: usize,
    volume: Vec<InverseCdfTable>,
    surface: Vec<InverseCdfTable>,
    strategy: SurfaceStrategy,
}

impl SquigSampler {
    pub fn new(grid: Arc<PCircleGrid>, n: usize) -> Result<Self> {
        if n < 1 {
            return param("dimension must be at least 1");
        }
        if grid.len() < 2 {
            return param("grid is empty");
        }
        let build = |mode| {
            (2..=n)
                .map(|k| InverseCdfTable::new(&grid, k, mode))
                .collect::<Result<Vec<_>>>()
        };
        let volume = build(Mode::Volume)?;
        let surface = build(Mode::Surface)?;
        Ok(SquigSampler {
            grid,
            n,
            volume,
            surface,
            strategy: SurfaceStrategy::Tables,
        })
    }

    pub fn with_strategy(mut self, strategy: SurfaceStrategy) -> Self {
        self.strategy = strategy;
        self
    }

    pub fn grid(&self) -> &PCircleGrid {
        &self.grid
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn table(&self, k: usize, mode: Mode) -> Option<&InverseCdfTable> {
        let tables = match mode {
            Mode::Volume => &self.volume,
            Mode::Surface => &self.surface,
        };
        k.checked_sub(2).and_then(|i| tables.get(i))
    }

    pub fn sample(&self, mode: Mode, count: usize, seed: u64) -> Result<SampleBatch> {
        if count < 1 {
            return param("sample count must be at least 1");
        }
        let (p, q) = (self.grid.p(), self.grid.q());
        if mode == Mode::Surface
            && self.strategy == SurfaceStrategy::ProjectWhenEquivalent
            && p.projection_is_surface_uniform(q)
        {
            let mut batch = pnormal_sample(p, self.n, Mode::Surface, count, seed)?;
            batch.q = q;
            batch.algorithm = Algorithm::Squig;
            return Ok(batch);
        }
        let tables = match mode {
            Mode::Volume => &self.volume,
            Mode::Surface => &self.surface,
        };
        let data = generate(self.n, count, seed, |row, rng| {
            self.fill_row(tables, mode, row, rng)
        });
        Ok(SampleBatch {
            data,
            n: self.n,
            p,
            q,
            mode,
            algorithm: Algorithm::Squig,
            seed,
        })
    }

    fn fill_row(
        &self,
        tables: &[InverseCdfTable],
        mode: Mode,
        row: &mut [f64],
        rng: &mut StreamRng,
    ) {
        row[0] = 1.0;
        for (k, table) in (2..=self.n).zip(tables) {
            let t = table.sample_angle(rng.random::<f64>());
            let (c, s) = self.grid.quadrant_cos_sin(t);
            for v in &mut row[..k - 1] {
                *v *= s;
            }
            row[k - 1] = c;
        }
        if mode == Mode::Volume {
            scale(row, radius(self.n, rng));
        }
        apply_signs(row, rng);
    }
}

/// One-shot squigonometric batch (table path for every exponent).
pub fn squig_sample(
    grid: Arc<PCircleGrid>,
    n: usize,
    mode: Mode,
    count: usize,
    seed: u64,
) -> Result<SampleBatch> {
    SquigSampler::new(grid, n)?.sample(mode, count, seed)
}

/// Normalised p-normal batch; volume mode rescales by `U^{1/n}`. For
/// `p = ∞` volume points are drawn directly from the cube `(-1, 1)^n`.
pub fn pnormal_sample(
    p: Exponent,
    n: usize,
    mode: Mode,
    count: usize,
    seed: u64,
) -> Result<SampleBatch> {
    if n < 1 {
        return param("dimension must be at least 1");
    }
    if count < 1 {
        return param("sample count must be at least 1");
    }
    let data = generate(n, count, seed, |row, rng| pnormal_row(p, mode, row, rng));
    Ok(SampleBatch {
        data,
        n,
        p,
        q: p,
        mode,
        algorithm: Algorithm::PNormal,
        seed,
    })
}

fn pnormal_row(p: Exponent, mode: Mode, row: &mut [f64], rng: &mut StreamRng) {
    let n = row.len();
    if p.is_infinite() {
        for v in row.iter_mut() {
            *v = rng.random::<f64>();
        }
        if mode == Mode::Surface {
            let m = p.norm(row);
            scale(row, 1.0 / m);
        }
    } else {
        let pv = p.value();
        let mut top = f64::NEG_INFINITY;
        for v in row.iter_mut() {
            *v = ln_magnitude(pv, rng);
            top = top.max(*v);
        }
        for v in row.iter_mut() {
            *v = (*v - top).exp();
        }
        let r = p.norm(row);
        let target = match mode {
            Mode::Volume => radius(n, rng),
            Mode::Surface => 1.0,
        };
        scale(row, target / r);
    }
    apply_signs(row, rng);
}

/// `U^{1/n}`, the radius of a volume-uniform point.
#[inline]
fn radius(n: usize, rng: &mut StreamRng) -> f64 {
    rng.random::<f64>().powf(1.0 / n as f64)
}

#[inline]
fn scale(row: &mut [f64], factor: f64) {
    for v in row.iter_mut() {
        *v *= factor;
    }
}

fn apply_signs(row: &mut [f64], rng: &mut StreamRng) {
    for chunk in row.chunks_mut(64) {
        let bits: u64 = rng.random();
        for (j, v) in chunk.iter_mut().enumerate() {
            if bits >> j & 1 == 1 {
                *v = -*v;
            }
        }
    }
}

fn generate<F>(n: usize, count: usize, seed: u64, fill: F) -> Vec<f64>
where
    F: Fn(&mut [f64], &mut StreamRng) + Sync,
{
    let mut data = vec![0.0; n * count];
    data.par_chunks_mut(n * CHUNK_ROWS)
        .enumerate()
        .for_each(|(c, chunk)| {
            let mut rng = stream(seed, c as u64);
            for row in chunk.chunks_exact_mut(n) {
                fill(row, &mut rng);
            }
        });
    data
}
