//! Command-line front end.
//!
//! Data goes to stdout (or `--output`), diagnostics to stderr. Exit codes:
//! 0 success, 1 I/O or data error, 2 invalid parameter, 3 numerical failure,
//! 4 verification failure.

use std::fs::File;
use std::io::{self, BufRead, BufWriter, Write};
use std::path::PathBuf;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::error::{param, Error, Result};
use crate::exponent::Exponent;
use crate::geometry::{ball_volume, rel_diff_curve, surface_measure};
use crate::rng::DEFAULT_SEED;
use crate::samplers::{
    pnormal_sample, Algorithm, Mode, SampleBatch, SquigSampler, SurfaceStrategy,
};
use crate::squigonometry::{build_grid, DEFAULT_PRECISION};
use crate::verify::{run_suite, SuiteConfig};

pub const EXIT_OK: u8 = 0;
pub const EXIT_OTHER: u8 = 1;
pub const EXIT_PARAMETER: u8 = 2;
pub const EXIT_NUMERICAL: u8 = 3;
pub const EXIT_VERIFICATION: u8 = 4;

#[derive(Debug, Parser)]
#[command(
    name = "pball",
    version,
    about = "Uniform samples in and on p-norm unit balls"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate sample points, one per row.
    Sample(SampleArgs),
    /// Print π_p, the quarter q-length, V_n and S_{n,q} as JSON.
    Constants(ConstantsArgs),
    /// Export plot data: relative area/length differences or cos_p/sin_p tables.
    Curves(CurvesArgs),
    /// Run the volume-equivalence / surface-dichotomy suite.
    Verify(VerifyArgs),
}

#[derive(Debug, Args)]
pub struct GridArgs {
    /// Exponent of the ball: a positive decimal or "inf".
    #[arg(long)]
    pub p: Exponent,
    /// Exponent of the length measure; defaults to p.
    #[arg(long)]
    pub q: Option<Exponent>,
    /// Number of nodes in the p-circle grid.
    #[arg(long, default_value_t = DEFAULT_PRECISION)]
    pub precision: usize,
}

impl GridArgs {
    fn q(&self) -> Exponent {
        self.q.unwrap_or(self.p)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Jsonl,
    Json,
}

#[derive(Debug, Args)]
pub struct SampleArgs {
    #[command(flatten)]
    pub grid: GridArgs,
    #[arg(long)]
    pub n: usize,
    #[arg(long, default_value_t = 1000)]
    pub count: usize,
    #[arg(long, value_enum, default_value_t = Mode::Volume)]
    pub mode: Mode,
    #[arg(long, value_enum, default_value_t = Algorithm::Squig)]
    pub algorithm: Algorithm,
    /// 64-bit seed, or "random".
    #[arg(long, default_value_t = SeedArg::Fixed(DEFAULT_SEED))]
    pub seed: SeedArg,
    /// Project volume samples instead of inverting surface tables when that
    /// is equivalent.
    #[arg(long)]
    pub fast_surface: bool,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ConstantsArgs {
    #[command(flatten)]
    pub grid: GridArgs,
    #[arg(long)]
    pub n: usize,
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum CurveKind {
    /// `relative_area,diff` pairs.
    RelDiff,
    /// `t,cos_p,sin_p` over one period.
    Squig,
}

#[derive(Debug, Args)]
pub struct CurvesArgs {
    #[command(flatten)]
    pub grid: GridArgs,
    #[arg(long, value_enum, default_value_t = CurveKind::RelDiff)]
    pub kind: CurveKind,
    #[arg(long, default_value_t = 1000)]
    pub resolution: usize,
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Exponents to test (comma separated).
    #[arg(long, value_delimiter = ',', default_value = "1,1.5,2,3,inf")]
    pub p: Vec<Exponent>,
    /// Dimensions to test (comma separated).
    #[arg(long, value_delimiter = ',', default_value = "2,3,5")]
    pub n: Vec<usize>,
    #[arg(long, default_value_t = 50_000)]
    pub count: usize,
    /// 64-bit seed, or "random" for a fresh soak run.
    #[arg(long, default_value_t = SeedArg::Fixed(DEFAULT_SEED))]
    pub seed: SeedArg,
    #[arg(long, default_value_t = DEFAULT_PRECISION)]
    pub precision: usize,
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SeedArg {
    Fixed(u64),
    Random,
}

impl SeedArg {
    pub fn resolve(self) -> u64 {
        match self {
            SeedArg::Fixed(s) => s,
            SeedArg::Random => {
                let nanos = std::time::SystemTime::now()
                    .duration_since(std::time::UNIX_EPOCH)
                    .map(|d| d.as_nanos() as u64)
                    .unwrap_or(0);
                crate::rng::derive_seed(nanos, std::process::id() as u64)
            }
        }
    }
}

impl std::str::FromStr for SeedArg {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        if s.eq_ignore_ascii_case("random") {
            return Ok(SeedArg::Random);
        }
        s.parse()
            .map(SeedArg::Fixed)
            .map_err(|_| format!("seed must be a 64-bit unsigned integer or \"random\", got {s:?}"))
    }
}

impl std::fmt::Display for SeedArg {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            SeedArg::Fixed(s) => write!(f, "{s}"),
            SeedArg::Random => f.write_str("random"),
        }
    }
}

#[derive(Debug, Serialize)]
pub struct Constants {
    pub p: Exponent,
    pub q: Exponent,
    pub n: usize,
    pub pi_p: f64,
    pub quarter_length_q: f64,
    #[serde(rename = "V_n")]
    pub volume: f64,
    #[serde(rename = "S_nq")]
    pub surface: f64,
}

pub fn exit_code(err: &Error) -> u8 {
    match err {
        Error::Parameter(_) => EXIT_PARAMETER,
        Error::Numerical { .. } => EXIT_NUMERICAL,
        _ => EXIT_OTHER,
    }
}

/// Runs a parsed command, writing data to `--output` or `stdout`. Returns the
/// process exit code.
pub fn run(cli: Cli, stdout: &mut dyn Write) -> Result<u8> {
    match cli.command {
        Command::Sample(a) => {
            let batch = sample(&a)?;
            with_output(&a.output, stdout, |w| write_batch(w, &batch, a.format))?;
            Ok(EXIT_OK)
        }
        Command::Constants(a) => {
            let c = constants(&a.grid, a.n)?;
            with_output(&a.output, stdout, |w| {
                serde_json::to_writer_pretty(&mut *w, &c)?;
                writeln!(w)?;
                Ok(())
            })?;
            Ok(EXIT_OK)
        }
        Command::Curves(a) => {
            with_output(&a.output, stdout, |w| curves(w, &a))?;
            Ok(EXIT_OK)
        }
        Command::Verify(a) => {
            let cfg = SuiteConfig {
                exponents: a.p.clone(),
                dims: a.n.clone(),
                count: a.count,
                seed: a.seed.resolve(),
                precision: a.precision,
                ..SuiteConfig::default()
            };
            eprintln!("verify: seed {}", cfg.seed);
            let reports = run_suite(&cfg)?;
            with_output(&a.output, stdout, |w| {
                serde_json::to_writer_pretty(&mut *w, &reports)?;
                writeln!(w)?;
                Ok(())
            })?;
            let bad: Vec<_> = reports.iter().filter(|r| !r.as_expected()).collect();
            for r in &bad {
                eprintln!(
                    "unexpected {:?}: {} (D = {:.5}, critical {:.5})",
                    r.verdict, r.name, r.statistic, r.critical_value
                );
            }
            Ok(if bad.is_empty() {
                EXIT_OK
            } else {
                EXIT_VERIFICATION
            })
        }
    }
}

fn with_output<F>(path: &Option<PathBuf>, stdout: &mut dyn Write, f: F) -> Result<()>
where
    F: FnOnce(&mut dyn Write) -> Result<()>,
{
    match path {
        Some(path) => {
            let mut w = BufWriter::new(File::create(path)?);
            f(&mut w)?;
            w.flush()?;
        }
        None => {
            let mut w = BufWriter::new(stdout);
            f(&mut w)?;
            w.flush()?;
        }
    }
    Ok(())
}

pub fn sample(a: &SampleArgs) -> Result<SampleBatch> {
    let (p, q) = (a.grid.p, a.grid.q());
    let seed = a.seed.resolve();
    match a.algorithm {
        Algorithm::Squig => {
            let grid = Arc::new(build_grid(p, q, a.grid.precision)?);
            let strategy = if a.fast_surface {
                SurfaceStrategy::ProjectWhenEquivalent
            } else {
                SurfaceStrategy::Tables
            };
            SquigSampler::new(grid, a.n)?
                .with_strategy(strategy)
                .sample(a.mode, a.count, seed)
        }
        Algorithm::PNormal => {
            if q != p {
                eprintln!("note: the p-normal sampler ignores q");
            }
            pnormal_sample(p, a.n, a.mode, a.count, seed)
        }
    }
}

pub fn constants(g: &GridArgs, n: usize) -> Result<Constants> {
    if n < 2 {
        return param(format!("constants need n >= 2, got {n}"));
    }
    let grid = build_grid(g.p, g.q(), g.precision)?;
    Ok(Constants {
        p: g.p,
        q: g.q(),
        n,
        pi_p: grid.pi_p(),
        quarter_length_q: grid.quarter_length_q(),
        volume: ball_volume(&grid, n)?,
        surface: surface_measure(&grid, n)?,
    })
}

fn curves(w: &mut dyn Write, a: &CurvesArgs) -> Result<()> {
    let grid = build_grid(a.grid.p, a.grid.q(), a.grid.precision)?;
    match a.kind {
        CurveKind::RelDiff => {
            let curve = rel_diff_curve(&grid, a.resolution)?;
            eprintln!("max |diff| = {:.10e}", curve.max_abs_diff);
            writeln!(w, "relative_area,diff")?;
            for (x, d) in &curve.points {
                writeln!(w, "{},{}", fmt(*x), fmt(*d))?;
            }
        }
        CurveKind::Squig => {
            if a.resolution < 2 {
                return param("resolution must be at least 2");
            }
            let period = 2.0 * grid.pi_p();
            writeln!(w, "t,cos_p,sin_p")?;
            for i in 0..a.resolution {
                let t = period * i as f64 / (a.resolution - 1) as f64;
                let (c, s) = grid.cos_sin(t);
                writeln!(w, "{},{},{}", fmt(t), fmt(c), fmt(s))?;
            }
        }
    }
    Ok(())
}

/// 17 significant digits, enough to round-trip any `f64`.
fn fmt(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn write_batch(w: &mut dyn Write, batch: &SampleBatch, format: Format) -> Result<()> {
    match format {
        Format::Csv => {
            let header: Vec<String> = (1..=batch.n).map(|i| format!("x{i}")).collect();
            writeln!(w, "{}", header.join(","))?;
            for row in batch.rows() {
                let cells: Vec<String> = row.iter().map(|&v| fmt(v)).collect();
                writeln!(w, "{}", cells.join(","))?;
            }
        }
        Format::Jsonl => {
            for row in batch.rows() {
                serde_json::to_writer(&mut *w, row)?;
                writeln!(w)?;
            }
        }
        Format::Json => {
            #[derive(Serialize)]
            struct Doc<'a> {
                p: Exponent,
                q: Exponent,
                n: usize,
                mode: Mode,
                algorithm: Algorithm,
                seed: u64,
                rows: Vec<&'a [f64]>,
            }
            let doc = Doc {
                p: batch.p,
                q: batch.q,
                n: batch.n,
                mode: batch.mode,
                algorithm: batch.algorithm,
                seed: batch.seed,
                rows: batch.rows().collect(),
            };
            serde_json::to_writer(&mut *w, &doc)?;
            writeln!(w)?;
        }
    }
    Ok(())
}

/// Parses CSV written by [`write_batch`] back into a batch.
pub fn read_csv<R: BufRead>(
    reader: R,
    p: Exponent,
    q: Exponent,
    mode: Mode,
    algorithm: Algorithm,
    seed: u64,
) -> Result<SampleBatch> {
    let mut lines = reader.lines();
    let header = lines
        .next()
        .ok_or_else(|| Error::Data("empty CSV".into()))??;
    let n = header.split(',').count();
    for (i, name) in header.split(',').enumerate() {
        if name != format!("x{}", i + 1) {
            return Err(Error::Data(format!("unexpected column {name:?}")));
        }
    }
    let mut data = Vec::new();
    for (i, line) in lines.enumerate() {
        let line = line?;
        let before = data.len();
        for cell in line.split(',') {
            let v: f64 = cell
                .parse()
                .map_err(|_| Error::Data(format!("line {}: bad number {cell:?}", i + 2)))?;
            data.push(v);
        }
        if data.len() - before != n {
            return Err(Error::Data(format!("line {}: expected {n} columns", i + 2)));
        }
    }
    Ok(SampleBatch {
        data,
        n,
        p,
        q,
        mode,
        algorithm,
        seed,
    })
}

/// Parses `args`, runs the command and maps failures to exit codes.
pub fn main_with_args<I, T>(args: I) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                EXIT_PARAMETER
            } else {
                EXIT_OK
            };
        }
    };
    let mut out = io::stdout().lock();
    match run(cli, &mut out) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}
