//! Uniform sampling in and on n-dimensional p-balls.
//!
//! Two families of generators are provided: coordinate-by-coordinate
//! samplers driven by tabulated squigonometric functions, which are uniform
//! with respect to volume or to the q-norm surface measure, and the classical
//! p-normal normalisation samplers. Both agree on volumes for every p; on the
//! surface they agree only when the q-length element is a constant multiple
//! of the area parameter (p ∈ {1, 2, ∞} for q = p).

pub mod cli;
pub mod error;
pub mod exponent;
pub mod geometry;
pub mod pnormal;
pub mod rng;
pub mod samplers;
pub mod squigonometry;
pub mod verify;

pub use error::{Error, Result};
pub use exponent::Exponent;
pub use geometry::{CdfTable, GeometryReport, Measure, RelDiffCurve};
pub use pnormal::PNormal;
pub use samplers::{
    pnormal_sample, squig_sample, Algorithm, Mode, SampleBatch, SquigSampler, SurfaceStrategy,
};
pub use squigonometry::{build_grid, PCircleGrid, DEFAULT_PRECISION};
pub use verify::{TestReport, Verdict};
