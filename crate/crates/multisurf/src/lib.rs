//! File formats, sweeps and the command line for `multisurf-core`.
//!
//! - [`csv_io`]: dataset CSV files.
//! - [`model_file`]: the binary model format.
//! - [`sweep`]: method/degree/noise sweeps with CSV and JSON output.
//! - [`cli`]: the `multisurf` command.

pub mod cli;
pub mod csv_io;
pub mod error;
pub mod model_file;
pub mod sweep;

pub use error::{Error, Result};

use multisurf_core::{FittedModel, ReconstructionReport};
use rayon::prelude::*;

/// [`FittedModel::reconstruct_grid`] with points spread over the rayon pool.
/// The report is identical to the sequential one.
pub fn reconstruct_parallel(model: &FittedModel, points: &[f64]) -> ReconstructionReport {
    let d = model.dims();
    let results: Vec<_> = points.par_chunks_exact(d).map(|p| model.reconstruct_point(p)).collect();
    ReconstructionReport::from_results(model.surfaces(), results)
}
