//! Parameter sweeps over methods, degrees and noise levels.
//!
//! A sweep fits one model per row and reports its error metrics. Rows are
//! ordered by method, then degree, then noise, then repeat, whatever order
//! the parallel workers finish in.

use std::io::Write;
use std::path::PathBuf;

use multisurf_core::generators::{by_name, Sampling};
use multisurf_core::metrics::{metric_suite, GapWeightedConfig, Metrics};
use multisurf_core::noise::add_surface_noise;
use multisurf_core::reconstruct::{fit_model, FitOptions};
use multisurf_core::{Method, MethodConfig, MultiSurfaceDataset, Projection, Truncation};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::csv_io::{fmt_f64, load_csv};
use crate::error::{Error, Result};
use crate::reconstruct_parallel;

/// Where sweep noise is injected.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum NoiseTarget {
    /// Per-point invariants in transformed units, before fitting.
    #[default]
    Invariants,
    /// Raw surface values, re-sorted before fitting.
    Surface,
}

/// Everything a sweep needs. Field names double as the keys of a JSON spec
/// file and mirror the command-line flags.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepSpec {
    /// Generator name; exclusive with `data`.
    pub generator: Option<String>,
    /// Dataset CSV; evaluation then happens on its own points.
    pub data: Option<PathBuf>,
    pub methods: Vec<String>,
    pub degrees: Vec<usize>,
    /// Noise scales; empty means a single noiseless row.
    pub noises: Vec<f64>,
    pub noise_target: NoiseTarget,
    /// Random training points drawn for a generator.
    pub points: usize,
    /// Training grid instead of random points.
    pub grid: Option<Vec<usize>>,
    /// Held-out evaluation grid; defaults by dimension.
    pub eval_grid: Option<Vec<usize>>,
    /// Evaluate on the training points instead of a held-out grid.
    pub eval_on_training: bool,
    /// Tensor truncation with the degree on every axis instead of total degree.
    pub tensor: bool,
    /// Independent noise draws per (method, degree, noise).
    pub repeats: usize,
    pub seed: u64,
    pub projection: String,
    pub clamp: bool,
    pub eps_w: f64,
}

impl Default for SweepSpec {
    fn default() -> Self {
        SweepSpec {
            generator: None,
            data: None,
            methods: Vec::new(),
            degrees: Vec::new(),
            noises: Vec::new(),
            noise_target: NoiseTarget::default(),
            points: 1000,
            grid: None,
            eval_grid: None,
            eval_on_training: false,
            tensor: false,
            repeats: 1,
            seed: 0,
            projection: Projection::default().name().to_string(),
            clamp: true,
            eps_w: GapWeightedConfig::default().eps_w,
        }
    }
}

/// Default held-out grid: about 2000 points in 1D, 10^4 in 2D.
pub fn default_eval_grid(d: usize) -> Vec<usize> {
    match d {
        1 => vec![2000],
        2 => vec![100, 100],
        3 => vec![20, 20, 20],
        _ => vec![6; d],
    }
}

/// Seed of the noise draw for `repeat`; the training sample uses `seed`.
pub fn noise_seed(seed: u64, repeat: usize) -> u64 {
    seed.wrapping_add(1 + repeat as u64)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub method: Method,
    pub degree: usize,
    pub noise: f64,
    pub repeat: usize,
    /// `None` when the fit or every point failed.
    pub metrics: Option<Metrics>,
    /// `ok`, `partial: k of n points failed`, or `failed: reason`.
    pub status: String,
}

struct Job {
    method: Method,
    degree: usize,
    noise: f64,
    repeat: usize,
}

/// Validated sweep inputs shared by all rows.
pub struct Plan {
    pub methods: Vec<Method>,
    pub config: MethodConfig,
    pub train: MultiSurfaceDataset,
    pub eval_points: Vec<f64>,
    pub eval_truth: Vec<f64>,
}

pub fn plan(spec: &SweepSpec) -> Result<Plan> {
    let methods = spec
        .methods
        .iter()
        .map(|s| Method::from_name(s).ok_or_else(|| Error::Usage(format!("unknown method `{s}`"))))
        .collect::<Result<Vec<_>>>()?;
    let projection = Projection::from_name(&spec.projection).ok_or_else(|| Error::Usage(format!("unknown projection `{}`", spec.projection)))?;
    if spec.degrees.is_empty() {
        return Err(Error::Usage("at least one degree is required".into()));
    }
    if spec.repeats == 0 {
        return Err(Error::Usage("repeats must be >= 1".into()));
    }
    if !(spec.eps_w > 0.0) {
        return Err(Error::Usage("eps-w must be > 0".into()));
    }
    if let Some(e) = spec.noises.iter().find(|e| !(**e >= 0.0 && e.is_finite())) {
        return Err(Error::Usage(format!("noise {e} must be finite and >= 0")));
    }
    let mut config = MethodConfig::new(Method::Colleague);
    config.projection = projection;
    config.schmeisser.clamp_negative_offdiag = spec.clamp;

    let (train, eval_points, eval_truth) = match (&spec.generator, &spec.data) {
        (Some(name), None) => {
            let sampling = match &spec.grid {
                Some(g) => Sampling::Grid(g.clone()),
                None => Sampling::Random { count: spec.points, seed: spec.seed },
            };
            let train = generate(name, &sampling)?;
            if spec.eval_on_training {
                (train.clone(), train.points().to_vec(), train.values().to_vec())
            } else {
                let grid = spec.eval_grid.clone().unwrap_or_else(|| default_eval_grid(train.dims()));
                let truth = generate(name, &Sampling::Grid(grid))?;
                let (p, v) = (truth.points().to_vec(), truth.values().to_vec());
                (train, p, v)
            }
        }
        (None, Some(path)) => {
            let train = load_csv(path)?;
            let (p, v) = (train.points().to_vec(), train.values().to_vec());
            (train, p, v)
        }
        _ => return Err(Error::Usage("exactly one of generator and data is required".into())),
    };
    Ok(Plan { methods, config, train, eval_points, eval_truth })
}

pub(crate) fn generate(name: &str, sampling: &Sampling) -> Result<MultiSurfaceDataset> {
    match by_name(name, sampling) {
        None => Err(Error::UnknownGenerator(name.to_string())),
        Some(r) => r.map_err(|e| match e {
            multisurf_core::Error::DimensionMismatch { expected, found } => {
                Error::Usage(format!("generator `{name}` needs a {expected}-dimensional grid, got {found}"))
            }
            e => Error::Numeric(e),
        }),
    }
}

fn run_row(spec: &SweepSpec, plan: &Plan, job: &Job) -> SweepRow {
    let mut row = SweepRow { method: job.method, degree: job.degree, noise: job.noise, repeat: job.repeat, metrics: None, status: String::new() };
    let d = plan.train.dims();
    let m = plan.train.surfaces();
    let trunc = if spec.tensor { Truncation::Tensor(vec![job.degree; d]) } else { Truncation::TotalDegree(job.degree) };
    let seed = noise_seed(spec.seed, job.repeat);
    let mut options = FitOptions::default();
    let noisy;
    let train = match spec.noise_target {
        _ if job.noise == 0.0 => &plan.train,
        NoiseTarget::Invariants => {
            options.invariant_noise = Some((job.noise, seed));
            &plan.train
        }
        NoiseTarget::Surface => match add_surface_noise(&plan.train, job.noise, seed) {
            Ok(ds) => {
                noisy = ds;
                &noisy
            }
            Err(e) => {
                row.status = format!("failed: {e}");
                return row;
            }
        },
    };
    let config = MethodConfig { method: job.method, ..plan.config };
    let (model, report) = match fit_model(train, &config, &trunc, &options) {
        Ok(r) => r,
        Err(e) => {
            row.status = format!("failed: {e}");
            return row;
        }
    };
    if report.undersampled {
        log::warn!("{} degree {}: {} points for {} basis functions", job.method.name(), job.degree, report.points, report.basis);
    }
    let rec = reconstruct_parallel(&model, &plan.eval_points);
    let n = rec.len();
    let failed = rec.failures.len();
    if failed == n && n > 0 {
        row.status = format!("failed: {}", rec.failures[0].1);
        return row;
    }
    match metric_suite(&plan.eval_truth, &rec.values, m, &GapWeightedConfig { eps_w: spec.eps_w }) {
        Ok(metrics) => {
            row.metrics = Some(metrics);
            row.status = if failed == 0 { "ok".into() } else { format!("partial: {failed} of {n} points failed") };
        }
        Err(e) => row.status = format!("failed: {e}"),
    }
    row
}

/// Runs every row of the sweep. Failing rows are marked, not fatal.
pub fn run_sweep(spec: &SweepSpec) -> Result<Vec<SweepRow>> {
    let plan = plan(spec)?;
    run_plan(spec, &plan)
}

pub fn run_plan(spec: &SweepSpec, plan: &Plan) -> Result<Vec<SweepRow>> {
    let noises = if spec.noises.is_empty() { vec![0.0] } else { spec.noises.clone() };
    let mut jobs = Vec::new();
    for &method in &plan.methods {
        for &degree in &spec.degrees {
            for &noise in &noises {
                for repeat in 0..spec.repeats {
                    jobs.push(Job { method, degree, noise, repeat });
                }
            }
        }
    }
    Ok(jobs.par_iter().map(|j| run_row(spec, plan, j)).collect())
}

pub const SWEEP_HEADER: [&str; 8] = ["method", "degree", "noise", "max_abs", "mae", "rmse", "gap_weighted", "status"];

pub fn write_sweep_csv<W: Write>(w: W, rows: &[SweepRow]) -> Result<()> {
    let to_err = |e: csv::Error| Error::Io { path: "<sweep>".into(), source: e.into() };
    let mut wtr = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(w);
    wtr.write_record(SWEEP_HEADER).map_err(to_err)?;
    for r in rows {
        let m = r.metrics.map_or([f64::NAN; 4], |m| [m.max_abs, m.mae, m.rmse, m.gap_weighted]);
        let mut rec = vec![r.method.name().to_string(), r.degree.to_string(), fmt_f64(r.noise)];
        rec.extend(m.iter().map(|&v| fmt_f64(v)));
        rec.push(r.status.clone());
        wtr.write_record(&rec).map_err(to_err)?;
    }
    wtr.flush().map_err(crate::error::Error::io("<sweep>"))
}

/// Metadata written next to the sweep CSV.
#[derive(Debug, Serialize)]
pub struct SweepMeta<'a> {
    pub spec: &'a SweepSpec,
    pub seed: u64,
    pub noise_seeds: Vec<u64>,
    pub row_order: &'static str,
    pub rows: usize,
    pub failed_rows: usize,
    pub train_points: usize,
    pub eval_points: usize,
    pub library_version: &'static str,
    pub started_unix: f64,
    pub finished_unix: f64,
}

impl<'a> SweepMeta<'a> {
    pub fn new(spec: &'a SweepSpec, plan: &Plan, rows: &[SweepRow], started_unix: f64, finished_unix: f64) -> Self {
        SweepMeta {
            spec,
            seed: spec.seed,
            noise_seeds: (0..spec.repeats).map(|r| noise_seed(spec.seed, r)).collect(),
            row_order: "method, degree, noise, repeat",
            rows: rows.len(),
            failed_rows: rows.iter().filter(|r| r.metrics.is_none()).count(),
            train_points: plan.train.len(),
            eval_points: plan.eval_points.len() / plan.train.dims(),
            library_version: env!("CARGO_PKG_VERSION"),
            started_unix,
            finished_unix,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec() -> SweepSpec {
        SweepSpec {
            generator: Some("sinusoid1d".into()),
            methods: vec!["colleague".into(), "direct".into()],
            degrees: vec![8, 16],
            points: 200,
            eval_grid: Some(vec![101]),
            seed: 3,
            ..SweepSpec::default()
        }
    }

    #[test]
    fn rows_follow_spec_order() {
        let mut s = spec();
        s.noises = vec![0.0, 1e-3];
        let rows = run_sweep(&s).unwrap();
        let keys: Vec<(Method, usize, f64)> = rows.iter().map(|r| (r.method, r.degree, r.noise)).collect();
        assert_eq!(
            keys,
            vec![
                (Method::Colleague, 8, 0.0),
                (Method::Colleague, 8, 1e-3),
                (Method::Colleague, 16, 0.0),
                (Method::Colleague, 16, 1e-3),
                (Method::Direct, 8, 0.0),
                (Method::Direct, 8, 1e-3),
                (Method::Direct, 16, 0.0),
                (Method::Direct, 16, 1e-3),
            ]
        );
        assert!(rows.iter().all(|r| r.status == "ok"));
    }

    #[test]
    fn empty_method_list_gives_empty_table() {
        let mut s = spec();
        s.methods.clear();
        assert!(run_sweep(&s).unwrap().is_empty());
    }

    #[test]
    fn failing_rows_are_marked() {
        let mut s = spec();
        s.degrees = vec![8, 500];
        let rows = run_sweep(&s).unwrap();
        assert_eq!(rows[0].status, "ok");
        assert!(rows[1].status.starts_with("failed:"), "{}", rows[1].status);
        assert!(rows[1].metrics.is_none());
        let mut out = Vec::new();
        write_sweep_csv(&mut out, &rows).unwrap();
        let text = String::from_utf8(out).unwrap();
        assert!(text.starts_with("method,degree,noise,max_abs,mae,rmse,gap_weighted,status\n"));
        assert_eq!(text.lines().count(), 1 + rows.len());
    }

    #[test]
    fn bad_spec_is_a_usage_error() {
        let mut s = spec();
        s.methods = vec!["nosuch".into()];
        assert!(matches!(run_sweep(&s), Err(Error::Usage(_))));
        let mut s = spec();
        s.degrees.clear();
        assert!(matches!(run_sweep(&s), Err(Error::Usage(_))));
        let mut s = spec();
        s.generator = None;
        assert!(matches!(run_sweep(&s), Err(Error::Usage(_))));
        let mut s = spec();
        s.generator = Some("nosuch".into());
        assert!(matches!(run_sweep(&s), Err(Error::UnknownGenerator(_))));
    }

    #[test]
    fn spec_file_keys_roundtrip() {
        let s = spec();
        let json = serde_json::to_string(&s).unwrap();
        assert_eq!(serde_json::from_str::<SweepSpec>(&json).unwrap(), s);
        assert!(serde_json::from_str::<SweepSpec>(r#"{"bogus": 1}"#).is_err());
        let partial: SweepSpec = serde_json::from_str(r#"{"generator": "stacked", "degrees": [4]}"#).unwrap();
        assert_eq!(partial.points, 1000);
    }
}
