//! The `multisurf` command line.
//!
//! Exit codes: 0 success, 2 usage, 3 io, 4 numeric failure, 5 data format.
//! No environment variables are read. Every run prints its resolved
//! configuration as one JSON line on stderr.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Args, Parser, Subcommand, ValueEnum};
use multisurf_core::generators::{Sampling, GENERATORS};
use multisurf_core::metrics::{metric_suite, GapWeightedConfig};
use multisurf_core::noise::add_surface_noise;
use multisurf_core::reconstruct::{fit_model, FitOptions};
use multisurf_core::{Method, MethodConfig, Projection, Truncation};
use serde_json::json;

use crate::csv_io::{fmt_f64, load_csv, load_points, save_csv, write_table};
use crate::error::{Error, Result};
use crate::model_file::{load_model, save_model};
use crate::reconstruct_parallel;
use crate::sweep::{self, noise_seed, write_sweep_csv, NoiseTarget, SweepMeta, SweepSpec};

#[derive(Debug, Parser)]
#[command(name = "multisurf", version, about = "Reconstruct intersecting surfaces from value-sorted samples")]
pub struct Cli {
    /// Seed for sampling and noise [default: 0]
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Output path
    #[arg(short, long, global = true)]
    pub output: Option<PathBuf>,
    /// More log output (repeatable)
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    pub verbose: u8,
    /// Errors only
    #[arg(short, long, global = true)]
    pub quiet: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Sample a built-in problem into a dataset CSV
    Gen(GenArgs),
    /// Fit a model to a dataset CSV
    Fit(FitArgs),
    /// Reconstruct surface values from a model
    Eval(EvalArgs),
    /// Run a method/degree/noise sweep
    Sweep(SweepArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    Frobenius,
    Schmeisser,
    Colleague,
    Direct,
}

impl MethodArg {
    fn method(self) -> Method {
        match self {
            MethodArg::Frobenius => Method::Frobenius,
            MethodArg::Schmeisser => Method::Schmeisser,
            MethodArg::Colleague => Method::Colleague,
            MethodArg::Direct => Method::Direct,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ProjectionArg {
    Real,
    Magnitude,
    Reject,
}

impl ProjectionArg {
    fn projection(self) -> Projection {
        match self {
            ProjectionArg::Real => Projection::RealPart,
            ProjectionArg::Magnitude => Projection::SignedMagnitude,
            ProjectionArg::Reject => Projection::Reject,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TargetArg {
    Invariants,
    Surface,
}

/// `--clamp` / `--no-clamp`, last one wins.
#[derive(Debug, Args)]
pub struct ClampArgs {
    /// Clamp slightly negative Schmeisser off-diagonal squares to zero
    #[arg(long, overrides_with = "no_clamp")]
    pub clamp: bool,
    /// Fail on negative Schmeisser off-diagonal squares instead
    #[arg(long, overrides_with = "clamp")]
    pub no_clamp: bool,
}

impl ClampArgs {
    fn resolve(&self) -> Option<bool> {
        match (self.clamp, self.no_clamp) {
            (true, _) => Some(true),
            (_, true) => Some(false),
            _ => None,
        }
    }
}

/// Per-axis point counts, written `150x150` (or `2000` in 1D).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Grid(pub Vec<usize>);

fn parse_grid(s: &str) -> std::result::Result<Grid, String> {
    let counts = s.split('x').map(|t| t.trim().parse::<usize>().map_err(|_| format!("bad grid `{s}`, expected e.g. 150x150")));
    counts.collect::<std::result::Result<_, _>>().map(Grid)
}

#[derive(Debug, Args)]
pub struct GenArgs {
    /// Generator name
    pub generator: String,
    /// Number of uniformly random points [default: 1000]
    #[arg(long, conflicts_with = "grid")]
    pub points: Option<usize>,
    /// Tensor grid, e.g. 150x150
    #[arg(long, value_parser = parse_grid)]
    pub grid: Option<Grid>,
    /// Uniform noise added to the surface values
    #[arg(long, default_value_t = 0.0)]
    pub noise: f64,
}

#[derive(Debug, Args)]
pub struct FitArgs {
    /// Dataset CSV
    pub data: PathBuf,
    #[arg(long, value_enum, default_value = "colleague")]
    pub method: MethodArg,
    /// Total degree (or per-axis degree with --tensor)
    #[arg(long)]
    pub degree: usize,
    /// Tensor-product truncation instead of total degree
    #[arg(long)]
    pub tensor: bool,
    #[arg(long, value_enum, default_value = "real")]
    pub projection: ProjectionArg,
    #[command(flatten)]
    pub clamp: ClampArgs,
    /// Uniform noise added before fitting
    #[arg(long, default_value_t = 0.0)]
    pub noise: f64,
    #[arg(long, value_enum, default_value = "invariants")]
    pub noise_target: TargetArg,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    /// Model file
    pub model: PathBuf,
    /// CSV whose x columns are the evaluation points
    #[arg(long, conflicts_with_all = ["truth", "grid", "points"])]
    pub at: Option<PathBuf>,
    /// Dataset CSV with true values; its points are evaluated and metrics printed
    #[arg(long, conflicts_with_all = ["grid", "points"])]
    pub truth: Option<PathBuf>,
    /// Tensor grid over the model domain, e.g. 100x100
    #[arg(long, value_parser = parse_grid, conflicts_with = "points")]
    pub grid: Option<Grid>,
    /// Uniformly random points in the model domain
    #[arg(long)]
    pub points: Option<usize>,
    /// Regularizer of the gap-weighted error
    #[arg(long, default_value_t = 0.05)]
    pub eps_w: f64,
    /// Override the projection stored in the model
    #[arg(long, value_enum)]
    pub projection: Option<ProjectionArg>,
    #[command(flatten)]
    pub clamp: ClampArgs,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    /// JSON spec file; keys mirror these flags, flags take precedence
    #[arg(long)]
    pub spec: Option<PathBuf>,
    #[arg(long, conflicts_with = "data")]
    pub generator: Option<String>,
    /// Dataset CSV; evaluation happens on its points
    #[arg(long)]
    pub data: Option<PathBuf>,
    /// Methods, comma separated
    #[arg(long, value_enum, value_delimiter = ',')]
    pub method: Vec<MethodArg>,
    #[arg(long, conflicts_with = "degrees")]
    pub degree: Option<usize>,
    #[arg(long, value_delimiter = ',')]
    pub degrees: Vec<usize>,
    #[arg(long, conflicts_with = "noises")]
    pub noise: Option<f64>,
    #[arg(long, value_delimiter = ',')]
    pub noises: Vec<f64>,
    #[arg(long, value_enum)]
    pub noise_target: Option<TargetArg>,
    /// Random training points
    #[arg(long, conflicts_with = "grid")]
    pub points: Option<usize>,
    /// Training grid, e.g. 150x150
    #[arg(long, value_parser = parse_grid)]
    pub grid: Option<Grid>,
    /// Held-out evaluation grid
    #[arg(long, value_parser = parse_grid)]
    pub eval_grid: Option<Grid>,
    /// Evaluate on the training points instead of a held-out grid
    #[arg(long)]
    pub eval_on_training: bool,
    #[arg(long)]
    pub tensor: bool,
    /// Noise draws per row
    #[arg(long)]
    pub repeats: Option<usize>,
    #[arg(long, value_enum)]
    pub projection: Option<ProjectionArg>,
    #[command(flatten)]
    pub clamp: ClampArgs,
    #[arg(long)]
    pub eps_w: Option<f64>,
}

fn require_output(cli: &Cli) -> Result<&Path> {
    cli.output.as_deref().ok_or_else(|| Error::Usage("-o/--output is required".into()))
}

/// `path` with `.json` appended, e.g. `toy.csv.json`.
pub fn sidecar(path: &Path) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(".json");
    PathBuf::from(s)
}

fn print_config(command: &str, config: serde_json::Value) {
    eprintln!("{}", json!({ "command": command, "config": config }));
}

fn write_json(path: &Path, v: &serde_json::Value) -> Result<()> {
    let mut text = serde_json::to_string_pretty(v).expect("serializable");
    text.push('\n');
    fs::write(path, text).map_err(Error::io(path))
}

pub fn run(cli: &Cli) -> Result<()> {
    match &cli.command {
        Command::Gen(a) => gen(cli, a),
        Command::Fit(a) => fit(cli, a),
        Command::Eval(a) => eval(cli, a),
        Command::Sweep(a) => sweep(cli, a),
    }
}

fn gen(cli: &Cli, a: &GenArgs) -> Result<()> {
    let out = require_output(cli)?;
    let seed = cli.seed.unwrap_or(0);
    if !GENERATORS.iter().any(|(n, _)| *n == a.generator) {
        return Err(Error::UnknownGenerator(a.generator.clone()));
    }
    let sampling = match &a.grid {
        Some(g) => Sampling::Grid(g.0.clone()),
        None => Sampling::Random { count: a.points.unwrap_or(1000), seed },
    };
    let sampling_json = match &sampling {
        Sampling::Grid(g) => json!({ "kind": "grid", "grid": g }),
        Sampling::Random { count, .. } => json!({ "kind": "uniform", "rng": "ChaCha8", "points": count }),
    };
    let config = json!({
        "generator": a.generator, "sampling": sampling_json, "seed": seed,
        "noise": a.noise, "noise_seed": noise_seed(seed, 0), "output": out,
    });
    print_config("gen", config.clone());
    let mut ds = sweep::generate(&a.generator, &sampling)?;
    if a.noise != 0.0 {
        ds = add_surface_noise(&ds, a.noise, noise_seed(seed, 0)).map_err(|e| Error::Usage(e.to_string()))?;
    }
    ds.provenance.notes = sampling_json.to_string();
    save_csv(out, &ds)?;
    let dom = ds.domain();
    let meta = json!({
        "config": config,
        "rows": ds.len(),
        "dims": ds.dims(),
        "surfaces": ds.surfaces(),
        "domain": dom.lo().iter().zip(dom.hi()).map(|(l, h)| [*l, *h]).collect::<Vec<_>>(),
        "library_version": env!("CARGO_PKG_VERSION"),
    });
    write_json(&sidecar(out), &meta)?;
    log::info!("wrote {} rows to {}", ds.len(), out.display());
    Ok(())
}

fn fit(cli: &Cli, a: &FitArgs) -> Result<()> {
    let out = require_output(cli)?;
    let seed = cli.seed.unwrap_or(0);
    let mut config = MethodConfig::new(a.method.method());
    config.projection = a.projection.projection();
    config.schmeisser.clamp_negative_offdiag = a.clamp.resolve().unwrap_or(true);
    let target = match a.noise_target {
        TargetArg::Invariants => NoiseTarget::Invariants,
        TargetArg::Surface => NoiseTarget::Surface,
    };
    print_config(
        "fit",
        json!({
            "data": a.data, "method": config.method.name(), "degree": a.degree, "tensor": a.tensor,
            "projection": config.projection.name(), "clamp": config.schmeisser.clamp_negative_offdiag,
            "noise": a.noise, "noise_target": target, "noise_seed": noise_seed(seed, 0), "seed": seed, "output": out,
        }),
    );
    if !(a.noise >= 0.0 && a.noise.is_finite()) {
        return Err(Error::Usage(format!("noise {} must be finite and >= 0", a.noise)));
    }
    let mut ds = load_csv(&a.data)?;
    let mut options = FitOptions::default();
    if a.noise > 0.0 {
        match target {
            NoiseTarget::Invariants => options.invariant_noise = Some((a.noise, noise_seed(seed, 0))),
            NoiseTarget::Surface => ds = add_surface_noise(&ds, a.noise, noise_seed(seed, 0))?,
        }
    }
    let trunc = if a.tensor { Truncation::Tensor(vec![a.degree; ds.dims()]) } else { Truncation::TotalDegree(a.degree) };
    let (model, report) = fit_model(&ds, &config, &trunc, &options)?;
    if report.undersampled {
        log::warn!("{} points for {} basis functions", report.points, report.basis);
    }
    save_model(out, &model)?;
    println!("points={} basis={} undersampled={}", report.points, report.basis, report.undersampled);
    println!("residual={}", fmt_f64(report.max_rms_residual()));
    Ok(())
}

fn eval(cli: &Cli, a: &EvalArgs) -> Result<()> {
    let seed = cli.seed.unwrap_or(0);
    let mut model = load_model(&a.model)?;
    let mut config = *model.config();
    if let Some(p) = a.projection {
        config.projection = p.projection();
    }
    if let Some(c) = a.clamp.resolve() {
        config.schmeisser.clamp_negative_offdiag = c;
    }
    model.set_config(config)?;
    if !(a.eps_w > 0.0) {
        return Err(Error::Usage("eps-w must be > 0".into()));
    }
    print_config(
        "eval",
        json!({
            "model": a.model, "method": config.method.name(), "projection": config.projection.name(),
            "clamp": config.schmeisser.clamp_negative_offdiag, "at": a.at, "truth": a.truth, "grid": a.grid.as_ref().map(|g| &g.0),
            "points": a.points, "seed": seed, "eps_w": a.eps_w, "output": cli.output,
        }),
    );
    let d = model.dims();
    let m = model.surfaces();
    let truth = a.truth.as_deref().map(load_csv).transpose()?;
    let points = match (&a.at, &truth, &a.grid, a.points) {
        (Some(p), ..) => load_points(p, d)?,
        (_, Some(t), ..) => {
            if t.dims() != d {
                return Err(Error::DimensionMismatch { expected: d, found: t.dims() });
            }
            if t.surfaces() != m {
                return Err(Error::DimensionMismatch { expected: m, found: t.surfaces() });
            }
            t.points().to_vec()
        }
        (_, _, Some(g), _) => Sampling::Grid(g.0.clone()).points(model.domain()).map_err(|e| Error::Usage(e.to_string()))?,
        (.., Some(n)) => Sampling::Random { count: n, seed }.points(model.domain())?,
        _ => return Err(Error::Usage("one of --at, --truth, --grid, --points is required".into())),
    };
    let rep = reconstruct_parallel(&model, &points);
    if let Some((i, e)) = rep.failures.first() {
        log::warn!("{} of {} points failed, first at row {}: {e}", rep.failures.len(), rep.len(), i + 1);
        if rep.failures.len() == rep.len() {
            return Err(Error::Numeric(e.clone()));
        }
    }
    let max_imag = rep.max_imag.iter().copied().filter(|v| v.is_finite()).fold(0.0, f64::max);
    log::info!("largest imaginary part before projection: {max_imag:e}");
    let comments = [("model", a.model.display().to_string()), ("method", model.method().name().to_string())];
    match &cli.output {
        Some(path) => {
            let mut buf = Vec::new();
            write_table(&mut buf, d, m, &points, &rep.values, &comments)?;
            fs::write(path, buf).map_err(Error::io(path))?;
        }
        None if truth.is_none() => write_table(std::io::stdout().lock(), d, m, &points, &rep.values, &comments)?,
        None => {}
    }
    if let Some(t) = truth {
        let r = metric_suite(t.values(), &rep.values, m, &GapWeightedConfig { eps_w: a.eps_w })?;
        println!("points={}", r.points);
        println!("failed={}", r.failed);
        println!("max_abs={}", fmt_f64(r.max_abs));
        println!("mae={}", fmt_f64(r.mae));
        println!("rmse={}", fmt_f64(r.rmse));
        println!("gap_weighted={}", fmt_f64(r.gap_weighted));
    }
    Ok(())
}

/// Spec file (if any) overlaid with the flags that were given.
pub fn resolve_sweep_spec(cli: &Cli, a: &SweepArgs) -> Result<SweepSpec> {
    let mut s = match &a.spec {
        Some(p) => {
            let text = fs::read_to_string(p).map_err(Error::io(p))?;
            serde_json::from_str(&text).map_err(|e| Error::Parse { line: e.line() as u64, msg: e.to_string() })?
        }
        None => SweepSpec::default(),
    };
    if a.generator.is_some() || a.data.is_some() {
        s.generator = a.generator.clone();
        s.data = a.data.clone();
    }
    if !a.method.is_empty() {
        s.methods = a.method.iter().map(|m| m.method().name().to_string()).collect();
    }
    if let Some(d) = a.degree {
        s.degrees = vec![d];
    } else if !a.degrees.is_empty() {
        s.degrees = a.degrees.clone();
    }
    if let Some(e) = a.noise {
        s.noises = vec![e];
    } else if !a.noises.is_empty() {
        s.noises = a.noises.clone();
    }
    if let Some(t) = a.noise_target {
        s.noise_target = match t {
            TargetArg::Invariants => NoiseTarget::Invariants,
            TargetArg::Surface => NoiseTarget::Surface,
        };
    }
    if let Some(n) = a.points {
        s.points = n;
        s.grid = None;
    }
    if let Some(g) = &a.grid {
        s.grid = Some(g.0.clone());
    }
    if let Some(g) = &a.eval_grid {
        s.eval_grid = Some(g.0.clone());
    }
    s.eval_on_training |= a.eval_on_training;
    s.tensor |= a.tensor;
    if let Some(r) = a.repeats {
        s.repeats = r;
    }
    if let Some(p) = a.projection {
        s.projection = p.projection().name().to_string();
    }
    if let Some(c) = a.clamp.resolve() {
        s.clamp = c;
    }
    if let Some(e) = a.eps_w {
        s.eps_w = e;
    }
    if let Some(seed) = cli.seed {
        s.seed = seed;
    }
    if (s.generator.is_none() && s.data.is_none()) || s.methods.is_empty() || s.degrees.is_empty() {
        return Err(Error::Usage("sweep needs a generator or data file, at least one method and one degree".into()));
    }
    Ok(s)
}

fn unix_now() -> f64 {
    SystemTime::now().duration_since(UNIX_EPOCH).map_or(0.0, |d| d.as_secs_f64())
}

fn sweep(cli: &Cli, a: &SweepArgs) -> Result<()> {
    let out = require_output(cli)?;
    let spec = resolve_sweep_spec(cli, a)?;
    print_config("sweep", serde_json::to_value(&spec).expect("serializable"));
    let started = unix_now();
    let plan = sweep::plan(&spec)?;
    let rows = sweep::run_plan(&spec, &plan)?;
    let finished = unix_now();
    let mut buf = Vec::new();
    write_sweep_csv(&mut buf, &rows)?;
    fs::write(out, buf).map_err(Error::io(out))?;
    let meta = SweepMeta::new(&spec, &plan, &rows, started, finished);
    write_json(&sidecar(out), &serde_json::to_value(&meta).expect("serializable"))?;
    for r in rows.iter().filter(|r| r.status != "ok") {
        log::warn!("{} degree {} noise {:e}: {}", r.method.name(), r.degree, r.noise, r.status);
    }
    if !rows.is_empty() && rows.iter().all(|r| r.metrics.is_none()) {
        return Err(Error::SweepFailed(rows.len()));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_parsing() {
        assert_eq!(parse_grid("150x150").unwrap(), Grid(vec![150, 150]));
        assert_eq!(parse_grid("2000").unwrap(), Grid(vec![2000]));
        let cli = Cli::try_parse_from(["multisurf", "gen", "graphene", "--grid", "3x4", "-o", "g.csv"]).unwrap();
        let Command::Gen(a) = cli.command else { panic!() };
        assert_eq!(a.grid, Some(Grid(vec![3, 4])));
        assert!(parse_grid("10xa").is_err());
    }

    #[test]
    fn clamp_flags_last_wins() {
        let cli = Cli::try_parse_from(["multisurf", "fit", "d.csv", "--degree", "4", "--no-clamp", "--clamp"]).unwrap();
        let Command::Fit(a) = cli.command else { panic!() };
        assert_eq!(a.clamp.resolve(), Some(true));
        let cli = Cli::try_parse_from(["multisurf", "fit", "d.csv", "--degree", "4", "--clamp", "--no-clamp"]).unwrap();
        let Command::Fit(a) = cli.command else { panic!() };
        assert_eq!(a.clamp.resolve(), Some(false));
    }

    #[test]
    fn sweep_flags_override_spec_defaults() {
        let cli = Cli::try_parse_from([
            "multisurf", "sweep", "--generator", "sinusoid1d", "--method", "colleague,direct", "--degrees", "8,16",
            "--noises", "1e-6,1e-3", "--seed", "9", "--no-clamp", "-o", "s.csv",
        ])
        .unwrap();
        let Command::Sweep(a) = &cli.command else { panic!() };
        let s = resolve_sweep_spec(&cli, a).unwrap();
        assert_eq!(s.methods, vec!["colleague", "direct"]);
        assert_eq!(s.degrees, vec![8, 16]);
        assert_eq!(s.noises, vec![1e-6, 1e-3]);
        assert_eq!(s.seed, 9);
        assert!(!s.clamp);
    }

    #[test]
    fn empty_sweep_is_a_usage_error() {
        let cli = Cli::try_parse_from(["multisurf", "sweep", "-o", "s.csv"]).unwrap();
        let Command::Sweep(a) = &cli.command else { panic!() };
        assert!(matches!(resolve_sweep_spec(&cli, a), Err(Error::Usage(_))));
    }

    #[test]
    fn sidecar_appends_json() {
        assert_eq!(sidecar(Path::new("out/toy.csv")), PathBuf::from("out/toy.csv.json"));
    }
}
