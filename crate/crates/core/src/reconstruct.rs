//! Fitting invariant surrogates to a dataset and recovering sorted surface
//! values pointwise as eigenvalues of a companion matrix.

use alloc::vec;
use alloc::vec::Vec;

use crate::chebfit::{fit_lsq_multi, ChebSeries, DomainBox, FitReport, Truncation};
use crate::companions::{build_colleague, build_frobenius, build_schmeisser, SchmeisserOptions};
use crate::dataset::MultiSurfaceDataset;
use crate::error::{Error, Result};
use crate::invariants::{esp_sorted, fit_value_transform, monic_from_esp, EspVector, ValueTransform, DEFAULT_MARGIN};
use crate::noise::perturb;
use crate::poly::{gamma_table, ChebyshevPoly};
use crate::spectra::{eig_hessenberg, eig_sym_tridiag};
use crate::Complex64;

/// Reconstruction route.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    /// ESP surrogates, Frobenius companion, general eigensolver.
    Frobenius,
    /// ESP surrogates, symmetric tridiagonal companion.
    Schmeisser,
    /// Monic Chebyshev coefficient surrogates, colleague matrix.
    Colleague,
    /// Baseline: each sorted entry fitted on its own.
    Direct,
}

impl Method {
    pub const ALL: [Method; 4] = [Method::Frobenius, Method::Schmeisser, Method::Colleague, Method::Direct];

    pub fn name(self) -> &'static str {
        match self {
            Method::Frobenius => "frobenius",
            Method::Schmeisser => "schmeisser",
            Method::Colleague => "colleague",
            Method::Direct => "direct",
        }
    }

    pub fn from_name(s: &str) -> Option<Method> {
        Method::ALL.into_iter().find(|m| m.name() == s)
    }
}

/// How complex eigenvalues of a non-symmetric companion become real values.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum Projection {
    /// `Re λ`; the midpoint of a conjugate pair.
    #[default]
    RealPart,
    /// `sign(Re λ) |λ|`.
    SignedMagnitude,
    /// Fail when `|Im λ|` exceeds the rejection tolerance.
    Reject,
}

impl Projection {
    pub fn name(self) -> &'static str {
        match self {
            Projection::RealPart => "real",
            Projection::SignedMagnitude => "magnitude",
            Projection::Reject => "reject",
        }
    }

    pub fn from_name(s: &str) -> Option<Projection> {
        [Projection::RealPart, Projection::SignedMagnitude, Projection::Reject]
            .into_iter()
            .find(|p| p.name() == s)
    }
}

/// Everything that selects and tunes a reconstruction route.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MethodConfig {
    pub method: Method,
    pub projection: Projection,
    pub schmeisser: SchmeisserOptions,
    /// `|Im λ|` above this fails under [`Projection::Reject`].
    pub reject_tolerance: f64,
}

impl MethodConfig {
    pub fn new(method: Method) -> Self {
        MethodConfig {
            method,
            projection: Projection::default(),
            schmeisser: SchmeisserOptions::default(),
            reject_tolerance: 1e-8,
        }
    }
}

/// Options used only while fitting.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitOptions {
    /// Margin of the value transform, see [`fit_value_transform`].
    pub margin: f64,
    /// Uniform noise `(eps, seed)` added to the per-point invariants (in
    /// transformed units) before fitting.
    pub invariant_noise: Option<(f64, u64)>,
}

impl Default for FitOptions {
    fn default() -> Self {
        FitOptions { margin: DEFAULT_MARGIN, invariant_noise: None }
    }
}

/// Affine map from ESPs to the non-leading coefficients of the monic
/// Chebyshev form of `∏ (y - v_i)`: `b = offset + matrix · s`.
#[derive(Debug, Clone, PartialEq)]
pub struct ColleagueMap {
    m: usize,
    offset: Vec<f64>,
    /// Row-major `m × m`; row `k` gives `b_k`, column `j` multiplies `s_{j+1}`.
    matrix: Vec<f64>,
}

impl ColleagueMap {
    pub fn m(&self) -> usize {
        self.m
    }

    pub fn offset(&self) -> &[f64] {
        &self.offset
    }

    /// Coefficient of `s_j` (1-based) in `b_k`.
    pub fn coefficient(&self, k: usize, j: usize) -> f64 {
        self.matrix[k * self.m + (j - 1)]
    }

    pub fn apply(&self, s: &[f64]) -> Vec<f64> {
        (0..self.m)
            .map(|k| {
                let row = &self.matrix[k * self.m..(k + 1) * self.m];
                self.offset[k] + row.iter().zip(s).map(|(a, b)| a * b).sum::<f64>()
            })
            .collect()
    }
}

/// Precomputes the ESP to monic-Chebyshev map for `m` surfaces.
///
/// With `a_{m-j} = (-1)^j s_j` and `x^i = Σ_k γ_{i,k} T_k`, the Chebyshev
/// coefficients are `c_k = γ_{m,k} + Σ_j (-1)^j s_j γ_{m-j,k}`, and
/// normalizing by `c_m = γ_{m,m}` (a power of two) keeps every entry exact.
pub fn symbolic_b_from_esp(m: usize) -> Result<ColleagueMap> {
    if m == 0 {
        return Err(Error::InvalidParameter("surface count must be >= 1"));
    }
    let g = gamma_table(m);
    let gam = |j: usize, k: usize| if k <= j { g[j][k] } else { 0.0 };
    let lead = gam(m, m);
    let offset = (0..m).map(|k| gam(m, k) / lead).collect();
    let mut matrix = vec![0.0; m * m];
    for k in 0..m {
        for j in 1..=m {
            let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
            matrix[k * m + (j - 1)] = sign * gam(m - j, k) / lead;
        }
    }
    Ok(ColleagueMap { m, offset, matrix })
}

/// A frozen set of surrogates plus what is needed to reconstruct from them.
#[derive(Debug, Clone, PartialEq)]
pub struct FittedModel {
    config: MethodConfig,
    m: usize,
    transform: ValueTransform,
    surrogates: Vec<ChebSeries>,
}

impl FittedModel {
    /// Assembles a model from stored parts; every surrogate must share one
    /// domain and truncation.
    pub fn from_parts(config: MethodConfig, transform: ValueTransform, surrogates: Vec<ChebSeries>) -> Result<Self> {
        let first = surrogates.first().ok_or(Error::EmptyInput)?;
        if surrogates.iter().any(|s| s.domain() != first.domain() || s.truncation() != first.truncation()) {
            return Err(Error::ShapeMismatch);
        }
        if !(transform.scale > 0.0) || !transform.shift.is_finite() {
            return Err(Error::InvalidParameter("value transform needs a positive scale"));
        }
        Ok(FittedModel { config, m: surrogates.len(), transform, surrogates })
    }

    pub fn config(&self) -> &MethodConfig {
        &self.config
    }

    /// Replaces reconstruction-time options. The method cannot change since
    /// the surrogates depend on it.
    pub fn set_config(&mut self, config: MethodConfig) -> Result<()> {
        if config.method != self.config.method {
            return Err(Error::InvalidParameter("method is fixed at fit time"));
        }
        self.config = config;
        Ok(())
    }

    pub fn method(&self) -> Method {
        self.config.method
    }

    pub fn surfaces(&self) -> usize {
        self.m
    }

    pub fn dims(&self) -> usize {
        self.domain().dims()
    }

    pub fn domain(&self) -> &DomainBox {
        self.surrogates[0].domain()
    }

    pub fn truncation(&self) -> &Truncation {
        self.surrogates[0].truncation()
    }

    pub fn transform(&self) -> ValueTransform {
        self.transform
    }

    /// One series per invariant: `s_1..s_m`, `b_0..b_{m-1}`, or the sorted
    /// entries, depending on the method.
    pub fn surrogates(&self) -> &[ChebSeries] {
        &self.surrogates
    }

    /// Values of the invariant surrogates at `x`.
    pub fn invariants_at(&self, x: &[f64]) -> Result<Vec<f64>> {
        let u = self.domain().map_point(x)?;
        Ok(self.surrogates.iter().map(|s| s.eval_reference(&u)).collect())
    }

    /// Sorted surface values at `x` with diagnostics.
    pub fn reconstruct_point(&self, x: &[f64]) -> Result<PointReconstruction> {
        let inv = self.invariants_at(x)?;
        let mut out = reconstruct_from_invariants(&self.config, &inv)?;
        for v in out.values.iter_mut() {
            *v = self.transform.inverse(*v);
        }
        Ok(out)
    }

    /// Reconstructs at every point of the row-major `points`, recording
    /// failures instead of stopping.
    pub fn reconstruct_grid(&self, points: &[f64]) -> Result<ReconstructionReport> {
        let d = self.dims();
        if points.len() % d != 0 {
            return Err(Error::DimensionMismatch { expected: d, found: points.len() % d });
        }
        Ok(ReconstructionReport::from_results(self.m, points.chunks_exact(d).map(|p| self.reconstruct_point(p))))
    }
}

/// Per-point output of a reconstruction.
#[derive(Debug, Clone, PartialEq)]
pub struct PointReconstruction {
    /// Ascending surface values in data units.
    pub values: Vec<f64>,
    /// Largest `|Im λ|` seen before projection (0 for symmetric routes).
    pub max_imag: f64,
    /// Smallest Schmeisser off-diagonal entry, when that route is used.
    pub min_offdiag: Option<f64>,
}

/// Runs the eigenvalue step on invariant values already evaluated at a
/// point, in transformed units.
pub fn reconstruct_from_invariants(config: &MethodConfig, inv: &[f64]) -> Result<PointReconstruction> {
    let m = inv.len();
    if m == 0 {
        return Err(Error::EmptyInput);
    }
    let mut out = PointReconstruction { values: Vec::new(), max_imag: 0.0, min_offdiag: None };
    match config.method {
        Method::Direct => out.values = inv.to_vec(),
        Method::Schmeisser => {
            let p = monic_from_esp(&EspVector::new(inv.to_vec()));
            let (t, diag) = build_schmeisser(&p, &config.schmeisser)?;
            out.values = eig_sym_tridiag(&t)?;
            out.min_offdiag = Some(diag.min_offdiag);
        }
        Method::Frobenius => {
            let p = monic_from_esp(&EspVector::new(inv.to_vec()));
            let eig = eig_hessenberg(&build_frobenius(&p))?;
            out.values = project(config, &eig, &mut out.max_imag)?;
        }
        Method::Colleague if m == 1 => out.values = vec![-inv[0]],
        Method::Colleague => {
            let eig = eig_hessenberg(&build_colleague(&ChebyshevPoly::monic(inv.to_vec()))?)?;
            out.values = project(config, &eig, &mut out.max_imag)?;
        }
    }
    out.values.sort_by(f64::total_cmp);
    Ok(out)
}

fn project(config: &MethodConfig, eig: &[Complex64], max_imag: &mut f64) -> Result<Vec<f64>> {
    *max_imag = eig.iter().map(|z| z.im.abs()).fold(0.0, f64::max);
    match config.projection {
        Projection::RealPart => Ok(eig.iter().map(|z| z.re).collect()),
        Projection::SignedMagnitude => Ok(eig.iter().map(|z| if z.re < 0.0 { -z.norm() } else { z.norm() }).collect()),
        Projection::Reject if *max_imag > config.reject_tolerance => Err(Error::ComplexRootsRejected { imag: *max_imag }),
        Projection::Reject => Ok(eig.iter().map(|z| z.re).collect()),
    }
}

/// Per-point invariant table, row-major `n × m`, in transformed units.
pub fn invariant_table(ds: &MultiSurfaceDataset, method: Method, transform: &ValueTransform) -> Result<Vec<f64>> {
    let m = ds.surfaces();
    let map = if method == Method::Colleague { Some(symbolic_b_from_esp(m)?) } else { None };
    let mut out = Vec::with_capacity(ds.len() * m);
    let mut u = vec![0.0; m];
    for i in 0..ds.len() {
        for (dst, &v) in u.iter_mut().zip(ds.row(i)) {
            *dst = transform.forward(v);
        }
        // Rows are ascending and the transform is increasing, so `u` is
        // already in canonical order.
        match method {
            Method::Direct => out.extend_from_slice(&u),
            Method::Frobenius | Method::Schmeisser => out.extend(esp_sorted(&u)),
            Method::Colleague => out.extend(map.as_ref().expect("built above").apply(&esp_sorted(&u))),
        }
    }
    Ok(out)
}

/// Fits one surrogate per invariant of `ds` for the configured method.
pub fn fit_model(
    ds: &MultiSurfaceDataset,
    config: &MethodConfig,
    truncation: &Truncation,
    options: &FitOptions,
) -> Result<(FittedModel, FitReport)> {
    if ds.is_empty() {
        return Err(Error::EmptyInput);
    }
    let m = ds.surfaces();
    let transform = fit_value_transform(ds.values(), options.margin)?;
    let mut table = invariant_table(ds, config.method, &transform)?;
    if let Some((eps, seed)) = options.invariant_noise {
        perturb(&mut table, eps, seed)?;
    }
    let n = ds.len();
    let columns: Vec<Vec<f64>> = (0..m).map(|k| (0..n).map(|i| table[i * m + k]).collect()).collect();
    let rhs: Vec<&[f64]> = columns.iter().map(|c| c.as_slice()).collect();
    let (surrogates, report) = fit_lsq_multi(ds.points(), &rhs, truncation, ds.domain())?;
    Ok((FittedModel { config: *config, m, transform, surrogates }, report))
}

/// Reconstructed values over a point set with per-point diagnostics.
#[derive(Debug, Clone, PartialEq)]
pub struct ReconstructionReport {
    m: usize,
    /// Row-major `n × m`; rows of failed points are NaN.
    pub values: Vec<f64>,
    pub max_imag: Vec<f64>,
    /// Smallest Schmeisser off-diagonal per point, NaN for other methods.
    pub min_offdiag: Vec<f64>,
    /// Index and cause of every failed point, ascending by index.
    pub failures: Vec<(usize, Error)>,
}

impl ReconstructionReport {
    /// Collects per-point results in order.
    pub fn from_results<I: IntoIterator<Item = Result<PointReconstruction>>>(m: usize, results: I) -> Self {
        let mut r = ReconstructionReport { m, values: Vec::new(), max_imag: Vec::new(), min_offdiag: Vec::new(), failures: Vec::new() };
        for (i, res) in results.into_iter().enumerate() {
            match res {
                Ok(p) => {
                    r.values.extend_from_slice(&p.values);
                    r.max_imag.push(p.max_imag);
                    r.min_offdiag.push(p.min_offdiag.unwrap_or(f64::NAN));
                }
                Err(e) => {
                    r.values.extend(core::iter::repeat(f64::NAN).take(m));
                    r.max_imag.push(f64::NAN);
                    r.min_offdiag.push(f64::NAN);
                    r.failures.push((i, e));
                }
            }
        }
        r
    }

    pub fn surfaces(&self) -> usize {
        self.m
    }

    pub fn len(&self) -> usize {
        self.max_imag.len()
    }

    pub fn is_empty(&self) -> bool {
        self.max_imag.is_empty()
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.values[i * self.m..(i + 1) * self.m]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::companions::build_colleague;
    use crate::dataset::Provenance;
    use crate::generators::{sinusoid_1d, Sampling};
    use crate::invariants::esp_from_values;
    use crate::math::{cos, sin, sqrt};
    use crate::metrics::{metric_suite, GapWeightedConfig};
    use crate::poly::{monomial_to_chebyshev, normalize_monic_chebyshev};
    use rand::seq::SliceRandom;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn exact_config(method: Method) -> MethodConfig {
        MethodConfig::new(method)
    }

    #[test]
    fn colleague_map_examples() {
        let c = symbolic_b_from_esp(2).unwrap();
        assert_eq!(c.offset(), &[1.0, 0.0]);
        assert_eq!((c.coefficient(0, 1), c.coefficient(0, 2)), (0.0, 2.0));
        assert_eq!((c.coefficient(1, 1), c.coefficient(1, 2)), (-2.0, 0.0));
        let c = symbolic_b_from_esp(1).unwrap();
        assert_eq!((c.offset(), c.coefficient(0, 1)), (&[0.0][..], -1.0));
        assert!(symbolic_b_from_esp(0).is_err());
    }

    #[test]
    fn colleague_map_matches_pointwise_conversion() {
        let mut rng = ChaCha8Rng::seed_from_u64(51);
        for m in 2..=6 {
            let map = symbolic_b_from_esp(m).unwrap();
            for _ in 0..100 {
                let mut roots: Vec<f64> = (0..m).map(|_| rng.gen_range(-1.0..1.0)).collect();
                roots.sort_by(f64::total_cmp);
                let s = esp_from_values(&roots).unwrap();
                let b = map.apply(s.as_slice());
                let p = monic_from_esp(&s);
                let via = normalize_monic_chebyshev(&monomial_to_chebyshev(&p.full_coeffs())).unwrap();
                for (x, y) in b.iter().zip(via.coeffs()) {
                    assert!((x - y).abs() < 1e-13);
                }
                let mut got: Vec<f64> = eig_hessenberg(&build_colleague(&ChebyshevPoly::monic(b)).unwrap())
                    .unwrap()
                    .iter()
                    .map(|z| z.re)
                    .collect();
                got.sort_by(f64::total_cmp);
                for (g, r) in got.iter().zip(&roots) {
                    assert!((g - r).abs() < 1e-10, "m={m}");
                }
            }
        }
    }

    #[test]
    fn point_from_exact_invariants() {
        let values = [0.0, 0.0, 1.0];
        let s = esp_from_values(&values).unwrap();
        for method in [Method::Frobenius, Method::Schmeisser] {
            let r = reconstruct_from_invariants(&exact_config(method), s.as_slice()).unwrap();
            for (a, b) in r.values.iter().zip(values) {
                assert!((a - b).abs() < 1e-7, "{method:?} {:?}", r.values);
            }
        }
        let b = symbolic_b_from_esp(3).unwrap().apply(s.as_slice());
        let r = reconstruct_from_invariants(&exact_config(Method::Colleague), &b).unwrap();
        for (a, v) in r.values.iter().zip(values) {
            assert!((a - v).abs() < 1e-7);
        }
        let r = reconstruct_from_invariants(&exact_config(Method::Direct), &[1.0, 0.0, 0.0]).unwrap();
        assert_eq!(r.values, vec![0.0, 0.0, 1.0]);
    }

    #[test]
    fn perturbed_double_root() {
        // Roots of y^2 + eps are ±i√eps.
        let eps = 1e-12;
        let s = [0.0, eps];
        let r = reconstruct_from_invariants(&exact_config(Method::Frobenius), &s).unwrap();
        assert_eq!(r.values, vec![0.0, 0.0]);
        assert!((r.max_imag - sqrt(eps)).abs() < 1e-12);
        let b = symbolic_b_from_esp(2).unwrap().apply(&s);
        let r = reconstruct_from_invariants(&exact_config(Method::Colleague), &b).unwrap();
        assert!(r.values.iter().all(|v| v.abs() < 1e-15));
        let r = reconstruct_from_invariants(&exact_config(Method::Schmeisser), &s).unwrap();
        assert_eq!(r.values, vec![0.0, 0.0]);
        assert_eq!(r.min_offdiag, Some(0.0));

        let mut cfg = exact_config(Method::Frobenius);
        cfg.projection = Projection::Reject;
        let s = [0.0, 1e-4];
        assert!(matches!(reconstruct_from_invariants(&cfg, &s), Err(Error::ComplexRootsRejected { .. })));
        cfg.projection = Projection::SignedMagnitude;
        let r = reconstruct_from_invariants(&cfg, &s).unwrap();
        assert!((r.values[1] - 1e-2).abs() < 1e-15);
    }

    #[test]
    fn schmeisser_rejects_complex_pair() {
        let r = reconstruct_from_invariants(&exact_config(Method::Schmeisser), &[0.0, 0.5]);
        assert!(matches!(r, Err(Error::NegativeOffdiagonal { .. })));
    }

    #[test]
    fn names_roundtrip() {
        for m in Method::ALL {
            assert_eq!(Method::from_name(m.name()), Some(m));
        }
        for p in [Projection::RealPart, Projection::SignedMagnitude, Projection::Reject] {
            assert_eq!(Projection::from_name(p.name()), Some(p));
        }
        assert_eq!(Method::from_name("qr"), None);
    }

    fn constant_dataset(c: f64) -> MultiSurfaceDataset {
        let dom = DomainBox::new(&[(0.0, 1.0), (0.0, 1.0)]).unwrap();
        let pts = Sampling::Random { count: 60, seed: 1 }.points(&dom).unwrap();
        let vals = vec![c; 60];
        MultiSurfaceDataset::new(pts, vals, 1, dom, Provenance::default()).unwrap()
    }

    #[test]
    fn constant_surface_reproduced() {
        let ds = constant_dataset(3.7);
        for method in Method::ALL {
            let (model, _) = fit_model(&ds, &exact_config(method), &Truncation::TotalDegree(3), &FitOptions::default()).unwrap();
            for x in [[0.1, 0.9], [0.5, 0.5], [1.0, 0.0]] {
                let r = model.reconstruct_point(&x).unwrap();
                assert!((r.values[0] - 3.7).abs() < 1e-12, "{method:?}");
            }
        }
    }

    fn grid(n: usize) -> Vec<f64> {
        (0..n).map(|i| 2.0 * i as f64 / (n - 1) as f64).collect()
    }

    fn truth(x: &[f64]) -> Vec<f64> {
        x.iter()
            .flat_map(|&v| {
                let mut z = [sin(v), cos(2.0 * v), sin(2.0 * v)];
                z.sort_by(f64::total_cmp);
                z
            })
            .collect()
    }

    #[test]
    fn toy_problem_separates_methods() {
        let ds = sinusoid_1d(&Sampling::Random { count: 1000, seed: 7 }).unwrap();
        let pts = grid(2000);
        let t = truth(&pts);
        let cfg = GapWeightedConfig::default();
        let tr = Truncation::TotalDegree(40);
        let mut recon = Vec::new();
        for method in Method::ALL {
            let (model, _) = fit_model(&ds, &exact_config(method), &tr, &FitOptions::default()).unwrap();
            let rep = model.reconstruct_grid(&pts).unwrap();
            assert!(rep.failures.is_empty(), "{method:?}");
            let err = metric_suite(&t, &rep.values, 3, &cfg).unwrap();
            match method {
                Method::Direct => assert!(err.max_abs >= 1e-3, "direct {}", err.max_abs),
                _ => assert!(err.max_abs <= 1e-6, "{method:?} {}", err.max_abs),
            }
            for i in 0..rep.len() {
                assert!(rep.row(i).windows(2).all(|w| w[0] <= w[1]));
            }
            recon.push(rep.values);
        }
        for i in 0..3 {
            for j in i + 1..3 {
                let d = recon[i].iter().zip(&recon[j]).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
                assert!(d <= 1e-6, "{i} vs {j}: {d}");
            }
        }
    }

    #[test]
    fn schmeisser_crossing_indicator_on_grid() {
        let ds = sinusoid_1d(&Sampling::Random { count: 1000, seed: 3 }).unwrap();
        let (model, _) = fit_model(&ds, &exact_config(Method::Schmeisser), &Truncation::TotalDegree(30), &FitOptions::default()).unwrap();
        // sin x and sin 2x cross at x = 0 and cos 2x = sin 2x at π/8.
        let x = core::f64::consts::PI / 8.0;
        let pts = [x - 0.2, x - 0.01, x, x + 0.01, x + 0.2];
        let rep = model.reconstruct_grid(&pts).unwrap();
        let d = &rep.min_offdiag;
        assert!(d[2] < 1e-4 && d[2] < d[1] && d[2] < d[3] && d[1] < d[0] && d[3] < d[4], "{d:?}");
    }

    #[test]
    fn empty_grid_and_bad_points() {
        let ds = constant_dataset(1.0);
        let (model, _) = fit_model(&ds, &exact_config(Method::Colleague), &Truncation::TotalDegree(2), &FitOptions::default()).unwrap();
        let rep = model.reconstruct_grid(&[]).unwrap();
        assert!(rep.is_empty());
        let rep = model.reconstruct_grid(&[0.5, 0.5, 2.0, 0.5, 0.1, 0.1]).unwrap();
        assert_eq!(rep.failures.len(), 1);
        assert_eq!(rep.failures[0].0, 1);
        assert!(rep.row(1)[0].is_nan());
        assert!(model.reconstruct_grid(&[0.5]).is_err());
    }

    #[test]
    fn shuffled_rows_change_nothing() {
        let ds = sinusoid_1d(&Sampling::Random { count: 300, seed: 5 }).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let mut vals = ds.values().to_vec();
        for row in vals.chunks_mut(3) {
            row.shuffle(&mut rng);
        }
        let shuffled = MultiSurfaceDataset::new(ds.points().to_vec(), vals, 3, ds.domain().clone(), Provenance::default()).unwrap();
        let tr = Truncation::TotalDegree(20);
        for method in Method::ALL {
            let a = fit_model(&ds, &exact_config(method), &tr, &FitOptions::default()).unwrap().0;
            let b = fit_model(&shuffled, &exact_config(method), &tr, &FitOptions::default()).unwrap().0;
            assert_eq!(a.surrogates(), b.surrogates());
        }
    }

    #[test]
    fn well_separated_methods_agree() {
        // Three parallel-ish surfaces that never cross, m = 3..5.
        let mut rng = ChaCha8Rng::seed_from_u64(77);
        for m in 3..=5 {
            let dom = DomainBox::new(&[(-1.0, 1.0), (-1.0, 1.0)]).unwrap();
            let pts = Sampling::Random { count: 400, seed: m as u64 }.points(&dom).unwrap();
            let vals: Vec<f64> = pts
                .chunks(2)
                .flat_map(|p| (0..m).map(move |k| k as f64 + 0.3 * sin(p[0] + k as f64 * p[1])))
                .collect();
            let ds = MultiSurfaceDataset::new(pts, vals, m, dom, Provenance::default()).unwrap();
            let tr = Truncation::TotalDegree(14);
            let models: Vec<FittedModel> = [Method::Frobenius, Method::Schmeisser, Method::Colleague]
                .iter()
                .map(|&meth| fit_model(&ds, &exact_config(meth), &tr, &FitOptions::default()).unwrap().0)
                .collect();
            for _ in 0..1000 {
                let x = [rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)];
                let r: Vec<Vec<f64>> = models.iter().map(|md| md.reconstruct_point(&x).unwrap().values).collect();
                for i in 0..3 {
                    for j in i + 1..3 {
                        for (a, b) in r[i].iter().zip(&r[j]) {
                            assert!((a - b).abs() <= 1e-7, "m={m}: {a} vs {b}");
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn model_parts_validation() {
        let d1 = DomainBox::interval(0.0, 1.0).unwrap();
        let d2 = DomainBox::interval(0.0, 2.0).unwrap();
        let a = ChebSeries::constant(d1, 1.0);
        let b = ChebSeries::constant(d2, 1.0);
        let cfg = exact_config(Method::Direct);
        assert!(FittedModel::from_parts(cfg, ValueTransform::IDENTITY, vec![a.clone(), b]).is_err());
        assert!(FittedModel::from_parts(cfg, ValueTransform::IDENTITY, vec![]).is_err());
        let mut model = FittedModel::from_parts(cfg, ValueTransform::IDENTITY, vec![a]).unwrap();
        assert!(model.set_config(exact_config(Method::Colleague)).is_err());
    }
}
