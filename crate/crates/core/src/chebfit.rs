//! Multivariate Chebyshev series over a box: least-squares fitting from
//! scattered samples, nested Clenshaw evaluation, and 1D interpolation at
//! Chebyshev points of the second kind.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::math::{cos, sqrt};
use crate::poly::{clenshaw, DOMAIN_TOL};

/// Columns whose `|R_kk|` falls below this fraction of the largest one count
/// as linearly dependent.
pub const RANK_TOL: f64 = 1e-10;

/// Axis-aligned box `∏ [lo_i, hi_i]`.
#[derive(Debug, Clone, PartialEq)]
pub struct DomainBox {
    lo: Vec<f64>,
    hi: Vec<f64>,
}

impl DomainBox {
    pub fn new(bounds: &[(f64, f64)]) -> Result<Self> {
        if bounds.is_empty() {
            return Err(Error::EmptyInput);
        }
        for (i, &(lo, hi)) in bounds.iter().enumerate() {
            if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
                return Err(Error::InvalidDomain { dim: i });
            }
        }
        Ok(DomainBox {
            lo: bounds.iter().map(|b| b.0).collect(),
            hi: bounds.iter().map(|b| b.1).collect(),
        })
    }

    pub fn interval(lo: f64, hi: f64) -> Result<Self> {
        DomainBox::new(&[(lo, hi)])
    }

    /// `[-1, 1]^d`.
    pub fn reference(d: usize) -> Self {
        DomainBox { lo: vec![-1.0; d], hi: vec![1.0; d] }
    }

    pub fn dims(&self) -> usize {
        self.lo.len()
    }

    pub fn lo(&self) -> &[f64] {
        &self.lo
    }

    pub fn hi(&self) -> &[f64] {
        &self.hi
    }

    /// Affine image of coordinate `x` of dimension `dim` in `[-1, 1]`,
    /// clamped after a `DOMAIN_TOL` slack check.
    pub fn to_reference(&self, dim: usize, x: f64) -> Result<f64> {
        let (lo, hi) = (self.lo[dim], self.hi[dim]);
        let u = (2.0 * x - (lo + hi)) / (hi - lo);
        if !(u.abs() <= 1.0 + DOMAIN_TOL) {
            return Err(Error::PointOutsideDomain { dim, value: x });
        }
        Ok(u.clamp(-1.0, 1.0))
    }

    /// Inverse of [`to_reference`](Self::to_reference).
    pub fn from_reference(&self, dim: usize, u: f64) -> f64 {
        let (lo, hi) = (self.lo[dim], self.hi[dim]);
        0.5 * (lo + hi) + 0.5 * (hi - lo) * u
    }

    pub fn map_point(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.dims() {
            return Err(Error::DimensionMismatch { expected: self.dims(), found: x.len() });
        }
        x.iter().enumerate().map(|(i, &v)| self.to_reference(i, v)).collect()
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        self.map_point(x).is_ok()
    }
}

/// Which multi-indices `(k_1, ..., k_d)` a series may use.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Truncation {
    /// `k_i ≤ n_i` in every dimension.
    Tensor(Vec<usize>),
    /// `Σ k_i ≤ n`.
    TotalDegree(usize),
}

impl Truncation {
    pub fn validate(&self, d: usize) -> Result<()> {
        match self {
            Truncation::Tensor(n) if n.len() != d => Err(Error::DimensionMismatch { expected: d, found: n.len() }),
            _ => Ok(()),
        }
    }

    /// Largest degree appearing in each dimension.
    pub fn max_degrees(&self, d: usize) -> Vec<usize> {
        match self {
            Truncation::Tensor(n) => n.clone(),
            Truncation::TotalDegree(n) => vec![*n; d],
        }
    }

    pub fn admits(&self, k: &[usize]) -> bool {
        match self {
            Truncation::Tensor(n) => k.iter().zip(n).all(|(a, b)| a <= b),
            Truncation::TotalDegree(n) => k.iter().sum::<usize>() <= *n,
        }
    }

    /// All admitted multi-indices in lexicographic order, first dimension
    /// slowest.
    pub fn multi_indices(&self, d: usize) -> Vec<Vec<usize>> {
        let max = self.max_degrees(d);
        let mut out = Vec::new();
        let mut k = vec![0usize; d];
        loop {
            if self.admits(&k) {
                out.push(k.clone());
            }
            // Odometer increment, last dimension fastest.
            let mut i = d;
            loop {
                if i == 0 {
                    return out;
                }
                i -= 1;
                if k[i] < max[i] {
                    k[i] += 1;
                    break;
                }
                k[i] = 0;
            }
        }
    }

    pub fn basis_size(&self, d: usize) -> usize {
        self.multi_indices(d).len()
    }
}

/// `Σ c_k ∏ T_{k_i}(u_i)` over the admitted multi-indices, where `u` is the
/// point mapped from `domain` to `[-1, 1]^d`.
///
/// Coefficients are held in a dense row-major tensor of shape
/// `max_degree + 1` per dimension; entries outside the truncation are zero.
#[derive(Debug, Clone, PartialEq)]
pub struct ChebSeries {
    domain: DomainBox,
    truncation: Truncation,
    shape: Vec<usize>,
    dense: Vec<f64>,
}

impl ChebSeries {
    /// Builds from coefficients listed in [`Truncation::multi_indices`] order.
    pub fn from_terms(domain: DomainBox, truncation: Truncation, coeffs: &[f64]) -> Result<Self> {
        let d = domain.dims();
        truncation.validate(d)?;
        let idx = truncation.multi_indices(d);
        if idx.len() != coeffs.len() {
            return Err(Error::DimensionMismatch { expected: idx.len(), found: coeffs.len() });
        }
        let shape: Vec<usize> = truncation.max_degrees(d).iter().map(|n| n + 1).collect();
        let mut dense = vec![0.0; shape.iter().product()];
        for (k, &c) in idx.iter().zip(coeffs) {
            dense[flat_index(&shape, k)] = c;
        }
        Ok(ChebSeries { domain, truncation, shape, dense })
    }

    pub fn constant(domain: DomainBox, c: f64) -> Self {
        let d = domain.dims();
        ChebSeries { domain, truncation: Truncation::TotalDegree(0), shape: vec![1; d], dense: vec![c] }
    }

    pub fn domain(&self) -> &DomainBox {
        &self.domain
    }

    pub fn truncation(&self) -> &Truncation {
        &self.truncation
    }

    pub fn dims(&self) -> usize {
        self.domain.dims()
    }

    pub fn coefficient(&self, k: &[usize]) -> f64 {
        if k.len() != self.shape.len() || k.iter().zip(&self.shape).any(|(a, s)| a >= s) {
            return 0.0;
        }
        self.dense[flat_index(&self.shape, k)]
    }

    /// Coefficients in [`Truncation::multi_indices`] order.
    pub fn terms(&self) -> Vec<f64> {
        self.truncation
            .multi_indices(self.dims())
            .iter()
            .map(|k| self.dense[flat_index(&self.shape, k)])
            .collect()
    }

    /// Evaluates at a point of the original domain.
    pub fn eval(&self, x: &[f64]) -> Result<f64> {
        let u = self.domain.map_point(x)?;
        Ok(self.eval_reference(&u))
    }

    /// Evaluates at a point already mapped to `[-1, 1]^d`.
    pub fn eval_reference(&self, u: &[f64]) -> f64 {
        // Contract the last dimension first; each pass shrinks the tensor.
        let mut cur = self.dense.clone();
        for dim in (0..self.shape.len()).rev() {
            let n = self.shape[dim];
            cur = cur.chunks_exact(n).map(|c| clenshaw(c, u[dim])).collect();
        }
        cur[0]
    }
}

/// Free-function form of [`ChebSeries::eval`].
pub fn eval_nd(s: &ChebSeries, x: &[f64]) -> Result<f64> {
    s.eval(x)
}

fn flat_index(shape: &[usize], k: &[usize]) -> usize {
    k.iter().zip(shape).fold(0, |acc, (&ki, &n)| acc * n + ki)
}

/// Outcome of a least-squares fit.
#[derive(Debug, Clone, PartialEq)]
pub struct FitReport {
    pub points: usize,
    pub basis: usize,
    /// Fewer than twice as many points as basis functions.
    pub undersampled: bool,
    /// `‖A c - y‖₂ / √points` for each right-hand side.
    pub rms_residual: Vec<f64>,
    /// Condition estimate `max |R_kk| / min |R_kk|`.
    pub diag_ratio: f64,
}

impl FitReport {
    pub fn max_rms_residual(&self) -> f64 {
        self.rms_residual.iter().copied().fold(0.0, f64::max)
    }
}

/// Fits one series to `values` sampled at `points` (row-major, `d` per point).
pub fn fit_lsq(points: &[f64], values: &[f64], truncation: &Truncation, domain: &DomainBox) -> Result<(ChebSeries, FitReport)> {
    let (mut s, r) = fit_lsq_multi(points, &[values], truncation, domain)?;
    Ok((s.pop().expect("one right-hand side"), r))
}

/// Fits several series sharing the same sample points with a single QR
/// factorization of the design matrix.
pub fn fit_lsq_multi(
    points: &[f64],
    rhs: &[&[f64]],
    truncation: &Truncation,
    domain: &DomainBox,
) -> Result<(Vec<ChebSeries>, FitReport)> {
    let d = domain.dims();
    truncation.validate(d)?;
    if points.len() % d != 0 {
        return Err(Error::DimensionMismatch { expected: d, found: points.len() % d });
    }
    let n_pts = points.len() / d;
    for r in rhs {
        if r.len() != n_pts {
            return Err(Error::DimensionMismatch { expected: n_pts, found: r.len() });
        }
    }
    let idx = truncation.multi_indices(d);
    let basis = idx.len();
    if n_pts < basis {
        return Err(Error::TooFewPoints { points: n_pts, basis });
    }

    let mut a = design_matrix(points, d, &idx, truncation, domain)?;
    let mut b: Vec<Vec<f64>> = rhs.iter().map(|r| r.to_vec()).collect();
    let rdiag = householder_qr(&mut a, n_pts, basis, &mut b);

    let rmax = rdiag.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let rmin = rdiag.iter().fold(f64::INFINITY, |m, v| m.min(v.abs()));
    let rank = rdiag.iter().filter(|v| v.abs() > RANK_TOL * rmax).count();
    if rank < basis || rmax == 0.0 {
        return Err(Error::RankDeficient { rank, basis });
    }

    let mut series = Vec::with_capacity(rhs.len());
    let mut rms = Vec::with_capacity(rhs.len());
    for col in &b {
        let coeffs = back_substitute(&a, n_pts, basis, &rdiag, col);
        let tail: f64 = col[basis..].iter().map(|v| v * v).sum();
        rms.push(sqrt(tail / n_pts as f64));
        series.push(ChebSeries::from_terms(domain.clone(), truncation.clone(), &coeffs)?);
    }
    let report = FitReport {
        points: n_pts,
        basis,
        undersampled: n_pts < 2 * basis,
        rms_residual: rms,
        diag_ratio: rmax / rmin,
    };
    Ok((series, report))
}

/// Column-major `n_pts × basis` matrix of `∏ T_{k_i}(u_i)`.
fn design_matrix(points: &[f64], d: usize, idx: &[Vec<usize>], truncation: &Truncation, domain: &DomainBox) -> Result<Vec<f64>> {
    let n_pts = points.len() / d;
    let max = truncation.max_degrees(d);
    let mut a = vec![0.0; n_pts * idx.len()];
    let mut t: Vec<Vec<f64>> = max.iter().map(|&n| vec![0.0; n + 1]).collect();
    for p in 0..n_pts {
        for dim in 0..d {
            let u = domain.to_reference(dim, points[p * d + dim])?;
            chebyshev_values(u, &mut t[dim]);
        }
        for (j, k) in idx.iter().enumerate() {
            let mut v = 1.0;
            for dim in 0..d {
                v *= t[dim][k[dim]];
            }
            a[j * n_pts + p] = v;
        }
    }
    Ok(a)
}

fn chebyshev_values(u: f64, out: &mut [f64]) {
    out[0] = 1.0;
    if out.len() > 1 {
        out[1] = u;
    }
    for k in 2..out.len() {
        out[k] = 2.0 * u * out[k - 1] - out[k - 2];
    }
}

/// In-place Householder QR of the column-major `m × n` matrix `a`, applying
/// the reflections to every vector in `b`. `R` is left in the upper triangle
/// (diagonal returned separately) and the reflectors below it.
fn householder_qr(a: &mut [f64], m: usize, n: usize, b: &mut [Vec<f64>]) -> Vec<f64> {
    let mut rdiag = vec![0.0; n];
    for k in 0..n {
        let (done, rest) = a.split_at_mut((k + 1) * m);
        let col = &mut done[k * m..];
        let norm = sqrt(col[k..].iter().map(|v| v * v).sum());
        if norm == 0.0 {
            rdiag[k] = 0.0;
            continue;
        }
        let alpha = if col[k] > 0.0 { -norm } else { norm };
        // v = x - alpha e_1 in place, beta = 2 / (v·v) = 1 / (norm² - alpha x_k).
        col[k] -= alpha;
        let beta = 1.0 / (norm * norm - alpha * (col[k] + alpha));
        let v = &col[k..];
        for j in 0..n - k - 1 {
            let target = &mut rest[j * m + k..(j + 1) * m];
            let dot: f64 = v.iter().zip(target.iter()).map(|(a, b)| a * b).sum();
            let f = dot * beta;
            for (t, vi) in target.iter_mut().zip(v) {
                *t -= f * vi;
            }
        }
        for rhs in b.iter_mut() {
            let target = &mut rhs[k..];
            let dot: f64 = v.iter().zip(target.iter()).map(|(a, b)| a * b).sum();
            let f = dot * beta;
            for (t, vi) in target.iter_mut().zip(v) {
                *t -= f * vi;
            }
        }
        rdiag[k] = alpha;
    }
    rdiag
}

fn back_substitute(a: &[f64], m: usize, n: usize, rdiag: &[f64], qtb: &[f64]) -> Vec<f64> {
    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        let mut s = qtb[i];
        for j in i + 1..n {
            s -= a[j * m + i] * x[j];
        }
        x[i] = s / rdiag[i];
    }
    x
}

/// Chebyshev points of the second kind `cos(jπ/n)`, `j = 0..=n`, mapped into
/// `[lo, hi]`. A single point at the interval centre when `n = 0`.
pub fn cheb_points_1d(n: usize, domain: &DomainBox) -> Vec<f64> {
    if n == 0 {
        return vec![domain.from_reference(0, 0.0)];
    }
    (0..=n)
        .map(|j| domain.from_reference(0, cos(j as f64 * core::f64::consts::PI / n as f64)))
        .collect()
}

/// Degree `n` interpolant of `f` at [`cheb_points_1d`], coefficients from
/// the discrete cosine sum.
pub fn interpolate_cheb_points_1d<F: Fn(f64) -> f64>(f: F, n: usize, domain: &DomainBox) -> Result<ChebSeries> {
    if domain.dims() != 1 {
        return Err(Error::DimensionMismatch { expected: 1, found: domain.dims() });
    }
    let nodes = cheb_points_1d(n, domain);
    let vals: Vec<f64> = nodes.iter().map(|&x| f(x)).collect();
    if n == 0 {
        return Ok(ChebSeries::constant(domain.clone(), vals[0]));
    }
    let nf = n as f64;
    let mut c = vec![0.0; n + 1];
    for (k, ck) in c.iter_mut().enumerate() {
        let mut s = 0.0;
        for (j, &v) in vals.iter().enumerate() {
            let w = if j == 0 || j == n { 0.5 } else { 1.0 };
            // cos(jkπ/n) with the angle reduced mod 2n for accuracy.
            let angle = ((j * k) % (2 * n)) as f64 * core::f64::consts::PI / nf;
            s += w * v * cos(angle);
        }
        let w = if k == 0 || k == n { 0.5 } else { 1.0 };
        *ck = 2.0 * w * s / nf;
    }
    ChebSeries::from_terms(domain.clone(), Truncation::TotalDegree(n), &c)
}
