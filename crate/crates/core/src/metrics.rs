//! Error measures between true and reconstructed multi-surfaces.

use crate::error::{Error, Result};
use crate::math::sqrt;

/// Regularizer of the gap-weighted error denominator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GapWeightedConfig {
    pub eps_w: f64,
}

impl Default for GapWeightedConfig {
    fn default() -> Self {
        GapWeightedConfig { eps_w: 5e-2 }
    }
}

/// Summary of a reconstruction over a point set.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Metrics {
    pub max_abs: f64,
    pub mae: f64,
    pub rmse: f64,
    pub gap_weighted: f64,
    /// Points that entered the statistics.
    pub points: usize,
    /// Points skipped because the reconstruction failed there (non-finite).
    pub failed: usize,
}

/// Compares row-major `truth` and `approx` (`m` values per point).
///
/// The gap-weighted error is the largest
/// `|Δ̃_ij - Δ_ij| / (ε_W + |Δ_ij|)` over points and pairs `i < j`, where
/// `Δ_ij = f_j - f_i`. Rows of `approx` containing a non-finite value are
/// counted as failed and left out.
pub fn metric_suite(truth: &[f64], approx: &[f64], m: usize, cfg: &GapWeightedConfig) -> Result<Metrics> {
    if m == 0 || truth.len() != approx.len() || truth.len() % m != 0 {
        return Err(Error::ShapeMismatch);
    }
    if !(cfg.eps_w > 0.0) {
        return Err(Error::InvalidParameter("eps_w must be > 0"));
    }
    let mut out = Metrics { max_abs: 0.0, mae: 0.0, rmse: 0.0, gap_weighted: 0.0, points: 0, failed: 0 };
    let mut sum_abs = 0.0;
    let mut sum_sq = 0.0;
    for (t, a) in truth.chunks_exact(m).zip(approx.chunks_exact(m)) {
        if a.iter().any(|v| !v.is_finite()) {
            out.failed += 1;
            continue;
        }
        out.points += 1;
        for (x, y) in t.iter().zip(a) {
            let e = (x - y).abs();
            out.max_abs = out.max_abs.max(e);
            sum_abs += e;
            sum_sq += e * e;
        }
        for i in 0..m {
            for j in i + 1..m {
                let dt = t[j] - t[i];
                let da = a[j] - a[i];
                out.gap_weighted = out.gap_weighted.max((da - dt).abs() / (cfg.eps_w + dt.abs()));
            }
        }
    }
    if out.points > 0 {
        let count = (out.points * m) as f64;
        out.mae = sum_abs / count;
        out.rmse = sqrt(sum_sq / count);
    }
    Ok(out)
}
