//! Value-sorted samples of a multi-surface.

use alloc::string::String;
use alloc::vec::Vec;

use crate::chebfit::DomainBox;
use crate::error::{Error, Result};

/// Where a dataset came from.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Provenance {
    pub generator: String,
    pub seed: Option<u64>,
    pub noise: f64,
    /// Free text, e.g. the sampling scheme.
    pub notes: String,
}

/// `n` points in a box of `R^d`, each carrying `m` ascending values.
///
/// Points and values are stored row-major in flat buffers.
#[derive(Debug, Clone, PartialEq)]
pub struct MultiSurfaceDataset {
    d: usize,
    m: usize,
    points: Vec<f64>,
    values: Vec<f64>,
    domain: DomainBox,
    pub provenance: Provenance,
    resorted: usize,
}

impl MultiSurfaceDataset {
    /// Validates shapes and domain membership and sorts each value row.
    pub fn new(points: Vec<f64>, values: Vec<f64>, m: usize, domain: DomainBox, provenance: Provenance) -> Result<Self> {
        let d = domain.dims();
        if m == 0 {
            return Err(Error::InvalidParameter("surface count must be >= 1"));
        }
        if points.len() % d != 0 {
            return Err(Error::DimensionMismatch { expected: d, found: points.len() % d });
        }
        let n = points.len() / d;
        if values.len() != n * m {
            return Err(Error::DimensionMismatch { expected: n * m, found: values.len() });
        }
        for p in points.chunks_exact(d) {
            domain.map_point(p)?;
        }
        let mut ds = MultiSurfaceDataset { d, m, points, values, domain, provenance, resorted: 0 };
        ds.sort_rows();
        Ok(ds)
    }

    fn sort_rows(&mut self) {
        let m = self.m;
        for row in self.values.chunks_exact_mut(m) {
            if row.windows(2).any(|w| w[0] > w[1]) {
                row.sort_by(f64::total_cmp);
                self.resorted += 1;
            }
        }
    }

    pub fn dims(&self) -> usize {
        self.d
    }

    pub fn surfaces(&self) -> usize {
        self.m
    }

    pub fn len(&self) -> usize {
        self.points.len() / self.d
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn domain(&self) -> &DomainBox {
        &self.domain
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.points[i * self.d..(i + 1) * self.d]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.values[i * self.m..(i + 1) * self.m]
    }

    /// Number of rows that arrived out of order and were sorted.
    pub fn resorted_rows(&self) -> usize {
        self.resorted
    }

    /// Replaces the values, re-sorting rows. Used by surface-value noise.
    pub(crate) fn with_values(&self, values: Vec<f64>) -> Self {
        let mut ds = MultiSurfaceDataset { values, resorted: 0, ..self.clone() };
        ds.sort_rows();
        ds
    }
}
