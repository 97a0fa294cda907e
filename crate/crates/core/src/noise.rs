//! Seeded uniform perturbations of surface values or fitted invariants.

use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::dataset::MultiSurfaceDataset;
use crate::error::{Error, Result};

/// What a perturbation is applied to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NoiseTarget {
    /// Raw surface values; rows are re-sorted afterwards.
    SurfaceValues,
    /// Per-point invariants (ESPs or colleague coefficients) before fitting.
    Invariants,
}

/// `len` independent draws from `U[-eps, eps]`, reproducible from `seed`.
pub fn uniform_noise(len: usize, eps: f64, seed: u64) -> Result<Vec<f64>> {
    if !(eps >= 0.0) || !eps.is_finite() {
        return Err(Error::InvalidParameter("noise scale must be finite and >= 0"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok((0..len).map(|_| eps * (2.0 * rng.gen::<f64>() - 1.0)).collect())
}

/// Adds `U[-eps, eps]` noise to every entry of `values`. `eps = 0` leaves
/// the slice untouched.
pub fn perturb(values: &mut [f64], eps: f64, seed: u64) -> Result<()> {
    let noise = uniform_noise(values.len(), eps, seed)?;
    if eps > 0.0 {
        for (v, e) in values.iter_mut().zip(noise) {
            *v += e;
        }
    }
    Ok(())
}

/// Perturbed copy of a dataset's surface values, rows re-sorted.
pub fn add_surface_noise(ds: &MultiSurfaceDataset, eps: f64, seed: u64) -> Result<MultiSurfaceDataset> {
    let mut values = ds.values().to_vec();
    perturb(&mut values, eps, seed)?;
    let mut out = ds.with_values(values);
    out.provenance.noise = eps;
    Ok(out)
}
