//! Test multi-surfaces: crossing sinusoids, conical cusps, a stacked set with
//! a leftover cusp, graphene's tight-binding bands and a small synthetic
//! vibronic model in three dimensions.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::chebfit::DomainBox;
use crate::dataset::{MultiSurfaceDataset, Provenance};
use crate::error::{Error, Result};
use crate::math::{cos, sin, sinh, sqrt};
use crate::spectra::{eig_sym_tridiag, SymTridiagonal};

/// Nearest-neighbour hopping energy in eV.
pub const GRAPHENE_GAMMA0: f64 = 2.8;
/// Lattice constant in Å.
pub const GRAPHENE_A: f64 = 2.46;
/// Default semi-axes of the sinh cone.
pub const CONICAL_AB: (f64, f64) = (4.0 / 3.0, 12.0 / 5.0);

/// How sample points are placed in the domain box.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Sampling {
    /// `count` i.i.d. uniform points from a ChaCha8 stream seeded by `seed`.
    Random { count: usize, seed: u64 },
    /// Tensor grid with the given number of points per dimension, endpoints
    /// included, first coordinate varying slowest.
    Grid(Vec<usize>),
}

impl Sampling {
    pub fn points(&self, domain: &DomainBox) -> Result<Vec<f64>> {
        let d = domain.dims();
        match self {
            Sampling::Random { count, seed } => {
                let mut rng = ChaCha8Rng::seed_from_u64(*seed);
                let mut out = Vec::with_capacity(count * d);
                for _ in 0..*count {
                    for i in 0..d {
                        let (lo, hi) = (domain.lo()[i], domain.hi()[i]);
                        out.push(lo + (hi - lo) * rng.gen::<f64>());
                    }
                }
                Ok(out)
            }
            Sampling::Grid(n) => {
                if n.len() != d {
                    return Err(Error::DimensionMismatch { expected: d, found: n.len() });
                }
                if n.contains(&0) {
                    return Err(Error::InvalidParameter("grid counts must be >= 1"));
                }
                let axes: Vec<Vec<f64>> = (0..d).map(|i| linspace(domain.lo()[i], domain.hi()[i], n[i])).collect();
                let total: usize = n.iter().product();
                let mut out = Vec::with_capacity(total * d);
                let mut k = vec![0usize; d];
                for _ in 0..total {
                    for i in 0..d {
                        out.push(axes[i][k[i]]);
                    }
                    for i in (0..d).rev() {
                        k[i] += 1;
                        if k[i] < n[i] {
                            break;
                        }
                        k[i] = 0;
                    }
                }
                Ok(out)
            }
        }
    }

    fn describe(&self) -> (Option<u64>, String) {
        match self {
            Sampling::Random { count, seed } => (Some(*seed), format!("uniform iid chacha8, {count} points")),
            Sampling::Grid(n) => {
                let dims: Vec<String> = n.iter().map(|v| format!("{v}")).collect();
                (None, format!("grid {}", dims.join("x")))
            }
        }
    }
}

/// `n` equispaced values from `lo` to `hi` inclusive; `[lo]` when `n = 1`.
pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![lo],
        _ => (0..n)
            .map(|i| if i == n - 1 { hi } else { lo + (hi - lo) * i as f64 / (n - 1) as f64 })
            .collect(),
    }
}

fn build<F: Fn(&[f64], &mut [f64])>(name: &str, domain: DomainBox, sampling: &Sampling, m: usize, f: F) -> Result<MultiSurfaceDataset> {
    let points = sampling.points(&domain)?;
    let d = domain.dims();
    let mut values = vec![0.0; points.len() / d * m];
    for (p, v) in points.chunks_exact(d).zip(values.chunks_exact_mut(m)) {
        f(p, v);
    }
    let (seed, notes) = sampling.describe();
    let prov = Provenance { generator: String::from(name), seed, noise: 0.0, notes };
    MultiSurfaceDataset::new(points, values, m, domain, prov)
}

/// `sin x`, `cos 2x`, `sin 2x` on `[0, 2]`.
pub fn sinusoid_1d(sampling: &Sampling) -> Result<MultiSurfaceDataset> {
    build("sinusoid1d", DomainBox::interval(0.0, 2.0)?, sampling, 3, |p, v| {
        let x = p[0];
        v.copy_from_slice(&[sin(x), cos(2.0 * x), sin(2.0 * x)]);
    })
}

/// `2 sin(6(x+y)/5)`, `2/3 - cos(x-y)` and the constant `1` on `[0, 2]²`.
pub fn sinusoid_2d(sampling: &Sampling) -> Result<MultiSurfaceDataset> {
    build("sinusoid2d", DomainBox::new(&[(0.0, 2.0), (0.0, 2.0)])?, sampling, 3, |p, v| {
        let (x, y) = (p[0], p[1]);
        v.copy_from_slice(&[2.0 * sin(6.0 * (x + y) / 5.0), 2.0 / 3.0 - cos(x - y), 1.0]);
    })
}

fn cone_radius(x: f64, y: f64, a: f64, b: f64) -> f64 {
    sqrt(a * a * y * y + b * b * x * x) / (a * b)
}

/// `±√(a²y² + b²x²)/(ab)`: a cone whose invariants are quadratics.
pub fn conical(sampling: &Sampling, domain: DomainBox, a: f64, b: f64) -> Result<MultiSurfaceDataset> {
    if a == 0.0 || b == 0.0 {
        return Err(Error::ZeroAxis);
    }
    build("conical", domain, sampling, 2, |p, v| {
        let r = cone_radius(p[0], p[1], a, b);
        v.copy_from_slice(&[-r, r]);
    })
}

/// `±sinh(√(a²y² + b²x²)/(ab))`: a cone with non-polynomial invariants.
pub fn sinh_conical(sampling: &Sampling, domain: DomainBox, a: f64, b: f64) -> Result<MultiSurfaceDataset> {
    if a == 0.0 || b == 0.0 {
        return Err(Error::ZeroAxis);
    }
    build("sinh_conical", domain, sampling, 2, |p, v| {
        let r = sinh(cone_radius(p[0], p[1], a, b));
        v.copy_from_slice(&[-r, r]);
    })
}

/// Default `[-1, 1]²` box for the conical generators.
pub fn conical_domain() -> DomainBox {
    DomainBox::reference(2)
}

/// The three 1D sinusoids plus `1/3 + cos(2x/3)`, keeping only the three
/// lowest values at each point.
pub fn stacked(sampling: &Sampling) -> Result<MultiSurfaceDataset> {
    build("stacked", DomainBox::interval(0.0, 2.0)?, sampling, 3, |p, v| {
        let x = p[0];
        let mut all = [sin(x), cos(2.0 * x), sin(2.0 * x), 1.0 / 3.0 + cos(2.0 * x / 3.0)];
        all.sort_by(f64::total_cmp);
        v.copy_from_slice(&all[..3]);
    })
}

/// Conduction and valence bands `±γ₀ √(1 + 4cos²(ak_x/2) + 4cos(ak_x/2)cos(√3ak_y/2))`.
pub fn graphene_bands(kx: f64, ky: f64) -> (f64, f64) {
    let c = cos(GRAPHENE_A * kx / 2.0);
    let cy = cos(sqrt(3.0) * GRAPHENE_A * ky / 2.0);
    let rad = (1.0 + 4.0 * c * c + 4.0 * c * cy).max(0.0);
    let e = GRAPHENE_GAMMA0 * sqrt(rad);
    (-e, e)
}

/// Dirac point `K = (4π/(3a), 0)`.
pub fn graphene_k_point() -> (f64, f64) {
    (4.0 * core::f64::consts::PI / (3.0 * GRAPHENE_A), 0.0)
}

/// Rectangle `|k_x| ≤ 2π/a`, `|k_y| ≤ 2π/(√3 a)`, which contains `K`.
pub fn graphene_domain() -> DomainBox {
    let kx = 2.0 * core::f64::consts::PI / GRAPHENE_A;
    let ky = kx / sqrt(3.0);
    DomainBox::new(&[(-kx, kx), (-ky, ky)]).expect("non-degenerate box")
}

pub fn graphene(sampling: &Sampling, domain: DomainBox) -> Result<MultiSurfaceDataset> {
    build("graphene", domain, sampling, 2, |p, v| {
        let (lo, hi) = graphene_bands(p[0], p[1]);
        v.copy_from_slice(&[lo, hi]);
    })
}

/// Eigenvalues of a 3×3 symmetric tridiagonal model Hamiltonian over
/// `[-1, 1]³`. Two states cross conically along the line `x = 0.1, z = 0`.
pub fn vibronic_3d(sampling: &Sampling) -> Result<MultiSurfaceDataset> {
    build("vibronic3d", DomainBox::reference(3), sampling, 3, |p, v| {
        v.copy_from_slice(&vibronic_levels(p[0], p[1], p[2]));
    })
}

pub fn vibronic_levels(x: f64, y: f64, z: f64) -> [f64; 3] {
    let t = SymTridiagonal::new(
        vec![x, 0.2 - x, 0.3 + 0.4 * (x + y)],
        vec![0.5 * z, 0.5 * y],
    )
    .expect("3x3 shape");
    let e = eig_sym_tridiag(&t).expect("bounded entries converge");
    [e[0], e[1], e[2]]
}

/// Looks a generator up by its CLI name. Conical ones use their default box
/// and axes, graphene its default box.
pub fn by_name(name: &str, sampling: &Sampling) -> Option<Result<MultiSurfaceDataset>> {
    let (a, b) = CONICAL_AB;
    Some(match name {
        "sinusoid1d" => sinusoid_1d(sampling),
        "sinusoid2d" => sinusoid_2d(sampling),
        "conical" => conical(sampling, conical_domain(), a, b),
        "sinh_conical" => sinh_conical(sampling, conical_domain(), a, b),
        "stacked" => stacked(sampling),
        "graphene" => graphene(sampling, graphene_domain()),
        "vibronic3d" => vibronic_3d(sampling),
        _ => return None,
    })
}

/// Names accepted by [`by_name`] with their input dimension.
pub const GENERATORS: &[(&str, usize)] = &[
    ("sinusoid1d", 1),
    ("sinusoid2d", 2),
    ("conical", 2),
    ("sinh_conical", 2),
    ("stacked", 1),
    ("graphene", 2),
    ("vibronic3d", 3),
];
