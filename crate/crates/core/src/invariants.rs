//! Elementary symmetric polynomials, Viète's sign rule, and the affine value
//! rescaling applied before invariants are formed.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::poly::MonicPolynomial;

/// Default margin kept between the rescaled data and `±1`.
pub const DEFAULT_MARGIN: f64 = 0.05;

/// `(s_1, ..., s_m)` for an `m`-tuple of values.
#[derive(Debug, Clone, PartialEq)]
pub struct EspVector {
    s: Vec<f64>,
}

impl EspVector {
    pub fn new(s: Vec<f64>) -> Self {
        EspVector { s }
    }

    pub fn m(&self) -> usize {
        self.s.len()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.s
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.s
    }
}

/// Computes all elementary symmetric polynomials of `values`.
///
/// Values are sorted ascending first and then folded into
/// `∏ (1 + v t)` one factor at a time, so the result does not depend on the
/// input order at the bit level.
pub fn esp_from_values(values: &[f64]) -> Result<EspVector> {
    if values.is_empty() {
        return Err(Error::EmptyInput);
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    Ok(EspVector { s: esp_sorted(&sorted) })
}

/// Same recurrence without the canonicalizing sort.
pub(crate) fn esp_sorted(values: &[f64]) -> Vec<f64> {
    let m = values.len();
    // e[k] holds s_k; e[0] = 1 is implicit in the update below.
    let mut e = vec![0.0; m + 1];
    e[0] = 1.0;
    for (i, &v) in values.iter().enumerate() {
        for k in (1..=i + 1).rev() {
            e[k] += v * e[k - 1];
        }
    }
    e.remove(0);
    e
}

/// `a_{m-k} = (-1)^k s_k`.
pub fn monic_from_esp(e: &EspVector) -> MonicPolynomial {
    let m = e.m();
    let coeffs = (0..m)
        .map(|i| {
            let k = m - i;
            if k % 2 == 0 {
                e.s[k - 1]
            } else {
                -e.s[k - 1]
            }
        })
        .collect();
    MonicPolynomial::new(coeffs).expect("ESP vector is non-empty")
}

/// `s_k = (-1)^k a_{m-k}`.
pub fn esp_from_monic(p: &MonicPolynomial) -> EspVector {
    let a = p.coeffs();
    let m = a.len();
    let s = (1..=m)
        .map(|k| if k % 2 == 0 { a[m - k] } else { -a[m - k] })
        .collect();
    EspVector { s }
}

/// Affine map of the value axis, `forward(y) = (y - shift) / scale`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ValueTransform {
    pub scale: f64,
    pub shift: f64,
}

impl ValueTransform {
    pub const IDENTITY: ValueTransform = ValueTransform { scale: 1.0, shift: 0.0 };

    #[inline]
    pub fn forward(&self, y: f64) -> f64 {
        (y - self.shift) / self.scale
    }

    #[inline]
    pub fn inverse(&self, u: f64) -> f64 {
        u * self.scale + self.shift
    }
}

/// Fits the transform that sends `[min, max]` of `values` onto
/// `[-1 + margin, 1 - margin]`. Constant data gets scale one and a shift
/// equal to the constant.
pub fn fit_value_transform(values: &[f64], margin: f64) -> Result<ValueTransform> {
    if !(margin > 0.0 && margin < 0.5) {
        return Err(Error::InvalidParameter("margin must lie in (0, 0.5)"));
    }
    let (lo, hi) = values
        .iter()
        .fold(None, |acc: Option<(f64, f64)>, &v| match acc {
            None => Some((v, v)),
            Some((lo, hi)) => Some((lo.min(v), hi.max(v))),
        })
        .ok_or(Error::EmptyInput)?;
    if hi > lo {
        Ok(ValueTransform {
            scale: (hi - lo) / (2.0 * (1.0 - margin)),
            shift: 0.5 * (hi + lo),
        })
    } else {
        Ok(ValueTransform { scale: 1.0, shift: lo })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::seq::SliceRandom;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    /// Subset-enumeration oracle: sum over all k-subsets of their products.
    fn esp_brute(v: &[f64]) -> Vec<f64> {
        let m = v.len();
        let mut s = vec![0.0; m];
        for mask in 1u32..(1 << m) {
            let k = mask.count_ones() as usize;
            let prod: f64 = (0..m).filter(|i| mask & (1 << i) != 0).map(|i| v[i]).product();
            s[k - 1] += prod;
        }
        s
    }

    #[test]
    fn esp_examples() {
        assert_eq!(esp_brute(&[1.0, 2.0, 3.0]), vec![6.0, 11.0, 6.0]);
        assert_eq!(esp_from_values(&[1.0, 2.0, 3.0]).unwrap().as_slice(), &[6.0, 11.0, 6.0]);
        assert_eq!(esp_from_values(&[0.0; 4]).unwrap().as_slice(), &[0.0; 4]);
        assert_eq!(esp_from_values(&[2.5]).unwrap().as_slice(), &[2.5]);
        assert_eq!(esp_from_values(&[]), Err(Error::EmptyInput));
    }

    #[test]
    fn esp_matches_brute_force() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..200 {
            let m = rng.gen_range(1..=7);
            let v: Vec<f64> = (0..m).map(|_| rng.gen_range(-2.0..2.0)).collect();
            let fast = esp_from_values(&v).unwrap();
            for (a, b) in fast.as_slice().iter().zip(esp_brute(&v)) {
                assert!((a - b).abs() <= 1e-12 * (1.0 + b.abs()));
            }
        }
    }

    #[test]
    fn viete_examples() {
        let e = esp_from_values(&[1.0, 2.0, 3.0]).unwrap();
        assert_eq!(monic_from_esp(&e).coeffs(), &[-6.0, 11.0, -6.0]);
        assert_eq!(monic_from_esp(&EspVector::new(vec![0.0; 3])).coeffs(), &[0.0; 3]);
        let e = esp_from_values(&[-1.0, 1.0]).unwrap();
        assert_eq!(e.as_slice(), &[0.0, -1.0]);
        assert_eq!(monic_from_esp(&e).coeffs(), &[-1.0, 0.0]);

        let p = MonicPolynomial::new(vec![-1.0, 0.0]).unwrap();
        assert_eq!(esp_from_monic(&p).as_slice(), &[0.0, -1.0]);
        let p = MonicPolynomial::new(vec![0.0; 4]).unwrap();
        assert_eq!(esp_from_monic(&p).as_slice(), &[0.0; 4]);
        let p = MonicPolynomial::new(vec![-6.0, 11.0, -6.0]).unwrap();
        assert_eq!(esp_from_monic(&p).as_slice(), &[6.0, 11.0, 6.0]);
    }

    #[test]
    fn value_transform_examples() {
        let t = fit_value_transform(&[0.0, 0.7, 2.0], 0.05).unwrap();
        assert_eq!(t.shift, 1.0);
        assert!((t.scale - 2.0 / 1.9).abs() < 1e-15);
        assert!((t.forward(0.0) + 0.95).abs() < 1e-15);
        assert!((t.forward(2.0) - 0.95).abs() < 1e-15);

        let t = fit_value_transform(&[3.25, 3.25], 0.05).unwrap();
        assert_eq!(t, ValueTransform { scale: 1.0, shift: 3.25 });

        let t = fit_value_transform(&[-0.95, 0.1, 0.95], 0.05).unwrap();
        assert_eq!(t.forward(-0.95), -0.95);
        assert_eq!(t.forward(0.95), 0.95);

        assert_eq!(fit_value_transform(&[], 0.05), Err(Error::EmptyInput));
        assert!(fit_value_transform(&[1.0], 0.5).is_err());
    }

    #[test]
    fn esp_roundtrip_is_bit_exact() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..1000 {
            let m = rng.gen_range(2..=6);
            let v: Vec<f64> = (0..m).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let e = esp_from_values(&v).unwrap();
            assert_eq!(esp_from_monic(&monic_from_esp(&e)), e);
        }
    }

    #[test]
    fn esp_is_permutation_invariant() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..500 {
            let m = rng.gen_range(2..=6);
            let mut v: Vec<f64> = (0..m).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let e = esp_from_values(&v).unwrap();
            v.shuffle(&mut rng);
            assert_eq!(esp_from_values(&v).unwrap(), e);
        }
    }

    proptest! {
        #[test]
        fn first_esp_is_the_sum(v in prop::collection::vec(-10.0f64..10.0, 1..8)) {
            let e = esp_from_values(&v).unwrap();
            let sum: f64 = v.iter().sum();
            let abs: f64 = v.iter().map(|x| x.abs()).sum();
            prop_assert!((e.as_slice()[0] - sum).abs() <= 2.0 * v.len() as f64 * f64::EPSILON * abs);
        }

        #[test]
        fn transform_roundtrip(lo in -1e3f64..1e3, width in 1e-6f64..1e3, y in 0.0f64..1.0) {
            let t = fit_value_transform(&[lo, lo + width], DEFAULT_MARGIN).unwrap();
            let v = lo + y * width;
            prop_assert!((t.inverse(t.forward(v)) - v).abs() <= 1e-14 * v.abs().max(t.scale).max(t.shift.abs()));
        }
    }
}
