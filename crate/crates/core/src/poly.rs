//! Univariate polynomials in the monomial and Chebyshev bases.
//!
//! All coefficient sequences are ascending: index `k` multiplies `x^k` or
//! `T_k(x)`.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};

/// Leading coefficients at or below this magnitude are treated as zero.
pub const LEAD_TOL: f64 = 1e-13;
/// Remainder coefficients below `TRIM_TOL * ‖num‖_∞` are trimmed.
pub const TRIM_TOL: f64 = 1e-13;
/// Slack allowed outside `[-1, 1]` for Chebyshev evaluation.
pub const DOMAIN_TOL: f64 = 1e-12;

/// Monic polynomial `y^n + a_{n-1} y^{n-1} + ... + a_0`.
///
/// Only the `n` non-leading coefficients are stored.
#[derive(Debug, Clone, PartialEq)]
pub struct MonicPolynomial {
    coeffs: Vec<f64>,
}

impl MonicPolynomial {
    /// Builds from `(a_0, ..., a_{n-1})`. The degree is the slice length and
    /// must be at least one.
    pub fn new(coeffs: Vec<f64>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::EmptyInput);
        }
        Ok(MonicPolynomial { coeffs })
    }

    /// Expands `∏ (y - r_i)`.
    pub fn from_roots(roots: &[f64]) -> Result<Self> {
        if roots.is_empty() {
            return Err(Error::EmptyInput);
        }
        let mut full = vec![1.0];
        for &r in roots {
            full.push(0.0);
            for k in (1..full.len()).rev() {
                full[k] = full[k - 1] - r * full[k];
            }
            full[0] *= -r;
        }
        full.pop();
        Ok(MonicPolynomial { coeffs: full })
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len()
    }

    /// Non-leading coefficients `(a_0, ..., a_{n-1})`.
    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    /// All `n + 1` coefficients including the trailing leading one.
    pub fn full_coeffs(&self) -> Vec<f64> {
        let mut c = self.coeffs.clone();
        c.push(1.0);
        c
    }

    pub fn eval(&self, y: f64) -> f64 {
        let mut acc = 1.0;
        for &a in self.coeffs.iter().rev() {
            acc = acc * y + a;
        }
        acc
    }
}

/// Chebyshev series `Σ b_k T_k(x)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ChebyshevPoly {
    coeffs: Vec<f64>,
}

impl ChebyshevPoly {
    pub fn new(coeffs: Vec<f64>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::EmptyInput);
        }
        Ok(ChebyshevPoly { coeffs })
    }

    /// `T_n + Σ_{k<n} b_k T_k` from the `n` non-leading coefficients.
    pub fn monic(mut lower: Vec<f64>) -> Self {
        lower.push(1.0);
        ChebyshevPoly { coeffs: lower }
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn leading(&self) -> f64 {
        self.coeffs[self.coeffs.len() - 1]
    }

    pub fn is_monic(&self) -> bool {
        self.leading() == 1.0
    }

    pub fn eval(&self, x: f64) -> Result<f64> {
        clenshaw_eval(self, x)
    }
}

/// Horner evaluation of an ascending coefficient slice.
pub fn horner(coeffs: &[f64], x: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, &c| acc * x + c)
}

/// Term-by-term derivative. A constant maps to `[0]`.
pub fn derivative(p: &[f64]) -> Vec<f64> {
    if p.len() <= 1 {
        return vec![0.0];
    }
    p.iter()
        .enumerate()
        .skip(1)
        .map(|(k, &c)| k as f64 * c)
        .collect()
}

fn inf_norm(p: &[f64]) -> f64 {
    p.iter().fold(0.0, |m, c| m.max(c.abs()))
}

/// Long division `num = q * den + r` with `deg r < deg den`.
///
/// Trailing divisor coefficients with magnitude at most [`LEAD_TOL`] are
/// ignored; a divisor with nothing left is a [`Error::ZeroDivisor`]. The
/// remainder is trimmed of trailing entries below `TRIM_TOL * ‖num‖_∞`
/// and is `[0]` when nothing survives.
pub fn divmod(num: &[f64], den: &[f64]) -> Result<(Vec<f64>, Vec<f64>)> {
    let den_len = den
        .iter()
        .rposition(|c| c.abs() > LEAD_TOL)
        .map(|i| i + 1)
        .ok_or(Error::ZeroDivisor)?;
    let den = &den[..den_len];
    if num.len() < den_len {
        return Ok((vec![0.0], trim(num.to_vec(), TRIM_TOL * inf_norm(num))));
    }

    let lead = den[den_len - 1];
    let mut rem = num.to_vec();
    let qlen = num.len() - den_len + 1;
    let mut quot = vec![0.0; qlen];
    for j in (0..qlen).rev() {
        let q = rem[j + den_len - 1] / lead;
        quot[j] = q;
        for (i, &d) in den.iter().enumerate() {
            rem[j + i] -= q * d;
        }
        rem[j + den_len - 1] = 0.0;
    }
    rem.truncate(den_len - 1);
    Ok((quot, trim(rem, TRIM_TOL * inf_norm(num))))
}

fn trim(mut p: Vec<f64>, tol: f64) -> Vec<f64> {
    while p.len() > 1 && p[p.len() - 1].abs() <= tol {
        p.pop();
    }
    if p.is_empty() || (p.len() == 1 && p[0].abs() <= tol) {
        return vec![0.0];
    }
    p
}

/// Exact binomial coefficient; valid for `n <= 128`.
fn binomial(n: u32, k: u32) -> u128 {
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc
}

/// `γ_{j,k}` of `x^j = Σ_k γ_{j,k} T_k(x)` as `numerator / 2^exponent` in
/// lowest terms.
///
/// Returns `None` when the coefficient is zero (`k > j` or `j - k` odd).
pub fn gamma_rational(j: u32, k: u32) -> Option<(u128, u32)> {
    if k > j || (j - k) % 2 != 0 {
        return None;
    }
    let num = binomial(j, (j - k) / 2);
    let exp = if k == 0 { j } else { j - 1 };
    let shift = num.trailing_zeros().min(exp);
    Some((num >> shift, exp - shift))
}

/// Table of `γ_{j,k}` for `0 <= k <= j <= degree`, row `j`.
pub fn gamma_table(degree: usize) -> Vec<Vec<f64>> {
    (0..=degree as u32)
        .map(|j| {
            (0..=j)
                .map(|k| match gamma_rational(j, k) {
                    Some((num, exp)) => num as f64 / pow2(exp),
                    None => 0.0,
                })
                .collect()
        })
        .collect()
}

fn pow2(exp: u32) -> f64 {
    let mut v = 1.0;
    for _ in 0..exp {
        v *= 2.0;
    }
    v
}

/// Converts ascending monomial coefficients to the Chebyshev basis.
pub fn monomial_to_chebyshev(coeffs: &[f64]) -> ChebyshevPoly {
    if coeffs.is_empty() {
        return ChebyshevPoly { coeffs: vec![0.0] };
    }
    let gamma = gamma_table(coeffs.len() - 1);
    let mut out = vec![0.0; coeffs.len()];
    for (j, &a) in coeffs.iter().enumerate() {
        for (k, &g) in gamma[j].iter().enumerate() {
            out[k] += a * g;
        }
    }
    ChebyshevPoly { coeffs: out }
}

/// Inverse of [`monomial_to_chebyshev`], expanding `T_k` by the three-term
/// recurrence.
pub fn chebyshev_to_monomial(p: &ChebyshevPoly) -> Vec<f64> {
    let n = p.coeffs.len();
    let mut out = vec![0.0; n];
    let mut t_prev = vec![0.0; n];
    let mut t_cur = vec![0.0; n];
    t_cur[0] = 1.0;
    for (k, &b) in p.coeffs.iter().enumerate() {
        for (o, t) in out.iter_mut().zip(&t_cur) {
            *o += b * t;
        }
        if k + 1 == n {
            break;
        }
        // T_{k+1} = 2x T_k - T_{k-1}, with T_1 = x.
        let mut t_next = vec![0.0; n];
        let scale = if k == 0 { 1.0 } else { 2.0 };
        for i in 0..n - 1 {
            t_next[i + 1] = scale * t_cur[i];
        }
        if k > 0 {
            for (tn, tp) in t_next.iter_mut().zip(&t_prev) {
                *tn -= tp;
            }
        }
        t_prev = t_cur;
        t_cur = t_next;
    }
    out
}

/// Divides through by the leading coefficient so that `b_n = 1` exactly.
pub fn normalize_monic_chebyshev(p: &ChebyshevPoly) -> Result<ChebyshevPoly> {
    let lead = p.leading();
    if lead.abs() <= LEAD_TOL {
        return Err(Error::DegenerateLeading { leading: lead });
    }
    let n = p.coeffs.len();
    let mut coeffs: Vec<f64> = p.coeffs[..n - 1].iter().map(|c| c / lead).collect();
    coeffs.push(1.0);
    Ok(ChebyshevPoly { coeffs })
}

/// Backward Clenshaw recurrence for `Σ c_k T_k(x)` without a domain check.
pub fn clenshaw(coeffs: &[f64], x: f64) -> f64 {
    let n = coeffs.len();
    if n == 0 {
        return 0.0;
    }
    let two_x = 2.0 * x;
    let mut b1 = 0.0;
    let mut b2 = 0.0;
    for &c in coeffs[1..].iter().rev() {
        let b = two_x * b1 - b2 + c;
        b2 = b1;
        b1 = b;
    }
    x * b1 - b2 + coeffs[0]
}

pub fn clenshaw_eval(p: &ChebyshevPoly, x: f64) -> Result<f64> {
    if x.abs() > 1.0 + DOMAIN_TOL || x.is_nan() {
        return Err(Error::DomainViolation { x });
    }
    Ok(clenshaw(&p.coeffs, x))
}
