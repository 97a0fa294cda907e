//! Companion matrices whose eigenvalues are the roots of a polynomial, and
//! the perturbation bounds attached to each family.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::math::{fma, powf, sqrt};
use crate::poly::{chebyshev_to_monomial, derivative, horner, ChebyshevPoly, MonicPolynomial, LEAD_TOL};
use crate::spectra::{eig_sym_tridiag, SymTridiagonal, UpperHessenberg};

/// Knobs for the symmetric tridiagonal construction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SchmeisserOptions {
    /// Replace slightly negative `c_k` by zero instead of failing.
    pub clamp_negative_offdiag: bool,
    /// Largest `|c_k|` of a negative `c_k` that is still clamped.
    pub negative_tolerance: f64,
    /// Remainders with `‖r‖_∞ ≤ tol · ‖y_1‖_∞` are treated as zero.
    pub zero_remainder_tolerance: f64,
}

impl Default for SchmeisserOptions {
    fn default() -> Self {
        SchmeisserOptions {
            clamp_negative_offdiag: true,
            negative_tolerance: 1e-10,
            zero_remainder_tolerance: 1e-12,
        }
    }
}

impl SchmeisserOptions {
    pub fn validate(&self) -> Result<()> {
        if !(self.negative_tolerance >= 0.0) {
            return Err(Error::InvalidParameter("negative_tolerance must be >= 0"));
        }
        if !(self.zero_remainder_tolerance >= 0.0) {
            return Err(Error::InvalidParameter("zero_remainder_tolerance must be >= 0"));
        }
        Ok(())
    }
}

/// Smallest off-diagonal entry of a Schmeisser matrix. Values near zero mark
/// points where two roots meet. A 1×1 matrix has no off-diagonal and reports
/// `+∞` at index 0.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CrossingDiagnostic {
    pub min_offdiag: f64,
    pub offdiag_index: usize,
}

impl CrossingDiagnostic {
    fn of(offdiag: &[f64]) -> Self {
        let mut diag = CrossingDiagnostic { min_offdiag: f64::INFINITY, offdiag_index: 0 };
        for (i, &v) in offdiag.iter().enumerate() {
            if v < diag.min_offdiag {
                diag = CrossingDiagnostic { min_offdiag: v, offdiag_index: i };
            }
        }
        diag
    }
}

/// Frobenius companion: ones on the subdiagonal, `-a_k` down the last column.
pub fn build_frobenius(p: &MonicPolynomial) -> UpperHessenberg {
    let n = p.degree();
    let mut h = UpperHessenberg::zeros(n);
    for i in 1..n {
        h.set(i, i - 1, 1.0);
    }
    for (i, &a) in p.coeffs().iter().enumerate() {
        h.set(i, n - 1, -a);
    }
    h
}

/// Double-double number `hi + lo` with `|lo| ≤ ulp(hi) / 2`.
#[derive(Debug, Clone, Copy, PartialEq)]
struct Dd {
    hi: f64,
    lo: f64,
}

impl Dd {
    const ZERO: Dd = Dd { hi: 0.0, lo: 0.0 };
    const ONE: Dd = Dd { hi: 1.0, lo: 0.0 };

    fn from(x: f64) -> Dd {
        Dd { hi: x, lo: 0.0 }
    }

    fn two_sum(a: f64, b: f64) -> Dd {
        let s = a + b;
        let bb = s - a;
        let e = (a - (s - bb)) + (b - bb);
        Dd { hi: s, lo: e }
    }

    fn quick_two_sum(a: f64, b: f64) -> Dd {
        let s = a + b;
        Dd { hi: s, lo: b - (s - a) }
    }

    fn add(self, o: Dd) -> Dd {
        let s = Dd::two_sum(self.hi, o.hi);
        let t = Dd::two_sum(self.lo, o.lo);
        let u = Dd::quick_two_sum(s.hi, s.lo + t.hi);
        Dd::quick_two_sum(u.hi, u.lo + t.lo)
    }

    fn neg(self) -> Dd {
        Dd { hi: -self.hi, lo: -self.lo }
    }

    fn sub(self, o: Dd) -> Dd {
        self.add(o.neg())
    }

    fn mul(self, o: Dd) -> Dd {
        let p = self.hi * o.hi;
        let e = fma(self.hi, o.hi, -p);
        let e = e + (self.hi * o.lo + self.lo * o.hi);
        Dd::quick_two_sum(p, e)
    }

    fn div(self, o: Dd) -> Dd {
        let q1 = self.hi / o.hi;
        let r = self.sub(o.mul(Dd::from(q1)));
        let q2 = r.hi / o.hi;
        let r = r.sub(o.mul(Dd::from(q2)));
        let q3 = r.hi / o.hi;
        Dd::quick_two_sum(q1, q2).add(Dd::from(q3))
    }

    fn abs(self) -> f64 {
        self.hi.abs()
    }
}

/// Divides `num` by the monic `den` (ascending coefficients, `den` last entry
/// one). Returns the remainder; the quotient's constant term is written to
/// `q0`. Requires `deg num = deg den + 1` and `num` monic.
fn dd_divmod_monic(num: &[Dd], den: &[Dd]) -> (Dd, Vec<Dd>) {
    let n = num.len() - 1;
    let m = den.len() - 1;
    debug_assert_eq!(n, m + 1);
    let mut rem = num.to_vec();
    let mut q = vec![Dd::ZERO; n - m + 1];
    for k in (0..=n - m).rev() {
        let coef = rem[k + m];
        q[k] = coef;
        for j in 0..=m {
            rem[k + j] = rem[k + j].sub(coef.mul(den[j]));
        }
    }
    rem.truncate(m);
    (q[0], rem)
}

/// Builds the symmetric tridiagonal companion of a real-rooted monic
/// polynomial by the Euclidean remainder chain started at `p` and `p'/n`.
///
/// All arithmetic in the chain is carried in double-double. When a remainder
/// vanishes (a repeated root), the off-diagonal entry is set to zero and the
/// remaining block is built from the normalized last divisor.
pub fn build_schmeisser(
    p: &MonicPolynomial,
    opts: &SchmeisserOptions,
) -> Result<(SymTridiagonal, CrossingDiagnostic)> {
    opts.validate()?;
    let full: Vec<Dd> = p.full_coeffs().into_iter().map(Dd::from).collect();
    let mut diag = Vec::with_capacity(p.degree());
    let mut off = Vec::with_capacity(p.degree().saturating_sub(1));
    schmeisser_chain(full, opts, &mut diag, &mut off)?;
    let t = SymTridiagonal::new(diag, off)?;
    let crossing = CrossingDiagnostic::of(t.offdiag());
    Ok((t, crossing))
}

fn schmeisser_chain(mut y1: Vec<Dd>, opts: &SchmeisserOptions, diag: &mut Vec<f64>, off: &mut Vec<f64>) -> Result<()> {
    let n = y1.len() - 1;
    if n == 0 {
        return Ok(());
    }
    let nn = Dd::from(n as f64);
    let mut y2: Vec<Dd> = (1..=n).map(|k| y1[k].mul(Dd::from(k as f64)).div(nn)).collect();
    *y2.last_mut().expect("degree >= 1") = Dd::ONE;

    for k in 1..=n {
        let (q0, r) = dd_divmod_monic(&y1, &y2);
        diag.push(-q0.hi);
        if k == n {
            break;
        }
        let y1_norm = y1.iter().fold(0.0f64, |m, c| m.max(c.abs()));
        let r_norm = r.iter().fold(0.0f64, |m, c| m.max(c.abs()));
        let lead = *r.last().expect("remainder has degree n - k - 1 >= 0");
        if r_norm <= opts.zero_remainder_tolerance * y1_norm || lead.hi == 0.0 {
            off.push(0.0);
            return schmeisser_chain(y2, opts, diag, off);
        }
        let mut c = lead.neg();
        if c.hi < 0.0 {
            if opts.clamp_negative_offdiag && c.hi >= -opts.negative_tolerance {
                c = Dd::ZERO;
            } else {
                return Err(Error::NegativeOffdiagonal { index: k - 1, value: c.hi });
            }
        }
        off.push(sqrt(c.hi));
        let next: Vec<Dd> = r.iter().map(|&x| x.div(lead)).collect();
        y1 = core::mem::replace(&mut y2, next);
        *y2.last_mut().expect("non-empty") = Dd::ONE;
    }
    Ok(())
}

/// Colleague matrix `H - ½ e_1 cᵀ` of a monic Chebyshev series
/// `T_n + Σ_{j<n} b_j T_j`, with `c = (b_{n-1}, ..., b_1, √2 b_0)`.
pub fn build_colleague(p: &ChebyshevPoly) -> Result<UpperHessenberg> {
    if p.leading() != 1.0 {
        return Err(Error::NotMonic { leading: p.leading() });
    }
    let n = p.degree();
    if n < 2 {
        return Err(Error::DegreeTooSmall { degree: n });
    }
    let b = p.coeffs();
    let half_sqrt2 = core::f64::consts::FRAC_1_SQRT_2;
    let mut h = UpperHessenberg::zeros(n);
    for i in 0..n - 1 {
        let v = if i == n - 2 { half_sqrt2 } else { 0.5 };
        h.set(i, i + 1, v);
        h.set(i + 1, i, v);
    }
    for j in 0..n {
        let c = if j == n - 1 { core::f64::consts::SQRT_2 * b[0] } else { b[n - 1 - j] };
        h.set(0, j, h.get(0, j) - 0.5 * c);
    }
    Ok(h)
}

/// Polynomials whose derivatives can be evaluated at a point.
pub trait Differentiable {
    /// `p^{(ell)}(x)`.
    fn derivative_at(&self, ell: usize, x: f64) -> f64;
}

impl Differentiable for MonicPolynomial {
    fn derivative_at(&self, ell: usize, x: f64) -> f64 {
        let mut c = self.full_coeffs();
        for _ in 0..ell {
            c = derivative(&c);
        }
        horner(&c, x)
    }
}

impl Differentiable for ChebyshevPoly {
    fn derivative_at(&self, ell: usize, x: f64) -> f64 {
        let mut c = chebyshev_to_monomial(self);
        for _ in 0..ell {
            c = derivative(&c);
        }
        horner(&c, x)
    }
}

/// Leading-order bound `ε^{1/ℓ} |p^{(ℓ)}(r) / ℓ!|^{-1/ℓ}` on how far a root
/// of multiplicity `ℓ` moves when one coefficient changes by `ε`.
pub fn root_perturbation_bound<P: Differentiable + ?Sized>(p: &P, r: f64, ell: usize, eps: f64) -> Result<f64> {
    if ell == 0 {
        return Err(Error::InvalidParameter("multiplicity must be >= 1"));
    }
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::InvalidParameter("eps must lie in (0, 1)"));
    }
    let d = p.derivative_at(ell, r);
    if !(d.abs() > LEAD_TOL) {
        return Err(Error::DegenerateDerivative { order: ell });
    }
    let fact: f64 = (1..=ell).map(|k| k as f64).product();
    let inv = 1.0 / ell as f64;
    Ok(powf(eps, inv) * powf((d / fact).abs(), -inv))
}

/// Intervals `λ_j ± 3ε_c` guaranteed to contain the eigenvalues of every
/// symmetric tridiagonal matrix within `ε_c` of `t` entrywise.
pub fn schmeisser_eig_interval(t: &SymTridiagonal, eps_c: f64) -> Result<Vec<(f64, f64)>> {
    if !(eps_c >= 0.0) {
        return Err(Error::InvalidParameter("eps_c must be >= 0"));
    }
    let r = 3.0 * eps_c;
    Ok(eig_sym_tridiag(t)?.into_iter().map(|l| (l - r, l + r)).collect())
}

/// First-order bound on `|δb_j|` for a colleague matrix perturbed by
/// `‖δH‖₂ ≤ eps_h`, `‖δe_1‖ ≤ eps_1` and `‖δc‖ ≤ eps_c`.
pub fn colleague_backward_bound(c: &[f64], eps_h: f64, eps_1: f64, eps_c: f64, n: usize) -> f64 {
    let c_norm = sqrt(c.iter().map(|v| v * v).sum());
    let nf = n as f64;
    let sn = sqrt(nf);
    (6.0 * c_norm * eps_1 + 2.0 * sn * eps_c + (5.0 + 16.0 * sn * c_norm) * eps_h) * nf * nf
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::{monomial_to_chebyshev, normalize_monic_chebyshev};
    use crate::spectra::eig_hessenberg;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn real_sorted(h: &UpperHessenberg) -> Vec<f64> {
        let mut v: Vec<f64> = eig_hessenberg(h).unwrap().iter().map(|z| z.re).collect();
        v.sort_by(f64::total_cmp);
        v
    }

    fn random_roots(rng: &mut ChaCha8Rng) -> Vec<f64> {
        let m = rng.gen_range(1..=6);
        let mut r: Vec<f64> = (0..m).map(|_| rng.gen_range(-1.0..1.0)).collect();
        r.sort_by(f64::total_cmp);
        r
    }

    fn max_diff(a: &[f64], b: &[f64]) -> f64 {
        a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
    }

    #[test]
    fn frobenius_layout() {
        let h = build_frobenius(&MonicPolynomial::new(vec![-1.0, 0.0]).unwrap());
        assert_eq!(h.as_row_major(), &[0.0, 1.0, 1.0, 0.0]);
        let h = build_frobenius(&MonicPolynomial::new(vec![-6.0, 11.0, -6.0]).unwrap());
        assert_eq!([h.get(0, 2), h.get(1, 2), h.get(2, 2)], [6.0, -11.0, 6.0]);
        assert_eq!([h.get(1, 0), h.get(2, 1)], [1.0, 1.0]);
        let h = build_frobenius(&MonicPolynomial::new(vec![0.0; 4]).unwrap());
        assert!((0..4).all(|i| h.get(i, 3) == 0.0));
    }

    #[test]
    fn schmeisser_examples() {
        let opts = SchmeisserOptions::default();
        let (t, d) = build_schmeisser(&MonicPolynomial::new(vec![-1.0, 0.0]).unwrap(), &opts).unwrap();
        assert_eq!(t.diag(), &[0.0, 0.0]);
        assert_eq!(t.offdiag(), &[1.0]);
        assert_eq!(d, CrossingDiagnostic { min_offdiag: 1.0, offdiag_index: 0 });

        let (t, d) = build_schmeisser(&MonicPolynomial::new(vec![0.0, 0.0]).unwrap(), &opts).unwrap();
        assert_eq!(t.diag(), &[0.0, 0.0]);
        assert_eq!(t.offdiag(), &[0.0]);
        assert_eq!(d.min_offdiag, 0.0);

        let (t, _) = build_schmeisser(&MonicPolynomial::from_roots(&[1.0, 2.0, 3.0]).unwrap(), &opts).unwrap();
        assert!(max_diff(&eig_sym_tridiag(&t).unwrap(), &[1.0, 2.0, 3.0]) < 1e-10);
    }

    #[test]
    fn schmeisser_degree_one() {
        let (t, d) = build_schmeisser(&MonicPolynomial::new(vec![-0.25]).unwrap(), &SchmeisserOptions::default()).unwrap();
        assert_eq!(t.diag(), &[0.25]);
        assert_eq!(d.min_offdiag, f64::INFINITY);
    }

    #[test]
    fn schmeisser_repeated_roots_split() {
        let opts = SchmeisserOptions::default();
        for roots in [vec![0.5, 0.5, -0.3], vec![-0.2, -0.2, -0.2], vec![0.1, 0.1, 0.7, 0.7]] {
            let p = MonicPolynomial::from_roots(&roots).unwrap();
            let (t, d) = build_schmeisser(&p, &opts).unwrap();
            assert!(d.min_offdiag < 1e-6, "{roots:?}: {d:?}");
            let mut want = roots.clone();
            want.sort_by(f64::total_cmp);
            assert!(max_diff(&eig_sym_tridiag(&t).unwrap(), &want) < 1e-6, "{roots:?}");
        }
    }

    #[test]
    fn schmeisser_complex_roots_rejected() {
        // y^2 + 1 has c_1 = -1.
        let p = MonicPolynomial::new(vec![1.0, 0.0]).unwrap();
        let err = build_schmeisser(&p, &SchmeisserOptions::default()).unwrap_err();
        assert!(matches!(err, Error::NegativeOffdiagonal { index: 0, .. }));

        // y^2 + 1e-12 is within the clamp tolerance.
        let p = MonicPolynomial::new(vec![1e-12, 0.0]).unwrap();
        let (t, _) = build_schmeisser(&p, &SchmeisserOptions { zero_remainder_tolerance: 0.0, ..Default::default() }).unwrap();
        assert_eq!(t.offdiag(), &[0.0]);
        let strict = SchmeisserOptions { clamp_negative_offdiag: false, zero_remainder_tolerance: 0.0, ..Default::default() };
        assert!(build_schmeisser(&p, &strict).is_err());
    }

    #[test]
    fn options_validation() {
        let bad = SchmeisserOptions { negative_tolerance: -1.0, ..Default::default() };
        assert!(build_schmeisser(&MonicPolynomial::new(vec![0.0]).unwrap(), &bad).is_err());
    }

    #[test]
    fn colleague_examples() {
        let h = build_colleague(&ChebyshevPoly::monic(vec![-1.0, 0.0])).unwrap();
        let s2 = core::f64::consts::SQRT_2;
        assert_eq!(h.as_row_major(), &[0.0, s2, s2 / 2.0, 0.0]);
        assert!(max_diff(&real_sorted(&h), &[-1.0, 1.0]) < 1e-14);

        let h = build_colleague(&ChebyshevPoly::monic(vec![0.0, 0.0])).unwrap();
        assert!(max_diff(&real_sorted(&h), &[-s2 / 2.0, s2 / 2.0]) < 1e-14);

        let h = build_colleague(&ChebyshevPoly::monic(vec![0.0; 3])).unwrap();
        let r3 = sqrt(3.0) / 2.0;
        assert!(max_diff(&real_sorted(&h), &[-r3, 0.0, r3]) < 1e-14);
    }

    #[test]
    fn colleague_rejects_bad_input() {
        let p = ChebyshevPoly::new(vec![0.0, 0.0, 2.0]).unwrap();
        assert!(matches!(build_colleague(&p), Err(Error::NotMonic { .. })));
        assert!(matches!(build_colleague(&ChebyshevPoly::monic(vec![0.3])), Err(Error::DegreeTooSmall { degree: 1 })));
    }

    #[test]
    fn all_companions_recover_random_roots() {
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        let opts = SchmeisserOptions::default();
        for _ in 0..500 {
            let roots = random_roots(&mut rng);
            let p = MonicPolynomial::from_roots(&roots).unwrap();
            assert!(max_diff(&real_sorted(&build_frobenius(&p)), &roots) < 1e-7, "frobenius {roots:?}");

            let (t, _) = build_schmeisser(&p, &opts).unwrap();
            assert!(max_diff(&eig_sym_tridiag(&t).unwrap(), &roots) < 1e-8, "schmeisser {roots:?}");

            if roots.len() >= 2 {
                let c = normalize_monic_chebyshev(&monomial_to_chebyshev(&p.full_coeffs())).unwrap();
                let h = build_colleague(&c).unwrap();
                assert!(max_diff(&real_sorted(&h), &roots) < 1e-9, "colleague {roots:?}");
            }
        }
    }

    #[test]
    fn crossing_indicator() {
        let opts = SchmeisserOptions::default();
        let p = MonicPolynomial::from_roots(&[-0.4, 0.3, 0.3]).unwrap();
        assert_eq!(build_schmeisser(&p, &opts).unwrap().1.min_offdiag, 0.0);
        let p = MonicPolynomial::from_roots(&[-0.8, -0.4, 0.1, 0.6]).unwrap();
        assert!(build_schmeisser(&p, &opts).unwrap().1.min_offdiag > 0.0);
    }

    #[test]
    fn perturbation_bound_examples() {
        let y2 = MonicPolynomial::new(vec![0.0, 0.0]).unwrap();
        let eps = 1e-6;
        assert!((root_perturbation_bound(&y2, 0.0, 2, eps).unwrap() - sqrt(eps)).abs() < 1e-18);
        let y = MonicPolynomial::new(vec![0.0]).unwrap();
        assert!((root_perturbation_bound(&y, 0.0, 1, eps).unwrap() - eps).abs() < 1e-20);
        let sq = MonicPolynomial::from_roots(&[1.0, 1.0]).unwrap();
        assert!((root_perturbation_bound(&sq, 1.0, 2, 1e-4).unwrap() - 1e-2).abs() < 1e-15);
        assert!(matches!(root_perturbation_bound(&sq, 1.0, 1, 1e-4), Err(Error::DegenerateDerivative { order: 1 })));

        // T_2 = 2x^2 - 1 has a simple root at 1/√2 with p' = 4/√2.
        let t2 = ChebyshevPoly::new(vec![0.0, 0.0, 1.0]).unwrap();
        let r = core::f64::consts::FRAC_1_SQRT_2;
        let b = root_perturbation_bound(&t2, r, 1, 1e-3).unwrap();
        assert!((b - 1e-3 / (4.0 * r)).abs() < 1e-15);
    }

    #[test]
    fn perturbation_bound_holds_for_double_root() {
        // y^2 + ε has roots ±i√ε: shift equals the bound.
        for eps in [1e-2, 1e-6, 1e-10] {
            let p = MonicPolynomial::new(vec![eps, 0.0]).unwrap();
            let h = build_frobenius(&p);
            let shift = eig_hessenberg(&h).unwrap().iter().map(|z| z.norm()).fold(0.0, f64::max);
            let bound = root_perturbation_bound(&MonicPolynomial::new(vec![0.0, 0.0]).unwrap(), 0.0, 2, eps).unwrap();
            assert!(shift <= bound * (1.0 + 1e-8));
        }
    }

    #[test]
    fn interval_examples() {
        let t = SymTridiagonal::new(vec![0.0, 0.0], vec![1.0]).unwrap();
        let iv = schmeisser_eig_interval(&t, 0.01).unwrap();
        assert!((iv[0].0 + 1.03).abs() < 1e-15 && (iv[0].1 + 0.97).abs() < 1e-15);
        assert!((iv[1].0 - 0.97).abs() < 1e-15 && (iv[1].1 - 1.03).abs() < 1e-15);
        let iv = schmeisser_eig_interval(&t, 0.0).unwrap();
        assert!(iv.iter().all(|(a, b)| a == b));
    }

    #[test]
    fn interval_containment() {
        let mut rng = ChaCha8Rng::seed_from_u64(43);
        for trial in 0..1000 {
            let eps_c = [1e-8, 1e-4, 1e-2][trial % 3];
            let n = rng.gen_range(2..=6);
            let d: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let e: Vec<f64> = (0..n - 1).map(|_| rng.gen_range(0.0..1.0)).collect();
            let t = SymTridiagonal::new(d.clone(), e.clone()).unwrap();
            let iv = schmeisser_eig_interval(&t, eps_c).unwrap();
            let dp: Vec<f64> = d.iter().map(|v| v + rng.gen_range(-eps_c..=eps_c)).collect();
            let ep: Vec<f64> = e.iter().map(|v| v + rng.gen_range(-eps_c..=eps_c)).collect();
            let pert = eig_sym_tridiag(&SymTridiagonal::new(dp, ep).unwrap()).unwrap();
            for (l, (lo, hi)) in pert.iter().zip(&iv) {
                assert!(*lo <= *l && *l <= *hi, "trial {trial}: {l} not in [{lo}, {hi}]");
            }
        }
    }

    #[test]
    fn backward_bound_examples() {
        assert_eq!(colleague_backward_bound(&[1.0, 2.0], 0.0, 0.0, 0.0, 3), 0.0);
        let n = 4usize;
        let eps_c = 1e-6;
        let b = colleague_backward_bound(&[3.0, 4.0], 0.0, 0.0, eps_c, n);
        assert!((b - 2.0 * powf(n as f64, 2.5) * eps_c).abs() < 1e-18);
        let b = colleague_backward_bound(&[1.0], 1e-16, 0.0, 0.0, 2);
        assert!((b - 4.0 * (5.0 + 16.0 * sqrt(2.0)) * 1e-16).abs() < 1e-28);
    }
}
