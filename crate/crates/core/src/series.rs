//! Truncated power series over `F_q`.

use std::fmt;

use crate::algebra::{FieldCtx, FqElem, Poly, RatFunc};
use crate::error::{Error, Result};
use crate::function_field::{FFElem, PlaneCurve};

/// Working precision used when none is given.
pub const DEFAULT_PRECISION: usize = 512;

/// A power series known modulo `x^N`, `N = coeffs.len() >= 1`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct TruncSeries {
    coeffs: Vec<FqElem>,
}

impl TruncSeries {
    pub fn new(coeffs: Vec<FqElem>) -> Result<TruncSeries> {
        if coeffs.is_empty() {
            return Err(Error::Precision { have: 0, need: 1 });
        }
        Ok(TruncSeries { coeffs })
    }

    pub fn zero(n: usize) -> TruncSeries {
        TruncSeries { coeffs: vec![FqElem::ZERO; n.max(1)] }
    }

    pub fn constant(c: FqElem, n: usize) -> TruncSeries {
        let mut s = TruncSeries::zero(n);
        s.coeffs[0] = c;
        s
    }

    /// Expansion of a polynomial, truncated to `n` terms.
    pub fn from_poly(g: &Poly, n: usize) -> TruncSeries {
        let mut s = TruncSeries::zero(n);
        for (slot, &c) in s.coeffs.iter_mut().zip(g.coeffs()) {
            *slot = c;
        }
        s
    }

    /// Expansion of `r` at `x = 0`; fails if `r` has a pole there.
    pub fn from_ratfunc(r: &RatFunc, n: usize, f: &FieldCtx) -> Result<TruncSeries> {
        let den = TruncSeries::from_poly(r.den(), n);
        let inv = den.inverse(f).ok_or(Error::PoleAtOrigin)?;
        Ok(TruncSeries::from_poly(r.num(), n).mul(&inv, f))
    }

    pub fn precision(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coeffs(&self) -> &[FqElem] {
        &self.coeffs
    }

    pub fn coeff(&self, n: usize) -> FqElem {
        self.coeffs[n]
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    /// The first `n` coefficients; `n` must not exceed the precision.
    pub fn truncate(&self, n: usize) -> TruncSeries {
        assert!(n >= 1 && n <= self.precision(), "cannot truncate to {n} terms");
        TruncSeries { coeffs: self.coeffs[..n].to_vec() }
    }

    pub fn add(&self, other: &TruncSeries, f: &FieldCtx) -> TruncSeries {
        let n = self.precision().min(other.precision());
        TruncSeries { coeffs: (0..n).map(|i| f.add(self.coeffs[i], other.coeffs[i])).collect() }
    }

    pub fn sub(&self, other: &TruncSeries, f: &FieldCtx) -> TruncSeries {
        let n = self.precision().min(other.precision());
        TruncSeries { coeffs: (0..n).map(|i| f.sub(self.coeffs[i], other.coeffs[i])).collect() }
    }

    pub fn scale(&self, c: FqElem, f: &FieldCtx) -> TruncSeries {
        TruncSeries { coeffs: self.coeffs.iter().map(|&a| f.mul(a, c)).collect() }
    }

    /// Product, known to the smaller of the two precisions.
    pub fn mul(&self, other: &TruncSeries, f: &FieldCtx) -> TruncSeries {
        let n = self.precision().min(other.precision());
        let mut out = vec![FqElem::ZERO; n];
        if f.r() == 1 {
            let p = f.p() as u64;
            let mut acc = vec![0u64; n];
            let limit = u64::MAX / 2;
            for (i, &a) in self.coeffs[..n].iter().enumerate() {
                if a.is_zero() {
                    continue;
                }
                let a = a.code() as u64;
                for (j, &b) in other.coeffs[..n - i].iter().enumerate() {
                    let slot = &mut acc[i + j];
                    *slot += a * b.code() as u64;
                    if *slot > limit {
                        *slot %= p;
                    }
                }
            }
            for (o, v) in out.iter_mut().zip(acc) {
                *o = f.elem((v % p) as u32);
            }
        } else {
            for (i, &a) in self.coeffs[..n].iter().enumerate() {
                if a.is_zero() {
                    continue;
                }
                for (j, &b) in other.coeffs[..n - i].iter().enumerate() {
                    out[i + j] = f.add(out[i + j], f.mul(a, b));
                }
            }
        }
        TruncSeries { coeffs: out }
    }

    /// Multiplicative inverse, or `None` if the constant term vanishes.
    pub fn inverse(&self, f: &FieldCtx) -> Option<TruncSeries> {
        let c0 = self.coeffs[0];
        if c0.is_zero() {
            return None;
        }
        let n = self.precision();
        let inv0 = f.inv(c0);
        let mut out = vec![FqElem::ZERO; n];
        out[0] = inv0;
        for k in 1..n {
            let mut acc = FqElem::ZERO;
            for j in 1..=k {
                let a = self.coeffs[j];
                if !a.is_zero() {
                    acc = f.add(acc, f.mul(a, out[k - j]));
                }
            }
            out[k] = f.neg(f.mul(acc, inv0));
        }
        Some(TruncSeries { coeffs: out })
    }

    /// `self^p`: coefficients raised to the `p`-th power and spread to
    /// multiples of `p`. Precision becomes `p (N - 1) + 1`.
    pub fn frobenius(&self, f: &FieldCtx) -> TruncSeries {
        let p = f.p() as usize;
        let mut out = vec![FqElem::ZERO; p * (self.precision() - 1) + 1];
        for (i, &c) in self.coeffs.iter().enumerate() {
            out[i * p] = f.frobenius(c);
        }
        TruncSeries { coeffs: out }
    }

    /// Multiplication by `x^k`; precision grows by `k`.
    pub fn shift(&self, k: usize) -> TruncSeries {
        let mut coeffs = vec![FqElem::ZERO; k];
        coeffs.extend_from_slice(&self.coeffs);
        TruncSeries { coeffs }
    }

    /// Comma-separated list of coefficient codes.
    pub fn to_csv(&self) -> String {
        self.coeffs.iter().map(|c| c.code().to_string()).collect::<Vec<_>>().join(",")
    }

    /// Parses a comma-separated list of coefficient codes.
    pub fn parse_csv(text: &str, f: &FieldCtx) -> Result<TruncSeries> {
        let mut coeffs = vec![];
        for (k, part) in text.split(',').enumerate() {
            let part = part.trim();
            let v: u64 = part.parse().map_err(|_| {
                Error::InvalidInput(format!("coefficient {k} ({part:?}) is not a non-negative integer"))
            })?;
            coeffs.push(f.try_elem(v).ok_or_else(|| {
                Error::InvalidInput(format!("coefficient {k} ({v}) is not an element code of F_{}", f.q()))
            })?);
        }
        TruncSeries::new(coeffs)
    }
}

impl fmt::Display for TruncSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_csv())
    }
}

/// Evaluates `f(x, s)` and `f_T(x, s)` as series.
fn eval_curve(curve: &PlaneCurve, s: &TruncSeries) -> (TruncSeries, TruncSeries) {
    let f = curve.field();
    let n = s.precision();
    let coeffs = curve.coeffs();
    let mut val = TruncSeries::from_poly(&coeffs[coeffs.len() - 1], n);
    let mut der = TruncSeries::zero(n);
    for c in coeffs.iter().rev().skip(1) {
        // Horner for the value and its T-derivative together
        der = der.mul(s, f).add(&val, f);
        val = val.mul(s, f).add(&TruncSeries::from_poly(c, n), f);
    }
    (val, der)
}

/// Roots `a` of `f(0, T)` in `F_q` with `f_T(0, a) != 0`, in code order.
pub fn simple_roots_at_origin(curve: &PlaneCurve) -> Vec<FqElem> {
    let f = curve.field();
    let at0: Vec<FqElem> = curve.coeffs().iter().map(|c| c.coeff(0)).collect();
    let g = Poly::from_coeffs(at0);
    let dg = g.derivative(f);
    f.elements()
        .filter(|&a| g.eval(f, a).is_zero() && !dg.eval(f, a).is_zero())
        .collect()
}

/// The root `y` of `f(x, y) = 0` in `F_q[[x]]` with `y(0) = a0`, to `n`
/// terms, by Newton iteration with doubling precision.
pub fn hensel_expand(curve: &PlaneCurve, a0: FqElem, n: usize) -> Result<TruncSeries> {
    let f = curve.field();
    let coeffs = curve.coeffs();
    let at0 = Poly::from_coeffs(coeffs.iter().map(|c| c.coeff(0)).collect());
    if !at0.eval(f, a0).is_zero() {
        return Err(Error::NotARoot(f.show(a0)));
    }
    if at0.derivative(f).eval(f, a0).is_zero() {
        return Err(Error::RamifiedBranch(f.show(a0)));
    }
    let n = n.max(1);
    let mut y = TruncSeries::constant(a0, 1);
    let mut k = 1;
    while k < n {
        k = (2 * k).min(n);
        let mut lifted = y.coeffs.clone();
        lifted.resize(k, FqElem::ZERO);
        let cur = TruncSeries { coeffs: lifted };
        let (val, der) = eval_curve(curve, &cur);
        let inv = der.inverse(f).ok_or_else(|| Error::Internal("derivative lost its unit".into()))?;
        y = cur.sub(&val.mul(&inv, f), f);
    }
    Ok(y)
}

/// Residual `f(x, s) mod x^N`; zero exactly when `s` is a branch to its
/// full precision.
pub fn curve_residual(curve: &PlaneCurve, s: &TruncSeries) -> TruncSeries {
    eval_curve(curve, s).0
}

/// The decimation `n -> a(p n + i)^(1/p)` on a truncation.
pub fn trunc_lambda(f: &FieldCtx, i: usize, s: &TruncSeries) -> Result<TruncSeries> {
    let p = f.p() as usize;
    if i >= p {
        return Err(Error::DigitOutOfRange { digit: i, base: p });
    }
    let n = s.precision();
    if n <= i {
        return Err(Error::Precision { have: n, need: i + 1 });
    }
    let coeffs = s.coeffs[i..].iter().step_by(p).map(|&c| f.pth_root(c)).collect();
    Ok(TruncSeries { coeffs })
}

/// The decimation `n -> a(q n + c)` on a truncation, with the low base-`p`
/// digit of `c` applied first.
pub fn trunc_lambda_q(f: &FieldCtx, c: usize, s: &TruncSeries) -> Result<TruncSeries> {
    let p = f.p() as usize;
    let q = f.q() as usize;
    if c >= q {
        return Err(Error::DigitOutOfRange { digit: c, base: q });
    }
    let mut out = s.clone();
    let mut rest = c;
    for _ in 0..f.r() {
        out = trunc_lambda(f, rest % p, &out)?;
        rest /= p;
    }
    Ok(out)
}

/// The series of `u = sum_b coords[b] y^b` along `branch`, to `n` terms.
///
/// Coordinates may have poles at the origin as long as they cancel in the
/// sum; the branch must then be known a few terms beyond `n`.
pub fn ff_to_series(
    curve: &PlaneCurve,
    branch: &TruncSeries,
    u: &FFElem,
    n: usize,
) -> Result<TruncSeries> {
    let f = curve.field();
    let shift = u
        .coords()
        .iter()
        .filter_map(|c| c.den().x_valuation())
        .max()
        .unwrap_or(0);
    let work = n + shift;
    if branch.precision() < work {
        return Err(Error::Precision { have: branch.precision(), need: work });
    }
    let branch = branch.truncate(work);
    let mut acc = TruncSeries::zero(work);
    let mut ypow = TruncSeries::constant(FqElem::ONE, work);
    for (b, c) in u.coords().iter().enumerate() {
        if b > 0 {
            ypow = ypow.mul(&branch, f);
        }
        if c.is_zero() {
            continue;
        }
        // x^shift * c has no pole at the origin
        let k = c.den().x_valuation().unwrap_or(0);
        let den = c.den().unshift(k);
        let num = c.num().shift(shift - k);
        let cs = TruncSeries::from_ratfunc(&RatFunc::new(num, den, f)?, work, f)?;
        acc = acc.add(&cs.mul(&ypow, f), f);
    }
    if acc.coeffs[..shift].iter().any(|c| !c.is_zero()) {
        return Err(Error::PoleAtOrigin);
    }
    Ok(TruncSeries { coeffs: acc.coeffs[shift..].to_vec() })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn poly(f: &FieldCtx, c: &[i64]) -> Poly {
        Poly::from_coeffs(c.iter().map(|&v| f.from_int(v)).collect())
    }

    fn curve(p: u32, cols: &[&[i64]]) -> PlaneCurve {
        let f = FieldCtx::prime(p).unwrap();
        let coeffs = cols.iter().map(|c| poly(&f, c)).collect();
        PlaneCurve::new(f, coeffs).unwrap()
    }

    fn codes(s: &TruncSeries) -> Vec<u32> {
        s.coeffs().iter().map(|c| c.code()).collect()
    }

    #[test]
    fn powers_of_two_branch() {
        let c = curve(7, &[&[-1], &[1, -2]]);
        let s = hensel_expand(&c, FqElem::ONE, 4).unwrap();
        assert_eq!(codes(&s), vec![1, 2, 4, 1]);
    }

    #[test]
    fn central_binomial_branch() {
        let c = curve(5, &[&[-1], &[], &[1, -4]]);
        let s = hensel_expand(&c, FqElem::ONE, 5).unwrap();
        assert_eq!(codes(&s), vec![1, 2, 1, 0, 0]);
        let three = c.field().from_int(3);
        assert_eq!(hensel_expand(&c, three, 5).unwrap_err(), Error::NotARoot("3".into()));
    }

    #[test]
    fn ramified_branch_rejected() {
        // T^2 - x over F_3: f(0, T) = T^2 has a double root
        let c = curve(3, &[&[0, -1], &[], &[1]]);
        assert!(matches!(hensel_expand(&c, FqElem::ZERO, 8), Err(Error::RamifiedBranch(_))));
        assert!(simple_roots_at_origin(&c).is_empty());
    }

    #[test]
    fn branch_satisfies_curve() {
        let c = curve(5, &[&[-1], &[], &[1, 0, 0, -4]]);
        let s = hensel_expand(&c, FqElem::ONE, 200).unwrap();
        assert!(curve_residual(&c, &s).is_zero());
    }

    #[test]
    fn decimation_examples() {
        let f = FieldCtx::prime(2).unwrap();
        let x = TruncSeries::new(vec![FqElem::ZERO, FqElem::ONE]).unwrap();
        assert_eq!(codes(&trunc_lambda(&f, 1, &x).unwrap()), vec![1]);
        assert!(trunc_lambda(&f, 0, &x).unwrap().is_zero());
        let tm: Vec<FqElem> = (0u32..64).map(|n| f.elem(n.count_ones() % 2)).collect();
        let tm = TruncSeries::new(tm).unwrap();
        let even = trunc_lambda(&f, 0, &tm).unwrap();
        assert_eq!(even.precision(), 32);
        assert_eq!(even, tm.truncate(32));
        let one = TruncSeries::new(vec![FqElem::ONE]).unwrap();
        assert!(matches!(trunc_lambda(&f, 1, &one), Err(Error::Precision { .. })));
    }

    #[test]
    fn series_of_elements() {
        let c = curve(7, &[&[-1], &[1, -2]]);
        let f = c.field().clone();
        let branch = hensel_expand(&c, FqElem::ONE, 16).unwrap();
        assert_eq!(ff_to_series(&c, &branch, &c.y(), 16).unwrap(), branch);
        assert_eq!(codes(&ff_to_series(&c, &branch, &c.one(), 4).unwrap()), vec![1, 0, 0, 0]);
        let two_y = c.scale_fq(&c.y(), f.from_int(2));
        assert_eq!(codes(&ff_to_series(&c, &branch, &two_y, 3).unwrap()), vec![2, 4, 1]);
    }

    #[test]
    fn cancelling_poles() {
        // on y^2 = 1/(1 - 4x) over F_5, (y^2 - 1)/x = 4/(1 - 4x) is regular
        let c = curve(5, &[&[-1], &[], &[1, -4]]);
        let f = c.field().clone();
        let branch = hensel_expand(&c, FqElem::ONE, 20).unwrap();
        let inv_x = RatFunc::new(Poly::one(), Poly::x(), &f).unwrap();
        let y2 = c.mul(&c.y(), &c.y());
        let u = c.scale(&c.sub(&y2, &c.one()), &inv_x);
        let s = ff_to_series(&c, &branch, &u, 10).unwrap();
        let want = TruncSeries::from_ratfunc(
            &RatFunc::new(poly(&f, &[4]), poly(&f, &[1, -4]), &f).unwrap(),
            10,
            &f,
        )
        .unwrap();
        assert_eq!(s, want);
        let pole = c.scale(&c.one(), &inv_x);
        assert_eq!(ff_to_series(&c, &branch, &pole, 10).unwrap_err(), Error::PoleAtOrigin);
    }

    #[test]
    fn csv_roundtrip() {
        let f = FieldCtx::new(2, 2, None).unwrap();
        let s = TruncSeries::parse_csv("0, 1,2,3", &f).unwrap();
        assert_eq!(s.to_csv(), "0,1,2,3");
        assert!(TruncSeries::parse_csv("0,4", &f).is_err());
        assert!(TruncSeries::parse_csv("a", &f).is_err());
    }
}
