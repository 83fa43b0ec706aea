//! Rational power series over `Q`: reduction modulo primes, state counts per
//! prime, and the criterion deciding whether those counts stay bounded.
//!
//! Only the base field `Q` is supported.

use std::fmt::Write as _;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::algebra::field::is_prime;
use crate::algebra::{FieldCtx, Poly};
use crate::error::{Error, Result};
use crate::function_field::PlaneCurve;
use crate::kernel::enumerate_kernel;
use crate::series::hensel_expand;

/// Polynomial over `Q`, low degree first, no trailing zeros.
type QPoly = Vec<BigRational>;

fn q_trim(mut v: QPoly) -> QPoly {
    while v.last().is_some_and(Zero::is_zero) {
        v.pop();
    }
    v
}

fn q_divrem(a: &[BigRational], b: &[BigRational]) -> (QPoly, QPoly) {
    let mut rem = a.to_vec();
    let db = b.len() - 1;
    if rem.len() < b.len() {
        return (vec![], q_trim(rem));
    }
    let mut quot = vec![BigRational::zero(); rem.len() - db];
    for k in (0..quot.len()).rev() {
        let c = &rem[k + db] / &b[db];
        if c.is_zero() {
            continue;
        }
        for (i, bi) in b.iter().enumerate() {
            rem[k + i] = &rem[k + i] - &c * bi;
        }
        quot[k] = c;
    }
    rem.truncate(db);
    (q_trim(quot), q_trim(rem))
}

fn q_gcd(a: QPoly, b: QPoly) -> QPoly {
    let (mut a, mut b) = (q_trim(a), q_trim(b));
    while !b.is_empty() {
        let r = q_divrem(&a, &b).1;
        a = b;
        b = r;
    }
    a
}

fn q_mulmod(a: &[BigRational], b: &[BigRational], m: &[BigRational]) -> QPoly {
    if a.is_empty() || b.is_empty() {
        return vec![];
    }
    let mut out = vec![BigRational::zero(); a.len() + b.len() - 1];
    for (i, u) in a.iter().enumerate() {
        for (j, v) in b.iter().enumerate() {
            out[i + j] += u * v;
        }
    }
    q_divrem(&q_trim(out), m).1
}

fn to_q(v: &[BigInt]) -> QPoly {
    q_trim(v.iter().map(|c| BigRational::from_integer(c.clone())).collect())
}

/// Euler's totient.
fn totient(mut n: u64) -> u64 {
    let mut out = n;
    let mut p = 2;
    while p * p <= n {
        if n.is_multiple_of(p) {
            while n.is_multiple_of(p) {
                n /= p;
            }
            out -= out / p;
        }
        p += 1;
    }
    if n > 1 {
        out -= out / n;
    }
    out
}

/// `num / den` with integer coefficients (low degree first), `den(0) != 0`
/// and no common factor.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RationalSeriesQ {
    num: Vec<BigInt>,
    den: Vec<BigInt>,
}

impl RationalSeriesQ {
    /// Cancels any common factor and normalizes to integer coefficients with
    /// joint content 1.
    pub fn new(num: Vec<BigInt>, den: Vec<BigInt>) -> Result<RationalSeriesQ> {
        let (nq, dq) = (to_q(&num), to_q(&den));
        if dq.is_empty() {
            return Err(Error::ZeroDenominator);
        }
        if dq[0].is_zero() {
            return Err(Error::PoleAtOrigin);
        }
        let g = q_gcd(nq.clone(), dq.clone());
        let (nq, dq) = if g.len() > 1 { (q_divrem(&nq, &g).0, q_divrem(&dq, &g).0) } else { (nq, dq) };
        // clear denominators jointly, then remove the joint content
        let l = nq
            .iter()
            .chain(&dq)
            .fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
        let scale = |v: &QPoly| -> Vec<BigInt> {
            v.iter().map(|c| (c * BigRational::from_integer(l.clone())).to_integer()).collect()
        };
        let (mut num, mut den) = (scale(&nq), scale(&dq));
        let content = num.iter().chain(&den).fold(BigInt::zero(), |acc, c| acc.gcd(c));
        if !content.is_zero() && !content.is_one() {
            num.iter_mut().for_each(|c| *c /= &content);
            den.iter_mut().for_each(|c| *c /= &content);
        }
        if den[0].is_negative() {
            num.iter_mut().for_each(|c| *c = -c.clone());
            den.iter_mut().for_each(|c| *c = -c.clone());
        }
        Ok(RationalSeriesQ { num, den })
    }

    pub fn num(&self) -> &[BigInt] {
        &self.num
    }

    pub fn den(&self) -> &[BigInt] {
        &self.den
    }

    /// The first `n` coefficients over `Q`.
    pub fn expand(&self, n: usize) -> Vec<BigRational> {
        let d0 = BigRational::from_integer(self.den[0].clone());
        let mut out: Vec<BigRational> = Vec::with_capacity(n);
        for k in 0..n {
            let mut acc = self.num.get(k).map_or_else(BigRational::zero, |c| BigRational::from_integer(c.clone()));
            for (j, dj) in self.den.iter().enumerate().skip(1).take(k) {
                acc -= BigRational::from_integer(dj.clone()) * &out[k - j];
            }
            out.push(acc / &d0);
        }
        out
    }

    /// Reduction modulo `p`, as `(num, den)` over `F_p`.
    pub fn reduce(&self, f: &FieldCtx) -> (Poly, Poly) {
        let p = BigInt::from(f.p());
        let red = |v: &[BigInt]| {
            Poly::from_coeffs(
                v.iter()
                    .map(|c| f.from_int(c.mod_floor(&p).to_i64().expect("residue fits")))
                    .collect(),
            )
        };
        (red(&self.num), red(&self.den))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Boundedness {
    Bounded,
    Unbounded,
}

/// Decides whether the per-prime state counts stay bounded: exactly when
/// all poles are simple and at roots of unity, ignoring a pole at infinity.
///
/// A root of unity of algebraic degree at most `D = deg den` has an order
/// `m` with `phi(m) <= D`, so the test is that `den` is squarefree and
/// divides `x^L - 1` for `L = lcm { m : phi(m) <= D }`.
pub fn classify_bounded(y: &RationalSeriesQ) -> Boundedness {
    let den = to_q(&y.den);
    let deg = den.len() - 1;
    if deg == 0 {
        return Boundedness::Bounded;
    }
    let dden: QPoly = q_trim(
        den.iter()
            .enumerate()
            .skip(1)
            .map(|(i, c)| c * BigRational::from_integer(BigInt::from(i)))
            .collect(),
    );
    if q_gcd(den.clone(), dden).len() > 1 {
        return Boundedness::Unbounded;
    }
    // phi(m) >= sqrt(m / 2), so every m with phi(m) <= D is at most 2 D^2
    let bound = 2 * (deg as u64).pow(2) + 6;
    let l = (1..=bound)
        .filter(|&m| totient(m) <= deg as u64)
        .fold(BigInt::one(), |acc, m| acc.lcm(&BigInt::from(m)));
    // x^L mod den by square and multiply
    let x: QPoly = q_divrem(&[BigRational::zero(), BigRational::one()], &den).1;
    let mut acc: QPoly = q_divrem(&[BigRational::one()], &den).1;
    let bits = l.to_str_radix(2);
    for bit in bits.chars() {
        acc = q_mulmod(&acc, &acc, &den);
        if bit == '1' {
            acc = q_mulmod(&acc, &x, &den);
        }
    }
    if acc == q_divrem(&[BigRational::one()], &den).1 {
        Boundedness::Bounded
    } else {
        Boundedness::Unbounded
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SweepRow {
    pub p: u64,
    pub n_p: Option<usize>,
    pub skipped: Option<String>,
}

/// Why `p` cannot be used, if it cannot.
fn skip_reason(y: &RationalSeriesQ, p: u64) -> Option<String> {
    if !is_prime(p) {
        return Some("not prime".into());
    }
    if p > u32::MAX as u64 {
        return Some("prime too large".into());
    }
    let pb = BigInt::from(p);
    if y.den[0].is_multiple_of(&pb) {
        return Some("p divides den(0)".into());
    }
    if y.den.last().expect("nonempty").is_multiple_of(&pb) {
        return Some("p divides the leading coefficient of den".into());
    }
    None
}

/// State count of the reduction of `y` modulo each admissible prime.
pub fn prime_sweep(y: &RationalSeriesQ, primes: &[u64], max_states: usize) -> Result<Vec<SweepRow>> {
    let mut rows = vec![];
    for &p in primes {
        if let Some(reason) = skip_reason(y, p) {
            rows.push(SweepRow { p, n_p: None, skipped: Some(reason) });
            continue;
        }
        let f = FieldCtx::prime(p as u32)?;
        let (num, den) = y.reduce(&f);
        let a0 = f.div(num.coeff(0), den.coeff(0));
        let curve = PlaneCurve::new(f.clone(), vec![num.neg(&f), den])?;
        let branch = hensel_expand(&curve, a0, 4)?;
        let kernel = enumerate_kernel(&curve, &curve.y(), &branch, max_states)?;
        rows.push(SweepRow { p, n_p: Some(kernel.len()), skipped: None });
    }
    if rows.iter().all(|r| r.n_p.is_none()) {
        return Err(Error::InvalidInput("no admissible prime in the sweep".into()));
    }
    Ok(rows)
}

/// Text table `p | N_p | skipped-reason`.
pub fn sweep_table(rows: &[SweepRow]) -> String {
    let mut s = String::from("rational series over Q (no other number fields)\n");
    let _ = writeln!(s, "{:>5} | {:>6} | skipped-reason", "p", "N_p");
    for r in rows {
        let n = r.n_p.map_or("-".to_string(), |n| n.to_string());
        let _ = writeln!(s, "{:>5} | {:>6} | {}", r.p, n, r.skipped.as_deref().unwrap_or(""));
    }
    s
}
