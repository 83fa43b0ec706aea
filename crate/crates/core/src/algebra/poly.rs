//! Dense univariate polynomials over `F_q`.
//!
//! The coefficient vector never has trailing zeros, so the zero polynomial is
//! the empty vector and its degree is `None`.

use std::fmt::Write as _;

use super::field::{FieldCtx, FqElem};

#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Poly {
    coeffs: Vec<FqElem>,
}

impl Poly {
    pub fn zero() -> Poly {
        Poly { coeffs: vec![] }
    }

    pub fn one() -> Poly {
        Poly { coeffs: vec![FqElem::ONE] }
    }

    pub fn constant(c: FqElem) -> Poly {
        Poly::from_coeffs(vec![c])
    }

    /// `c * x^k`.
    pub fn monomial(c: FqElem, k: usize) -> Poly {
        if c.is_zero() {
            return Poly::zero();
        }
        let mut coeffs = vec![FqElem::ZERO; k + 1];
        coeffs[k] = c;
        Poly { coeffs }
    }

    pub fn x() -> Poly {
        Poly::monomial(FqElem::ONE, 1)
    }

    pub fn from_coeffs(mut coeffs: Vec<FqElem>) -> Poly {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    pub fn coeffs(&self) -> &[FqElem] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<FqElem> {
        self.coeffs
    }

    /// Coefficient of `x^i`, zero beyond the degree.
    pub fn coeff(&self, i: usize) -> FqElem {
        self.coeffs.get(i).copied().unwrap_or(FqElem::ZERO)
    }

    /// Degree, with `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.coeffs.len() == 1 && self.coeffs[0] == FqElem::ONE
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.len() <= 1
    }

    /// Leading coefficient (zero for the zero polynomial).
    pub fn lc(&self) -> FqElem {
        self.coeffs.last().copied().unwrap_or(FqElem::ZERO)
    }

    /// Largest `k` with `x^k | self`; `None` for zero.
    pub fn x_valuation(&self) -> Option<usize> {
        self.coeffs.iter().position(|c| !c.is_zero())
    }

    pub fn eval(&self, f: &FieldCtx, at: FqElem) -> FqElem {
        self.coeffs
            .iter()
            .rev()
            .fold(FqElem::ZERO, |acc, &c| f.add(f.mul(acc, at), c))
    }

    pub fn add(&self, other: &Poly, f: &FieldCtx) -> Poly {
        let n = self.coeffs.len().max(other.coeffs.len());
        Poly::from_coeffs((0..n).map(|i| f.add(self.coeff(i), other.coeff(i))).collect())
    }

    pub fn sub(&self, other: &Poly, f: &FieldCtx) -> Poly {
        let n = self.coeffs.len().max(other.coeffs.len());
        Poly::from_coeffs((0..n).map(|i| f.sub(self.coeff(i), other.coeff(i))).collect())
    }

    pub fn neg(&self, f: &FieldCtx) -> Poly {
        Poly { coeffs: self.coeffs.iter().map(|&c| f.neg(c)).collect() }
    }

    pub fn scale(&self, c: FqElem, f: &FieldCtx) -> Poly {
        if c.is_zero() {
            return Poly::zero();
        }
        Poly { coeffs: self.coeffs.iter().map(|&a| f.mul(a, c)).collect() }
    }

    /// Multiplication by `x^k`.
    pub fn shift(&self, k: usize) -> Poly {
        if self.is_zero() {
            return Poly::zero();
        }
        let mut coeffs = vec![FqElem::ZERO; k];
        coeffs.extend_from_slice(&self.coeffs);
        Poly { coeffs }
    }

    /// Division by `x^k`, discarding the low terms.
    pub fn unshift(&self, k: usize) -> Poly {
        Poly::from_coeffs(self.coeffs.iter().skip(k).copied().collect())
    }

    pub fn mul(&self, other: &Poly, f: &FieldCtx) -> Poly {
        if self.is_zero() || other.is_zero() {
            return Poly::zero();
        }
        if self.coeffs.len() == 1 {
            return other.scale(self.coeffs[0], f);
        }
        if other.coeffs.len() == 1 {
            return self.scale(other.coeffs[0], f);
        }
        let mut out = vec![FqElem::ZERO; self.coeffs.len() + other.coeffs.len() - 1];
        if f.r() == 1 {
            // accumulate in u64 and reduce once per output slot
            let p = f.p() as u64;
            let mut acc = vec![0u64; out.len()];
            let limit = u64::MAX / 2;
            for (i, &a) in self.coeffs.iter().enumerate() {
                if a.is_zero() {
                    continue;
                }
                let a = a.code() as u64;
                for (j, &b) in other.coeffs.iter().enumerate() {
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
            return Poly::from_coeffs(out);
        }
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, &b) in other.coeffs.iter().enumerate() {
                out[i + j] = f.add(out[i + j], f.mul(a, b));
            }
        }
        Poly::from_coeffs(out)
    }

    pub fn pow(&self, mut e: u64, f: &FieldCtx) -> Poly {
        let mut base = self.clone();
        let mut acc = Poly::one();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base, f);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base, f);
            }
        }
        acc
    }

    /// Quotient and remainder. Panics on division by zero.
    pub fn divrem(&self, divisor: &Poly, f: &FieldCtx) -> (Poly, Poly) {
        let dd = divisor.degree().expect("polynomial division by zero");
        let Some(ds) = self.degree() else {
            return (Poly::zero(), Poly::zero());
        };
        if ds < dd {
            return (Poly::zero(), self.clone());
        }
        let lc_inv = f.inv(divisor.lc());
        let mut rem = self.coeffs.clone();
        let mut quot = vec![FqElem::ZERO; ds - dd + 1];
        for k in (0..=ds - dd).rev() {
            let c = f.mul(rem[k + dd], lc_inv);
            if c.is_zero() {
                continue;
            }
            quot[k] = c;
            for (i, &di) in divisor.coeffs.iter().enumerate() {
                rem[k + i] = f.sub(rem[k + i], f.mul(c, di));
            }
        }
        rem.truncate(dd);
        (Poly::from_coeffs(quot), Poly::from_coeffs(rem))
    }

    pub fn rem(&self, divisor: &Poly, f: &FieldCtx) -> Poly {
        self.divrem(divisor, f).1
    }

    /// Exact quotient; `None` if the division leaves a remainder.
    pub fn exact_div(&self, divisor: &Poly, f: &FieldCtx) -> Option<Poly> {
        let (q, r) = self.divrem(divisor, f);
        r.is_zero().then_some(q)
    }

    pub fn monic(&self, f: &FieldCtx) -> Poly {
        if self.is_zero() {
            return Poly::zero();
        }
        self.scale(f.inv(self.lc()), f)
    }

    /// Monic gcd (zero if both inputs are zero).
    pub fn gcd(&self, other: &Poly, f: &FieldCtx) -> Poly {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let r = a.rem(&b, f);
            a = b;
            b = r;
        }
        a.monic(f)
    }

    pub fn derivative(&self, f: &FieldCtx) -> Poly {
        Poly::from_coeffs(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, &c)| f.mul(c, f.from_int((i % f.p() as usize) as i64)))
                .collect(),
        )
    }

    /// Splits `self = sum_a x^a * parts[a](x^p)` for `a in 0..p`.
    pub fn split_residues(&self, p: usize) -> Vec<Poly> {
        (0..p)
            .map(|a| Poly::from_coeffs(self.coeffs.iter().skip(a).step_by(p).copied().collect()))
            .collect()
    }

    /// Applies `c -> c^(1/p)` to every coefficient.
    pub fn coeff_pth_root(&self, f: &FieldCtx) -> Poly {
        Poly { coeffs: self.coeffs.iter().map(|&c| f.pth_root(c)).collect() }
    }

    /// Applies `c -> c^p` to every coefficient.
    pub fn coeff_frobenius(&self, f: &FieldCtx) -> Poly {
        Poly { coeffs: self.coeffs.iter().map(|&c| f.frobenius(c)).collect() }
    }

    /// `g(x) -> g(x^k)`.
    pub fn inflate(&self, k: usize) -> Poly {
        if self.is_zero() {
            return Poly::zero();
        }
        let mut coeffs = vec![FqElem::ZERO; (self.coeffs.len() - 1) * k + 1];
        for (i, &c) in self.coeffs.iter().enumerate() {
            coeffs[i * k] = c;
        }
        Poly { coeffs }
    }

    /// `g(x^k) -> g(x)`, or `None` if some exponent is not a multiple of `k`.
    pub fn deflate(&self, k: usize) -> Option<Poly> {
        let mut out = vec![];
        for (i, &c) in self.coeffs.iter().enumerate() {
            if i % k == 0 {
                out.push(c);
            } else if !c.is_zero() {
                return None;
            }
        }
        Some(Poly::from_coeffs(out))
    }

    /// `self^e mod m`.
    pub fn powmod(&self, mut e: u64, m: &Poly, f: &FieldCtx) -> Poly {
        let mut base = self.rem(m, f);
        let mut acc = Poly::one().rem(m, f);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base, f).rem(m, f);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base, f).rem(m, f);
            }
        }
        acc
    }

    /// True when `x` generates the unit group of `F_q[x]/(self)`, i.e. `self`
    /// is irreducible and its roots have multiplicative order `q^deg - 1`.
    ///
    /// A reducible modulus has fewer than `q^deg - 1` units, so the order
    /// test alone certifies irreducibility.
    pub fn is_primitive(&self, f: &FieldCtx) -> bool {
        let Some(deg) = self.degree() else { return false };
        if deg == 0 || self.coeff(0).is_zero() {
            return false;
        }
        let Some(order) = (f.q() as u64).checked_pow(deg as u32).map(|v| v - 1) else {
            return false;
        };
        let x = Poly::x();
        if !x.powmod(order, self, f).is_one() {
            return false;
        }
        super::field::prime_factors(order)
            .into_iter()
            .all(|l| !x.powmod(order / l, self, f).is_one())
    }

    /// The smallest monic primitive polynomial of degree `deg`, ordered by
    /// coefficient codes from the top down.
    pub fn primitive(deg: usize, f: &FieldCtx) -> Option<Poly> {
        if deg == 0 {
            return None;
        }
        let q = f.q() as u64;
        let count = q.checked_pow(deg as u32)?;
        (0..count).find_map(|mut code| {
            let mut coeffs = Vec::with_capacity(deg + 1);
            for _ in 0..deg {
                coeffs.push(f.elem((code % q) as u32));
                code /= q;
            }
            coeffs.push(FqElem::ONE);
            let cand = Poly::from_coeffs(coeffs);
            cand.is_primitive(f).then_some(cand)
        })
    }

    /// Renders the polynomial in variable `var`, highest degree first.
    pub fn show(&self, f: &FieldCtx, var: &str) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let mut s = String::new();
        for (i, &c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            if !s.is_empty() {
                s.push_str(" + ");
            }
            let cs = f.show(c);
            let cs = if cs.contains(' ') { format!("({cs})") } else { cs };
            match (i, c == FqElem::ONE) {
                (0, _) => s.push_str(&cs),
                (1, true) => s.push_str(var),
                (1, false) => {
                    let _ = write!(s, "{cs}*{var}");
                }
                (_, true) => {
                    let _ = write!(s, "{var}^{i}");
                }
                (_, false) => {
                    let _ = write!(s, "{cs}*{var}^{i}");
                }
            }
        }
        s
    }
}
