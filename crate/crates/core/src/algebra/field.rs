//! Finite fields `F_q = F_p[t]/(m(t))`.
//!
//! Elements are stored packed: the coefficient vector `(c_0, .., c_{r-1})` of
//! the residue representative is encoded as the integer `sum c_i p^i`. Prime
//! field elements are therefore their own codes. For `r > 1` multiplication
//! goes through discrete log tables built once per context.

use std::fmt;

use crate::error::{Error, Result};

/// Largest extension field order for which log tables are built.
const MAX_TABLE_ORDER: u64 = 1 << 20;

/// An element of `F_q`, packed as described in the module docs.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FqElem(u32);

impl FqElem {
    pub const ZERO: FqElem = FqElem(0);
    pub const ONE: FqElem = FqElem(1);

    /// The packed integer code.
    pub fn code(self) -> u32 {
        self.0
    }

    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

impl fmt::Display for FqElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// The field `F_q`, `q = p^r`.
#[derive(Clone, Debug)]
pub struct FieldCtx {
    p: u32,
    r: u32,
    q: u32,
    /// Monic modulus, low to high, length `r + 1`. Absent for prime fields.
    modulus: Option<Vec<u32>>,
    exp: Vec<u32>,
    log: Vec<u32>,
}

impl PartialEq for FieldCtx {
    fn eq(&self, other: &Self) -> bool {
        self.p == other.p && self.r == other.r && self.modulus == other.modulus
    }
}

impl Eq for FieldCtx {}

pub(crate) fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

impl FieldCtx {
    /// Builds `F_{p^r}`.
    ///
    /// When `modulus` is absent and `r > 1`, the smallest monic irreducible of
    /// degree `r` is used, ordering candidates by their packed code (so the
    /// coefficient of `t^(r-1)` is most significant).
    pub fn new(p: u32, r: u32, modulus: Option<&[u32]>) -> Result<FieldCtx> {
        if !is_prime(p as u64) || p >= (1 << 31) {
            return Err(Error::NotPrime(p as u64));
        }
        if r == 0 {
            return Err(Error::InvalidModulus("extension degree must be positive".into()));
        }
        let q64 = (p as u64).checked_pow(r).unwrap_or(u64::MAX);
        if r > 1 && q64 > MAX_TABLE_ORDER {
            return Err(Error::FieldTooLarge { p, r });
        }
        if r == 1 {
            if let Some(m) = modulus {
                let m = fp::trim(m.iter().map(|&c| c as u64 % p as u64).collect());
                if m.len() != 2 {
                    return Err(Error::InvalidModulus(format!(
                        "expected degree 1, got degree {}",
                        m.len() as i64 - 1
                    )));
                }
            }
            return Ok(FieldCtx { p, r, q: p, modulus: None, exp: vec![], log: vec![] });
        }
        let pp = p as u64;
        let m = match modulus {
            Some(m) => {
                let m = fp::trim(m.iter().map(|&c| c as u64 % pp).collect());
                if m.len() != r as usize + 1 {
                    return Err(Error::InvalidModulus(format!(
                        "expected degree {r}, got degree {}",
                        m.len() as i64 - 1
                    )));
                }
                let m = fp::monic(&m, pp);
                if !fp::is_irreducible(&m, pp) {
                    return Err(Error::InvalidModulus(format!(
                        "{} is reducible over F_{p}",
                        fp::show(&m)
                    )));
                }
                m
            }
            None => (0..pp.pow(r))
                .map(|code| {
                    let mut m = fp::digits(code, pp, r as usize);
                    m.push(1);
                    m
                })
                .find(|m| fp::is_irreducible(m, pp))
                .ok_or_else(|| Error::Internal("no irreducible polynomial found".into()))?,
        };
        let mut ctx = FieldCtx {
            p,
            r,
            q: q64 as u32,
            modulus: Some(m.iter().map(|&c| c as u32).collect()),
            exp: vec![],
            log: vec![],
        };
        ctx.build_tables();
        Ok(ctx)
    }

    pub fn prime(p: u32) -> Result<FieldCtx> {
        FieldCtx::new(p, 1, None)
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn r(&self) -> u32 {
        self.r
    }

    pub fn q(&self) -> u32 {
        self.q
    }

    pub fn modulus(&self) -> Option<&[u32]> {
        self.modulus.as_deref()
    }

    fn build_tables(&mut self) {
        let q = self.q as u64;
        let order = q - 1;
        let primes = prime_factors(order);
        let g = (2..q)
            .find(|&g| {
                primes.iter().all(|&l| self.slow_pow(g as u32, order / l) != 1)
            })
            .unwrap_or(1) as u32;
        let mut exp = vec![0u32; order as usize];
        let mut log = vec![0u32; q as usize];
        let mut cur = 1u32;
        for (k, slot) in exp.iter_mut().enumerate() {
            *slot = cur;
            log[cur as usize] = k as u32;
            cur = self.slow_mul(cur, g);
        }
        self.exp = exp;
        self.log = log;
    }

    fn slow_mul(&self, a: u32, b: u32) -> u32 {
        let p = self.p as u64;
        let r = self.r as usize;
        let m: Vec<u64> = self.modulus.as_ref().unwrap().iter().map(|&c| c as u64).collect();
        let a = fp::digits(a as u64, p, r);
        let b = fp::digits(b as u64, p, r);
        let prod = fp::rem(&fp::mul(&a, &b, p), &m, p);
        fp::pack(&prod, p) as u32
    }

    fn slow_pow(&self, a: u32, mut e: u64) -> u32 {
        let mut base = a;
        let mut acc = 1u32;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.slow_mul(acc, base);
            }
            base = self.slow_mul(base, base);
            e >>= 1;
        }
        acc
    }

    /// Element from its packed code. Panics if out of range.
    pub fn elem(&self, code: u32) -> FqElem {
        assert!(code < self.q, "code {code} out of range for F_{}", self.q);
        FqElem(code)
    }

    /// Element from its packed code, or `None` if out of range.
    pub fn try_elem(&self, code: u64) -> Option<FqElem> {
        (code < self.q as u64).then_some(FqElem(code as u32))
    }

    /// Image of an integer in the prime subfield.
    pub fn from_int(&self, n: i64) -> FqElem {
        FqElem(n.rem_euclid(self.p as i64) as u32)
    }

    /// Coefficient vector `(c_0, .., c_{r-1})` of the residue representative.
    pub fn coeffs(&self, a: FqElem) -> Vec<u32> {
        fp::digits(a.0 as u64, self.p as u64, self.r as usize)
            .into_iter()
            .map(|c| c as u32)
            .collect()
    }

    /// Element from a coefficient vector, reduced modulo `p` digit-wise.
    pub fn from_coeffs(&self, coeffs: &[u32]) -> Result<FqElem> {
        if coeffs.len() > self.r as usize {
            return Err(Error::InvalidInput(format!(
                "{} coefficients for an element of F_{}",
                coeffs.len(),
                self.q
            )));
        }
        let p = self.p as u64;
        let v: Vec<u64> = coeffs.iter().map(|&c| c as u64 % p).collect();
        Ok(FqElem(fp::pack(&v, p) as u32))
    }

    pub fn elements(&self) -> impl Iterator<Item = FqElem> {
        (0..self.q).map(FqElem)
    }

    #[inline]
    pub fn add(&self, a: FqElem, b: FqElem) -> FqElem {
        if self.r == 1 {
            let s = a.0 as u64 + b.0 as u64;
            let p = self.p as u64;
            return FqElem(if s >= p { s - p } else { s } as u32);
        }
        if self.p == 2 {
            return FqElem(a.0 ^ b.0);
        }
        let p = self.p;
        let (mut x, mut y, mut out, mut place) = (a.0, b.0, 0u32, 1u32);
        while x > 0 || y > 0 {
            out += ((x % p + y % p) % p) * place;
            x /= p;
            y /= p;
            place = place.wrapping_mul(p);
        }
        FqElem(out)
    }

    #[inline]
    pub fn neg(&self, a: FqElem) -> FqElem {
        if self.r == 1 {
            return FqElem(if a.0 == 0 { 0 } else { self.p - a.0 });
        }
        if self.p == 2 {
            return a;
        }
        let p = self.p;
        let (mut x, mut out, mut place) = (a.0, 0u32, 1u32);
        while x > 0 {
            out += ((p - x % p) % p) * place;
            x /= p;
            place = place.wrapping_mul(p);
        }
        FqElem(out)
    }

    #[inline]
    pub fn sub(&self, a: FqElem, b: FqElem) -> FqElem {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn mul(&self, a: FqElem, b: FqElem) -> FqElem {
        if self.r == 1 {
            return FqElem(((a.0 as u64 * b.0 as u64) % self.p as u64) as u32);
        }
        if a.0 == 0 || b.0 == 0 {
            return FqElem::ZERO;
        }
        let order = self.q - 1;
        let k = self.log[a.0 as usize] + self.log[b.0 as usize];
        let k = if k >= order { k - order } else { k };
        FqElem(self.exp[k as usize])
    }

    /// Multiplicative inverse. Panics on zero.
    pub fn inv(&self, a: FqElem) -> FqElem {
        assert!(!a.is_zero(), "inverse of zero in F_{}", self.q);
        if self.r == 1 {
            return FqElem(modinv(a.0 as u64, self.p as u64) as u32);
        }
        let order = self.q - 1;
        let k = self.log[a.0 as usize];
        FqElem(self.exp[((order - k) % order) as usize])
    }

    pub fn div(&self, a: FqElem, b: FqElem) -> FqElem {
        self.mul(a, self.inv(b))
    }

    pub fn pow(&self, a: FqElem, mut e: u64) -> FqElem {
        let mut base = a;
        let mut acc = FqElem::ONE;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    /// Frobenius `a -> a^p`.
    pub fn frobenius(&self, a: FqElem) -> FqElem {
        if self.r == 1 {
            return a;
        }
        self.pow(a, self.p as u64)
    }

    /// The unique `b` with `b^p = a`, computed as `a^(p^(r-1))`.
    pub fn pth_root(&self, a: FqElem) -> FqElem {
        if self.r == 1 || a.is_zero() {
            return a;
        }
        let order = self.q as u64 - 1;
        let e = (self.p as u64).pow(self.r - 1) % order;
        let k = (self.log[a.0 as usize] as u64 * e) % order;
        FqElem(self.exp[k as usize])
    }

    /// Human-readable form: the code for prime fields, a polynomial in `t`
    /// otherwise.
    pub fn show(&self, a: FqElem) -> String {
        if self.r == 1 {
            return a.0.to_string();
        }
        let c: Vec<u64> = self.coeffs(a).into_iter().map(|c| c as u64).collect();
        fp::show_in(&fp::trim(c), "t")
    }
}

fn modinv(a: u64, m: u64) -> u64 {
    let (mut old_r, mut r) = (a as i128, m as i128);
    let (mut old_s, mut s) = (1i128, 0i128);
    while r != 0 {
        let qt = old_r / r;
        (old_r, r) = (r, old_r - qt * r);
        (old_s, s) = (s, old_s - qt * s);
    }
    old_s.rem_euclid(m as i128) as u64
}

pub(crate) fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = vec![];
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            out.push(d);
            while n.is_multiple_of(d) {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// Dense polynomials over a prime field with `u64` coefficients, used only to
/// set up extension fields.
mod fp {
    pub fn trim(mut v: Vec<u64>) -> Vec<u64> {
        while v.last() == Some(&0) {
            v.pop();
        }
        v
    }

    pub fn digits(mut code: u64, p: u64, r: usize) -> Vec<u64> {
        let mut out = Vec::with_capacity(r);
        for _ in 0..r {
            out.push(code % p);
            code /= p;
        }
        out
    }

    pub fn pack(v: &[u64], p: u64) -> u64 {
        v.iter().rev().fold(0, |acc, &c| acc * p + c)
    }

    fn inv(a: u64, p: u64) -> u64 {
        super::modinv(a, p)
    }

    pub fn monic(m: &[u64], p: u64) -> Vec<u64> {
        let lc = inv(*m.last().unwrap(), p);
        m.iter().map(|&c| c * lc % p).collect()
    }

    pub fn mul(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
        if a.is_empty() || b.is_empty() {
            return vec![];
        }
        let mut out = vec![0u64; a.len() + b.len() - 1];
        for (i, &x) in a.iter().enumerate() {
            for (j, &y) in b.iter().enumerate() {
                out[i + j] = (out[i + j] + x * y) % p;
            }
        }
        trim(out)
    }

    pub fn rem(a: &[u64], m: &[u64], p: u64) -> Vec<u64> {
        let mut a = trim(a.to_vec());
        let m = trim(m.to_vec());
        let dm = m.len() - 1;
        let lc_inv = inv(m[dm], p);
        while a.len() > dm && !a.is_empty() {
            let da = a.len() - 1;
            let c = a[da] * lc_inv % p;
            for (i, &mi) in m.iter().enumerate() {
                let idx = da - dm + i;
                a[idx] = (a[idx] + p - c * mi % p) % p;
            }
            a = trim(a);
        }
        a
    }

    pub fn gcd(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
        let (mut a, mut b) = (trim(a.to_vec()), trim(b.to_vec()));
        while !b.is_empty() {
            let r = rem(&a, &b, p);
            a = b;
            b = r;
        }
        a
    }

    fn sub(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
        let n = a.len().max(b.len());
        let out = (0..n)
            .map(|i| {
                let x = a.get(i).copied().unwrap_or(0);
                let y = b.get(i).copied().unwrap_or(0);
                (x + p - y) % p
            })
            .collect();
        trim(out)
    }

    /// Rabin's test: `m` irreducible of degree r iff gcd(t^(p^i) - t, m) = 1
    /// for i <= r/2 (the `t^(p^r) = t` half holds whenever these pass and m is
    /// squarefree of degree r; we check it too).
    pub fn is_irreducible(m: &[u64], p: u64) -> bool {
        let r = m.len() - 1;
        if r == 0 {
            return false;
        }
        if r == 1 {
            return true;
        }
        let t = vec![0, 1];
        let mut power = t.clone();
        for i in 1..=r {
            // power <- power^p mod m
            let mut acc = vec![1u64];
            let mut base = power.clone();
            let mut e = p;
            while e > 0 {
                if e & 1 == 1 {
                    acc = rem(&mul(&acc, &base, p), m, p);
                }
                base = rem(&mul(&base, &base, p), m, p);
                e >>= 1;
            }
            power = acc;
            let diff = sub(&power, &t, p);
            if i <= r / 2 {
                let g = gcd(m, &diff, p);
                if g.len() > 1 {
                    return false;
                }
            }
            if i == r && !diff.is_empty() {
                return false;
            }
        }
        true
    }

    pub fn show_in(v: &[u64], var: &str) -> String {
        if v.is_empty() {
            return "0".into();
        }
        let mut terms = vec![];
        for (i, &c) in v.iter().enumerate().rev() {
            if c == 0 {
                continue;
            }
            let mono = match i {
                0 => String::new(),
                1 => var.to_string(),
                _ => format!("{var}^{i}"),
            };
            terms.push(match (c, i) {
                (_, 0) => c.to_string(),
                (1, _) => mono,
                _ => format!("{c}*{mono}"),
            });
        }
        terms.join(" + ")
    }

    pub fn show(v: &[u64]) -> String {
        show_in(v, "t")
    }
}
