//! Canonical rational functions in `F_q(x)`.

use super::field::{FieldCtx, FqElem};
use super::poly::Poly;
use crate::error::{Error, Result};

/// `num / den` with `den` monic and `gcd(num, den) = 1`; zero is `0/1`.
///
/// Equal field elements have identical representations, so the derived
/// `Eq` and `Hash` are equality in `F_q(x)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RatFunc {
    num: Poly,
    den: Poly,
}

impl Default for RatFunc {
    fn default() -> Self {
        RatFunc::zero()
    }
}

impl RatFunc {
    /// Canonical form of `num / den`.
    pub fn new(num: Poly, den: Poly, f: &FieldCtx) -> Result<RatFunc> {
        if den.is_zero() {
            return Err(Error::ZeroDenominator);
        }
        if num.is_zero() {
            return Ok(RatFunc::zero());
        }
        let g = num.gcd(&den, f);
        let (mut num, mut den) = if g.is_one() {
            (num, den)
        } else {
            (num.divrem(&g, f).0, den.divrem(&g, f).0)
        };
        let lc = den.lc();
        if lc != FqElem::ONE {
            let inv = f.inv(lc);
            num = num.scale(inv, f);
            den = den.scale(inv, f);
        }
        Ok(RatFunc { num, den })
    }

    /// Builds from parts already known to be coprime, normalizing the
    /// denominator to be monic.
    fn from_coprime(num: Poly, den: Poly, f: &FieldCtx) -> RatFunc {
        if num.is_zero() {
            return RatFunc::zero();
        }
        let lc = den.lc();
        if lc == FqElem::ONE {
            return RatFunc { num, den };
        }
        let inv = f.inv(lc);
        RatFunc { num: num.scale(inv, f), den: den.scale(inv, f) }
    }

    pub fn zero() -> RatFunc {
        RatFunc { num: Poly::zero(), den: Poly::one() }
    }

    pub fn one() -> RatFunc {
        RatFunc { num: Poly::one(), den: Poly::one() }
    }

    pub fn from_poly(num: Poly) -> RatFunc {
        RatFunc { num, den: Poly::one() }
    }

    pub fn constant(c: FqElem) -> RatFunc {
        RatFunc::from_poly(Poly::constant(c))
    }

    pub fn num(&self) -> &Poly {
        &self.num
    }

    pub fn den(&self) -> &Poly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_poly(&self) -> bool {
        self.den.is_one()
    }

    pub fn add(&self, other: &RatFunc, f: &FieldCtx) -> RatFunc {
        if self.is_zero() {
            return other.clone();
        }
        if other.is_zero() {
            return self.clone();
        }
        if self.den == other.den {
            let num = self.num.add(&other.num, f);
            return RatFunc::new(num, self.den.clone(), f).expect("nonzero denominator");
        }
        let g = self.den.gcd(&other.den, f);
        if g.is_one() {
            let num = self.num.mul(&other.den, f).add(&other.num.mul(&self.den, f), f);
            // coprime denominators: the sum is already reduced
            return RatFunc::from_coprime(num, self.den.mul(&other.den, f), f);
        }
        let a = self.den.divrem(&g, f).0;
        let b = other.den.divrem(&g, f).0;
        let num = self.num.mul(&b, f).add(&other.num.mul(&a, f), f);
        RatFunc::new(num, a.mul(&other.den, f), f).expect("nonzero denominator")
    }

    pub fn neg(&self, f: &FieldCtx) -> RatFunc {
        RatFunc { num: self.num.neg(f), den: self.den.clone() }
    }

    pub fn sub(&self, other: &RatFunc, f: &FieldCtx) -> RatFunc {
        self.add(&other.neg(f), f)
    }

    pub fn mul(&self, other: &RatFunc, f: &FieldCtx) -> RatFunc {
        if self.is_zero() || other.is_zero() {
            return RatFunc::zero();
        }
        let g1 = self.num.gcd(&other.den, f);
        let g2 = other.num.gcd(&self.den, f);
        let (n1, d2) = if g1.is_one() {
            (self.num.clone(), other.den.clone())
        } else {
            (self.num.divrem(&g1, f).0, other.den.divrem(&g1, f).0)
        };
        let (n2, d1) = if g2.is_one() {
            (other.num.clone(), self.den.clone())
        } else {
            (other.num.divrem(&g2, f).0, self.den.divrem(&g2, f).0)
        };
        RatFunc::from_coprime(n1.mul(&n2, f), d1.mul(&d2, f), f)
    }

    pub fn scale(&self, c: FqElem, f: &FieldCtx) -> RatFunc {
        if c.is_zero() {
            return RatFunc::zero();
        }
        RatFunc { num: self.num.scale(c, f), den: self.den.clone() }
    }

    pub fn mul_poly(&self, g: &Poly, f: &FieldCtx) -> RatFunc {
        self.mul(&RatFunc::from_poly(g.clone()), f)
    }

    pub fn inv(&self, f: &FieldCtx) -> Result<RatFunc> {
        if self.is_zero() {
            return Err(Error::ZeroDenominator);
        }
        Ok(RatFunc::from_coprime(self.den.clone(), self.num.clone(), f))
    }

    pub fn div(&self, other: &RatFunc, f: &FieldCtx) -> Result<RatFunc> {
        Ok(self.mul(&other.inv(f)?, f))
    }

    pub fn pow(&self, e: u64, f: &FieldCtx) -> RatFunc {
        // coprime parts stay coprime under powering
        RatFunc::from_coprime(self.num.pow(e, f), self.den.pow(e, f), f)
    }

    /// `self^p`, computed coefficientwise as `g(x) -> g^sigma(x^p)`.
    pub fn frobenius(&self, f: &FieldCtx) -> RatFunc {
        let p = f.p() as usize;
        RatFunc {
            num: self.num.coeff_frobenius(f).inflate(p),
            den: self.den.coeff_frobenius(f).inflate(p),
        }
    }

    /// Value at `x = 0`, or `None` if the denominator vanishes there.
    pub fn eval_at_zero(&self, f: &FieldCtx) -> Option<FqElem> {
        let d0 = self.den.coeff(0);
        (!d0.is_zero()).then(|| f.div(self.num.coeff(0), d0))
    }

    pub fn show(&self, f: &FieldCtx, var: &str) -> String {
        if self.den.is_one() {
            return self.num.show(f, var);
        }
        format!("({})/({})", self.num.show(f, var), self.den.show(f, var))
    }
}
