//! The function field `K = F_q(x)[y]/(f)` and the decimation operators on it.
//!
//! Every `u` in `K` has a unique expansion `u = sum_j x^j * v_j^p` with
//! `j < p`; the map `u -> v_j` is the exact counterpart of extracting the
//! coefficients of index `j mod p` from a power series and taking `p`-th
//! roots. The expansion is found by solving a linear system over `F_q(x^p)`
//! whose matrix depends only on the curve, so it is inverted once (up to a
//! scalar) when the curve is built.

use std::fmt::Write as _;

use crate::algebra::linalg::{scaled_inverse, PolyMatrix};
use crate::algebra::{FieldCtx, FqElem, Poly, RatFunc};
use crate::error::{Error, Result};

/// A plane curve `f(x, T) = sum_j coeffs[j](x) T^j` with `deg_T f >= 1`.
#[derive(Clone, Debug)]
pub struct PlaneCurve {
    field: FieldCtx,
    coeffs: Vec<Poly>,
    height: usize,
    /// `y^d = sum_j reduce[j] y^j`.
    reduce: Vec<RatFunc>,
    /// `y^(p b)` reduced, for `b < d`.
    ypow_p: Vec<FFElem>,
    /// `root(adj)` with rows scaled by the column denominators; see `kp_decompose`.
    inv_rows: Vec<Vec<Poly>>,
    inv_det: Poly,
}

/// An element `sum_b coords[b] y^b` of `K`.
///
/// Coordinates are canonical rational functions, so equality and hashing
/// are equality in `K`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FFElem {
    coords: Vec<RatFunc>,
}

impl FFElem {
    pub fn coords(&self) -> &[RatFunc] {
        &self.coords
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(RatFunc::is_zero)
    }

    /// Lowest common denominator of the coordinates (monic).
    pub fn common_den(&self, f: &FieldCtx) -> Poly {
        let mut l = Poly::one();
        for c in &self.coords {
            let g = l.gcd(c.den(), f);
            l = l.mul(&c.den().divrem(&g, f).0, f);
        }
        l
    }
}

impl PlaneCurve {
    /// Builds the curve from `coeffs[j]`, the coefficient of `T^j`.
    pub fn new(field: FieldCtx, coeffs: Vec<Poly>) -> Result<PlaneCurve> {
        let mut coeffs = coeffs;
        while coeffs.last().is_some_and(Poly::is_zero) {
            coeffs.pop();
        }
        if coeffs.len() < 2 {
            return Err(Error::InvalidInput("curve must have positive degree in T".into()));
        }
        let d = coeffs.len() - 1;
        let height = coeffs.iter().filter_map(Poly::degree).max().unwrap_or(0);
        let f = &field;
        let lead = RatFunc::from_poly(coeffs[d].clone());
        let reduce: Vec<RatFunc> = coeffs[..d]
            .iter()
            .map(|c| RatFunc::from_poly(c.neg(f)).div(&lead, f).expect("nonzero leading coefficient"))
            .collect();
        let mut curve = PlaneCurve {
            field,
            coeffs,
            height,
            reduce,
            ypow_p: vec![],
            inv_rows: vec![],
            inv_det: Poly::one(),
        };
        curve.check_separable()?;
        curve.build_decomposition()?;
        Ok(curve)
    }

    /// Builds the curve from `(x exponent, T exponent, coefficient)` terms.
    /// Repeated monomials are summed.
    pub fn from_terms(field: FieldCtx, terms: &[(usize, usize, FqElem)]) -> Result<PlaneCurve> {
        let d = terms.iter().map(|t| t.1).max().unwrap_or(0);
        let mut cols: Vec<Vec<FqElem>> = vec![vec![]; d + 1];
        for &(i, j, c) in terms {
            let col = &mut cols[j];
            if col.len() <= i {
                col.resize(i + 1, FqElem::ZERO);
            }
            col[i] = field.add(col[i], c);
        }
        let coeffs = cols.into_iter().map(Poly::from_coeffs).collect();
        PlaneCurve::new(field, coeffs)
    }

    pub fn field(&self) -> &FieldCtx {
        &self.field
    }

    /// Coefficient of `T^j`, as a polynomial in `x`.
    pub fn coeffs(&self) -> &[Poly] {
        &self.coeffs
    }

    /// Degree in `T`.
    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// Degree in `x`.
    pub fn height(&self) -> usize {
        self.height
    }

    /// Nonzero terms as `(x exponent, T exponent, coefficient)`, sorted.
    pub fn terms(&self) -> Vec<(usize, usize, FqElem)> {
        let mut out = vec![];
        for (j, c) in self.coeffs.iter().enumerate() {
            for (i, &a) in c.coeffs().iter().enumerate() {
                if !a.is_zero() {
                    out.push((i, j, a));
                }
            }
        }
        out.sort_by_key(|&(i, j, _)| (j, i));
        out
    }

    pub fn show(&self) -> String {
        let f = &self.field;
        let mut s = String::new();
        for (j, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            if !s.is_empty() {
                s.push_str(" + ");
            }
            let cs = c.show(f, "x");
            let cs = if c.coeffs().iter().filter(|a| !a.is_zero()).count() > 1 && j > 0 {
                format!("({cs})")
            } else {
                cs
            };
            match j {
                0 => s.push_str(&cs),
                _ => {
                    if !c.is_one() {
                        s.push_str(&cs);
                        s.push('*');
                    }
                    s.push('T');
                    if j > 1 {
                        let _ = write!(s, "^{j}");
                    }
                }
            }
        }
        s
    }

    fn check_separable(&self) -> Result<()> {
        let f = &self.field;
        let poly: Vec<RatFunc> = self.coeffs.iter().cloned().map(RatFunc::from_poly).collect();
        let deriv: Vec<RatFunc> = poly
            .iter()
            .enumerate()
            .skip(1)
            .map(|(j, c)| c.scale(f.from_int((j % f.p() as usize) as i64), f))
            .collect();
        let deriv = tpoly_trim(deriv);
        if deriv.is_empty() {
            return Err(Error::Inseparable(format!(
                "{} is a polynomial in T^{}",
                self.show(),
                f.p()
            )));
        }
        let g = tpoly_gcd(poly, deriv, f);
        if g.len() > 1 {
            return Err(Error::Inseparable(format!(
                "{} shares the factor {} with its T-derivative",
                self.show(),
                tpoly_show(&g, f)
            )));
        }
        Ok(())
    }

    // --- elements ---

    pub fn zero(&self) -> FFElem {
        FFElem { coords: vec![RatFunc::zero(); self.degree()] }
    }

    pub fn one(&self) -> FFElem {
        self.from_ratfunc(RatFunc::one())
    }

    /// The generator `y`, a root of `f`.
    pub fn y(&self) -> FFElem {
        let mut coords = vec![RatFunc::zero(); self.degree()];
        if self.degree() == 1 {
            coords[0] = self.reduce[0].clone();
        } else {
            coords[1] = RatFunc::one();
        }
        FFElem { coords }
    }

    pub fn x(&self) -> FFElem {
        self.from_ratfunc(RatFunc::from_poly(Poly::x()))
    }

    pub fn from_ratfunc(&self, c: RatFunc) -> FFElem {
        let mut coords = vec![RatFunc::zero(); self.degree()];
        coords[0] = c;
        FFElem { coords }
    }

    /// Element from its coordinates on `1, y, .., y^(d-1)`.
    pub fn element(&self, coords: Vec<RatFunc>) -> Result<FFElem> {
        if coords.len() != self.degree() {
            return Err(Error::DimensionMismatch(format!(
                "{} coordinates for a curve of degree {}",
                coords.len(),
                self.degree()
            )));
        }
        Ok(FFElem { coords })
    }

    pub fn add(&self, a: &FFElem, b: &FFElem) -> FFElem {
        let f = &self.field;
        FFElem { coords: a.coords.iter().zip(&b.coords).map(|(u, v)| u.add(v, f)).collect() }
    }

    pub fn sub(&self, a: &FFElem, b: &FFElem) -> FFElem {
        let f = &self.field;
        FFElem { coords: a.coords.iter().zip(&b.coords).map(|(u, v)| u.sub(v, f)).collect() }
    }

    pub fn neg(&self, a: &FFElem) -> FFElem {
        let f = &self.field;
        FFElem { coords: a.coords.iter().map(|u| u.neg(f)).collect() }
    }

    pub fn scale(&self, a: &FFElem, c: &RatFunc) -> FFElem {
        let f = &self.field;
        FFElem { coords: a.coords.iter().map(|u| u.mul(c, f)).collect() }
    }

    pub fn scale_fq(&self, a: &FFElem, c: FqElem) -> FFElem {
        let f = &self.field;
        FFElem { coords: a.coords.iter().map(|u| u.scale(c, f)).collect() }
    }

    /// Reduces a polynomial in `y` of any length modulo `f`.
    fn reduce_tpoly(&self, mut v: Vec<RatFunc>) -> FFElem {
        let f = &self.field;
        let d = self.degree();
        while v.len() > d {
            let top = v.pop().expect("nonempty");
            if top.is_zero() {
                continue;
            }
            let base = v.len() - d;
            for (j, r) in self.reduce.iter().enumerate() {
                if !r.is_zero() {
                    v[base + j] = v[base + j].add(&top.mul(r, f), f);
                }
            }
        }
        v.resize(d, RatFunc::zero());
        FFElem { coords: v }
    }

    pub fn mul(&self, a: &FFElem, b: &FFElem) -> FFElem {
        let f = &self.field;
        let d = self.degree();
        let mut prod = vec![RatFunc::zero(); 2 * d - 1];
        for (i, u) in a.coords.iter().enumerate() {
            if u.is_zero() {
                continue;
            }
            for (j, v) in b.coords.iter().enumerate() {
                if !v.is_zero() {
                    prod[i + j] = prod[i + j].add(&u.mul(v, f), f);
                }
            }
        }
        self.reduce_tpoly(prod)
    }

    pub fn pow(&self, a: &FFElem, mut e: u64) -> FFElem {
        let mut base = a.clone();
        let mut acc = self.one();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            e >>= 1;
            if e > 0 {
                base = self.mul(&base, &base);
            }
        }
        acc
    }

    /// `a^p`, using `(sum c_b y^b)^p = sum c_b^p y^(p b)`.
    pub fn frobenius(&self, a: &FFElem) -> FFElem {
        let f = &self.field;
        let mut out = self.zero();
        for (c, yb) in a.coords.iter().zip(&self.ypow_p) {
            if !c.is_zero() {
                out = self.add(&out, &self.scale(yb, &c.frobenius(f)));
            }
        }
        out
    }

    /// Multiplicative inverse. Fails with [`Error::Reducible`] when `a`
    /// shares a factor with `f`, which means `f` is not irreducible.
    pub fn inv(&self, a: &FFElem) -> Result<FFElem> {
        let f = &self.field;
        if a.is_zero() {
            return Err(Error::ZeroDenominator);
        }
        let modulus: Vec<RatFunc> = self.coeffs.iter().cloned().map(RatFunc::from_poly).collect();
        let (g, s) = tpoly_ext_gcd(tpoly_trim(a.coords.clone()), modulus, f);
        if g.len() > 1 {
            return Err(Error::Reducible(tpoly_show(&g, f)));
        }
        let g0 = g[0].inv(f)?;
        let s = s.into_iter().map(|c| c.mul(&g0, f)).collect();
        Ok(self.reduce_tpoly(s))
    }

    pub fn div(&self, a: &FFElem, b: &FFElem) -> Result<FFElem> {
        Ok(self.mul(a, &self.inv(b)?))
    }

    /// Derivative `du/dx` of `u` as an element of `K`, with `dy/dx = -f_x/f_T`.
    pub fn derivative(&self, u: &FFElem) -> Result<FFElem> {
        let f = &self.field;
        let y = self.y();
        let mut fx = self.zero();
        let mut ft = self.zero();
        let mut ypow = self.one();
        for (j, c) in self.coeffs.iter().enumerate() {
            fx = self.add(&fx, &self.scale(&ypow, &RatFunc::from_poly(c.derivative(f))));
            if j + 1 < self.coeffs.len() {
                let cj = self.coeffs[j + 1].scale(f.from_int(((j + 1) % f.p() as usize) as i64), f);
                ft = self.add(&ft, &self.scale(&ypow, &RatFunc::from_poly(cj)));
            }
            ypow = self.mul(&ypow, &y);
        }
        let dy = self.neg(&self.div(&fx, &ft)?);
        let mut out = self.zero();
        let mut ypow = self.one();
        let mut dypow = self.zero();
        for c in &u.coords {
            // d(c y^b) = c' y^b + c (y^b)'
            let term = self.add(
                &self.scale(&ypow, &RatFunc::new(
                    c.num().derivative(f).mul(c.den(), f).sub(&c.num().mul(&c.den().derivative(f), f), f),
                    c.den().mul(c.den(), f),
                    f,
                )?),
                &self.scale(&dypow, c),
            );
            out = self.add(&out, &term);
            dypow = self.add(&self.mul(&dypow, &y), &self.mul(&ypow, &dy));
            ypow = self.mul(&ypow, &y);
        }
        Ok(out)
    }

    pub fn show_elem(&self, a: &FFElem) -> String {
        let f = &self.field;
        let mut s = String::new();
        for (b, c) in a.coords.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if !s.is_empty() {
                s.push_str(" + ");
            }
            let cs = c.show(f, "x");
            match b {
                0 => s.push_str(&cs),
                _ => {
                    if !c.is_poly() || c.num().coeffs().iter().filter(|v| !v.is_zero()).count() > 1 {
                        let _ = write!(s, "({cs})*");
                    } else if *c != RatFunc::one() {
                        let _ = write!(s, "{cs}*");
                    }
                    s.push('y');
                    if b > 1 {
                        let _ = write!(s, "^{b}");
                    }
                }
            }
        }
        if s.is_empty() {
            s.push('0');
        }
        s
    }

    // --- decomposition over K^p ---

    /// Splits `num = sum_a x^a g_a(x^p)` and returns the `p`-th roots of the
    /// `g_a(x^p)` as polynomials in `x`.
    fn rooted_residues(num: &Poly, f: &FieldCtx) -> Vec<Poly> {
        num.split_residues(f.p() as usize)
            .into_iter()
            .map(|part| part.coeff_pth_root(f))
            .collect()
    }

    /// Precomputes the scaled inverse of the change-of-basis matrix from
    /// `{x^a y^(p b)}` to `{x^a y^b}` over `F_q(x^p)`.
    fn build_decomposition(&mut self) -> Result<()> {
        let f = self.field.clone();
        let p = f.p() as usize;
        let d = self.degree();
        let n = p * d;
        let y = self.y();
        let yp = self.pow(&y, p as u64);
        let mut ypow_p = vec![self.one()];
        for b in 1..d {
            ypow_p.push(self.mul(&ypow_p[b - 1], &yp));
        }
        // Column (a, b) holds x^a y^(p b). Over F_q(z), z = x^p, its entries
        // share the denominator l_b(x)^p where l_b = lcm of the coordinate
        // denominators of y^(p b).
        let mut matrix: PolyMatrix = vec![vec![Poly::zero(); n]; n];
        let mut col_den_roots = vec![Poly::one(); d];
        for (b, yb) in ypow_p.iter().enumerate() {
            let l = yb.common_den(&f);
            let lp1 = l.pow(p as u64 - 1, &f);
            for (bb, c) in yb.coords.iter().enumerate() {
                let base = c.num().mul(&l.divrem(c.den(), &f).0, &f).mul(&lp1, &f);
                for a in 0..p {
                    let parts = base.shift(a).split_residues(p);
                    for (aa, part) in parts.into_iter().enumerate() {
                        // `part` is already written in the variable z = x^p
                        matrix[bb * p + aa][b * p + a] = part;
                    }
                }
            }
            // root(l^p as a polynomial in z) = l
            col_den_roots[b] = l;
        }
        let Some((det, adj)) = scaled_inverse(&matrix, &f)? else {
            return Err(Error::SingularBasis);
        };
        // Every entry lies in F_q[z]; the p-th root of g(z) viewed in F_q(x^p)
        // is g with its coefficients rooted, read in the variable x.
        let inv_rows = adj
            .into_iter()
            .enumerate()
            .map(|(row, entries)| {
                let b = row / p;
                entries
                    .into_iter()
                    .map(|e| e.coeff_pth_root(&f).mul(&col_den_roots[b], &f))
                    .collect()
            })
            .collect();
        self.inv_det = det.coeff_pth_root(&f);
        self.inv_rows = inv_rows;
        self.ypow_p = ypow_p;
        Ok(())
    }

    /// The unique `(v_0, .., v_{p-1})` with `u = sum_j x^j v_j^p`.
    pub fn kp_decompose(&self, u: &FFElem) -> Vec<FFElem> {
        let f = &self.field;
        let p = f.p() as usize;
        let d = self.degree();
        if u.is_zero() {
            return vec![self.zero(); p];
        }
        // u = (1/D^p) sum_b (num_b (D/den_b) D^(p-1)) y^b, and each numerator
        // splits into x^a w_{a,b}(x^p).
        let den = u.common_den(f);
        let dp1 = den.pow(p as u64 - 1, f);
        let mut w: Vec<Poly> = vec![Poly::zero(); p * d];
        for (b, c) in u.coords.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let num = c.num().mul(&den.divrem(c.den(), f).0, f).mul(&dp1, f);
            for (a, part) in Self::rooted_residues(&num, f).into_iter().enumerate() {
                w[b * p + a] = part;
            }
        }
        let full_den = self.inv_det.mul(&den, f);
        let mut out = vec![self.zero(); p];
        for (row, coeffs) in self.inv_rows.iter().enumerate() {
            let (b, a) = (row / p, row % p);
            let mut acc = Poly::zero();
            for (e, wk) in coeffs.iter().zip(&w) {
                if !e.is_zero() && !wk.is_zero() {
                    acc = acc.add(&e.mul(wk, f), f);
                }
            }
            out[a].coords[b] = RatFunc::new(acc, full_den.clone(), f).expect("nonzero determinant");
        }
        out
    }

    /// Inverse of [`PlaneCurve::kp_decompose`]: `sum_j x^j v_j^p`.
    pub fn kp_recompose(&self, parts: &[FFElem]) -> FFElem {
        let mut out = self.zero();
        let mut xj = self.one();
        let x = self.x();
        for v in parts {
            out = self.add(&out, &self.mul(&xj, &self.frobenius(v)));
            xj = self.mul(&xj, &x);
        }
        out
    }

    /// The decimation operator for digit `i < p`.
    pub fn lambda_p(&self, i: usize, u: &FFElem) -> Result<FFElem> {
        let p = self.field.p() as usize;
        if i >= p {
            return Err(Error::DigitOutOfRange { digit: i, base: p });
        }
        Ok(self.kp_decompose(u).swap_remove(i))
    }

    /// The decimation operator for digit `c < q`: `c = i_0 + i_1 p + ..`
    /// applies the digit `i_0` first, so that on series the result has
    /// coefficients `a(q n + c)`.
    pub fn lambda_q(&self, c: usize, u: &FFElem) -> Result<FFElem> {
        let p = self.field.p() as usize;
        let q = self.field.q() as usize;
        if c >= q {
            return Err(Error::DigitOutOfRange { digit: c, base: q });
        }
        let mut v = u.clone();
        let mut rest = c;
        for _ in 0..self.field.r() {
            v = self.lambda_p(rest % p, &v)?;
            rest /= p;
        }
        Ok(v)
    }

    /// All `q` decimations of `u`, indexed by digit, sharing the
    /// intermediate decompositions.
    pub fn lambda_all(&self, u: &FFElem) -> Vec<FFElem> {
        let p = self.field.p() as usize;
        let mut level = vec![u.clone()];
        let mut stride = 1;
        for _ in 0..self.field.r() {
            // next[c + stride * i] = lambda_i(level[c])
            let mut next = vec![self.zero(); level.len() * p];
            for (c, v) in level.iter().enumerate() {
                for (i, part) in self.kp_decompose(v).into_iter().enumerate() {
                    next[c + stride * i] = part;
                }
            }
            level = next;
            stride *= p;
        }
        level
    }
}

// --- polynomials in T over F_q(x), used for gcd and inversion ---

fn tpoly_trim(mut v: Vec<RatFunc>) -> Vec<RatFunc> {
    while v.last().is_some_and(RatFunc::is_zero) {
        v.pop();
    }
    v
}

fn tpoly_divrem(a: &[RatFunc], b: &[RatFunc], f: &FieldCtx) -> (Vec<RatFunc>, Vec<RatFunc>) {
    let mut rem = a.to_vec();
    let db = b.len() - 1;
    if rem.len() < b.len() {
        return (vec![], tpoly_trim(rem));
    }
    let lead_inv = b[db].inv(f).expect("trimmed divisor");
    let mut quot = vec![RatFunc::zero(); rem.len() - db];
    for k in (0..quot.len()).rev() {
        let c = rem[k + db].mul(&lead_inv, f);
        if c.is_zero() {
            continue;
        }
        for (i, bi) in b.iter().enumerate() {
            rem[k + i] = rem[k + i].sub(&c.mul(bi, f), f);
        }
        quot[k] = c;
    }
    rem.truncate(db);
    (tpoly_trim(quot), tpoly_trim(rem))
}

fn tpoly_mul(a: &[RatFunc], b: &[RatFunc], f: &FieldCtx) -> Vec<RatFunc> {
    if a.is_empty() || b.is_empty() {
        return vec![];
    }
    let mut out = vec![RatFunc::zero(); a.len() + b.len() - 1];
    for (i, u) in a.iter().enumerate() {
        for (j, v) in b.iter().enumerate() {
            out[i + j] = out[i + j].add(&u.mul(v, f), f);
        }
    }
    tpoly_trim(out)
}

fn tpoly_sub(a: &[RatFunc], b: &[RatFunc], f: &FieldCtx) -> Vec<RatFunc> {
    let n = a.len().max(b.len());
    let z = RatFunc::zero();
    tpoly_trim(
        (0..n)
            .map(|i| a.get(i).unwrap_or(&z).sub(b.get(i).unwrap_or(&z), f))
            .collect(),
    )
}

fn tpoly_gcd(a: Vec<RatFunc>, b: Vec<RatFunc>, f: &FieldCtx) -> Vec<RatFunc> {
    let (mut a, mut b) = (tpoly_trim(a), tpoly_trim(b));
    while !b.is_empty() {
        let r = tpoly_divrem(&a, &b, f).1;
        a = b;
        b = r;
    }
    a
}

/// Returns `(g, s)` with `s * a = g mod b`.
fn tpoly_ext_gcd(a: Vec<RatFunc>, b: Vec<RatFunc>, f: &FieldCtx) -> (Vec<RatFunc>, Vec<RatFunc>) {
    let (mut r0, mut r1) = (a, tpoly_trim(b));
    let (mut s0, mut s1) = (vec![RatFunc::one()], vec![]);
    while !r1.is_empty() {
        let (q, r) = tpoly_divrem(&r0, &r1, f);
        let s = tpoly_sub(&s0, &tpoly_mul(&q, &s1, f), f);
        r0 = r1;
        r1 = r;
        s0 = s1;
        s1 = s;
    }
    (r0, s0)
}

fn tpoly_show(v: &[RatFunc], f: &FieldCtx) -> String {
    let mut s = String::new();
    for (j, c) in v.iter().enumerate().rev() {
        if c.is_zero() {
            continue;
        }
        if !s.is_empty() {
            s.push_str(" + ");
        }
        let cs = c.show(f, "x");
        match j {
            0 => s.push_str(&cs),
            1 => {
                let _ = write!(s, "({cs})*T");
            }
            _ => {
                let _ = write!(s, "({cs})*T^{j}");
            }
        }
    }
    s
}
