//! Linear algebra over `F_q`, `F_q[x]` and `F_q(x)`.
//!
//! Systems over `F_q(x)` are cleared of denominators row by row and then
//! eliminated fraction-free over `F_q[x]`: every division in the elimination
//! is exact, so entries stay polynomial and their degrees stay bounded by the
//! corresponding minors.

use super::field::{FieldCtx, FqElem};
use super::poly::Poly;
use super::ratfunc::RatFunc;
use crate::error::{Error, Result};

/// Dense matrix over `F_q[x]`, row major.
pub type PolyMatrix = Vec<Vec<Poly>>;

fn check_rect<T>(m: &[Vec<T>]) -> Result<usize> {
    let cols = m.first().map_or(0, Vec::len);
    if m.iter().any(|row| row.len() != cols) {
        return Err(Error::DimensionMismatch("ragged matrix".into()));
    }
    Ok(cols)
}

/// Multiplies each row by the lcm of its denominators.
fn clear_denominators(m: &[Vec<RatFunc>], f: &FieldCtx) -> PolyMatrix {
    m.iter()
        .map(|row| {
            let mut l = Poly::one();
            for e in row {
                let g = l.gcd(e.den(), f);
                l = l.mul(&e.den().divrem(&g, f).0, f);
            }
            row.iter()
                .map(|e| e.num().mul(&l.divrem(e.den(), f).0, f))
                .collect()
        })
        .collect()
}

/// Fraction-free row echelon form in place. Returns the pivot columns.
///
/// Only the first `ncols` columns are used for pivoting; later columns (an
/// augmented right-hand side) are carried along.
fn ff_echelon(m: &mut PolyMatrix, ncols: usize, f: &FieldCtx) -> Vec<usize> {
    let rows = m.len();
    let width = m.first().map_or(0, Vec::len);
    let mut pivots = vec![];
    let mut prev = Poly::one();
    let mut r = 0;
    for c in 0..ncols {
        if r == rows {
            break;
        }
        // lowest-degree pivot keeps intermediate degrees small
        let Some(pr) = (r..rows)
            .filter(|&i| !m[i][c].is_zero())
            .min_by_key(|&i| m[i][c].degree())
        else {
            continue;
        };
        m.swap(r, pr);
        let piv = m[r][c].clone();
        for i in r + 1..rows {
            let a = m[i][c].clone();
            for j in 0..width {
                let v = m[i][j].mul(&piv, f).sub(&m[r][j].mul(&a, f), f);
                m[i][j] = v.exact_div(&prev, f).expect("fraction-free step is exact");
            }
        }
        prev = piv;
        pivots.push(c);
        r += 1;
    }
    pivots
}

/// Back substitution on an echelon form with the given pivots, free
/// variables fixed by `free`.
fn back_substitute(
    m: &PolyMatrix,
    pivots: &[usize],
    ncols: usize,
    rhs_col: Option<usize>,
    free: &[(usize, RatFunc)],
    f: &FieldCtx,
) -> Vec<RatFunc> {
    let mut x = vec![RatFunc::zero(); ncols];
    for (col, val) in free {
        x[*col] = val.clone();
    }
    for (row, &pc) in pivots.iter().enumerate().rev() {
        let mut acc = match rhs_col {
            Some(c) => RatFunc::from_poly(m[row][c].clone()),
            None => RatFunc::zero(),
        };
        for j in pc + 1..ncols {
            if m[row][j].is_zero() || x[j].is_zero() {
                continue;
            }
            acc = acc.sub(&x[j].mul_poly(&m[row][j], f), f);
        }
        x[pc] = acc
            .div(&RatFunc::from_poly(m[row][pc].clone()), f)
            .expect("pivot is nonzero");
    }
    x
}

/// Solves `matrix * s = rhs` over `F_q(x)`.
///
/// Returns `Ok(None)` for an inconsistent system. Underdetermined systems
/// get the solution with all free variables set to zero.
pub fn solve_linear(
    matrix: &[Vec<RatFunc>],
    rhs: &[RatFunc],
    f: &FieldCtx,
) -> Result<Option<Vec<RatFunc>>> {
    let ncols = check_rect(matrix)?;
    if rhs.len() != matrix.len() {
        return Err(Error::DimensionMismatch(format!(
            "{} rows but right-hand side of length {}",
            matrix.len(),
            rhs.len()
        )));
    }
    let aug: Vec<Vec<RatFunc>> = matrix
        .iter()
        .zip(rhs)
        .map(|(row, b)| row.iter().cloned().chain(std::iter::once(b.clone())).collect())
        .collect();
    let mut m = clear_denominators(&aug, f);
    let pivots = ff_echelon(&mut m, ncols, f);
    if m[pivots.len()..].iter().any(|row| !row[ncols].is_zero()) {
        return Ok(None);
    }
    Ok(Some(back_substitute(&m, &pivots, ncols, Some(ncols), &[], f)))
}

/// A basis of `{s : matrix * s = 0}` over `F_q(x)`.
pub fn null_space(matrix: &[Vec<RatFunc>], f: &FieldCtx) -> Result<Vec<Vec<RatFunc>>> {
    let ncols = check_rect(matrix)?;
    let mut m = clear_denominators(matrix, f);
    let pivots = ff_echelon(&mut m, ncols, f);
    let free: Vec<usize> = (0..ncols).filter(|c| !pivots.contains(c)).collect();
    Ok(free
        .iter()
        .map(|&fc| back_substitute(&m, &pivots, ncols, None, &[(fc, RatFunc::one())], f))
        .collect())
}

/// For a square matrix `m` over `F_q[x]`, returns `(det, adj)` with
/// `adj * m = det * I` and `det` nonzero, where `det` equals the determinant
/// up to sign. `None` if `m` is singular.
///
/// Fraction-free Gauss-Jordan on `[m | I]`: after the last step the left
/// block is `det * I` and the right block is `det * m^{-1}`.
pub fn scaled_inverse(m: &PolyMatrix, f: &FieldCtx) -> Result<Option<(Poly, PolyMatrix)>> {
    let n = check_rect(m)?;
    if n != m.len() {
        return Err(Error::DimensionMismatch("scaled_inverse needs a square matrix".into()));
    }
    let mut a: PolyMatrix = m
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..n).map(|j| if i == j { Poly::one() } else { Poly::zero() }));
            r
        })
        .collect();
    let mut prev = Poly::one();
    for k in 0..n {
        let Some(pr) = (k..n)
            .filter(|&i| !a[i][k].is_zero())
            .min_by_key(|&i| a[i][k].degree())
        else {
            return Ok(None);
        };
        a.swap(k, pr);
        let piv = a[k][k].clone();
        for i in 0..n {
            if i == k {
                continue;
            }
            let c = a[i][k].clone();
            for j in 0..2 * n {
                if j == k {
                    continue;
                }
                let v = a[i][j].mul(&piv, f).sub(&a[k][j].mul(&c, f), f);
                a[i][j] = v.exact_div(&prev, f).expect("fraction-free step is exact");
            }
            a[i][k] = Poly::zero();
        }
        prev = piv;
    }
    let det = prev;
    let adj = a.into_iter().map(|row| row[n..].to_vec()).collect();
    Ok(Some((det, adj)))
}

/// Row-reduces `rows` over `F_q` and returns a basis of the null space of
/// the matrix whose rows they are (vectors `s` with `row . s = 0`).
pub fn fq_null_space(rows: &[Vec<FqElem>], ncols: usize, f: &FieldCtx) -> Vec<Vec<FqElem>> {
    let mut m: Vec<Vec<FqElem>> = rows.to_vec();
    let mut pivots = vec![];
    let mut r = 0;
    for c in 0..ncols {
        let Some(pr) = (r..m.len()).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, pr);
        let inv = f.inv(m[r][c]);
        for v in m[r].iter_mut() {
            *v = f.mul(*v, inv);
        }
        for i in 0..m.len() {
            if i == r || m[i][c].is_zero() {
                continue;
            }
            let k = m[i][c];
            for j in c..ncols {
                let t = f.mul(k, m[r][j]);
                m[i][j] = f.sub(m[i][j], t);
            }
        }
        pivots.push(c);
        r += 1;
        if r == m.len() {
            break;
        }
    }
    (0..ncols)
        .filter(|c| !pivots.contains(c))
        .map(|fc| {
            let mut s = vec![FqElem::ZERO; ncols];
            s[fc] = FqElem::ONE;
            for (row, &pc) in pivots.iter().enumerate() {
                s[pc] = f.neg(m[row][fc]);
            }
            s
        })
        .collect()
}

/// An incrementally built basis of a subspace of `F_q^n`.
///
/// Vectors are kept in semi-echelon form (each stored row vanishes on the
/// pivots of earlier rows) together with their expression in terms of the
/// vectors originally inserted, so membership queries also return
/// coordinates with respect to the inserted vectors.
#[derive(Clone, Debug, Default)]
pub struct FqBasis {
    rows: Vec<(usize, Vec<FqElem>, Vec<FqElem>)>,
}

impl FqBasis {
    pub fn new() -> FqBasis {
        FqBasis::default()
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// Reduces `v` against the basis: returns the residual and the
    /// coordinates of `v - residual` in terms of the inserted vectors.
    fn reduce(&self, v: &[FqElem], f: &FieldCtx) -> (Vec<FqElem>, Vec<FqElem>) {
        let mut res = v.to_vec();
        let mut coords = vec![FqElem::ZERO; self.rows.len()];
        for (pc, row, comb) in &self.rows {
            let k = res.get(*pc).copied().unwrap_or(FqElem::ZERO);
            if k.is_zero() {
                continue;
            }
            for (a, &b) in res.iter_mut().zip(row) {
                *a = f.sub(*a, f.mul(k, b));
            }
            for (a, &b) in coords.iter_mut().zip(comb) {
                *a = f.add(*a, f.mul(k, b));
            }
        }
        (res, coords)
    }

    /// Coordinates of `v` in terms of the inserted vectors, or `None` if `v`
    /// is outside their span.
    pub fn coordinates(&self, v: &[FqElem], f: &FieldCtx) -> Option<Vec<FqElem>> {
        let (res, coords) = self.reduce(v, f);
        res.iter().all(|c| c.is_zero()).then_some(coords)
    }

    /// Inserts `v` if it is independent. Returns its coordinates when it was
    /// already in the span, `None` when it was added as a new basis vector.
    pub fn insert(&mut self, v: &[FqElem], f: &FieldCtx) -> Option<Vec<FqElem>> {
        let (res, coords) = self.reduce(v, f);
        let Some(pc) = res.iter().position(|c| !c.is_zero()) else {
            return Some(coords);
        };
        let inv = f.inv(res[pc]);
        let row: Vec<FqElem> = res.iter().map(|&c| f.mul(c, inv)).collect();
        // row = (v - sum coords_j b_j) / res[pc]
        let n = self.rows.len();
        let mut comb: Vec<FqElem> = coords.iter().map(|&c| f.neg(f.mul(c, inv))).collect();
        comb.push(inv);
        for (_, _, c) in self.rows.iter_mut() {
            c.resize(n + 1, FqElem::ZERO);
        }
        self.rows.push((pc, row, comb));
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(f: &FieldCtx, c: &[i64]) -> Poly {
        Poly::from_coeffs(c.iter().map(|&v| f.from_int(v)).collect())
    }

    fn rf(f: &FieldCtx, n: &[i64], d: &[i64]) -> RatFunc {
        RatFunc::new(p(f, n), p(f, d), f).unwrap()
    }

    #[test]
    fn identity_system() {
        let f = FieldCtx::prime(5).unwrap();
        let id = vec![
            vec![RatFunc::one(), RatFunc::zero()],
            vec![RatFunc::zero(), RatFunc::one()],
        ];
        let v = vec![rf(&f, &[1, 2], &[3, 1]), rf(&f, &[0, 0, 4], &[1])];
        assert_eq!(solve_linear(&id, &v, &f).unwrap().unwrap(), v);
    }

    #[test]
    fn scalar_system() {
        let f = FieldCtx::prime(5).unwrap();
        let m = vec![vec![rf(&f, &[0, 1], &[1])]];
        let s = solve_linear(&m, &[rf(&f, &[0, 0, 1], &[1])], &f).unwrap().unwrap();
        assert_eq!(s, vec![rf(&f, &[0, 1], &[1])]);
    }

    #[test]
    fn inconsistent_system() {
        let f = FieldCtx::prime(5).unwrap();
        let m = vec![vec![RatFunc::one()], vec![RatFunc::one()]];
        let b = vec![RatFunc::one(), RatFunc::zero()];
        assert_eq!(solve_linear(&m, &b, &f).unwrap(), None);
    }

    #[test]
    fn ragged_rejected() {
        let f = FieldCtx::prime(5).unwrap();
        let m = vec![vec![RatFunc::one()], vec![]];
        assert!(matches!(null_space(&m, &f), Err(Error::DimensionMismatch(_))));
        let m = vec![vec![RatFunc::one()]];
        assert!(matches!(solve_linear(&m, &[], &f), Err(Error::DimensionMismatch(_))));
    }

    #[test]
    fn null_space_annihilates() {
        let f = FieldCtx::prime(7).unwrap();
        let m = vec![
            vec![rf(&f, &[1], &[1, 1]), rf(&f, &[0, 1], &[1]), rf(&f, &[2], &[1])],
            vec![rf(&f, &[2], &[1, 1]), rf(&f, &[0, 2], &[1]), rf(&f, &[4], &[1])],
        ];
        let ns = null_space(&m, &f).unwrap();
        assert_eq!(ns.len(), 2);
        for s in &ns {
            for row in &m {
                let dot = row
                    .iter()
                    .zip(s)
                    .fold(RatFunc::zero(), |acc, (a, b)| acc.add(&a.mul(b, &f), &f));
                assert!(dot.is_zero());
            }
        }
    }

    #[test]
    fn scaled_inverse_recovers_identity() {
        let f = FieldCtx::prime(3).unwrap();
        let m = vec![
            vec![p(&f, &[1, 1]), p(&f, &[0, 2]), p(&f, &[1])],
            vec![p(&f, &[0, 0, 1]), p(&f, &[2]), p(&f, &[1, 0, 1])],
            vec![p(&f, &[1]), p(&f, &[1, 1, 1]), p(&f, &[0, 1])],
        ];
        let (det, adj) = scaled_inverse(&m, &f).unwrap().unwrap();
        assert!(!det.is_zero());
        for i in 0..3 {
            for j in 0..3 {
                let mut acc = Poly::zero();
                for k in 0..3 {
                    acc = acc.add(&adj[i][k].mul(&m[k][j], &f), &f);
                }
                let want = if i == j { det.clone() } else { Poly::zero() };
                assert_eq!(acc, want);
            }
        }
    }

    #[test]
    fn scaled_inverse_detects_singular() {
        let f = FieldCtx::prime(3).unwrap();
        let m = vec![vec![p(&f, &[1, 1]), p(&f, &[2, 2])], vec![p(&f, &[1]), p(&f, &[2])]];
        assert!(scaled_inverse(&m, &f).unwrap().is_none());
    }

    #[test]
    fn fq_basis_coordinates() {
        let f = FieldCtx::prime(5).unwrap();
        let e = |v: &[i64]| v.iter().map(|&c| f.from_int(c)).collect::<Vec<_>>();
        let mut b = FqBasis::new();
        assert!(b.insert(&e(&[1, 2, 0]), &f).is_none());
        assert!(b.insert(&e(&[0, 1, 1]), &f).is_none());
        // 2*(1,2,0) + 3*(0,1,1) = (2,2,3)
        assert_eq!(b.insert(&e(&[2, 2, 3]), &f), Some(e(&[2, 3])));
        assert_eq!(b.coordinates(&e(&[0, 0, 1]), &f), None);
        assert_eq!(b.len(), 2);
    }

    #[test]
    fn fq_null_space_basic() {
        let f = FieldCtx::prime(3).unwrap();
        let e = |v: &[i64]| v.iter().map(|&c| f.from_int(c)).collect::<Vec<_>>();
        let ns = fq_null_space(&[e(&[1, 1, 0]), e(&[0, 1, 1])], 3, &f);
        assert_eq!(ns, vec![e(&[1, 2, 1])]);
    }
}
