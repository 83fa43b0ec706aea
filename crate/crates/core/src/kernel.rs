//! Kernels: the orbit of a series under the decimations `a(n) -> a(q n + c)`,
//! and the linear representation carried by its span.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::hash::Hash;

use crate::algebra::linalg::FqBasis;
use crate::algebra::{FieldCtx, FqElem, Poly};
use crate::error::{Error, Result};
use crate::function_field::{FFElem, PlaneCurve};
use crate::series::{ff_to_series, trunc_lambda_q, TruncSeries};

/// Default cap on the number of kernel states.
pub const DEFAULT_MAX_STATES: usize = 1_000_000;

/// Minimum number of known coefficients a stored truncated state must keep.
pub const MIN_KNOWN_COEFFS: usize = 8;

/// A kernel: states in breadth-first order from the start element, their
/// decimation table and constant terms.
#[derive(Clone, Debug)]
pub struct Kernel<S> {
    q: usize,
    states: Vec<S>,
    transitions: Vec<Vec<usize>>,
    outputs: Vec<FqElem>,
}

impl<S> Kernel<S> {
    pub fn q(&self) -> usize {
        self.q
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn states(&self) -> &[S] {
        &self.states
    }

    /// `transitions()[s][c]` is the state reached from `s` by digit `c`.
    pub fn transitions(&self) -> &[Vec<usize>] {
        &self.transitions
    }

    /// Constant term of each state.
    pub fn outputs(&self) -> &[FqElem] {
        &self.outputs
    }

    /// The same kernel with each state replaced by `g(state)`.
    pub fn map_states<T>(&self, g: impl Fn(&S) -> T) -> Kernel<T> {
        Kernel {
            q: self.q,
            states: self.states.iter().map(g).collect(),
            transitions: self.transitions.clone(),
            outputs: self.outputs.clone(),
        }
    }

    /// Text table `state | digit -> state | output`, followed by the
    /// representative of each state.
    pub fn dump(&self, show: impl Fn(&S) -> String) -> String {
        let mut out = String::from("state | ");
        let digits: Vec<String> = (0..self.q).map(|c| format!("{c}->")).collect();
        out.push_str(&digits.join(" "));
        out.push_str(" | output\n");
        for (s, row) in self.transitions.iter().enumerate() {
            let targets: Vec<String> = row.iter().map(|t| format!("q{t}")).collect();
            let _ = writeln!(out, "q{s} | {} | {}", targets.join(" "), self.outputs[s]);
        }
        out.push('\n');
        for (s, st) in self.states.iter().enumerate() {
            let _ = writeln!(out, "q{s} = {}", show(st));
        }
        out
    }
}

/// Breadth-first closure of `start` under `children`, with states
/// identified by equality.
fn bfs<S: Clone + Eq + Hash>(
    q: usize,
    start: S,
    max_states: usize,
    mut children: impl FnMut(&S) -> Result<Vec<S>>,
) -> Result<(Vec<S>, Vec<Vec<usize>>)> {
    let mut index: HashMap<S, usize> = HashMap::new();
    let mut states = vec![start.clone()];
    index.insert(start, 0);
    let mut transitions: Vec<Vec<usize>> = vec![];
    let mut head = 0;
    while head < states.len() {
        let kids = children(&states[head])?;
        debug_assert_eq!(kids.len(), q);
        let mut row = Vec::with_capacity(q);
        for kid in kids {
            let id = match index.get(&kid) {
                Some(&id) => id,
                None => {
                    if states.len() >= max_states {
                        return Err(Error::StateLimit(max_states));
                    }
                    let id = states.len();
                    index.insert(kid.clone(), id);
                    states.push(kid);
                    id
                }
            };
            row.push(id);
        }
        transitions.push(row);
        head += 1;
    }
    Ok((states, transitions))
}

/// Constant term of `u` along `branch`.
pub fn constant_term(curve: &PlaneCurve, branch: &TruncSeries, u: &FFElem) -> Result<FqElem> {
    Ok(ff_to_series(curve, branch, u, 1)?.coeff(0))
}

/// The exact kernel of `start`, computed in the function field.
///
/// `branch` fixes the embedding into power series and is only used for the
/// constant terms.
pub fn enumerate_kernel(
    curve: &PlaneCurve,
    start: &FFElem,
    branch: &TruncSeries,
    max_states: usize,
) -> Result<Kernel<FFElem>> {
    let q = curve.field().q() as usize;
    let (states, transitions) = bfs(q, start.clone(), max_states, |u| Ok(curve.lambda_all(u)))?;
    let outputs = states
        .iter()
        .map(|u| constant_term(curve, branch, u))
        .collect::<Result<Vec<_>>>()?;
    Ok(Kernel { q, states, transitions, outputs })
}

/// A `q`-representation: `a(n) = functional . phi(c_k) ... phi(c_0) . start`
/// where `c_0` is the least significant base-`q` digit of `n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Representation {
    pub dim: usize,
    /// `matrices[c][row][col]`.
    pub matrices: Vec<Vec<Vec<FqElem>>>,
    pub start: Vec<FqElem>,
    pub functional: Vec<FqElem>,
}

impl Representation {
    pub fn q(&self) -> usize {
        self.matrices.len()
    }

    /// `phi(c) w`.
    pub fn apply(&self, c: usize, w: &[FqElem], f: &FieldCtx) -> Vec<FqElem> {
        self.matrices[c]
            .iter()
            .map(|row| dot(row, w, f))
            .collect()
    }

    /// `mu phi(c)`, the transposed action on functionals.
    pub fn apply_transpose(&self, c: usize, mu: &[FqElem], f: &FieldCtx) -> Vec<FqElem> {
        let m = &self.matrices[c];
        (0..self.dim)
            .map(|col| {
                (0..self.dim).fold(FqElem::ZERO, |acc, row| f.add(acc, f.mul(mu[row], m[row][col])))
            })
            .collect()
    }

    /// The term `a(n)`.
    pub fn eval(&self, n: u64, f: &FieldCtx) -> FqElem {
        let q = self.q() as u64;
        let mut w = self.start.clone();
        let mut n = n;
        while n > 0 {
            w = self.apply((n % q) as usize, &w, f);
            n /= q;
        }
        dot(&self.functional, &w, f)
    }
}

pub(crate) fn dot(a: &[FqElem], b: &[FqElem], f: &FieldCtx) -> FqElem {
    a.iter().zip(b).fold(FqElem::ZERO, |acc, (&x, &y)| f.add(acc, f.mul(x, y)))
}

/// Assembles a representation from an F_q-basis given as indices into a
/// kernel and a coordinate function on the span.
fn representation_from_basis<S>(
    kernel: &Kernel<S>,
    basis_states: &[usize],
    coords_of: impl Fn(usize) -> Result<Vec<FqElem>>,
) -> Result<Representation> {
    let m = basis_states.len();
    let q = kernel.q;
    let mut matrices = vec![vec![vec![FqElem::ZERO; m]; m]; q];
    for (j, &bs) in basis_states.iter().enumerate() {
        for c in 0..q {
            let coords = coords_of(kernel.transitions[bs][c])?;
            for (row, v) in coords.into_iter().enumerate() {
                matrices[c][row][j] = v;
            }
        }
    }
    let start = coords_of(0)?;
    let functional = basis_states.iter().map(|&s| kernel.outputs[s]).collect();
    Ok(Representation { dim: m, matrices, start, functional })
}

/// The representation on the `F_q`-span of an exact kernel.
///
/// Elements are written over a common denominator and flattened into
/// coefficient vectors; a basis is then chosen greedily in state order.
pub fn extract_representation(curve: &PlaneCurve, kernel: &Kernel<FFElem>) -> Result<Representation> {
    let f = curve.field();
    let mut den = Poly::one();
    for u in &kernel.states {
        let d = u.common_den(f);
        let g = den.gcd(&d, f);
        den = den.mul(&d.divrem(&g, f).0, f);
    }
    let numerators: Vec<Vec<Poly>> = kernel
        .states
        .iter()
        .map(|u| {
            u.coords()
                .iter()
                .map(|c| c.num().mul(&den.divrem(c.den(), f).0, f))
                .collect()
        })
        .collect();
    let width = numerators
        .iter()
        .flatten()
        .map(|p| p.coeffs().len())
        .max()
        .unwrap_or(0);
    let flat: Vec<Vec<FqElem>> = numerators
        .iter()
        .map(|coords| {
            let mut v = Vec::with_capacity(width * coords.len());
            for p in coords {
                v.extend((0..width).map(|i| p.coeff(i)));
            }
            v
        })
        .collect();
    let mut basis = FqBasis::new();
    let mut basis_states = vec![];
    for (s, v) in flat.iter().enumerate() {
        if basis.insert(v, f).is_none() {
            basis_states.push(s);
        }
    }
    representation_from_basis(kernel, &basis_states, |s| {
        basis
            .coordinates(&flat[s], f)
            .ok_or_else(|| Error::Internal(format!("kernel state {s} outside its own span")))
    })
}

/// Kernel computed from a truncated series, together with the
/// representation it was derived from.
#[derive(Clone, Debug)]
pub struct TruncatedKernel {
    pub kernel: Kernel<TruncSeries>,
    pub representation: Representation,
}

/// The kernel of a truncated series.
///
/// Plain breadth-first search on truncations loses a factor `q` of
/// precision per level, so instead the span of the orbit is tracked: a
/// basis of stored series (each with at least [`MIN_KNOWN_COEFFS`] known
/// terms) is grown until every decimation of every basis series is a
/// combination of basis series on their common known prefix. The kernel is
/// then the orbit of the start vector under the resulting matrices, and
/// states are represented by the corresponding combinations.
///
/// This is a heuristic: a decimation that agrees with a combination of the
/// basis on the known prefix but differs later is conflated with it. It
/// refuses with [`Error::Precision`] whenever the known prefixes are too
/// short to decide.
pub fn kernel_truncated(
    s: &TruncSeries,
    f: &FieldCtx,
    max_states: usize,
) -> Result<TruncatedKernel> {
    let q = f.q() as usize;
    let exhausted = || Error::Precision { have: s.precision(), need: s.precision() * q };
    let mut basis: Vec<TruncSeries> = vec![];
    // columns[j][c] = coordinates of lambda_c(basis[j]), grown as the basis grows
    let mut columns: Vec<Vec<Vec<FqElem>>> = vec![];

    let start = match express(&basis, s, f)? {
        Some(coords) => coords,
        None => {
            if s.precision() < MIN_KNOWN_COEFFS {
                return Err(exhausted());
            }
            basis.push(s.clone());
            vec![FqElem::ONE]
        }
    };
    let mut j = 0;
    while j < basis.len() {
        let mut col = Vec::with_capacity(q);
        for c in 0..q {
            let child = trunc_lambda_q(f, c, &basis[j]).map_err(|_| exhausted())?;
            let coords = match express(&basis, &child, f)? {
                Some(coords) => coords,
                None => {
                    if child.precision() < MIN_KNOWN_COEFFS {
                        return Err(exhausted());
                    }
                    basis.push(child);
                    let mut e = vec![FqElem::ZERO; basis.len()];
                    e[basis.len() - 1] = FqElem::ONE;
                    e
                }
            };
            col.push(coords);
        }
        columns.push(col);
        j += 1;
    }
    let m = basis.len();
    let pad = |mut v: Vec<FqElem>| {
        v.resize(m, FqElem::ZERO);
        v
    };
    let mut matrices = vec![vec![vec![FqElem::ZERO; m]; m]; q];
    for (j, col) in columns.into_iter().enumerate() {
        for (c, coords) in col.into_iter().enumerate() {
            for (row, v) in pad(coords).into_iter().enumerate() {
                matrices[c][row][j] = v;
            }
        }
    }
    let functional: Vec<FqElem> = basis.iter().map(|b| b.coeff(0)).collect();
    let representation = Representation { dim: m, matrices, start: pad(start), functional };

    let (vectors, transitions) = bfs(q, representation.start.clone(), max_states, |w| {
        Ok((0..q).map(|c| representation.apply(c, w, f)).collect())
    })?;
    let states = vectors.iter().map(|w| combine(&basis, w, f)).collect();
    let outputs = vectors.iter().map(|w| dot(&representation.functional, w, f)).collect();
    Ok(TruncatedKernel {
        kernel: Kernel { q, states, transitions, outputs },
        representation,
    })
}

/// `sum_j w_j basis[j]`, known to the shortest precision involved.
fn combine(basis: &[TruncSeries], w: &[FqElem], f: &FieldCtx) -> TruncSeries {
    let mut acc: Option<TruncSeries> = None;
    for (b, &c) in basis.iter().zip(w) {
        if c.is_zero() {
            continue;
        }
        let term = b.scale(c, f);
        acc = Some(match acc {
            None => term,
            Some(a) => a.add(&term, f),
        });
    }
    acc.unwrap_or_else(|| {
        let n = basis.iter().map(TruncSeries::precision).min().unwrap_or(MIN_KNOWN_COEFFS);
        TruncSeries::zero(n)
    })
}

/// Coordinates of `s` in terms of `basis`, using every coefficient known for
/// all of them; `None` if `s` is independent on that prefix.
///
/// Refuses when the prefix is too short to separate the basis itself.
fn express(basis: &[TruncSeries], s: &TruncSeries, f: &FieldCtx) -> Result<Option<Vec<FqElem>>> {
    let len = basis
        .iter()
        .map(TruncSeries::precision)
        .chain(std::iter::once(s.precision()))
        .min()
        .expect("nonempty");
    let mut fb = FqBasis::new();
    for b in basis {
        if fb.insert(&b.coeffs()[..len], f).is_some() {
            return Err(Error::Precision { have: len, need: MIN_KNOWN_COEFFS.max(2 * len) });
        }
    }
    Ok(fb.coordinates(&s.coeffs()[..len], f))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::hensel_expand;

    fn poly(f: &FieldCtx, c: &[i64]) -> Poly {
        Poly::from_coeffs(c.iter().map(|&v| f.from_int(v)).collect())
    }

    fn curve(p: u32, cols: &[&[i64]]) -> PlaneCurve {
        let f = FieldCtx::prime(p).unwrap();
        let coeffs = cols.iter().map(|c| poly(&f, c)).collect();
        PlaneCurve::new(f, coeffs).unwrap()
    }

    fn exact(c: &PlaneCurve) -> (Kernel<FFElem>, TruncSeries) {
        let branch = hensel_expand(c, FqElem::ONE, 64).unwrap();
        (enumerate_kernel(c, &c.y(), &branch, DEFAULT_MAX_STATES).unwrap(), branch)
    }

    #[test]
    fn powers_of_two_mod_seven() {
        let c = curve(7, &[&[-1], &[1, -2]]);
        let (k, _) = exact(&c);
        assert_eq!(k.len(), 3);
        let f = c.field();
        let y = c.y();
        for (s, e) in k.states().iter().zip([1, 2, 4]) {
            assert_eq!(*s, c.scale_fq(&y, f.from_int(e)));
        }
        let rep = extract_representation(&c, &k).unwrap();
        assert_eq!(rep.dim, 1);
        for i in 0..7 {
            assert_eq!(rep.matrices[i], vec![vec![f.pow(f.from_int(2), i as u64)]]);
        }
        assert_eq!(rep.start, vec![FqElem::ONE]);
        assert_eq!(rep.functional, vec![FqElem::ONE]);
    }

    #[test]
    fn central_binomial_mod_five() {
        let c = curve(5, &[&[-1], &[], &[1, -4]]);
        let (k, _) = exact(&c);
        assert_eq!(k.len(), 5);
        let rep = extract_representation(&c, &k).unwrap();
        assert_eq!(rep.dim, 1);
        let binom = [1, 2, 6, 20, 70];
        for i in 0..5 {
            assert_eq!(rep.matrices[i][0][0], c.field().from_int(binom[i]));
        }
    }

    #[test]
    fn elliptic_mod_five_has_plane_span() {
        let c = curve(5, &[&[-1], &[], &[1, 0, 0, -4]]);
        let (k, _) = exact(&c);
        assert_eq!(k.len(), 9);
        assert_eq!(extract_representation(&c, &k).unwrap().dim, 2);
    }

    #[test]
    fn artin_schreier_degree_four() {
        let f = FieldCtx::prime(2).unwrap();
        let c = PlaneCurve::new(f.clone(), vec![poly(&f, &[0, 1]), Poly::one(), Poly::zero(), Poly::zero(), Poly::one()]).unwrap();
        let branch = hensel_expand(&c, FqElem::ZERO, 64).unwrap();
        let k = enumerate_kernel(&c, &c.y(), &branch, DEFAULT_MAX_STATES).unwrap();
        assert_eq!(k.len(), 4);
    }

    #[test]
    fn state_limit() {
        let c = curve(7, &[&[-1], &[1, -2]]);
        let branch = hensel_expand(&c, FqElem::ONE, 8).unwrap();
        assert_eq!(enumerate_kernel(&c, &c.y(), &branch, 2).unwrap_err(), Error::StateLimit(2));
    }

    #[test]
    fn truncated_examples() {
        let f2 = FieldCtx::prime(2).unwrap();
        let tm: Vec<FqElem> = (0u32..512).map(|n| f2.elem(n.count_ones() % 2)).collect();
        let tm = TruncSeries::new(tm).unwrap();
        assert_eq!(kernel_truncated(&tm, &f2, DEFAULT_MAX_STATES).unwrap().kernel.len(), 2);
        // the all-ones sequence is fixed by every decimation
        let ones = TruncSeries::new(vec![FqElem::ONE; 512]).unwrap();
        assert_eq!(kernel_truncated(&ones, &f2, DEFAULT_MAX_STATES).unwrap().kernel.len(), 1);
        // while 1 + 0x + 0x^2 + .. decimates to zero on odd digits
        let one = TruncSeries::constant(FqElem::ONE, 512);
        assert_eq!(kernel_truncated(&one, &f2, DEFAULT_MAX_STATES).unwrap().kernel.len(), 2);
        let c = curve(7, &[&[-1], &[1, -2]]);
        let s = hensel_expand(&c, FqElem::ONE, 512).unwrap();
        assert_eq!(kernel_truncated(&s, c.field(), DEFAULT_MAX_STATES).unwrap().kernel.len(), 3);
        let zero = TruncSeries::zero(16);
        let k = kernel_truncated(&zero, &f2, DEFAULT_MAX_STATES).unwrap();
        assert_eq!(k.kernel.len(), 1);
        assert_eq!(k.representation.dim, 0);
    }

    #[test]
    fn truncated_precision_exhaustion() {
        let f2 = FieldCtx::prime(2).unwrap();
        let short = TruncSeries::new(vec![FqElem::ONE, FqElem::ZERO, FqElem::ONE]).unwrap();
        assert!(matches!(
            kernel_truncated(&short, &f2, DEFAULT_MAX_STATES),
            Err(Error::Precision { .. })
        ));
    }

    #[test]
    fn representation_reproduces_series() {
        let c = curve(5, &[&[-1], &[], &[1, 0, 0, -4]]);
        let (k, branch) = exact(&c);
        let rep = extract_representation(&c, &k).unwrap();
        for n in 0..64 {
            assert_eq!(rep.eval(n, c.field()), branch.coeff(n as usize));
        }
    }

    #[test]
    fn dump_lists_states() {
        let c = curve(7, &[&[-1], &[1, -2]]);
        let (k, _) = exact(&c);
        let text = k.dump(|u| c.show_elem(u));
        assert!(text.starts_with("state | 0-> 1-> 2-> 3-> 4-> 5-> 6-> | output\n"));
        assert!(text.contains("q2 = "));
    }
}
