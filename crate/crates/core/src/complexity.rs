//! State counts measured against the known upper bounds, base `p` versus
//! base `q`, and recovery of an annihilating polynomial from an automaton.

use std::fmt::Write as _;

use num_bigint::BigUint;
use num_traits::One;
use serde::Serialize;

use crate::algebra::linalg::fq_null_space;
use crate::algebra::{FieldCtx, FqElem, Poly};
use crate::automaton::{Convention, Dfao};
use crate::error::{Error, Result};
use crate::function_field::{FFElem, PlaneCurve};
use crate::kernel::{constant_term, Representation};
use crate::series::TruncSeries;

/// Largest argument accepted by [`landau`].
pub const LANDAU_MAX: usize = 200;

/// Landau's function: the largest lcm of a partition of `n`.
///
/// The maximum is attained by a sum of powers of distinct primes (padded
/// with ones), so a knapsack over primes suffices.
pub fn landau(n: usize) -> Result<u128> {
    if n > LANDAU_MAX {
        return Err(Error::InvalidInput(format!("landau({n}) is outside the table range 0..={LANDAU_MAX}")));
    }
    let primes: Vec<usize> = (2..=n.max(2)).filter(|&k| crate::algebra::field::is_prime(k as u64)).collect();
    // best[s] = largest product of distinct prime powers with total size <= s
    let mut best = vec![1u128; n + 1];
    for &p in &primes {
        for s in (0..=n).rev() {
            let mut pk = p;
            while pk <= s {
                let cand = best[s - pk] * pk as u128;
                if cand > best[s] {
                    best[s] = cand;
                }
                pk *= p;
            }
        }
    }
    Ok(best[n])
}

fn big_pow(q: u64, e: u64) -> BigUint {
    BigUint::from(q).pow(e as u32)
}

/// Smallest `k` with `p^k >= t` (zero for `t <= 1`).
fn ceil_log(p: u64, t: u64) -> u64 {
    let mut k = 0;
    let mut v = 1u128;
    while v < t as u128 {
        v *= p as u128;
        k += 1;
    }
    k
}

/// One bound and how the measured count compares with it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BoundCheck {
    pub formula: String,
    /// Decimal value of the bound.
    pub value: String,
    /// Which count is compared: `N_rev`, `N_fwd` or `max(N_rev, N_fwd)`.
    pub against: String,
    pub measured: usize,
    pub verdict: Verdict,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Verdict {
    #[serde(rename = "PASS")]
    Pass,
    #[serde(rename = "FAIL")]
    Fail,
}

impl Verdict {
    fn of(ok: bool) -> Verdict {
        if ok {
            Verdict::Pass
        } else {
            Verdict::Fail
        }
    }
}

impl BoundCheck {
    fn new(formula: String, value: BigUint, against: &str, measured: usize) -> BoundCheck {
        let verdict = Verdict::of(BigUint::from(measured) <= value);
        BoundCheck { formula, value: value.to_string(), against: against.into(), measured, verdict }
    }

    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Bounds {
    pub main: BoundCheck,
    /// Absent when `h + 2d` exceeds the Landau table.
    pub refined: Option<BoundCheck>,
    pub easy: BoundCheck,
    pub forward: BoundCheck,
    pub genus_free: BoundCheck,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ComplexityReport {
    pub p: u32,
    pub r: u32,
    pub q: u32,
    pub d: usize,
    pub h: usize,
    pub genus_input: Option<u64>,
    pub genus_bound: u64,
    /// Genus used in the formulas: the input, or `genus_bound` when absent.
    pub genus_used: u64,
    pub genus_substituted: bool,
    pub n_rev: usize,
    pub n_fwd: usize,
    pub bounds: Bounds,
}

/// Evaluates every bound for a curve of degree `d` and height `h`.
pub fn bounds_report(
    field: &FieldCtx,
    d: usize,
    h: usize,
    genus: Option<u64>,
    n_rev: usize,
    n_fwd: usize,
) -> ComplexityReport {
    let (p, r, q) = (field.p() as u64, field.r() as u64, field.q() as u64);
    let genus_bound = (d as u64).saturating_sub(1) * (h as u64).saturating_sub(1);
    let g = genus.unwrap_or(genus_bound);
    let (du, hu) = (d as u64, h as u64);
    let main_exp = hu + du + g - 1;
    let main = BoundCheck::new(format!("q^(h+d+g-1) = {q}^{main_exp}"), big_pow(q, main_exp), "N_rev", n_rev);
    let t = hu.max(du);
    let refined = landau(h + 2 * d).ok().map(|l| {
        let value = BigUint::one()
            + BigUint::from(ceil_log(p, t))
            + BigUint::from(r) * BigUint::from(l) * big_pow(q, g)
            + big_pow(q, main_exp);
        BoundCheck::new(
            format!("1 + ceil(log_p T) + r L(h+2d) q^g + q^(h+d+g-1), T = {t}, L({}) = {l}", h + 2 * d),
            value,
            "N_rev",
            n_rev,
        )
    });
    let easy_exp = hu + 3 * du + g - 1;
    let easy = BoundCheck::new(
        format!("q^(h+3d+g-1) = {q}^{easy_exp}"),
        big_pow(q, easy_exp),
        "max(N_rev, N_fwd)",
        n_rev.max(n_fwd),
    );
    let fwd_exp = hu + 2 * du + g - 1;
    let forward = BoundCheck::new(format!("q^(h+2d+g-1) = {q}^{fwd_exp}"), big_pow(q, fwd_exp), "N_fwd", n_fwd);
    let genus_free = BoundCheck::new(format!("q^(hd) = {q}^{}", hu * du), big_pow(q, hu * du), "N_rev", n_rev);
    ComplexityReport {
        p: p as u32,
        r: r as u32,
        q: q as u32,
        d,
        h,
        genus_input: genus,
        genus_bound,
        genus_used: g,
        genus_substituted: genus.is_none(),
        n_rev,
        n_fwd,
        bounds: Bounds { main, refined, easy, forward, genus_free },
    }
}

impl ComplexityReport {
    pub fn all_pass(&self) -> bool {
        let b = &self.bounds;
        [&b.main, &b.easy, &b.forward, &b.genus_free]
            .into_iter()
            .chain(b.refined.as_ref())
            .all(BoundCheck::passed)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("plain data serializes") + "\n"
    }

    /// Aligned text table.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "field      F_{} (p = {}, r = {})", self.q, self.p, self.r);
        let _ = writeln!(s, "degree d   {}", self.d);
        let _ = writeln!(s, "height h   {}", self.h);
        match self.genus_input {
            Some(g) => {
                let _ = writeln!(s, "genus g    {g} (given)");
            }
            None => {
                let _ = writeln!(
                    s,
                    "genus g    {} (not given; using the bound (d-1)(h-1))",
                    self.genus_bound
                );
            }
        }
        let _ = writeln!(s, "N_rev      {}", self.n_rev);
        let _ = writeln!(s, "N_fwd      {}", self.n_fwd);
        s.push('\n');
        let b = &self.bounds;
        let mut rows: Vec<(&str, Option<&BoundCheck>)> = vec![
            ("main", Some(&b.main)),
            ("refined", b.refined.as_ref()),
            ("easy", Some(&b.easy)),
            ("forward", Some(&b.forward)),
            ("genus_free", Some(&b.genus_free)),
        ];
        let header = ("bound", "compared", "value", "verdict");
        let w_val = rows
            .iter()
            .filter_map(|(_, c)| c.map(|c| c.value.len()))
            .max()
            .unwrap_or(0)
            .max(header.2.len());
        let w_cmp = rows
            .iter()
            .filter_map(|(_, c)| c.map(|c| format!("{} = {}", c.against, c.measured).len()))
            .max()
            .unwrap_or(0)
            .max(header.1.len());
        let _ = writeln!(s, "{:<10}  {:<w_cmp$}  {:>w_val$}  {}", header.0, header.1, header.2, header.3);
        for (name, check) in rows.drain(..) {
            match check {
                Some(c) => {
                    let cmp = format!("{} = {}", c.against, c.measured);
                    let verdict = if c.passed() { "PASS" } else { "FAIL" };
                    let _ = writeln!(s, "{name:<10}  {cmp:<w_cmp$}  {:>w_val$}  {verdict}", c.value);
                }
                None => {
                    let _ = writeln!(s, "{name:<10}  {:<w_cmp$}  {:>w_val$}  SKIP", "-", "n/a");
                }
            }
        }
        s
    }
}

/// State counts in base `p` and base `q = p^r` for the same sequence.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BaseComparison {
    pub p: u32,
    pub q: u32,
    pub n_p: usize,
    pub n_q: usize,
    /// `N_q <= N_p`.
    pub lower: bool,
    /// `(p - 1) N_p <= (q - 1) N_q`.
    pub upper: bool,
}

impl BaseComparison {
    pub fn holds(&self) -> bool {
        self.lower && self.upper
    }
}

/// The minimal base-`p` reverse DFAO of the series of `start`.
///
/// After `j` base-`p` decimations the element `u` carries the coefficients
/// `a(p^j n + c)^(1/p^j)`; the decimated sequence itself is recovered by
/// raising them to the power `p^(j mod r)`. States are therefore pairs
/// `(u, j mod r)`, and minimizing identifies pairs with equal sequences.
pub fn base_p_dfao(
    curve: &PlaneCurve,
    start: &FFElem,
    branch: &TruncSeries,
    max_states: usize,
) -> Result<Dfao> {
    use std::collections::HashMap;
    let f = curve.field();
    let p = f.p() as usize;
    let r = f.r() as usize;
    let mut index: HashMap<(FFElem, usize), usize> = HashMap::new();
    let mut states = vec![(start.clone(), 0usize)];
    index.insert((start.clone(), 0), 0);
    let mut delta = vec![];
    let mut head = 0;
    while head < states.len() {
        let (u, k) = states[head].clone();
        let mut row = Vec::with_capacity(p);
        for part in curve.kp_decompose(&u) {
            let key = (part, (k + 1) % r);
            let id = match index.get(&key) {
                Some(&id) => id,
                None => {
                    if states.len() >= max_states {
                        return Err(Error::StateLimit(max_states));
                    }
                    index.insert(key.clone(), states.len());
                    states.push(key);
                    states.len() - 1
                }
            };
            row.push(id);
        }
        delta.push(row);
        head += 1;
    }
    let tau = states
        .iter()
        .map(|(u, k)| {
            let c = constant_term(curve, branch, u)?;
            Ok((0..*k).fold(c, |c, _| f.frobenius(c)))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Dfao::new(p, 0, delta, tau, Convention::Reverse)?.minimize())
}

/// Compares the base-`p` and base-`q` state counts of the series of `start`.
pub fn base_compare(
    curve: &PlaneCurve,
    start: &FFElem,
    branch: &TruncSeries,
    max_states: usize,
) -> Result<BaseComparison> {
    let f = curve.field();
    let n_q = crate::kernel::enumerate_kernel(curve, start, branch, max_states)?.len();
    let n_p = base_p_dfao(curve, start, branch, max_states)?.n_states();
    let (p, q) = (f.p(), f.q());
    Ok(BaseComparison {
        p,
        q,
        n_p,
        n_q,
        lower: n_q <= n_p,
        upper: (p as u64 - 1) * n_p as u64 <= (q as u64 - 1) * n_q as u64,
    })
}

/// A polynomial `F(x, T) = sum_j coeffs[j](x) T^j` annihilating a series.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Relation {
    pub coeffs: Vec<Poly>,
}

impl Relation {
    pub fn deg_t(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn deg_x(&self) -> usize {
        self.coeffs.iter().filter_map(Poly::degree).max().unwrap_or(0)
    }

    /// `F(x, s) mod x^N`.
    pub fn apply(&self, s: &TruncSeries, f: &FieldCtx) -> TruncSeries {
        let n = s.precision();
        let mut acc = TruncSeries::zero(n);
        for c in self.coeffs.iter().rev() {
            acc = acc.mul(s, f).add(&TruncSeries::from_poly(c, n), f);
        }
        acc
    }

    /// Scales so that the leading coefficient of the top `T`-coefficient is 1.
    fn normalized(mut self, f: &FieldCtx) -> Relation {
        while self.coeffs.last().is_some_and(Poly::is_zero) {
            self.coeffs.pop();
        }
        if let Some(top) = self.coeffs.last() {
            let inv = f.inv(top.lc());
            self.coeffs = self.coeffs.iter().map(|c| c.scale(inv, f)).collect();
        }
        self
    }

    pub fn show(&self, f: &FieldCtx) -> String {
        let mut s = String::new();
        for (j, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            if !s.is_empty() {
                s.push_str(" + ");
            }
            let cs = c.show(f, "x");
            let multi = c.coeffs().iter().filter(|a| !a.is_zero()).count() > 1;
            match j {
                0 => s.push_str(&cs),
                _ => {
                    if multi {
                        let _ = write!(s, "({cs})*");
                    } else if !c.is_one() {
                        let _ = write!(s, "{cs}*");
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
}

/// Default search caps for a kernel of size `m`:
/// `(min(q^m - 1, 32), min(m q^(m+1), 256))`.
pub fn default_caps(q: usize, m: usize) -> (usize, usize) {
    let qm = (q as u128).checked_pow(m as u32).unwrap_or(u128::MAX);
    let deg_t = qm.saturating_sub(1).min(32) as usize;
    let deg_x = (m as u128)
        .saturating_mul((q as u128).checked_pow(m as u32 + 1).unwrap_or(u128::MAX))
        .min(256) as usize;
    (deg_t.max(1), deg_x)
}

/// Nonzero solution of `F(x, s) = 0 mod x^len` with the given degree caps.
fn relation_at(
    coeffs: &[FqElem],
    powers: &[Vec<FqElem>],
    deg_t: usize,
    deg_x: usize,
    f: &FieldCtx,
) -> Option<Relation> {
    let len = coeffs.len();
    let unknowns = (deg_t + 1) * (deg_x + 1);
    // row n: coefficient of x^n in sum_{j,i} c_{j,i} x^i s^j
    let rows: Vec<Vec<FqElem>> = (0..len)
        .map(|n| {
            let mut row = vec![FqElem::ZERO; unknowns];
            for j in 0..=deg_t {
                for i in 0..=deg_x.min(n) {
                    row[j * (deg_x + 1) + i] = powers[j][n - i];
                }
            }
            row
        })
        .collect();
    let null = fq_null_space(&rows, unknowns, f);
    let v = null.into_iter().next()?;
    let coeffs = (0..=deg_t)
        .map(|j| Poly::from_coeffs(v[j * (deg_x + 1)..(j + 1) * (deg_x + 1)].to_vec()))
        .collect();
    Some(Relation { coeffs }.normalized(f))
}

fn series_powers(s: &TruncSeries, deg_t: usize, f: &FieldCtx) -> Vec<Vec<FqElem>> {
    let n = s.precision();
    let mut out = vec![TruncSeries::constant(FqElem::ONE, n)];
    for j in 1..=deg_t {
        out.push(out[j - 1].mul(s, f));
    }
    out.into_iter().map(|t| t.coeffs().to_vec()).collect()
}

/// Finds a polynomial relation for the sequence generated by `rep`.
///
/// `T`-degrees are tried in increasing order; for each, the `x`-degree is
/// grown geometrically until a relation appears and then bisected down to
/// the smallest one. Each candidate is fitted on twice as many coefficients
/// as it has unknowns and re-verified on twice that many.
pub fn algebraize(
    rep: &Representation,
    f: &FieldCtx,
    deg_t_cap: usize,
    deg_x_cap: usize,
) -> Result<Relation> {
    let terms = |len: usize| -> TruncSeries {
        let c = (0..len as u64).map(|n| rep.eval(n, f)).collect();
        TruncSeries::new(c).expect("positive length")
    };
    let fit_len = |dt: usize, dx: usize| 2 * (dt + 1) * (dx + 1);
    let max_len = fit_len(deg_t_cap, deg_x_cap);
    let all = terms(2 * max_len);
    for dt in 1..=deg_t_cap {
        let fits = |dx: usize| -> Option<Relation> {
            let len = fit_len(dt, dx);
            let s = all.truncate(len);
            let powers = series_powers(&s, dt, f);
            let rel = relation_at(s.coeffs(), &powers, dt, dx, f)?;
            let check = all.truncate(2 * len);
            rel.apply(&check, f).is_zero().then_some(rel)
        };
        let mut lo = 0;
        let mut hi = 1.min(deg_x_cap);
        let mut found = fits(hi);
        while found.is_none() && hi < deg_x_cap {
            lo = hi;
            hi = (hi * 2).min(deg_x_cap);
            found = fits(hi);
        }
        let Some(mut best) = found else { continue };
        if hi == 1 {
            if let Some(r) = fits(0) {
                best = r;
            }
            return Ok(best);
        }
        // smallest dx in (lo, hi] admitting a relation
        while hi - lo > 1 {
            let mid = (lo + hi) / 2;
            match fits(mid) {
                Some(r) => {
                    hi = mid;
                    best = r;
                }
                None => lo = mid,
            }
        }
        return Ok(best);
    }
    Err(Error::NoRelation { deg_t: deg_t_cap, deg_x: deg_x_cap })
}
