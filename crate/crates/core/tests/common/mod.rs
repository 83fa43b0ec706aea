#![allow(dead_code)]

use christol::algebra::{FieldCtx, FqElem, Poly, RatFunc};
use christol::cli::expr::parse_curve_expr;
use christol::function_field::{FFElem, PlaneCurve};
use christol::series::simple_roots_at_origin;
use rand::Rng;

pub const DEFAULT_SEED: u64 = 0x5eed_c0de;

/// Seed for randomized checks, overridable with `CHRISTOL_SEED`.
pub fn seed() -> u64 {
    std::env::var("CHRISTOL_SEED").ok().and_then(|s| s.parse().ok()).unwrap_or(DEFAULT_SEED)
}

pub fn curve(f: &FieldCtx, text: &str) -> PlaneCurve {
    PlaneCurve::from_terms(f.clone(), &parse_curve_expr(text, f).unwrap()).unwrap()
}

pub fn random_elem(rng: &mut impl Rng, f: &FieldCtx) -> FqElem {
    f.elem(rng.gen_range(0..f.q()))
}

pub fn random_poly(rng: &mut impl Rng, f: &FieldCtx, max_deg: usize) -> Poly {
    let deg = rng.gen_range(0..=max_deg);
    Poly::from_coeffs((0..=deg).map(|_| random_elem(rng, f)).collect())
}

pub fn random_nonzero_poly(rng: &mut impl Rng, f: &FieldCtx, max_deg: usize) -> Poly {
    loop {
        let g = random_poly(rng, f, max_deg);
        if !g.is_zero() {
            return g;
        }
    }
}

/// A separable curve of degree 1..=3 with a simple root at the origin.
pub fn random_curve(rng: &mut impl Rng, f: &FieldCtx) -> PlaneCurve {
    loop {
        let d = rng.gen_range(1..=3);
        let mut coeffs: Vec<Poly> = (0..d).map(|_| random_poly(rng, f, 2)).collect();
        coeffs.push(random_nonzero_poly(rng, f, 2));
        let Ok(c) = PlaneCurve::new(f.clone(), coeffs) else { continue };
        if !simple_roots_at_origin(&c).is_empty() {
            return c;
        }
    }
}

pub fn random_ratfunc(rng: &mut impl Rng, f: &FieldCtx, max_deg: usize) -> RatFunc {
    RatFunc::new(random_poly(rng, f, max_deg), random_nonzero_poly(rng, f, max_deg), f).unwrap()
}

pub fn random_element(rng: &mut impl Rng, c: &PlaneCurve) -> FFElem {
    let f = c.field();
    let coords = (0..c.degree()).map(|_| random_ratfunc(rng, f, 2)).collect();
    c.element(coords).unwrap()
}

/// An element with polynomial coordinates, so its series has no pole.
pub fn random_integral_element(rng: &mut impl Rng, c: &PlaneCurve) -> FFElem {
    let f = c.field();
    let coords = (0..c.degree()).map(|_| RatFunc::from_poly(random_poly(rng, f, 3))).collect();
    c.element(coords).unwrap()
}

/// The four fields the randomized checks range over.
pub fn small_fields() -> Vec<FieldCtx> {
    vec![
        FieldCtx::prime(2).unwrap(),
        FieldCtx::prime(3).unwrap(),
        FieldCtx::new(2, 2, None).unwrap(),
        FieldCtx::prime(5).unwrap(),
    ]
}

/// A named curve with the constant term of its branch.
pub struct Example {
    pub name: String,
    pub field: FieldCtx,
    pub curve: PlaneCurve,
    pub a0: FqElem,
}

/// The worked example curves used across the test suites.
pub fn example_curves() -> Vec<Example> {
    let mut out = vec![];
    let mut push = |name: String, f: FieldCtx, text: &str, a0: u32| {
        let curve = curve(&f, text);
        out.push(Example { name, a0: f.elem(a0), field: f, curve });
    };
    for p in [3, 5, 7, 11] {
        push(format!("1/(1-2x) mod {p}"), FieldCtx::prime(p).unwrap(), "(1-2*x)*T - 1", 1);
    }
    for p in [3, 5, 7] {
        push(format!("central binomial mod {p}"), FieldCtx::prime(p).unwrap(), "(1-4*x)*T^2 - 1", 1);
    }
    for p in [5, 7, 11] {
        push(format!("elliptic mod {p}"), FieldCtx::prime(p).unwrap(), "(1-4*x^3)*T^2 - 1", 1);
    }
    for (p, r, m) in [(2, 1, 1), (2, 1, 2), (2, 1, 3), (3, 1, 2), (2, 2, 1)] {
        let f = FieldCtx::new(p, r, None).unwrap();
        let deg = f.q().pow(m);
        push(format!("artin-schreier q = {}, m = {m}", f.q()), f, &format!("T^{deg} - T - x"), 0);
    }
    push("thue-morse".into(), FieldCtx::prime(2).unwrap(), "(1+x)^3*T^2 + (1+x)^2*T + x", 0);
    out
}
