//! Deterministic finite automata with output (DFAOs) over base-`q` digits.

use std::collections::{HashMap, VecDeque};
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::algebra::{FieldCtx, FqElem};
use crate::error::{Error, Result};
use crate::kernel::{dot, Kernel, Representation};

/// Digit order in which a DFAO reads the base-`q` expansion of `n`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Convention {
    /// Least significant digit first.
    Reverse,
    /// Most significant digit first.
    Forward,
}

impl std::str::FromStr for Convention {
    type Err = Error;

    fn from_str(s: &str) -> Result<Convention> {
        match s {
            "reverse" => Ok(Convention::Reverse),
            "forward" => Ok(Convention::Forward),
            other => Err(Error::InvalidInput(format!(
                "unknown convention {other:?} (expected reverse or forward)"
            ))),
        }
    }
}

impl std::fmt::Display for Convention {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Convention::Reverse => "reverse",
            Convention::Forward => "forward",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Dfao {
    q: usize,
    initial: usize,
    delta: Vec<Vec<usize>>,
    tau: Vec<FqElem>,
    convention: Convention,
}

/// JSON layout; field order here is the serialized key order.
#[derive(Serialize, Deserialize)]
struct DfaoJson {
    q: usize,
    convention: Convention,
    n_states: usize,
    initial: usize,
    delta: Vec<Vec<usize>>,
    tau: Vec<u32>,
}

/// Base-`q` digits of `n`, least significant first; empty for zero.
pub fn digits_lsd(mut n: u64, q: usize) -> Vec<usize> {
    let q = q as u64;
    let mut out = vec![];
    while n > 0 {
        out.push((n % q) as usize);
        n /= q;
    }
    out
}

impl Dfao {
    /// Builds a DFAO, checking that the table is total and in range.
    pub fn new(
        q: usize,
        initial: usize,
        delta: Vec<Vec<usize>>,
        tau: Vec<FqElem>,
        convention: Convention,
    ) -> Result<Dfao> {
        let n = delta.len();
        if n == 0 || tau.len() != n || initial >= n {
            return Err(Error::InvalidInput(format!(
                "{n} transition rows, {} outputs, initial state {initial}",
                tau.len()
            )));
        }
        for (s, row) in delta.iter().enumerate() {
            if row.len() != q {
                return Err(Error::InvalidInput(format!("state {s} has {} transitions, expected {q}", row.len())));
            }
            if let Some(&t) = row.iter().find(|&&t| t >= n) {
                return Err(Error::InvalidInput(format!("state {s} moves to missing state {t}")));
            }
        }
        Ok(Dfao { q, initial, delta, tau, convention })
    }

    pub fn q(&self) -> usize {
        self.q
    }

    pub fn n_states(&self) -> usize {
        self.delta.len()
    }

    pub fn initial(&self) -> usize {
        self.initial
    }

    pub fn delta(&self) -> &[Vec<usize>] {
        &self.delta
    }

    pub fn tau(&self) -> &[FqElem] {
        &self.tau
    }

    pub fn convention(&self) -> Convention {
        self.convention
    }

    /// Output after reading `word` from the initial state, in the given order.
    pub fn run(&self, word: impl IntoIterator<Item = usize>) -> FqElem {
        let s = word.into_iter().fold(self.initial, |s, c| self.delta[s][c]);
        self.tau[s]
    }

    /// The term `a(n)`; `n = 0` reads the empty word.
    pub fn eval(&self, n: u64) -> FqElem {
        self.eval_padded(n, 0)
    }

    /// The output on the expansion of `n` with `zeros` leading zeros added.
    pub fn eval_padded(&self, n: u64, zeros: usize) -> FqElem {
        let mut digits = digits_lsd(n, self.q);
        digits.extend(std::iter::repeat_n(0, zeros));
        match self.convention {
            Convention::Reverse => self.run(digits),
            Convention::Forward => self.run(digits.into_iter().rev()),
        }
    }

    /// True if prepending one to three zeros never changes the output for
    /// `n < 10^4`.
    pub fn check_leading_zero_invariance(&self) -> bool {
        (0..10_000u64).all(|n| {
            let base = self.eval(n);
            (1..=3).all(|z| self.eval_padded(n, z) == base)
        })
    }

    /// Renumbers states in breadth-first order from the initial state and
    /// drops unreachable ones.
    pub fn canonical(&self) -> Dfao {
        let mut order = vec![usize::MAX; self.n_states()];
        let mut queue = VecDeque::from([self.initial]);
        let mut seen = vec![self.initial];
        order[self.initial] = 0;
        while let Some(s) = queue.pop_front() {
            for &t in &self.delta[s] {
                if order[t] == usize::MAX {
                    order[t] = seen.len();
                    seen.push(t);
                    queue.push_back(t);
                }
            }
        }
        let delta = seen
            .iter()
            .map(|&s| self.delta[s].iter().map(|&t| order[t]).collect())
            .collect();
        let tau = seen.iter().map(|&s| self.tau[s]).collect();
        Dfao { q: self.q, initial: 0, delta, tau, convention: self.convention }
    }

    /// True if the two machines are equal up to renaming of states
    /// (unreachable states ignored).
    pub fn isomorphic(&self, other: &Dfao) -> bool {
        self.canonical() == other.canonical()
    }

    /// The minimal DFAO computing the same function of words, by Moore
    /// partition refinement on the reachable part. States come out in
    /// canonical order.
    pub fn minimize(&self) -> Dfao {
        let d = self.canonical();
        let n = d.n_states();
        let mut class: Vec<usize> = {
            let mut ids: HashMap<FqElem, usize> = HashMap::new();
            d.tau
                .iter()
                .map(|t| {
                    let next = ids.len();
                    *ids.entry(*t).or_insert(next)
                })
                .collect()
        };
        let mut count = class.iter().max().map_or(0, |m| m + 1);
        loop {
            let mut ids: HashMap<(usize, Vec<usize>), usize> = HashMap::new();
            let refined: Vec<usize> = (0..n)
                .map(|s| {
                    let sig = (class[s], d.delta[s].iter().map(|&t| class[t]).collect());
                    let next = ids.len();
                    *ids.entry(sig).or_insert(next)
                })
                .collect();
            let new_count = ids.len();
            class = refined;
            if new_count == count {
                break;
            }
            count = new_count;
        }
        let mut delta = vec![vec![]; count];
        let mut tau = vec![FqElem::ZERO; count];
        for s in 0..n {
            let c = class[s];
            if delta[c].is_empty() {
                delta[c] = d.delta[s].iter().map(|&t| class[t]).collect();
                tau[c] = d.tau[s];
            }
        }
        Dfao { q: d.q, initial: class[0], delta, tau, convention: d.convention }.canonical()
    }

    /// Graphviz rendering; nodes are labelled `q<state>/<output>`.
    pub fn to_dot(&self) -> String {
        let mut s = String::from("digraph dfao {\n  rankdir=LR;\n  init [shape=point];\n");
        let _ = writeln!(s, "  init -> q{};", self.initial);
        for (i, t) in self.tau.iter().enumerate() {
            let _ = writeln!(s, "  q{i} [shape=circle, label=\"q{i}/{t}\"];");
        }
        for (i, row) in self.delta.iter().enumerate() {
            for (c, t) in row.iter().enumerate() {
                let _ = writeln!(s, "  q{i} -> q{t} [label=\"{c}\"];");
            }
        }
        s.push_str("}\n");
        s
    }

    /// JSON with keys `q, convention, n_states, initial, delta, tau`;
    /// outputs are packed element codes.
    pub fn to_json(&self) -> String {
        let j = DfaoJson {
            q: self.q,
            convention: self.convention,
            n_states: self.n_states(),
            initial: self.initial,
            delta: self.delta.clone(),
            tau: self.tau.iter().map(|t| t.code()).collect(),
        };
        serde_json::to_string(&j).expect("plain data serializes") + "\n"
    }

    /// Parses the output of [`Dfao::to_json`]; outputs are checked against `f`.
    pub fn from_json(text: &str, f: &FieldCtx) -> Result<Dfao> {
        let j: DfaoJson = serde_json::from_str(text)
            .map_err(|e| Error::InvalidInput(format!("automaton JSON: {e}")))?;
        if j.q != f.q() as usize {
            return Err(Error::InvalidInput(format!("automaton over base {} but field has q = {}", j.q, f.q())));
        }
        if j.n_states != j.delta.len() {
            return Err(Error::InvalidInput(format!(
                "n_states is {} but delta has {} rows",
                j.n_states,
                j.delta.len()
            )));
        }
        let tau = j
            .tau
            .iter()
            .map(|&c| {
                f.try_elem(c as u64)
                    .ok_or_else(|| Error::InvalidInput(format!("output {c} is not an element of F_{}", f.q())))
            })
            .collect::<Result<Vec<_>>>()?;
        Dfao::new(j.q, j.initial, j.delta, tau, j.convention)
    }
}

/// The reverse-reading DFAO whose states are the kernel states.
pub fn build_reverse_dfao<S>(kernel: &Kernel<S>) -> Dfao {
    Dfao {
        q: kernel.q(),
        initial: 0,
        delta: kernel.transitions().to_vec(),
        tau: kernel.outputs().to_vec(),
        convention: Convention::Reverse,
    }
}

/// The forward-reading DFAO on the orbit of the output functional under the
/// transposed digit matrices.
pub fn build_forward_dfao(rep: &Representation, f: &FieldCtx, max_states: usize) -> Result<Dfao> {
    let q = rep.q();
    let mut index: HashMap<Vec<FqElem>, usize> = HashMap::new();
    let mut states = vec![rep.functional.clone()];
    index.insert(rep.functional.clone(), 0);
    let mut delta = vec![];
    let mut head = 0;
    while head < states.len() {
        let mut row = Vec::with_capacity(q);
        for c in 0..q {
            let next = rep.apply_transpose(c, &states[head], f);
            let id = match index.get(&next) {
                Some(&id) => id,
                None => {
                    if states.len() >= max_states {
                        return Err(Error::StateLimit(max_states));
                    }
                    index.insert(next.clone(), states.len());
                    states.push(next);
                    states.len() - 1
                }
            };
            row.push(id);
        }
        delta.push(row);
        head += 1;
    }
    let tau = states.iter().map(|mu| dot(mu, &rep.start, f)).collect();
    Ok(Dfao { q, initial: 0, delta, tau, convention: Convention::Forward })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn thue_morse() -> Dfao {
        Dfao::new(2, 0, vec![vec![0, 1], vec![1, 0]], vec![FqElem::ZERO, FqElem::ONE], Convention::Reverse)
            .unwrap()
    }

    fn powers_of_two() -> (FieldCtx, Dfao) {
        let f = FieldCtx::prime(7).unwrap();
        // states y, 2y, 4y; digit c multiplies by 2^c
        let delta = (0..3).map(|s| (0..7).map(|c| (s + c) % 3).collect()).collect();
        let tau = vec![f.from_int(1), f.from_int(2), f.from_int(4)];
        let d = Dfao::new(7, 0, delta, tau, Convention::Reverse).unwrap();
        (f, d)
    }

    #[test]
    fn thue_morse_values() {
        let d = thue_morse();
        let want = [0, 1, 1, 0, 1, 0, 0, 1];
        for (n, &w) in want.iter().enumerate() {
            assert_eq!(d.eval(n as u64).code(), w);
        }
        assert_eq!(d.eval(0), d.tau()[d.initial()]);
    }

    #[test]
    fn powers_of_two_value() {
        let (_, d) = powers_of_two();
        assert_eq!(d.eval(3).code(), 1);
        assert!(d.check_leading_zero_invariance());
    }

    #[test]
    fn minimize_is_idempotent_and_removes_duplicates() {
        let d = thue_morse();
        assert_eq!(d.minimize().n_states(), 2);
        // splice in a copy of state 1
        let dup = Dfao::new(
            2,
            0,
            vec![vec![0, 2], vec![1, 0], vec![1, 0]],
            vec![FqElem::ZERO, FqElem::ONE, FqElem::ONE],
            Convention::Reverse,
        )
        .unwrap();
        let m = dup.minimize();
        assert_eq!(m.n_states(), 2);
        assert!(m.isomorphic(&d));
    }

    #[test]
    fn unreachable_states_pruned() {
        let d = Dfao::new(
            2,
            0,
            vec![vec![0, 0], vec![1, 1]],
            vec![FqElem::ZERO, FqElem::ONE],
            Convention::Forward,
        )
        .unwrap();
        assert_eq!(d.minimize().n_states(), 1);
    }

    #[test]
    fn leading_zero_counterexample() {
        let d = Dfao::new(
            2,
            0,
            vec![vec![1, 0], vec![1, 1]],
            vec![FqElem::ZERO, FqElem::ONE],
            Convention::Reverse,
        )
        .unwrap();
        assert!(!d.check_leading_zero_invariance());
    }

    #[test]
    fn dot_rendering() {
        let zero = Dfao::new(2, 0, vec![vec![0, 0]], vec![FqElem::ZERO], Convention::Reverse).unwrap();
        let dot = zero.to_dot();
        assert!(dot.contains("label=\"q0/0\""));
        assert_eq!(dot.matches("[shape=circle").count(), 1);
        let tm = thue_morse().to_dot();
        assert_eq!(tm.matches("[shape=circle").count(), 2);
        assert_eq!(tm.matches(" [label=\"").count(), 4);
    }

    #[test]
    fn json_roundtrip() {
        let (f, d) = powers_of_two();
        let text = d.to_json();
        assert!(text.starts_with("{\"q\":7,\"convention\":\"reverse\",\"n_states\":3,\"initial\":0,\"delta\":"));
        assert_eq!(Dfao::from_json(&text, &f).unwrap(), d);
        assert_eq!(text, d.to_json());
        let f5 = FieldCtx::prime(5).unwrap();
        assert!(Dfao::from_json(&text, &f5).is_err());
    }

    #[test]
    fn forward_from_scalar_representation() {
        let f = FieldCtx::prime(7).unwrap();
        let rep = Representation {
            dim: 1,
            matrices: (0..7).map(|c| vec![vec![f.pow(f.from_int(2), c)]]).collect(),
            start: vec![FqElem::ONE],
            functional: vec![FqElem::ONE],
        };
        let fwd = build_forward_dfao(&rep, &f, 100).unwrap();
        assert_eq!(fwd.n_states(), 3);
        assert_eq!(fwd.minimize().n_states(), 3);
        let (_, rev) = powers_of_two();
        for n in 0..500 {
            assert_eq!(fwd.eval(n), rev.eval(n));
        }
        let zero = Representation { dim: 0, matrices: vec![vec![]; 7], start: vec![], functional: vec![] };
        assert_eq!(build_forward_dfao(&zero, &f, 100).unwrap().n_states(), 1);
    }
}
