//! Recursive-descent parser for small bivariate polynomials in `x` and `T`.
//!
//! Grammar, with integer exponents only:
//!
//! ```text
//! expr  := term (('+' | '-') term)*
//! term  := unary ('*' unary)*
//! unary := ('+' | '-') unary | power
//! power := atom ('^' integer)?
//! atom  := integer | 'x' | 'T' | 'y' | '(' expr ')'
//! ```
//!
//! Error offsets are 1-based character positions.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};

use crate::algebra::{FieldCtx, FqElem};
use crate::error::{Error, Result};

/// Largest exponent accepted after `^`.
pub const MAX_EXPONENT: u32 = 4096;

/// Integer coefficients keyed by `(x exponent, T exponent)`; zero entries
/// are never stored.
pub type IntTable = BTreeMap<(usize, usize), BigInt>;

fn add_into(acc: &mut IntTable, key: (usize, usize), c: BigInt) {
    let slot = acc.entry(key).or_default();
    *slot += c;
    if slot.is_zero() {
        acc.remove(&key);
    }
}

fn table_add(a: IntTable, b: IntTable, sign: i32) -> IntTable {
    let mut out = a;
    for (k, c) in b {
        add_into(&mut out, k, if sign < 0 { -c } else { c });
    }
    out
}

fn table_mul(a: &IntTable, b: &IntTable) -> IntTable {
    let mut out = IntTable::new();
    for (&(i, j), c) in a {
        for (&(k, l), d) in b {
            add_into(&mut out, (i + k, j + l), c * d);
        }
    }
    out
}

fn table_pow(base: &IntTable, e: u32) -> IntTable {
    let mut acc = IntTable::from([((0, 0), BigInt::from(1))]);
    for _ in 0..e {
        acc = table_mul(&acc, base);
    }
    acc
}

struct Parser {
    chars: Vec<char>,
    pos: usize,
}

impl Parser {
    fn skip_ws(&mut self) {
        while self.chars.get(self.pos).is_some_and(|c| c.is_whitespace()) {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.chars.get(self.pos).copied()
    }

    fn error(&self, msg: impl Into<String>) -> Error {
        Error::Parse { offset: self.pos + 1, msg: msg.into() }
    }

    fn is_minus(c: char) -> bool {
        c == '-' || c == '\u{2212}'
    }

    fn expr(&mut self) -> Result<IntTable> {
        let mut acc = self.term()?;
        while let Some(c) = self.peek() {
            let sign = if c == '+' {
                1
            } else if Self::is_minus(c) {
                -1
            } else {
                break;
            };
            self.pos += 1;
            let rhs = self.term()?;
            acc = table_add(acc, rhs, sign);
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<IntTable> {
        let mut acc = self.unary()?;
        while self.peek() == Some('*') {
            self.pos += 1;
            let rhs = self.unary()?;
            acc = table_mul(&acc, &rhs);
        }
        Ok(acc)
    }

    fn unary(&mut self) -> Result<IntTable> {
        match self.peek() {
            Some('+') => {
                self.pos += 1;
                self.unary()
            }
            Some(c) if Self::is_minus(c) => {
                self.pos += 1;
                let inner = self.unary()?;
                Ok(table_add(IntTable::new(), inner, -1))
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<IntTable> {
        let base = self.atom()?;
        if self.peek() != Some('^') {
            return Ok(base);
        }
        self.pos += 1;
        self.skip_ws();
        let start = self.pos;
        let digits = self.digits();
        if digits.is_empty() {
            return Err(self.error("expected an integer exponent"));
        }
        let e = digits
            .parse::<u32>()
            .ok()
            .filter(|&e| e <= MAX_EXPONENT)
            .ok_or_else(|| Error::Parse { offset: start + 1, msg: format!("exponent exceeds {MAX_EXPONENT}") })?;
        Ok(table_pow(&base, e))
    }

    fn digits(&mut self) -> String {
        let start = self.pos;
        while self.chars.get(self.pos).is_some_and(char::is_ascii_digit) {
            self.pos += 1;
        }
        self.chars[start..self.pos].iter().collect()
    }

    fn atom(&mut self) -> Result<IntTable> {
        let Some(c) = self.peek() else {
            return Err(self.error("unexpected end of input"));
        };
        match c {
            '0'..='9' => {
                let n: BigInt = self.digits().parse().expect("ascii digits");
                let mut t = IntTable::new();
                add_into(&mut t, (0, 0), n);
                Ok(t)
            }
            'x' => {
                self.pos += 1;
                Ok(IntTable::from([((1, 0), BigInt::from(1))]))
            }
            'T' | 'y' => {
                self.pos += 1;
                Ok(IntTable::from([((0, 1), BigInt::from(1))]))
            }
            '(' => {
                self.pos += 1;
                let inner = self.expr()?;
                if self.peek() != Some(')') {
                    return Err(self.error("expected ')'"));
                }
                self.pos += 1;
                Ok(inner)
            }
            c if c.is_alphabetic() => Err(self.error(format!("unknown symbol '{c}'"))),
            c => Err(self.error(format!("unexpected '{c}'"))),
        }
    }
}

/// Parses and expands `text` over the integers.
pub fn parse_int_table(text: &str) -> Result<IntTable> {
    let mut p = Parser { chars: text.chars().collect(), pos: 0 };
    let t = p.expr()?;
    if p.peek().is_some() {
        return Err(p.error("unexpected trailing input"));
    }
    Ok(t)
}

/// Reduces an integer table into the prime field of `f`, as
/// `(x exponent, T exponent, coefficient)` with zero entries dropped.
pub fn reduce_table(t: &IntTable, f: &FieldCtx) -> Vec<(usize, usize, FqElem)> {
    let p = BigInt::from(f.p());
    t.iter()
        .map(|(&(i, j), c)| (i, j, f.from_int(c.mod_floor(&p).to_i64().expect("residue fits"))))
        .filter(|t| !t.2.is_zero())
        .collect()
}

/// Parses `text` into a coefficient table over `F_q`.
pub fn parse_curve_expr(text: &str, f: &FieldCtx) -> Result<Vec<(usize, usize, FqElem)>> {
    Ok(reduce_table(&parse_int_table(text)?, f))
}

/// Parses a coefficient-table file: one `x_exp T_exp code` triple per line,
/// `#` starts a comment. Codes are packed element codes of `F_q`.
pub fn parse_table_file(text: &str, f: &FieldCtx) -> Result<Vec<(usize, usize, FqElem)>> {
    let mut acc: BTreeMap<(usize, usize), FqElem> = BTreeMap::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let bad = || Error::InvalidInput(format!("line {}: expected `x_exp T_exp code`", lineno + 1));
        let parts: Vec<&str> = line.split_whitespace().collect();
        if parts.len() != 3 {
            return Err(bad());
        }
        let i: usize = parts[0].parse().map_err(|_| bad())?;
        let j: usize = parts[1].parse().map_err(|_| bad())?;
        let code: u64 = parts[2].parse().map_err(|_| bad())?;
        let c = f.try_elem(code).ok_or_else(|| {
            Error::InvalidInput(format!("line {}: {code} is not an element code of F_{}", lineno + 1, f.q()))
        })?;
        let slot = acc.entry((i, j)).or_insert(FqElem::ZERO);
        *slot = f.add(*slot, c);
    }
    Ok(acc.into_iter().filter(|(_, c)| !c.is_zero()).map(|((i, j), c)| (i, j, c)).collect())
}
