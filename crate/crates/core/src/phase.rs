//! Exact phases (rational multiples of π) and linear phase expressions used
//! by rule patterns.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Neg, Sub};
use std::str::FromStr;

use num_rational::Ratio;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A phase `r·π` with `r` rational, kept normalized to `[0, 2)`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Phase(Ratio<i64>);

impl Phase {
    pub const ZERO: Phase = Phase(Ratio::new_raw(0, 1));
    pub const PI: Phase = Phase(Ratio::new_raw(1, 1));

    /// `num/den · π`, reduced modulo 2π.
    pub fn new(num: i64, den: i64) -> Phase {
        assert!(den != 0, "phase denominator must be nonzero");
        Phase::from_ratio(Ratio::new(num, den))
    }

    pub fn from_ratio(r: Ratio<i64>) -> Phase {
        let two = Ratio::from_integer(2);
        let mut r = r % two;
        if r.is_negative() {
            r += two;
        }
        Phase(r)
    }

    /// Coefficient of π, in `[0, 2)`.
    pub fn ratio(&self) -> Ratio<i64> {
        self.0
    }

    pub fn numer(&self) -> i64 {
        *self.0.numer()
    }

    pub fn denom(&self) -> i64 {
        *self.0.denom()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    /// Radians as a float.
    pub fn radians(&self) -> f64 {
        self.0.to_f64().unwrap_or(0.0) * std::f64::consts::PI
    }

    /// True when `e^{iφ}` lies in the eighth-root-of-unity field.
    pub fn is_clifford_t(&self) -> bool {
        4 % self.denom() == 0
    }

    pub fn scale(&self, k: i64) -> Phase {
        Phase::from_ratio(self.0 * k)
    }
}

impl Default for Phase {
    fn default() -> Self {
        Phase::ZERO
    }
}

impl Add for Phase {
    type Output = Phase;
    fn add(self, rhs: Phase) -> Phase {
        Phase::from_ratio(self.0 + rhs.0)
    }
}

impl Sub for Phase {
    type Output = Phase;
    fn sub(self, rhs: Phase) -> Phase {
        Phase::from_ratio(self.0 - rhs.0)
    }
}

impl Neg for Phase {
    type Output = Phase;
    fn neg(self) -> Phase {
        Phase::from_ratio(-self.0)
    }
}

impl fmt::Display for Phase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_pi_multiple(f, self.numer(), self.denom())
    }
}

impl fmt::Debug for Phase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Phase({self})")
    }
}

fn write_pi_multiple(f: &mut fmt::Formatter<'_>, num: i64, den: i64) -> fmt::Result {
    if num == 0 {
        return f.write_str("0");
    }
    let sign = if num < 0 { "-" } else { "" };
    let n = num.abs();
    let coeff = if n == 1 { String::new() } else { n.to_string() };
    if den == 1 {
        write!(f, "{sign}{coeff}pi")
    } else {
        write!(f, "{sign}{coeff}pi/{den}")
    }
}

impl FromStr for Phase {
    type Err = Error;
    fn from_str(s: &str) -> Result<Phase> {
        let r = parse_pi_multiple(s.trim())?;
        Ok(Phase::from_ratio(r))
    }
}

impl Serialize for Phase {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Phase {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Parses `0`, `pi`, `π`, `-pi/2`, `3pi/4`, `3*pi/4`, `1/2*pi`.
fn parse_pi_multiple(s: &str) -> Result<Ratio<i64>> {
    let err = || Error::parse(0, format!("invalid phase `{s}`"));
    let s = s.replace('π', "pi").replace(' ', "");
    if s.is_empty() {
        return Err(err());
    }
    let (neg, body) = match s.strip_prefix('-') {
        Some(rest) => (true, rest.to_string()),
        None => (false, s.strip_prefix('+').unwrap_or(&s).to_string()),
    };
    let r = if let Some(idx) = body.find("pi") {
        let before = body[..idx].trim_end_matches('*');
        let after = &body[idx + 2..];
        let coeff: Ratio<i64> = if before.is_empty() {
            Ratio::from_integer(1)
        } else {
            parse_ratio(before).ok_or_else(err)?
        };
        let den: i64 = if after.is_empty() {
            1
        } else {
            after.strip_prefix('/').and_then(|d| d.parse().ok()).filter(|d| *d != 0).ok_or_else(err)?
        };
        coeff / den
    } else {
        // only an explicit zero is accepted without a π factor
        let r = parse_ratio(&body).ok_or_else(err)?;
        if !r.is_zero() {
            return Err(err());
        }
        r
    };
    Ok(if neg { -r } else { r })
}

fn parse_ratio(s: &str) -> Option<Ratio<i64>> {
    match s.split_once('/') {
        Some((n, d)) => {
            let n: i64 = n.parse().ok()?;
            let d: i64 = d.parse().ok()?;
            (d != 0).then(|| Ratio::new(n, d))
        }
        None => s.parse::<i64>().ok().map(Ratio::from_integer),
    }
}

/// Linear phase expression `Σ cᵥ·v + c₀` over named phase variables.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct PhaseExpr {
    pub terms: BTreeMap<String, i64>,
    pub constant: Phase,
}

impl PhaseExpr {
    pub fn constant(p: Phase) -> Self {
        PhaseExpr { terms: BTreeMap::new(), constant: p }
    }

    pub fn var(name: &str) -> Self {
        let mut terms = BTreeMap::new();
        terms.insert(name.to_string(), 1);
        PhaseExpr { terms, constant: Phase::ZERO }
    }

    pub fn is_constant(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn variables(&self) -> impl Iterator<Item = &str> {
        self.terms.keys().map(String::as_str)
    }

    /// Evaluates under a complete binding.
    pub fn eval(&self, binding: &BTreeMap<String, Phase>) -> Result<Phase> {
        let mut acc = self.constant;
        for (v, c) in &self.terms {
            let p = binding.get(v).ok_or_else(|| Error::UnboundVariable(v.clone()))?;
            acc = acc + p.scale(*c);
        }
        Ok(acc)
    }

    /// All bindings of the unbound variables in `self` that make it equal
    /// `target`, extending `binding`.
    ///
    /// A single free variable with coefficient ±1 is solved exactly. With
    /// several free variables the value is placed on one variable at a time
    /// and the others are set to zero, giving one binding per variable.
    pub fn solve(&self, target: Phase, binding: &BTreeMap<String, Phase>) -> Vec<BTreeMap<String, Phase>> {
        let mut rest = target - self.constant;
        let mut free = Vec::new();
        for (v, c) in &self.terms {
            match binding.get(v) {
                Some(p) => rest = rest - p.scale(*c),
                None => free.push((v.clone(), *c)),
            }
        }
        if free.is_empty() {
            return if rest.is_zero() { vec![binding.clone()] } else { vec![] };
        }
        let mut out = Vec::new();
        for (i, (v, c)) in free.iter().enumerate() {
            if c.abs() != 1 {
                continue;
            }
            let mut b = binding.clone();
            b.insert(v.clone(), rest.scale(*c));
            for (j, (w, _)) in free.iter().enumerate() {
                if i != j {
                    b.insert(w.clone(), Phase::ZERO);
                }
            }
            out.push(b);
        }
        out
    }

    pub fn rename(&self, f: impl Fn(&str) -> String) -> PhaseExpr {
        let mut terms = BTreeMap::new();
        for (v, c) in &self.terms {
            *terms.entry(f(v)).or_insert(0) += c;
        }
        terms.retain(|_, c| *c != 0);
        PhaseExpr { terms, constant: self.constant }
    }
}

impl From<Phase> for PhaseExpr {
    fn from(p: Phase) -> Self {
        PhaseExpr::constant(p)
    }
}

impl Add for PhaseExpr {
    type Output = PhaseExpr;
    fn add(mut self, rhs: PhaseExpr) -> PhaseExpr {
        for (v, c) in rhs.terms {
            *self.terms.entry(v).or_insert(0) += c;
        }
        self.terms.retain(|_, c| *c != 0);
        self.constant = self.constant + rhs.constant;
        self
    }
}

impl Neg for PhaseExpr {
    type Output = PhaseExpr;
    fn neg(mut self) -> PhaseExpr {
        for c in self.terms.values_mut() {
            *c = -*c;
        }
        self.constant = -self.constant;
        self
    }
}

impl fmt::Display for PhaseExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (v, c) in &self.terms {
            let sign = if *c < 0 { "-" } else if first { "" } else { "+" };
            let mag = c.abs();
            if mag == 1 {
                write!(f, "{sign}{v}")?;
            } else {
                write!(f, "{sign}{mag}{v}")?;
            }
            first = false;
        }
        if first {
            write!(f, "{}", self.constant)
        } else if !self.constant.is_zero() {
            write!(f, "+{}", self.constant)
        } else {
            Ok(())
        }
    }
}

impl fmt::Debug for PhaseExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PhaseExpr({self})")
    }
}

impl FromStr for PhaseExpr {
    type Err = Error;
    fn from_str(s: &str) -> Result<PhaseExpr> {
        let s: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if s.is_empty() {
            return Err(Error::parse(0, "empty phase expression"));
        }
        // split into signed terms
        let mut pieces = Vec::new();
        let mut cur = String::new();
        for (i, ch) in s.chars().enumerate() {
            if (ch == '+' || ch == '-') && i > 0 && !cur.ends_with('/') && !cur.ends_with('*') {
                pieces.push(std::mem::take(&mut cur));
            }
            cur.push(ch);
        }
        pieces.push(cur);
        let mut expr = PhaseExpr::default();
        for piece in pieces {
            let (neg, body) = match piece.strip_prefix('-') {
                Some(b) => (true, b),
                None => (false, piece.strip_prefix('+').unwrap_or(&piece)),
            };
            let term = if body.contains("pi") || body.contains('π') || body.chars().all(|c| c.is_ascii_digit() || c == '/') {
                PhaseExpr::constant(body.parse::<Phase>()?)
            } else {
                let split = body.find(|c: char| !c.is_ascii_digit()).unwrap_or(body.len());
                let (coeff, name) = body.split_at(split);
                let name = name.trim_start_matches('*');
                if name.is_empty() || !name.chars().all(|c| c.is_alphanumeric() || c == '_') {
                    return Err(Error::parse(0, format!("invalid phase term `{body}`")));
                }
                let c: i64 = if coeff.is_empty() { 1 } else { coeff.parse().map_err(|_| Error::parse(0, "bad coefficient"))? };
                let mut t = PhaseExpr::var(name);
                t.terms.insert(name.to_string(), c);
                t
            };
            expr = expr + if neg { -term } else { term };
        }
        Ok(expr)
    }
}

impl Serialize for PhaseExpr {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for PhaseExpr {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}
