//! String substitution systems and the binary toy-calculus checks.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::multiway::{evolve, Canonical, EvolveConfig, Mode, Rewrite, RewriteSystem};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StringRule {
    pub lhs: String,
    pub rhs: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StringSystem {
    pub rules: Vec<StringRule>,
}

impl StringSystem {
    pub fn new(rules: Vec<(&str, &str)>) -> Result<Self> {
        let rules: Vec<StringRule> =
            rules.into_iter().map(|(l, r)| StringRule { lhs: l.to_string(), rhs: r.to_string() }).collect();
        if rules.iter().any(|r| r.lhs.is_empty()) {
            return Err(Error::InvalidRule("empty left-hand side".into()));
        }
        Ok(StringSystem { rules })
    }

    /// Parses `"1->01, 0->10"` (also accepts `→`).
    pub fn parse(spec: &str) -> Result<Self> {
        let mut rules = Vec::new();
        let mut offset = 0;
        for part in spec.split(',') {
            let p = part.trim();
            if !p.is_empty() {
                let norm = p.replace('→', "->");
                let (l, r) = norm
                    .split_once("->")
                    .ok_or_else(|| Error::parse(offset, format!("expected `lhs->rhs` in `{p}`")))?;
                rules.push((l.trim().to_string(), r.trim().to_string()));
            }
            offset += part.len() + 1;
        }
        StringSystem::new(rules.iter().map(|(l, r)| (l.as_str(), r.as_str())).collect())
    }
}

/// Start offsets (in characters) of every occurrence, overlapping allowed.
pub fn occurrences(haystack: &[char], needle: &[char]) -> Vec<usize> {
    if needle.is_empty() || needle.len() > haystack.len() {
        return Vec::new();
    }
    (0..=haystack.len() - needle.len()).filter(|&i| haystack[i..i + needle.len()] == *needle).collect()
}

impl RewriteSystem for StringSystem {
    type State = String;

    fn canonicalizer(&self) -> &str {
        "string"
    }

    fn rule_count(&self) -> usize {
        self.rules.len()
    }

    fn rule_label(&self, rule: usize) -> String {
        let r = &self.rules[rule];
        format!("{}->{}", r.lhs, r.rhs)
    }

    fn canonicalize(&self, state: &String) -> Result<Canonical<String>> {
        Ok(Canonical { state: state.clone(), key: state.clone(), perm: (0..state.chars().count()).collect() })
    }

    fn rewrites(&self, rule: usize, state: &String) -> Result<Vec<Rewrite<String>>> {
        let r = &self.rules[rule];
        let s: Vec<char> = state.chars().collect();
        let lhs: Vec<char> = r.lhs.chars().collect();
        let rhs: Vec<char> = r.rhs.chars().collect();
        Ok(occurrences(&s, &lhs)
            .into_iter()
            .map(|i| {
                let mut out: String = s[..i].iter().collect();
                out.extend(&rhs);
                out.extend(&s[i + lhs.len()..]);
                let tail = i + lhs.len()..s.len();
                let carried = (0..i)
                    .map(|k| (k, k))
                    .chain(tail.map(|k| (k, k + rhs.len() - lhs.len())))
                    .collect();
                Rewrite {
                    position: i.to_string(),
                    result: out,
                    consumed: (i..i + lhs.len()).collect(),
                    produced: (i..i + rhs.len()).collect(),
                    carried,
                }
            })
            .collect())
    }

    fn element_count(&self, state: &String) -> usize {
        state.chars().count()
    }

    fn render(&self, state: &String) -> String {
        state.clone()
    }
}

/// Bitwise negation of a binary string.
pub fn negation(s: &str) -> Result<String> {
    s.chars()
        .map(|c| match c {
            '0' => Ok('1'),
            '1' => Ok('0'),
            other => Err(Error::InvalidRule(format!("non-binary symbol `{other}`"))),
        })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Derivability {
    Proposition,
    Negation,
    Both,
    Neither,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ToyReport {
    pub generated: usize,
    pub entries: Vec<(String, Derivability)>,
    pub inconsistent: Vec<String>,
    pub incomplete: Vec<String>,
}

impl ToyReport {
    pub fn consistent(&self) -> bool {
        self.inconsistent.is_empty()
    }

    pub fn complete(&self) -> bool {
        self.incomplete.is_empty()
    }

    pub fn contains(&self, s: &str) -> bool {
        self.entries.iter().any(|(t, d)| t == s && matches!(d, Derivability::Proposition | Derivability::Both))
    }
}

/// Generates every string reachable within `depth` steps and classifies
/// each binary string of length `1..=max_len` by whether it, its negation,
/// both or neither were generated.
pub fn check_complete_consistent(sys: &StringSystem, init: &str, depth: usize, max_len: usize) -> Result<ToyReport> {
    negation(init)?;
    for r in &sys.rules {
        negation(&r.lhs)?;
        negation(&r.rhs)?;
    }
    let ev = evolve(sys, &[init.to_string()], &EvolveConfig::new(depth, Mode::States))?;
    let generated: BTreeSet<&str> = ev.states.iter().map(String::as_str).collect();
    let mut entries = Vec::new();
    let mut inconsistent = Vec::new();
    let mut incomplete = Vec::new();
    for len in 1..=max_len {
        for bits in 0..(1u64 << len) {
            let s: String = (0..len).rev().map(|k| if bits >> k & 1 == 1 { '1' } else { '0' }).collect();
            let n = negation(&s)?;
            let d = match (generated.contains(s.as_str()), generated.contains(n.as_str())) {
                (true, true) => Derivability::Both,
                (true, false) => Derivability::Proposition,
                (false, true) => Derivability::Negation,
                (false, false) => Derivability::Neither,
            };
            match d {
                Derivability::Both => inconsistent.push(s.clone()),
                Derivability::Neither => incomplete.push(s.clone()),
                _ => {}
            }
            entries.push((s, d));
        }
    }
    Ok(ToyReport { generated: generated.len(), entries, inconsistent, incomplete })
}
