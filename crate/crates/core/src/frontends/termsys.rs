//! Term rewriting systems (operator systems) over [`Term`].

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::multiway::{Canonical, Rewrite, RewriteSystem};
use crate::term::{find_matches, rewrite_at, Term};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TermRule {
    pub lhs: Term,
    pub rhs: Term,
}

impl TermRule {
    /// Right-hand sides may name variables bare (`x`) or marked (`x_`);
    /// a marked variable absent from the left-hand side is rejected.
    pub fn new(lhs: Term, rhs: Term) -> Result<Self> {
        let lv = lhs.variables();
        if let Some(v) = rhs.variables().into_iter().find(|v| !lv.contains(v)) {
            return Err(Error::InvalidRule(format!("variable `{v}_` appears only on the right-hand side")));
        }
        Ok(TermRule { lhs, rhs })
    }

    /// Parses `g[x_, e] -> x` (also `:>` and `→`).
    pub fn parse(s: &str) -> Result<Self> {
        let norm = s.replace(":>", "->").replace('→', "->");
        let (l, r) = norm.split_once("->").ok_or_else(|| Error::parse(0, "expected `->`"))?;
        TermRule::new(l.parse()?, r.parse()?)
    }
}

impl Serialize for TermRule {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(&format_args!("{} -> {}", self.lhs, self.rhs))
    }
}

impl<'de> Deserialize<'de> for TermRule {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        TermRule::parse(&s).map_err(serde::de::Error::custom)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TermSystem {
    pub rules: Vec<TermRule>,
}

impl TermSystem {
    pub fn parse(rules: &[&str]) -> Result<Self> {
        Ok(TermSystem { rules: rules.iter().map(|r| TermRule::parse(r)).collect::<Result<_>>()? })
    }
}

impl RewriteSystem for TermSystem {
    type State = Term;

    fn canonicalizer(&self) -> &str {
        "term"
    }

    fn rule_count(&self) -> usize {
        self.rules.len()
    }

    fn rule_label(&self, rule: usize) -> String {
        let r = &self.rules[rule];
        format!("{} -> {}", r.lhs, r.rhs)
    }

    fn canonicalize(&self, state: &Term) -> Result<Canonical<Term>> {
        Ok(Canonical { state: state.clone(), key: state.to_string(), perm: (0..state.size()).collect() })
    }

    /// Elements are nodes in preorder. The rewritten subtree is consumed
    /// and its replacement produced; every other node is carried.
    fn rewrites(&self, rule: usize, state: &Term) -> Result<Vec<Rewrite<Term>>> {
        let r = &self.rules[rule];
        let mut out = Vec::new();
        for (pos, binding) in find_matches(&r.lhs, state) {
            let result = rewrite_at(state, &pos, &r.lhs, &r.rhs, &binding)?;
            let start = state.preorder_index(&pos).expect("match position exists");
            let old_len = state.subterm(&pos).expect("match position exists").size();
            let new_len = result.subterm(&pos).expect("same path exists after rewrite").size();
            let carried = (0..start)
                .map(|k| (k, k))
                .chain((start + old_len..state.size()).map(|k| (k, k + new_len - old_len)))
                .collect();
            out.push(Rewrite {
                position: format!("{pos:?}"),
                result,
                consumed: (start..start + old_len).collect(),
                produced: (start..start + new_len).collect(),
                carried,
            });
        }
        Ok(out)
    }

    fn element_count(&self, state: &Term) -> usize {
        state.size()
    }

    fn render(&self, state: &Term) -> String {
        state.to_string()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::multiway::successors;

    #[test]
    fn group_axioms_step() {
        let sys = TermSystem::parse(&["g[x_, g[y_, z_]] -> g[g[x, y], z]", "g[x_, e] -> x"]).unwrap();
        let t: Term = "g[a, g[b, e]]".parse().unwrap();
        let keys: Vec<String> = successors(&sys, &t).unwrap().into_iter().map(|s| s.key).collect();
        assert_eq!(keys, vec!["g[g[a, b], e]".to_string(), "g[a, b]".to_string()]);
    }

    #[test]
    fn rejects_rhs_only_variables() {
        assert!(TermRule::parse("e -> g[a_, inv[a_]]").is_err());
        assert!(TermRule::parse("e -> g[a, inv[a]]").is_ok());
    }
}
