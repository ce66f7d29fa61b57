//! Ordered trees of operator applications, patterns with `x_` variables,
//! one-sided matching and substitution.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use crate::error::{Error, Result};

/// Interned symbol.
pub type Sym = Arc<str>;

/// `head[children...]`; a leaf is a term without children. In patterns a
/// leaf whose head ends in `_` is a variable.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Term {
    pub head: Sym,
    pub children: Vec<Term>,
}

/// Child-index path from the root.
pub type Position = Vec<usize>;

/// Variable name (without the trailing `_`) to bound term.
pub type Binding = BTreeMap<String, Term>;

impl Term {
    pub fn atom(head: &str) -> Term {
        Term { head: Arc::from(head), children: Vec::new() }
    }

    pub fn app(head: &str, children: Vec<Term>) -> Term {
        Term { head: Arc::from(head), children }
    }

    pub fn var(name: &str) -> Term {
        Term::atom(&format!("{name}_"))
    }

    pub fn is_leaf(&self) -> bool {
        self.children.is_empty()
    }

    /// Variable name if this is a pattern variable.
    pub fn var_name(&self) -> Option<&str> {
        if self.is_leaf() && self.head.len() > 1 {
            self.head.strip_suffix('_')
        } else {
            None
        }
    }

    pub fn size(&self) -> usize {
        1 + self.children.iter().map(Term::size).sum::<usize>()
    }

    pub fn depth(&self) -> usize {
        1 + self.children.iter().map(Term::depth).max().unwrap_or(0)
    }

    pub fn subterm(&self, pos: &[usize]) -> Option<&Term> {
        let mut t = self;
        for &i in pos {
            t = t.children.get(i)?;
        }
        Some(t)
    }

    /// All positions in depth-first preorder.
    pub fn positions(&self) -> Vec<Position> {
        fn go(t: &Term, path: &mut Position, out: &mut Vec<Position>) {
            out.push(path.clone());
            for (i, c) in t.children.iter().enumerate() {
                path.push(i);
                go(c, path, out);
                path.pop();
            }
        }
        let mut out = Vec::new();
        go(self, &mut Vec::new(), &mut out);
        out
    }

    /// Preorder index of a position.
    pub fn preorder_index(&self, pos: &[usize]) -> Option<usize> {
        let mut idx = 0;
        let mut t = self;
        for &i in pos {
            let c = t.children.get(i)?;
            idx += 1 + t.children[..i].iter().map(Term::size).sum::<usize>();
            t = c;
        }
        Some(idx)
    }

    pub fn variables(&self) -> Vec<String> {
        let mut out = Vec::new();
        self.collect_vars(&mut out);
        out.sort();
        out.dedup();
        out
    }

    fn collect_vars(&self, out: &mut Vec<String>) {
        if let Some(v) = self.var_name() {
            out.push(v.to_string());
        }
        for c in &self.children {
            c.collect_vars(out);
        }
    }

    /// Replaces the subterm at `pos`.
    pub fn replace_at(&self, pos: &[usize], new: Term) -> Result<Term> {
        match pos.split_first() {
            None => Ok(new),
            Some((&i, rest)) => {
                if i >= self.children.len() {
                    return Err(Error::InvalidPosition(pos.to_vec()));
                }
                let mut t = self.clone();
                t.children[i] = self.children[i].replace_at(rest, new).map_err(|_| Error::InvalidPosition(pos.to_vec()))?;
                Ok(t)
            }
        }
    }
}

/// Root match of `pattern` against `term`. Repeated variables must bind
/// equal subterms.
pub fn match_term(pattern: &Term, term: &Term) -> Option<Binding> {
    let mut b = Binding::new();
    match_into(pattern, term, &mut b).then_some(b)
}

fn match_into(p: &Term, t: &Term, b: &mut Binding) -> bool {
    if let Some(v) = p.var_name() {
        return match b.get(v) {
            Some(prev) => prev == t,
            None => {
                b.insert(v.to_string(), t.clone());
                true
            }
        };
    }
    p.head == t.head
        && p.children.len() == t.children.len()
        && p.children.iter().zip(&t.children).all(|(pc, tc)| match_into(pc, tc, b))
}

/// Every position where `pattern` matches, in depth-first preorder.
pub fn find_matches(pattern: &Term, term: &Term) -> Vec<(Position, Binding)> {
    term.positions()
        .into_iter()
        .filter_map(|pos| {
            let sub = term.subterm(&pos).expect("position from positions()");
            match_term(pattern, sub).map(|b| (pos, b))
        })
        .collect()
}

/// Replaces variables by their bindings. A bare leaf whose head is a bound
/// name (right-hand sides written `g[x, y]`) is substituted as well.
pub fn substitute(pattern: &Term, binding: &Binding) -> Result<Term> {
    if let Some(v) = pattern.var_name() {
        return binding.get(v).cloned().ok_or_else(|| Error::UnboundVariable(v.to_string()));
    }
    if pattern.is_leaf() {
        if let Some(t) = binding.get(&*pattern.head) {
            return Ok(t.clone());
        }
        return Ok(pattern.clone());
    }
    let children = pattern.children.iter().map(|c| substitute(c, binding)).collect::<Result<_>>()?;
    Ok(Term { head: pattern.head.clone(), children })
}

/// Rewrites the subterm at `pos` with `rhs` under `binding`, after checking
/// that `lhs` matches there consistently with the binding.
pub fn rewrite_at(term: &Term, pos: &[usize], lhs: &Term, rhs: &Term, binding: &Binding) -> Result<Term> {
    let sub = term.subterm(pos).ok_or_else(|| Error::InvalidPosition(pos.to_vec()))?;
    let found = match_term(lhs, sub).ok_or_else(|| Error::MatchMismatch(pos.to_vec()))?;
    if found.iter().any(|(k, v)| binding.get(k).is_some_and(|w| w != v)) {
        return Err(Error::MatchMismatch(pos.to_vec()));
    }
    let mut full = found;
    for (k, v) in binding {
        full.entry(k.clone()).or_insert_with(|| v.clone());
    }
    term.replace_at(pos, substitute(rhs, &full)?)
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.head)?;
        if !self.children.is_empty() {
            f.write_str("[")?;
            for (i, c) in self.children.iter().enumerate() {
                if i > 0 {
                    f.write_str(", ")?;
                }
                write!(f, "{c}")?;
            }
            f.write_str("]")?;
        }
        Ok(())
    }
}

impl fmt::Debug for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl FromStr for Term {
    type Err = Error;
    fn from_str(s: &str) -> Result<Term> {
        let mut p = Parser { src: s, pos: 0 };
        let t = p.term()?;
        p.skip_ws();
        if p.pos != s.len() {
            return Err(Error::parse(p.pos, "trailing input"));
        }
        Ok(t)
    }
}

struct Parser<'a> {
    src: &'a str,
    pos: usize,
}

impl Parser<'_> {
    fn skip_ws(&mut self) {
        while let Some(c) = self.src[self.pos..].chars().next() {
            if !c.is_whitespace() {
                break;
            }
            self.pos += c.len_utf8();
        }
    }

    fn peek(&self) -> Option<char> {
        self.src[self.pos..].chars().next()
    }

    fn term(&mut self) -> Result<Term> {
        self.skip_ws();
        let start = self.pos;
        while let Some(c) = self.peek() {
            if c == '[' || c == ']' || c == ',' || c.is_whitespace() {
                break;
            }
            self.pos += c.len_utf8();
        }
        if self.pos == start {
            return Err(Error::parse(start, "expected symbol"));
        }
        let head = &self.src[start..self.pos];
        self.skip_ws();
        let mut children = Vec::new();
        if self.peek() == Some('[') {
            self.pos += 1;
            self.skip_ws();
            if self.peek() == Some(']') {
                self.pos += 1;
            } else {
                loop {
                    children.push(self.term()?);
                    self.skip_ws();
                    match self.peek() {
                        Some(',') => self.pos += 1,
                        Some(']') => {
                            self.pos += 1;
                            break;
                        }
                        _ => return Err(Error::parse(self.pos, "expected `,` or `]`")),
                    }
                }
            }
        }
        Ok(Term::app(head, children))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn t(s: &str) -> Term {
        s.parse().unwrap()
    }

    #[test]
    fn match_examples() {
        let b = match_term(&t("g[x_, g[y_, z_]]"), &t("g[a, g[b, c]]")).unwrap();
        assert_eq!(b["x"], t("a"));
        assert_eq!(b["y"], t("b"));
        assert_eq!(b["z"], t("c"));
        assert_eq!(match_term(&t("x_"), &t("f[q, r]")).unwrap()["x"], t("f[q, r]"));
        assert!(match_term(&t("g[x_, x_]"), &t("g[a, b]")).is_none());
        assert_eq!(match_term(&t("g[x_, x_]"), &t("g[a, a]")).unwrap()["x"], t("a"));
    }

    #[test]
    fn find_matches_examples() {
        let m = find_matches(&t("g[x_, y_]"), &t("g[g[a,b], g[c,d]]"));
        let pos: Vec<_> = m.iter().map(|(p, _)| p.clone()).collect();
        assert_eq!(pos, vec![vec![], vec![0], vec![1]]);
        let m = find_matches(&t("e"), &t("g[a, e]"));
        assert_eq!(m.len(), 1);
        assert_eq!(m[0].0, vec![1]);
        assert_eq!(find_matches(&t("g[a_, inv[a_]]"), &t("g[g[a, inv[a]], e]")).len(), 1);
    }

    #[test]
    fn substitute_examples() {
        let b: Binding = [("x", "a"), ("y", "b"), ("z", "c")].iter().map(|(k, v)| (k.to_string(), t(v))).collect();
        assert_eq!(substitute(&t("g[g[x,y],z]"), &b).unwrap(), t("g[g[a,b],c]"));
        assert_eq!(substitute(&t("e"), &Binding::new()).unwrap(), t("e"));
        let b: Binding = [("a".to_string(), t("b"))].into();
        assert_eq!(substitute(&t("g[a, inv[a]]"), &b).unwrap(), t("g[b, inv[b]]"));
        assert!(matches!(substitute(&t("g[q_]"), &Binding::new()), Err(Error::UnboundVariable(_))));
    }

    #[test]
    fn rewrite_examples() {
        let assoc = (t("g[x_, g[y_, z_]]"), t("g[g[x, y], z]"));
        let term = t("g[a, g[b, c]]");
        let b = match_term(&assoc.0, &term).unwrap();
        assert_eq!(rewrite_at(&term, &[], &assoc.0, &assoc.1, &b).unwrap(), t("g[g[a, b], c]"));

        let rid = (t("g[x_, e]"), t("x"));
        let term = t("g[a, e]");
        let b = match_term(&rid.0, &term).unwrap();
        assert_eq!(rewrite_at(&term, &[], &rid.0, &rid.1, &b).unwrap(), t("a"));

        let term = t("g[e, g[a,e]]");
        let b = match_term(&rid.0, term.subterm(&[1]).unwrap()).unwrap();
        assert_eq!(rewrite_at(&term, &[1], &rid.0, &rid.1, &b).unwrap(), t("g[e, a]"));

        assert!(matches!(rewrite_at(&term, &[5], &rid.0, &rid.1, &b), Err(Error::InvalidPosition(_))));
        assert!(matches!(rewrite_at(&term, &[0], &rid.0, &rid.1, &b), Err(Error::MatchMismatch(_))));
    }

    #[test]
    fn parse_print_roundtrip() {
        for s in ["a", "g[a, inv[b]]", "f[]", "h[x_, g[y_, z_], q]"] {
            let term = t(s);
            assert_eq!(t(&term.to_string()), term);
        }
        assert_eq!(t("f[]"), t("f"));
        assert!("g[a,".parse::<Term>().is_err());
        assert!("g[a] b".parse::<Term>().is_err());
    }

    #[test]
    fn preorder_index_matches_positions() {
        let term = t("g[g[a,b], h[c, d[e]]]");
        for (i, p) in term.positions().iter().enumerate() {
            assert_eq!(term.preorder_index(p), Some(i));
        }
    }
}
