//! Set substitution over multisets of ordered relations (directed
//! hypergraphs), e.g. `{{x,y},{y,z}} -> {{w,y},{y,z},{z,w},{x,w}}`.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::canon::ColoredGraph;
use crate::error::{Error, Result};
use crate::multiway::{Canonical, Rewrite, RewriteSystem};

pub type Relation = Vec<u32>;

/// A multiset of ordered relations over natural-number vertices.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct SetState(pub Vec<Relation>);

impl SetState {
    pub fn vertices(&self) -> BTreeSet<u32> {
        self.0.iter().flatten().copied().collect()
    }

    /// Parses `{{0,0},{0,0}}`.
    pub fn parse(s: &str) -> Result<SetState> {
        let rels = parse_nested(s)?;
        rels.into_iter()
            .map(|r| {
                r.iter()
                    .map(|a| a.parse::<u32>().map_err(|_| Error::parse(0, format!("vertex `{a}` is not a number"))))
                    .collect()
            })
            .collect::<Result<_>>()
            .map(SetState)
    }
}

impl std::fmt::Display for SetState {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str("{")?;
        for (i, r) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            f.write_str("{")?;
            for (j, v) in r.iter().enumerate() {
                if j > 0 {
                    f.write_str(",")?;
                }
                write!(f, "{v}")?;
            }
            f.write_str("}")?;
        }
        f.write_str("}")
    }
}

/// `{{a,b},{c}}` into atom lists.
fn parse_nested(s: &str) -> Result<Vec<Vec<String>>> {
    let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    let inner = t
        .strip_prefix('{')
        .and_then(|x| x.strip_suffix('}'))
        .ok_or_else(|| Error::parse(0, "expected `{...}`"))?;
    let mut out = Vec::new();
    let mut rest = inner;
    let mut offset = 1;
    while !rest.is_empty() {
        let body = rest.strip_prefix('{').ok_or_else(|| Error::parse(offset, "expected `{`"))?;
        let end = body.find('}').ok_or_else(|| Error::parse(offset, "unclosed relation"))?;
        let atoms: Vec<String> =
            if end == 0 { Vec::new() } else { body[..end].split(',').map(str::to_string).collect() };
        if atoms.iter().any(String::is_empty) {
            return Err(Error::parse(offset, "empty atom"));
        }
        out.push(atoms);
        rest = &body[end + 1..];
        offset += end + 2;
        if let Some(r) = rest.strip_prefix(',') {
            rest = r;
            offset += 1;
        } else if !rest.is_empty() {
            return Err(Error::parse(offset, "expected `,`"));
        }
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SetRule {
    pub lhs: Vec<Vec<String>>,
    pub rhs: Vec<Vec<String>>,
}

impl SetRule {
    /// Parses `{{x,y},{y,z}}->{{w,y},{y,z},{z,w},{x,w}}`.
    pub fn parse(s: &str) -> Result<SetRule> {
        let norm = s.replace('→', "->");
        let (l, r) = norm.split_once("->").ok_or_else(|| Error::parse(0, "expected `->`"))?;
        let lhs = parse_nested(l)?;
        let rhs = parse_nested(r)?;
        if lhs.is_empty() {
            return Err(Error::InvalidRule("empty left-hand side".into()));
        }
        Ok(SetRule { lhs, rhs })
    }

    fn lhs_vars(&self) -> BTreeSet<&str> {
        self.lhs.iter().flatten().map(String::as_str).collect()
    }
}

impl std::fmt::Display for SetRule {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let side = |rs: &Vec<Vec<String>>| {
            let inner: Vec<String> = rs.iter().map(|r| format!("{{{}}}", r.join(","))).collect();
            format!("{{{}}}", inner.join(","))
        };
        write!(f, "{}->{}", side(&self.lhs), side(&self.rhs))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SetSystem {
    pub rules: Vec<SetRule>,
}

impl SetSystem {
    pub fn new(rules: Vec<SetRule>) -> Self {
        SetSystem { rules }
    }

    pub fn parse(rules: &[&str]) -> Result<Self> {
        Ok(SetSystem { rules: rules.iter().map(|r| SetRule::parse(r)).collect::<Result<_>>()? })
    }
}

/// All matches of a rule: ordered tuples of distinct relation indices with
/// a consistent variable binding. Vertex bindings need not be injective.
pub fn matches(rule: &SetRule, state: &SetState) -> Vec<(Vec<usize>, BTreeMap<String, u32>)> {
    fn go(
        rule: &SetRule,
        state: &SetState,
        k: usize,
        used: &mut Vec<usize>,
        bind: &mut BTreeMap<String, u32>,
        out: &mut Vec<(Vec<usize>, BTreeMap<String, u32>)>,
    ) {
        if k == rule.lhs.len() {
            out.push((used.clone(), bind.clone()));
            return;
        }
        let pat = &rule.lhs[k];
        for (i, rel) in state.0.iter().enumerate() {
            if used.contains(&i) || rel.len() != pat.len() {
                continue;
            }
            let mut added = Vec::new();
            let mut ok = true;
            for (var, &v) in pat.iter().zip(rel) {
                match bind.get(var) {
                    Some(&b) if b != v => {
                        ok = false;
                        break;
                    }
                    Some(_) => {}
                    None => {
                        bind.insert(var.clone(), v);
                        added.push(var.clone());
                    }
                }
            }
            if ok {
                used.push(i);
                go(rule, state, k + 1, used, bind, out);
                used.pop();
            }
            for a in added {
                bind.remove(&a);
            }
        }
    }
    let mut out = Vec::new();
    go(rule, state, 0, &mut Vec::new(), &mut BTreeMap::new(), &mut out);
    out
}

/// Canonical form: relations renamed by a canonical labeling of the
/// incidence graph, then sorted. `perm` maps relation indices.
pub fn canonical_set(state: &SetState) -> (SetState, Vec<usize>) {
    let verts: Vec<u32> = state.vertices().into_iter().collect();
    let nv = verts.len();
    let vidx: BTreeMap<u32, usize> = verts.iter().enumerate().map(|(i, v)| (*v, i)).collect();
    // vertex nodes first, then one node per relation coloured by its arity
    let mut colors: Vec<(u8, usize)> = vec![(0, 0); nv];
    colors.extend(state.0.iter().map(|r| (1, r.len())));
    let mut g = ColoredGraph::new(colors, false);
    for (ri, r) in state.0.iter().enumerate() {
        for (pos, v) in r.iter().enumerate() {
            g.add_edge(nv + ri, vidx[v], pos);
        }
    }
    let lab = g.canonical_form().labeling;
    // vertex nodes carry the smallest colours, so their labels are 0..nv
    let rename = |v: &u32| lab[vidx[v]] as u32;
    let mut rels: Vec<(Relation, usize, usize)> =
        state.0.iter().enumerate().map(|(i, r)| (r.iter().map(rename).collect(), lab[nv + i], i)).collect();
    rels.sort();
    let mut perm = vec![0; state.0.len()];
    for (new, (_, _, old)) in rels.iter().enumerate() {
        perm[*old] = new;
    }
    (SetState(rels.into_iter().map(|(r, _, _)| r).collect()), perm)
}

impl RewriteSystem for SetSystem {
    type State = SetState;

    fn canonicalizer(&self) -> &str {
        "set"
    }

    fn rule_count(&self) -> usize {
        self.rules.len()
    }

    fn rule_label(&self, rule: usize) -> String {
        self.rules[rule].to_string()
    }

    fn canonicalize(&self, state: &SetState) -> Result<Canonical<SetState>> {
        let (c, perm) = canonical_set(state);
        Ok(Canonical { key: c.to_string(), state: c, perm })
    }

    fn rewrites(&self, rule: usize, state: &SetState) -> Result<Vec<Rewrite<SetState>>> {
        let r = &self.rules[rule];
        let lhs_vars = r.lhs_vars();
        let used = state.vertices();
        let mut out = Vec::new();
        for (rels, bind) in matches(r, state) {
            // fresh vertices take the lowest unused numbers, in order of first appearance
            let mut bind = bind;
            let mut taken = used.clone();
            for var in r.rhs.iter().flatten() {
                if lhs_vars.contains(var.as_str()) || bind.contains_key(var) {
                    continue;
                }
                let fresh = (0u32..).find(|n| !taken.contains(n)).expect("unbounded range");
                taken.insert(fresh);
                bind.insert(var.clone(), fresh);
            }
            let mut result = Vec::new();
            let mut carried = Vec::new();
            for (i, rel) in state.0.iter().enumerate() {
                if !rels.contains(&i) {
                    carried.push((i, result.len()));
                    result.push(rel.clone());
                }
            }
            let start = result.len();
            for rel in &r.rhs {
                result.push(rel.iter().map(|v| bind[v]).collect());
            }
            out.push(Rewrite {
                position: rels.iter().map(usize::to_string).collect::<Vec<_>>().join(","),
                produced: (start..result.len()).collect(),
                result: SetState(result),
                consumed: rels,
                carried,
            });
        }
        Ok(out)
    }

    fn element_count(&self, state: &SetState) -> usize {
        state.0.len()
    }

    fn render(&self, state: &SetState) -> String {
        state.to_string()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_print() {
        let r = SetRule::parse("{{x,y},{y,z}}->{{w,y},{y,z},{z,w},{x,w}}").unwrap();
        assert_eq!(r.to_string(), "{{x,y},{y,z}}->{{w,y},{y,z},{z,w},{x,w}}");
        let s = SetState::parse("{{0,0},{0,0}}").unwrap();
        assert_eq!(s.0, vec![vec![0, 0], vec![0, 0]]);
        assert!(SetRule::parse("{}->{{x}}").is_err());
        assert!(SetState::parse("{{a}}").is_err());
    }

    #[test]
    fn three_cycle_match_count() {
        let r = SetRule::parse("{{x,y},{y,z}}->{{x,z}}").unwrap();
        let s = SetState::parse("{{1,2},{2,3},{3,1}}").unwrap();
        assert_eq!(matches(&r, &s).len(), 3);
    }

    #[test]
    fn self_loop_init_grows() {
        let sys = SetSystem::parse(&["{{x,y},{y,z}}->{{w,y},{y,z},{z,w},{x,w}}"]).unwrap();
        let s = SetState::parse("{{0,0},{0,0}}").unwrap();
        let rws = sys.rewrites(0, &s).unwrap();
        assert_eq!(rws.len(), 2);
        for rw in rws {
            assert_eq!(rw.result.0.len(), 4);
            assert!(rw.result.vertices().contains(&1));
        }
    }

    #[test]
    fn canonical_form_ignores_names() {
        let a = SetState::parse("{{5,7},{7,9},{9,5},{5,5}}").unwrap();
        let b = SetState::parse("{{2,0},{0,1},{1,2},{2,2}}").unwrap();
        assert_eq!(canonical_set(&a).0, canonical_set(&b).0);
        let c = SetState::parse("{{0,1},{1,2},{2,0},{1,1}}").unwrap();
        assert_eq!(canonical_set(&a).0, canonical_set(&c).0);
        let d = SetState::parse("{{0,1},{2,1},{2,0},{1,1}}").unwrap();
        assert_ne!(canonical_set(&a).0, canonical_set(&d).0);
    }
}
