//! ZX-diagrams: spiders, Hadamard boxes, diamonds and boundary points
//! joined by undirected wires.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::{self, Debug, Display};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::canon::{stable_hash, ColoredGraph};
use crate::error::{Error, Result};
use crate::phase::{Phase, PhaseExpr};

/// Phase labels a diagram can carry: concrete phases or symbolic
/// expressions over phase variables.
pub trait PhaseLike: Clone + Ord + Debug + Display + FromStr<Err = Error> + Send + Sync + 'static {
    fn zero() -> Self;
    fn is_zero_phase(&self) -> bool;
}

impl PhaseLike for Phase {
    fn zero() -> Self {
        Phase::ZERO
    }
    fn is_zero_phase(&self) -> bool {
        self.is_zero()
    }
}

impl PhaseLike for PhaseExpr {
    fn zero() -> Self {
        PhaseExpr::default()
    }
    fn is_zero_phase(&self) -> bool {
        self.is_constant() && self.constant.is_zero()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Color {
    Z,
    X,
}

impl Color {
    pub fn flip(self) -> Color {
        match self {
            Color::Z => Color::X,
            Color::X => Color::Z,
        }
    }

    fn letter(self) -> &'static str {
        match self {
            Color::Z => "Z",
            Color::X => "X",
        }
    }
}

/// Node kinds. Spiders keep their declared input/output split; boundary
/// points carry their 0-based position.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Kind<P> {
    Input(usize),
    Output(usize),
    Spider { color: Color, phase: P, inputs: usize, outputs: usize },
    H,
    Diamond,
}

impl<P> Kind<P> {
    pub fn is_boundary(&self) -> bool {
        matches!(self, Kind::Input(_) | Kind::Output(_))
    }

    pub fn spider_color(&self) -> Option<Color> {
        match self {
            Kind::Spider { color, .. } => Some(*color),
            _ => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Node<P> {
    pub name: String,
    pub kind: Kind<P>,
}

/// An open graph. `loops` counts closed wire loops with no nodes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Diagram<P = Phase> {
    pub nodes: Vec<Node<P>>,
    pub wires: Vec<(usize, usize)>,
    pub loops: usize,
}

impl<P> Default for Diagram<P> {
    fn default() -> Self {
        Diagram { nodes: Vec::new(), wires: Vec::new(), loops: 0 }
    }
}

/// A diagram in canonical form with its text key and stable hash.
/// `perm[v]` is the canonical index of original node `v`.
#[derive(Clone, Debug)]
pub struct CanonicalDiagram<P> {
    pub diagram: Diagram<P>,
    pub key: String,
    pub hash: u64,
    pub perm: Vec<usize>,
}

impl<P: PhaseLike> Diagram<P> {
    pub fn empty() -> Self {
        Diagram::default()
    }

    /// `n` parallel bare wires.
    pub fn identity(n: usize) -> Self {
        let mut d = Diagram::empty();
        for k in 0..n {
            let i = d.add_node(format!("i{}", k + 1), Kind::Input(k));
            let o = d.add_node(format!("o{}", k + 1), Kind::Output(k));
            d.add_wire(i, o);
        }
        d
    }

    /// A lone `n → m` spider wired to fresh boundary points.
    pub fn spider(color: Color, phase: P, n: usize, m: usize) -> Self {
        let mut d = Diagram::empty();
        let s = d.add_node(format!("{}1", color.letter().to_lowercase()), Kind::Spider { color, phase, inputs: n, outputs: m });
        for k in 0..n {
            let i = d.add_node(format!("i{}", k + 1), Kind::Input(k));
            d.add_wire(i, s);
        }
        for k in 0..m {
            let o = d.add_node(format!("o{}", k + 1), Kind::Output(k));
            d.add_wire(s, o);
        }
        d
    }

    /// A single Hadamard box on one wire.
    pub fn hadamard() -> Self {
        let mut d = Diagram::empty();
        let i = d.add_node("i1".into(), Kind::Input(0));
        let h = d.add_node("h1".into(), Kind::H);
        let o = d.add_node("o1".into(), Kind::Output(0));
        d.add_wire(i, h);
        d.add_wire(h, o);
        d
    }

    pub fn add_node(&mut self, name: String, kind: Kind<P>) -> usize {
        self.nodes.push(Node { name, kind });
        self.nodes.len() - 1
    }

    pub fn add_wire(&mut self, a: usize, b: usize) {
        self.wires.push((a, b));
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty() && self.loops == 0
    }

    /// Boundary input nodes in order.
    pub fn inputs(&self) -> Vec<usize> {
        self.boundary(|k| matches!(k, Kind::Input(_)))
    }

    pub fn outputs(&self) -> Vec<usize> {
        self.boundary(|k| matches!(k, Kind::Output(_)))
    }

    fn boundary(&self, f: impl Fn(&Kind<P>) -> bool) -> Vec<usize> {
        let mut v: Vec<(usize, usize)> = self
            .nodes
            .iter()
            .enumerate()
            .filter(|(_, n)| f(&n.kind))
            .map(|(i, n)| match n.kind {
                Kind::Input(k) | Kind::Output(k) => (k, i),
                _ => unreachable!(),
            })
            .collect();
        v.sort_unstable();
        v.into_iter().map(|(_, i)| i).collect()
    }

    pub fn n_inputs(&self) -> usize {
        self.nodes.iter().filter(|n| matches!(n.kind, Kind::Input(_))).count()
    }

    pub fn n_outputs(&self) -> usize {
        self.nodes.iter().filter(|n| matches!(n.kind, Kind::Output(_))).count()
    }

    pub fn spiders(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.nodes.len()).filter(|&i| matches!(self.nodes[i].kind, Kind::Spider { .. }))
    }

    pub fn spider_count(&self) -> usize {
        self.spiders().count()
    }

    pub fn diamonds(&self) -> usize {
        self.nodes.iter().filter(|n| n.kind == Kind::Diamond).count()
    }

    /// Wire endpoints at `v`; a self-loop counts twice.
    pub fn degree(&self, v: usize) -> usize {
        self.wires.iter().map(|&(a, b)| (a == v) as usize + (b == v) as usize).sum()
    }

    /// Neighbours of `v` with multiplicity (a self-loop lists `v` twice).
    pub fn neighbors(&self, v: usize) -> Vec<usize> {
        let mut out = Vec::new();
        for &(a, b) in &self.wires {
            if a == v {
                out.push(b);
            }
            if b == v {
                out.push(a);
            }
        }
        out
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.nodes.len();
        for &(a, b) in &self.wires {
            if a >= n || b >= n {
                return Err(Error::InvalidDiagram(format!("wire ({a}, {b}) refers to a missing node")));
            }
        }
        let mut names = BTreeSet::new();
        for node in &self.nodes {
            if !names.insert(node.name.as_str()) {
                return Err(Error::InvalidDiagram(format!("duplicate name `{}`", node.name)));
            }
        }
        let mut degree = vec![0usize; n];
        for &(a, b) in &self.wires {
            degree[a] += 1;
            degree[b] += 1;
        }
        for (v, node) in self.nodes.iter().enumerate() {
            let d = degree[v];
            match &node.kind {
                Kind::Input(_) | Kind::Output(_) if d != 1 => {
                    return Err(Error::InvalidDiagram(format!("boundary `{}` has degree {d}", node.name)));
                }
                Kind::H if d != 2 => {
                    return Err(Error::InvalidDiagram(format!("Hadamard `{}` has degree {d}", node.name)));
                }
                Kind::Diamond if d != 0 => {
                    return Err(Error::InvalidDiagram(format!("diamond `{}` has degree {d}", node.name)));
                }
                Kind::Spider { inputs, outputs, .. } if inputs + outputs != d => {
                    return Err(Error::ArityMismatch(format!(
                        "spider `{}` declares {inputs}+{outputs} wires but has {d}",
                        node.name
                    )));
                }
                _ => {}
            }
        }
        for (what, list) in [("input", self.inputs()), ("output", self.outputs())] {
            for (k, &v) in list.iter().enumerate() {
                let (Kind::Input(j) | Kind::Output(j)) = self.nodes[v].kind else { unreachable!() };
                if j != k {
                    return Err(Error::InvalidDiagram(format!("{what} positions are not 1..{}", list.len())));
                }
            }
        }
        Ok(())
    }

    pub fn map_phases<Q: PhaseLike>(&self, mut f: impl FnMut(&P) -> Result<Q>) -> Result<Diagram<Q>> {
        let nodes = self
            .nodes
            .iter()
            .map(|n| {
                let kind = match &n.kind {
                    Kind::Spider { color, phase, inputs, outputs } => {
                        Kind::Spider { color: *color, phase: f(phase)?, inputs: *inputs, outputs: *outputs }
                    }
                    Kind::Input(k) => Kind::Input(*k),
                    Kind::Output(k) => Kind::Output(*k),
                    Kind::H => Kind::H,
                    Kind::Diamond => Kind::Diamond,
                };
                Ok(Node { name: n.name.clone(), kind })
            })
            .collect::<Result<_>>()?;
        Ok(Diagram { nodes, wires: self.wires.clone(), loops: self.loops })
    }

    /// Swaps Z and X spiders.
    pub fn color_invert(&self) -> Self {
        let mut d = self.clone();
        for n in &mut d.nodes {
            if let Kind::Spider { color, .. } = &mut n.kind {
                *color = color.flip();
            }
        }
        d.renamed()
    }

    /// Monoidal product: disjoint union with `other`'s boundary after ours.
    pub fn stack(&self, other: &Self) -> Self {
        let (ni, no) = (self.n_inputs(), self.n_outputs());
        let mut d = self.clone();
        let off = d.nodes.len();
        for n in &other.nodes {
            let kind = match &n.kind {
                Kind::Input(k) => Kind::Input(k + ni),
                Kind::Output(k) => Kind::Output(k + no),
                k => k.clone(),
            };
            d.nodes.push(Node { name: n.name.clone(), kind });
        }
        d.wires.extend(other.wires.iter().map(|&(a, b)| (a + off, b + off)));
        d.loops += other.loops;
        d.renamed()
    }

    /// Sequential composition: our outputs plugged into `other`'s inputs.
    pub fn compose(&self, other: &Self) -> Result<Self> {
        let (m, n) = (self.n_outputs(), other.n_inputs());
        if m != n {
            return Err(Error::ArityMismatch(format!("composing {m} outputs with {n} inputs")));
        }
        let off = self.nodes.len();
        let mut nodes: Vec<Node<P>> = self.nodes.clone();
        nodes.extend(other.nodes.iter().cloned());
        let mut wires: Vec<(usize, usize)> = self.wires.clone();
        wires.extend(other.wires.iter().map(|&(a, b)| (a + off, b + off)));
        // glue output k of self and input k of other into one degree-2 junction
        let outs = self.outputs();
        let ins: Vec<usize> = other.inputs().into_iter().map(|v| v + off).collect();
        let mut alias: Vec<usize> = (0..nodes.len()).collect();
        for (&o, &i) in outs.iter().zip(&ins) {
            alias[i] = o;
        }
        for w in &mut wires {
            *w = (alias[w.0], alias[w.1]);
        }
        let junctions: BTreeSet<usize> = outs.iter().copied().collect();
        let mut loops = self.loops + other.loops;
        for &j in &junctions {
            let pos: Vec<usize> = (0..wires.len()).filter(|&w| wires[w].0 == j || wires[w].1 == j).collect();
            match pos.as_slice() {
                [w] if wires[*w] == (j, j) => {
                    wires.remove(*w);
                    loops += 1;
                }
                [a, b] => {
                    let other_end = |w: (usize, usize)| if w.0 == j { w.1 } else { w.0 };
                    let (p, q) = (other_end(wires[*a]), other_end(wires[*b]));
                    wires.remove(*b);
                    wires[*a] = (p, q);
                }
                _ => return Err(Error::InvalidDiagram("boundary point with degree other than 1".into())),
            }
        }
        // drop the junction nodes and the aliased inputs
        let dropped: BTreeSet<usize> = junctions.iter().copied().chain(ins.iter().copied()).collect();
        let mut remap = vec![usize::MAX; nodes.len()];
        let mut kept = Vec::new();
        for (v, node) in nodes.into_iter().enumerate() {
            if !dropped.contains(&v) {
                remap[v] = kept.len();
                let kind = match node.kind {
                    Kind::Input(k) if v < off => Kind::Input(k),
                    Kind::Output(k) if v >= off => Kind::Output(k),
                    k => k,
                };
                kept.push(Node { name: node.name, kind });
            }
        }
        let wires = wires.into_iter().map(|(a, b)| (remap[a], remap[b])).collect();
        Ok(Diagram { nodes: kept, wires, loops }.renamed())
    }

    /// Removes the given nodes and every incident wire.
    pub fn without(&self, gone: &BTreeSet<usize>) -> (Self, Vec<Option<usize>>) {
        let mut remap = vec![None; self.nodes.len()];
        let mut nodes = Vec::new();
        for (v, n) in self.nodes.iter().enumerate() {
            if !gone.contains(&v) {
                remap[v] = Some(nodes.len());
                nodes.push(n.clone());
            }
        }
        let wires = self
            .wires
            .iter()
            .filter_map(|&(a, b)| Some((remap[a]?, remap[b]?)))
            .collect();
        (Diagram { nodes, wires, loops: self.loops }, remap)
    }

    /// Assigns fresh names `z1, x1, h1, d1, ...` in node order and `iK`/`oK`
    /// to boundary points.
    pub fn renamed(mut self) -> Self {
        let mut counters: BTreeMap<&str, usize> = BTreeMap::new();
        for n in &mut self.nodes {
            n.name = match &n.kind {
                Kind::Input(k) => format!("i{}", k + 1),
                Kind::Output(k) => format!("o{}", k + 1),
                kind => {
                    let p = match kind {
                        Kind::Spider { color: Color::Z, .. } => "z",
                        Kind::Spider { color: Color::X, .. } => "x",
                        Kind::H => "h",
                        _ => "d",
                    };
                    let c = counters.entry(p).or_insert(0);
                    *c += 1;
                    format!("{p}{c}")
                }
            };
        }
        self
    }

    fn colored_graph(&self) -> ColoredGraph<Kind<P>, ()> {
        let mut g = ColoredGraph::new(self.nodes.iter().map(|n| n.kind.clone()).collect(), false);
        for &(a, b) in &self.wires {
            g.add_edge(a, b, ());
        }
        g
    }

    /// Canonical form, invariant under renaming and wire reordering;
    /// boundary order is preserved because positions are node colours.
    pub fn canonical(&self) -> CanonicalDiagram<P> {
        let form = self.colored_graph().canonical_form();
        let cert = form.certificate;
        let nodes = cert.colors.into_iter().map(|kind| Node { name: String::new(), kind }).collect();
        let mut wires: Vec<(usize, usize)> = cert.edges.into_iter().map(|(a, b, _)| (a.min(b), a.max(b))).collect();
        wires.sort_unstable();
        let diagram = Diagram { nodes, wires, loops: self.loops }.renamed();
        let key = diagram.to_string();
        CanonicalDiagram { hash: stable_hash(&key), key, diagram, perm: form.labeling }
    }

    /// Graph isomorphism respecting kinds, phases and boundary positions.
    pub fn isomorphic(&self, other: &Self) -> bool {
        self.loops == other.loops && self.colored_graph().isomorphism(&other.colored_graph()).is_some()
    }

    pub fn to_ascii(&self) -> String {
        self.render(" * ", "pi")
    }

    fn render(&self, sep: &str, pi: &str) -> String {
        let mut parts = Vec::new();
        for n in &self.nodes {
            match &n.kind {
                Kind::Spider { color, phase, inputs, outputs } => {
                    let ph = phase.to_string().replace("pi", pi);
                    parts.push(format!("{}[{},{inputs},{outputs},{ph}]", color.letter(), n.name));
                }
                Kind::H => parts.push(format!("H[{}]", n.name)),
                Kind::Diamond => parts.push(format!("B[{}]", n.name)),
                _ => {}
            }
        }
        for &(a, b) in &self.wires {
            // inputs first, outputs last, otherwise node order
            let rank = |v: usize| match self.nodes[v].kind {
                Kind::Input(_) => 0,
                Kind::Output(_) => 2,
                _ => 1,
            };
            let (a, b) = if (rank(a), a) <= (rank(b), b) { (a, b) } else { (b, a) };
            parts.push(format!("W[{},{}]", self.nodes[a].name, self.nodes[b].name));
        }
        for _ in 0..self.loops {
            parts.push("L[]".into());
        }
        parts.join(sep)
    }
}

impl<P: PhaseLike> Display for Diagram<P> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render(" ⊗ ", "π"))
    }
}

struct Atom {
    head: String,
    args: Vec<String>,
    offset: usize,
}

struct Parser<'a> {
    src: &'a str,
    pos: usize,
    atoms: Vec<Atom>,
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

    fn eat_sep(&mut self) -> bool {
        self.skip_ws();
        for sep in ["⊗", "*", "\\otimes"] {
            if self.src[self.pos..].starts_with(sep) {
                self.pos += sep.len();
                return true;
            }
        }
        false
    }

    fn expr(&mut self) -> Result<()> {
        self.factor()?;
        while self.eat_sep() {
            self.factor()?;
        }
        Ok(())
    }

    fn factor(&mut self) -> Result<()> {
        self.skip_ws();
        if self.peek() == Some('(') {
            self.pos += 1;
            self.expr()?;
            self.skip_ws();
            if self.peek() != Some(')') {
                return Err(Error::parse(self.pos, "expected `)`"));
            }
            self.pos += 1;
            return Ok(());
        }
        let start = self.pos;
        while self.peek().is_some_and(|c| c.is_ascii_alphabetic()) {
            self.pos += 1;
        }
        let head = self.src[start..self.pos].to_string();
        if head.is_empty() {
            return Err(Error::parse(start, "expected a generator"));
        }
        self.skip_ws();
        if self.peek() != Some('[') {
            return Err(Error::parse(self.pos, "expected `[`"));
        }
        self.pos += 1;
        let body_start = self.pos;
        let close = self.src[self.pos..].find(']').ok_or_else(|| Error::parse(start, "unclosed `[`"))?;
        let body = &self.src[body_start..body_start + close];
        self.pos = body_start + close + 1;
        let mut args: Vec<String> = body.split(',').map(|a| a.trim().to_string()).collect();
        // `H[h1,]` carries a trailing empty argument
        if args.len() > 1 && args.last().is_some_and(String::is_empty) {
            args.pop();
        }
        if args.len() == 1 && args[0].is_empty() {
            args.clear();
        }
        self.atoms.push(Atom { head, args, offset: start });
        Ok(())
    }
}

fn boundary_name(name: &str) -> Option<(bool, usize)> {
    let (is_in, rest) = if let Some(r) = name.strip_prefix('i') {
        (true, r)
    } else {
        (false, name.strip_prefix('o')?)
    };
    let rest = rest.strip_prefix('_').unwrap_or(rest);
    let k: usize = rest.parse().ok()?;
    (k >= 1).then_some((is_in, k - 1))
}

impl<P: PhaseLike> FromStr for Diagram<P> {
    type Err = Error;

    /// Parses `Z[z1,2,1,pi] ⊗ (W[i1,z1] ⊗ ...)`. Separators are `⊗`, `*` or
    /// `\otimes`; grouping is ignored. Unknown wire endpoints named `iK` or
    /// `oK` become boundary points. `L[]` adds a closed loop.
    fn from_str(s: &str) -> Result<Self> {
        let mut p = Parser { src: s, pos: 0, atoms: Vec::new() };
        p.skip_ws();
        if p.pos < s.len() {
            p.expr()?;
            p.skip_ws();
            if p.pos < s.len() {
                return Err(Error::parse(p.pos, "unexpected trailing input"));
            }
        }
        let mut d = Diagram::empty();
        let mut names: BTreeMap<String, usize> = BTreeMap::new();
        let mut wires = Vec::new();
        for atom in p.atoms {
            let Atom { head, args, offset } = atom;
            let arity_err = |n: &str| Error::parse(offset, format!("`{head}` expects {n} arguments"));
            let kind = match head.as_str() {
                "Z" | "X" => {
                    if args.len() != 3 && args.len() != 4 {
                        return Err(arity_err("3 or 4"));
                    }
                    let num = |a: &str| a.parse::<usize>().map_err(|_| Error::parse(offset, format!("invalid arity `{a}`")));
                    let phase = match args.get(3) {
                        Some(a) => a.parse::<P>().map_err(|e| match e {
                            Error::Parse { message, .. } => Error::parse(offset, message),
                            e => e,
                        })?,
                        None => P::zero(),
                    };
                    let color = if head == "Z" { Color::Z } else { Color::X };
                    Kind::Spider { color, phase, inputs: num(&args[1])?, outputs: num(&args[2])? }
                }
                "H" if args.len() == 1 => Kind::H,
                "B" if args.len() == 1 => Kind::Diamond,
                "W" if args.len() == 2 => {
                    wires.push((args[0].clone(), args[1].clone(), offset));
                    continue;
                }
                "L" if args.len() <= 1 => {
                    d.loops += 1;
                    continue;
                }
                "H" | "B" => return Err(arity_err("1")),
                "W" => return Err(arity_err("2")),
                "L" => return Err(arity_err("0 or 1")),
                other => return Err(Error::parse(offset, format!("unknown generator `{other}`"))),
            };
            let name = args[0].clone();
            if name.is_empty() {
                return Err(Error::parse(offset, "empty name"));
            }
            if names.contains_key(&name) {
                return Err(Error::parse(offset, format!("duplicate name `{name}`")));
            }
            names.insert(name.clone(), d.add_node(name, kind));
        }
        for (a, b, _) in wires {
            let mut ends = [0; 2];
            for (slot, name) in ends.iter_mut().zip([a, b]) {
                *slot = match names.get(&name) {
                    Some(&v) => v,
                    None => match boundary_name(&name) {
                        Some((is_in, k)) => {
                            let v = d.add_node(name.clone(), if is_in { Kind::Input(k) } else { Kind::Output(k) });
                            names.insert(name, v);
                            v
                        }
                        None => return Err(Error::UnknownEndpoint(name)),
                    },
                };
            }
            d.add_wire(ends[0], ends[1]);
        }
        d.validate()?;
        Ok(d)
    }
}

/// JSON schema: named nodes, wires by name and ordered boundary arrays.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DiagramJson {
    pub nodes: Vec<NodeJson>,
    pub wires: Vec<[String; 2]>,
    pub inputs: Vec<String>,
    pub outputs: Vec<String>,
    #[serde(default)]
    pub loops: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NodeJson {
    pub name: String,
    /// `Z`, `X`, `H` or `B`.
    pub kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phase: Option<String>,
    #[serde(default)]
    pub inputs: usize,
    #[serde(default)]
    pub outputs: usize,
}

impl<P: PhaseLike> Diagram<P> {
    pub fn to_json(&self) -> DiagramJson {
        let mut nodes = Vec::new();
        for n in &self.nodes {
            let (kind, phase, i, o) = match &n.kind {
                Kind::Spider { color, phase, inputs, outputs } => {
                    (color.letter(), Some(phase.to_string()), *inputs, *outputs)
                }
                Kind::H => ("H", None, 0, 0),
                Kind::Diamond => ("B", None, 0, 0),
                _ => continue,
            };
            nodes.push(NodeJson { name: n.name.clone(), kind: kind.into(), phase, inputs: i, outputs: o });
        }
        let name = |v: usize| self.nodes[v].name.clone();
        DiagramJson {
            nodes,
            wires: self.wires.iter().map(|&(a, b)| [name(a), name(b)]).collect(),
            inputs: self.inputs().into_iter().map(name).collect(),
            outputs: self.outputs().into_iter().map(name).collect(),
            loops: self.loops,
        }
    }

    pub fn from_json(j: &DiagramJson) -> Result<Self> {
        let mut d = Diagram::empty();
        let mut names = BTreeMap::new();
        for n in &j.nodes {
            let kind = match n.kind.as_str() {
                "Z" | "X" => Kind::Spider {
                    color: if n.kind == "Z" { Color::Z } else { Color::X },
                    phase: match &n.phase {
                        Some(p) => p.parse()?,
                        None => P::zero(),
                    },
                    inputs: n.inputs,
                    outputs: n.outputs,
                },
                "H" => Kind::H,
                "B" => Kind::Diamond,
                other => return Err(Error::InvalidDiagram(format!("unknown node kind `{other}`"))),
            };
            if names.insert(n.name.clone(), d.add_node(n.name.clone(), kind)).is_some() {
                return Err(Error::InvalidDiagram(format!("duplicate name `{}`", n.name)));
            }
        }
        for (k, name) in j.inputs.iter().enumerate() {
            if names.insert(name.clone(), d.add_node(name.clone(), Kind::Input(k))).is_some() {
                return Err(Error::InvalidDiagram(format!("duplicate name `{name}`")));
            }
        }
        for (k, name) in j.outputs.iter().enumerate() {
            if names.insert(name.clone(), d.add_node(name.clone(), Kind::Output(k))).is_some() {
                return Err(Error::InvalidDiagram(format!("duplicate name `{name}`")));
            }
        }
        for [a, b] in &j.wires {
            let end = |s: &String| names.get(s).copied().ok_or_else(|| Error::UnknownEndpoint(s.clone()));
            d.add_wire(end(a)?, end(b)?);
        }
        d.loops = j.loops;
        d.validate()?;
        Ok(d)
    }
}

impl<P: PhaseLike> Serialize for Diagram<P> {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_json().serialize(s)
    }
}

impl<'de, P: PhaseLike> Deserialize<'de> for Diagram<P> {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let j = DiagramJson::deserialize(d)?;
        Diagram::from_json(&j).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const TWO_SPIDER: &str =
        "Z[z1,2,1,π]⊗(X[x1,1,2,π/2]⊗(W[i1,z1]⊗(W[z1,o1]⊗(W[x1,z1]⊗(W[i2,x1]⊗W[x1,o2])))))";

    #[test]
    fn parses_two_spider_example() {
        let d: Diagram = TWO_SPIDER.parse().unwrap();
        assert_eq!(d.spider_count(), 2);
        assert_eq!((d.n_inputs(), d.n_outputs()), (2, 2));
        assert_eq!(d.wires.len(), 5);
        let z = &d.nodes[0].kind;
        assert_eq!(*z, Kind::Spider { color: Color::Z, phase: Phase::PI, inputs: 2, outputs: 1 });
    }

    #[test]
    fn parse_errors() {
        assert!(matches!("W[a,o1]".parse::<Diagram>(), Err(Error::UnknownEndpoint(_))));
        assert!(matches!("Z[z,1,1,0]⊗W[i1,z]".parse::<Diagram>(), Err(Error::ArityMismatch(_))));
        assert!(matches!("Z[z,0,1,1/2]⊗W[z,o1]".parse::<Diagram>(), Err(Error::Parse { .. })));
        assert!("Z[z,0,1,0]⊗W[z,o2]".parse::<Diagram>().is_err(), "outputs must be numbered from 1");
        assert!("Q[q]".parse::<Diagram>().is_err());
    }

    #[test]
    fn diamonds_states_and_hadamards() {
        let d: Diagram = "B[d1]".parse().unwrap();
        assert_eq!((d.diamonds(), d.n_inputs(), d.n_outputs()), (1, 0, 0));
        let s: Diagram = "Z[z1,0,1,0]⊗W[z1,o1]".parse().unwrap();
        assert_eq!((s.n_inputs(), s.n_outputs()), (0, 1));
        let h: Diagram = "H[h1,]⊗(W[i1,h1]⊗W[h1,o1])".parse().unwrap();
        assert_eq!(h.canonical().key, Diagram::<Phase>::hadamard().canonical().key);
    }

    #[test]
    fn canonical_key_is_name_and_grouping_invariant() {
        let a: Diagram = TWO_SPIDER.parse().unwrap();
        let b: Diagram = TWO_SPIDER.replace("z1", "s9").parse().unwrap();
        let c: Diagram =
            "W[x1,o2] * W[i2,x1] * (W[x1,z1] * W[z1,o1]) * W[i1,z1] * X[x1,1,2,pi/2] * Z[z1,2,1,pi]".parse().unwrap();
        let ka = a.canonical();
        assert_eq!(ka.key, b.canonical().key);
        assert_eq!(ka.hash, c.canonical().hash);
        let d: Diagram = TWO_SPIDER.replace("Z[z1", "X[z1").parse().unwrap();
        assert_ne!(ka.hash, d.canonical().hash);
        // the canonical text parses back to the same canonical form
        let back: Diagram = ka.key.parse().unwrap();
        assert_eq!(back.canonical().key, ka.key);
    }

    #[test]
    fn boundary_order_matters() {
        let a: Diagram = "Z[z,2,0,0]⊗W[i1,z]⊗W[i2,z]⊗Z[y,0,1,0]⊗W[y,o1]".parse().unwrap();
        let b: Diagram = "Z[z,2,0,pi]⊗W[i1,z]⊗W[i2,z]⊗Z[y,0,1,0]⊗W[y,o1]".parse().unwrap();
        assert_ne!(a.canonical().key, b.canonical().key);
        let c: Diagram = "Z[z,1,1,0]⊗W[i1,z]⊗W[z,o2]⊗W[i2,o1]".parse().unwrap();
        let d: Diagram = "Z[z,1,1,0]⊗W[i2,z]⊗W[z,o1]⊗W[i1,o2]".parse().unwrap();
        assert_ne!(c.canonical().key, d.canonical().key);
    }

    #[test]
    fn stack_and_compose() {
        let z = Diagram::spider(Color::Z, Phase::ZERO, 1, 2);
        let x = Diagram::spider(Color::X, Phase::ZERO, 2, 1);
        let s = z.stack(&x);
        assert_eq!((s.n_inputs(), s.n_outputs()), (3, 3));
        assert_eq!(s.stack(&Diagram::empty()).canonical().key, s.canonical().key);
        let c = z.compose(&x).unwrap();
        assert_eq!((c.n_inputs(), c.n_outputs(), c.wires.len()), (1, 1, 4));
        assert!(z.compose(&z).is_err());
        let id = Diagram::identity(1);
        assert_eq!(id.compose(&z).unwrap().canonical().key, z.canonical().key);
        // cap after cup closes a loop
        let cup: Diagram = "W[o1,o2]".parse().unwrap();
        let cap: Diagram = "W[i1,i2]".parse().unwrap();
        let closed = cup.compose(&cap).unwrap();
        assert_eq!((closed.len(), closed.loops), (0, 1));
    }

    #[test]
    fn json_round_trip() {
        let d: Diagram = TWO_SPIDER.parse().unwrap();
        let text = serde_json::to_string(&d).unwrap();
        let back: Diagram = serde_json::from_str(&text).unwrap();
        assert_eq!(back.canonical().key, d.canonical().key);
    }

    #[test]
    fn symbolic_phases() {
        let d: Diagram<PhaseExpr> = "Z[z,1,1,a+pi]⊗W[i1,z]⊗W[z,o1]".parse().unwrap();
        assert!(d.canonical().key.contains("a+π"));
    }
}
