//! Rulial composition of rewrite systems, merging of multiway graphs,
//! quotiented graph isomorphism, the monoidal-compatibility experiment and
//! the root-NOT quantum toy.

use std::collections::{BTreeMap, BTreeSet};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::canon::ColoredGraph;
use crate::error::{Error, Result};
use crate::matrix::ComplexMatrix;
use crate::multiway::{
    complete, evolve, hash_hex, Canonical, CompletionConfig, Event, EvolveConfig, Mode, MultiwayGraph, Rewrite,
    RewriteSystem, StateInfo,
};
use crate::scalar::Scalar;
use crate::zx::diagram::{Color, Diagram, Kind};
use crate::zx::matcher::ZxSystem;
use crate::zx::rules::{instantiate, Family, RuleInstance};
use crate::Phase;

/// Disjoint union of the rules of several systems over one state type.
/// Rules are ordered by label and deduplicated by label, so composition is
/// commutative, associative and idempotent at the level of rule lists.
#[derive(Clone, Debug)]
pub struct RulialSystem<R> {
    pub components: Vec<R>,
    /// `(component, rule)` in combined order.
    pub rules: Vec<(usize, usize)>,
    name: String,
}

pub fn rulial_compose<R: RewriteSystem>(systems: Vec<R>) -> Result<RulialSystem<R>> {
    let Some(first) = systems.first() else {
        return Err(Error::OutOfRange("rulial composition of no systems".into()));
    };
    let name = first.canonicalizer().to_string();
    for s in &systems {
        if s.canonicalizer() != name {
            return Err(Error::CanonicalizerMismatch(name, s.canonicalizer().to_string()));
        }
    }
    let mut labelled: BTreeMap<String, (usize, usize)> = BTreeMap::new();
    for (c, s) in systems.iter().enumerate() {
        for r in 0..s.rule_count() {
            labelled.entry(s.rule_label(r)).or_insert((c, r));
        }
    }
    Ok(RulialSystem { rules: labelled.into_values().collect(), components: systems, name })
}

impl<R: RewriteSystem> RulialSystem<R> {
    /// Flattened composition with another rulial system.
    pub fn compose(self, other: RulialSystem<R>) -> Result<RulialSystem<R>> {
        let mut all = self.components;
        all.extend(other.components);
        rulial_compose(all)
    }

    pub fn labels(&self) -> Vec<String> {
        (0..self.rules.len()).map(|r| self.rule_label(r)).collect()
    }
}

impl<R: RewriteSystem> RewriteSystem for RulialSystem<R> {
    type State = R::State;

    fn canonicalizer(&self) -> &str {
        &self.name
    }

    fn rule_count(&self) -> usize {
        self.rules.len()
    }

    fn rule_label(&self, rule: usize) -> String {
        let (c, r) = self.rules[rule];
        self.components[c].rule_label(r)
    }

    fn canonicalize(&self, state: &R::State) -> Result<Canonical<R::State>> {
        self.components[0].canonicalize(state)
    }

    fn rewrites(&self, rule: usize, state: &R::State) -> Result<Vec<Rewrite<R::State>>> {
        let (c, r) = self.rules[rule];
        self.components[c].rewrites(r, state)
    }

    fn element_count(&self, state: &R::State) -> usize {
        self.components[0].element_count(state)
    }

    fn render(&self, state: &R::State) -> String {
        self.components[0].render(state)
    }
}

/// Union of multiway graphs with vertices identified by canonical key.
/// Vertex order is first appearance; a merged vertex keeps its smallest
/// generation. Events equal in endpoints, rule label and position are kept
/// once.
pub fn merge_multiway(graphs: &[MultiwayGraph]) -> Result<MultiwayGraph> {
    let Some(first) = graphs.first() else {
        return Err(Error::OutOfRange("merging no graphs".into()));
    };
    let mut index: BTreeMap<String, usize> = BTreeMap::new();
    let mut states: Vec<StateInfo> = Vec::new();
    let mut roots = BTreeSet::new();
    let mut seen = BTreeSet::new();
    let mut events = Vec::new();
    for g in graphs {
        if g.system != first.system {
            return Err(Error::CanonicalizerMismatch(first.system.clone(), g.system.clone()));
        }
        let map: Vec<usize> = g
            .states
            .iter()
            .map(|s| match index.get(&s.key) {
                Some(&i) => {
                    states[i].generation = states[i].generation.min(s.generation);
                    i
                }
                None => {
                    index.insert(s.key.clone(), states.len());
                    states.push(s.clone());
                    states.len() - 1
                }
            })
            .collect();
        roots.extend(g.roots.iter().map(|&r| map[r]));
        for e in &g.events {
            let (i, o) = (map[e.input], map[e.output]);
            if seen.insert((i, o, e.rule_label.clone(), e.position.clone())) {
                events.push(Event { input: i, output: o, ..e.clone() });
            }
        }
    }
    Ok(MultiwayGraph { system: first.system.clone(), mode: first.mode, roots: roots.into_iter().collect(), states, events })
}

/// A plain vertex-coloured graph.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PlainGraph {
    pub labels: Vec<String>,
    pub colors: Vec<u8>,
    pub edges: Vec<(usize, usize)>,
    pub directed: bool,
}

impl PlainGraph {
    pub fn len(&self) -> usize {
        self.colors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.colors.is_empty()
    }

    pub fn path(n: usize) -> PlainGraph {
        PlainGraph {
            labels: (0..n).map(|i| i.to_string()).collect(),
            colors: vec![0; n],
            edges: (1..n).map(|i| (i - 1, i)).collect(),
            directed: false,
        }
    }

    pub fn star(n: usize) -> PlainGraph {
        PlainGraph {
            labels: (0..n).map(|i| i.to_string()).collect(),
            colors: vec![0; n],
            edges: (1..n).map(|i| (0, i)).collect(),
            directed: false,
        }
    }

    fn colored(&self) -> ColoredGraph<u8, ()> {
        let mut g = ColoredGraph::new(self.colors.clone(), self.directed);
        for &(a, b) in &self.edges {
            g.add_edge(a, b, ());
        }
        g
    }
}

pub const ISOMORPHISM_CAP: usize = 5000;

/// Exact isomorphism test; the witness maps vertices of `a` to `b`.
pub fn graph_isomorphic(a: &PlainGraph, b: &PlainGraph) -> Result<Option<Vec<usize>>> {
    if a.len().max(b.len()) > ISOMORPHISM_CAP {
        return Err(Error::ResourceLimit(format!("isomorphism test above {ISOMORPHISM_CAP} vertices")));
    }
    if a.len() != b.len() || a.edges.len() != b.edges.len() || a.directed != b.directed {
        return Ok(None);
    }
    Ok(a.colored().isomorphism(&b.colored()))
}

/// State identifications applied before comparing graphs.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum Quotient {
    None,
    /// Adjacent phaseless two-legged spiders of either colour commute.
    #[default]
    ChainCommutation,
    /// A diagram and its colour inversion are one state.
    ColorInversion,
    Both,
}

fn chain_key(d: &Diagram) -> String {
    let identity = |v: usize| match &d.nodes[v].kind {
        Kind::Spider { phase, .. } => phase.is_zero() && d.degree(v) == 2,
        _ => false,
    };
    let n = d.len();
    let mut chain_of = vec![usize::MAX; n];
    let mut counts: Vec<(usize, usize)> = Vec::new();
    for s in 0..n {
        if !identity(s) || chain_of[s] != usize::MAX {
            continue;
        }
        let id = counts.len();
        counts.push((0, 0));
        let mut stack = vec![s];
        chain_of[s] = id;
        while let Some(v) = stack.pop() {
            match d.nodes[v].kind.spider_color() {
                Some(Color::Z) => counts[id].0 += 1,
                _ => counts[id].1 += 1,
            }
            for w in d.neighbors(v) {
                if identity(w) && chain_of[w] == usize::MAX {
                    chain_of[w] = id;
                    stack.push(w);
                }
            }
        }
    }
    // every chain becomes one node labelled with its colour counts
    let mut vertex = vec![0; n];
    let mut colors: Vec<String> = counts.iter().map(|(z, x)| format!("chain({z},{x})")).collect();
    for v in 0..n {
        if chain_of[v] != usize::MAX {
            vertex[v] = chain_of[v];
        } else {
            vertex[v] = colors.len();
            colors.push(format!("{:?}", d.nodes[v].kind));
        }
    }
    let mut g: ColoredGraph<String, ()> = ColoredGraph::new(colors, false);
    for &(a, b) in &d.wires {
        if chain_of[a] == usize::MAX || chain_of[a] != chain_of[b] {
            g.add_edge(vertex[a], vertex[b], ());
        } else if a == b || d.neighbors(a).iter().filter(|&&x| x == b).count() > 1 {
            // wires inside a chain only matter when the chain closes on itself
            g.add_edge(vertex[a], vertex[b], ());
        }
    }
    let cert = g.canonical_form().certificate;
    format!("{:?}|{}", cert, d.loops)
}

/// Class key of a state under a quotient.
pub fn quotient_key(d: &Diagram, q: Quotient) -> String {
    let base = |d: &Diagram| match q {
        Quotient::ChainCommutation | Quotient::Both => chain_key(d),
        _ => d.canonical().key,
    };
    match q {
        Quotient::ColorInversion | Quotient::Both => {
            let a = base(d);
            let b = base(&d.color_invert());
            a.min(b)
        }
        _ => base(d),
    }
}

fn collapse(vertices: &[usize], class: &[String], edges: &[(usize, usize)], roots: &BTreeSet<usize>, directed: bool) -> PlainGraph {
    let mut ids: BTreeMap<&str, usize> = BTreeMap::new();
    let mut labels = Vec::new();
    let mut colors = Vec::new();
    let mut of = BTreeMap::new();
    for &v in vertices {
        let k = class[v].as_str();
        let id = *ids.entry(k).or_insert_with(|| {
            labels.push(hash_hex(k));
            colors.push(0);
            labels.len() - 1
        });
        if roots.contains(&v) {
            colors[id] = 1;
        }
        of.insert(v, id);
    }
    let mut set = BTreeSet::new();
    for &(a, b) in edges {
        if let (Some(&x), Some(&y)) = (of.get(&a), of.get(&b)) {
            if x != y {
                set.insert(if directed { (x, y) } else { (x.min(y), x.max(y)) });
            }
        }
    }
    PlainGraph { labels, colors, edges: set.into_iter().collect(), directed }
}

/// States graph and branchial slices of an evolution under a quotient.
pub fn quotient_graphs(g: &MultiwayGraph, states: &[Diagram], q: Quotient) -> Result<(PlainGraph, Vec<PlainGraph>)> {
    let class: Vec<String> = states.iter().map(|s| quotient_key(s, q)).collect();
    let all: Vec<usize> = (0..g.state_count()).collect();
    let roots: BTreeSet<usize> = g.roots.iter().copied().collect();
    let states_graph = collapse(&all, &class, &g.state_edges(), &roots, true);
    let mut slices = Vec::new();
    for t in 0..=g.max_generation() {
        let b = g.branchial(t, 1)?;
        slices.push(collapse(&b.vertices, &class, &b.edges, &BTreeSet::new(), false));
    }
    Ok((states_graph, slices))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SideSummary {
    pub states: usize,
    pub edges: usize,
    pub slice_sizes: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuotientVerdict {
    pub quotient: Quotient,
    pub states_isomorphic: bool,
    pub branchial_isomorphic: bool,
    pub composite: SideSummary,
    pub stacked: SideSummary,
    /// Class hashes of the composite states graph paired with their images.
    pub witness: Vec<(String, String)>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MonoidalReport {
    pub diagram: String,
    pub steps: usize,
    pub quotient: Quotient,
    pub raw: QuotientVerdict,
    pub quotiented: QuotientVerdict,
    pub passed: bool,
}

fn compare(
    a: (&MultiwayGraph, &[Diagram]),
    b: (&MultiwayGraph, &[Diagram]),
    q: Quotient,
) -> Result<QuotientVerdict> {
    let (ga, sa) = quotient_graphs(a.0, a.1, q)?;
    let (gb, sb) = quotient_graphs(b.0, b.1, q)?;
    let iso = graph_isomorphic(&ga, &gb)?;
    let mut branchial = sa.len() == sb.len();
    for (x, y) in sa.iter().zip(&sb) {
        branchial &= graph_isomorphic(x, y)?.is_some();
    }
    let summary = |g: &PlainGraph, s: &[PlainGraph]| SideSummary {
        states: g.len(),
        edges: g.edges.len(),
        slice_sizes: s.iter().map(PlainGraph::len).collect(),
    };
    let witness = iso
        .as_ref()
        .map(|m| m.iter().enumerate().map(|(i, &j)| (ga.labels[i].clone(), gb.labels[j].clone())).collect())
        .unwrap_or_default();
    Ok(QuotientVerdict {
        quotient: q,
        states_isomorphic: iso.is_some(),
        branchial_isomorphic: branchial,
        composite: summary(&ga, &sa),
        stacked: summary(&gb, &sb),
        witness,
    })
}

/// Compares `d` evolved under the rulial composition of `rule_a` and
/// `rule_b` with `d ⊗ invert(d)` evolved under `rule_a` alone, as states
/// graphs with default-foliation branchial slices.
pub fn monoidal_experiment(
    d: &Diagram,
    rule_a: &RuleInstance,
    rule_b: &RuleInstance,
    steps: usize,
    quotient: Quotient,
    cfg: &EvolveConfig,
) -> Result<MonoidalReport> {
    let mut cfg = cfg.clone();
    cfg.steps = steps;
    cfg.mode = Mode::States;
    let composite = rulial_compose(vec![ZxSystem::new(std::slice::from_ref(rule_a)), ZxSystem::new(std::slice::from_ref(rule_b))])?;
    let ea = evolve(&composite, std::slice::from_ref(d), &cfg)?;
    let stacked = d.stack(&d.color_invert());
    let eb = evolve(&ZxSystem::new(std::slice::from_ref(rule_a)), &[stacked], &cfg)?;
    let raw = compare((&ea.graph, &ea.states), (&eb.graph, &eb.states), Quotient::None)?;
    let quotiented = compare((&ea.graph, &ea.states), (&eb.graph, &eb.states), quotient)?;
    let passed = quotiented.states_isomorphic && quotiented.branchial_isomorphic;
    Ok(MonoidalReport { diagram: d.to_string(), steps, quotient, raw, quotiented, passed })
}

/// The input-arity-2 Z and X identity rules.
pub fn identity_pair() -> (RuleInstance, RuleInstance) {
    let z = instantiate(Family::Identity, Color::Z, &[2, 0]).expect("valid parameters");
    let x = instantiate(Family::Identity, Color::X, &[2, 0]).expect("valid parameters");
    (z, x)
}

/// The two-spider diagram: a phaseless X state feeding a Z spider with two
/// outputs.
pub fn two_spider() -> Diagram {
    "X[x1,0,1,0] ⊗ Z[z1,1,2,0] ⊗ W[x1,z1] ⊗ W[z1,o1] ⊗ W[z1,o2]".parse().expect("valid diagram")
}

/// Connected phaseless diagrams of one or two spiders whose declared
/// arities are at most `bound`; two spiders are joined by one wire (or by
/// every `k ≥ 1` wires when `parallel`) from the first one's outputs to the
/// second one's inputs and all other legs are boundaries. Sorted by
/// canonical key, duplicates removed.
pub fn diagram_tier(bound: usize, parallel: bool) -> Vec<Diagram> {
    let mut out: BTreeMap<String, Diagram> = BTreeMap::new();
    let mut push = |d: Diagram| {
        let c = d.canonical();
        out.entry(c.key).or_insert(c.diagram);
    };
    for color in [Color::Z, Color::X] {
        for n in 0..=bound {
            for m in 0..=bound {
                push(Diagram::spider(color, Phase::ZERO, n, m));
            }
        }
    }
    for c1 in [Color::Z, Color::X] {
        for c2 in [Color::Z, Color::X] {
            for n1 in 0..=bound {
                for m1 in 1..=bound {
                    for n2 in 1..=bound {
                        for m2 in 0..=bound {
                            for k in 1..=if parallel { m1.min(n2) } else { 1 } {
                                push(two_spiders(c1, c2, n1, m1, n2, m2, k));
                            }
                        }
                    }
                }
            }
        }
    }
    out.into_values().collect()
}

fn two_spiders(c1: Color, c2: Color, n1: usize, m1: usize, n2: usize, m2: usize, k: usize) -> Diagram {
    let mut d = Diagram::empty();
    let zero = Phase::ZERO;
    let a = d.add_node(String::new(), Kind::Spider { color: c1, phase: zero, inputs: n1, outputs: m1 });
    let b = d.add_node(String::new(), Kind::Spider { color: c2, phase: zero, inputs: n2, outputs: m2 });
    for _ in 0..k {
        d.add_wire(a, b);
    }
    let mut ni = 0;
    let mut no = 0;
    for (v, count) in [(a, n1), (b, n2 - k)] {
        for _ in 0..count {
            let i = d.add_node(String::new(), Kind::Input(ni));
            ni += 1;
            d.add_wire(i, v);
        }
    }
    for (v, count) in [(a, m1 - k), (b, m2)] {
        for _ in 0..count {
            let o = d.add_node(String::new(), Kind::Output(no));
            no += 1;
            d.add_wire(v, o);
        }
    }
    d.renamed()
}

/// `count` diagrams of a tier chosen by a seeded shuffle, or the whole tier
/// when `count` covers it.
pub fn sample_tier(bound: usize, parallel: bool, count: usize, seed: u64) -> Vec<Diagram> {
    let mut tier = diagram_tier(bound, parallel);
    if count >= tier.len() {
        return tier;
    }
    tier.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    tier.truncate(count);
    tier
}

/// A quantum state space of basis vectors, one rule per gate entry: the
/// rule from `|b⟩` to `|b'⟩` fires when `gate[b'][b]` is nonzero.
#[derive(Clone)]
pub struct QuantumSystem<T> {
    pub gate: ComplexMatrix<T>,
}

impl<T: Scalar + Send + Sync> QuantumSystem<T> {
    pub fn new(gate: ComplexMatrix<T>) -> Result<Self> {
        if gate.rows() != gate.cols() || gate.rows() == 0 {
            return Err(Error::ShapeMismatch(format!("gate must be square, got {:?}", gate.shape())));
        }
        Ok(QuantumSystem { gate })
    }

    fn dim(&self) -> usize {
        self.gate.rows()
    }

    /// Gate entry labelling an event of this system.
    pub fn label(&self, e: &Event) -> T {
        let (from, to) = (e.rule / self.dim(), e.rule % self.dim());
        self.gate.get(to, from).clone()
    }
}

impl<T: Scalar + Send + Sync> RewriteSystem for QuantumSystem<T> {
    type State = usize;

    fn canonicalizer(&self) -> &str {
        "basis"
    }

    fn rule_count(&self) -> usize {
        self.dim() * self.dim()
    }

    fn rule_label(&self, rule: usize) -> String {
        format!("|{}> -> |{}>", rule / self.dim(), rule % self.dim())
    }

    fn canonicalize(&self, state: &usize) -> Result<Canonical<usize>> {
        Ok(Canonical { state: *state, key: format!("|{state}>"), perm: vec![0] })
    }

    fn rewrites(&self, rule: usize, state: &usize) -> Result<Vec<Rewrite<usize>>> {
        let (from, to) = (rule / self.dim(), rule % self.dim());
        if from != *state || self.gate.get(to, from).is_zero() {
            return Ok(Vec::new());
        }
        Ok(vec![Rewrite { position: "0".into(), result: to, consumed: vec![0], produced: vec![0], carried: Vec::new() }])
    }

    fn element_count(&self, _: &usize) -> usize {
        1
    }

    fn render(&self, state: &usize) -> String {
        format!("|{state}>")
    }
}

/// Evolution of a quantum toy with the amplitude vector of every slice.
#[derive(Clone)]
pub struct QuantumRun<T> {
    pub graph: MultiwayGraph,
    pub labels: Vec<T>,
    /// `amplitudes[t][b]` is the summed amplitude of `|b⟩` in slice `t`.
    pub amplitudes: Vec<Vec<T>>,
}

pub fn quantum_toy<T: Scalar + Send + Sync>(gate: ComplexMatrix<T>, init: &[T], steps: usize) -> Result<QuantumRun<T>> {
    let sys = QuantumSystem::new(gate)?;
    if init.len() != sys.dim() {
        return Err(Error::ShapeMismatch(format!("initial vector has {} entries for a {}-level gate", init.len(), sys.dim())));
    }
    let inits: Vec<usize> = (0..sys.dim()).collect();
    let ev = evolve(&sys, &inits, &EvolveConfig::new(steps, Mode::Evolution))?;
    let g = ev.graph;
    let w = g.amplitude_weights(|e| sys.label(e), |r| init[ev.states[r]].clone())?;
    let mut amplitudes = vec![vec![T::zero(); sys.dim()]; steps + 1];
    for (v, s) in g.states.iter().enumerate() {
        let b = ev.states[v];
        amplitudes[s.generation][b] = amplitudes[s.generation][b].clone() + w[v].clone();
    }
    let labels = g.events.iter().map(|e| sys.label(e)).collect();
    Ok(QuantumRun { graph: g, labels, amplitudes })
}

/// The root-NOT gate ½[[1+i, 1−i], [1−i, 1+i]] and the state (1/√2)(1, 1).
pub fn root_not<T: Scalar>() -> (ComplexMatrix<T>, Vec<T>) {
    let half = T::from_ratio(1, 2);
    let p = (T::one() + T::imag()) * half.clone();
    let m = (T::one() - T::imag()) * half;
    let gate = ComplexMatrix::from_rows(vec![vec![p.clone(), m.clone()], vec![m, p]]).expect("square rows");
    let s = T::frac_1_sqrt2();
    (gate, vec![s.clone(), s])
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CompletionReport {
    pub added: Vec<(String, String)>,
    pub components_before: usize,
    pub components_after: usize,
    pub saturated: bool,
}

/// The two-spider diagram and its colour inversion evolved under the Z and
/// X identity rules, before and after completion; each init is evolved
/// separately and the two graphs are merged.
pub fn completion_experiment(steps: usize) -> Result<CompletionReport> {
    let (z, x) = identity_pair();
    let sys = ZxSystem::new(&[z, x]);
    let d = two_spider();
    let inits = vec![d.clone(), d.color_invert()];
    let cfg = EvolveConfig::new(steps, Mode::States);
    let merged = |graphs: Vec<MultiwayGraph>| merge_multiway(&graphs);
    let before = merged(
        inits.iter().map(|s| evolve(&sys, std::slice::from_ref(s), &cfg).map(|e| e.graph)).collect::<Result<_>>()?,
    )?;
    let out = complete(sys, &inits, &CompletionConfig { depth: steps, join_depth: steps, ..Default::default() })?;
    let after = merged(
        inits
            .iter()
            .map(|s| evolve(&out.system, std::slice::from_ref(s), &cfg).map(|e| e.graph))
            .collect::<Result<_>>()?,
    )?;
    Ok(CompletionReport {
        added: out.system.added.iter().map(|a| (a.from_key.clone(), a.to_key.clone())).collect(),
        components_before: before.components(),
        components_after: after.components(),
        saturated: out.saturated,
    })
}
