//! Non-deterministic evolution of any [`RewriteSystem`]: multiway evolution
//! and states graphs, causal graphs, foliations, branchial graphs, path
//! weights, confluence and causal-invariance checks, and bounded completion.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};

use num_bigint::BigUint;
use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::canon::{stable_hash, ColoredGraph};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// A state in canonical form, with the map from the raw state's element
/// indices to the canonical state's element indices.
#[derive(Clone, Debug)]
pub struct Canonical<S> {
    pub state: S,
    pub key: String,
    pub perm: Vec<usize>,
}

/// One application of a rule to a (canonical) state.
///
/// Element indices in `consumed` refer to the input state; `produced` and
/// the second component of `carried` refer to the raw `result`.
#[derive(Clone, Debug)]
pub struct Rewrite<S> {
    pub position: String,
    pub result: S,
    pub consumed: Vec<usize>,
    pub produced: Vec<usize>,
    pub carried: Vec<(usize, usize)>,
}

pub trait RewriteSystem: Send + Sync {
    type State: Clone + Send + Sync;

    /// Identifies the state representation; systems with different
    /// canonicalizers cannot be merged.
    fn canonicalizer(&self) -> &str;
    fn rule_count(&self) -> usize;
    fn rule_label(&self, rule: usize) -> String;
    fn canonicalize(&self, state: &Self::State) -> Result<Canonical<Self::State>>;
    fn rewrites(&self, rule: usize, state: &Self::State) -> Result<Vec<Rewrite<Self::State>>>;
    fn element_count(&self, state: &Self::State) -> usize;
    fn render(&self, state: &Self::State) -> String;
}

impl<R: RewriteSystem> RewriteSystem for &R {
    type State = R::State;
    fn canonicalizer(&self) -> &str {
        (**self).canonicalizer()
    }
    fn rule_count(&self) -> usize {
        (**self).rule_count()
    }
    fn rule_label(&self, rule: usize) -> String {
        (**self).rule_label(rule)
    }
    fn canonicalize(&self, state: &Self::State) -> Result<Canonical<Self::State>> {
        (**self).canonicalize(state)
    }
    fn rewrites(&self, rule: usize, state: &Self::State) -> Result<Vec<Rewrite<Self::State>>> {
        (**self).rewrites(rule, state)
    }
    fn element_count(&self, state: &Self::State) -> usize {
        (**self).element_count(state)
    }
    fn render(&self, state: &Self::State) -> String {
        (**self).render(state)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    /// Layered DAG; a state recurring in a later generation is a new vertex.
    #[default]
    Evolution,
    /// One vertex per canonical state; cycles allowed.
    States,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Limits {
    pub max_states: usize,
    pub max_events: usize,
    pub max_paths: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Limits { max_states: 1_000_000, max_events: 10_000_000, max_paths: 100_000 }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EvolveConfig {
    pub steps: usize,
    pub mode: Mode,
    /// Worker threads for frontier expansion; 0 uses the global pool.
    pub workers: usize,
    pub limits: Limits,
}

impl EvolveConfig {
    pub fn new(steps: usize, mode: Mode) -> Self {
        EvolveConfig { steps, mode, workers: 1, limits: Limits::default() }
    }

    pub fn workers(mut self, n: usize) -> Self {
        self.workers = n;
        self
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StateInfo {
    pub key: String,
    pub hash: String,
    pub generation: usize,
    pub elements: usize,
    pub label: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Event {
    pub rule: usize,
    pub rule_label: String,
    pub position: String,
    pub input: usize,
    pub output: usize,
    pub consumed: Vec<usize>,
    pub produced: Vec<usize>,
    pub carried: Vec<(usize, usize)>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MultiwayGraph {
    pub system: String,
    pub mode: Mode,
    pub roots: Vec<usize>,
    pub states: Vec<StateInfo>,
    pub events: Vec<Event>,
}

/// A multiway graph together with the canonical state of every vertex.
#[derive(Clone, Debug)]
pub struct Evolution<S> {
    pub graph: MultiwayGraph,
    pub states: Vec<S>,
}

/// A successor of a canonical state, itself canonicalized. Element indices
/// of `produced` and `carried` refer to the canonical output.
#[derive(Clone, Debug)]
pub struct Step<S> {
    pub rule: usize,
    pub position: String,
    pub key: String,
    pub state: S,
    pub consumed: Vec<usize>,
    pub produced: Vec<usize>,
    pub carried: Vec<(usize, usize)>,
}

pub fn hash_hex(key: &str) -> String {
    format!("{:016x}", stable_hash(key))
}

/// All one-step successors of a canonical state, sorted by
/// `(rule, position, output key)` and free of exact duplicates.
pub fn successors<R: RewriteSystem>(sys: &R, state: &R::State) -> Result<Vec<Step<R::State>>> {
    let mut out = Vec::new();
    for rule in 0..sys.rule_count() {
        for rw in sys.rewrites(rule, state)? {
            let c = sys.canonicalize(&rw.result)?;
            let map = |i: usize| c.perm[i];
            let mut produced: Vec<usize> = rw.produced.iter().map(|&i| map(i)).collect();
            produced.sort_unstable();
            let mut carried: Vec<(usize, usize)> = rw.carried.iter().map(|&(a, b)| (a, map(b))).collect();
            carried.sort_unstable();
            let mut consumed = rw.consumed;
            consumed.sort_unstable();
            out.push(Step { rule, position: rw.position, key: c.key, state: c.state, consumed, produced, carried });
        }
    }
    out.sort_by(|a, b| (a.rule, &a.position, &a.key).cmp(&(b.rule, &b.position, &b.key)));
    out.dedup_by(|a, b| a.rule == b.rule && a.position == b.position && a.key == b.key);
    Ok(out)
}

fn pool(workers: usize) -> Result<Option<rayon::ThreadPool>> {
    if workers <= 1 {
        return Ok(None);
    }
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map(Some)
        .map_err(|e| Error::Other(format!("thread pool: {e}")))
}

fn par_map<T: Sync, U: Send>(
    pool: &Option<rayon::ThreadPool>,
    workers: usize,
    items: &[T],
    f: impl Fn(&T) -> U + Sync + Send,
) -> Vec<U> {
    match (pool, workers) {
        (Some(p), _) => p.install(|| items.par_iter().map(&f).collect()),
        (None, 0) => items.par_iter().map(&f).collect(),
        (None, _) => items.iter().map(f).collect(),
    }
}

/// First-writer-wins registry of canonical keys with collision detection.
#[derive(Default)]
struct Registry {
    hashes: HashMap<u64, String>,
}

impl Registry {
    fn check(&mut self, key: &str) -> Result<u64> {
        let h = stable_hash(key);
        match self.hashes.get(&h) {
            Some(k) if k != key => Err(Error::HashCollision(k.clone(), key.to_string())),
            Some(_) => Ok(h),
            None => {
                self.hashes.insert(h, key.to_string());
                Ok(h)
            }
        }
    }
}

/// Breadth-first multiway evolution.
pub fn evolve<R: RewriteSystem>(sys: &R, inits: &[R::State], cfg: &EvolveConfig) -> Result<Evolution<R::State>> {
    let pool = pool(cfg.workers)?;
    let mut registry = Registry::default();
    let mut index: HashMap<(String, usize), usize> = HashMap::new();
    let mut infos: Vec<StateInfo> = Vec::new();
    let mut states: Vec<R::State> = Vec::new();
    let mut events: Vec<Event> = Vec::new();
    let layer = |mode: Mode, g: usize| if mode == Mode::Evolution { g } else { 0 };

    let mut register = |key: String,
                        state: R::State,
                        gen: usize,
                        infos: &mut Vec<StateInfo>,
                        states: &mut Vec<R::State>|
     -> Result<(usize, bool)> {
        let slot = (key, layer(cfg.mode, gen));
        if let Some(&v) = index.get(&slot) {
            return Ok((v, false));
        }
        let h = registry.check(&slot.0)?;
        if infos.len() >= cfg.limits.max_states {
            return Err(Error::ResourceLimit(format!("more than {} states", cfg.limits.max_states)));
        }
        let v = infos.len();
        infos.push(StateInfo {
            key: slot.0.clone(),
            hash: format!("{h:016x}"),
            generation: gen,
            elements: sys.element_count(&state),
            label: sys.render(&state),
        });
        states.push(state);
        index.insert(slot, v);
        Ok((v, true))
    };

    let mut roots = Vec::new();
    let mut frontier = Vec::new();
    for s in inits {
        let c = sys.canonicalize(s)?;
        let (v, new) = register(c.key, c.state, 0, &mut infos, &mut states)?;
        if new {
            frontier.push(v);
            roots.push(v);
        }
    }

    for g in 0..cfg.steps {
        if frontier.is_empty() {
            break;
        }
        let expanded: Vec<Result<Vec<Step<R::State>>>> =
            par_map(&pool, cfg.workers, &frontier, |&v| successors(sys, &states[v]));
        let mut next = Vec::new();
        for (&v, steps) in frontier.iter().zip(expanded) {
            for st in steps? {
                let (w, new) = register(st.key, st.state, g + 1, &mut infos, &mut states)?;
                if new {
                    next.push(w);
                }
                if events.len() >= cfg.limits.max_events {
                    return Err(Error::ResourceLimit(format!("more than {} events", cfg.limits.max_events)));
                }
                events.push(Event {
                    rule: st.rule,
                    rule_label: sys.rule_label(st.rule),
                    position: st.position,
                    input: v,
                    output: w,
                    consumed: st.consumed,
                    produced: st.produced,
                    carried: st.carried,
                });
            }
        }
        frontier = next;
    }

    // stable vertex order: (generation, key)
    let mut order: Vec<usize> = (0..infos.len()).collect();
    order.sort_by(|&a, &b| (infos[a].generation, &infos[a].key).cmp(&(infos[b].generation, &infos[b].key)));
    let mut rank = vec![0; order.len()];
    for (new, &old) in order.iter().enumerate() {
        rank[old] = new;
    }
    let mut slots: Vec<Option<(StateInfo, R::State)>> = infos.into_iter().zip(states).map(Some).collect();
    let (infos, states): (Vec<_>, Vec<_>) =
        order.iter().map(|&old| slots[old].take().expect("each vertex moved once")).unzip();
    for e in &mut events {
        e.input = rank[e.input];
        e.output = rank[e.output];
    }
    events.sort_by(|a, b| (a.input, a.rule, &a.position, a.output).cmp(&(b.input, b.rule, &b.position, b.output)));
    let mut roots: Vec<usize> = roots.into_iter().map(|r| rank[r]).collect();
    roots.sort_unstable();

    Ok(Evolution {
        graph: MultiwayGraph { system: sys.canonicalizer().to_string(), mode: cfg.mode, roots, states: infos, events },
        states,
    })
}

impl MultiwayGraph {
    pub fn state_count(&self) -> usize {
        self.states.len()
    }

    pub fn find(&self, key: &str) -> Option<usize> {
        self.states.iter().position(|s| s.key == key)
    }

    pub fn max_generation(&self) -> usize {
        self.states.iter().map(|s| s.generation).max().unwrap_or(0)
    }

    /// Default foliation: slice index = generation.
    pub fn foliate(&self) -> Vec<usize> {
        self.states.iter().map(|s| s.generation).collect()
    }

    pub fn slice(&self, t: usize) -> Vec<usize> {
        (0..self.states.len()).filter(|&v| self.states[v].generation == t).collect()
    }

    /// Distinct state-level edges `(input, output)`.
    pub fn state_edges(&self) -> Vec<(usize, usize)> {
        let set: BTreeSet<(usize, usize)> = self.events.iter().map(|e| (e.input, e.output)).collect();
        set.into_iter().collect()
    }

    /// Number of weakly connected components.
    pub fn components(&self) -> usize {
        let n = self.states.len();
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(p: &mut [usize], mut v: usize) -> usize {
            while p[v] != v {
                p[v] = p[p[v]];
                v = p[v];
            }
            v
        }
        for e in &self.events {
            let (a, b) = (find(&mut parent, e.input), find(&mut parent, e.output));
            if a != b {
                parent[a.max(b)] = a.min(b);
            }
        }
        (0..n).filter(|&v| find(&mut parent, v) == v).count()
    }

    /// Vertices in an order where every edge goes forward.
    pub fn topological_order(&self) -> Result<Vec<usize>> {
        let n = self.states.len();
        let mut indeg = vec![0usize; n];
        let mut out: Vec<Vec<usize>> = vec![Vec::new(); n];
        for e in &self.events {
            indeg[e.output] += 1;
            out[e.input].push(e.output);
        }
        let mut queue: std::collections::VecDeque<usize> = (0..n).filter(|&v| indeg[v] == 0).collect();
        let mut order = Vec::with_capacity(n);
        while let Some(v) = queue.pop_front() {
            order.push(v);
            for &w in &out[v] {
                indeg[w] -= 1;
                if indeg[w] == 0 {
                    queue.push_back(w);
                }
            }
        }
        if order.len() != n {
            return Err(Error::Cycle);
        }
        Ok(order)
    }

    /// Number of distinct root-to-state paths; every event is a distinct edge.
    pub fn path_weights(&self) -> Result<Vec<BigUint>> {
        let order = self.topological_order()?;
        let mut incoming: Vec<Vec<usize>> = vec![Vec::new(); self.states.len()];
        for e in &self.events {
            incoming[e.output].push(e.input);
        }
        let mut w = vec![BigUint::zero(); self.states.len()];
        for &r in &self.roots {
            w[r] = BigUint::one();
        }
        for v in order {
            let mut acc = w[v].clone();
            for &u in &incoming[v] {
                acc += &w[u];
            }
            w[v] = acc;
        }
        Ok(w)
    }

    /// Sum over root-to-state paths of the product of edge labels, seeded by
    /// `root_weight` on every root.
    pub fn amplitude_weights<T: Scalar>(
        &self,
        label: impl Fn(&Event) -> T,
        root_weight: impl Fn(usize) -> T,
    ) -> Result<Vec<T>> {
        let order = self.topological_order()?;
        let mut incoming: Vec<Vec<&Event>> = vec![Vec::new(); self.states.len()];
        for e in &self.events {
            incoming[e.output].push(e);
        }
        let mut w = vec![T::zero(); self.states.len()];
        for &r in &self.roots {
            w[r] = root_weight(r);
        }
        for v in order {
            let mut acc = w[v].clone();
            for e in &incoming[v] {
                acc = acc + w[e.input].clone() * label(e);
            }
            w[v] = acc;
        }
        Ok(w)
    }

    /// Branchial graph of slice `t`: distinct states are adjacent when they
    /// share an ancestor at most `window` slices back.
    pub fn branchial(&self, t: usize, window: usize) -> Result<BranchialGraph> {
        if t > self.max_generation() {
            return Err(Error::OutOfRange(format!("slice {t} beyond generation {}", self.max_generation())));
        }
        let window = window.max(1);
        let mut parents: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); self.states.len()];
        for e in &self.events {
            if self.states[e.input].generation + 1 == self.states[e.output].generation {
                parents[e.output].insert(e.input);
            }
        }
        let vertices = self.slice(t);
        let ancestors: Vec<BTreeSet<usize>> = vertices
            .iter()
            .map(|&v| {
                let mut acc = BTreeSet::new();
                let mut layer: BTreeSet<usize> = [v].into();
                for _ in 0..window {
                    layer = layer.iter().flat_map(|u| parents[*u].iter().copied()).collect();
                    acc.extend(layer.iter().copied());
                }
                acc
            })
            .collect();
        let mut edges = Vec::new();
        for i in 0..vertices.len() {
            for j in i + 1..vertices.len() {
                if !ancestors[i].is_disjoint(&ancestors[j]) {
                    edges.push((vertices[i], vertices[j]));
                }
            }
        }
        Ok(BranchialGraph { slice: t, vertices, edges })
    }

    /// Multiway causal graph: event `A → B` when `B` consumes an element
    /// whose creation traces back to `A` along some incoming history.
    pub fn causal_graph(&self) -> CausalGraph {
        let mut producers: Vec<Vec<BTreeSet<usize>>> =
            self.states.iter().map(|s| vec![BTreeSet::new(); s.elements]).collect();
        let carried_inv: Vec<Vec<Option<usize>>> = self
            .events
            .iter()
            .map(|e| {
                let mut inv = vec![None; self.states[e.output].elements];
                for &(a, b) in &e.carried {
                    if b < inv.len() {
                        inv[b] = Some(a);
                    }
                }
                inv
            })
            .collect();
        let mut order: Vec<usize> = (0..self.events.len()).collect();
        order.sort_by_key(|&i| (self.states[self.events[i].input].generation, i));
        loop {
            let mut changed = false;
            for &ei in &order {
                let e = &self.events[ei];
                for j in 0..self.states[e.output].elements {
                    let add: Vec<usize> = if e.produced.binary_search(&j).is_ok() {
                        vec![ei]
                    } else if let Some(i) = carried_inv[ei][j] {
                        producers[e.input].get(i).map(|s| s.iter().copied().collect()).unwrap_or_default()
                    } else {
                        Vec::new()
                    };
                    for a in add {
                        changed |= producers[e.output][j].insert(a);
                    }
                }
            }
            if !changed {
                break;
            }
        }
        let mut edges = BTreeSet::new();
        for (bi, b) in self.events.iter().enumerate() {
            for &j in &b.consumed {
                if let Some(ps) = producers[b.input].get(j) {
                    for &a in ps {
                        if a != bi {
                            edges.insert((a, bi));
                        }
                    }
                }
            }
        }
        CausalGraph { events: self.events.len(), edges: edges.into_iter().collect() }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BranchialGraph {
    pub slice: usize,
    pub vertices: Vec<usize>,
    pub edges: Vec<(usize, usize)>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CausalGraph {
    pub events: usize,
    pub edges: Vec<(usize, usize)>,
}

impl CausalGraph {
    fn adjacency(&self) -> (Vec<Vec<usize>>, Vec<Vec<usize>>) {
        let mut out = vec![Vec::new(); self.events];
        let mut inc = vec![Vec::new(); self.events];
        for &(a, b) in &self.edges {
            out[a].push(b);
            inc[b].push(a);
        }
        (out, inc)
    }

    pub fn is_acyclic(&self) -> bool {
        self.topological_order().is_ok()
    }

    fn topological_order(&self) -> Result<Vec<usize>> {
        let (out, inc) = self.adjacency();
        let mut indeg: Vec<usize> = inc.iter().map(Vec::len).collect();
        let mut stack: Vec<usize> = (0..self.events).rev().filter(|&v| indeg[v] == 0).collect();
        let mut order = Vec::new();
        while let Some(v) = stack.pop() {
            order.push(v);
            for &w in &out[v] {
                indeg[w] -= 1;
                if indeg[w] == 0 {
                    stack.push(w);
                }
            }
        }
        if order.len() == self.events {
            Ok(order)
        } else {
            Err(Error::Cycle)
        }
    }

    /// `(future, past)` of an event, excluding the event itself.
    pub fn cones(&self, event: usize) -> Result<(BTreeSet<usize>, BTreeSet<usize>)> {
        if event >= self.events {
            return Err(Error::OutOfRange(format!("unknown event {event}")));
        }
        let (out, inc) = self.adjacency();
        let reach = |adj: &Vec<Vec<usize>>| {
            let mut seen = BTreeSet::new();
            let mut stack = vec![event];
            while let Some(v) = stack.pop() {
                for &w in &adj[v] {
                    if w != event && seen.insert(w) {
                        stack.push(w);
                    }
                }
            }
            seen
        };
        Ok((reach(&out), reach(&inc)))
    }

    /// Removes every edge implied by a longer path.
    pub fn transitive_reduction(&self) -> Result<CausalGraph> {
        let order = self.topological_order()?;
        let (out, _) = self.adjacency();
        let words = self.events.div_ceil(64);
        let mut desc = vec![vec![0u64; words]; self.events];
        for &v in order.iter().rev() {
            let mut acc = vec![0u64; words];
            for &w in &out[v] {
                acc[w / 64] |= 1 << (w % 64);
                for (a, d) in acc.iter_mut().zip(&desc[w]) {
                    *a |= d;
                }
            }
            desc[v] = acc;
        }
        let edges = self
            .edges
            .iter()
            .copied()
            .filter(|&(a, b)| !out[a].iter().any(|&c| c != b && desc[c][b / 64] & (1 << (b % 64)) != 0))
            .collect();
        Ok(CausalGraph { events: self.events, edges })
    }

    /// Canonical certificate, for isomorphism testing of causal graphs.
    pub fn certificate(&self) -> crate::canon::Certificate<u8, u8> {
        let mut g = ColoredGraph::new(vec![0u8; self.events], true);
        for &(a, b) in &self.edges {
            g.add_edge(a, b, 0);
        }
        g.canonical_form().certificate
    }
}

/// Outcome of searching for a common descendant of two states.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Join {
    /// Joined with both sides taking at most this many steps.
    Joined(usize),
    /// Both reachable sets were exhausted without meeting.
    Never,
    /// Search bound reached.
    Unknown,
}

/// Successor cache shared by join searches.
pub struct Explorer<'a, R: RewriteSystem> {
    sys: &'a R,
    cache: HashMap<String, Vec<(String, R::State)>>,
    limit: usize,
}

impl<'a, R: RewriteSystem> Explorer<'a, R> {
    pub fn new(sys: &'a R, limit: usize) -> Self {
        Explorer { sys, cache: HashMap::new(), limit }
    }

    fn next(&mut self, key: &str, state: &R::State) -> Result<Vec<(String, R::State)>> {
        if let Some(v) = self.cache.get(key) {
            return Ok(v.clone());
        }
        let mut v: Vec<(String, R::State)> =
            successors(self.sys, state)?.into_iter().map(|s| (s.key, s.state)).collect();
        v.sort_by(|a, b| a.0.cmp(&b.0));
        v.dedup_by(|a, b| a.0 == b.0);
        self.cache.insert(key.to_string(), v.clone());
        Ok(v)
    }

    /// Smallest `k ≤ max` such that `b →≤k d` and `c →≤k d` for some `d`.
    pub fn join(&mut self, b: (&str, &R::State), c: (&str, &R::State), max: usize) -> Result<Join> {
        if b.0 == c.0 {
            return Ok(Join::Joined(0));
        }
        let mut seen = [HashSet::from([b.0.to_string()]), HashSet::from([c.0.to_string()])];
        let mut front = [vec![(b.0.to_string(), b.1.clone())], vec![(c.0.to_string(), c.1.clone())]];
        for k in 1..=max {
            let mut fresh: [Vec<String>; 2] = [Vec::new(), Vec::new()];
            for side in 0..2 {
                let mut next = Vec::new();
                for (key, st) in std::mem::take(&mut front[side]) {
                    for (k2, s2) in self.next(&key, &st)? {
                        if seen[side].insert(k2.clone()) {
                            fresh[side].push(k2.clone());
                            next.push((k2, s2));
                        }
                    }
                }
                if seen[side].len() > self.limit {
                    return Ok(Join::Unknown);
                }
                front[side] = next;
            }
            if fresh[0].iter().any(|k| seen[1].contains(k)) || fresh[1].iter().any(|k| seen[0].contains(k)) {
                return Ok(Join::Joined(k));
            }
            if front[0].is_empty() && front[1].is_empty() {
                return Ok(Join::Never);
            }
        }
        Ok(Join::Unknown)
    }
}

/// A one-step divergence `left ← source → right`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BranchPair {
    pub source: String,
    pub left: String,
    pub right: String,
}

/// Unordered pairs of distinct one-step successors of a state.
pub fn branch_pairs<R: RewriteSystem>(sys: &R, state: &R::State) -> Result<Vec<(Step<R::State>, Step<R::State>)>> {
    let mut succ = successors(sys, state)?;
    succ.sort_by(|a, b| a.key.cmp(&b.key));
    succ.dedup_by(|a, b| a.key == b.key);
    let mut out = Vec::new();
    for i in 0..succ.len() {
        for j in i + 1..succ.len() {
            out.push((succ[i].clone(), succ[j].clone()));
        }
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum ConfluenceVerdict {
    /// Every branch pair joined; the largest join distance is reported.
    Joined { max_distance: usize },
    /// Some pair can provably never join.
    NotConfluent { counterexample: BranchPair },
    /// Some pair did not join within the bound.
    Inconclusive { unjoined: Vec<BranchPair> },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfluenceReport {
    pub pairs: usize,
    pub verdict: ConfluenceVerdict,
}

/// Checks every branch pair arising from states within `depth − 1` steps
/// of the inits for a join within `join_depth` steps.
pub fn check_confluence<R: RewriteSystem>(
    sys: &R,
    inits: &[R::State],
    depth: usize,
    join_depth: usize,
    limits: &Limits,
) -> Result<ConfluenceReport> {
    if depth == 0 {
        return Err(Error::OutOfRange("confluence depth must be at least 1".into()));
    }
    let mut cfg = EvolveConfig::new(depth - 1, Mode::States);
    cfg.limits = limits.clone();
    let ev = evolve(sys, inits, &cfg)?;
    let mut explorer = Explorer::new(sys, limits.max_states);
    let mut pairs = 0;
    let mut max_distance = 0;
    let mut unjoined = Vec::new();
    for (v, st) in ev.states.iter().enumerate() {
        for (b, c) in branch_pairs(sys, st)? {
            pairs += 1;
            let pair = BranchPair { source: ev.graph.states[v].key.clone(), left: b.key.clone(), right: c.key.clone() };
            match explorer.join((&b.key, &b.state), (&c.key, &c.state), join_depth)? {
                Join::Joined(k) => max_distance = max_distance.max(k),
                Join::Never => {
                    return Ok(ConfluenceReport { pairs, verdict: ConfluenceVerdict::NotConfluent { counterexample: pair } })
                }
                Join::Unknown => unjoined.push(pair),
            }
        }
    }
    let verdict = if unjoined.is_empty() {
        ConfluenceVerdict::Joined { max_distance }
    } else {
        ConfluenceVerdict::Inconclusive { unjoined }
    };
    Ok(ConfluenceReport { pairs, verdict })
}

/// One single-way evolution path with its exact causal graph.
#[derive(Clone, Debug)]
pub struct PathHistory {
    pub keys: Vec<String>,
    pub rules: Vec<usize>,
    pub causal: CausalGraph,
}

/// Enumerates maximal single-way paths of length at most `depth` from
/// `init`, tracking element creation ids exactly. `None` when more than
/// `max_paths` paths exist.
pub fn single_way_paths<R: RewriteSystem>(
    sys: &R,
    init: &R::State,
    depth: usize,
    max_paths: usize,
) -> Result<Option<Vec<PathHistory>>> {
    struct Walk<'a, R: RewriteSystem> {
        sys: &'a R,
        depth: usize,
        max_paths: usize,
        out: Vec<PathHistory>,
        overflow: bool,
    }
    impl<R: RewriteSystem> Walk<'_, R> {
        fn go(
            &mut self,
            state: &R::State,
            creators: Vec<Option<usize>>,
            keys: &mut Vec<String>,
            rules: &mut Vec<usize>,
            edges: &mut Vec<(usize, usize)>,
        ) -> Result<()> {
            if self.overflow {
                return Ok(());
            }
            let steps = if rules.len() < self.depth { successors(self.sys, state)? } else { Vec::new() };
            if steps.is_empty() {
                if self.out.len() >= self.max_paths {
                    self.overflow = true;
                    return Ok(());
                }
                let mut e = edges.clone();
                e.sort_unstable();
                e.dedup();
                self.out.push(PathHistory {
                    keys: keys.clone(),
                    rules: rules.clone(),
                    causal: CausalGraph { events: rules.len(), edges: e },
                });
                return Ok(());
            }
            for st in steps {
                let id = rules.len();
                let before = edges.len();
                for &j in &st.consumed {
                    if let Some(Some(a)) = creators.get(j) {
                        edges.push((*a, id));
                    }
                }
                let mut next = vec![None; self.sys.element_count(&st.state)];
                for &(a, b) in &st.carried {
                    next[b] = creators.get(a).copied().flatten();
                }
                for &p in &st.produced {
                    next[p] = Some(id);
                }
                keys.push(st.key.clone());
                rules.push(st.rule);
                self.go(&st.state, next, keys, rules, edges)?;
                keys.pop();
                rules.pop();
                edges.truncate(before);
            }
            Ok(())
        }
    }
    let c = sys.canonicalize(init)?;
    let mut w = Walk { sys, depth, max_paths, out: Vec::new(), overflow: false };
    let n = sys.element_count(&c.state);
    w.go(&c.state, vec![None; n], &mut vec![c.key], &mut Vec::new(), &mut Vec::new())?;
    Ok(if w.overflow { None } else { Some(w.out) })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum InvarianceVerdict {
    Invariant { paths: usize },
    Violated { paths: usize, classes: usize },
    Inconclusive { reason: String },
}

/// Compares the causal graphs of all single-way paths to `depth`.
pub fn check_causal_invariance<R: RewriteSystem>(
    sys: &R,
    init: &R::State,
    depth: usize,
    limits: &Limits,
) -> Result<InvarianceVerdict> {
    if depth == 0 {
        return Err(Error::OutOfRange("causal invariance depth must be at least 1".into()));
    }
    let Some(paths) = single_way_paths(sys, init, depth, limits.max_paths)? else {
        return Ok(InvarianceVerdict::Inconclusive { reason: format!("more than {} paths", limits.max_paths) });
    };
    let classes: BTreeSet<_> = paths.iter().map(|p| p.causal.certificate()).collect();
    Ok(if classes.len() <= 1 {
        InvarianceVerdict::Invariant { paths: paths.len() }
    } else {
        InvarianceVerdict::Violated { paths: paths.len(), classes: classes.len() }
    })
}

/// A whole-state rule `from → to` added by completion.
#[derive(Clone, Debug)]
pub struct AddedRule<S> {
    pub from_key: String,
    pub to_key: String,
    pub from: S,
    pub to: S,
}

/// A system extended by whole-state completion rules.
#[derive(Clone)]
pub struct Completion<R: RewriteSystem> {
    pub base: R,
    pub added: Vec<AddedRule<R::State>>,
    name: String,
}

impl<R: RewriteSystem> Completion<R> {
    pub fn new(base: R) -> Self {
        let name = base.canonicalizer().to_string();
        Completion { base, added: Vec::new(), name }
    }
}

impl<R: RewriteSystem> RewriteSystem for Completion<R> {
    type State = R::State;

    fn canonicalizer(&self) -> &str {
        &self.name
    }

    fn rule_count(&self) -> usize {
        self.base.rule_count() + self.added.len()
    }

    fn rule_label(&self, rule: usize) -> String {
        let n = self.base.rule_count();
        if rule < n {
            self.base.rule_label(rule)
        } else {
            let a = &self.added[rule - n];
            format!("{} -> {}", a.from_key, a.to_key)
        }
    }

    fn canonicalize(&self, state: &Self::State) -> Result<Canonical<Self::State>> {
        self.base.canonicalize(state)
    }

    fn rewrites(&self, rule: usize, state: &Self::State) -> Result<Vec<Rewrite<Self::State>>> {
        let n = self.base.rule_count();
        if rule < n {
            return self.base.rewrites(rule, state);
        }
        let a = &self.added[rule - n];
        if self.base.canonicalize(state)?.key != a.from_key {
            return Ok(Vec::new());
        }
        Ok(vec![Rewrite {
            position: "*".into(),
            result: a.to.clone(),
            consumed: (0..self.base.element_count(state)).collect(),
            produced: (0..self.base.element_count(&a.to)).collect(),
            carried: Vec::new(),
        }])
    }

    fn element_count(&self, state: &Self::State) -> usize {
        self.base.element_count(state)
    }

    fn render(&self, state: &Self::State) -> String {
        self.base.render(state)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Orientation {
    /// Add both `b → c` and `c → b`.
    #[default]
    Both,
    /// Add one rule from the larger to the smaller state (element count,
    /// then key).
    ShortLex,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CompletionConfig {
    pub depth: usize,
    pub join_depth: usize,
    pub orientation: Orientation,
    pub max_rules: usize,
    pub limits: Limits,
}

impl Default for CompletionConfig {
    fn default() -> Self {
        CompletionConfig { depth: 2, join_depth: 2, orientation: Orientation::Both, max_rules: 64, limits: Limits::default() }
    }
}

/// Result of bounded greedy completion.
pub struct CompletionOutcome<R: RewriteSystem> {
    pub system: Completion<R>,
    /// False when `max_rules` was reached before a fixpoint.
    pub saturated: bool,
}

/// Greedy bounded completion: repeatedly finds the first branch pair (the
/// inits themselves count as a pair from a virtual root) that does not
/// join within `join_depth`, adds rules between its two states, and
/// restarts until every pair joins.
pub fn complete<R: RewriteSystem>(sys: R, inits: &[R::State], cfg: &CompletionConfig) -> Result<CompletionOutcome<R>> {
    let mut comp = Completion::new(sys);
    loop {
        let found = first_unjoinable(&comp, inits, cfg)?;
        let Some((b, c)) = found else {
            return Ok(CompletionOutcome { system: comp, saturated: true });
        };
        let new_rules = match cfg.orientation {
            Orientation::Both => vec![(b.clone(), c.clone()), (c, b)],
            Orientation::ShortLex => {
                let size_b = (comp.element_count(&b.1), b.0.clone());
                let size_c = (comp.element_count(&c.1), c.0.clone());
                if size_b > size_c {
                    vec![(b, c)]
                } else {
                    vec![(c, b)]
                }
            }
        };
        for ((fk, fs), (tk, ts)) in new_rules {
            if comp.added.len() >= cfg.max_rules {
                return Ok(CompletionOutcome { system: comp, saturated: false });
            }
            comp.added.push(AddedRule { from_key: fk, to_key: tk, from: fs, to: ts });
        }
    }
}

type Keyed<S> = (String, S);

fn first_unjoinable<R: RewriteSystem>(
    comp: &Completion<R>,
    inits: &[R::State],
    cfg: &CompletionConfig,
) -> Result<Option<(Keyed<R::State>, Keyed<R::State>)>> {
    let mut explorer = Explorer::new(comp, cfg.limits.max_states);
    let mut roots: BTreeMap<String, R::State> = BTreeMap::new();
    for s in inits {
        let c = comp.canonicalize(s)?;
        roots.insert(c.key, c.state);
    }
    let roots: Vec<_> = roots.into_iter().collect();
    let mut candidates = Vec::new();
    for i in 0..roots.len() {
        for j in i + 1..roots.len() {
            candidates.push((roots[i].clone(), roots[j].clone()));
        }
    }
    let mut evcfg = EvolveConfig::new(cfg.depth.saturating_sub(1), Mode::States);
    evcfg.limits = cfg.limits.clone();
    let ev = evolve(comp, inits, &evcfg)?;
    for st in &ev.states {
        for (b, c) in branch_pairs(comp, st)? {
            candidates.push(((b.key, b.state), (c.key, c.state)));
        }
    }
    for (b, c) in candidates {
        if !matches!(explorer.join((&b.0, &b.1), (&c.0, &c.1), cfg.join_depth)?, Join::Joined(_)) {
            return Ok(Some((b, c)));
        }
    }
    Ok(None)
}
