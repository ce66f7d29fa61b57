//! Subdiagram matching and rewriting, and the multiway rewrite system of a
//! set of ZX rules.
//!
//! A pattern's internal nodes (spiders, Hadamards, diamonds) map injectively
//! onto host nodes of the same kind; the pattern boundary points are then
//! assigned to the leftover host wire ends at the image nodes. Bare pattern
//! wires match host wires away from the image.

use std::collections::{BTreeMap, BTreeSet};

use crate::error::{Error, Result};
use crate::multiway::{Canonical, Rewrite, RewriteSystem};
use crate::phase::{Phase, PhaseExpr};
use crate::zx::diagram::{Diagram, Kind, Node};
use crate::zx::rules::RuleInstance;

/// An embedding of a pattern's internal structure into a host diagram.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Match {
    /// Pattern internal node and its host image.
    pub nodes: Vec<(usize, usize)>,
    pub binding: BTreeMap<String, Phase>,
    /// Host wires consumed by internal pattern wires.
    pub wires: Vec<usize>,
    /// Pattern bare wire, host wire, and whether the host wire is taken
    /// in reverse.
    pub bare: Vec<(usize, usize, bool)>,
}

impl Match {
    pub fn image(&self) -> BTreeSet<usize> {
        self.nodes.iter().map(|&(_, h)| h).collect()
    }

    fn position(&self, host: &Diagram) -> String {
        let img: Vec<String> = self.image().iter().map(usize::to_string).collect();
        let mut s = img.join(",");
        for &(_, w, _) in &self.bare {
            let (a, b) = host.wires[w];
            s.push_str(&format!(";{}-{}", a.min(b), a.max(b)));
        }
        if s.is_empty() {
            s.push('L');
        }
        s
    }
}

fn internal<P>(k: &Kind<P>) -> bool {
    matches!(k, Kind::Spider { .. } | Kind::H | Kind::Diamond)
}

fn same_shape(p: &Kind<PhaseExpr>, h: &Kind<Phase>) -> bool {
    match (p, h) {
        (
            Kind::Spider { color: c1, inputs: i1, outputs: o1, .. },
            Kind::Spider { color: c2, inputs: i2, outputs: o2, .. },
        ) => c1 == c2 && i1 == i2 && o1 == o2,
        (Kind::H, Kind::H) | (Kind::Diamond, Kind::Diamond) => true,
        _ => false,
    }
}

fn multiplicity(wires: &[(usize, usize)], a: usize, b: usize) -> usize {
    wires.iter().filter(|&&(x, y)| (x, y) == (a, b) || (x, y) == (b, a)).count()
}

struct Search<'a> {
    pattern: &'a Diagram<PhaseExpr>,
    host: &'a Diagram,
    order: Vec<usize>,
    map: Vec<Option<usize>>,
    used: Vec<bool>,
    out: Vec<Match>,
}

impl Search<'_> {
    fn run(&mut self, depth: usize, binding: &BTreeMap<String, Phase>) {
        if depth == self.order.len() {
            self.finish(binding);
            return;
        }
        let p = self.order[depth];
        let pk = &self.pattern.nodes[p].kind;
        let anchor = self.pattern.neighbors(p).into_iter().find_map(|q| self.map[q]);
        let candidates: Vec<usize> = match (pk, anchor) {
            (_, Some(h)) => {
                let mut c = self.host.neighbors(h);
                c.sort_unstable();
                c.dedup();
                c
            }
            // diamonds are interchangeable: take the first free one
            (Kind::Diamond, None) => {
                (0..self.host.len()).filter(|&h| !self.used[h] && self.host.nodes[h].kind == Kind::Diamond).take(1).collect()
            }
            _ => (0..self.host.len()).collect(),
        };
        for h in candidates {
            if self.used[h] || !same_shape(pk, &self.host.nodes[h].kind) {
                continue;
            }
            if self.pattern.degree(p) != self.host.degree(h) {
                continue;
            }
            // every mapped neighbour (and p itself) must be wired at least as often
            self.map[p] = Some(h);
            let ok = self.pattern.neighbors(p).into_iter().all(|q| match self.map[q] {
                Some(hq) => multiplicity(&self.pattern.wires, p, q) <= multiplicity(&self.host.wires, h, hq),
                None => true,
            });
            if ok {
                let bindings = match (pk, &self.host.nodes[h].kind) {
                    (Kind::Spider { phase: pe, .. }, Kind::Spider { phase: ph, .. }) => pe.solve(*ph, binding),
                    _ => vec![binding.clone()],
                };
                self.used[h] = true;
                for b in bindings {
                    self.run(depth + 1, &b);
                }
                self.used[h] = false;
            }
            self.map[p] = None;
        }
    }

    fn finish(&mut self, binding: &BTreeMap<String, Phase>) {
        let pat = self.pattern;
        let host = self.host;
        let mut taken = vec![false; host.wires.len()];
        let mut consumed = Vec::new();
        let mut bare_wires = Vec::new();
        for (i, &(a, b)) in pat.wires.iter().enumerate() {
            match (self.map[a], self.map[b]) {
                (Some(ha), Some(hb)) => {
                    let w = (0..host.wires.len()).find(|&w| {
                        !taken[w] && (host.wires[w] == (ha, hb) || host.wires[w] == (hb, ha))
                    });
                    let Some(w) = w else { return };
                    taken[w] = true;
                    consumed.push(w);
                }
                _ if !internal(&pat.nodes[a].kind) && !internal(&pat.nodes[b].kind) => bare_wires.push(i),
                _ => {}
            }
        }
        let image: BTreeSet<usize> = self.map.iter().flatten().copied().collect();
        let nodes: Vec<(usize, usize)> = self.map.iter().enumerate().filter_map(|(p, h)| h.map(|h| (p, h))).collect();
        let free: Vec<usize> = (0..host.wires.len())
            .filter(|&w| !taken[w] && !image.contains(&host.wires[w].0) && !image.contains(&host.wires[w].1))
            .collect();
        let mut chosen = Vec::new();
        self.bare(&bare_wires, &free, &mut chosen, &mut |bare| {
            Match { nodes: nodes.clone(), binding: binding.clone(), wires: consumed.clone(), bare: bare.to_vec() }
        });
    }

    fn bare(
        &mut self,
        todo: &[usize],
        free: &[usize],
        chosen: &mut Vec<(usize, usize, bool)>,
        make: &mut dyn FnMut(&[(usize, usize, bool)]) -> Match,
    ) {
        let Some((&pw, rest)) = todo.split_first() else {
            self.out.push(make(chosen));
            return;
        };
        for &w in free {
            if chosen.iter().any(|&(_, c, _)| c == w) {
                continue;
            }
            for rev in [false, true] {
                chosen.push((pw, w, rev));
                self.bare(rest, free, chosen, make);
                chosen.pop();
            }
        }
    }
}

/// All embeddings of `pattern` into `host`.
pub fn find_matches(pattern: &Diagram<PhaseExpr>, host: &Diagram) -> Vec<Match> {
    if pattern.loops > host.loops {
        return Vec::new();
    }
    // connected nodes first so later nodes are anchored to mapped neighbours
    let mut order = Vec::new();
    let mut seen = vec![false; pattern.len()];
    for s in 0..pattern.len() {
        if seen[s] || !internal(&pattern.nodes[s].kind) {
            continue;
        }
        let mut queue = std::collections::VecDeque::from([s]);
        seen[s] = true;
        while let Some(p) = queue.pop_front() {
            order.push(p);
            for q in pattern.neighbors(p) {
                if !seen[q] && internal(&pattern.nodes[q].kind) {
                    seen[q] = true;
                    queue.push_back(q);
                }
            }
        }
    }
    let mut s = Search {
        pattern,
        host,
        order,
        map: vec![None; pattern.len()],
        used: vec![false; host.len()],
        out: Vec::new(),
    };
    s.run(0, &BTreeMap::new());
    s.out
}

/// Rewrites of `host` by `rule`, one per match and boundary assignment
/// that leads to a distinct attachment of the right-hand side.
pub fn apply_rule(rule: &RuleInstance, host: &Diagram) -> Result<Vec<Rewrite<Diagram>>> {
    let mut out = Vec::new();
    for m in find_matches(&rule.lhs, host) {
        apply_match(rule, host, &m, &mut out)?;
    }
    Ok(out)
}

/// The right-hand node attached to each pattern boundary point, keyed by
/// the point's boundary kind.
fn rhs_partner(rule: &RuleInstance) -> BTreeMap<Kind<PhaseExpr>, usize> {
    let mut out = BTreeMap::new();
    for &(a, b) in &rule.rhs.wires {
        for (x, y) in [(a, b), (b, a)] {
            if !internal(&rule.rhs.nodes[x].kind) {
                out.insert(rule.rhs.nodes[x].kind.clone(), y);
            }
        }
    }
    out
}

fn apply_match(rule: &RuleInstance, host: &Diagram, m: &Match, out: &mut Vec<Rewrite<Diagram>>) -> Result<()> {
    let lhs = &rule.lhs;
    let partner = rhs_partner(rule);
    let image = m.image();
    let taken: BTreeSet<usize> = m.wires.iter().copied().collect();
    // per image node: free host ends (wire, side) and pattern points grouped
    // into classes of interchangeable points
    let mut slots = Vec::new();
    for &(p, h) in &m.nodes {
        let mut ends = Vec::new();
        for (w, &(a, b)) in host.wires.iter().enumerate() {
            if taken.contains(&w) {
                continue;
            }
            if a == h {
                ends.push((w, 0));
            }
            if b == h {
                ends.push((w, 1));
            }
        }
        let mut classes: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for q in lhs.neighbors(p) {
            if !internal(&lhs.nodes[q].kind) {
                let r = *partner.get(&lhs.nodes[q].kind).ok_or_else(|| {
                    Error::InvalidRule(format!("{}: boundary point without a right-hand partner", rule.id))
                })?;
                classes.entry(r).or_default().push(q);
            }
        }
        let classes: Vec<Vec<usize>> = classes.into_values().collect();
        debug_assert_eq!(ends.len(), classes.iter().map(Vec::len).sum::<usize>());
        slots.push((ends, classes));
    }
    let mut choice: Vec<Vec<(usize, (usize, usize))>> = Vec::new();
    distribute(&slots, 0, &mut Vec::new(), &mut choice);
    for assign in choice {
        out.push(build(rule, host, m, &image, &assign)?);
    }
    Ok(())
}

/// Every way to give the free ends of each image node to its pattern
/// points, up to swapping points within a class.
fn distribute(
    slots: &[(Vec<(usize, usize)>, Vec<Vec<usize>>)],
    i: usize,
    acc: &mut Vec<(usize, (usize, usize))>,
    out: &mut Vec<Vec<(usize, (usize, usize))>>,
) {
    let Some((ends, classes)) = slots.get(i) else {
        out.push(acc.clone());
        return;
    };
    fn go(
        ends: &[(usize, usize)],
        classes: &[Vec<usize>],
        fill: &mut Vec<usize>,
        k: usize,
        acc: &mut Vec<(usize, (usize, usize))>,
        next: &mut dyn FnMut(&mut Vec<(usize, (usize, usize))>),
    ) {
        if k == ends.len() {
            next(acc);
            return;
        }
        for c in 0..classes.len() {
            if fill[c] < classes[c].len() {
                acc.push((classes[c][fill[c]], ends[k]));
                fill[c] += 1;
                go(ends, classes, fill, k + 1, acc, next);
                fill[c] -= 1;
                acc.pop();
            }
        }
    }
    let mut fill = vec![0; classes.len()];
    go(ends, classes, &mut fill, 0, acc, &mut |acc| distribute(slots, i + 1, acc, out));
}

fn build(
    rule: &RuleInstance,
    host: &Diagram,
    m: &Match,
    image: &BTreeSet<usize>,
    assign: &[(usize, (usize, usize))],
) -> Result<Rewrite<Diagram>> {
    let lhs = &rule.lhs;
    let rhs = &rule.rhs;
    let mut touched: BTreeSet<usize> = image.clone();
    for &(_, w, _) in &m.bare {
        touched.insert(host.wires[w].0);
        touched.insert(host.wires[w].1);
    }
    let mut nodes: Vec<Node<Phase>> = Vec::new();
    let mut kept = vec![usize::MAX; host.len()];
    let mut consumed = Vec::new();
    let mut produced = Vec::new();
    let mut carried = Vec::new();
    for (h, n) in host.nodes.iter().enumerate() {
        if image.contains(&h) {
            consumed.push(h);
            continue;
        }
        kept[h] = nodes.len();
        if touched.contains(&h) {
            consumed.push(h);
            produced.push(nodes.len());
        } else {
            carried.push((h, nodes.len()));
        }
        nodes.push(n.clone());
    }
    let mut fresh = vec![usize::MAX; rhs.len()];
    for (r, n) in rhs.nodes.iter().enumerate() {
        let kind = match &n.kind {
            Kind::Spider { color, phase, inputs, outputs } => Kind::Spider {
                color: *color,
                phase: phase.eval(&m.binding)?,
                inputs: *inputs,
                outputs: *outputs,
            },
            Kind::H => Kind::H,
            Kind::Diamond => Kind::Diamond,
            _ => continue,
        };
        fresh[r] = nodes.len();
        produced.push(nodes.len());
        nodes.push(Node { name: String::new(), kind });
    }
    // one junction per boundary kind, numbered after the real nodes
    let base = nodes.len();
    let kinds: Vec<Kind<PhaseExpr>> =
        lhs.nodes.iter().map(|n| n.kind.clone()).filter(|k| !internal(k)).collect();
    let junction = |k: &Kind<PhaseExpr>| base + kinds.iter().position(|x| x == k).expect("boundary kind");
    let mut end_point: BTreeMap<(usize, usize), usize> = BTreeMap::new();
    for &(q, end) in assign {
        end_point.insert(end, junction(&lhs.nodes[q].kind));
    }
    let bare_host: BTreeMap<usize, (usize, bool)> = m.bare.iter().map(|&(pw, w, rev)| (w, (pw, rev))).collect();
    let taken: BTreeSet<usize> = m.wires.iter().copied().collect();
    let mut wires = Vec::new();
    for (w, &(a, b)) in host.wires.iter().enumerate() {
        if taken.contains(&w) {
            continue;
        }
        if let Some(&(pw, rev)) = bare_host.get(&w) {
            let (pa, pb) = lhs.wires[pw];
            let (pa, pb) = if rev { (pb, pa) } else { (pa, pb) };
            wires.push((kept[a], junction(&lhs.nodes[pa].kind)));
            wires.push((junction(&lhs.nodes[pb].kind), kept[b]));
            continue;
        }
        let side = |v: usize, s: usize| if image.contains(&v) { end_point[&(w, s)] } else { kept[v] };
        wires.push((side(a, 0), side(b, 1)));
    }
    for &(a, b) in &rhs.wires {
        let end = |v: usize| if internal(&rhs.nodes[v].kind) { fresh[v] } else { junction(&rhs.nodes[v].kind) };
        wires.push((end(a), end(b)));
    }
    let mut loops = host.loops - lhs.loops + rhs.loops;
    for j in base..base + kinds.len() {
        let at: Vec<usize> = (0..wires.len()).filter(|&i| wires[i].0 == j || wires[i].1 == j).collect();
        match at.as_slice() {
            [i] if wires[*i] == (j, j) => {
                wires.remove(*i);
                loops += 1;
            }
            [i1, i2] => {
                let other = |(a, b): (usize, usize)| if a == j { b } else { a };
                let joined = (other(wires[*i1]), other(wires[*i2]));
                wires.remove(*i2);
                wires[*i1] = joined;
            }
            _ => return Err(Error::InvalidRule(format!("{}: dangling boundary point", rule.id))),
        }
    }
    let result = Diagram { nodes, wires, loops }.renamed();
    Ok(Rewrite { position: m.position(host), result, consumed, produced, carried })
}

/// Multiway system over ZX diagrams; each rule instance contributes one
/// directed rule per direction.
#[derive(Clone, Debug)]
pub struct ZxSystem {
    pub rules: Vec<RuleInstance>,
}

impl ZxSystem {
    /// Both directions of every instance.
    pub fn new(instances: &[RuleInstance]) -> Self {
        let mut rules = Vec::new();
        for r in instances {
            rules.push(r.clone());
            rules.push(r.reversed());
        }
        ZxSystem { rules }
    }

    /// Exactly the given directed rules.
    pub fn directed(rules: Vec<RuleInstance>) -> Self {
        ZxSystem { rules }
    }
}

impl RewriteSystem for ZxSystem {
    type State = Diagram;

    fn canonicalizer(&self) -> &str {
        "zx"
    }

    fn rule_count(&self) -> usize {
        self.rules.len()
    }

    fn rule_label(&self, rule: usize) -> String {
        self.rules[rule].id.clone()
    }

    fn canonicalize(&self, state: &Diagram) -> Result<Canonical<Diagram>> {
        let c = state.canonical();
        Ok(Canonical { state: c.diagram, key: c.key, perm: c.perm })
    }

    fn rewrites(&self, rule: usize, state: &Diagram) -> Result<Vec<Rewrite<Diagram>>> {
        apply_rule(&self.rules[rule], state)
    }

    fn element_count(&self, state: &Diagram) -> usize {
        state.len()
    }

    fn render(&self, state: &Diagram) -> String {
        state.to_string()
    }
}
