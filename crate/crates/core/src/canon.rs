//! Canonical labeling of vertex-coloured, edge-labelled graphs by colour
//! refinement and individualization with automorphism pruning.
//!
//! Every state representation in the crate (hypergraphs, ZX diagrams, the
//! multiway graphs themselves) reduces to a [`ColoredGraph`] for
//! canonicalization and isomorphism testing.

use std::collections::BTreeSet;

use sha2::{Digest, Sha256};

/// A finite graph with ordered vertex colours and ordered edge labels.
/// Parallel edges and self-loops are allowed.
#[derive(Clone, Debug)]
pub struct ColoredGraph<C, L> {
    pub colors: Vec<C>,
    pub edges: Vec<(usize, usize, L)>,
    pub directed: bool,
}

/// Isomorphism-invariant description of a graph: colours in canonical
/// order and the sorted canonical edge list.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Certificate<C, L> {
    pub colors: Vec<C>,
    pub edges: Vec<(usize, usize, L)>,
}

/// Result of canonical labeling: `labeling[v]` is the canonical index of
/// vertex `v`.
#[derive(Clone, Debug)]
pub struct CanonicalForm<C, L> {
    pub labeling: Vec<usize>,
    pub certificate: Certificate<C, L>,
}

impl<C: Ord + Clone, L: Ord + Clone> ColoredGraph<C, L> {
    pub fn new(colors: Vec<C>, directed: bool) -> Self {
        ColoredGraph { colors, edges: Vec::new(), directed }
    }

    pub fn add_edge(&mut self, u: usize, v: usize, label: L) {
        self.edges.push((u, v, label));
    }

    pub fn len(&self) -> usize {
        self.colors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.colors.is_empty()
    }

    pub fn canonical_form(&self) -> CanonicalForm<C, L> {
        let search = Search::new(self);
        let labeling = search.run();
        let certificate = self.certificate_under(&labeling);
        CanonicalForm { labeling, certificate }
    }

    /// The certificate this graph would have under an arbitrary labeling.
    pub fn certificate_under(&self, labeling: &[usize]) -> Certificate<C, L> {
        let mut colors = vec![None; self.colors.len()];
        for (v, &l) in labeling.iter().enumerate() {
            colors[l] = Some(self.colors[v].clone());
        }
        let mut edges: Vec<_> = self
            .edges
            .iter()
            .map(|(u, v, l)| {
                let (a, b) = (labeling[*u], labeling[*v]);
                let (a, b) = if self.directed || a <= b { (a, b) } else { (b, a) };
                (a, b, l.clone())
            })
            .collect();
        edges.sort();
        Certificate { colors: colors.into_iter().map(|c| c.expect("labeling is a permutation")).collect(), edges }
    }

    /// An isomorphism `self → other` as a vertex map, if one exists.
    pub fn isomorphism(&self, other: &Self) -> Option<Vec<usize>> {
        if self.len() != other.len() || self.edges.len() != other.edges.len() || self.directed != other.directed {
            return None;
        }
        let a = self.canonical_form();
        let b = other.canonical_form();
        if a.certificate != b.certificate {
            return None;
        }
        let mut inv_b = vec![0; b.labeling.len()];
        for (v, &l) in b.labeling.iter().enumerate() {
            inv_b[l] = v;
        }
        Some(a.labeling.iter().map(|&l| inv_b[l]).collect())
    }
}

/// 64-bit stable hash of a canonical key (truncated SHA-256).
pub fn stable_hash(key: &str) -> u64 {
    let digest = Sha256::digest(key.as_bytes());
    u64::from_be_bytes(digest[..8].try_into().expect("sha256 has 32 bytes"))
}

struct Search {
    n: usize,
    // (neighbour, label rank, direction) per vertex; direction 0 = out/undirected, 1 = in
    adj: Vec<Vec<(usize, u32, u8)>>,
    // edges in rank form for fast leaf comparison
    edges: Vec<(usize, usize, u32)>,
    color_rank: Vec<u32>,
    directed: bool,
}

struct State {
    best: Option<(Vec<usize>, Vec<(usize, usize, u32)>)>,
    first: Option<(Vec<usize>, Vec<(usize, usize, u32)>)>,
    autos: Vec<Vec<usize>>,
}

impl Search {
    fn new<C: Ord + Clone, L: Ord + Clone>(g: &ColoredGraph<C, L>) -> Self {
        let n = g.colors.len();
        let color_set: BTreeSet<&C> = g.colors.iter().collect();
        let color_list: Vec<&C> = color_set.into_iter().collect();
        let color_rank =
            g.colors.iter().map(|c| color_list.binary_search(&c).expect("colour present") as u32).collect();
        let label_set: BTreeSet<&L> = g.edges.iter().map(|e| &e.2).collect();
        let label_list: Vec<&L> = label_set.into_iter().collect();
        let mut adj = vec![Vec::new(); n];
        let mut edges = Vec::with_capacity(g.edges.len());
        for (u, v, l) in &g.edges {
            let r = label_list.binary_search(&l).expect("label present") as u32;
            edges.push((*u, *v, r));
            if g.directed {
                adj[*u].push((*v, r, 0));
                adj[*v].push((*u, r, 1));
            } else {
                adj[*u].push((*v, r, 0));
                if u != v {
                    adj[*v].push((*u, r, 0));
                }
            }
        }
        Search { n, adj, edges, color_rank, directed: g.directed }
    }

    fn run(&self) -> Vec<usize> {
        if self.n == 0 {
            return Vec::new();
        }
        let cells = self.refine(self.color_rank.clone());
        let mut st = State { best: None, first: None, autos: Vec::new() };
        self.dfs(cells, &mut Vec::new(), &mut st);
        st.best.expect("at least one leaf").0
    }

    /// Equitable refinement. `cell[v]` values are renumbered densely so that
    /// their order is isomorphism invariant.
    fn refine(&self, mut cell: Vec<u32>) -> Vec<u32> {
        let mut count = {
            let mut c = cell.clone();
            c.sort_unstable();
            c.dedup();
            c.len()
        };
        loop {
            let mut keyed: Vec<(u32, Vec<(u8, u32, u32)>, usize)> = (0..self.n)
                .map(|v| {
                    let mut sig: Vec<(u8, u32, u32)> =
                        self.adj[v].iter().map(|&(w, l, d)| (d, l, cell[w])).collect();
                    sig.sort_unstable();
                    (cell[v], sig, v)
                })
                .collect();
            keyed.sort_unstable();
            let mut next = vec![0u32; self.n];
            let mut idx = 0u32;
            for i in 0..keyed.len() {
                if i > 0 && (keyed[i].0 != keyed[i - 1].0 || keyed[i].1 != keyed[i - 1].1) {
                    idx += 1;
                }
                next[keyed[i].2] = idx;
            }
            let new_count = idx as usize + 1;
            cell = next;
            if new_count == count {
                return cell;
            }
            count = new_count;
        }
    }

    fn dfs(&self, cell: Vec<u32>, prefix: &mut Vec<usize>, st: &mut State) {
        let ncells = distinct(&cell);
        if ncells == self.n {
            self.leaf(cell, st);
            return;
        }
        // target: first smallest non-singleton cell
        let mut sizes = vec![0usize; ncells];
        for &c in &cell {
            sizes[c as usize] += 1;
        }
        let target = (0..ncells).filter(|&c| sizes[c] > 1).min_by_key(|&c| (sizes[c], c)).expect("non-discrete");
        let members: Vec<usize> = (0..self.n).filter(|&v| cell[v] as usize == target).collect();
        let mut explored: Vec<usize> = Vec::new();
        for &v in &members {
            if !explored.is_empty() {
                let orbit = self.orbit_rep(prefix, &st.autos);
                let rv = find(&orbit, v);
                if explored.iter().any(|&w| find(&orbit, w) == rv) {
                    continue;
                }
            }
            explored.push(v);
            let mut c2: Vec<u32> = cell.iter().map(|&c| c * 2 + 1).collect();
            c2[v] = target as u32 * 2;
            prefix.push(v);
            let refined = self.refine(c2);
            self.dfs(refined, prefix, st);
            prefix.pop();
        }
    }

    /// Union-find of orbits under the known automorphisms fixing `prefix`.
    fn orbit_rep(&self, prefix: &[usize], autos: &[Vec<usize>]) -> Vec<usize> {
        let mut parent: Vec<usize> = (0..self.n).collect();
        for a in autos {
            if prefix.iter().all(|&p| a[p] == p) {
                for v in 0..self.n {
                    union(&mut parent, v, a[v]);
                }
            }
        }
        parent
    }

    fn leaf(&self, cell: Vec<u32>, st: &mut State) {
        let labeling: Vec<usize> = cell.iter().map(|&c| c as usize).collect();
        let mut edges: Vec<(usize, usize, u32)> = self
            .edges
            .iter()
            .map(|&(u, v, l)| {
                let (a, b) = (labeling[u], labeling[v]);
                if self.directed || a <= b {
                    (a, b, l)
                } else {
                    (b, a, l)
                }
            })
            .collect();
        edges.sort_unstable();
        let auto_with = |other: &Vec<usize>| -> Vec<usize> {
            // other⁻¹ ∘ labeling
            let mut inv = vec![0; self.n];
            for (v, &l) in other.iter().enumerate() {
                inv[l] = v;
            }
            labeling.iter().map(|&l| inv[l]).collect()
        };
        if let Some((fl, fe)) = &st.first {
            if *fe == edges {
                let a = auto_with(fl);
                st.autos.push(a);
                return;
            }
        } else {
            st.first = Some((labeling.clone(), edges.clone()));
        }
        match &st.best {
            Some((bl, be)) => {
                if *be == edges {
                    let a = auto_with(bl);
                    st.autos.push(a);
                } else if edges < *be {
                    st.best = Some((labeling, edges));
                }
            }
            None => st.best = Some((labeling, edges)),
        }
    }
}

fn distinct(cell: &[u32]) -> usize {
    cell.iter().copied().max().map_or(0, |m| m as usize + 1)
}

fn find(parent: &[usize], mut v: usize) -> usize {
    while parent[v] != v {
        v = parent[v];
    }
    v
}

fn union(parent: &mut [usize], a: usize, b: usize) {
    let (ra, rb) = (find(parent, a), find(parent, b));
    if ra != rb {
        let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
        parent[hi] = lo;
    }
}
