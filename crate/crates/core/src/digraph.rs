//! Associated digraphs: strongly connected components, girth, cyclicity and
//! small-scale cycle enumeration.
//!
//! Note on terminology: the *maximal girth* of a completely reducible graph
//! is the largest girth among its strongly connected components, not the
//! lcm of the component girths.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt::Write as _;

use num_integer::Integer;

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::semiring::MaxPlus;

/// Default node limit for [`enumerate_cycles`].
pub const CYCLE_ENUMERATION_LIMIT: usize = 8;

/// Digraph of a matrix: one arc `(i, j)` per finite entry, weighted by it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeightedDigraph {
    n: usize,
    arcs: BTreeMap<(usize, usize), MaxPlus>,
}

impl WeightedDigraph {
    pub fn new(n: usize) -> Self {
        WeightedDigraph { n, arcs: BTreeMap::new() }
    }

    /// Subgraph of `a`'s digraph restricted to the given arcs.
    pub fn from_arcs(a: &Matrix, arcs: impl IntoIterator<Item = (usize, usize)>) -> Self {
        let mut g = WeightedDigraph::new(a.dim());
        for (i, j) in arcs {
            if a.get(i, j).is_finite() {
                g.arcs.insert((i, j), a.get(i, j).clone());
            }
        }
        g
    }

    pub fn node_count(&self) -> usize {
        self.n
    }

    pub fn arcs(&self) -> impl Iterator<Item = (usize, usize, &MaxPlus)> {
        self.arcs.iter().map(|(&(i, j), w)| (i, j, w))
    }

    pub fn arc_set(&self) -> BTreeSet<(usize, usize)> {
        self.arcs.keys().copied().collect()
    }

    pub fn has_arc(&self, i: usize, j: usize) -> bool {
        self.arcs.contains_key(&(i, j))
    }

    pub fn weight(&self, i: usize, j: usize) -> Option<&MaxPlus> {
        self.arcs.get(&(i, j))
    }

    pub fn successors(&self) -> Vec<Vec<usize>> {
        let mut succ = vec![Vec::new(); self.n];
        for &(i, j) in self.arcs.keys() {
            succ[i].push(j);
        }
        succ
    }

    /// Graphviz rendering; `highlight` arcs are drawn bold red.
    pub fn to_dot(&self, highlight: &BTreeSet<(usize, usize)>) -> String {
        let mut out = String::from("digraph G {\n");
        for v in 0..self.n {
            let _ = writeln!(out, "  {} ;", v + 1);
        }
        for (&(i, j), w) in &self.arcs {
            let style = if highlight.contains(&(i, j)) { ", color=red, penwidth=2" } else { "" };
            let _ = writeln!(out, "  {} -> {} [label=\"{}\"{}];", i + 1, j + 1, w, style);
        }
        out.push_str("}\n");
        out
    }
}

/// The digraph with an arc for every finite entry of `a`.
pub fn associated_digraph(a: &Matrix) -> WeightedDigraph {
    let mut g = WeightedDigraph::new(a.dim());
    for ((i, j), v) in a.entries() {
        if v.is_finite() {
            g.arcs.insert((i, j), v.clone());
        }
    }
    g
}

/// One strongly connected component with its cycle statistics.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Component {
    pub nodes: Vec<usize>,
    /// Shortest cycle length; `None` for a trivial component without a loop.
    pub girth: Option<usize>,
    /// gcd of all cycle lengths; `None` when acyclic.
    pub cyclicity: Option<usize>,
}

impl Component {
    pub fn has_cycle(&self) -> bool {
        self.girth.is_some()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SccDecomposition {
    pub components: Vec<Component>,
}

impl SccDecomposition {
    /// Components that contain at least one cycle.
    pub fn cyclic_components(&self) -> impl Iterator<Item = &Component> {
        self.components.iter().filter(|c| c.has_cycle())
    }

    /// Index of the component containing each node.
    pub fn component_of(&self, n: usize) -> Vec<usize> {
        let mut comp = vec![usize::MAX; n];
        for (k, c) in self.components.iter().enumerate() {
            for &v in &c.nodes {
                comp[v] = k;
            }
        }
        comp
    }
}

/// Strongly connected components (Tarjan), each annotated with girth and
/// cyclicity computed inside the component.
pub fn scc_decompose(g: &WeightedDigraph) -> SccDecomposition {
    let succ = g.successors();
    let groups = tarjan(&succ);
    let mut comp_of = vec![0; g.n];
    for (k, nodes) in groups.iter().enumerate() {
        for &v in nodes {
            comp_of[v] = k;
        }
    }
    let components = groups
        .into_iter()
        .enumerate()
        .map(|(k, mut nodes)| {
            nodes.sort_unstable();
            let inside = |v: usize| comp_of[v] == k;
            let cyclic = nodes.len() > 1 || g.has_arc(nodes[0], nodes[0]);
            let (girth, cyclicity) = if cyclic {
                (Some(component_girth(&succ, &nodes, inside)), Some(component_cyclicity(&succ, &nodes, inside)))
            } else {
                (None, None)
            };
            Component { nodes, girth, cyclicity }
        })
        .collect();
    SccDecomposition { components }
}

fn tarjan(succ: &[Vec<usize>]) -> Vec<Vec<usize>> {
    let n = succ.len();
    let mut index = vec![usize::MAX; n];
    let mut low = vec![0; n];
    let mut on_stack = vec![false; n];
    let mut stack = Vec::new();
    let mut out = Vec::new();
    let mut counter = 0;
    for root in 0..n {
        if index[root] != usize::MAX {
            continue;
        }
        // (node, next successor position)
        let mut call: Vec<(usize, usize)> = vec![(root, 0)];
        index[root] = counter;
        low[root] = counter;
        counter += 1;
        stack.push(root);
        on_stack[root] = true;
        while let Some(&mut (v, ref mut pos)) = call.last_mut() {
            if let Some(&w) = succ[v].get(*pos) {
                *pos += 1;
                if index[w] == usize::MAX {
                    index[w] = counter;
                    low[w] = counter;
                    counter += 1;
                    stack.push(w);
                    on_stack[w] = true;
                    call.push((w, 0));
                } else if on_stack[w] {
                    low[v] = low[v].min(index[w]);
                }
            } else {
                call.pop();
                if let Some(&(parent, _)) = call.last() {
                    low[parent] = low[parent].min(low[v]);
                }
                if low[v] == index[v] {
                    let mut group = Vec::new();
                    loop {
                        let w = stack.pop().expect("tarjan stack underflow");
                        on_stack[w] = false;
                        group.push(w);
                        if w == v {
                            break;
                        }
                    }
                    out.push(group);
                }
            }
        }
    }
    out
}

fn bfs_levels(succ: &[Vec<usize>], root: usize, inside: impl Fn(usize) -> bool) -> Vec<Option<usize>> {
    let mut level = vec![None; succ.len()];
    level[root] = Some(0);
    let mut queue = VecDeque::from([root]);
    while let Some(u) = queue.pop_front() {
        let lu = level[u].unwrap();
        for &v in &succ[u] {
            if inside(v) && level[v].is_none() {
                level[v] = Some(lu + 1);
                queue.push_back(v);
            }
        }
    }
    level
}

fn component_girth(succ: &[Vec<usize>], nodes: &[usize], inside: impl Fn(usize) -> bool + Copy) -> usize {
    let mut best = usize::MAX;
    for &s in nodes {
        let level = bfs_levels(succ, s, inside);
        for &u in nodes {
            if let Some(lu) = level[u] {
                if succ[u].contains(&s) {
                    best = best.min(lu + 1);
                }
            }
        }
    }
    best
}

// gcd over internal arcs (u, v) of level(u) + 1 - level(v).
fn component_cyclicity(succ: &[Vec<usize>], nodes: &[usize], inside: impl Fn(usize) -> bool + Copy) -> usize {
    let level = bfs_levels(succ, nodes[0], inside);
    let mut g: i64 = 0;
    for &u in nodes {
        for &v in &succ[u] {
            if inside(v) {
                let d = level[u].unwrap() as i64 + 1 - level[v].unwrap() as i64;
                g = g.gcd(&d);
            }
        }
    }
    g as usize
}

/// Largest girth over the components that contain a cycle.
pub fn maximal_girth(d: &SccDecomposition) -> Result<usize> {
    d.cyclic_components().filter_map(|c| c.girth).max().ok_or(Error::Acyclic)
}

/// lcm of the cyclicities of the components that contain a cycle.
///
/// Trivial acyclic components (a single node without loop) are skipped; they
/// carry no cycle and do not constrain the period.
pub fn global_cyclicity(d: &SccDecomposition) -> Result<usize> {
    let mut any = false;
    let mut l = 1usize;
    for c in d.cyclic_components() {
        any = true;
        l = l.lcm(&c.cyclicity.unwrap());
    }
    if any {
        Ok(l)
    } else {
        Err(Error::Acyclic)
    }
}

/// An elementary cycle, listed from its smallest node.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cycle {
    pub nodes: Vec<usize>,
    pub weight: MaxPlus,
}

impl Cycle {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Arcs of the closed walk `nodes[0] ... nodes[k-1] nodes[0]`.
    pub fn arcs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        let k = self.nodes.len();
        (0..k).map(move |s| (self.nodes[s], self.nodes[(s + 1) % k]))
    }
}

/// All elementary cycles, each reported once starting from its smallest node.
pub fn enumerate_cycles(g: &WeightedDigraph, max_n: usize) -> Result<Vec<Cycle>> {
    if g.n > max_n {
        return Err(Error::TooLarge { n: g.n, limit: max_n, what: "cycle enumeration" });
    }
    let mut out = Vec::new();
    for start in 0..g.n {
        cycles_with_min_node(g, start, usize::MAX, &mut |nodes, weight| {
            out.push(Cycle { nodes: nodes.to_vec(), weight })
        });
    }
    Ok(out)
}

/// Calls `emit` for every elementary cycle whose smallest node is `start`
/// and whose length is at most `max_len`.
pub(crate) fn cycles_with_min_node(
    g: &WeightedDigraph,
    start: usize,
    max_len: usize,
    emit: &mut dyn FnMut(&[usize], MaxPlus),
) {
    let succ = g.successors();
    let mut path = vec![start];
    let mut on_path = vec![false; g.n];
    on_path[start] = true;
    fn go(
        g: &WeightedDigraph,
        succ: &[Vec<usize>],
        start: usize,
        max_len: usize,
        path: &mut Vec<usize>,
        on_path: &mut [bool],
        weight: MaxPlus,
        emit: &mut dyn FnMut(&[usize], MaxPlus),
    ) {
        let u = *path.last().unwrap();
        for &v in &succ[u] {
            let w = weight.otimes(g.weight(u, v).unwrap());
            if v == start {
                emit(path, w);
            } else if v > start && !on_path[v] && path.len() < max_len {
                on_path[v] = true;
                path.push(v);
                go(g, succ, start, max_len, path, on_path, w, emit);
                path.pop();
                on_path[v] = false;
            }
        }
    }
    go(g, &succ, start, max_len, &mut path, &mut on_path, MaxPlus::one(), emit);
}
