//! Simple-cycle enumeration (Johnson's algorithm) over bounded subgraphs.

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{DirectedGraph, Edge};
use crate::iri::NodeId;

pub const DEFAULT_CYCLE_CAP: usize = 1_000_000;

/// A closed path with no repeated node, stored as its node sequence rotated
/// so that the smallest id comes first. The closing edge runs from the last
/// node back to the first.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(transparent)]
pub struct SimpleCycle {
    nodes: Vec<NodeId>,
}

impl SimpleCycle {
    /// Validates and canonicalises a node sequence. A single node stands for
    /// a self-loop.
    pub fn new(mut nodes: Vec<NodeId>) -> Result<Self> {
        if nodes.is_empty() {
            return Err(Error::InvalidCycle("empty node sequence".into()));
        }
        let mut seen = BTreeSet::new();
        for &v in &nodes {
            if !seen.insert(v) {
                return Err(Error::InvalidCycle(format!("node {v} appears twice")));
            }
        }
        let min_pos = nodes
            .iter()
            .enumerate()
            .min_by_key(|(_, v)| **v)
            .map(|(i, _)| i)
            .unwrap_or(0);
        nodes.rotate_left(min_pos);
        Ok(SimpleCycle { nodes })
    }

    pub fn nodes(&self) -> &[NodeId] {
        &self.nodes
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn is_self_loop(&self) -> bool {
        self.nodes.len() == 1
    }

    /// Consecutive edges, ending with the closing edge.
    pub fn edges(&self) -> impl Iterator<Item = Edge> + '_ {
        let n = self.nodes.len();
        (0..n).map(move |i| Edge::new(self.nodes[i], self.nodes[(i + 1) % n]))
    }

    /// True if every edge of the cycle is present in `g`.
    pub fn is_in(&self, g: &DirectedGraph) -> bool {
        self.edges().all(|e| g.has_edge(e.from, e.to))
    }
}

impl fmt::Display for SimpleCycle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for v in &self.nodes {
            write!(f, "{v} -> ")?;
        }
        write!(f, "{}", self.nodes[0])
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct EnumerationResult {
    pub cycles: Vec<SimpleCycle>,
    /// Set when enumeration stopped because more than `cap` cycles exist.
    pub truncated: bool,
    /// Number of search-tree nodes visited.
    pub explored_count: u64,
}

/// The subgraph with exactly the edges of `g` whose endpoints both lie in
/// `nodes`. Node ids are preserved.
pub fn induced_subgraph(g: &DirectedGraph, nodes: &BTreeSet<NodeId>) -> DirectedGraph {
    let mut sub = DirectedGraph::with_nodes(g.node_count());
    for &u in nodes {
        for &v in g.successors(u) {
            if nodes.contains(&v) {
                sub.add_edge(u, v);
            }
        }
    }
    sub
}

/// All simple cycles of the active part of `g`, in canonical form, up to
/// `cap` of them. Start vertices are processed in ascending id order, so the
/// output order is deterministic. Self-loops are a contract violation.
pub fn enumerate_simple_cycles(g: &DirectedGraph, cap: usize) -> Result<EnumerationResult> {
    if cap == 0 {
        return Err(Error::InvalidConfig("cycle cap must be at least 1".into()));
    }
    if let Some(v) = g.nodes().find(|&v| g.is_active(v) && g.has_edge(v, v)) {
        return Err(Error::SelfLoop(v));
    }

    // compact to the nodes that carry active edges; local order follows id order
    let global: Vec<NodeId> = g
        .nodes()
        .filter(|&v| g.is_active(v) && (g.out_degree(v) > 0 || g.in_degree(v) > 0))
        .collect();
    let local: HashMap<NodeId, u32> = global
        .iter()
        .enumerate()
        .map(|(i, &v)| (v, i as u32))
        .collect();
    let adj: Vec<Vec<u32>> = global
        .iter()
        .map(|&v| {
            g.successors(v)
                .iter()
                .filter_map(|w| local.get(w).copied())
                .collect()
        })
        .collect();

    let mut johnson = Johnson::new(adj, cap);
    for s in 0..global.len() as u32 {
        if johnson.truncated {
            break;
        }
        if johnson.select_component(s) {
            johnson.circuits_from(s);
        }
    }

    let cycles = johnson
        .found
        .into_iter()
        .map(|path| {
            SimpleCycle::new(path.into_iter().map(|i| global[i as usize]).collect())
                .expect("johnson circuits are simple")
        })
        .collect();
    Ok(EnumerationResult {
        cycles,
        truncated: johnson.truncated,
        explored_count: johnson.explored,
    })
}

struct Johnson {
    adj: Vec<Vec<u32>>,
    radj: Vec<Vec<u32>>,
    cap: usize,
    in_comp: Vec<bool>,
    blocked: Vec<bool>,
    blist: Vec<Vec<u32>>,
    found: Vec<Vec<u32>>,
    truncated: bool,
    explored: u64,
}

impl Johnson {
    fn new(adj: Vec<Vec<u32>>, cap: usize) -> Self {
        let k = adj.len();
        let mut radj = vec![Vec::new(); k];
        for (u, succ) in adj.iter().enumerate() {
            for &w in succ {
                radj[w as usize].push(u as u32);
            }
        }
        Johnson {
            adj,
            radj,
            cap,
            in_comp: vec![false; k],
            blocked: vec![false; k],
            blist: vec![Vec::new(); k],
            found: Vec::new(),
            truncated: false,
            explored: 0,
        }
    }

    /// Marks the strongly connected component of `s` inside the subgraph
    /// induced by vertices `>= s`. Returns false if it is trivial.
    fn select_component(&mut self, s: u32) -> bool {
        let forward = reach(&self.adj, s);
        let backward = reach(&self.radj, s);
        let mut size = 0;
        for v in 0..self.adj.len() {
            let inside = v as u32 >= s && forward[v] && backward[v];
            self.in_comp[v] = inside;
            self.blocked[v] = false;
            self.blist[v].clear();
            size += usize::from(inside);
        }
        size > 1
    }

    fn circuits_from(&mut self, s: u32) {
        // frame: (vertex, next successor index, found a circuit below)
        let mut frames: Vec<(u32, usize, bool)> = vec![(s, 0, false)];
        let mut path: Vec<u32> = vec![s];
        self.blocked[s as usize] = true;
        self.explored += 1;

        while let Some(&mut (v, ref mut next, ref mut found)) = frames.last_mut() {
            let succ = &self.adj[v as usize];
            if *next < succ.len() {
                let w = succ[*next];
                *next += 1;
                if w < s || !self.in_comp[w as usize] {
                    continue;
                }
                if w == s {
                    if self.found.len() == self.cap {
                        self.truncated = true;
                        return;
                    }
                    self.found.push(path.clone());
                    *found = true;
                } else if !self.blocked[w as usize] {
                    self.blocked[w as usize] = true;
                    path.push(w);
                    frames.push((w, 0, false));
                    self.explored += 1;
                }
                continue;
            }

            let found = *found;
            frames.pop();
            path.pop();
            if found {
                self.unblock(v);
            } else {
                for i in 0..self.adj[v as usize].len() {
                    let w = self.adj[v as usize][i];
                    if w >= s && self.in_comp[w as usize] && !self.blist[w as usize].contains(&v) {
                        self.blist[w as usize].push(v);
                    }
                }
            }
            if let Some(parent) = frames.last_mut() {
                parent.2 |= found;
            }
        }
    }

    fn unblock(&mut self, u: u32) {
        let mut stack = vec![u];
        while let Some(x) = stack.pop() {
            self.blocked[x as usize] = false;
            for w in std::mem::take(&mut self.blist[x as usize]) {
                if self.blocked[w as usize] {
                    stack.push(w);
                }
            }
        }
    }
}

/// Vertices `>= s` reachable from `s` using only vertices `>= s`.
fn reach(adj: &[Vec<u32>], s: u32) -> Vec<bool> {
    let mut seen = vec![false; adj.len()];
    let mut stack = vec![s];
    seen[s as usize] = true;
    while let Some(v) = stack.pop() {
        for &w in &adj[v as usize] {
            if w >= s && !seen[w as usize] {
                seen[w as usize] = true;
                stack.push(w);
            }
        }
    }
    seen
}

#[cfg(test)]
mod tests {
    use super::*;

    fn n(i: u32) -> NodeId {
        NodeId(i)
    }

    fn complete(k: u32) -> DirectedGraph {
        let edges = (0..k).flat_map(|a| (0..k).filter(move |&b| b != a).map(move |b| (a, b)));
        DirectedGraph::from_edges(k as usize, edges)
    }

    /// Brute force: every node sequence whose minimum comes first, checked
    /// edge by edge.
    fn count_by_permutation(g: &DirectedGraph) -> usize {
        fn extend(g: &DirectedGraph, path: &mut Vec<NodeId>, count: &mut usize) {
            let last = *path.last().unwrap();
            if path.len() >= 2 && g.has_edge(last, path[0]) {
                *count += 1;
            }
            for v in g.nodes() {
                if v > path[0] && !path.contains(&v) && g.has_edge(last, v) {
                    path.push(v);
                    extend(g, path, count);
                    path.pop();
                }
            }
        }
        let mut count = 0;
        for s in g.nodes() {
            extend(g, &mut vec![s], &mut count);
        }
        count
    }

    #[test]
    fn canonical_rotation() {
        let c = SimpleCycle::new(vec![n(5), n(2), n(9)]).unwrap();
        assert_eq!(c.nodes(), &[n(2), n(9), n(5)]);
        assert_eq!(c, SimpleCycle::new(vec![n(9), n(5), n(2)]).unwrap());
        assert_eq!(
            c.edges().collect::<Vec<_>>(),
            vec![Edge::new(n(2), n(9)), Edge::new(n(9), n(5)), Edge::new(n(5), n(2))]
        );
        assert!(SimpleCycle::new(vec![n(1), n(2), n(1)]).is_err());
        assert!(SimpleCycle::new(vec![]).is_err());
    }

    #[test]
    fn complete_digraph_on_four_nodes() {
        let g = complete(4);
        assert_eq!(count_by_permutation(&g), 20);
        let res = enumerate_simple_cycles(&g, DEFAULT_CYCLE_CAP).unwrap();
        assert_eq!(res.cycles.len(), 20);
        let by_len = |l| res.cycles.iter().filter(|c| c.len() == l).count();
        assert_eq!((by_len(2), by_len(3), by_len(4)), (6, 8, 6));
        assert!(!res.truncated);
    }

    #[test]
    fn complete_digraph_counts_match_closed_form() {
        fn binom(n: u64, k: u64) -> u64 {
            (1..=k).fold(1, |acc, i| acc * (n - k + i) / i)
        }
        for k in 2..=6u64 {
            let expected: u64 = (2..=k).map(|j| binom(k, j) * (1..j).product::<u64>()).sum();
            let res = enumerate_simple_cycles(&complete(k as u32), DEFAULT_CYCLE_CAP).unwrap();
            assert_eq!(res.cycles.len() as u64, expected, "n = {k}");
        }
    }

    #[test]
    fn dag_has_no_cycles() {
        let g = DirectedGraph::from_edges(4, [(0, 1), (1, 2), (0, 3), (3, 2)]);
        let res = enumerate_simple_cycles(&g, 10).unwrap();
        assert!(res.cycles.is_empty());
        assert!(!res.truncated);
    }

    #[test]
    fn cap_truncates() {
        let g = complete(4);
        let res = enumerate_simple_cycles(&g, 5).unwrap();
        assert_eq!(res.cycles.len(), 5);
        assert!(res.truncated);
        let exact = enumerate_simple_cycles(&g, 20).unwrap();
        assert!(!exact.truncated);
        assert!(enumerate_simple_cycles(&g, 0).is_err());
    }

    #[test]
    fn self_loops_are_rejected() {
        let g = DirectedGraph::from_edges(2, [(0, 1), (1, 1)]);
        assert!(matches!(enumerate_simple_cycles(&g, 10), Err(Error::SelfLoop(v)) if v == n(1)));
    }

    #[test]
    fn induced_subgraph_keeps_internal_edges_only() {
        let g = DirectedGraph::from_edges(4, [(0, 1), (1, 0), (1, 2), (2, 3), (3, 0)]);
        let sub = induced_subgraph(&g, &BTreeSet::from([n(0), n(1), n(2)]));
        assert_eq!(sub.edge_count(), 3);
        assert!(!sub.has_edge(n(2), n(3)));
        assert_eq!(sub.node_count(), g.node_count());
        assert_eq!(induced_subgraph(&g, &BTreeSet::new()).edge_count(), 0);
        let all: BTreeSet<_> = g.nodes().collect();
        assert_eq!(induced_subgraph(&g, &all), g);
    }

    #[test]
    fn pruned_nodes_are_skipped() {
        let mut g = DirectedGraph::from_edges(4, [(0, 1), (1, 0), (2, 3), (3, 2)]);
        g.set_pruned(&BTreeSet::from([n(3)]));
        let res = enumerate_simple_cycles(&g, 10).unwrap();
        assert_eq!(res.cycles, vec![SimpleCycle::new(vec![n(0), n(1)]).unwrap()]);
    }
}
