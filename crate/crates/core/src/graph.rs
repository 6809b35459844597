//! Directed subsumption graph plus the pre-processing, probing and
//! verification primitives that run on it.

use std::collections::{BTreeSet, VecDeque};
use std::fmt;

use rand::{Rng, RngCore};
use serde::{Deserialize, Serialize};

use crate::cycles::SimpleCycle;
use crate::error::{Error, Result};
use crate::ingest::EquivalenceInput;
use crate::iri::NodeId;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Edge {
    pub from: NodeId,
    pub to: NodeId,
}

impl Edge {
    pub fn new(from: NodeId, to: NodeId) -> Self {
        Edge { from, to }
    }

    pub fn is_loop(&self) -> bool {
        self.from == self.to
    }
}

impl fmt::Display for Edge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}->{}", self.from, self.to)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RemovalReason {
    Reflexive,
    Equivalence,
    #[serde(rename = "sameas")]
    SameAs,
    Maxsat,
    OversizedCycleFallback,
}

impl RemovalReason {
    pub fn as_str(self) -> &'static str {
        match self {
            RemovalReason::Reflexive => "reflexive",
            RemovalReason::Equivalence => "equivalence",
            RemovalReason::SameAs => "sameas",
            RemovalReason::Maxsat => "maxsat",
            RemovalReason::OversizedCycleFallback => "oversized_cycle_fallback",
        }
    }

    /// Removals made by the iterative resolver carry an iteration index;
    /// pre-processing removals do not.
    pub fn is_iterative(self) -> bool {
        matches!(
            self,
            RemovalReason::Maxsat | RemovalReason::OversizedCycleFallback
        )
    }
}

impl fmt::Display for RemovalReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RemovedEdge {
    pub edge: Edge,
    pub reason: RemovalReason,
    pub iteration: Option<usize>,
}

impl RemovedEdge {
    pub fn preprocessing(edge: Edge, reason: RemovalReason) -> Self {
        debug_assert!(!reason.is_iterative());
        RemovedEdge {
            edge,
            reason,
            iteration: None,
        }
    }

    pub fn iterative(edge: Edge, reason: RemovalReason, iteration: usize) -> Self {
        debug_assert!(reason.is_iterative());
        RemovedEdge {
            edge,
            reason,
            iteration: Some(iteration),
        }
    }
}

/// Adjacency-set digraph over dense node ids. Successor and predecessor
/// lists are kept sorted and free of duplicates, so traversal order only
/// depends on node ids.
///
/// A node can be masked as pruned: cycle search skips it, while edge storage
/// and reachability queries still see it.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct DirectedGraph {
    out_adj: Vec<Vec<NodeId>>,
    in_adj: Vec<Vec<NodeId>>,
    edge_count: usize,
    pruned: Vec<bool>,
}

impl DirectedGraph {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_nodes(n: usize) -> Self {
        DirectedGraph {
            out_adj: vec![Vec::new(); n],
            in_adj: vec![Vec::new(); n],
            edge_count: 0,
            pruned: Vec::new(),
        }
    }

    /// Builds a graph over `n` nodes. Duplicate edges collapse.
    pub fn from_edges<I: IntoIterator<Item = (u32, u32)>>(n: usize, edges: I) -> Self {
        let mut g = Self::with_nodes(n);
        for (a, b) in edges {
            g.add_edge(NodeId(a), NodeId(b));
        }
        g
    }

    pub fn node_count(&self) -> usize {
        self.out_adj.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    pub fn nodes(&self) -> impl Iterator<Item = NodeId> {
        (0..self.node_count()).map(NodeId::from_index)
    }

    /// Grows the node range so that `node` is valid.
    pub fn ensure_node(&mut self, node: NodeId) {
        let need = node.index() + 1;
        if self.out_adj.len() < need {
            self.out_adj.resize(need, Vec::new());
            self.in_adj.resize(need, Vec::new());
            if !self.pruned.is_empty() {
                self.pruned.resize(need, false);
            }
        }
    }

    /// Inserts `from -> to`, growing the node range as needed. Returns false
    /// if the edge was already present. Any pruning mask is cleared, since a
    /// new edge can put masked nodes back on a cycle.
    pub fn add_edge(&mut self, from: NodeId, to: NodeId) -> bool {
        self.ensure_node(from);
        self.ensure_node(to);
        let succ = &mut self.out_adj[from.index()];
        let Err(pos) = succ.binary_search(&to) else {
            return false;
        };
        succ.insert(pos, to);
        let pred = &mut self.in_adj[to.index()];
        let pos = pred.binary_search(&from).unwrap_err();
        pred.insert(pos, from);
        self.edge_count += 1;
        self.pruned.clear();
        true
    }

    pub fn remove_edge(&mut self, from: NodeId, to: NodeId) -> bool {
        let Some(succ) = self.out_adj.get_mut(from.index()) else {
            return false;
        };
        let Ok(pos) = succ.binary_search(&to) else {
            return false;
        };
        succ.remove(pos);
        let pred = &mut self.in_adj[to.index()];
        let pos = pred
            .binary_search(&from)
            .expect("adjacency lists out of sync");
        pred.remove(pos);
        self.edge_count -= 1;
        true
    }

    pub fn has_edge(&self, from: NodeId, to: NodeId) -> bool {
        self.out_adj
            .get(from.index())
            .is_some_and(|s| s.binary_search(&to).is_ok())
    }

    pub fn successors(&self, node: NodeId) -> &[NodeId] {
        self.out_adj.get(node.index()).map_or(&[], Vec::as_slice)
    }

    pub fn predecessors(&self, node: NodeId) -> &[NodeId] {
        self.in_adj.get(node.index()).map_or(&[], Vec::as_slice)
    }

    pub fn out_degree(&self, node: NodeId) -> usize {
        self.successors(node).len()
    }

    pub fn in_degree(&self, node: NodeId) -> usize {
        self.predecessors(node).len()
    }

    /// All edges in (from, to) order.
    pub fn edges(&self) -> impl Iterator<Item = Edge> + '_ {
        self.out_adj.iter().enumerate().flat_map(|(u, succ)| {
            let from = NodeId::from_index(u);
            succ.iter().map(move |&to| Edge { from, to })
        })
    }

    pub fn check_node(&self, node: NodeId) -> Result<()> {
        if node.index() < self.node_count() {
            Ok(())
        } else {
            Err(Error::NodeOutOfRange {
                node,
                node_count: self.node_count(),
            })
        }
    }

    pub fn is_active(&self, node: NodeId) -> bool {
        !self.pruned.get(node.index()).copied().unwrap_or(false)
    }

    pub fn set_pruned(&mut self, pruned: &BTreeSet<NodeId>) {
        self.pruned = vec![false; self.node_count()];
        for p in pruned {
            if let Some(slot) = self.pruned.get_mut(p.index()) {
                *slot = true;
            }
        }
    }

    pub fn clear_pruned(&mut self) {
        self.pruned.clear();
    }

    pub fn pruned_count(&self) -> usize {
        self.pruned.iter().filter(|&&p| p).count()
    }

    /// Active successors of `node`, i.e. edges cycle search may follow.
    fn active_successors(&self, node: NodeId) -> impl Iterator<Item = NodeId> + '_ {
        self.successors(node)
            .iter()
            .copied()
            .filter(|&w| self.is_active(w))
    }
}

/// Removes every self-loop.
pub fn remove_reflexive(g: &mut DirectedGraph) -> Vec<RemovedEdge> {
    let loops: Vec<NodeId> = g.nodes().filter(|&v| g.has_edge(v, v)).collect();
    loops
        .into_iter()
        .map(|v| {
            g.remove_edge(v, v);
            RemovedEdge::preprocessing(Edge::new(v, v), RemovalReason::Reflexive)
        })
        .collect()
}

/// Nodes that cannot lie on any cycle: repeatedly strips nodes whose
/// remaining in-degree or out-degree is zero. The graph is not modified;
/// apply the result with [`DirectedGraph::set_pruned`].
pub fn prune_acyclic_fringe(g: &DirectedGraph) -> BTreeSet<NodeId> {
    let n = g.node_count();
    let mut indeg: Vec<usize> = g.nodes().map(|v| g.in_degree(v)).collect();
    let mut outdeg: Vec<usize> = g.nodes().map(|v| g.out_degree(v)).collect();
    let mut removed = vec![false; n];
    let mut queue: VecDeque<NodeId> = g
        .nodes()
        .filter(|v| indeg[v.index()] == 0 || outdeg[v.index()] == 0)
        .collect();
    for v in &queue {
        removed[v.index()] = true;
    }
    while let Some(v) = queue.pop_front() {
        for &w in g.successors(v) {
            indeg[w.index()] -= 1;
            if indeg[w.index()] == 0 && !removed[w.index()] {
                removed[w.index()] = true;
                queue.push_back(w);
            }
        }
        for &u in g.predecessors(v) {
            outdeg[u.index()] -= 1;
            if outdeg[u.index()] == 0 && !removed[u.index()] {
                removed[u.index()] = true;
                queue.push_back(u);
            }
        }
    }
    g.nodes().filter(|v| removed[v.index()]).collect()
}

/// Removes every edge between declared-equivalent nodes. Explicit
/// `owl:equivalentClass` pairs are checked before the sameAs partition.
pub fn prune_equivalent(g: &mut DirectedGraph, eq: &EquivalenceInput) -> Vec<RemovedEdge> {
    let doomed: Vec<RemovedEdge> = g
        .edges()
        .filter_map(|e| {
            if eq.is_explicit(e.from, e.to) {
                Some(RemovedEdge::preprocessing(e, RemovalReason::Equivalence))
            } else if eq.same_as(e.from, e.to) {
                Some(RemovedEdge::preprocessing(e, RemovalReason::SameAs))
            } else {
                None
            }
        })
        .collect();
    for r in &doomed {
        g.remove_edge(r.edge.from, r.edge.to);
    }
    doomed
}

/// Depth-first search for one cycle, starting from `sources` in order and
/// then from randomly chosen untried active nodes.
pub fn find_cycle<R: Rng>(
    g: &DirectedGraph,
    sources: Option<&[NodeId]>,
    rng: &mut R,
) -> Option<SimpleCycle> {
    CycleProbe::new(g, |_, _| true).run(sources.unwrap_or(&[]), Restart::Random(rng))
}

/// As [`find_cycle`], but ignoring the edges for which `excluded` returns
/// true. Used to probe a scratch view of the graph without copying it.
pub fn find_cycle_excluding<R, F>(
    g: &DirectedGraph,
    sources: &[NodeId],
    rng: &mut R,
    excluded: F,
) -> Option<SimpleCycle>
where
    R: Rng,
    F: Fn(NodeId, NodeId) -> bool,
{
    CycleProbe::new(g, |a, b| !excluded(a, b)).run(sources, Restart::Random(rng))
}

enum Restart<'r> {
    Ascending,
    Random(&'r mut dyn RngCore),
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Mark {
    Unseen,
    OnStack(u32),
    Done,
}

struct CycleProbe<'g, F> {
    g: &'g DirectedGraph,
    allowed: F,
    mark: Vec<Mark>,
    path: Vec<NodeId>,
}

impl<'g, F: Fn(NodeId, NodeId) -> bool> CycleProbe<'g, F> {
    fn new(g: &'g DirectedGraph, allowed: F) -> Self {
        CycleProbe {
            g,
            allowed,
            mark: vec![Mark::Unseen; g.node_count()],
            path: Vec::new(),
        }
    }

    fn run(mut self, sources: &[NodeId], restart: Restart<'_>) -> Option<SimpleCycle> {
        for &s in sources {
            if let Some(c) = self.try_root(s) {
                return Some(c);
            }
        }
        let g = self.g;
        let mut candidates: Vec<NodeId> = g
            .nodes()
            .filter(|&v| g.is_active(v) && g.out_degree(v) > 0 && self.mark[v.index()] == Mark::Unseen)
            .collect();
        match restart {
            Restart::Ascending => {
                for v in candidates {
                    if let Some(c) = self.try_root(v) {
                        return Some(c);
                    }
                }
            }
            Restart::Random(rng) => {
                while !candidates.is_empty() {
                    let v = candidates.swap_remove(rng.gen_range(0..candidates.len()));
                    if let Some(c) = self.try_root(v) {
                        return Some(c);
                    }
                }
            }
        }
        None
    }

    fn try_root(&mut self, root: NodeId) -> Option<SimpleCycle> {
        if root.index() >= self.g.node_count()
            || !self.g.is_active(root)
            || self.mark[root.index()] != Mark::Unseen
        {
            return None;
        }
        let mut frames: Vec<(NodeId, usize)> = Vec::new();
        if let Some(c) = self.enter(root) {
            return Some(c);
        }
        frames.push((root, 0));
        while let Some(frame) = frames.last_mut() {
            let (v, ref mut next) = *frame;
            let succ = self.g.successors(v);
            let mut descend = None;
            while *next < succ.len() {
                let w = succ[*next];
                *next += 1;
                if self.g.is_active(w) && self.mark[w.index()] == Mark::Unseen && (self.allowed)(v, w) {
                    descend = Some(w);
                    break;
                }
            }
            match descend {
                Some(w) => {
                    if let Some(c) = self.enter(w) {
                        return Some(c);
                    }
                    frames.push((w, 0));
                }
                None => {
                    self.mark[v.index()] = Mark::Done;
                    self.path.pop();
                    frames.pop();
                }
            }
        }
        None
    }

    /// Pushes `v` on the DFS path and checks its successors for an edge back
    /// onto the path before descending any further.
    fn enter(&mut self, v: NodeId) -> Option<SimpleCycle> {
        self.mark[v.index()] = Mark::OnStack(self.path.len() as u32);
        self.path.push(v);
        let g = self.g;
        for w in g.active_successors(v) {
            if let Mark::OnStack(pos) = self.mark[w.index()] {
                if (self.allowed)(v, w) {
                    let nodes = self.path[pos as usize..].to_vec();
                    return Some(SimpleCycle::new(nodes).expect("DFS path is simple"));
                }
            }
        }
        None
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Acyclicity {
    Acyclic,
    /// One witness cycle; may be a single self-loop node.
    Cyclic(SimpleCycle),
}

impl Acyclicity {
    pub fn is_acyclic(&self) -> bool {
        matches!(self, Acyclicity::Acyclic)
    }
}

/// Kahn's algorithm over the active nodes; on failure a witness cycle is
/// extracted by a deterministic DFS over the leftover nodes.
pub fn is_acyclic(g: &DirectedGraph) -> Acyclicity {
    match topological_order(g) {
        Ok(_) => Acyclicity::Acyclic,
        Err(remaining) => {
            let witness = CycleProbe::new(g, |_, _| true)
                .run(&remaining, Restart::Ascending)
                .expect("nodes left by Kahn's algorithm lie on or lead to a cycle");
            Acyclicity::Cyclic(witness)
        }
    }
}

/// Topological order of the active nodes, or the nodes that could not be
/// ordered (every one of them reaches a cycle).
pub fn topological_order(g: &DirectedGraph) -> std::result::Result<Vec<NodeId>, Vec<NodeId>> {
    let n = g.node_count();
    let mut indeg = vec![0usize; n];
    for v in g.nodes().filter(|&v| g.is_active(v)) {
        for w in g.active_successors(v) {
            indeg[w.index()] += 1;
        }
    }
    let mut queue: VecDeque<NodeId> = g
        .nodes()
        .filter(|&v| g.is_active(v) && indeg[v.index()] == 0)
        .collect();
    let mut order = Vec::with_capacity(n);
    while let Some(v) = queue.pop_front() {
        order.push(v);
        for w in g.active_successors(v) {
            indeg[w.index()] -= 1;
            if indeg[w.index()] == 0 {
                queue.push_back(w);
            }
        }
    }
    let active = g.nodes().filter(|&v| g.is_active(v)).count();
    if order.len() == active {
        Ok(order)
    } else {
        Err(g
            .nodes()
            .filter(|&v| g.is_active(v) && indeg[v.index()] > 0)
            .collect())
    }
}

/// Every node reachable from `start` along subsumption edges, excluding
/// `start`. Refuses cyclic graphs.
pub fn superclasses(g: &DirectedGraph, start: NodeId) -> Result<BTreeSet<NodeId>> {
    g.check_node(start)?;
    if let Acyclicity::Cyclic(c) = is_acyclic(g) {
        return Err(Error::Cyclic {
            witness: c.nodes().to_vec(),
        });
    }
    let mut seen = BTreeSet::new();
    let mut stack = vec![start];
    while let Some(v) = stack.pop() {
        for &w in g.successors(v) {
            if w != start && seen.insert(w) {
                stack.push(w);
            }
        }
    }
    Ok(seen)
}

/// Tarjan's algorithm, iterative. Components are returned with their nodes
/// sorted, in reverse topological order of the condensation. Pruned nodes
/// are skipped.
pub fn strongly_connected_components(g: &DirectedGraph) -> Vec<Vec<NodeId>> {
    const UNVISITED: u32 = u32::MAX;
    let n = g.node_count();
    let mut index = vec![UNVISITED; n];
    let mut low = vec![0u32; n];
    let mut on_stack = vec![false; n];
    let mut stack: Vec<NodeId> = Vec::new();
    let mut counter = 0u32;
    let mut out = Vec::new();

    for root in g.nodes().filter(|&v| g.is_active(v)) {
        if index[root.index()] != UNVISITED {
            continue;
        }
        let mut calls: Vec<(NodeId, usize)> = vec![(root, 0)];
        index[root.index()] = counter;
        low[root.index()] = counter;
        counter += 1;
        stack.push(root);
        on_stack[root.index()] = true;

        while let Some(&mut (v, ref mut next)) = calls.last_mut() {
            let succ = g.successors(v);
            if *next < succ.len() {
                let w = succ[*next];
                *next += 1;
                if !g.is_active(w) {
                    continue;
                }
                if index[w.index()] == UNVISITED {
                    index[w.index()] = counter;
                    low[w.index()] = counter;
                    counter += 1;
                    stack.push(w);
                    on_stack[w.index()] = true;
                    calls.push((w, 0));
                } else if on_stack[w.index()] {
                    low[v.index()] = low[v.index()].min(index[w.index()]);
                }
                continue;
            }
            calls.pop();
            if let Some(&(parent, _)) = calls.last() {
                low[parent.index()] = low[parent.index()].min(low[v.index()]);
            }
            if low[v.index()] == index[v.index()] {
                let mut comp = Vec::new();
                loop {
                    let w = stack.pop().expect("tarjan stack underflow");
                    on_stack[w.index()] = false;
                    comp.push(w);
                    if w == v {
                        break;
                    }
                }
                comp.sort_unstable();
                out.push(comp);
            }
        }
    }
    out
}
