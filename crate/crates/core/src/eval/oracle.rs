//! Brute-force references for small instances. Everything here works from
//! the plain edge list and its own acyclicity test, independent of the
//! search code it is used to check.

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::graph::{DirectedGraph, Edge};
use crate::iri::NodeId;

pub const MAX_SUBSET_EDGES: usize = 20;
pub const MAX_ORDERING_NODES: usize = 10;

/// Every simple cycle as a canonical node sequence (smallest id first),
/// found by extending simple paths from each start node through larger ids.
/// Pruning masks are ignored.
pub fn brute_force_simple_cycles(g: &DirectedGraph) -> BTreeSet<Vec<NodeId>> {
    fn extend(g: &DirectedGraph, path: &mut Vec<NodeId>, out: &mut BTreeSet<Vec<NodeId>>) {
        let last = *path.last().expect("path is never empty");
        for &next in g.successors(last) {
            if next == path[0] && path.len() >= 2 {
                out.insert(path.clone());
            } else if next > path[0] && !path.contains(&next) {
                path.push(next);
                extend(g, path, out);
                path.pop();
            }
        }
    }
    let mut out = BTreeSet::new();
    for s in g.nodes() {
        extend(g, &mut vec![s], &mut out);
    }
    out
}

/// Minimum number of edges whose removal leaves `g` acyclic, plus one such
/// set. Self-loops are always part of it. Uses increasing-size subset search
/// when at most 20 non-loop edges exist, and otherwise a dynamic program over
/// node orderings when there are at most 10 nodes.
pub fn brute_force_min_removal(g: &DirectedGraph) -> Result<(usize, Vec<Edge>)> {
    let loops: Vec<Edge> = g.edges().filter(Edge::is_loop).collect();
    let edges: Vec<Edge> = g.edges().filter(|e| !e.is_loop()).collect();
    let n = g.node_count();

    let mut chosen = if edges.len() <= MAX_SUBSET_EDGES {
        subset_search(n, &edges)
    } else if n <= MAX_ORDERING_NODES {
        ordering_dp(n, &edges)
    } else {
        return Err(Error::TooLarge(format!(
            "{} edges and {} nodes (limits: {MAX_SUBSET_EDGES} edges or {MAX_ORDERING_NODES} nodes)",
            edges.len(),
            n
        )));
    };
    chosen.extend(loops);
    chosen.sort();
    Ok((chosen.len(), chosen))
}

fn subset_search(n: usize, edges: &[Edge]) -> Vec<Edge> {
    let m = edges.len();
    for k in 0..=m {
        let mut found = None;
        for_each_k_subset(m, k, |mask| {
            let kept = edges
                .iter()
                .enumerate()
                .filter(|(i, _)| mask >> i & 1 == 0)
                .map(|(_, e)| *e);
            if kahn_acyclic(n, kept) {
                found = Some(mask);
                true
            } else {
                false
            }
        });
        if let Some(mask) = found {
            return edges
                .iter()
                .enumerate()
                .filter(|(i, _)| mask >> i & 1 == 1)
                .map(|(_, e)| *e)
                .collect();
        }
    }
    unreachable!("removing every edge leaves an acyclic graph")
}

/// Calls `f` on every `k`-subset of `0..m` as a bitmask, in increasing
/// numeric order, until it returns true.
fn for_each_k_subset(m: usize, k: usize, mut f: impl FnMut(u64) -> bool) {
    if k == 0 {
        f(0);
        return;
    }
    let limit = 1u64 << m;
    let mut mask = (1u64 << k) - 1;
    while mask < limit {
        if f(mask) {
            return;
        }
        // Gosper's hack: next integer with the same popcount
        let c = mask & mask.wrapping_neg();
        let r = mask + c;
        mask = (((r ^ mask) >> 2) / c) | r;
    }
}

/// Every acyclic subgraph has a topological order and the edges pointing
/// backwards in an order form a feedback set, so the minimum over orderings
/// is the minimum feedback arc set. `best[S]` is the cheapest ordering of S.
fn ordering_dp(n: usize, edges: &[Edge]) -> Vec<Edge> {
    let mut out_mask = vec![0u32; n];
    for e in edges {
        out_mask[e.from.index()] |= 1 << e.to.index();
    }
    let full = (1usize << n) - 1;
    let mut best = vec![u32::MAX; full + 1];
    let mut last = vec![0u8; full + 1];
    best[0] = 0;
    for s in 1..=full {
        for (v, &succ) in out_mask.iter().enumerate() {
            if s >> v & 1 == 0 {
                continue;
            }
            let rest = s & !(1 << v);
            // v goes last; its edges into earlier nodes point backwards
            let cost = best[rest] + (succ & rest as u32).count_ones();
            if cost < best[s] {
                best[s] = cost;
                last[s] = v as u8;
            }
        }
    }
    let mut order = Vec::with_capacity(n);
    let mut s = full;
    while s != 0 {
        let v = last[s] as usize;
        order.push(v);
        s &= !(1 << v);
    }
    order.reverse();
    let mut position = vec![0usize; n];
    for (i, &v) in order.iter().enumerate() {
        position[v] = i;
    }
    edges
        .iter()
        .copied()
        .filter(|e| position[e.from.index()] > position[e.to.index()])
        .collect()
}

fn kahn_acyclic(n: usize, edges: impl Iterator<Item = Edge>) -> bool {
    let mut adj = vec![Vec::new(); n];
    let mut indeg = vec![0usize; n];
    for e in edges {
        adj[e.from.index()].push(e.to.index());
        indeg[e.to.index()] += 1;
    }
    let mut stack: Vec<usize> = (0..n).filter(|&v| indeg[v] == 0).collect();
    let mut seen = 0;
    while let Some(v) = stack.pop() {
        seen += 1;
        for &w in &adj[v] {
            indeg[w] -= 1;
            if indeg[w] == 0 {
                stack.push(w);
            }
        }
    }
    seen == n
}

/// True iff no directed cycle exists among `edges` over `n` nodes.
pub fn is_acyclic_reference(n: usize, edges: &[Edge]) -> bool {
    kahn_acyclic(n, edges.iter().copied())
}

/// Smallest number of elements meeting every set, by subset enumeration.
pub fn min_hitting_set(num_elements: usize, sets: &[Vec<usize>]) -> usize {
    assert!(num_elements <= 24, "enumeration limited to 24 elements");
    let masks: Vec<u32> = sets
        .iter()
        .map(|s| s.iter().fold(0u32, |m, &x| m | 1 << x))
        .collect();
    (0..=num_elements)
        .find(|&k| {
            let mut hit = false;
            for_each_k_subset(num_elements, k, |chosen| {
                hit = masks.iter().all(|&m| m & chosen as u32 != 0);
                hit
            });
            hit
        })
        .expect("all elements together hit every nonempty set")
}

/// Size of a greedily built family of pairwise disjoint sets; a lower bound
/// for any hitting set.
pub fn greedy_disjoint_packing(sets: &[Vec<usize>]) -> usize {
    let mut order: Vec<&Vec<usize>> = sets.iter().collect();
    order.sort_by_key(|s| s.len());
    let mut used = BTreeSet::new();
    let mut count = 0;
    for s in order {
        if s.iter().all(|x| !used.contains(x)) {
            used.extend(s.iter().copied());
            count += 1;
        }
    }
    count
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_cases() {
        let tri = DirectedGraph::from_edges(3, [(0, 1), (1, 2), (2, 0)]);
        assert_eq!(brute_force_min_removal(&tri).unwrap().0, 1);
        let two = DirectedGraph::from_edges(4, [(0, 1), (1, 0), (2, 3), (3, 2)]);
        assert_eq!(brute_force_min_removal(&two).unwrap().0, 2);
        let looped = DirectedGraph::from_edges(2, [(0, 0), (0, 1)]);
        assert_eq!(brute_force_min_removal(&looped).unwrap().0, 1);
    }

    #[test]
    fn ordering_dp_agrees_with_subset_search() {
        // complete digraph on 5 nodes: 20 edges, both methods apply
        let edges: Vec<(u32, u32)> = (0..5).flat_map(|a| (0..5).filter(move |&b| b != a).map(move |b| (a, b))).collect();
        let g = DirectedGraph::from_edges(5, edges);
        let all: Vec<Edge> = g.edges().collect();
        let by_subset = subset_search(5, &all);
        let by_order = ordering_dp(5, &all);
        assert_eq!(by_subset.len(), 10);
        assert_eq!(by_order.len(), 10);
        let kept: Vec<Edge> = all.iter().copied().filter(|e| !by_order.contains(e)).collect();
        assert!(is_acyclic_reference(5, &kept));
    }

    #[test]
    fn too_large_is_rejected() {
        let edges: Vec<(u32, u32)> = (0..30).map(|i| (i, i + 1)).collect();
        let g = DirectedGraph::from_edges(31, edges);
        assert!(matches!(brute_force_min_removal(&g), Err(Error::TooLarge(_))));
    }

    #[test]
    fn subset_enumeration_counts() {
        let mut count = 0;
        for_each_k_subset(6, 3, |_| {
            count += 1;
            false
        });
        assert_eq!(count, 20);
    }

    #[test]
    fn hitting_set_and_packing() {
        let sets = vec![vec![0, 1], vec![1, 2], vec![2, 3], vec![3, 0]];
        assert_eq!(min_hitting_set(4, &sets), 2);
        assert_eq!(greedy_disjoint_packing(&sets), 2);
    }
}
