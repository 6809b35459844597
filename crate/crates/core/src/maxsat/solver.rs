//! Branch and bound for minimum-weight hitting set, which is exactly what a
//! partial MAXSAT instance with all-negative hard clauses and positive unit
//! soft clauses reduces to.
//!
//! Each search node runs unit propagation (a clause with one unassigned
//! variable left forces that variable false), bounds with a greedy packing of
//! variable-disjoint clauses, and branches on the variable occurring in most
//! open clauses, trying "remove" before "keep" and lower indices first.

use serde::Serialize;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct SolveStats {
    pub nodes: u64,
    pub greedy_cost: u64,
    pub optimum: u64,
}

#[derive(Clone, PartialEq, Eq)]
struct Bits(Vec<u64>);

impl Bits {
    fn new(n: usize) -> Self {
        Bits(vec![0; n.div_ceil(64)])
    }

    fn set(&mut self, i: usize) {
        self.0[i / 64] |= 1 << (i % 64);
    }

    fn get(&self, i: usize) -> bool {
        self.0[i / 64] >> (i % 64) & 1 == 1
    }

    fn intersects(&self, other: &Bits) -> bool {
        self.0.iter().zip(&other.0).any(|(a, b)| a & b != 0)
    }

    /// Bits of `self` not in `mask`.
    fn count_without(&self, mask: &Bits) -> u32 {
        self.0
            .iter()
            .zip(&mask.0)
            .map(|(a, m)| (a & !m).count_ones())
            .sum()
    }

    fn iter_without<'a>(&'a self, mask: &'a Bits) -> impl Iterator<Item = usize> + 'a {
        self.0.iter().zip(&mask.0).enumerate().flat_map(|(w, (a, m))| {
            let mut word = a & !m;
            std::iter::from_fn(move || {
                if word == 0 {
                    return None;
                }
                let bit = word.trailing_zeros() as usize;
                word &= word - 1;
                Some(w * 64 + bit)
            })
        })
    }
}

struct Search<'a> {
    weights: &'a [u64],
    clauses: Vec<Bits>,
    best_cost: u64,
    best: Bits,
    nodes: u64,
}

/// Returns the removal flag per variable for a minimum-weight hitting set of
/// `clauses` (0-based variable indices), plus search statistics.
pub(crate) fn min_weight_hitting_set(
    num_vars: usize,
    weights: &[u64],
    clauses: &[Vec<usize>],
) -> (Vec<bool>, SolveStats) {
    let bits: Vec<Bits> = clauses
        .iter()
        .map(|c| {
            let mut b = Bits::new(num_vars);
            for &v in c {
                b.set(v);
            }
            b
        })
        .collect();

    let greedy = greedy_cover(num_vars, weights, &bits);
    let greedy_cost = cost_of(&greedy, weights, num_vars);
    let mut search = Search {
        weights,
        clauses: bits,
        best_cost: greedy_cost,
        best: greedy,
        nodes: 0,
    };
    let active: Vec<u32> = (0..search.clauses.len() as u32).collect();
    search.branch(
        &active,
        Bits::new(num_vars),
        &Bits::new(num_vars),
        0,
    );
    let removed = (0..num_vars).map(|v| search.best.get(v)).collect();
    let stats = SolveStats {
        nodes: search.nodes,
        greedy_cost,
        optimum: search.best_cost,
    };
    (removed, stats)
}

fn cost_of(removed: &Bits, weights: &[u64], n: usize) -> u64 {
    (0..n).filter(|&v| removed.get(v)).map(|v| weights[v]).sum()
}

/// Repeatedly removes the variable hitting the most open clauses per unit of
/// weight, then drops removals that turned out redundant.
fn greedy_cover(n: usize, weights: &[u64], clauses: &[Bits]) -> Bits {
    let mut removed = Bits::new(n);
    let none = Bits::new(n);
    let mut open: Vec<usize> = (0..clauses.len()).collect();
    while !open.is_empty() {
        let mut count = vec![0u64; n];
        for &c in &open {
            for v in clauses[c].iter_without(&none) {
                count[v] += 1;
            }
        }
        // maximise count / weight, compared by cross-multiplication
        let mut pick = None::<usize>;
        for v in 0..n {
            if count[v] == 0 {
                continue;
            }
            pick = match pick {
                None => Some(v),
                Some(p) => {
                    let better = (count[v] as u128) * (weights[p].max(1) as u128)
                        > (count[p] as u128) * (weights[v].max(1) as u128);
                    Some(if better { v } else { p })
                }
            };
        }
        let Some(v) = pick else { break };
        removed.set(v);
        open.retain(|&c| !clauses[c].get(v));
    }
    for v in (0..n).rev() {
        if !removed.get(v) {
            continue;
        }
        removed.0[v / 64] &= !(1 << (v % 64));
        if !clauses.iter().all(|c| c.intersects(&removed)) {
            removed.set(v);
        }
    }
    removed
}

impl Search<'_> {
    fn branch(&mut self, active: &[u32], mut removed: Bits, kept: &Bits, mut cost: u64) {
        self.nodes += 1;

        let mut open: Vec<u32> = active.to_vec();
        loop {
            let mut forced = false;
            let mut next = Vec::with_capacity(open.len());
            for &c in &open {
                let clause = &self.clauses[c as usize];
                if clause.intersects(&removed) {
                    continue;
                }
                match clause.count_without(kept) {
                    0 => return,
                    1 => {
                        let v = clause.iter_without(kept).next().expect("one free literal");
                        removed.set(v);
                        cost += self.weights[v];
                        forced = true;
                    }
                    _ => next.push(c),
                }
            }
            open = next;
            if !forced {
                break;
            }
        }

        if cost >= self.best_cost {
            return;
        }
        if open.is_empty() {
            self.best_cost = cost;
            self.best = removed;
            return;
        }
        if cost + self.packing_bound(&open, kept) >= self.best_cost {
            return;
        }

        let v = self.branch_var(&open, kept);
        let mut with_v = removed.clone();
        with_v.set(v);
        self.branch(&open, with_v, kept, cost + self.weights[v]);

        let mut keep_v = kept.clone();
        keep_v.set(v);
        self.branch(&open, removed, &keep_v, cost);
    }

    /// Greedy packing of clauses with pairwise disjoint free variables,
    /// smallest clauses first; each needs its own cheapest removal.
    fn packing_bound(&self, open: &[u32], kept: &Bits) -> u64 {
        let mut by_size: Vec<(u32, u32)> = open
            .iter()
            .map(|&c| (self.clauses[c as usize].count_without(kept), c))
            .collect();
        by_size.sort_unstable();
        let mut used = kept.clone();
        let mut bound = 0;
        for (_, c) in by_size {
            let clause = &self.clauses[c as usize];
            if clause.count_without(&used) != clause.count_without(kept) {
                continue;
            }
            bound += clause
                .iter_without(kept)
                .map(|v| self.weights[v])
                .min()
                .unwrap_or(0);
            for (u, w) in used.0.iter_mut().zip(&clause.0) {
                *u |= w;
            }
        }
        bound
    }

    fn branch_var(&self, open: &[u32], kept: &Bits) -> usize {
        let mut count = vec![0u32; self.weights.len()];
        for &c in open {
            for v in self.clauses[c as usize].iter_without(kept) {
                count[v] += 1;
            }
        }
        let mut best = 0;
        for v in 1..count.len() {
            if count[v] > count[best] {
                best = v;
            }
        }
        best
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bitset_iteration() {
        let mut b = Bits::new(130);
        for i in [0, 63, 64, 129] {
            b.set(i);
        }
        let mut mask = Bits::new(130);
        mask.set(64);
        assert_eq!(b.iter_without(&mask).collect::<Vec<_>>(), vec![0, 63, 129]);
        assert_eq!(b.count_without(&mask), 3);
    }

    #[test]
    fn finds_two_element_cover() {
        // var 0 hits three clauses, but {1, 2} covers all five
        let clauses = vec![vec![0, 1], vec![0, 2], vec![0, 1], vec![1, 3], vec![2, 4]];
        let weights = vec![1; 5];
        let (removed, stats) = min_weight_hitting_set(5, &weights, &clauses);
        let picked: Vec<_> = (0..5).filter(|&v| removed[v]).collect();
        assert_eq!(picked, vec![1, 2]);
        assert_eq!(stats.optimum, 2);
        assert!(stats.greedy_cost >= stats.optimum);
    }

    #[test]
    fn weighted_prefers_cheap_vars() {
        let clauses = vec![vec![0, 1]];
        let (removed, _) = min_weight_hitting_set(2, &[5, 1], &clauses);
        assert_eq!(removed, vec![false, true]);
    }

    #[test]
    fn no_clauses_removes_nothing() {
        let (removed, stats) = min_weight_hitting_set(3, &[1, 1, 1], &[]);
        assert_eq!(removed, vec![false; 3]);
        assert_eq!(stats.optimum, 0);
    }
}
