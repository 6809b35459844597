//! Weighted partial MAXSAT encoding of cycle breaking.
//!
//! Every edge that occurs in some cycle gets a propositional variable that is
//! true while the edge is kept. Each cycle contributes one hard clause, the
//! disjunction of its negated edge variables, and each variable one unit soft
//! clause. An optimal assignment therefore keeps as many edges as possible
//! while breaking every listed cycle.

mod solver;
mod wcnf;

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use crate::cycles::SimpleCycle;
use crate::error::{Error, Result};
use crate::graph::Edge;

pub use solver::SolveStats;
pub use wcnf::{export_wcnf, import_wcnf, write_wcnf_file};

/// Weight given to every edge-keeping soft clause.
pub const UNIT_WEIGHT: u64 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct EdgeVar {
    /// DIMACS variable index, counted from 1.
    pub id: u32,
    /// `None` for instances read back from WCNF, which carries no edge data.
    pub edge: Option<Edge>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct SoftClause {
    pub lit: i32,
    pub weight: u64,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct MaxSatInstance {
    pub vars: Vec<EdgeVar>,
    /// DIMACS literals; for cycle encodings every literal is negative.
    pub hard: Vec<Vec<i32>>,
    pub soft: Vec<SoftClause>,
}

impl MaxSatInstance {
    pub fn num_vars(&self) -> usize {
        self.vars.len()
    }

    pub fn num_clauses(&self) -> usize {
        self.hard.len() + self.soft.len()
    }

    /// Weight marking hard clauses in WCNF: one more than all soft weight.
    pub fn top(&self) -> u64 {
        self.soft.iter().map(|s| s.weight).sum::<u64>() + 1
    }

    /// Sorted `(weight, literals)` pairs with hard clauses weighted `top`;
    /// two instances with equal multisets are the same formula.
    pub fn clause_multiset(&self) -> Vec<(u64, Vec<i32>)> {
        let top = self.top();
        let mut all: Vec<(u64, Vec<i32>)> = self
            .hard
            .iter()
            .map(|c| (top, c.clone()))
            .chain(self.soft.iter().map(|s| (s.weight, vec![s.lit])))
            .collect();
        all.sort();
        all
    }

    /// Checks the shape the solver relies on: all-negative non-empty hard
    /// clauses, positive unit soft clauses, at most one soft clause per var.
    pub fn validate(&self) -> Result<()> {
        let n = self.vars.len() as i64;
        for (i, v) in self.vars.iter().enumerate() {
            if v.id as usize != i + 1 {
                return Err(Error::InvalidConfig(format!(
                    "variable ids must be contiguous from 1 (found {} at position {i})",
                    v.id
                )));
            }
        }
        for c in &self.hard {
            if c.is_empty() {
                return Err(Error::Unsatisfiable);
            }
            for &lit in c {
                if lit >= 0 || -(lit as i64) > n {
                    return Err(Error::InvalidConfig(format!(
                        "hard literal {lit} is not a negated variable of this instance"
                    )));
                }
            }
        }
        let mut seen = BTreeSet::new();
        for s in &self.soft {
            if s.lit <= 0 || s.lit as i64 > n {
                return Err(Error::InvalidConfig(format!(
                    "soft literal {} is not a positive variable of this instance",
                    s.lit
                )));
            }
            if !seen.insert(s.lit) {
                return Err(Error::InvalidConfig(format!(
                    "variable {} has more than one soft clause",
                    s.lit
                )));
            }
        }
        Ok(())
    }

    /// Soft weight per variable, indexed from 0.
    fn weights(&self) -> Vec<u64> {
        let mut w = vec![0; self.vars.len()];
        for s in &self.soft {
            w[s.lit as usize - 1] = s.weight;
        }
        w
    }

    /// Reattaches edges to an instance read from WCNF, `edges[i]` belonging
    /// to variable `i + 1`.
    pub fn attach_edges(&mut self, edges: &[Edge]) -> Result<()> {
        if edges.len() != self.vars.len() {
            return Err(Error::InvalidConfig(format!(
                "{} edges given for {} variables",
                edges.len(),
                self.vars.len()
            )));
        }
        for (v, &e) in self.vars.iter_mut().zip(edges) {
            v.edge = Some(e);
        }
        Ok(())
    }
}

/// Truth value per variable; `true` keeps the edge.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Assignment {
    values: Vec<bool>,
}

impl Assignment {
    pub fn all_true(num_vars: usize) -> Self {
        Assignment {
            values: vec![true; num_vars],
        }
    }

    pub fn from_values(values: Vec<bool>) -> Self {
        Assignment { values }
    }

    /// Value of the 1-based variable `var`.
    pub fn value(&self, var: u32) -> bool {
        self.values[var as usize - 1]
    }

    pub fn values(&self) -> &[bool] {
        &self.values
    }

    /// 1-based indices of the variables set to false.
    pub fn removed_vars(&self) -> Vec<u32> {
        self.values
            .iter()
            .enumerate()
            .filter(|(_, &v)| !v)
            .map(|(i, _)| i as u32 + 1)
            .collect()
    }

    /// Total weight of the falsified soft clauses.
    pub fn cost(&self, inst: &MaxSatInstance) -> u64 {
        inst.soft
            .iter()
            .filter(|s| !self.value(s.lit as u32))
            .map(|s| s.weight)
            .sum()
    }

    pub fn satisfies_hard(&self, inst: &MaxSatInstance) -> bool {
        inst.hard.iter().all(|c| {
            c.iter().any(|&lit| {
                let v = self.value(lit.unsigned_abs());
                if lit > 0 {
                    v
                } else {
                    !v
                }
            })
        })
    }
}

/// Encodes each distinct cycle as a hard clause over its edge variables.
/// Variables are numbered by ascending edge order; literals inside a clause
/// follow the cycle's own edge order.
pub fn encode(cycles: &[SimpleCycle]) -> Result<MaxSatInstance> {
    let distinct: BTreeSet<&SimpleCycle> = cycles.iter().collect();
    if let Some(c) = distinct.iter().find(|c| c.len() < 2) {
        return Err(Error::SelfLoop(c.nodes()[0]));
    }
    let edges: BTreeSet<Edge> = distinct.iter().flat_map(|c| c.edges()).collect();
    let index: BTreeMap<Edge, i32> = edges
        .iter()
        .enumerate()
        .map(|(i, &e)| (e, i as i32 + 1))
        .collect();
    // keep the caller's cycle order, skipping repeats
    let mut emitted = BTreeSet::new();
    let hard = cycles
        .iter()
        .filter(|c| emitted.insert(*c))
        .map(|c| c.edges().map(|e| -index[&e]).collect())
        .collect();
    let vars = edges
        .iter()
        .enumerate()
        .map(|(i, &e)| EdgeVar {
            id: i as u32 + 1,
            edge: Some(e),
        })
        .collect();
    let soft = (1..=edges.len() as i32)
        .map(|lit| SoftClause {
            lit,
            weight: UNIT_WEIGHT,
        })
        .collect();
    Ok(MaxSatInstance { vars, hard, soft })
}

/// Exact optimum: a minimum-weight set of variables to falsify such that
/// every hard clause is satisfied.
pub fn solve(inst: &MaxSatInstance) -> Result<Assignment> {
    solve_with_stats(inst).map(|(a, _)| a)
}

pub fn solve_with_stats(inst: &MaxSatInstance) -> Result<(Assignment, SolveStats)> {
    inst.validate()?;
    let clauses: Vec<Vec<usize>> = inst
        .hard
        .iter()
        .map(|c| c.iter().map(|&lit| lit.unsigned_abs() as usize - 1).collect())
        .collect();
    let (removed, stats) = solver::min_weight_hitting_set(inst.num_vars(), &inst.weights(), &clauses);
    let a = Assignment::from_values(removed.into_iter().map(|r| !r).collect());
    if !a.satisfies_hard(inst) {
        return Err(Error::Unsatisfiable);
    }
    Ok((a, stats))
}

/// Edges whose variables are false.
pub fn decode(inst: &MaxSatInstance, a: &Assignment) -> Vec<Edge> {
    inst.vars
        .iter()
        .filter(|v| !a.value(v.id))
        .filter_map(|v| v.edge)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::iri::NodeId;

    fn cycle(nodes: &[u32]) -> SimpleCycle {
        SimpleCycle::new(nodes.iter().map(|&i| NodeId(i)).collect()).unwrap()
    }

    #[test]
    fn two_cycle_encoding() {
        let inst = encode(&[cycle(&[0, 1])]).unwrap();
        assert_eq!(inst.num_vars(), 2);
        assert_eq!(inst.hard, vec![vec![-1, -2]]);
        assert_eq!(inst.soft.len(), 2);
        assert!(inst.soft.iter().all(|s| s.weight == 1));
    }

    #[test]
    fn duplicate_cycles_give_one_clause() {
        let inst = encode(&[cycle(&[0, 1, 2]), cycle(&[1, 2, 0])]).unwrap();
        assert_eq!(inst.hard.len(), 1);
    }

    #[test]
    fn self_loop_cycles_are_rejected() {
        assert!(encode(&[cycle(&[3])]).is_err());
    }

    #[test]
    fn triangle_costs_one_and_drops_lowest_var() {
        let inst = encode(&[cycle(&[0, 1, 2])]).unwrap();
        let a = solve(&inst).unwrap();
        assert_eq!(a.cost(&inst), 1);
        assert_eq!(a.removed_vars(), vec![1]);
        assert_eq!(decode(&inst, &a).len(), 1);
    }

    #[test]
    fn disjoint_two_cycles_cost_two() {
        let inst = encode(&[cycle(&[0, 1]), cycle(&[2, 3])]).unwrap();
        assert_eq!(solve(&inst).unwrap().cost(&inst), 2);
    }

    #[test]
    fn empty_instance_keeps_everything() {
        let inst = encode(&[]).unwrap();
        let a = solve(&inst).unwrap();
        assert!(decode(&inst, &a).is_empty());
        let a = Assignment::all_true(0);
        assert!(a.satisfies_hard(&inst));
    }

    #[test]
    fn invalid_shapes_are_rejected() {
        let mut inst = encode(&[cycle(&[0, 1])]).unwrap();
        inst.hard.push(vec![]);
        assert!(matches!(solve(&inst), Err(Error::Unsatisfiable)));
        let mut inst = encode(&[cycle(&[0, 1])]).unwrap();
        inst.hard.push(vec![1]);
        assert!(inst.validate().is_err());
    }
}
