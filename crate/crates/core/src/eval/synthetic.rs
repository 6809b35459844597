use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::DirectedGraph;
use crate::iri::NodeId;

/// Parameters of a random cyclic taxonomy: a random DAG with directed
/// cycles planted on top. With probability `nesting` a new cycle runs along
/// a stretch of an earlier one, so cycles end up sharing paths.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SyntheticSpec {
    pub nodes: usize,
    pub dag_edge_prob: f64,
    pub planted_cycles: usize,
    pub min_cycle_len: usize,
    pub max_cycle_len: usize,
    pub nesting: f64,
    pub seed: u64,
}

impl SyntheticSpec {
    /// The desk-scale stand-in for a large crawled taxonomy: 600 nodes,
    /// 80 nested cycles.
    pub fn nested_benchmark(seed: u64) -> Self {
        SyntheticSpec {
            nodes: 600,
            dag_edge_prob: 0.004,
            planted_cycles: 80,
            min_cycle_len: 2,
            max_cycle_len: 8,
            nesting: 0.8,
            seed,
        }
    }

    fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InfeasibleSpec(m));
        if !(0.0..=1.0).contains(&self.dag_edge_prob) || !(0.0..=1.0).contains(&self.nesting) {
            return bad("probabilities must lie in [0, 1]".into());
        }
        if self.planted_cycles > 0 {
            if self.min_cycle_len < 2 || self.max_cycle_len < self.min_cycle_len {
                return bad(format!(
                    "cycle lengths must satisfy 2 <= min <= max (got {}..={})",
                    self.min_cycle_len, self.max_cycle_len
                ));
            }
            if self.max_cycle_len > self.nodes {
                return bad(format!(
                    "cycle length {} exceeds node count {}",
                    self.max_cycle_len, self.nodes
                ));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct SyntheticGraph {
    pub graph: DirectedGraph,
    /// Node sequence of each planted cycle, in planting order.
    pub planted: Vec<Vec<NodeId>>,
}

pub fn generate(spec: &SyntheticSpec) -> Result<SyntheticGraph> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let n = spec.nodes;
    let mut graph = DirectedGraph::with_nodes(n);

    // rank order: edges only run from lower to higher rank
    let mut order: Vec<u32> = (0..n as u32).collect();
    order.shuffle(&mut rng);
    if spec.dag_edge_prob > 0.0 {
        for i in 0..n {
            for j in i + 1..n {
                if rng.gen_bool(spec.dag_edge_prob) {
                    graph.add_edge(NodeId(order[i]), NodeId(order[j]));
                }
            }
        }
    }

    let mut planted: Vec<Vec<NodeId>> = Vec::with_capacity(spec.planted_cycles);
    for _ in 0..spec.planted_cycles {
        let len = rng.gen_range(spec.min_cycle_len..=spec.max_cycle_len);
        let mut cycle: Vec<NodeId> = Vec::with_capacity(len);
        if !planted.is_empty() && rng.gen_bool(spec.nesting) {
            let host = &planted[rng.gen_range(0..planted.len())];
            let shared = rng.gen_range(1..=host.len().min(len - 1));
            let start = rng.gen_range(0..host.len());
            cycle.extend((0..shared).map(|k| host[(start + k) % host.len()]));
        }
        let used: BTreeSet<NodeId> = cycle.iter().copied().collect();
        let mut fresh: Vec<NodeId> = (0..n as u32).map(NodeId).filter(|v| !used.contains(v)).collect();
        let need = len - cycle.len();
        let (picked, _) = fresh.partial_shuffle(&mut rng, need);
        cycle.extend_from_slice(picked);
        for k in 0..cycle.len() {
            graph.add_edge(cycle[k], cycle[(k + 1) % cycle.len()]);
        }
        planted.push(cycle);
    }
    Ok(SyntheticGraph { graph, planted })
}
