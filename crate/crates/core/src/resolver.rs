//! The anytime resolution loop: collect a bounded neighbourhood of cycles,
//! enumerate every simple cycle inside it, remove a minimum hitting set of
//! edges, and repeat until the graph is acyclic or time runs out.

use std::collections::{BTreeSet, HashSet};
use std::ops::ControlFlow;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::cycles::{enumerate_simple_cycles, induced_subgraph, DEFAULT_CYCLE_CAP};
use crate::error::{Error, Result};
use crate::graph::{
    find_cycle_excluding, is_acyclic, strongly_connected_components, DirectedGraph, Edge,
    RemovalReason, RemovedEdge,
};
use crate::iri::NodeId;
use crate::maxsat::{decode, encode, solve_with_stats, MaxSatInstance};
use crate::RDFS_SUBCLASS_OF;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResolverConfig {
    /// Soft bound on neighbourhood size, in nodes.
    pub bound: usize,
    /// Cycles to collect per neighbourhood before the bound may stop it.
    pub min_cycles: usize,
    pub cycle_cap: usize,
    #[serde(with = "duration_secs")]
    pub timeout: Duration,
    pub seed: u64,
    pub predicate: String,
}

impl Default for ResolverConfig {
    fn default() -> Self {
        ResolverConfig {
            bound: 60,
            min_cycles: 3,
            cycle_cap: DEFAULT_CYCLE_CAP,
            timeout: Duration::from_secs(7200),
            seed: 0,
            predicate: RDFS_SUBCLASS_OF.to_owned(),
        }
    }
}

impl ResolverConfig {
    pub fn validate(&self) -> Result<()> {
        if self.bound < 2 {
            return Err(Error::InvalidConfig("bound must be at least 2".into()));
        }
        if self.min_cycles < 1 {
            return Err(Error::InvalidConfig("min_cycles must be at least 1".into()));
        }
        if self.cycle_cap < self.min_cycles {
            return Err(Error::InvalidConfig(
                "cycle_cap must be at least min_cycles".into(),
            ));
        }
        Ok(())
    }
}

mod duration_secs {
    use serde::{Deserialize, Deserializer, Serializer};
    use std::time::Duration;

    pub fn serialize<S: Serializer>(d: &Duration, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_f64(d.as_secs_f64())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Duration, D::Error> {
        let secs = f64::deserialize(d)?;
        Duration::try_from_secs_f64(secs).map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Acyclic,
    Timeout,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct IterationStat {
    pub iteration: usize,
    pub neighborhood_size: usize,
    /// Cycle probes used to build the neighbourhood.
    pub probes: usize,
    pub cycles: usize,
    pub truncated: bool,
    pub edges_removed: usize,
    /// `None` on fallback iterations.
    pub solver_cost: Option<u64>,
    pub solver_nodes: u64,
    pub fallback: bool,
    pub wall_us: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResolutionReport {
    pub config: ResolverConfig,
    pub removed: Vec<RemovedEdge>,
    pub iterations: Vec<IterationStat>,
    pub status: Status,
}

impl ResolutionReport {
    pub fn count(&self, reason: RemovalReason) -> usize {
        self.removed.iter().filter(|r| r.reason == reason).count()
    }

    /// Removals made by the loop itself (MAXSAT and fallback).
    pub fn iterative_removals(&self) -> usize {
        self.removed.iter().filter(|r| r.reason.is_iterative()).count()
    }

    /// Zeroes wall-clock fields so that reports of identical runs compare equal.
    pub fn strip_timings(&mut self) {
        for it in &mut self.iterations {
            it.wall_us = 0;
        }
    }
}

/// Hooks into the loop. `on_iteration` may stop it early; the run then
/// ends with [`Status::Timeout`] unless the graph is already acyclic.
pub trait ResolveObserver {
    fn on_instance(&mut self, _iteration: usize, _instance: &MaxSatInstance) -> Result<()> {
        Ok(())
    }

    fn on_iteration(&mut self, _stat: &IterationStat) -> ControlFlow<()> {
        ControlFlow::Continue(())
    }
}

impl ResolveObserver for () {}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Neighborhood {
    pub nodes: BTreeSet<NodeId>,
    pub probes: usize,
    /// The scratch view ran out of cycles before the bound was reached.
    pub exhausted: bool,
}

/// Gathers the node set of one iteration by probing a scratch view of `g`:
/// each probe finds a cycle, adds its nodes and hides one random edge of it
/// so the next probe finds a different cycle. Probing stops once the set has
/// reached `bound` nodes and at least `min_cycles` cycles were seen, or when
/// the scratch view is acyclic. `g` itself is never modified.
///
/// When the scratch view runs dry below the bound, the set is topped up with
/// whole strongly connected components of `g` that it touches, as long as
/// each fits under the bound.
pub fn collect_neighborhood<R: Rng>(
    g: &DirectedGraph,
    cfg: &ResolverConfig,
    rng: &mut R,
    sources: &[NodeId],
) -> Result<Neighborhood> {
    let mut hidden: HashSet<Edge> = HashSet::new();
    let mut nodes = BTreeSet::new();
    let mut probes = 0;
    let mut exhausted = false;

    while nodes.len() < cfg.bound || probes < cfg.min_cycles {
        let probe_sources: Vec<NodeId> = if nodes.is_empty() {
            sources.to_vec()
        } else {
            nodes.iter().copied().collect()
        };
        let found = find_cycle_excluding(g, &probe_sources, rng, |a, b| {
            hidden.contains(&Edge::new(a, b))
        });
        let Some(cycle) = found else {
            exhausted = true;
            break;
        };
        probes += 1;
        nodes.extend(cycle.nodes().iter().copied());
        let cut = cycle
            .edges()
            .nth(rng.gen_range(0..cycle.len()))
            .expect("cycle has edges");
        hidden.insert(cut);
    }
    if probes == 0 {
        return Err(Error::NoCycle);
    }

    if exhausted && nodes.len() < cfg.bound {
        for comp in strongly_connected_components(g) {
            if comp.len() < 2 || !comp.iter().any(|v| nodes.contains(v)) {
                continue;
            }
            let extra = comp.iter().filter(|v| !nodes.contains(v)).count();
            if nodes.len() + extra <= cfg.bound {
                nodes.extend(comp);
            }
        }
    }

    Ok(Neighborhood {
        nodes,
        probes,
        exhausted,
    })
}

/// One pass of the loop body; removals are applied to `g`.
pub fn resolve_step<R: Rng, O: ResolveObserver + ?Sized>(
    g: &mut DirectedGraph,
    cfg: &ResolverConfig,
    rng: &mut R,
    iteration: usize,
    sources: &mut Vec<NodeId>,
    observer: &mut O,
) -> Result<(IterationStat, Vec<RemovedEdge>)> {
    let started = Instant::now();
    let hood = collect_neighborhood(g, cfg, rng, sources)?;
    let sub = induced_subgraph(g, &hood.nodes);
    let found = enumerate_simple_cycles(&sub, cfg.cycle_cap)?;
    if found.cycles.is_empty() {
        // the first probe's cycle always lies inside the neighbourhood
        return Err(Error::NoCycle);
    }

    let oversized = found.cycles.len() == 1 && found.cycles[0].len() > cfg.bound;
    let (removed, solver_cost, solver_nodes) = if oversized {
        let cycle = &found.cycles[0];
        let edge = cycle
            .edges()
            .nth(rng.gen_range(0..cycle.len()))
            .expect("cycle has edges");
        let r = RemovedEdge::iterative(edge, RemovalReason::OversizedCycleFallback, iteration);
        (vec![r], None, 0)
    } else {
        let inst = encode(&found.cycles)?;
        observer.on_instance(iteration, &inst)?;
        let (assignment, stats) = solve_with_stats(&inst)?;
        let removed: Vec<RemovedEdge> = decode(&inst, &assignment)
            .into_iter()
            .map(|e| RemovedEdge::iterative(e, RemovalReason::Maxsat, iteration))
            .collect();
        (removed, Some(stats.optimum), stats.nodes)
    };
    for r in &removed {
        g.remove_edge(r.edge.from, r.edge.to);
    }

    *sources = hood
        .nodes
        .iter()
        .copied()
        .filter(|&v| g.out_degree(v) > 0 && g.in_degree(v) > 0)
        .collect();

    let stat = IterationStat {
        iteration,
        neighborhood_size: hood.nodes.len(),
        probes: hood.probes,
        cycles: found.cycles.len(),
        truncated: found.truncated,
        edges_removed: removed.len(),
        solver_cost,
        solver_nodes,
        fallback: oversized,
        wall_us: started.elapsed().as_micros() as u64,
    };
    Ok((stat, removed))
}

/// Runs the loop with default hooks.
pub fn resolve(g: &mut DirectedGraph, cfg: &ResolverConfig) -> Result<ResolutionReport> {
    resolve_with(g, cfg, &mut ())
}

/// Runs the loop until `g` is acyclic, the timeout expires, or the observer
/// asks to stop. The timeout is checked between iterations only, and every
/// removal recorded in the report has been applied to `g`.
pub fn resolve_with<O: ResolveObserver + ?Sized>(
    g: &mut DirectedGraph,
    cfg: &ResolverConfig,
    observer: &mut O,
) -> Result<ResolutionReport> {
    cfg.validate()?;
    let started = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut sources = Vec::new();
    let mut report = ResolutionReport {
        config: cfg.clone(),
        removed: Vec::new(),
        iterations: Vec::new(),
        status: Status::Timeout,
    };

    report.status = loop {
        if is_acyclic(g).is_acyclic() {
            break Status::Acyclic;
        }
        if started.elapsed() >= cfg.timeout {
            break Status::Timeout;
        }
        let iteration = report.iterations.len() + 1;
        let (stat, removed) = resolve_step(g, cfg, &mut rng, iteration, &mut sources, observer)?;
        report.removed.extend(removed);
        let flow = observer.on_iteration(&stat);
        report.iterations.push(stat);
        if flow.is_break() {
            break if is_acyclic(g).is_acyclic() {
                Status::Acyclic
            } else {
                Status::Timeout
            };
        }
    };
    Ok(report)
}
