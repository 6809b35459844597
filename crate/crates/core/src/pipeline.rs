//! End-to-end run: ingest files, pre-process, resolve, and write the clean
//! graph, the removed edges and a JSON report.

use std::collections::BTreeSet;
use std::io::{Read, Write};
use std::ops::ControlFlow;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::error::Result;
use crate::graph::{
    prune_acyclic_fringe, prune_equivalent, remove_reflexive, DirectedGraph, Edge, RemovalReason,
    RemovedEdge,
};
use crate::ingest::{
    load_equivalences, EquivalenceInput, EquivalenceStats, IngestStats, SubsumptionExtractor,
};
use crate::iri::{IriTable, NodeId};
use crate::maxsat::{write_wcnf_file, MaxSatInstance};
use crate::ntriples::{open_ntriples, parse_ntriples, NTriplesReader, Triple, DEFAULT_MAX_LINE_LEN};
use crate::resolver::{
    resolve_with, IterationStat, ResolutionReport, ResolveObserver, ResolverConfig, Status,
};
use crate::{OWL_EQUIVALENT_CLASS, RDFS_SUBCLASS_OF};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone)]
pub struct IngestOptions {
    pub predicate: String,
    /// Harvest `owl:equivalentClass` from the graph inputs themselves.
    pub equiv_from_input: bool,
    /// Extra N-Triples files scanned for `owl:equivalentClass` only.
    pub equiv_files: Vec<PathBuf>,
    pub sameas: Option<PathBuf>,
    pub max_line_len: usize,
}

impl Default for IngestOptions {
    fn default() -> Self {
        IngestOptions {
            predicate: RDFS_SUBCLASS_OF.to_owned(),
            equiv_from_input: true,
            equiv_files: Vec::new(),
            sameas: None,
            max_line_len: DEFAULT_MAX_LINE_LEN,
        }
    }
}

/// Where equivalence assertions came from, for the report.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EquivalenceSource {
    pub kind: &'static str,
    pub path: String,
    pub assertions: u64,
}

#[derive(Debug, Clone)]
pub struct LoadedGraph {
    pub predicate: String,
    pub table: IriTable,
    pub graph: DirectedGraph,
    pub edge_order: Vec<Edge>,
    pub stats: IngestStats,
    pub equivalences: EquivalenceInput,
    pub equivalence_sources: Vec<EquivalenceSource>,
}

impl LoadedGraph {
    /// Reads every input in one pass, keeping `owl:equivalentClass` triples
    /// aside until the node table is complete.
    pub fn load(inputs: &[PathBuf], opts: &IngestOptions) -> Result<Self> {
        let mut readers = Vec::with_capacity(inputs.len());
        for path in inputs {
            let mut r = open_ntriples(path)?;
            r.set_max_line_len(opts.max_line_len);
            readers.push((path.display().to_string(), r));
        }
        Self::from_readers(readers, opts)
    }

    /// Like [`LoadedGraph::load`] over in-memory or already opened streams.
    pub fn from_streams<R: Read + 'static>(
        inputs: Vec<(String, R)>,
        opts: &IngestOptions,
    ) -> Result<Self> {
        let mut readers = Vec::with_capacity(inputs.len());
        for (name, stream) in inputs {
            let mut r = parse_ntriples(stream)?;
            r.set_max_line_len(opts.max_line_len);
            readers.push((name, r));
        }
        Self::from_readers(readers, opts)
    }

    fn from_readers(
        readers: Vec<(String, NTriplesReader<Box<dyn std::io::BufRead>>)>,
        opts: &IngestOptions,
    ) -> Result<Self> {
        let mut table = IriTable::new();
        let mut extractor = SubsumptionExtractor::new(&opts.predicate);
        let mut stats = IngestStats::default();
        let mut equiv: Vec<Triple> = Vec::new();
        let mut sources = Vec::new();

        for (name, mut reader) in readers {
            let before = equiv.len();
            for t in reader.by_ref() {
                let t = t?;
                if !extractor.push(&t, &mut table)
                    && opts.equiv_from_input
                    && t.predicate == OWL_EQUIVALENT_CLASS
                {
                    equiv.push(t);
                }
            }
            stats.parse.merge(&reader.stats());
            if opts.equiv_from_input {
                sources.push(EquivalenceSource {
                    kind: "input",
                    path: name,
                    assertions: (equiv.len() - before) as u64,
                });
            }
        }
        for path in &opts.equiv_files {
            let before = equiv.len();
            let mut reader = open_ntriples(path)?;
            reader.set_max_line_len(opts.max_line_len);
            for t in reader.by_ref() {
                let t = t?;
                if t.predicate == OWL_EQUIVALENT_CLASS {
                    equiv.push(t);
                }
            }
            sources.push(EquivalenceSource {
                kind: "equiv_file",
                path: path.display().to_string(),
                assertions: (equiv.len() - before) as u64,
            });
        }

        let sg = extractor.finish(&table);
        stats.extract = sg.stats;
        let equivalences = load_equivalences(equiv, opts.sameas.as_deref(), &table)?;
        if let Some(path) = &opts.sameas {
            sources.push(EquivalenceSource {
                kind: "sameas",
                path: path.display().to_string(),
                assertions: equivalences.stats.sameas_pairs,
            });
        }
        Ok(LoadedGraph {
            predicate: opts.predicate.clone(),
            table,
            graph: sg.graph,
            edge_order: sg.edge_order,
            stats,
            equivalences,
            equivalence_sources: sources,
        })
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct PreprocessStats {
    pub reflexive: usize,
    pub equivalence: usize,
    pub sameas: usize,
    /// Nodes masked as unable to lie on a cycle before the loop starts.
    pub fringe_pruned: usize,
}

/// Removes self-loops and equivalence edges, then masks the acyclic
/// fringe. Returns the removals in that order.
pub fn preprocess(g: &mut DirectedGraph, eq: &EquivalenceInput) -> (Vec<RemovedEdge>, BTreeSet<NodeId>) {
    let mut removed = remove_reflexive(g);
    removed.extend(prune_equivalent(g, eq));
    let fringe = prune_acyclic_fringe(g);
    g.set_pruned(&fringe);
    (removed, fringe)
}

#[derive(Debug, Clone)]
pub struct Outcome {
    /// Preprocessing removals first, then the loop's, in order.
    pub report: ResolutionReport,
    pub graph: DirectedGraph,
    pub preprocess: PreprocessStats,
}

pub fn run<O: ResolveObserver + ?Sized>(
    loaded: &LoadedGraph,
    cfg: &ResolverConfig,
    observer: &mut O,
) -> Result<Outcome> {
    cfg.validate()?;
    let mut graph = loaded.graph.clone();
    let (pre, fringe) = preprocess(&mut graph, &loaded.equivalences);
    let preprocess = PreprocessStats {
        reflexive: pre.iter().filter(|r| r.reason == RemovalReason::Reflexive).count(),
        equivalence: pre.iter().filter(|r| r.reason == RemovalReason::Equivalence).count(),
        sameas: pre.iter().filter(|r| r.reason == RemovalReason::SameAs).count(),
        fringe_pruned: fringe.len(),
    };
    let mut report = resolve_with(&mut graph, cfg, observer)?;
    let mut removed = pre;
    removed.append(&mut report.removed);
    report.removed = removed;
    graph.clear_pruned();
    Ok(Outcome {
        report,
        graph,
        preprocess,
    })
}

fn triple_line(table: &IriTable, predicate: &str, e: Edge) -> String {
    format!("{} <{}> {} .", table.term(e.from), predicate, table.term(e.to))
}

/// Surviving edges as N-Triples, in input order.
pub fn write_clean<W: Write>(loaded: &LoadedGraph, graph: &DirectedGraph, w: &mut W) -> std::io::Result<()> {
    for &e in &loaded.edge_order {
        if graph.has_edge(e.from, e.to) {
            writeln!(w, "{}", triple_line(&loaded.table, &loaded.predicate, e))?;
        }
    }
    Ok(())
}

/// Removed edges as N-Triples, in removal order.
pub fn write_removed<W: Write>(loaded: &LoadedGraph, removed: &[RemovedEdge], w: &mut W) -> std::io::Result<()> {
    for r in removed {
        writeln!(w, "{}", triple_line(&loaded.table, &loaded.predicate, r.edge))?;
    }
    Ok(())
}

/// `subject<TAB>object<TAB>reason<TAB>iteration`, one line per removed edge
/// in the same order as [`write_removed`]. The iteration is empty for
/// preprocessing removals.
pub fn write_reasons<W: Write>(loaded: &LoadedGraph, removed: &[RemovedEdge], w: &mut W) -> std::io::Result<()> {
    let name = |v: NodeId| loaded.table.resolve(v).unwrap_or("");
    for r in removed {
        let iteration = r.iteration.map(|i| i.to_string()).unwrap_or_default();
        writeln!(
            w,
            "{}\t{}\t{}\t{}",
            name(r.edge.from),
            name(r.edge.to),
            r.reason.as_str(),
            iteration
        )?;
    }
    Ok(())
}

#[derive(Serialize)]
struct RemovedEntry<'a> {
    subject: &'a str,
    object: &'a str,
    reason: &'static str,
    iteration: Option<usize>,
}

#[derive(Serialize)]
struct RemovalCounts {
    total: usize,
    reflexive: usize,
    equivalence: usize,
    sameas: usize,
    maxsat: usize,
    oversized_cycle_fallback: usize,
}

#[derive(Serialize)]
struct GraphSize {
    nodes: usize,
    edges: usize,
}

#[derive(Serialize)]
struct JsonReport<'a> {
    schema_version: u32,
    status: Status,
    seed: u64,
    config: &'a ResolverConfig,
    input: GraphSize,
    output: GraphSize,
    ingest: IngestStats,
    equivalence: &'a EquivalenceStats,
    equivalence_sources: &'a [EquivalenceSource],
    preprocessing: &'a PreprocessStats,
    removal_counts: RemovalCounts,
    removed: Vec<RemovedEntry<'a>>,
    iterations: &'a [IterationStat],
}

/// JSON report. Without `timings` the per-iteration wall times are zeroed,
/// so two runs with the same input and seed give identical bytes.
pub fn write_report<W: Write>(
    loaded: &LoadedGraph,
    outcome: &Outcome,
    timings: bool,
    w: &mut W,
) -> Result<()> {
    let mut report = outcome.report.clone();
    if !timings {
        report.strip_timings();
    }
    let name = |v: NodeId| loaded.table.resolve(v).unwrap_or("");
    let json = JsonReport {
        schema_version: SCHEMA_VERSION,
        status: report.status,
        seed: report.config.seed,
        config: &report.config,
        input: GraphSize {
            nodes: loaded.graph.node_count(),
            edges: loaded.graph.edge_count(),
        },
        output: GraphSize {
            nodes: outcome.graph.node_count(),
            edges: outcome.graph.edge_count(),
        },
        ingest: loaded.stats,
        equivalence: &loaded.equivalences.stats,
        equivalence_sources: &loaded.equivalence_sources,
        preprocessing: &outcome.preprocess,
        removal_counts: RemovalCounts {
            total: report.removed.len(),
            reflexive: report.count(RemovalReason::Reflexive),
            equivalence: report.count(RemovalReason::Equivalence),
            sameas: report.count(RemovalReason::SameAs),
            maxsat: report.count(RemovalReason::Maxsat),
            oversized_cycle_fallback: report.count(RemovalReason::OversizedCycleFallback),
        },
        removed: report
            .removed
            .iter()
            .map(|r| RemovedEntry {
                subject: name(r.edge.from),
                object: name(r.edge.to),
                reason: r.reason.as_str(),
                iteration: r.iteration,
            })
            .collect(),
        iterations: &report.iterations,
    };
    serde_json::to_writer_pretty(&mut *w, &json).map_err(std::io::Error::from)?;
    writeln!(w)?;
    Ok(())
}

/// Writes each iteration's MAXSAT instance to `dir/iter-NNNN.wcnf`.
pub struct WcnfDump {
    dir: PathBuf,
}

impl WcnfDump {
    pub fn new(dir: &Path) -> Result<Self> {
        std::fs::create_dir_all(dir)?;
        Ok(WcnfDump {
            dir: dir.to_path_buf(),
        })
    }

    pub fn path_for(&self, iteration: usize) -> PathBuf {
        self.dir.join(format!("iter-{iteration:04}.wcnf"))
    }
}

impl ResolveObserver for WcnfDump {
    fn on_instance(&mut self, iteration: usize, instance: &MaxSatInstance) -> Result<()> {
        write_wcnf_file(instance, &self.path_for(iteration))
    }

    fn on_iteration(&mut self, _stat: &IterationStat) -> ControlFlow<()> {
        ControlFlow::Continue(())
    }
}
