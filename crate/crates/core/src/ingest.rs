//! Turning parsed triples into the subsumption graph and the equivalence
//! inputs used for pre-processing.

use std::collections::{BTreeSet, HashMap};
use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::Path;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{DirectedGraph, Edge};
use crate::iri::{IriTable, NodeId};
use crate::ntriples::{open_ntriples, ParseStats, Term, Triple};
use crate::union_find::UnionFind;
use crate::{OWL_EQUIVALENT_CLASS, OWL_SAME_AS};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct ExtractStats {
    /// Triples carrying the chosen predicate.
    pub matched: u64,
    pub duplicates: u64,
    pub literal_objects: u64,
}

/// Incremental builder behind [`extract_subsumption_graph`]. Keeps the
/// distinct edges in first-seen order so outputs can follow the input.
#[derive(Debug, Default)]
pub struct SubsumptionExtractor {
    predicate: String,
    graph: DirectedGraph,
    edge_order: Vec<Edge>,
    stats: ExtractStats,
}

impl SubsumptionExtractor {
    pub fn new(predicate: &str) -> Self {
        SubsumptionExtractor {
            predicate: predicate.to_owned(),
            ..Default::default()
        }
    }

    /// Returns true if the triple carried the chosen predicate.
    pub fn push(&mut self, triple: &Triple, table: &mut IriTable) -> bool {
        if triple.predicate != self.predicate {
            return false;
        }
        self.stats.matched += 1;
        let (Some(s), Some(o)) = (triple.subject.node_key(), triple.object.node_key()) else {
            self.stats.literal_objects += 1;
            return true;
        };
        let from = table.intern(&s);
        let to = table.intern(&o);
        if self.graph.add_edge(from, to) {
            self.edge_order.push(Edge::new(from, to));
        } else {
            self.stats.duplicates += 1;
        }
        true
    }

    pub fn finish(mut self, table: &IriTable) -> SubsumptionGraph {
        if !table.is_empty() {
            self.graph.ensure_node(NodeId::from_index(table.len() - 1));
        }
        SubsumptionGraph {
            graph: self.graph,
            edge_order: self.edge_order,
            stats: self.stats,
        }
    }
}

#[derive(Debug, Clone)]
pub struct SubsumptionGraph {
    pub graph: DirectedGraph,
    /// Distinct edges in the order they first appeared.
    pub edge_order: Vec<Edge>,
    pub stats: ExtractStats,
}

/// One edge per distinct `(s, predicate, o)` triple. Literal objects are
/// counted and skipped.
pub fn extract_subsumption_graph<I>(triples: I, predicate: &str, table: &mut IriTable) -> SubsumptionGraph
where
    I: IntoIterator<Item = Triple>,
{
    let mut ex = SubsumptionExtractor::new(predicate);
    for t in triples {
        ex.push(&t, table);
    }
    ex.finish(table)
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct EquivalenceStats {
    pub explicit_pairs: u64,
    pub sameas_pairs: u64,
    /// equivalentClass pairs with an endpoint outside the table.
    pub ignored_explicit: u64,
    /// sameAs pairs with an endpoint outside the table. They still take
    /// part in the closure, so they can connect two known nodes.
    pub sameas_outside_table: u64,
    pub sameas_malformed_lines: u64,
}

#[derive(Debug, Clone, Default)]
pub struct EquivalenceInput {
    /// Normalised so that the smaller id comes first.
    pub explicit_pairs: BTreeSet<(NodeId, NodeId)>,
    pub sameas: UnionFind,
    pub stats: EquivalenceStats,
}

impl EquivalenceInput {
    pub fn empty(node_count: usize) -> Self {
        EquivalenceInput {
            sameas: UnionFind::new(node_count),
            ..Default::default()
        }
    }

    pub fn is_explicit(&self, a: NodeId, b: NodeId) -> bool {
        self.explicit_pairs.contains(&(a.min(b), a.max(b)))
    }

    pub fn same_as(&self, a: NodeId, b: NodeId) -> bool {
        let n = self.sameas.len();
        a.index() < n && b.index() < n && self.sameas.same(a.index(), b.index())
    }

    pub fn add_explicit(&mut self, a: NodeId, b: NodeId) {
        self.explicit_pairs.insert((a.min(b), a.max(b)));
    }
}

/// Collects `owl:equivalentClass` pairs from `triples` and the sameAs
/// closure from `sameas_file`, both restricted to nodes already in `table`.
///
/// The sameAs file is read as N-Triples when it ends in `.nt` or `.nt.gz`,
/// otherwise as two tab-separated columns per line. In the tabular form a
/// column may hold an identity-set id instead of an IRI; all entries that
/// share a key end up in the same class.
pub fn load_equivalences<I>(triples: I, sameas_file: Option<&Path>, table: &IriTable) -> Result<EquivalenceInput>
where
    I: IntoIterator<Item = Triple>,
{
    let mut eq = EquivalenceInput::empty(table.len());
    for t in triples {
        if t.predicate != OWL_EQUIVALENT_CLASS {
            continue;
        }
        let ids = (
            t.subject.node_key().and_then(|k| table.get(&k)),
            t.object.node_key().and_then(|k| table.get(&k)),
        );
        match ids {
            (Some(a), Some(b)) => {
                eq.stats.explicit_pairs += 1;
                if a != b {
                    eq.add_explicit(a, b);
                }
            }
            _ => eq.stats.ignored_explicit += 1,
        }
    }
    if let Some(path) = sameas_file {
        load_sameas(path, table, &mut eq)?;
    }
    Ok(eq)
}

fn load_sameas(path: &Path, table: &IriTable, eq: &mut EquivalenceInput) -> Result<()> {
    if !path.exists() {
        return Err(Error::MissingFile(path.to_path_buf()));
    }
    let mut closure = SameAsClosure::new(table);
    let name = path.to_string_lossy();
    if name.ends_with(".nt") || name.ends_with(".nt.gz") {
        let mut reader = open_ntriples(path)?;
        for t in reader.by_ref() {
            let t = t?;
            if t.predicate != OWL_SAME_AS {
                continue;
            }
            if let (Some(a), Some(b)) = (t.subject.node_key(), t.object.node_key()) {
                closure.add(&a, &b, &mut eq.stats);
            }
        }
        eq.stats.sameas_malformed_lines += reader.stats().skipped();
    } else {
        let reader = BufReader::new(File::open(path)?);
        for line in reader.lines() {
            let line = line?;
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut cols = line.split('\t');
            match (cols.next(), cols.next()) {
                (Some(a), Some(b)) => closure.add(strip_brackets(a), strip_brackets(b), &mut eq.stats),
                _ => eq.stats.sameas_malformed_lines += 1,
            }
        }
    }
    eq.sameas = closure.finish();
    Ok(())
}

fn strip_brackets(s: &str) -> &str {
    let s = s.trim();
    s.strip_prefix('<')
        .and_then(|r| r.strip_suffix('>'))
        .unwrap_or(s)
}

/// Union-find over the table's nodes plus any foreign keys seen in the pair
/// file; foreign keys are appended after the table range and dropped at the end.
struct SameAsClosure<'t> {
    table: &'t IriTable,
    uf: UnionFind,
    foreign: HashMap<String, usize>,
}

impl<'t> SameAsClosure<'t> {
    fn new(table: &'t IriTable) -> Self {
        SameAsClosure {
            table,
            uf: UnionFind::new(table.len()),
            foreign: HashMap::new(),
        }
    }

    fn key(&mut self, name: &str) -> (usize, bool) {
        if let Some(id) = self.table.get(name) {
            return (id.index(), true);
        }
        if let Some(&k) = self.foreign.get(name) {
            return (k, false);
        }
        let k = self.uf.push();
        self.foreign.insert(name.to_owned(), k);
        (k, false)
    }

    fn add(&mut self, a: &str, b: &str, stats: &mut EquivalenceStats) {
        let (ka, known_a) = self.key(a);
        let (kb, known_b) = self.key(b);
        stats.sameas_pairs += 1;
        if !(known_a && known_b) {
            stats.sameas_outside_table += 1;
        }
        self.uf.union(ka, kb);
    }

    fn finish(self) -> UnionFind {
        self.uf.restrict(self.table.len())
    }
}

/// Convenience for literal-free test data: a triple of three IRIs.
pub fn iri_triple(s: &str, p: &str, o: &str) -> Triple {
    Triple {
        subject: Term::Iri(s.to_owned()),
        predicate: p.to_owned(),
        object: Term::Iri(o.to_owned()),
    }
}

/// Merged statistics for a whole ingestion run.
#[derive(Debug, Clone, Copy, Default, Serialize)]
pub struct IngestStats {
    pub parse: ParseStats,
    pub extract: ExtractStats,
}
