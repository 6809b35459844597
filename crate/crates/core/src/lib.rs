//! Cycle resolution for RDF subsumption hierarchies.
//!
//! The pipeline reads N-Triples, extracts the `rdfs:subClassOf` (or any other
//! chosen predicate) graph, drops edges that are trivially redundant
//! (self-loops, edges between declared-equivalent classes) and then
//! repeatedly collects a bounded neighbourhood of cycles, enumerates every
//! simple cycle inside it and removes a minimum hitting set of edges computed
//! by an exact weighted partial MAXSAT solver. The loop stops once the graph
//! is acyclic or the time budget runs out; every removal made before that is
//! final, so an interrupted run still yields a usable partial result.

pub mod cycles;
pub mod error;
pub mod eval;
pub mod graph;
pub mod ingest;
pub mod iri;
pub mod maxsat;
pub mod ntriples;
pub mod pipeline;
pub mod resolver;
pub mod union_find;

pub use cycles::{enumerate_simple_cycles, induced_subgraph, EnumerationResult, SimpleCycle};
pub use error::{Error, Result};
pub use graph::{
    find_cycle, is_acyclic, prune_acyclic_fringe, prune_equivalent, remove_reflexive,
    superclasses, Acyclicity, DirectedGraph, Edge, RemovalReason, RemovedEdge,
};
pub use ingest::{extract_subsumption_graph, load_equivalences, EquivalenceInput};
pub use iri::{IriTable, NodeId};
pub use maxsat::{decode, encode, solve, Assignment, EdgeVar, MaxSatInstance};
pub use ntriples::{parse_ntriples, Term, Triple};
pub use resolver::{resolve, ResolutionReport, ResolverConfig, Status};

/// `rdfs:subClassOf`
pub const RDFS_SUBCLASS_OF: &str = "http://www.w3.org/2000/01/rdf-schema#subClassOf";
/// `rdfs:subPropertyOf`
pub const RDFS_SUBPROPERTY_OF: &str = "http://www.w3.org/2000/01/rdf-schema#subPropertyOf";
/// `owl:equivalentClass`
pub const OWL_EQUIVALENT_CLASS: &str = "http://www.w3.org/2002/07/owl#equivalentClass";
/// `owl:sameAs`
pub const OWL_SAME_AS: &str = "http://www.w3.org/2002/07/owl#sameAs";

/// Expands the `rdfs:`, `owl:` and `rdf:` prefixes; anything else is returned unchanged.
pub fn expand_prefixed(name: &str) -> String {
    const PREFIXES: [(&str, &str); 3] = [
        ("rdfs:", "http://www.w3.org/2000/01/rdf-schema#"),
        ("owl:", "http://www.w3.org/2002/07/owl#"),
        ("rdf:", "http://www.w3.org/1999/02/22-rdf-syntax-ns#"),
    ];
    for (prefix, ns) in PREFIXES {
        if let Some(local) = name.strip_prefix(prefix) {
            return format!("{ns}{local}");
        }
    }
    name.trim_start_matches('<').trim_end_matches('>').to_string()
}
