use std::collections::BTreeSet;
use std::io::Write;

use flate2::write::GzEncoder;
use flate2::Compression;
use proptest::prelude::*;

use subcycle::ingest::iri_triple;
use subcycle::pipeline::{run, write_clean, IngestOptions, LoadedGraph};
use subcycle::{
    extract_subsumption_graph, is_acyclic, parse_ntriples, DirectedGraph, IriTable, NodeId,
    RemovalReason, ResolverConfig, Status, RDFS_SUBCLASS_OF,
};

fn edge_names(loaded: &LoadedGraph, g: &DirectedGraph) -> BTreeSet<(String, String)> {
    let name = |v: NodeId| loaded.table.resolve(v).unwrap().to_owned();
    g.edges().map(|e| (name(e.from), name(e.to))).collect()
}

fn text_of(edges: &[(u8, u8)]) -> String {
    edges
        .iter()
        .map(|(a, b)| format!("<http://ex.org/{a}> <{RDFS_SUBCLASS_OF}> <http://ex.org/{b}> .\n"))
        .collect()
}

fn load_text(text: String) -> LoadedGraph {
    let bytes: &'static [u8] = Box::leak(text.into_bytes().into_boxed_slice());
    LoadedGraph::from_streams(vec![("mem".into(), bytes)], &IngestOptions::default()).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn serialise_and_reparse_keeps_edges(edges in prop::collection::vec((0u8..12, 0u8..12), 0..40)) {
        let loaded = load_text(text_of(&edges));
        let mut out = Vec::new();
        write_clean(&loaded, &loaded.graph, &mut out).unwrap();
        let again = load_text(String::from_utf8(out).unwrap());
        prop_assert_eq!(edge_names(&loaded, &loaded.graph), edge_names(&again, &again.graph));
    }

    #[test]
    fn extraction_ignores_triple_order(
        edges in prop::collection::vec((0u8..10, 0u8..10), 0..30),
        seed in any::<u64>(),
    ) {
        let triples: Vec<_> = edges
            .iter()
            .map(|(a, b)| iri_triple(&format!("http://ex.org/{a}"), RDFS_SUBCLASS_OF, &format!("http://ex.org/{b}")))
            .collect();
        let mut shuffled = triples.clone();
        let mut state = seed | 1;
        for i in (1..shuffled.len()).rev() {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            shuffled.swap(i, (state % (i as u64 + 1)) as usize);
        }
        let names = |t: Vec<_>| {
            let mut table = IriTable::new();
            let sg = extract_subsumption_graph(t, RDFS_SUBCLASS_OF, &mut table);
            sg.graph
                .edges()
                .map(|e| (table.resolve(e.from).unwrap().to_owned(), table.resolve(e.to).unwrap().to_owned()))
                .collect::<BTreeSet<_>>()
        };
        prop_assert_eq!(names(triples), names(shuffled));
    }

    #[test]
    fn resolve_output_is_acyclic_subset(edges in prop::collection::vec((0u8..15, 0u8..15), 0..60), seed in 0u64..1000) {
        let loaded = load_text(text_of(&edges));
        let cfg = ResolverConfig { bound: 8, seed, ..Default::default() };
        let out = run(&loaded, &cfg, &mut ()).unwrap();
        prop_assert_eq!(out.report.status, Status::Acyclic);
        prop_assert!(is_acyclic(&out.graph).is_acyclic());
        let removed: BTreeSet<_> = out.report.removed.iter().map(|r| r.edge).collect();
        prop_assert_eq!(removed.len(), out.report.removed.len());
        for e in loaded.graph.edges() {
            prop_assert_ne!(out.graph.has_edge(e.from, e.to), removed.contains(&e));
        }
        prop_assert_eq!(out.graph.edge_count() + removed.len(), loaded.graph.edge_count());
    }
}

#[test]
fn gzipped_input_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("g.nt.gz");
    let mut enc = GzEncoder::new(Vec::new(), Compression::default());
    enc.write_all(text_of(&[(1, 2), (2, 1)]).as_bytes()).unwrap();
    std::fs::write(&path, enc.finish().unwrap()).unwrap();
    let loaded = LoadedGraph::load(&[path], &IngestOptions::default()).unwrap();
    assert_eq!(loaded.graph.edge_count(), 2);
    let out = run(&loaded, &ResolverConfig::default(), &mut ()).unwrap();
    assert_eq!(out.report.count(RemovalReason::Maxsat), 1);
}

#[test]
fn sameas_ntriples_file_and_equiv_side_file() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("g.nt");
    std::fs::write(&input, text_of(&[(1, 2), (2, 1), (3, 4), (4, 3), (5, 6), (6, 5)])).unwrap();
    let sameas = dir.path().join("ids.nt");
    std::fs::write(
        &sameas,
        "<http://ex.org/3> <http://www.w3.org/2002/07/owl#sameAs> <http://other.org/x> .\n\
         <http://other.org/x> <http://www.w3.org/2002/07/owl#sameAs> <http://ex.org/4> .\n",
    )
    .unwrap();
    let equiv = dir.path().join("equiv.nt");
    std::fs::write(
        &equiv,
        "<http://ex.org/5> <http://www.w3.org/2002/07/owl#equivalentClass> <http://ex.org/6> .\n",
    )
    .unwrap();
    let opts = IngestOptions {
        sameas: Some(sameas),
        equiv_files: vec![equiv],
        ..Default::default()
    };
    let loaded = LoadedGraph::load(&[input], &opts).unwrap();
    assert_eq!(loaded.equivalences.stats.sameas_outside_table, 2);
    let kinds: Vec<_> = loaded.equivalence_sources.iter().map(|s| (s.kind, s.assertions)).collect();
    assert_eq!(kinds, vec![("input", 0), ("equiv_file", 1), ("sameas", 2)]);

    let out = run(&loaded, &ResolverConfig::default(), &mut ()).unwrap();
    assert_eq!(out.report.count(RemovalReason::SameAs), 2);
    assert_eq!(out.report.count(RemovalReason::Equivalence), 2);
    assert_eq!(out.report.count(RemovalReason::Maxsat), 1);
    assert_eq!(out.preprocess.sameas, 2);
}

#[test]
fn malformed_lines_are_counted() {
    let text = format!("{}this is not a triple\n{}", text_of(&[(1, 2)]), text_of(&[(2, 3)]));
    let mut reader = parse_ntriples(std::io::Cursor::new(text.into_bytes())).unwrap();
    let triples: Vec<_> = reader.by_ref().collect::<Result<_, _>>().unwrap();
    assert_eq!(triples.len(), 2);
    assert_eq!(reader.stats().skipped(), 1);
}

#[test]
fn missing_input_is_an_error() {
    let err = LoadedGraph::load(&["/nonexistent/x.nt".into()], &IngestOptions::default()).unwrap_err();
    assert!(matches!(err, subcycle::Error::MissingFile(_)));
}
