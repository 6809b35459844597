//! Python bindings: the graph type, cycle enumeration, the resolution loop,
//! the brute-force oracle, WCNF conversion and the file pipeline.

use std::path::PathBuf;
use std::time::Duration;

use pyo3::exceptions::{PyIOError, PyValueError};
use pyo3::prelude::*;

use subcycle::eval::oracle;
use subcycle::eval::{generate, SyntheticSpec};
use subcycle::graph::{self, Acyclicity};
use subcycle::maxsat::{self, export_wcnf, import_wcnf};
use subcycle::pipeline::{self, IngestOptions, LoadedGraph};
use subcycle::{DirectedGraph, Error, NodeId, ResolverConfig, SimpleCycle, Status};

fn py_err(e: Error) -> PyErr {
    match e {
        Error::Io(e) => PyIOError::new_err(e.to_string()),
        Error::MissingFile(p) => PyIOError::new_err(format!("no such file: {}", p.display())),
        other => PyValueError::new_err(other.to_string()),
    }
}

fn status_str(s: Status) -> &'static str {
    match s {
        Status::Acyclic => "acyclic",
        Status::Timeout => "timeout",
    }
}

fn to_cycles(cycles: Vec<Vec<u32>>) -> PyResult<Vec<SimpleCycle>> {
    cycles
        .into_iter()
        .map(|c| SimpleCycle::new(c.into_iter().map(NodeId).collect()).map_err(py_err))
        .collect()
}

/// Directed graph over integer node ids `0..node_count`.
#[pyclass(name = "Graph", module = "subcycle", skip_from_py_object)]
#[derive(Clone)]
struct PyGraph {
    inner: DirectedGraph,
}

#[pymethods]
impl PyGraph {
    #[new]
    #[pyo3(signature = (node_count = 0, edges = Vec::new()))]
    fn new(node_count: usize, edges: Vec<(u32, u32)>) -> Self {
        PyGraph {
            inner: DirectedGraph::from_edges(node_count, edges),
        }
    }

    #[getter]
    fn node_count(&self) -> usize {
        self.inner.node_count()
    }

    #[getter]
    fn edge_count(&self) -> usize {
        self.inner.edge_count()
    }

    fn add_edge(&mut self, a: u32, b: u32) -> bool {
        self.inner.add_edge(NodeId(a), NodeId(b))
    }

    fn remove_edge(&mut self, a: u32, b: u32) -> bool {
        self.inner.remove_edge(NodeId(a), NodeId(b))
    }

    fn has_edge(&self, a: u32, b: u32) -> bool {
        self.inner.has_edge(NodeId(a), NodeId(b))
    }

    fn edges(&self) -> Vec<(u32, u32)> {
        self.inner.edges().map(|e| (e.from.0, e.to.0)).collect()
    }

    fn is_acyclic(&self) -> bool {
        graph::is_acyclic(&self.inner).is_acyclic()
    }

    /// One cycle as a node list, or None when the graph is acyclic.
    fn witness_cycle(&self) -> Option<Vec<u32>> {
        match graph::is_acyclic(&self.inner) {
            Acyclicity::Acyclic => None,
            Acyclicity::Cyclic(c) => Some(c.nodes().iter().map(|v| v.0).collect()),
        }
    }

    fn topological_order(&self) -> Option<Vec<u32>> {
        graph::topological_order(&self.inner)
            .ok()
            .map(|o| o.into_iter().map(|v| v.0).collect())
    }

    fn superclasses(&self, node: u32) -> PyResult<Vec<u32>> {
        self.inner.check_node(NodeId(node)).map_err(py_err)?;
        let s = graph::superclasses(&self.inner, NodeId(node)).map_err(py_err)?;
        Ok(s.into_iter().map(|v| v.0).collect())
    }

    /// Removes self-loops and returns them.
    fn remove_reflexive(&mut self) -> Vec<(u32, u32)> {
        graph::remove_reflexive(&mut self.inner)
            .into_iter()
            .map(|r| (r.edge.from.0, r.edge.to.0))
            .collect()
    }

    /// Nodes that cannot lie on any cycle.
    fn acyclic_fringe(&self) -> Vec<u32> {
        graph::prune_acyclic_fringe(&self.inner)
            .into_iter()
            .map(|v| v.0)
            .collect()
    }

    fn strongly_connected_components(&self) -> Vec<Vec<u32>> {
        graph::strongly_connected_components(&self.inner)
            .into_iter()
            .map(|c| c.into_iter().map(|v| v.0).collect())
            .collect()
    }

    /// Every simple cycle, smallest node first, plus a truncation flag.
    #[pyo3(signature = (cap = 1_000_000))]
    fn simple_cycles(&self, cap: usize) -> PyResult<(Vec<Vec<u32>>, bool)> {
        let r = subcycle::enumerate_simple_cycles(&self.inner, cap).map_err(py_err)?;
        let cycles = r
            .cycles
            .iter()
            .map(|c| c.nodes().iter().map(|v| v.0).collect())
            .collect();
        Ok((cycles, r.truncated))
    }

    /// Runs the resolution loop in place.
    #[pyo3(signature = (bound = 60, min_cycles = 3, cycle_cap = 1_000_000, timeout = 7200.0, seed = 0))]
    fn resolve(
        &mut self,
        py: Python<'_>,
        bound: usize,
        min_cycles: usize,
        cycle_cap: usize,
        timeout: f64,
        seed: u64,
    ) -> PyResult<Report> {
        let cfg = ResolverConfig {
            bound,
            min_cycles,
            cycle_cap,
            timeout: Duration::try_from_secs_f64(timeout).map_err(|e| PyValueError::new_err(e.to_string()))?,
            seed,
            ..Default::default()
        };
        let g = &mut self.inner;
        let report = py
            .detach(|| subcycle::resolve(g, &cfg))
            .map_err(py_err)?;
        Ok(Report {
            status: status_str(report.status).to_owned(),
            removed: report
                .removed
                .iter()
                .map(|r| (r.edge.from.0, r.edge.to.0, r.reason.as_str().to_owned(), r.iteration))
                .collect(),
            iterations: report.iterations.len(),
        })
    }

    fn __repr__(&self) -> String {
        format!(
            "Graph(node_count={}, edge_count={})",
            self.inner.node_count(),
            self.inner.edge_count()
        )
    }
}

#[pyclass(module = "subcycle", get_all, frozen)]
struct Report {
    status: String,
    /// `(from, to, reason, iteration)` per removed edge.
    removed: Vec<(u32, u32, String, Option<usize>)>,
    iterations: usize,
}

#[pymethods]
impl Report {
    fn __repr__(&self) -> String {
        format!(
            "Report(status={:?}, removed={}, iterations={})",
            self.status,
            self.removed.len(),
            self.iterations
        )
    }
}

/// Exact minimum number of edges to remove, and one such edge set.
#[pyfunction]
fn brute_force_min_removal(g: &PyGraph) -> PyResult<(usize, Vec<(u32, u32)>)> {
    let (k, edges) = oracle::brute_force_min_removal(&g.inner).map_err(py_err)?;
    Ok((k, edges.into_iter().map(|e| (e.from.0, e.to.0)).collect()))
}

/// WCNF text for the hitting-set instance of the given cycles.
#[pyfunction]
fn cycles_to_wcnf(cycles: Vec<Vec<u32>>) -> PyResult<String> {
    let inst = maxsat::encode(&to_cycles(cycles)?).map_err(py_err)?;
    let mut out = Vec::new();
    export_wcnf(&inst, &mut out).map_err(|e| PyIOError::new_err(e.to_string()))?;
    Ok(String::from_utf8(out).expect("wcnf output is ascii"))
}

/// `(num_vars, hard_clauses, [(lit, weight)])`
type WcnfParts = (usize, Vec<Vec<i32>>, Vec<(i32, u64)>);

/// Parses WCNF text into `(num_vars, hard_clauses, [(lit, weight)])`.
#[pyfunction]
fn parse_wcnf(text: &str) -> PyResult<WcnfParts> {
    let inst = import_wcnf(text.as_bytes()).map_err(py_err)?;
    let soft = inst.soft.iter().map(|s| (s.lit, s.weight)).collect();
    Ok((inst.num_vars(), inst.hard, soft))
}

/// Solves a WCNF instance exactly; returns the variables set false.
#[pyfunction]
fn solve_wcnf(text: &str) -> PyResult<Vec<u32>> {
    let inst = import_wcnf(text.as_bytes()).map_err(py_err)?;
    let a = maxsat::solve(&inst).map_err(py_err)?;
    Ok(a.removed_vars())
}

#[pyfunction]
#[pyo3(signature = (nodes, dag_edge_prob, planted_cycles, min_cycle_len = 2, max_cycle_len = 8, nesting = 0.8, seed = 0))]
fn synthetic_graph(
    nodes: usize,
    dag_edge_prob: f64,
    planted_cycles: usize,
    min_cycle_len: usize,
    max_cycle_len: usize,
    nesting: f64,
    seed: u64,
) -> PyResult<(PyGraph, Vec<Vec<u32>>)> {
    let spec = SyntheticSpec {
        nodes,
        dag_edge_prob,
        planted_cycles,
        min_cycle_len,
        max_cycle_len,
        nesting,
        seed,
    };
    let sg = generate(&spec).map_err(py_err)?;
    let planted = sg
        .planted
        .into_iter()
        .map(|c| c.into_iter().map(|v| v.0).collect())
        .collect();
    Ok((PyGraph { inner: sg.graph }, planted))
}

/// File-to-file run, as the `resolve` command does it. Returns the report
/// as a JSON string.
#[pyfunction]
#[pyo3(signature = (inputs, out_clean, out_removed, out_report, predicate = subcycle::RDFS_SUBCLASS_OF.to_owned(), sameas = None, bound = 60, seed = 0, timeout = 7200.0))]
#[allow(clippy::too_many_arguments)]
fn resolve_files(
    py: Python<'_>,
    inputs: Vec<PathBuf>,
    out_clean: PathBuf,
    out_removed: PathBuf,
    out_report: PathBuf,
    predicate: String,
    sameas: Option<PathBuf>,
    bound: usize,
    seed: u64,
    timeout: f64,
) -> PyResult<String> {
    let timeout = Duration::try_from_secs_f64(timeout).map_err(|e| PyValueError::new_err(e.to_string()))?;
    py.detach(|| -> subcycle::Result<String> {
        let opts = IngestOptions {
            predicate: subcycle::expand_prefixed(&predicate),
            sameas,
            ..Default::default()
        };
        let loaded = LoadedGraph::load(&inputs, &opts)?;
        let cfg = ResolverConfig {
            bound,
            seed,
            timeout,
            predicate: loaded.predicate.clone(),
            ..Default::default()
        };
        let outcome = pipeline::run(&loaded, &cfg, &mut ())?;
        let mut buf = Vec::new();
        pipeline::write_clean(&loaded, &outcome.graph, &mut buf)?;
        std::fs::write(&out_clean, &buf)?;
        buf.clear();
        pipeline::write_removed(&loaded, &outcome.report.removed, &mut buf)?;
        std::fs::write(&out_removed, &buf)?;
        buf.clear();
        pipeline::write_reasons(&loaded, &outcome.report.removed, &mut buf)?;
        std::fs::write(format!("{}.tsv", out_removed.display()), &buf)?;
        buf.clear();
        pipeline::write_report(&loaded, &outcome, false, &mut buf)?;
        std::fs::write(&out_report, &buf)?;
        Ok(String::from_utf8(buf).expect("json is utf-8"))
    })
    .map_err(py_err)
}

#[pymodule(name = "subcycle")]
fn subcycle_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    m.add("RDFS_SUBCLASS_OF", subcycle::RDFS_SUBCLASS_OF)?;
    m.add("RDFS_SUBPROPERTY_OF", subcycle::RDFS_SUBPROPERTY_OF)?;
    m.add_class::<PyGraph>()?;
    m.add_class::<Report>()?;
    m.add_function(wrap_pyfunction!(brute_force_min_removal, m)?)?;
    m.add_function(wrap_pyfunction!(cycles_to_wcnf, m)?)?;
    m.add_function(wrap_pyfunction!(parse_wcnf, m)?)?;
    m.add_function(wrap_pyfunction!(solve_wcnf, m)?)?;
    m.add_function(wrap_pyfunction!(synthetic_graph, m)?)?;
    m.add_function(wrap_pyfunction!(resolve_files, m)?)?;
    Ok(())
}
