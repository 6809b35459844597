use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

const SUB: &str = "http://www.w3.org/2000/01/rdf-schema#subClassOf";
const SUBPROP: &str = "http://www.w3.org/2000/01/rdf-schema#subPropertyOf";

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_subcycle"));
    c.env_remove("SUBCYCLE_SEED");
    c
}

fn triples(pred: &str, edges: &[(u32, u32)]) -> String {
    edges
        .iter()
        .map(|(a, b)| format!("<http://ex.org/c{a}> <{pred}> <http://ex.org/c{b}> .\n"))
        .collect()
}

fn example_graph() -> String {
    triples(SUB, &[
        (1, 2), (2, 3), (3, 8), (3, 7), (8, 1), (8, 7), (3, 5), (6, 5),
        (5, 3), (7, 8), (7, 6), (6, 3), (5, 7), (5, 4), (4, 5),
    ])
}

struct Run {
    out: Output,
    clean: PathBuf,
    removed: PathBuf,
    report: PathBuf,
}

impl Run {
    fn code(&self) -> i32 {
        self.out.status.code().unwrap()
    }

    fn read(&self, p: &Path) -> String {
        fs::read_to_string(p).unwrap()
    }
}

fn resolve(dir: &Path, tag: &str, input: &Path, extra: &[&str]) -> Run {
    let clean = dir.join(format!("{tag}.clean.nt"));
    let removed = dir.join(format!("{tag}.removed.nt"));
    let report = dir.join(format!("{tag}.report.json"));
    let out = bin()
        .arg("resolve")
        .arg("--input")
        .arg(input)
        .arg("--out-clean")
        .arg(&clean)
        .arg("--out-removed")
        .arg(&removed)
        .arg("--out-report")
        .arg(&report)
        .args(extra)
        .output()
        .unwrap();
    Run { out, clean, removed, report }
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p
}

#[test]
fn resolve_example_graph() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(dir.path(), "example.nt", &example_graph());
    let run = resolve(dir.path(), "example", &input, &[]);
    assert_eq!(run.code(), 0, "{}", String::from_utf8_lossy(&run.out.stderr));
    let clean = run.read(&run.clean);
    let removed = run.read(&run.removed);
    assert_eq!(clean.lines().count(), 10);
    assert_eq!(removed.lines().count(), 5);
    for line in removed.lines() {
        assert!(example_graph().contains(line));
        assert!(!clean.contains(line));
    }
    let report: serde_json::Value = serde_json::from_str(&run.read(&run.report)).unwrap();
    assert_eq!(report["status"], "acyclic");
    assert_eq!(report["schema_version"], 1);
    assert_eq!(report["removal_counts"]["total"], 5);
    assert_eq!(report["removed"].as_array().unwrap().len(), 5);

    let reasons = fs::read_to_string(format!("{}.tsv", run.removed.display())).unwrap();
    assert_eq!(reasons.lines().count(), 5);
    assert!(reasons.lines().all(|l| l.split('\t').nth(2) == Some("maxsat")));

    let stderr = String::from_utf8_lossy(&run.out.stderr);
    assert!(stderr.contains("iteration 1 "), "{stderr}");

    let check = bin().arg("check").arg("--input").arg(&run.clean).output().unwrap();
    assert_eq!(check.status.code(), Some(0));
}

#[test]
fn acyclic_input_passes_through() {
    let dir = tempfile::tempdir().unwrap();
    let text = triples(SUB, &[(1, 2), (2, 3), (1, 3)]);
    let dup = format!("{text}{text}");
    let input = write(dir.path(), "dag.nt", &dup);
    let run = resolve(dir.path(), "dag", &input, &["--quiet"]);
    assert_eq!(run.code(), 0);
    assert_eq!(run.read(&run.clean), text);
    assert_eq!(run.read(&run.removed), "");
}

#[test]
fn sub_property_hierarchy() {
    let dir = tempfile::tempdir().unwrap();
    let text = format!("{}{}", triples(SUBPROP, &[(1, 2), (2, 1)]), triples(SUB, &[(3, 4), (4, 3)]));
    let input = write(dir.path(), "props.nt", &text);
    let run = resolve(dir.path(), "props", &input, &["--predicate", "rdfs:subPropertyOf"]);
    assert_eq!(run.code(), 0);
    assert_eq!(run.read(&run.removed).lines().count(), 1);
    assert!(run.read(&run.removed).contains(SUBPROP));
    // the subClassOf cycle is not part of this hierarchy
    assert!(!run.read(&run.clean).contains(SUB));
}

#[test]
fn preprocessing_reasons_in_sidecar() {
    let dir = tempfile::tempdir().unwrap();
    let text = format!(
        "{}<http://ex.org/c1> <http://www.w3.org/2002/07/owl#equivalentClass> <http://ex.org/c2> .\n",
        triples(SUB, &[(1, 1), (1, 2), (2, 1), (3, 4), (4, 3), (2, 3)])
    );
    let input = write(dir.path(), "pre.nt", &text);
    let sameas = write(dir.path(), "sameas.tsv", "http://ex.org/c3\tid:9\nhttp://ex.org/c4\tid:9\n");
    let run = resolve(dir.path(), "pre", &input, &["--sameas", sameas.to_str().unwrap()]);
    assert_eq!(run.code(), 0);
    let reasons = fs::read_to_string(format!("{}.tsv", run.removed.display())).unwrap();
    let kinds: Vec<&str> = reasons.lines().map(|l| l.split('\t').nth(2).unwrap()).collect();
    assert_eq!(kinds, vec!["reflexive", "equivalence", "equivalence", "sameas", "sameas"]);
    assert!(reasons.starts_with("http://ex.org/c1\thttp://ex.org/c1\treflexive\t\n"));

    let without = resolve(dir.path(), "noeq", &input, &["--equiv-from-input", "false"]);
    let reasons = fs::read_to_string(format!("{}.tsv", without.removed.display())).unwrap();
    assert!(!reasons.contains("equivalence"));
}

#[test]
fn resolve_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(dir.path(), "example.nt", &example_graph());
    let a = resolve(dir.path(), "a", &input, &["--seed", "5"]);
    let b = resolve(dir.path(), "b", &input, &["--seed", "5"]);
    assert_eq!(fs::read(&a.removed).unwrap(), fs::read(&b.removed).unwrap());
    assert_eq!(fs::read(&a.report).unwrap(), fs::read(&b.report).unwrap());
}

#[test]
fn seed_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(dir.path(), "example.nt", &example_graph());
    let clean = dir.path().join("env.clean.nt");
    let out = bin()
        .env("SUBCYCLE_SEED", "42")
        .args(["resolve", "--quiet", "--input"])
        .arg(&input)
        .arg("--out-clean")
        .arg(&clean)
        .arg("--out-removed")
        .arg(dir.path().join("env.removed.nt"))
        .arg("--out-report")
        .arg(dir.path().join("env.json"))
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let report: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("env.json")).unwrap()).unwrap();
    assert_eq!(report["seed"], 42);
}

#[test]
fn timeout_exits_two_with_partial_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(dir.path(), "example.nt", &example_graph());
    let run = resolve(dir.path(), "late", &input, &["--timeout", "0s"]);
    assert_eq!(run.code(), 2);
    assert_eq!(run.read(&run.clean).lines().count(), 15);
    let report: serde_json::Value = serde_json::from_str(&run.read(&run.report)).unwrap();
    assert_eq!(report["status"], "timeout");
}

#[test]
fn wcnf_dump() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(dir.path(), "two.nt", &triples(SUB, &[(1, 2), (2, 1)]));
    let wcnf = dir.path().join("wcnf");
    let run = resolve(dir.path(), "two", &input, &["--wcnf-dir", wcnf.to_str().unwrap()]);
    assert_eq!(run.code(), 0);
    let text = fs::read_to_string(wcnf.join("iter-0001.wcnf")).unwrap();
    assert_eq!(text, "p wcnf 2 3 3\n3 -1 -2 0\n1 1 0\n1 2 0\n");
}

#[test]
fn fatal_errors_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("nope.nt");
    let run = resolve(dir.path(), "missing", &missing, &[]);
    assert_eq!(run.code(), 1);
    assert!(String::from_utf8_lossy(&run.out.stderr).contains("nope.nt"));

    let input = write(dir.path(), "example.nt", &example_graph());
    let out = bin()
        .args(["resolve", "--input"])
        .arg(&input)
        .arg("--out-clean")
        .arg(dir.path().join("same"))
        .arg("--out-removed")
        .arg(dir.path().join("same"))
        .arg("--out-report")
        .arg(dir.path().join("r.json"))
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn check_verdicts() {
    let dir = tempfile::tempdir().unwrap();
    let fig = write(dir.path(), "example.nt", &example_graph());
    let out = bin().arg("check").arg("--input").arg(&fig).output().unwrap();
    assert_eq!(out.status.code(), Some(3));
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.starts_with("cyclic: <http://ex.org/c"), "{stdout}");

    let empty = write(dir.path(), "empty.nt", "");
    let out = bin().arg("check").arg("--input").arg(&empty).output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(String::from_utf8_lossy(&out.stdout), "acyclic\n");
}

#[test]
fn closure_queries() {
    let dir = tempfile::tempdir().unwrap();
    let chain = write(dir.path(), "chain.nt", &triples(SUB, &[(1, 2), (2, 3)]));
    let query = |input: &Path, class: &str| {
        bin().arg("closure").arg("--input").arg(input).arg(class).output().unwrap()
    };
    let out = query(&chain, "http://ex.org/c1");
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(String::from_utf8_lossy(&out.stdout), "http://ex.org/c2\nhttp://ex.org/c3\n");

    let out = query(&chain, "http://ex.org/c3");
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());

    let out = query(&chain, "http://ex.org/missing");
    assert_eq!(out.status.code(), Some(5));

    let cyclic = write(dir.path(), "cyc.nt", &triples(SUB, &[(1, 2), (2, 1)]));
    let out = query(&cyclic, "http://ex.org/c1");
    assert_eq!(out.status.code(), Some(4));
    assert!(String::from_utf8_lossy(&out.stderr).contains("http://ex.org/c2"));
}

#[test]
fn sweep_csv() {
    let out = bin().args(["sweep", "--runs", "1", "--B", "60"]).output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    let csv = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "B,run,seed,removed,iterations,wall_ms,status");
    assert_eq!(lines.len(), 1 + 1 + 1);
    assert!(lines[2].starts_with("60,mean/std,"));

    let again = bin().args(["sweep", "--runs", "1", "--B", "60"]).output().unwrap();
    assert_eq!(csv.as_bytes(), again.stdout.as_slice());
}

#[test]
fn sweep_defaults_row_count() {
    let out = bin().args(["sweep"]).output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    let csv = String::from_utf8(out.stdout).unwrap();
    assert_eq!(csv.lines().count(), 1 + 25 + 5);
    assert_eq!(csv.lines().filter(|l| l.contains(",mean/std,")).count(), 5);
}

#[test]
fn sweep_over_input_file() {
    let dir = tempfile::tempdir().unwrap();
    let fig = write(dir.path(), "example.nt", &example_graph());
    let csv = dir.path().join("out.csv");
    let out = bin()
        .args(["sweep", "--runs", "2", "--B", "8,20", "--input"])
        .arg(&fig)
        .arg("--out")
        .arg(&csv)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let text = fs::read_to_string(csv).unwrap();
    assert!(text.lines().skip(1).take(4).all(|l| l.split(',').nth(3) == Some("5")), "{text}");
}
