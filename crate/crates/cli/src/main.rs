use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::ops::ControlFlow;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use clap::{Args, Parser, Subcommand};

use subcycle::eval::{generate, sweep, write_csv, SyntheticSpec};
use subcycle::graph::{is_acyclic, superclasses, Acyclicity};
use subcycle::ingest::EquivalenceInput;
use subcycle::maxsat::MaxSatInstance;
use subcycle::pipeline::{
    preprocess, run, write_clean, write_reasons, write_removed, write_report, IngestOptions,
    LoadedGraph, WcnfDump,
};
use subcycle::resolver::{IterationStat, ResolveObserver};
use subcycle::{expand_prefixed, IriTable, ResolverConfig, SimpleCycle, Status};

const EXIT_ERROR: u8 = 1;
const EXIT_TIMEOUT: u8 = 2;
const EXIT_CYCLIC: u8 = 3;
const EXIT_CLOSURE_CYCLIC: u8 = 4;
const EXIT_UNKNOWN_IRI: u8 = 5;

#[derive(Parser)]
#[command(name = "subcycle", version, about = "Remove cycles from RDF subsumption hierarchies")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Make the hierarchy acyclic and write the clean graph, removed edges and a report
    Resolve(ResolveArgs),
    /// Report whether the hierarchy is acyclic, with a witness cycle if not
    Check(GraphArgs),
    /// Print every superclass of a class in an acyclic hierarchy
    Closure(ClosureArgs),
    /// Sweep the neighbourhood bound and write a CSV of removal counts
    Sweep(SweepArgs),
}

#[derive(Args)]
struct GraphArgs {
    /// N-Triples input, optionally gzipped; may be repeated
    #[arg(long, required = true)]
    input: Vec<PathBuf>,
    /// Predicate whose triples form the hierarchy (full IRI or rdfs:/owl: prefixed)
    #[arg(long, default_value = subcycle::RDFS_SUBCLASS_OF)]
    predicate: String,
}

#[derive(Args)]
struct EquivArgs {
    /// owl:sameAs pairs as N-Triples (.nt, .nt.gz) or two tab-separated columns
    #[arg(long)]
    sameas: Option<PathBuf>,
    /// Harvest owl:equivalentClass from the input files
    #[arg(long, default_value_t = true, action = clap::ArgAction::Set)]
    equiv_from_input: bool,
    /// Additional N-Triples file scanned for owl:equivalentClass; may be repeated
    #[arg(long)]
    equiv: Vec<PathBuf>,
}

#[derive(Args)]
struct LoopArgs {
    #[arg(long, default_value_t = 3)]
    min_cycles: usize,
    /// Simple cycles enumerated per neighbourhood before truncating
    #[arg(long, default_value_t = 1_000_000)]
    cycle_cap: usize,
    /// Time budget, e.g. 7200s, 90m, 2h or plain seconds
    #[arg(long, default_value = "7200s", value_parser = parse_duration)]
    timeout: Duration,
    #[arg(long, env = "SUBCYCLE_SEED", default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct ResolveArgs {
    #[command(flatten)]
    graph: GraphArgs,
    #[command(flatten)]
    equiv: EquivArgs,
    #[command(flatten)]
    run: LoopArgs,
    /// Soft bound on neighbourhood size
    #[arg(long, default_value_t = 60)]
    bound: usize,
    #[arg(long)]
    out_clean: PathBuf,
    /// Removed edges as N-Triples; reasons go to a TSV next to it
    #[arg(long)]
    out_removed: PathBuf,
    /// Reason sidecar, default <out-removed>.tsv
    #[arg(long)]
    out_reasons: Option<PathBuf>,
    #[arg(long)]
    out_report: PathBuf,
    /// Dump each iteration's MAXSAT instance here
    #[arg(long)]
    wcnf_dir: Option<PathBuf>,
    /// Keep wall-clock times in the report
    #[arg(long)]
    timings: bool,
    /// No per-iteration log lines
    #[arg(long, short)]
    quiet: bool,
}

#[derive(Args)]
struct ClosureArgs {
    #[command(flatten)]
    graph: GraphArgs,
    /// Class IRI to query
    class: String,
}

#[derive(Args)]
struct SweepArgs {
    /// Graph to sweep; without it the bundled synthetic benchmark is used
    #[arg(long)]
    input: Vec<PathBuf>,
    #[arg(long, default_value = subcycle::RDFS_SUBCLASS_OF)]
    predicate: String,
    #[command(flatten)]
    equiv: EquivArgs,
    #[command(flatten)]
    run: LoopArgs,
    /// Bounds to sweep, comma separated
    #[arg(long = "B", value_delimiter = ',', default_values_t = [20, 30, 40, 50, 60])]
    bounds: Vec<usize>,
    #[arg(long, default_value_t = 5)]
    runs: usize,
    /// Generator seed for the synthetic benchmark
    #[arg(long, default_value_t = 7)]
    bench_seed: u64,
    /// CSV output, default stdout
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    timings: bool,
}

fn parse_duration(s: &str) -> Result<Duration, String> {
    let s = s.trim();
    let split = s.find(|c: char| c.is_ascii_alphabetic()).unwrap_or(s.len());
    let (num, unit) = s.split_at(split);
    let value: f64 = num.trim().parse().map_err(|_| format!("invalid duration `{s}`"))?;
    let secs = match unit {
        "" | "s" => value,
        "ms" => value / 1000.0,
        "m" | "min" => value * 60.0,
        "h" => value * 3600.0,
        _ => return Err(format!("unknown unit `{unit}` in `{s}`")),
    };
    Duration::try_from_secs_f64(secs).map_err(|e| e.to_string())
}

type CliResult = Result<ExitCode, String>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Resolve(a) => cmd_resolve(a),
        Command::Check(a) => cmd_check(a),
        Command::Closure(a) => cmd_closure(a),
        Command::Sweep(a) => cmd_sweep(a),
    };
    result.unwrap_or_else(|e| {
        eprintln!("error: {e}");
        ExitCode::from(EXIT_ERROR)
    })
}

fn ingest_options(predicate: &str, equiv: &EquivArgs) -> IngestOptions {
    IngestOptions {
        predicate: expand_prefixed(predicate),
        equiv_from_input: equiv.equiv_from_input,
        equiv_files: equiv.equiv.clone(),
        sameas: equiv.sameas.clone(),
        ..Default::default()
    }
}

fn load_plain(g: &GraphArgs) -> Result<LoadedGraph, String> {
    let opts = IngestOptions {
        predicate: expand_prefixed(&g.predicate),
        equiv_from_input: false,
        ..Default::default()
    };
    LoadedGraph::load(&g.input, &opts).map_err(|e| e.to_string())
}

fn create(path: &Path) -> Result<BufWriter<File>, String> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| format!("{}: {e}", path.display()))
}

fn finish(mut w: BufWriter<File>, path: &Path) -> Result<(), String> {
    w.flush().map_err(|e| format!("{}: {e}", path.display()))
}

struct CliObserver {
    wcnf: Option<WcnfDump>,
    log: bool,
}

impl ResolveObserver for CliObserver {
    fn on_instance(&mut self, iteration: usize, instance: &MaxSatInstance) -> subcycle::Result<()> {
        match &mut self.wcnf {
            Some(dump) => dump.on_instance(iteration, instance),
            None => Ok(()),
        }
    }

    fn on_iteration(&mut self, s: &IterationStat) -> ControlFlow<()> {
        if self.log {
            let cost = s.solver_cost.map_or("-".to_owned(), |c| c.to_string());
            eprintln!(
                "iteration {} nodes={} probes={} cycles={}{} removed={} cost={}{} {:.1}ms",
                s.iteration,
                s.neighborhood_size,
                s.probes,
                s.cycles,
                if s.truncated { " (truncated)" } else { "" },
                s.edges_removed,
                cost,
                if s.fallback { " fallback" } else { "" },
                s.wall_us as f64 / 1000.0
            );
        }
        ControlFlow::Continue(())
    }
}

fn cmd_resolve(a: ResolveArgs) -> CliResult {
    let reasons = a
        .out_reasons
        .clone()
        .unwrap_or_else(|| PathBuf::from(format!("{}.tsv", a.out_removed.display())));
    let outputs = [&a.out_clean, &a.out_removed, &reasons, &a.out_report];
    for (i, p) in outputs.iter().enumerate() {
        if outputs[..i].contains(p) {
            return Err(format!("output path {} given twice", p.display()));
        }
        if a.graph.input.contains(p) {
            return Err(format!("output path {} is also an input", p.display()));
        }
    }

    let loaded = LoadedGraph::load(&a.graph.input, &ingest_options(&a.graph.predicate, &a.equiv))
        .map_err(|e| e.to_string())?;
    let cfg = ResolverConfig {
        bound: a.bound,
        min_cycles: a.run.min_cycles,
        cycle_cap: a.run.cycle_cap,
        timeout: a.run.timeout,
        seed: a.run.seed,
        predicate: loaded.predicate.clone(),
    };
    let wcnf = match &a.wcnf_dir {
        Some(dir) => Some(WcnfDump::new(dir).map_err(|e| e.to_string())?),
        None => None,
    };
    let mut observer = CliObserver { wcnf, log: !a.quiet };
    let outcome = run(&loaded, &cfg, &mut observer).map_err(|e| e.to_string())?;

    let io = |e: io::Error| e.to_string();
    let mut w = create(&a.out_clean)?;
    write_clean(&loaded, &outcome.graph, &mut w).map_err(io)?;
    finish(w, &a.out_clean)?;
    let mut w = create(&a.out_removed)?;
    write_removed(&loaded, &outcome.report.removed, &mut w).map_err(io)?;
    finish(w, &a.out_removed)?;
    let mut w = create(&reasons)?;
    write_reasons(&loaded, &outcome.report.removed, &mut w).map_err(io)?;
    finish(w, &reasons)?;
    let mut w = create(&a.out_report)?;
    write_report(&loaded, &outcome, a.timings, &mut w).map_err(|e| e.to_string())?;
    finish(w, &a.out_report)?;

    let r = &outcome.report;
    eprintln!(
        "{}: {} edges in, {} removed ({} preprocessing, {} by the loop) over {} iterations",
        match r.status {
            Status::Acyclic => "acyclic",
            Status::Timeout => "timeout",
        },
        loaded.graph.edge_count(),
        r.removed.len(),
        r.removed.len() - r.iterative_removals(),
        r.iterative_removals(),
        r.iterations.len()
    );
    Ok(match r.status {
        Status::Acyclic => ExitCode::SUCCESS,
        Status::Timeout => ExitCode::from(EXIT_TIMEOUT),
    })
}

fn show_cycle(table: &IriTable, c: &SimpleCycle) -> String {
    let mut names: Vec<String> = c.nodes().iter().map(|&v| table.term(v)).collect();
    names.push(table.term(c.nodes()[0]));
    names.join(" -> ")
}

fn cmd_check(a: GraphArgs) -> CliResult {
    let loaded = load_plain(&a)?;
    match is_acyclic(&loaded.graph) {
        Acyclicity::Acyclic => {
            println!("acyclic");
            Ok(ExitCode::SUCCESS)
        }
        Acyclicity::Cyclic(c) => {
            println!("cyclic: {}", show_cycle(&loaded.table, &c));
            Ok(ExitCode::from(EXIT_CYCLIC))
        }
    }
}

fn cmd_closure(a: ClosureArgs) -> CliResult {
    let loaded = load_plain(&a.graph)?;
    let class = expand_prefixed(&a.class);
    let Some(start) = loaded.table.get(&class) else {
        eprintln!("error: unknown class {class}");
        return Ok(ExitCode::from(EXIT_UNKNOWN_IRI));
    };
    if let Acyclicity::Cyclic(c) = is_acyclic(&loaded.graph) {
        eprintln!("error: hierarchy is cyclic, e.g. {}", show_cycle(&loaded.table, &c));
        return Ok(ExitCode::from(EXIT_CLOSURE_CYCLIC));
    }
    let supers = superclasses(&loaded.graph, start).map_err(|e| e.to_string())?;
    let mut names: Vec<&str> = supers
        .iter()
        .filter_map(|&v| loaded.table.resolve(v))
        .collect();
    names.sort_unstable();
    let stdout = io::stdout();
    let mut out = stdout.lock();
    for name in names {
        writeln!(out, "{name}").map_err(|e| e.to_string())?;
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_sweep(a: SweepArgs) -> CliResult {
    let (mut graph, eq) = if a.input.is_empty() {
        let g = generate(&SyntheticSpec::nested_benchmark(a.bench_seed))
            .map_err(|e| e.to_string())?
            .graph;
        let eq = EquivalenceInput::empty(g.node_count());
        (g, eq)
    } else {
        let loaded = LoadedGraph::load(&a.input, &ingest_options(&a.predicate, &a.equiv))
            .map_err(|e| e.to_string())?;
        (loaded.graph, loaded.equivalences)
    };
    preprocess(&mut graph, &eq);
    let template = ResolverConfig {
        min_cycles: a.run.min_cycles,
        cycle_cap: a.run.cycle_cap,
        timeout: a.run.timeout,
        seed: a.run.seed,
        predicate: expand_prefixed(&a.predicate),
        ..Default::default()
    };
    let rows = sweep(&graph, &a.bounds, a.runs, &template).map_err(|e| e.to_string())?;
    match &a.out {
        Some(path) => {
            let mut w = create(path)?;
            write_csv(&rows, &mut w, a.timings).map_err(|e| e.to_string())?;
            finish(w, path)?;
        }
        None => {
            let stdout = io::stdout();
            write_csv(&rows, &mut stdout.lock(), a.timings).map_err(|e| e.to_string())?;
        }
    }
    Ok(ExitCode::SUCCESS)
}
