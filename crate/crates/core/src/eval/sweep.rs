//! Bound sweep: resolve the same graph for every (B, run) cell and tabulate
//! removals, with one mean/std summary row per bound.

use std::io::Write;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::Result;
use crate::graph::DirectedGraph;
use crate::resolver::{resolve, ResolverConfig, Status};

pub const CSV_HEADER: &str = "B,run,seed,removed,iterations,wall_ms,status";

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub bound: usize,
    pub run: usize,
    pub seed: u64,
    /// Iterative removals only; preprocessing is accounted elsewhere.
    pub removed: usize,
    pub iterations: usize,
    pub wall_ms: u64,
    pub status: Status,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepSummary {
    pub bound: usize,
    pub runs: usize,
    pub removed_mean: f64,
    pub removed_std: f64,
    pub iterations_mean: f64,
    pub iterations_std: f64,
    pub wall_ms_mean: f64,
    pub wall_ms_std: f64,
    pub timeouts: usize,
}

/// Runs every cell in parallel. Run `r` uses seed `template.seed + r` for
/// every bound, so the runs are paired across bounds. Rows come back sorted
/// by (B in the given order, run).
pub fn sweep(
    g: &DirectedGraph,
    bounds: &[usize],
    runs: usize,
    template: &ResolverConfig,
) -> Result<Vec<SweepRow>> {
    let cells: Vec<(usize, usize)> = bounds
        .iter()
        .flat_map(|&b| (0..runs).map(move |r| (b, r)))
        .collect();
    cells
        .into_par_iter()
        .map(|(bound, run)| {
            let cfg = ResolverConfig {
                bound,
                seed: template.seed.wrapping_add(run as u64),
                ..template.clone()
            };
            let mut work = g.clone();
            let started = std::time::Instant::now();
            let report = resolve(&mut work, &cfg)?;
            Ok(SweepRow {
                bound,
                run,
                seed: cfg.seed,
                removed: report.iterative_removals(),
                iterations: report.iterations.len(),
                wall_ms: started.elapsed().as_millis() as u64,
                status: report.status,
            })
        })
        .collect()
}

fn mean_std(xs: impl Iterator<Item = f64> + Clone) -> (f64, f64) {
    let n = xs.clone().count() as f64;
    if n == 0.0 {
        return (0.0, 0.0);
    }
    let mean = xs.clone().sum::<f64>() / n;
    let var = xs.map(|x| (x - mean).powi(2)).sum::<f64>() / n;
    (mean, var.sqrt())
}

/// One summary per distinct bound, in first-appearance order. Standard
/// deviations are population deviations over the runs.
pub fn summarize(rows: &[SweepRow]) -> Vec<SweepSummary> {
    let mut bounds: Vec<usize> = Vec::new();
    for r in rows {
        if !bounds.contains(&r.bound) {
            bounds.push(r.bound);
        }
    }
    bounds
        .into_iter()
        .map(|bound| {
            let cell: Vec<&SweepRow> = rows.iter().filter(|r| r.bound == bound).collect();
            let (removed_mean, removed_std) = mean_std(cell.iter().map(|r| r.removed as f64));
            let (iterations_mean, iterations_std) =
                mean_std(cell.iter().map(|r| r.iterations as f64));
            let (wall_ms_mean, wall_ms_std) = mean_std(cell.iter().map(|r| r.wall_ms as f64));
            SweepSummary {
                bound,
                runs: cell.len(),
                removed_mean,
                removed_std,
                iterations_mean,
                iterations_std,
                wall_ms_mean,
                wall_ms_std,
                timeouts: cell.iter().filter(|r| r.status == Status::Timeout).count(),
            }
        })
        .collect()
}

fn status_str(s: Status) -> &'static str {
    match s {
        Status::Acyclic => "acyclic",
        Status::Timeout => "timeout",
    }
}

/// Writes the per-run rows, then one row per bound whose `run` column is
/// `mean/std` and whose numeric columns hold `mean/std` pairs. With
/// `timings` off, wall times are written as 0 so output is reproducible.
pub fn write_csv<W: Write>(rows: &[SweepRow], w: &mut W, timings: bool) -> std::io::Result<()> {
    writeln!(w, "{CSV_HEADER}")?;
    let wall = |ms: u64| if timings { ms } else { 0 };
    for r in rows {
        writeln!(
            w,
            "{},{},{},{},{},{},{}",
            r.bound,
            r.run,
            r.seed,
            r.removed,
            r.iterations,
            wall(r.wall_ms),
            status_str(r.status)
        )?;
    }
    for s in summarize(rows) {
        let (wm, ws) = if timings {
            (s.wall_ms_mean, s.wall_ms_std)
        } else {
            (0.0, 0.0)
        };
        let status = if s.timeouts == 0 {
            "acyclic".to_owned()
        } else {
            format!("timeout={}/{}", s.timeouts, s.runs)
        };
        writeln!(
            w,
            "{},mean/std,,{:.3}/{:.3},{:.3}/{:.3},{:.3}/{:.3},{}",
            s.bound,
            s.removed_mean,
            s.removed_std,
            s.iterations_mean,
            s.iterations_std,
            wm,
            ws,
            status
        )?;
    }
    Ok(())
}
