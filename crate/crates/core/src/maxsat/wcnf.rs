//! DIMACS WCNF (classic `p wcnf` header) export and import.

use std::fs::File;
use std::io::{BufRead, BufWriter, Write};
use std::path::Path;

use super::{EdgeVar, MaxSatInstance, SoftClause};
use crate::error::{Error, Result};

/// Writes the header, then hard clauses weighted `top`, then soft clauses.
pub fn export_wcnf<W: Write>(inst: &MaxSatInstance, sink: &mut W) -> std::io::Result<()> {
    let top = inst.top();
    writeln!(sink, "p wcnf {} {} {}", inst.num_vars(), inst.num_clauses(), top)?;
    for clause in &inst.hard {
        write!(sink, "{top}")?;
        for lit in clause {
            write!(sink, " {lit}")?;
        }
        writeln!(sink, " 0")?;
    }
    for s in &inst.soft {
        writeln!(sink, "{} {} 0", s.weight, s.lit)?;
    }
    Ok(())
}

pub fn write_wcnf_file(inst: &MaxSatInstance, path: &Path) -> Result<()> {
    let mut out = BufWriter::new(File::create(path)?);
    export_wcnf(inst, &mut out)?;
    out.flush()?;
    Ok(())
}

/// Reads an instance back. Clauses weighted at least `top` are hard. The
/// file carries no edge data, so variables come back with `edge: None`.
pub fn import_wcnf<R: BufRead>(source: R) -> Result<MaxSatInstance> {
    let err = |line: usize, message: String| Error::Wcnf { line, message };
    let mut header: Option<(usize, usize, u64)> = None;
    let mut inst = MaxSatInstance::default();

    for (i, line) in source.lines().enumerate() {
        let lineno = i + 1;
        let line = line?;
        let line = line.trim();
        if line.is_empty() || line.starts_with('c') {
            continue;
        }
        let Some((nvars, _, top)) = header else {
            let fields: Vec<&str> = line.split_whitespace().collect();
            if fields.len() != 5 || fields[0] != "p" || fields[1] != "wcnf" {
                return Err(err(lineno, format!("expected `p wcnf <vars> <clauses> <top>`, found `{line}`")));
            }
            let num = |s: &str| s.parse::<u64>().map_err(|_| err(lineno, format!("bad number `{s}` in header")));
            let (v, c, t) = (num(fields[2])?, num(fields[3])?, num(fields[4])?);
            header = Some((v as usize, c as usize, t));
            inst.vars = (1..=v as u32).map(|id| EdgeVar { id, edge: None }).collect();
            continue;
        };

        let mut fields = line.split_whitespace();
        let weight: u64 = fields
            .next()
            .and_then(|w| w.parse().ok())
            .ok_or_else(|| err(lineno, "missing or invalid clause weight".into()))?;
        let mut lits = Vec::new();
        let mut terminated = false;
        for f in fields {
            let lit: i32 = f.parse().map_err(|_| err(lineno, format!("invalid literal `{f}`")))?;
            if terminated {
                return Err(err(lineno, "literal after terminating 0".into()));
            }
            if lit == 0 {
                terminated = true;
                continue;
            }
            if lit.unsigned_abs() as usize > nvars {
                return Err(err(lineno, format!("literal {lit} exceeds declared {nvars} variables")));
            }
            lits.push(lit);
        }
        if !terminated {
            return Err(err(lineno, "clause not terminated by 0".into()));
        }
        if weight >= top {
            if lits.is_empty() || lits.iter().any(|&l| l > 0) {
                return Err(err(lineno, "hard clauses must be non-empty disjunctions of negated variables".into()));
            }
            inst.hard.push(lits);
        } else {
            if lits.len() != 1 || lits[0] < 0 {
                return Err(err(lineno, "soft clauses must be single positive literals".into()));
            }
            inst.soft.push(SoftClause { lit: lits[0], weight });
        }
    }

    let Some((_, nclauses, top)) = header else {
        return Err(err(0, "missing `p wcnf` header".into()));
    };
    if inst.num_clauses() != nclauses {
        return Err(err(0, format!("header declares {nclauses} clauses, found {}", inst.num_clauses())));
    }
    if inst.top() > top {
        return Err(err(0, format!("top {top} does not exceed total soft weight")));
    }
    Ok(inst)
}
