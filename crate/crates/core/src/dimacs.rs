//! DIMACS CNF reading and writing.

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cnf {
    pub n_vars: usize,
    pub clauses: Vec<Vec<i64>>,
}

pub fn parse_dimacs(text: &str) -> Result<Cnf> {
    let mut header: Option<(usize, usize)> = None;
    let mut clauses = Vec::new();
    let mut current = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let l = raw.trim();
        if l.is_empty() || l.starts_with('c') || l.starts_with('%') {
            continue;
        }
        if l.starts_with('p') {
            let w: Vec<&str> = l.split_whitespace().collect();
            if header.is_some() || w.len() != 4 || w[1] != "cnf" {
                return Err(Error::Parse { line, message: "expected a single `p cnf <vars> <clauses>`".into() });
            }
            let n = w[2].parse().map_err(|_| Error::Parse { line, message: "bad variable count".into() })?;
            let m = w[3].parse().map_err(|_| Error::Parse { line, message: "bad clause count".into() })?;
            header = Some((n, m));
            continue;
        }
        let (n, _) = header.ok_or(Error::Parse { line, message: "clause before header".into() })?;
        for tok in l.split_whitespace() {
            let lit: i64 = tok.parse().map_err(|_| Error::Parse { line, message: format!("bad literal {tok:?}") })?;
            if lit == 0 {
                clauses.push(std::mem::take(&mut current));
            } else if lit.unsigned_abs() as usize > n {
                return Err(Error::Parse { line, message: format!("literal {lit} exceeds {n} variables") });
            } else {
                current.push(lit);
            }
        }
    }
    let (n_vars, m) = header.ok_or(Error::Parse { line: 1, message: "missing header".into() })?;
    if !current.is_empty() {
        clauses.push(current);
    }
    if clauses.len() != m {
        return Err(Error::Parse {
            line: text.lines().count(),
            message: format!("header announces {m} clauses, found {}", clauses.len()),
        });
    }
    Ok(Cnf { n_vars, clauses })
}

pub fn write_dimacs(cnf: &Cnf) -> String {
    let mut out = format!("p cnf {} {}\n", cnf.n_vars, cnf.clauses.len());
    for c in &cnf.clauses {
        for lit in c {
            out.push_str(&lit.to_string());
            out.push(' ');
        }
        out.push_str("0\n");
    }
    out
}
