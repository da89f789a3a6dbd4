//! Placement of a Boolean relation in the near / edge / universal hierarchy.

use std::fmt;

use crate::error::{Error, Result};
use crate::ops::pattern::{make_edge, make_near, make_universal, PartialOp};
use crate::ops::preserve::{preserves, PreservationWitness};
use crate::relation::Relation;

/// Largest level accepted by [`classify_relation`]; `universal_5` already has
/// arity 31.
pub const MAX_CLASSIFY_LEVEL: usize = 5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum OpKind {
    Near(usize),
    Edge(usize),
    Universal(usize),
}

impl OpKind {
    pub fn build(self, domain_size: u32) -> Result<PartialOp> {
        match self {
            OpKind::Near(k) => make_near(k, domain_size),
            OpKind::Edge(k) => make_edge(k, domain_size),
            OpKind::Universal(k) if domain_size == 2 => make_universal(k),
            OpKind::Universal(_) => Err(Error::NotBoolean),
        }
    }

    /// Parses `nu:4`, `near:4`, `edge:2`, `edge2`, `universal:3`, `u:3`.
    pub fn parse(s: &str) -> Result<Self> {
        let s = s.trim().to_ascii_lowercase();
        let split = s
            .find(|c: char| c.is_ascii_digit())
            .ok_or_else(|| Error::InvalidParameter(format!("operation {s:?} lacks a level")))?;
        let (name, level) = s.split_at(split);
        let k: usize = level
            .parse()
            .map_err(|_| Error::InvalidParameter(format!("bad level in {s:?}")))?;
        match name.trim_end_matches([':', '_']) {
            "nu" | "near" => Ok(OpKind::Near(k)),
            "edge" => Ok(OpKind::Edge(k)),
            "u" | "universal" => Ok(OpKind::Universal(k)),
            other => Err(Error::InvalidParameter(format!("unknown operation {other:?}"))),
        }
    }
}

impl fmt::Display for OpKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OpKind::Near(k) => write!(f, "near_{k}"),
            OpKind::Edge(k) => write!(f, "edge_{k}"),
            OpKind::Universal(k) => write!(f, "universal_{k}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassificationEntry {
    pub op: OpKind,
    pub witness: Option<PreservationWitness>,
}

impl ClassificationEntry {
    pub fn preserved(&self) -> bool {
        self.witness.is_none()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassificationReport {
    pub entries: Vec<ClassificationEntry>,
}

impl ClassificationReport {
    pub fn get(&self, op: OpKind) -> Option<&ClassificationEntry> {
        self.entries.iter().find(|e| e.op == op)
    }

    pub fn preserved_by(&self, op: OpKind) -> Option<bool> {
        self.get(op).map(ClassificationEntry::preserved)
    }
}

/// Inclusions `inv(a) ⊆ inv(b)` among the operations up to `max_level`.
pub fn hierarchy_inclusions(max_level: usize) -> Vec<(OpKind, OpKind)> {
    let mut out = Vec::new();
    for k in 3..=max_level {
        out.push((OpKind::Edge(2), OpKind::Edge(k)));
        out.push((OpKind::Near(k), OpKind::Edge(k)));
        out.push((OpKind::Edge(k), OpKind::Universal(k)));
        if k < max_level {
            out.push((OpKind::Near(k), OpKind::Near(k + 1)));
            out.push((OpKind::Edge(k), OpKind::Edge(k + 1)));
            out.push((OpKind::Universal(k), OpKind::Universal(k + 1)));
        }
    }
    out
}

/// Tests `edge_2` and `near_k, edge_k, universal_k` for `3 ≤ k ≤ max_level`.
/// An inclusion-violating outcome is reported as an error.
pub fn classify_relation(rel: &Relation, max_level: usize) -> Result<ClassificationReport> {
    if !rel.is_boolean() {
        return Err(Error::NotBoolean);
    }
    if max_level > MAX_CLASSIFY_LEVEL {
        return Err(Error::Infeasible(1u128 << ((1 << max_level) - 1).min(127)));
    }
    let mut ops = vec![OpKind::Edge(2)];
    for k in 3..=max_level {
        ops.extend([OpKind::Near(k), OpKind::Edge(k), OpKind::Universal(k)]);
    }
    let entries = ops
        .into_iter()
        .map(|op| {
            Ok(ClassificationEntry { op, witness: preserves(&op.build(2)?, rel)? })
        })
        .collect::<Result<Vec<_>>>()?;
    let report = ClassificationReport { entries };
    for (weaker, stronger) in hierarchy_inclusions(max_level) {
        if report.preserved_by(weaker) == Some(true) && report.preserved_by(stronger) == Some(false) {
            return Err(Error::Precondition(format!(
                "inclusion violated: preserved by {weaker} but not by {stronger}"
            )));
        }
    }
    Ok(report)
}
