//! CNF to a padded instance whose clauses all share one parity pad.
//!
//! Variables `0..n` are the CNF variables and `n..n+m` the pad bits. Every
//! clause becomes `C(x) ∧ (y = pad(x))`, answered by the GF(2) extension
//! oracle; the satisfying assignments are exactly the parity extensions of
//! the CNF's models.

use crate::dimacs::Cnf;
use crate::error::{Error, Result};
use crate::instance::{Instance, TypeTag};
use crate::ops::classify::OpKind;
use crate::oracle::{OracleSpec, ParityPadSpec};
use crate::padding::{random_parity_padding, recommended_padding_size, verify_universal_padding, Universality, VerifyMode};
use crate::relation::Value;

#[derive(Debug, Clone)]
pub struct SethReduction {
    pub instance: Instance,
    pub spec: ParityPadSpec,
    /// Exact universality of the pad, when the check was affordable.
    pub universal: Option<Universality>,
}

/// Clause variables and the excluded tuple; `None` for a tautology.
fn clause_shape(clause: &[i64]) -> Result<Option<(Vec<usize>, Vec<Value>)>> {
    if clause.is_empty() {
        return Err(Error::InvalidParameter("empty clause".into()));
    }
    let mut lits: Vec<(usize, Value)> = clause
        .iter()
        .map(|&l| (l.unsigned_abs() as usize - 1, Value::from(l < 0)))
        .collect();
    lits.sort_unstable();
    lits.dedup();
    if lits.windows(2).any(|w| w[0].0 == w[1].0) {
        return Ok(None);
    }
    Ok(Some(lits.into_iter().unzip()))
}

pub fn seth_forward_reduction(cnf: &Cnf, kind: OpKind, eps: f64, seed: u64) -> Result<SethReduction> {
    let n = cnf.n_vars;
    if cnf.clauses.iter().flatten().any(|&l| l == 0 || l.unsigned_abs() as usize > n) {
        return Err(Error::InvalidParameter("literal outside the variable range".into()));
    }
    let m = recommended_padding_size(kind, n, eps)?;
    let spec = random_parity_padding(n, m, seed);
    let tag = (kind == OpKind::Edge(2)).then_some(TypeTag::Edge2);
    let mut inst = Instance::new(n + m, 2)?;
    for clause in &cnf.clauses {
        let Some((vars, excluded)) = clause_shape(clause)? else { continue };
        let name = format!(
            "pc_{}_{}",
            vars.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("."),
            excluded.iter().map(|v| v.to_string()).collect::<String>()
        );
        let r = match inst.relation_index(&name) {
            Some(r) => r,
            None => {
                let spec = OracleSpec::PaddedClause { base: n, clause: vars, excluded, pads: spec.parity_sets.clone() };
                inst.add_oracle(name, spec, tag)?
            }
        };
        inst.add_constraint(r, (0..n + m).collect())?;
    }
    let universal = match kind.build(2) {
        Ok(op) => verify_universal_padding(&op, &spec, VerifyMode::Exact).ok().map(|r| r.is_universal),
        Err(_) => None,
    };
    Ok(SethReduction { instance: inst, spec, universal })
}
