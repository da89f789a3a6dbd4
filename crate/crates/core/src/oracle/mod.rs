//! Extension oracles: membership tests for projections of a relation that
//! may never be materialised.

mod explicit;
mod linear;
mod padded;
mod ssblock;
mod symmetric;

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::relation::{Relation, SymmetricWeightSet, Value};

pub use explicit::ExplicitOracle;
pub use linear::LinearOracle;
pub use padded::{ParityPadSpec, PaddedClauseOracle};
pub use ssblock::SubsetSumBlockOracle;
pub use symmetric::SymmetricOracle;

/// Answers whether `values` at positions `indices` extends to a member.
pub trait ExtensionOracle: Send + Sync + fmt::Debug {
    fn arity(&self) -> usize;
    fn domain_size(&self) -> u32;

    /// Decides a partial tuple given position-wise (`None` = unassigned).
    fn accepts(&self, partial: &[Option<Value>]) -> bool;

    fn query(&self, indices: &[usize], values: &[Value]) -> bool {
        match to_partial(self.arity(), self.domain_size(), indices, values) {
            Some(partial) => self.accepts(&partial),
            None => false,
        }
    }
}

/// Position-wise view of a query. `None` when the query is malformed or
/// assigns one position two different values.
pub fn to_partial(arity: usize, domain_size: u32, indices: &[usize], values: &[Value]) -> Option<Vec<Option<Value>>> {
    if indices.len() != values.len() {
        return None;
    }
    let mut partial = vec![None; arity];
    for (&i, &v) in indices.iter().zip(values) {
        if i >= arity || v >= domain_size {
            return None;
        }
        match partial[i] {
            Some(old) if old != v => return None,
            _ => partial[i] = Some(v),
        }
    }
    Some(partial)
}

pub fn explicit_oracle(rel: Relation) -> ExplicitOracle {
    ExplicitOracle::new(rel)
}

/// `Σ coeffs[i]·x_i ≡ target (mod modulus)` over Boolean `x`.
pub fn linear_equation_oracle(coeffs: Vec<u64>, target: u64, modulus: u64) -> Result<LinearOracle> {
    LinearOracle::new(coeffs, target, modulus)
}

pub fn parity_padded_clause_oracle(clause: &Relation, scope: Vec<usize>, pad: ParityPadSpec) -> Result<PaddedClauseOracle> {
    PaddedClauseOracle::from_clause_relation(clause, scope, pad)
}

pub fn subset_sum_block_oracle(
    weights: Vec<u64>,
    block_target: u64,
    bit_lo: u32,
    bit_hi: u32,
    carry_in: u64,
    carry_out: u64,
) -> Result<SubsetSumBlockOracle> {
    SubsetSumBlockOracle::new(weights, block_target, bit_lo, bit_hi, carry_in, carry_out)
}

/// Ground truth for a small oracle: every full tuple it accepts.
pub fn materialize(oracle: &dyn ExtensionOracle) -> Result<Relation> {
    let n = oracle.arity();
    let d = oracle.domain_size();
    let idx: Vec<usize> = (0..n).collect();
    Relation::from_predicate(d, n, |t| oracle.query(&idx, t))
}

/// Serializable description of the oracle-backed relations.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum OracleSpec {
    Linear {
        coeffs: Vec<u64>,
        target: u64,
        modulus: u64,
    },
    PaddedClause {
        base: usize,
        clause: Vec<usize>,
        excluded: Vec<Value>,
        pads: Vec<Vec<usize>>,
    },
    SsBlock {
        weights: Vec<u64>,
        target: u64,
        lo: u32,
        hi: u32,
        carry_in: u64,
        carry_out: u64,
    },
    Symmetric {
        arity: usize,
        weights: Vec<usize>,
    },
}

impl OracleSpec {
    pub fn build(&self) -> Result<Arc<dyn ExtensionOracle>> {
        Ok(match self {
            OracleSpec::Linear { coeffs, target, modulus } => {
                Arc::new(LinearOracle::new(coeffs.clone(), *target, *modulus)?)
            }
            OracleSpec::PaddedClause { base, clause, excluded, pads } => Arc::new(PaddedClauseOracle::new(
                clause.clone(),
                excluded.clone(),
                ParityPadSpec::new(*base, pads.clone(), 0)?,
            )?),
            OracleSpec::SsBlock { weights, target, lo, hi, carry_in, carry_out } => Arc::new(
                SubsetSumBlockOracle::new(weights.clone(), *target, *lo, *hi, *carry_in, *carry_out)?,
            ),
            OracleSpec::Symmetric { arity, weights } => {
                Arc::new(SymmetricOracle::new(SymmetricWeightSet::new(*arity, weights.iter().copied())?))
            }
        })
    }

    pub fn arity(&self) -> usize {
        match self {
            OracleSpec::Linear { coeffs, .. } => coeffs.len(),
            OracleSpec::PaddedClause { base, pads, .. } => base + pads.len(),
            OracleSpec::SsBlock { weights, .. } => weights.len(),
            OracleSpec::Symmetric { arity, .. } => *arity,
        }
    }
}

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidParameter(msg.into())
}
