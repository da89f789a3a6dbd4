//! Relations qfpp-defined from preservation witnesses.

use crate::error::{Error, Result};
use crate::ops::pattern::{make_near, make_universal};
use crate::ops::preserve::{check_witness, PreservationWitness};
use crate::relation::{Relation, SignPattern, Value};

/// `R'(x_0, …, x_{k-1}) = R^s(x_{map[0]}, …, x_{map[n-1]})`, where an
/// unmapped position is fixed to 0.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QfppDefinition {
    pub signs: SignPattern,
    pub map: Vec<Option<usize>>,
    pub arity: usize,
}

impl QfppDefinition {
    pub fn apply(&self, rel: &Relation) -> Result<Relation> {
        if rel.arity() != self.map.len() {
            return Err(Error::ArityMismatch { expected: self.map.len(), found: rel.arity() });
        }
        let signed = rel.apply_sign_pattern(&self.signs)?;
        Relation::from_predicate(2, self.arity, |x| {
            let t: Vec<Value> = self.map.iter().map(|m| m.map_or(0, |j| x[j])).collect();
            signed.contains(&t)
        })
    }
}

/// Sign pattern sending the witness result to zero, and the columns of the
/// signed witness rows.
fn zeroed_columns(w: &PreservationWitness) -> (SignPattern, Vec<Vec<Value>>) {
    let signs = SignPattern::zeroing(&w.result);
    let rows: Vec<Vec<Value>> = w.tuples.iter().map(|t| signs.apply(t)).collect();
    let cols = (0..w.result.len()).map(|i| rows.iter().map(|r| r[i]).collect()).collect();
    (signs, cols)
}

/// Identifies positions with equal witness columns and fixes all-zero
/// columns, giving a relation that contains every `k`-tuple except `0^k`.
pub fn extract_kclause_definition(rel: &Relation, witness: &PreservationWitness) -> Result<QfppDefinition> {
    let r = witness.tuples.len();
    if !(r + 1).is_power_of_two() || r < 3 {
        return Err(Error::InvalidWitness(format!("{r} rows do not fit a universal operation")));
    }
    let k = (r + 1).trailing_zeros() as usize;
    check_witness(&make_universal(k)?, rel, witness)?;
    let (signs, cols) = zeroed_columns(witness);
    let mut kinds: Vec<&Vec<Value>> = Vec::new();
    let map = cols
        .iter()
        .map(|c| {
            if c.iter().all(|&v| v == 0) {
                return None;
            }
            Some(kinds.iter().position(|k| *k == c).unwrap_or_else(|| {
                kinds.push(c);
                kinds.len() - 1
            }))
        })
        .collect();
    let def = QfppDefinition { signs, map, arity: kinds.len() };
    let clause = def.apply(rel)?;
    if def.arity != k || clause.len() as u64 != (1u64 << k) - 1 || clause.contains_code(0) {
        return Err(Error::InvalidWitness("identified relation is not a k-clause".into()));
    }
    Ok(def)
}

/// Largest `k` for which the `k!` permuted copies are conjoined.
pub const MAX_SYMMETRIZE: usize = 6;

/// Identifies positions by the witness row carrying their single one, then
/// conjoins all argument permutations: a symmetric `k`-ary relation with
/// every weight-1 tuple and no weight-0 tuple.
pub fn extract_symmetric_relation(rel: &Relation, witness: &PreservationWitness) -> Result<Relation> {
    let k = witness.tuples.len();
    if !(3..=MAX_SYMMETRIZE).contains(&k) {
        return Err(Error::InvalidParameter(format!("need 3 <= k <= {MAX_SYMMETRIZE}, got {k}")));
    }
    check_witness(&make_near(k, 2)?, rel, witness)?;
    let (signs, cols) = zeroed_columns(witness);
    let map = cols.iter().map(|c| c.iter().position(|&v| v == 1)).collect();
    let base = QfppDefinition { signs, map, arity: k }.apply(rel)?;
    let mut perm: Vec<usize> = (0..k).collect();
    let mut out = base.clone();
    while next_permutation(&mut perm) {
        let permuted = Relation::from_predicate(2, k, |x| {
            let t: Vec<Value> = perm.iter().map(|&p| x[p]).collect();
            base.contains(&t)
        })?;
        out = Relation::from_codes(2, k, out.codes().filter(|&c| permuted.contains_code(c)))?;
    }
    debug_assert!(out.symmetric_weights().is_some());
    Ok(out)
}

fn next_permutation(p: &mut [usize]) -> bool {
    let Some(i) = (1..p.len()).rev().find(|&i| p[i - 1] < p[i]) else { return false };
    let j = (i..p.len()).rev().find(|&j| p[j] > p[i - 1]).expect("larger element exists");
    p.swap(i - 1, j);
    p[i..].reverse();
    true
}
