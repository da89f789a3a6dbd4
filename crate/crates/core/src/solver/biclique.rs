//! Canonical labels of bicliques in rectangular relations.

use crate::error::{Error, Result};
use crate::oracle::ExtensionOracle;
use crate::relation::Value;

/// `(s0, t0)`: the lex-min vertices of both sides of a biclique.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BicliqueLabel {
    pub s0: Vec<Value>,
    pub t0: Vec<Value>,
}

/// Lex-min completion of `fixed` on the positions `free`, one coordinate at
/// a time.
fn lexmin_completion(
    oracle: &dyn ExtensionOracle,
    fixed_idx: &[usize],
    fixed: &[Value],
    free: &[usize],
) -> Option<Vec<Value>> {
    let mut idx = fixed_idx.to_vec();
    let mut vals = fixed.to_vec();
    let mut out = Vec::with_capacity(free.len());
    for &j in free {
        idx.push(j);
        vals.push(0);
        let v = (0..oracle.domain_size()).find(|&v| {
            *vals.last_mut().expect("pushed") = v;
            oracle.query(&idx, &vals)
        })?;
        out.push(v);
    }
    Some(out)
}

/// Label of `side` (an assignment to `i1`) in the bipartite graph between
/// the projections on `i1` and `i2`: complete to the lex-min `t0` on `i2`,
/// then recomplete `t0` to the lex-min `s0` on `i1`. Uses at most
/// `(|i1| + |i2|)·d + 1` queries.
pub fn biclique_label(oracle: &dyn ExtensionOracle, i1: &[usize], i2: &[usize], side: &[Value]) -> Result<BicliqueLabel> {
    if side.len() != i1.len() {
        return Err(Error::ArityMismatch { expected: i1.len(), found: side.len() });
    }
    if !oracle.query(i1, side) {
        return Err(Error::NotExtendable);
    }
    let t0 = lexmin_completion(oracle, i1, side, i2).ok_or(Error::NotExtendable)?;
    let s0 = lexmin_completion(oracle, i2, &t0, i1).ok_or(Error::NotExtendable)?;
    Ok(BicliqueLabel { s0, t0 })
}
