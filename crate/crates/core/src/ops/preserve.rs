//! Preservation checking: does `p(t_1,…,t_k) ∈ R` whenever it is defined?
//!
//! The search walks the coordinates of `R` one at a time and picks, for each
//! coordinate, a column from `domain(p)`. After each step every partial row
//! `t_i` must still lie in the matching prefix projection of `R`, which keeps
//! the tree within `|R|^{ar(p)}` nodes per level.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::exec;
use crate::ops::pattern::PartialOp;
use crate::relation::{decode, encode, table_size, Relation, Value};

/// Refusal threshold for both search-size estimates.
pub const PRESERVE_GUARD: u128 = 1 << 30;

/// A violating application: rows `t_1..t_k` of `R` and `p(t_1,…,t_k) ∉ R`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PreservationWitness {
    pub tuples: Vec<Vec<Value>>,
    pub result: Vec<Value>,
}

/// Column-wise application; `None` when some column is outside `domain(p)`.
pub fn apply_columnwise(p: &PartialOp, tuples: &[Vec<Value>]) -> Option<Vec<Value>> {
    let r = tuples.first().map_or(0, Vec::len);
    (0..r)
        .map(|j| {
            let col: Vec<Value> = tuples.iter().map(|t| t[j]).collect();
            p.apply(&col)
        })
        .collect()
}

pub fn check_witness(p: &PartialOp, rel: &Relation, w: &PreservationWitness) -> Result<()> {
    if w.tuples.len() != p.arity() {
        return Err(Error::InvalidWitness(format!(
            "expected {} rows, found {}",
            p.arity(),
            w.tuples.len()
        )));
    }
    if let Some(t) = w.tuples.iter().find(|t| !rel.contains(t)) {
        return Err(Error::InvalidWitness(format!("row {t:?} is not in the relation")));
    }
    match apply_columnwise(p, &w.tuples) {
        None => Err(Error::InvalidWitness("application is undefined".into())),
        Some(res) if res != w.result => Err(Error::InvalidWitness("recorded result differs".into())),
        Some(res) if rel.contains(&res) => Err(Error::InvalidWitness("result lies in the relation".into())),
        Some(_) => Ok(()),
    }
}

struct Search<'a> {
    rel: &'a Relation,
    prefixes: Vec<Relation>,
    columns: Vec<Vec<Value>>,
    values: Vec<Value>,
    d: u64,
}

impl Search<'_> {
    /// Depth-first over coordinates `depth..r`; `codes` hold the row
    /// prefixes, `picks` the chosen column indices.
    fn descend(&self, depth: usize, codes: &mut Vec<u64>, picks: &mut Vec<usize>) -> bool {
        let r = self.rel.arity();
        if depth == r {
            let result = picks.iter().fold(0u64, |acc, &c| acc * self.d + self.values[c] as u64);
            return !self.rel.contains_code(result);
        }
        let prefix = &self.prefixes[depth + 1];
        for (ci, col) in self.columns.iter().enumerate() {
            if !self.step_ok(prefix, codes, col) {
                continue;
            }
            for (code, &v) in codes.iter_mut().zip(col) {
                *code = *code * self.d + v as u64;
            }
            picks.push(ci);
            if self.descend(depth + 1, codes, picks) {
                return true;
            }
            picks.pop();
            for code in codes.iter_mut() {
                *code /= self.d;
            }
        }
        false
    }

    fn step_ok(&self, prefix: &Relation, codes: &[u64], col: &[Value]) -> bool {
        codes
            .iter()
            .zip(col)
            .all(|(&c, &v)| prefix.contains_code(c * self.d + v as u64))
    }

    fn witness(&self, picks: &[usize]) -> PreservationWitness {
        let k = self.columns.first().map_or(0, Vec::len);
        let tuples = (0..k)
            .map(|i| picks.iter().map(|&c| self.columns[c][i]).collect())
            .collect();
        let result = picks.iter().map(|&c| self.values[c]).collect();
        PreservationWitness { tuples, result }
    }
}

/// `None` iff `p` preserves `rel`; otherwise the first witness in ascending
/// column order.
pub fn preserves(p: &PartialOp, rel: &Relation) -> Result<Option<PreservationWitness>> {
    if p.domain_size() != rel.domain_size() {
        return Err(Error::DomainMismatch { left: p.domain_size(), right: rel.domain_size() });
    }
    let r = rel.arity();
    if r == 0 || rel.is_empty() {
        return Ok(None);
    }
    let by_columns = table_size(p.domain_len() as u32, r);
    let by_rows = (rel.len() as u128).saturating_pow(p.arity() as u32);
    if by_columns > PRESERVE_GUARD && by_rows > PRESERVE_GUARD {
        return Err(Error::Infeasible(by_columns.min(by_rows)));
    }
    let prefixes = (0..=r)
        .map(|j| rel.project(&(0..j).collect::<Vec<_>>()))
        .collect::<Result<Vec<_>>>()?;
    let search = Search {
        rel,
        prefixes,
        columns: p.domain_tuples().collect(),
        values: p.entries().iter().map(|e| e.1).collect(),
        d: rel.domain_size() as u64,
    };
    let found = exec::find_first(0..search.columns.len(), |first| {
        let col = &search.columns[first];
        let start = vec![0u64; p.arity()];
        if !search.step_ok(&search.prefixes[1], &start, col) {
            return None;
        }
        let mut codes: Vec<u64> = col.iter().map(|&v| v as u64).collect();
        let mut picks = vec![first];
        search
            .descend(1, &mut codes, &mut picks)
            .then(|| search.witness(&picks))
    });
    Ok(found)
}

/// Randomised search for a witness: `trials` draws of `ar(p)` uniform rows
/// of `rel`. Finding nothing is inconclusive.
pub fn sample_witness(p: &PartialOp, rel: &Relation, trials: usize, seed: u64) -> Result<Option<PreservationWitness>> {
    if p.domain_size() != rel.domain_size() {
        return Err(Error::DomainMismatch { left: p.domain_size(), right: rel.domain_size() });
    }
    let members: Vec<u64> = rel.codes().collect();
    if members.is_empty() {
        return Ok(None);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..trials {
        let tuples: Vec<Vec<Value>> = (0..p.arity())
            .map(|_| decode(rel.domain_size(), rel.arity(), members[rng.gen_range(0..members.len())]))
            .collect();
        if let Some(result) = apply_columnwise(p, &tuples) {
            if !rel.contains(&result) {
                return Ok(Some(PreservationWitness { tuples, result }));
            }
        }
    }
    Ok(None)
}

/// Smallest superset of `rel` preserved by `p`, by repeated application to
/// every `ar(p)`-tuple of rows until nothing new appears.
pub fn close_under(p: &PartialOp, rel: &Relation) -> Result<Relation> {
    if p.domain_size() != rel.domain_size() {
        return Err(Error::DomainMismatch { left: p.domain_size(), right: rel.domain_size() });
    }
    let d = rel.domain_size();
    let k = p.arity();
    let mut current = rel.clone();
    loop {
        let rows: Vec<Vec<Value>> = current.iter().collect();
        let work = (rows.len() as u128).saturating_pow(k as u32);
        if work > PRESERVE_GUARD {
            return Err(Error::Infeasible(work));
        }
        let mut fresh = Vec::new();
        let mut pick = vec![0usize; k];
        for _ in 0..work {
            let tuples: Vec<Vec<Value>> = pick.iter().map(|&i| rows[i].clone()).collect();
            if let Some(res) = apply_columnwise(p, &tuples) {
                let code = encode(d, &res);
                if !current.contains_code(code) {
                    fresh.push(code);
                }
            }
            for slot in pick.iter_mut().rev() {
                *slot += 1;
                if *slot < rows.len() {
                    break;
                }
                *slot = 0;
            }
        }
        if fresh.is_empty() {
            return Ok(current);
        }
        current = Relation::from_codes(d, current.arity(), current.codes().chain(fresh))?;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ops::pattern::{make_edge, make_near, make_universal};

    fn r13() -> Relation {
        Relation::from_tuples(2, 3, &[[0, 0, 1], [0, 1, 0], [1, 0, 0]]).unwrap()
    }

    /// Reference check: every `k`-tuple of rows.
    fn preserves_by_rows(p: &PartialOp, rel: &Relation) -> bool {
        let rows: Vec<Vec<Value>> = rel.iter().collect();
        let k = p.arity();
        let total = rows.len().pow(k as u32);
        (0..total).all(|mut idx| {
            let pick: Vec<Vec<Value>> = (0..k)
                .map(|_| {
                    let t = rows[idx % rows.len()].clone();
                    idx /= rows.len();
                    t
                })
                .collect();
            apply_columnwise(p, &pick).is_none_or(|res| rel.contains(&res))
        })
    }

    #[test]
    fn exact_sat_examples() {
        let w = preserves(&make_near(3, 2).unwrap(), &r13()).unwrap().unwrap();
        assert_eq!(w.result, vec![0, 0, 0]);
        check_witness(&make_near(3, 2).unwrap(), &r13(), &w).unwrap();
        assert!(preserves(&make_edge(2, 2).unwrap(), &r13()).unwrap().is_none());
    }

    #[test]
    fn two_clause_not_universal2() {
        let clause = Relation::from_tuples(2, 2, &[[0, 1], [1, 0], [1, 1]]).unwrap();
        let u2 = make_universal(2).unwrap();
        let w = preserves(&u2, &clause).unwrap().unwrap();
        check_witness(&u2, &clause, &w).unwrap();
    }

    #[test]
    fn agrees_with_row_enumeration_on_all_ternary_boolean_relations() {
        let ops = [make_near(3, 2).unwrap(), make_edge(2, 2).unwrap(), make_edge(3, 2).unwrap()];
        for mask in 0u64..256 {
            let rel = Relation::boolean_from_mask(3, mask);
            for op in &ops {
                let got = preserves(op, &rel).unwrap();
                assert_eq!(got.is_none(), preserves_by_rows(op, &rel), "{} on {rel:?}", op.name());
                if let Some(w) = got {
                    check_witness(op, &rel, &w).unwrap();
                }
            }
        }
    }

    #[test]
    fn ternary_domain_agrees_with_rows() {
        let op = make_near(3, 3).unwrap();
        let mut state = 0x2545_f491_4f6c_dd1du64;
        for _ in 0..200 {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            let rel = Relation::from_codes(3, 2, (0..9).filter(|c| state >> c & 1 == 1)).unwrap();
            assert_eq!(preserves(&op, &rel).unwrap().is_none(), preserves_by_rows(&op, &rel));
        }
    }

    #[test]
    fn modes_give_same_witness() {
        let op = make_universal(3).unwrap();
        let clause = Relation::from_predicate(2, 3, |t| t.contains(&1)).unwrap();
        let a = exec::with(exec::Exec::Sequential, || preserves(&op, &clause).unwrap());
        let b = exec::with(exec::Exec::Parallel, || preserves(&op, &clause).unwrap());
        assert!(a.is_some());
        assert_eq!(a, b);
    }

    #[test]
    fn closure_is_preserved_superset() {
        let op = make_near(3, 3).unwrap();
        let rel = Relation::from_tuples(3, 3, &[[0, 1, 2], [1, 1, 0], [2, 0, 1], [1, 2, 2]]).unwrap();
        let closed = close_under(&op, &rel).unwrap();
        assert!(rel.is_subset(&closed));
        assert!(preserves(&op, &closed).unwrap().is_none());
    }

    #[test]
    fn sampling_finds_obvious_witness() {
        let w = sample_witness(&make_near(3, 2).unwrap(), &r13(), 1000, 7).unwrap().unwrap();
        check_witness(&make_near(3, 2).unwrap(), &r13(), &w).unwrap();
    }

    #[test]
    fn domain_mismatch() {
        assert!(matches!(
            preserves(&make_near(3, 3).unwrap(), &r13()),
            Err(Error::DomainMismatch { .. })
        ));
    }
}
