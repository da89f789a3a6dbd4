use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{invalid, ExtensionOracle};
use crate::error::{Error, Result};
use crate::gf2::{Gf2Row, Gf2System};
use crate::relation::{Relation, Value};

/// Parity pad: `y_j = ⊕_{s ∈ S_j} x_s` over `n` base variables.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParityPadSpec {
    pub n: usize,
    pub parity_sets: Vec<Vec<usize>>,
    pub rng_seed: u64,
}

impl ParityPadSpec {
    pub fn new(n: usize, mut parity_sets: Vec<Vec<usize>>, rng_seed: u64) -> Result<Self> {
        for set in &mut parity_sets {
            set.sort_unstable();
            set.dedup();
            if let Some(&index) = set.iter().find(|&&s| s >= n) {
                return Err(Error::IndexOutOfRange { index, arity: n });
            }
        }
        Ok(ParityPadSpec { n, parity_sets, rng_seed })
    }

    /// `m` independent uniform subsets of `0..n`.
    pub fn random(n: usize, m: usize, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let parity_sets = (0..m)
            .map(|_| (0..n).filter(|_| rng.gen::<bool>()).collect())
            .collect();
        ParityPadSpec { n, parity_sets, rng_seed: seed }
    }

    pub fn m(&self) -> usize {
        self.parity_sets.len()
    }

    /// Pad values `y(x)` for a base assignment.
    pub fn pad_values(&self, x: &[Value]) -> Vec<Value> {
        self.parity_sets
            .iter()
            .map(|set| set.iter().fold(0, |acc, &s| acc ^ x[s]))
            .collect()
    }

    /// Pad sets as bit masks over the base variables (`n ≤ 64`).
    pub fn masks(&self) -> Vec<u64> {
        self.parity_sets
            .iter()
            .map(|set| set.iter().fold(0u64, |acc, &s| acc | 1 << s))
            .collect()
    }

    /// One line per pad, comma-separated indices, `-` for the empty set.
    pub fn to_text(&self) -> String {
        self.parity_sets
            .iter()
            .map(|set| {
                if set.is_empty() {
                    "-".to_string()
                } else {
                    set.iter().map(usize::to_string).collect::<Vec<_>>().join(",")
                }
            })
            .map(|line| line + "\n")
            .collect()
    }

    pub fn from_text(n: usize, text: &str, seed: u64) -> Result<Self> {
        let sets = text
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'))
            .map(|l| {
                if l == "-" {
                    return Ok(Vec::new());
                }
                l.split(',')
                    .map(|s| s.trim().parse::<usize>().map_err(|_| invalid(format!("bad pad index {s:?}"))))
                    .collect()
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(n, sets, seed)
    }
}

/// Extension oracle for `R(x_C) ∧ (y = pad(x))` where `R` excludes a single
/// tuple. Positions `0..n` are base variables, `n..n+m` the pads.
#[derive(Debug, Clone)]
pub struct PaddedClauseOracle {
    clause: Vec<usize>,
    excluded: Vec<Value>,
    pad: ParityPadSpec,
}

impl PaddedClauseOracle {
    pub fn new(clause: Vec<usize>, excluded: Vec<Value>, pad: ParityPadSpec) -> Result<Self> {
        if clause.len() != excluded.len() {
            return Err(Error::ArityMismatch { expected: clause.len(), found: excluded.len() });
        }
        if let Some(&index) = clause.iter().find(|&&c| c >= pad.n) {
            return Err(Error::IndexOutOfRange { index, arity: pad.n });
        }
        let mut sorted = clause.clone();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted.len() != clause.len() {
            return Err(invalid("clause variables must be distinct"));
        }
        if let Some(&value) = excluded.iter().find(|&&v| v > 1) {
            return Err(Error::ValueOutOfRange { value, domain_size: 2 });
        }
        Ok(PaddedClauseOracle { clause, excluded, pad })
    }

    /// `clause_rel` must be `{0,1}^k` minus exactly one tuple.
    pub fn from_clause_relation(clause_rel: &Relation, scope: Vec<usize>, pad: ParityPadSpec) -> Result<Self> {
        if !clause_rel.is_boolean() {
            return Err(Error::NotBoolean);
        }
        let k = clause_rel.arity();
        if clause_rel.len() as u64 + 1 != 1u64 << k {
            return Err(invalid("clause relation must exclude exactly one tuple"));
        }
        let excluded = clause_rel.complement().iter().next().expect("one excluded tuple");
        Self::new(scope, excluded, pad)
    }

    pub fn clause(&self) -> &[usize] {
        &self.clause
    }

    pub fn excluded(&self) -> &[Value] {
        &self.excluded
    }

    pub fn pad(&self) -> &ParityPadSpec {
        &self.pad
    }
}

impl ExtensionOracle for PaddedClauseOracle {
    fn arity(&self) -> usize {
        self.pad.n + self.pad.m()
    }

    fn domain_size(&self) -> u32 {
        2
    }

    fn accepts(&self, partial: &[Option<Value>]) -> bool {
        let n = self.pad.n;
        let all_forced = self
            .clause
            .iter()
            .zip(&self.excluded)
            .all(|(&c, &t)| partial[c] == Some(t));
        if all_forced {
            return false;
        }
        let mut sys = Gf2System::new(n);
        for (i, v) in partial[..n].iter().enumerate() {
            if let Some(v) = v {
                sys.push(Gf2Row::from_vars(n, [i], *v == 1));
            }
        }
        for (set, v) in self.pad.parity_sets.iter().zip(&partial[n..]) {
            if let Some(v) = v {
                sys.push(Gf2Row::from_vars(n, set.iter().copied(), *v == 1));
            }
        }
        if !sys.is_consistent() {
            return false;
        }
        // Reject iff every solution agrees with the excluded tuple on the
        // clause variables.
        !self
            .clause
            .iter()
            .zip(&self.excluded)
            .all(|(&c, &t)| sys.implies(&Gf2Row::from_vars(n, [c], t == 1)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::{materialize, to_partial};

    fn truth(o: &PaddedClauseOracle) -> Relation {
        let n = o.pad.n;
        let m = o.pad.m();
        Relation::from_predicate(2, n + m, |t| {
            let x = &t[..n];
            let hits_excluded = o.clause.iter().zip(&o.excluded).all(|(&c, &e)| x[c] == e);
            !hits_excluded && o.pad.pad_values(x) == t[n..]
        })
        .unwrap()
    }

    #[test]
    fn trivial_cases() {
        let pad = ParityPadSpec::random(3, 2, 5);
        let o = PaddedClauseOracle::new(vec![0, 1], vec![0, 1], pad).unwrap();
        assert!(o.query(&[], &[]));
        assert!(!o.query(&[0, 1], &[0, 1]));
    }

    #[test]
    fn exhaustive_against_enumeration() {
        for seed in 0..20 {
            let pad = ParityPadSpec::random(3, 2, seed);
            let excluded = vec![(seed & 1) as Value, (seed >> 1 & 1) as Value];
            let o = PaddedClauseOracle::new(vec![0, 2], excluded, pad).unwrap();
            let rel = truth(&o);
            assert_eq!(materialize(&o).unwrap(), rel);
            // all 3^5 partial queries
            for code in 0..243u32 {
                let mut c = code;
                let mut idx = Vec::new();
                let mut vals = Vec::new();
                for i in 0..5 {
                    if c % 3 < 2 {
                        idx.push(i);
                        vals.push(c % 3);
                    }
                    c /= 3;
                }
                let partial = to_partial(5, 2, &idx, &vals).unwrap();
                let expect = rel.iter().any(|t| partial.iter().zip(&t).all(|(p, &v)| p.is_none_or(|p| p == v)));
                assert_eq!(o.query(&idx, &vals), expect, "seed {seed} query {idx:?}={vals:?}");
            }
        }
    }

    #[test]
    fn text_round_trip() {
        let pad = ParityPadSpec::new(4, vec![vec![2, 0], vec![], vec![3]], 9).unwrap();
        let text = pad.to_text();
        assert_eq!(text, "0,2\n-\n3\n");
        assert_eq!(ParityPadSpec::from_text(4, &text, 9).unwrap(), pad);
        assert!(ParityPadSpec::new(2, vec![vec![2]], 0).is_err());
    }

    #[test]
    fn random_is_deterministic() {
        assert_eq!(ParityPadSpec::random(6, 10, 3), ParityPadSpec::random(6, 10, 3));
        assert_eq!(ParityPadSpec::random(6, 0, 3).m(), 0);
    }
}
