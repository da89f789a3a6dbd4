//! Random parity padding and universal-padding checks.
//!
//! A sequence of `r` tuples in `{0,1}^n` on which a partial operation `p` is
//! defined is a choice of one domain column of `p` per coordinate, so there
//! are `|domain(p)|^n` of them. A parity pad `y = ⊕_{i∈S} x_i` contributes
//! the XOR of the chosen columns over `S`; the padded application stays
//! defined iff that column is again in `domain(p)`. A pad is universal for
//! `p` when no defined application on padded tuples is non-projective.

use num_bigint::BigUint;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::exec;
use crate::ops::classify::OpKind;
use crate::ops::pattern::PartialOp;
use crate::oracle::ParityPadSpec;
use crate::relation::{decode, Relation, Value};
use crate::solver::ENUM_GUARD;

/// Largest `|domain(p)|` for which column sets are enumerated exhaustively.
const MAX_SPAN_DOMAIN: usize = 20;

/// `m` independent uniform subsets of `0..n`, reproducible from `seed`.
pub fn random_parity_padding(n: usize, m: usize, seed: u64) -> ParityPadSpec {
    ParityPadSpec::random(n, m, seed)
}

/// `{(t, y(t)) | t ∈ R}` for a Boolean `R` of arity `spec.n`.
pub fn pad_relation(rel: &Relation, spec: &ParityPadSpec) -> Result<Relation> {
    if !rel.is_boolean() {
        return Err(Error::NotBoolean);
    }
    if rel.arity() != spec.n {
        return Err(Error::ArityMismatch { expected: spec.n, found: rel.arity() });
    }
    let tuples: Vec<Vec<Value>> = rel
        .iter()
        .map(|mut t| {
            let y = spec.pad_values(&t);
            t.extend(y);
            t
        })
        .collect();
    Relation::from_tuples(2, spec.n + spec.m(), &tuples)
}

/// Domain columns of a Boolean operation as XOR-able codes, with the rows
/// that agree with the column's value as a bit mask.
struct Columns {
    codes: Vec<u64>,
    agree: Vec<u64>,
    index: std::collections::HashMap<u64, usize>,
    all_rows: u64,
}

impl Columns {
    fn of(op: &PartialOp) -> Result<Self> {
        if op.domain_size() != 2 {
            return Err(Error::NotBoolean);
        }
        let r = op.arity();
        if r > 63 {
            return Err(Error::TooLarge(r as u128));
        }
        let mut codes = Vec::new();
        let mut agree = Vec::new();
        for &(code, v) in op.entries() {
            let t = decode(2, r, code);
            codes.push(code);
            agree.push(t.iter().enumerate().filter(|(_, &x)| x == v).fold(0u64, |m, (j, _)| m | 1 << j));
        }
        let index = codes.iter().enumerate().map(|(i, &c)| (c, i)).collect();
        Ok(Columns { codes, agree, index, all_rows: (1u64 << r) - 1 })
    }

    fn len(&self) -> usize {
        self.codes.len()
    }

    fn lookup(&self, code: u64) -> Option<usize> {
        self.index.get(&code).copied()
    }

    /// Projective: one argument row agrees with the result everywhere.
    fn projective(&self, chosen: &[usize]) -> bool {
        chosen.iter().fold(self.all_rows, |m, &c| m & self.agree[c]) != 0
    }
}

/// Is the padded application for the base columns `chosen` defined and
/// non-projective?
fn padded_nonprojective(cols: &Columns, masks: &[u64], chosen: &[usize]) -> bool {
    let mut rows = chosen.iter().fold(cols.all_rows, |m, &c| m & cols.agree[c]);
    for &mask in masks {
        let code = chosen.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).fold(0, |x, (_, &c)| x ^ cols.codes[c]);
        match cols.lookup(code) {
            Some(c) => rows &= cols.agree[c],
            None => return false,
        }
    }
    rows == 0
}

/// Exact number of base column choices whose padded application is defined
/// and non-projective. Zero means the pad is universal for `op`.
pub fn count_nonprojective_remaining(op: &PartialOp, spec: &ParityPadSpec) -> Result<BigUint> {
    let cols = Columns::of(op)?;
    if spec.n > 64 {
        return Err(Error::TooLarge(spec.n as u128));
    }
    let total = (cols.len() as u128).checked_pow(spec.n as u32).unwrap_or(u128::MAX);
    if total > ENUM_GUARD {
        return Err(Error::Infeasible(total));
    }
    let masks = spec.masks();
    let n = spec.n;
    let prefix = n.min(2);
    let d = cols.len();
    let count = exec::sum_range(0..d.pow(prefix as u32), |p| {
        let mut chosen = vec![0; n];
        let mut rest = p;
        for slot in chosen[..prefix].iter_mut().rev() {
            *slot = rest % d;
            rest /= d;
        }
        count_from(&cols, &masks, &mut chosen, prefix)
    });
    Ok(BigUint::from(count))
}

fn count_from(cols: &Columns, masks: &[u64], chosen: &mut Vec<usize>, i: usize) -> u128 {
    if i == chosen.len() {
        return u128::from(padded_nonprojective(cols, masks, chosen));
    }
    (0..cols.len())
        .map(|c| {
            chosen[i] = c;
            count_from(cols, masks, chosen, i + 1)
        })
        .sum()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VerifyMode {
    Exact,
    Sample(u64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Universality {
    Yes,
    No,
    /// No counterexample among the sampled column choices.
    ProbablyYes,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PaddingReport {
    pub spec: ParityPadSpec,
    pub op: PartialOp,
    /// Exact count, or the sampled hit rate scaled to `|domain|^n`.
    pub nonprojective_remaining: BigUint,
    pub exact: bool,
    pub is_universal: Universality,
}

pub fn verify_universal_padding(op: &PartialOp, spec: &ParityPadSpec, mode: VerifyMode) -> Result<PaddingReport> {
    let (count, exact, verdict) = match mode {
        VerifyMode::Exact => {
            let c = count_nonprojective_remaining(op, spec)?;
            let v = if c == BigUint::ZERO { Universality::Yes } else { Universality::No };
            (c, true, v)
        }
        VerifyMode::Sample(trials) => {
            let cols = Columns::of(op)?;
            let masks = spec.masks();
            let mut rng = ChaCha8Rng::seed_from_u64(spec.rng_seed ^ 0x5eed);
            let mut chosen = vec![0; spec.n];
            let mut hits = 0u64;
            for _ in 0..trials {
                for c in chosen.iter_mut() {
                    *c = rng.gen_range(0..cols.len());
                }
                hits += u64::from(padded_nonprojective(&cols, &masks, &chosen));
            }
            let total = BigUint::from(cols.len()).pow(spec.n as u32);
            let estimate = if trials == 0 { BigUint::ZERO } else { total * hits / trials };
            let v = if hits > 0 { Universality::No } else { Universality::ProbablyYes };
            (estimate, false, v)
        }
    };
    Ok(PaddingReport { spec: spec.clone(), op: op.clone(), nonprojective_remaining: count, exact, is_universal: verdict })
}

/// Fraction of single random pads that keep a non-projective base
/// application defined, estimated over `trials` draws. Each draw picks a
/// uniformly random non-projective column choice over `n` coordinates
/// (by rejection) and a uniformly random parity set.
pub fn survival_rate_monte_carlo(op: &PartialOp, n: usize, trials: u64, seed: u64) -> Result<f64> {
    let cols = Columns::of(op)?;
    if n > 64 {
        return Err(Error::TooLarge(n as u128));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut chosen = vec![0; n];
    let mut kept = 0u64;
    for _ in 0..trials {
        let mut attempts = 0;
        loop {
            for c in chosen.iter_mut() {
                *c = rng.gen_range(0..cols.len());
            }
            if !cols.projective(&chosen) {
                break;
            }
            attempts += 1;
            if attempts > 100_000 {
                return Err(Error::Precondition(format!("no non-projective application of {} over {n} coordinates", op.name())));
            }
        }
        let mask: u64 = rng.gen::<u64>() & if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
        let code = chosen.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).fold(0, |x, (_, &c)| x ^ cols.codes[c]);
        kept += u64::from(cols.lookup(code).is_some());
    }
    Ok(kept as f64 / trials.max(1) as f64)
}

/// Smallest and largest exact survival probability of a single random pad
/// over all non-projective applications. A uniformly random parity of the
/// chosen columns is uniform on their span, so the probability for a set
/// `T` of columns is `|span(T) ∩ domain| / |span(T)|`.
pub fn survival_probability_bounds(op: &PartialOp) -> Result<(f64, f64)> {
    let cols = Columns::of(op)?;
    if cols.len() > MAX_SPAN_DOMAIN {
        return Err(Error::Infeasible(1u128 << cols.len()));
    }
    let d = cols.len();
    let probs: Vec<Option<f64>> = exec::map_range(1..1usize << d, |set| {
        let chosen: Vec<usize> = (0..d).filter(|&i| set >> i & 1 == 1).collect();
        if cols.projective(&chosen) {
            return None;
        }
        let mut span = vec![0u64];
        for &c in &chosen {
            let v = cols.codes[c];
            if !span.contains(&v) {
                let shifted: Vec<u64> = span.iter().map(|&s| s ^ v).collect();
                span.extend(shifted);
            }
        }
        let inside = span.iter().filter(|&&s| cols.lookup(s).is_some()).count();
        Some(inside as f64 / span.len() as f64)
    });
    let probs: Vec<f64> = probs.into_iter().flatten().collect();
    if probs.is_empty() {
        return Err(Error::Precondition(format!("{} has no non-projective application", op.name())));
    }
    let lo = probs.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = probs.iter().copied().fold(0.0, f64::max);
    Ok((lo, hi))
}

/// `c` in `m ≥ c·n + log2(1/ε)`: `log2 |domain(p)| / log2(1/q)` with `q` the
/// largest exact single-pad survival probability.
pub fn padding_constant(kind: OpKind) -> Result<f64> {
    let op = kind.build(2)?;
    let (_, q) = survival_probability_bounds(&op)?;
    if q >= 1.0 {
        return Err(Error::Precondition(format!("parity pads never eliminate some application of {kind}")));
    }
    Ok((op.domain_len() as f64).log2() / (1.0 / q).log2())
}

/// `⌈c·n + log2(1/ε)⌉` parity bits.
pub fn recommended_padding_size(kind: OpKind, n: usize, eps: f64) -> Result<usize> {
    if !(eps > 0.0 && eps <= 1.0) {
        return Err(Error::InvalidParameter(format!("eps must lie in (0, 1], got {eps}")));
    }
    let c = padding_constant(kind)?;
    Ok((c * n as f64 + (1.0 / eps).log2() - 1e-9).ceil().max(0.0) as usize)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ops::pattern::{make_edge, make_near, make_universal};
    use crate::ops::preserve::preserves;

    #[test]
    fn padding_a_relation() {
        let full = Relation::full(2, 2).unwrap();
        let spec = ParityPadSpec::new(2, vec![vec![0, 1]], 0).unwrap();
        let padded = pad_relation(&full, &spec).unwrap();
        let expect = Relation::from_tuples(2, 3, &[[0, 0, 0], [0, 1, 1], [1, 0, 1], [1, 1, 0]]).unwrap();
        assert_eq!(padded, expect);
        let spec = random_parity_padding(5, 7, 3);
        assert_eq!(spec, random_parity_padding(5, 7, 3));
        assert_eq!(random_parity_padding(5, 0, 3).m(), 0);
        let rel = Relation::from_predicate(2, 5, |t| t[0] != t[3] || t[1] == 1).unwrap();
        let padded = pad_relation(&rel, &spec).unwrap();
        assert_eq!(padded.len(), rel.len());
        assert_eq!(padded.project(&[0, 1, 2, 3, 4]).unwrap(), rel);
        assert!(pad_relation(&full, &spec).is_err());
    }

    /// Direct check: every sequence of padded tuples on which `op` is
    /// defined, classified by materialising the tuples.
    fn count_by_tuples(op: &PartialOp, spec: &ParityPadSpec) -> u64 {
        let n = spec.n;
        let r = op.arity();
        let padded = pad_relation(&Relation::full(2, n).unwrap(), spec).unwrap();
        let width = padded.arity();
        let rows: Vec<Vec<Value>> = padded.iter().collect();
        let mut count = 0;
        let mut pick = vec![0usize; r];
        loop {
            let tuples: Vec<&Vec<Value>> = pick.iter().map(|&i| &rows[i]).collect();
            let result: Option<Vec<Value>> = (0..width)
                .map(|c| op.apply(&tuples.iter().map(|t| t[c]).collect::<Vec<_>>()))
                .collect();
            if let Some(res) = result {
                if !tuples.iter().any(|t| **t == res) {
                    count += 1;
                }
            }
            let mut i = 0;
            while i < r {
                pick[i] += 1;
                if pick[i] < rows.len() {
                    break;
                }
                pick[i] = 0;
                i += 1;
            }
            if i == r {
                return count;
            }
        }
    }

    #[test]
    fn counts_match_tuple_enumeration() {
        for seed in 0..6 {
            for (n, m) in [(1, 0), (2, 0), (2, 1), (2, 3), (3, 2)] {
                let spec = random_parity_padding(n, m, seed);
                for op in [make_edge(2, 2).unwrap(), make_near(3, 2).unwrap()] {
                    let fast = count_nonprojective_remaining(&op, &spec).unwrap();
                    assert_eq!(fast, BigUint::from(count_by_tuples(&op, &spec)), "{} n={n} m={m}", op.name());
                }
            }
        }
    }

    #[test]
    fn edge2_without_pads() {
        let op = make_edge(2, 2).unwrap();
        assert_eq!(op.domain_len(), 6);
        let none = ParityPadSpec::new(1, vec![], 0).unwrap();
        assert_eq!(count_nonprojective_remaining(&op, &none).unwrap(), BigUint::ZERO);
        let two = ParityPadSpec::new(2, vec![], 0).unwrap();
        let report = verify_universal_padding(&op, &two, VerifyMode::Exact).unwrap();
        assert_eq!(report.is_universal, Universality::No);
        assert!(report.nonprojective_remaining > BigUint::ZERO);
    }

    #[test]
    fn total_operation() {
        let near3 = make_near(3, 2).unwrap();
        assert_eq!(near3.domain_len(), 8);
        for m in [0, 5, 40] {
            let spec = random_parity_padding(3, m, 1);
            let report = verify_universal_padding(&near3, &spec, VerifyMode::Exact).unwrap();
            assert_eq!(report.is_universal, Universality::No);
        }
        // Majority of three tuples in {0,1}^2, padded or not, is one of them.
        for n in 1..=2 {
            let spec = random_parity_padding(n, 4, 1);
            assert_eq!(count_nonprojective_remaining(&near3, &spec).unwrap(), BigUint::ZERO);
        }
    }

    #[test]
    fn edge2_n2_exact_verification() {
        let op = make_edge(2, 2).unwrap();
        let spec = random_parity_padding(2, 20, 7);
        let report = verify_universal_padding(&op, &spec, VerifyMode::Exact).unwrap();
        assert!(report.exact);
        assert_eq!(report.is_universal, Universality::Yes);
        let sampled = verify_universal_padding(&op, &spec, VerifyMode::Sample(2000)).unwrap();
        assert_eq!(sampled.is_universal, Universality::ProbablyYes);
    }

    #[test]
    fn universal_pads_preserve_every_padded_relation() {
        let mut checked = 0;
        for seed in 0..40u64 {
            let n = 2 + seed as usize % 3;
            for op in [make_edge(2, 2).unwrap(), make_edge(3, 2).unwrap()] {
                let spec = random_parity_padding(n, 5 * n, seed);
                let report = verify_universal_padding(&op, &spec, VerifyMode::Exact).unwrap();
                if report.is_universal != Universality::Yes {
                    continue;
                }
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                for _ in 0..3 {
                    let codes: Vec<u64> = (0..1u64 << n).filter(|_| rng.gen_bool(0.5)).collect();
                    let rel = Relation::from_codes(2, n, codes).unwrap();
                    let padded = pad_relation(&rel, &spec).unwrap();
                    assert!(preserves(&op, &padded).unwrap().is_none());
                    checked += 1;
                }
            }
        }
        assert!(checked >= 100);
    }

    #[test]
    fn exact_survival_constants() {
        let cases = [
            (make_edge(2, 2).unwrap(), 0.75),
            (make_edge(3, 2).unwrap(), 0.5),
            (make_near(4, 2).unwrap(), 10.0 / 16.0),
            (make_near(5, 2).unwrap(), 12.0 / 32.0),
            (make_universal(3).unwrap(), 0.5),
        ];
        for (op, q) in cases {
            let (lo, hi) = survival_probability_bounds(&op).unwrap();
            assert_eq!((lo, hi), (q, q), "{}", op.name());
            let rate = survival_rate_monte_carlo(&op, 6, 20_000, 1).unwrap();
            assert!((rate - q).abs() < 0.02, "{} {rate}", op.name());
        }
    }

    #[test]
    fn constants() {
        let c2 = padding_constant(OpKind::Edge(2)).unwrap();
        assert!((c2 - (1.0 + 3f64.log2()) / (2.0 - 3f64.log2())).abs() < 1e-12);
        assert_eq!(format!("{c2:.2}"), "6.23");
        assert!((padding_constant(OpKind::Edge(3)).unwrap() - 3.0).abs() < 1e-12);
        assert_eq!(recommended_padding_size(OpKind::Edge(2), 10, 2f64.powi(-10)).unwrap(), 73);
        assert_eq!(recommended_padding_size(OpKind::Edge(3), 10, 0.5).unwrap(), 31);
        assert_eq!(recommended_padding_size(OpKind::Edge(3), 10, 1.0).unwrap(), 30);
        assert!(recommended_padding_size(OpKind::Near(3), 4, 0.5).is_err());
    }
}
