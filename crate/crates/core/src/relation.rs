//! Finite relations over `{0..d-1}` stored as dense membership tables.
//!
//! A tuple is encoded as a base-`d` integer with position 0 as the most
//! significant digit, so numeric order on codes is lexicographic order on
//! tuples.

use std::fmt;

use crate::error::{Error, Result};

pub type Value = u32;

/// Largest dense table we are willing to allocate.
pub const MAX_TABLE: u128 = 1 << 28;

/// `d^r` as a `u128`, saturating.
pub fn table_size(domain_size: u32, arity: usize) -> u128 {
    let mut acc: u128 = 1;
    for _ in 0..arity {
        acc = acc.saturating_mul(domain_size as u128);
        if acc > u64::MAX as u128 {
            return acc;
        }
    }
    acc
}

pub fn encode(domain_size: u32, tuple: &[Value]) -> u64 {
    tuple
        .iter()
        .fold(0u64, |acc, &v| acc * domain_size as u64 + v as u64)
}

pub fn decode(domain_size: u32, arity: usize, mut code: u64) -> Vec<Value> {
    let d = domain_size as u64;
    let mut out = vec![0; arity];
    for slot in out.iter_mut().rev() {
        *slot = (code % d) as Value;
        code /= d;
    }
    out
}

/// Digit character used in the text format for a domain value.
pub fn digit_char(v: Value) -> char {
    std::char::from_digit(v, 36).expect("domain value below 36")
}

pub fn format_tuple(tuple: &[Value]) -> String {
    if tuple.is_empty() {
        return "-".to_string();
    }
    tuple.iter().map(|&v| digit_char(v)).collect()
}

pub fn parse_tuple(domain_size: u32, arity: usize, s: &str) -> Result<Vec<Value>> {
    if s == "-" {
        if arity != 0 {
            return Err(Error::ArityMismatch { expected: arity, found: 0 });
        }
        return Ok(Vec::new());
    }
    let values = s
        .chars()
        .map(|c| {
            c.to_digit(36)
                .ok_or_else(|| Error::InvalidParameter(format!("bad digit {c:?} in tuple {s:?}")))
        })
        .collect::<Result<Vec<_>>>()?;
    check_tuple(domain_size, arity, &values)?;
    Ok(values)
}

fn check_tuple(domain_size: u32, arity: usize, tuple: &[Value]) -> Result<()> {
    if tuple.len() != arity {
        return Err(Error::ArityMismatch { expected: arity, found: tuple.len() });
    }
    if let Some(&value) = tuple.iter().find(|&&v| v >= domain_size) {
        return Err(Error::ValueOutOfRange { value, domain_size });
    }
    Ok(())
}

/// An `n`-ary sign pattern; `true` marks a negated (`-`) position.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SignPattern(pub Vec<bool>);

impl SignPattern {
    pub fn positive(arity: usize) -> Self {
        SignPattern(vec![false; arity])
    }

    /// The pattern sending `t` to the all-zero tuple.
    pub fn zeroing(t: &[Value]) -> Self {
        SignPattern(t.iter().map(|&v| v == 1).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn apply(&self, t: &[Value]) -> Vec<Value> {
        t.iter()
            .zip(&self.0)
            .map(|(&v, &neg)| if neg { 1 - v } else { v })
            .collect()
    }

    pub fn parse(s: &str) -> Result<Self> {
        s.chars()
            .map(|c| match c {
                '+' => Ok(false),
                '-' => Ok(true),
                _ => Err(Error::InvalidParameter(format!("bad sign {c:?}"))),
            })
            .collect::<Result<Vec<_>>>()
            .map(SignPattern)
    }
}

impl fmt::Display for SignPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &neg in &self.0 {
            f.write_str(if neg { "-" } else { "+" })?;
        }
        Ok(())
    }
}

/// Weight set `S ⊆ {0..n}` of a totally symmetric Boolean relation.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SymmetricWeightSet {
    arity: usize,
    accepted: Vec<bool>,
}

impl SymmetricWeightSet {
    pub fn new(arity: usize, weights: impl IntoIterator<Item = usize>) -> Result<Self> {
        let mut accepted = vec![false; arity + 1];
        for w in weights {
            if w > arity {
                return Err(Error::InvalidParameter(format!("weight {w} exceeds arity {arity}")));
            }
            accepted[w] = true;
        }
        Ok(SymmetricWeightSet { arity, accepted })
    }

    pub fn full(arity: usize) -> Self {
        SymmetricWeightSet { arity, accepted: vec![true; arity + 1] }
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn contains(&self, w: usize) -> bool {
        self.accepted.get(w).copied().unwrap_or(false)
    }

    pub fn weights(&self) -> Vec<usize> {
        (0..=self.arity).filter(|&w| self.accepted[w]).collect()
    }

    pub fn is_full(&self) -> bool {
        self.accepted.iter().all(|&a| a)
    }

    pub fn as_flags(&self) -> &[bool] {
        &self.accepted
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SymmetricMode {
    ShiftDown,
    Truncate,
    Group(usize),
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Relation {
    domain_size: u32,
    arity: usize,
    bits: Vec<u64>,
    size: usize,
}

impl fmt::Debug for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Relation(d={}, r={}, {{{}}})", self.domain_size, self.arity, self)
    }
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.iter().map(|t| format_tuple(&t)).collect();
        f.write_str(&parts.join(" "))
    }
}

impl Relation {
    pub fn empty(domain_size: u32, arity: usize) -> Result<Self> {
        if domain_size < 2 {
            return Err(Error::BadDomainSize(domain_size));
        }
        let entries = table_size(domain_size, arity);
        if entries > MAX_TABLE {
            return Err(Error::TooLarge(entries));
        }
        Ok(Relation {
            domain_size,
            arity,
            bits: vec![0; (entries as usize).div_ceil(64)],
            size: 0,
        })
    }

    pub fn full(domain_size: u32, arity: usize) -> Result<Self> {
        Self::from_predicate(domain_size, arity, |_| true)
    }

    /// Builds a relation from an explicit tuple list; duplicates are ignored.
    pub fn from_tuples<T: AsRef<[Value]>>(domain_size: u32, arity: usize, tuples: &[T]) -> Result<Self> {
        let mut rel = Self::empty(domain_size, arity)?;
        for t in tuples {
            let t = t.as_ref();
            check_tuple(domain_size, arity, t)?;
            rel.insert_code(encode(domain_size, t));
        }
        Ok(rel)
    }

    pub fn from_predicate(domain_size: u32, arity: usize, pred: impl Fn(&[Value]) -> bool) -> Result<Self> {
        let mut rel = Self::empty(domain_size, arity)?;
        let mut tuple = vec![0; arity];
        for code in 0..rel.table_len() {
            if pred(&tuple) {
                rel.insert_code(code);
            }
            increment(&mut tuple, domain_size);
        }
        Ok(rel)
    }

    pub fn from_codes(domain_size: u32, arity: usize, codes: impl IntoIterator<Item = u64>) -> Result<Self> {
        let mut rel = Self::empty(domain_size, arity)?;
        let len = rel.table_len();
        for code in codes {
            if code >= len {
                return Err(Error::InvalidParameter(format!("code {code} out of range")));
            }
            rel.insert_code(code);
        }
        Ok(rel)
    }

    /// Boolean relation from the low `2^arity` bits of `mask`, bit `c` being
    /// the tuple with code `c`.
    pub fn boolean_from_mask(arity: usize, mask: u64) -> Self {
        assert!(arity <= 6, "mask form limited to arity 6");
        Self::from_codes(2, arity, (0..1u64 << arity).filter(|c| mask >> c & 1 == 1))
            .expect("arity within cap")
    }

    /// The equality relation `{(x, x)}`.
    pub fn equality(domain_size: u32) -> Result<Self> {
        Self::from_predicate(domain_size, 2, |t| t[0] == t[1])
    }

    /// Boolean symmetric relation accepting exactly the given Hamming weights.
    pub fn symmetric(weights: &SymmetricWeightSet) -> Result<Self> {
        Self::from_predicate(2, weights.arity(), |t| {
            weights.contains(t.iter().filter(|&&v| v == 1).count())
        })
    }

    fn insert_code(&mut self, code: u64) {
        let (w, b) = ((code / 64) as usize, code % 64);
        if self.bits[w] >> b & 1 == 0 {
            self.bits[w] |= 1 << b;
            self.size += 1;
        }
    }

    pub fn domain_size(&self) -> u32 {
        self.domain_size
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn is_boolean(&self) -> bool {
        self.domain_size == 2
    }

    /// Number of tuples in the relation.
    pub fn len(&self) -> usize {
        self.size
    }

    pub fn is_empty(&self) -> bool {
        self.size == 0
    }

    /// Number of entries in the membership table, `d^r`.
    pub fn table_len(&self) -> u64 {
        table_size(self.domain_size, self.arity) as u64
    }

    pub fn contains_code(&self, code: u64) -> bool {
        self.bits[(code / 64) as usize] >> (code % 64) & 1 == 1
    }

    pub fn contains(&self, tuple: &[Value]) -> bool {
        tuple.len() == self.arity
            && tuple.iter().all(|&v| v < self.domain_size)
            && self.contains_code(encode(self.domain_size, tuple))
    }

    /// Member codes in ascending (lexicographic) order.
    pub fn codes(&self) -> impl Iterator<Item = u64> + '_ {
        self.bits.iter().enumerate().flat_map(|(w, &word)| {
            let mut word = word;
            std::iter::from_fn(move || {
                if word == 0 {
                    return None;
                }
                let b = word.trailing_zeros() as u64;
                word &= word - 1;
                Some(w as u64 * 64 + b)
            })
        })
    }

    /// Member tuples in lexicographic order.
    pub fn iter(&self) -> impl Iterator<Item = Vec<Value>> + '_ {
        self.codes().map(|c| decode(self.domain_size, self.arity, c))
    }

    pub fn is_subset(&self, other: &Relation) -> bool {
        self.domain_size == other.domain_size
            && self.arity == other.arity
            && self.bits.iter().zip(&other.bits).all(|(a, b)| a & !b == 0)
    }

    pub fn complement(&self) -> Relation {
        let mut out = self.clone();
        let len = self.table_len();
        for (w, word) in out.bits.iter_mut().enumerate() {
            *word = !*word;
            let lo = w as u64 * 64;
            if lo + 64 > len {
                let keep = len - lo;
                *word &= if keep == 64 { u64::MAX } else { (1u64 << keep) - 1 };
            }
        }
        out.size = len as usize - self.size;
        out
    }

    /// `{ pr_indices(t) | t ∈ R }`; indices may repeat.
    pub fn project(&self, indices: &[usize]) -> Result<Relation> {
        self.check_indices(indices)?;
        let mut out = Relation::empty(self.domain_size, indices.len())?;
        for t in self.iter() {
            let code = indices
                .iter()
                .fold(0u64, |acc, &i| acc * self.domain_size as u64 + t[i] as u64);
            out.insert_code(code);
        }
        Ok(out)
    }

    fn check_indices(&self, indices: &[usize]) -> Result<()> {
        match indices.iter().find(|&&i| i >= self.arity) {
            Some(&index) => Err(Error::IndexOutOfRange { index, arity: self.arity }),
            None => Ok(()),
        }
    }

    /// `R^s`: every member flipped at the negated positions.
    pub fn apply_sign_pattern(&self, s: &SignPattern) -> Result<Relation> {
        if !self.is_boolean() {
            return Err(Error::NotBoolean);
        }
        if s.len() != self.arity {
            return Err(Error::ArityMismatch { expected: self.arity, found: s.len() });
        }
        let flip = encode(2, &s.0.iter().map(|&b| b as Value).collect::<Vec<_>>());
        Relation::from_codes(2, self.arity, self.codes().map(|c| c ^ flip))
    }

    /// `R_{i=c}`; with `drop` the fixed position is removed.
    pub fn fix_argument(&self, i: usize, c: Value, drop: bool) -> Result<Relation> {
        self.check_indices(&[i])?;
        if c >= self.domain_size {
            return Err(Error::ValueOutOfRange { value: c, domain_size: self.domain_size });
        }
        let kept = self.iter().filter(|t| t[i] == c);
        if drop {
            let tuples: Vec<Vec<Value>> = kept
                .map(|mut t| {
                    t.remove(i);
                    t
                })
                .collect();
            Relation::from_tuples(self.domain_size, self.arity - 1, &tuples)
        } else {
            let tuples: Vec<Vec<Value>> = kept.collect();
            Relation::from_tuples(self.domain_size, self.arity, &tuples)
        }
    }

    /// Hamming-weight set when membership depends only on the weight.
    pub fn symmetric_weights(&self) -> Option<SymmetricWeightSet> {
        if !self.is_boolean() {
            return None;
        }
        let n = self.arity;
        // 0 = unseen, 1 = member, 2 = non-member
        let mut seen = vec![0u8; n + 1];
        for code in 0..self.table_len() {
            let w = code.count_ones() as usize;
            let state = if self.contains_code(code) { 1 } else { 2 };
            if seen[w] == 0 {
                seen[w] = state;
            } else if seen[w] != state {
                return None;
            }
        }
        SymmetricWeightSet::new(n, (0..=n).filter(|&w| seen[w] == 1)).ok()
    }

    /// Shift-down, truncate and grouping, each built from `fix_argument` and
    /// `conjoin` so the result is qfpp-definable from `self`.
    pub fn symmetric_transform(&self, mode: SymmetricMode) -> Result<Relation> {
        if self.symmetric_weights().is_none() {
            return Err(Error::NotSymmetric);
        }
        match mode {
            SymmetricMode::ShiftDown | SymmetricMode::Truncate if self.arity == 0 => {
                Err(Error::InvalidParameter("cannot shorten a nullary relation".into()))
            }
            SymmetricMode::ShiftDown => self.fix_argument(self.arity - 1, 1, true),
            SymmetricMode::Truncate => self.fix_argument(self.arity - 1, 0, true),
            SymmetricMode::Group(p) => {
                if p < 2 {
                    return Err(Error::InvalidParameter(format!("group size {p} must exceed 1")));
                }
                let mut rel = self.clone();
                while !rel.arity.is_multiple_of(p) {
                    rel = rel.fix_argument(rel.arity - 1, 0, true)?;
                }
                let scope: Vec<usize> = (0..rel.arity).map(|i| i / p).collect();
                conjoin(2, &[(&rel, scope.as_slice())], rel.arity / p)
            }
        }
    }
}

/// Advances `tuple` to the next tuple in lexicographic order (odometer).
pub(crate) fn increment(tuple: &mut [Value], domain_size: u32) {
    for slot in tuple.iter_mut().rev() {
        *slot += 1;
        if *slot < domain_size {
            return;
        }
        *slot = 0;
    }
}

/// Quantifier-free conjunction: the `n_vars`-ary relation of assignments
/// satisfying every `(relation, scope)` application. Scopes may repeat
/// variables.
pub fn conjoin(domain_size: u32, defs: &[(&Relation, &[usize])], n_vars: usize) -> Result<Relation> {
    for (rel, scope) in defs {
        if rel.domain_size() != domain_size {
            return Err(Error::DomainMismatch { left: domain_size, right: rel.domain_size() });
        }
        if scope.len() != rel.arity() {
            return Err(Error::ArityMismatch { expected: rel.arity(), found: scope.len() });
        }
        if let Some(&index) = scope.iter().find(|&&v| v >= n_vars) {
            return Err(Error::IndexOutOfRange { index, arity: n_vars });
        }
    }
    Relation::from_predicate(domain_size, n_vars, |a| {
        defs.iter().all(|(rel, scope)| {
            let code = scope
                .iter()
                .fold(0u64, |acc, &v| acc * domain_size as u64 + a[v] as u64);
            rel.contains_code(code)
        })
    })
}
