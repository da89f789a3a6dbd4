//! Polymorphism patterns over the symbols `{x, y}` and the partial operations
//! they induce over a concrete domain.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigUint;

use crate::error::{Error, Result};
use crate::relation::{decode, encode, table_size, Value};

/// Pattern symbol: `X` or `Y`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Sym {
    X,
    Y,
}

impl Sym {
    fn eval(self, x: Value, y: Value) -> Value {
        match self {
            Sym::X => x,
            Sym::Y => y,
        }
    }

    fn char(self) -> char {
        match self {
            Sym::X => 'x',
            Sym::Y => 'y',
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PatternRow {
    pub tuple: Vec<Sym>,
    pub result: Sym,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PolymorphismPattern {
    arity: usize,
    rows: Vec<PatternRow>,
}

impl PolymorphismPattern {
    pub fn new(arity: usize, rows: Vec<PatternRow>) -> Result<Self> {
        if arity == 0 || rows.is_empty() {
            return Err(Error::InvalidParameter("pattern needs a positive arity and a row".into()));
        }
        for row in &rows {
            if row.tuple.len() != arity {
                return Err(Error::ArityMismatch { expected: arity, found: row.tuple.len() });
            }
            if !row.tuple.contains(&row.result) {
                return Err(Error::InconsistentPattern(format!(
                    "result {} does not occur in its row",
                    row.result.char()
                )));
            }
        }
        Ok(PolymorphismPattern { arity, rows })
    }

    /// Parses `xxy>y;xyx>y`.
    pub fn parse(s: &str) -> Result<Self> {
        let sym = |c: char| match c {
            'x' => Ok(Sym::X),
            'y' => Ok(Sym::Y),
            _ => Err(Error::InvalidParameter(format!("bad pattern symbol {c:?}"))),
        };
        let mut rows = Vec::new();
        for part in s.split(';').map(str::trim).filter(|p| !p.is_empty()) {
            let (lhs, rhs) = part
                .split_once('>')
                .ok_or_else(|| Error::InvalidParameter(format!("pattern row {part:?} lacks '>'")))?;
            let tuple = lhs.trim().chars().map(sym).collect::<Result<Vec<_>>>()?;
            let mut rhs = rhs.trim().chars();
            let result = match (rhs.next(), rhs.next()) {
                (Some(c), None) => sym(c)?,
                _ => return Err(Error::InvalidParameter(format!("pattern row {part:?} needs one result"))),
            };
            rows.push(PatternRow { tuple, result });
        }
        let arity = rows.first().map_or(0, |r| r.tuple.len());
        Self::new(arity, rows)
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn rows(&self) -> &[PatternRow] {
        &self.rows
    }

    pub fn near(k: usize) -> Result<Self> {
        if k < 3 {
            return Err(Error::InvalidParameter(format!("near-unanimity needs k >= 3, got {k}")));
        }
        let rows = (0..k)
            .map(|i| PatternRow {
                tuple: (0..k).map(|j| if j == i { Sym::Y } else { Sym::X }).collect(),
                result: Sym::X,
            })
            .collect();
        Self::new(k, rows)
    }

    pub fn edge(k: usize) -> Result<Self> {
        if k < 2 {
            return Err(Error::InvalidParameter(format!("edge needs k >= 2, got {k}")));
        }
        let n = k + 1;
        let with_x_at = |xs: &[usize]| PatternRow {
            tuple: (0..n).map(|j| if xs.contains(&j) { Sym::X } else { Sym::Y }).collect(),
            result: Sym::Y,
        };
        let mut rows = vec![with_x_at(&[0, 1]), with_x_at(&[0, 2])];
        rows.extend((3..n).map(|i| with_x_at(&[i])));
        Self::new(n, rows)
    }

    /// Zero rows of the `k`-universal operation. Column `i` carries the
    /// `k`-bit value `i + 1`, row `j` reading bit `k-1-j` (row 0 is the most
    /// significant bit).
    pub fn universal(k: usize) -> Result<Self> {
        if !(2..=6).contains(&k) {
            return Err(Error::InvalidParameter(format!("universal needs 2 <= k <= 6, got {k}")));
        }
        let n = (1usize << k) - 1;
        let rows = (0..k)
            .map(|j| PatternRow {
                tuple: (0..n)
                    .map(|i| if (i + 1) >> (k - 1 - j) & 1 == 1 { Sym::Y } else { Sym::X })
                    .collect(),
                result: Sym::X,
            })
            .collect();
        Self::new(n, rows)
    }
}

impl fmt::Display for PolymorphismPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<String> = self
            .rows
            .iter()
            .map(|r| {
                let lhs: String = r.tuple.iter().map(|s| s.char()).collect();
                format!("{lhs}>{}", r.result.char())
            })
            .collect();
        f.write_str(&rows.join(";"))
    }
}

/// A partial operation given by its finite table, sorted by the base-`d` code
/// of the argument column.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PartialOp {
    name: String,
    domain_size: u32,
    arity: usize,
    table: Vec<(u64, Value)>,
}

impl PartialOp {
    pub fn from_table(
        name: impl Into<String>,
        domain_size: u32,
        arity: usize,
        entries: impl IntoIterator<Item = (Vec<Value>, Value)>,
    ) -> Result<Self> {
        if domain_size < 2 {
            return Err(Error::BadDomainSize(domain_size));
        }
        if table_size(domain_size, arity) > u64::MAX as u128 {
            return Err(Error::TooLarge(table_size(domain_size, arity)));
        }
        let mut map = BTreeMap::new();
        for (args, value) in entries {
            if args.len() != arity {
                return Err(Error::ArityMismatch { expected: arity, found: args.len() });
            }
            if let Some(&v) = args.iter().chain([&value]).find(|&&v| v >= domain_size) {
                return Err(Error::ValueOutOfRange { value: v, domain_size });
            }
            let code = encode(domain_size, &args);
            if let Some(prev) = map.insert(code, value) {
                if prev != value {
                    return Err(Error::InconsistentPattern(format!(
                        "argument {args:?} forced to both {prev} and {value}"
                    )));
                }
            }
        }
        Ok(PartialOp {
            name: name.into(),
            domain_size,
            arity,
            table: map.into_iter().collect(),
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn domain_size(&self) -> u32 {
        self.domain_size
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    /// `|domain(f)|`.
    pub fn domain_len(&self) -> usize {
        self.table.len()
    }

    /// Defined `(argument code, value)` pairs in ascending code order.
    pub fn entries(&self) -> &[(u64, Value)] {
        &self.table
    }

    pub fn domain_tuples(&self) -> impl Iterator<Item = Vec<Value>> + '_ {
        self.table.iter().map(|&(c, _)| decode(self.domain_size, self.arity, c))
    }

    pub fn apply_code(&self, code: u64) -> Option<Value> {
        self.table
            .binary_search_by_key(&code, |&(c, _)| c)
            .ok()
            .map(|i| self.table[i].1)
    }

    pub fn apply(&self, args: &[Value]) -> Option<Value> {
        if args.len() != self.arity || args.iter().any(|&v| v >= self.domain_size) {
            return None;
        }
        self.apply_code(encode(self.domain_size, args))
    }

    /// Arguments permuted: the new operation reads argument `i` of the old
    /// one from position `perm[i]`.
    pub fn permute_arguments(&self, perm: &[usize]) -> Result<PartialOp> {
        let mut seen = vec![false; self.arity];
        if perm.len() != self.arity || perm.iter().any(|&p| p >= self.arity || std::mem::replace(&mut seen[p], true)) {
            return Err(Error::InvalidParameter(format!("{perm:?} is not a permutation")));
        }
        let entries = self.domain_tuples().zip(self.table.iter().map(|e| e.1)).map(|(t, v)| {
            let mut out = vec![0; self.arity];
            for (i, &p) in perm.iter().enumerate() {
                out[p] = t[i];
            }
            (out, v)
        });
        PartialOp::from_table(self.name.clone(), self.domain_size, self.arity, entries)
    }

    /// True iff the operation is self-dual and idempotent (Boolean only).
    pub fn is_self_dual_idempotent(&self) -> bool {
        if self.domain_size != 2 {
            return false;
        }
        let full = (1u64 << self.arity) - 1;
        let idempotent = [0, full].iter().all(|&c| self.apply_code(c) == Some((c & 1) as Value));
        idempotent
            && self
                .table
                .iter()
                .all(|&(c, v)| self.apply_code(c ^ full) == Some(1 - v))
    }
}

/// `f(τ(x_1),…,τ(x_r)) = τ(x)` for every row and every `τ: {x,y} → D`.
pub fn instantiate_pattern(pattern: &PolymorphismPattern, domain_size: u32) -> Result<PartialOp> {
    instantiate_named(pattern, domain_size, pattern.to_string())
}

fn instantiate_named(pattern: &PolymorphismPattern, domain_size: u32, name: String) -> Result<PartialOp> {
    let mut entries = Vec::new();
    for row in pattern.rows() {
        for x in 0..domain_size {
            for y in 0..domain_size {
                let args = row.tuple.iter().map(|s| s.eval(x, y)).collect();
                entries.push((args, row.result.eval(x, y)));
            }
        }
    }
    PartialOp::from_table(name, domain_size, pattern.arity(), entries)
}

/// Partial `k`-ary near-unanimity operation over `{0..d-1}`.
pub fn make_near(k: usize, d: u32) -> Result<PartialOp> {
    instantiate_named(&PolymorphismPattern::near(k)?, d, format!("near_{k}"))
}

/// Partial `k`-edge operation, arity `k+1`.
pub fn make_edge(k: usize, d: u32) -> Result<PartialOp> {
    instantiate_named(&PolymorphismPattern::edge(k)?, d, format!("edge_{k}"))
}

/// The Boolean `k`-universal operation, arity `2^k - 1`.
pub fn make_universal(k: usize) -> Result<PartialOp> {
    instantiate_named(&PolymorphismPattern::universal(k)?, 2, format!("universal_{k}"))
}

/// Number of defined length-`n` column sequences, `|domain(p)|^n`.
pub fn count_defined_sequences(p: &PartialOp, n: u32) -> BigUint {
    BigUint::from(p.domain_len()).pow(n)
}

/// `(|domain(p)| - 2) / 2` for a Boolean pSDI operation.
pub fn level_of(p: &PartialOp) -> Result<usize> {
    if p.domain_size() != 2 {
        return Err(Error::NotBoolean);
    }
    if !p.is_self_dual_idempotent() {
        return Err(Error::InvalidParameter(format!("{} is not self-dual and idempotent", p.name())));
    }
    Ok((p.domain_len() - 2) / 2)
}
