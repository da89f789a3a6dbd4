//! Arithmetic progressions in symmetric weight sets and the shift, truncate
//! and group scripts that turn them into clauses, exact-one relations or
//! counting relations modulo `p`.

use std::fmt;

use crate::error::Result;
use crate::relation::{Relation, SymmetricMode, SymmetricWeightSet};

/// `start, start+step, …` with `len` items, maximal in `S`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Progression {
    pub start: usize,
    pub step: usize,
    pub len: usize,
    /// `S` contains the whole residue class of `start` modulo `step`.
    pub complete: bool,
}

impl Progression {
    pub fn last(&self) -> usize {
        self.start + (self.len - 1) * self.step
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Target {
    /// `Σx ≥ 1` of the given arity.
    AtLeastOne(usize),
    /// `Σx < k` of arity `k`.
    NotAll(usize),
    /// `Σx = 1` of the given arity.
    ExactlyOne(usize),
    /// `Σx ≡ a (mod p)` of the given arity.
    Residue { arity: usize, a: usize, p: usize },
}

impl Target {
    pub fn arity(&self) -> usize {
        match *self {
            Target::AtLeastOne(k) | Target::NotAll(k) | Target::ExactlyOne(k) => k,
            Target::Residue { arity, .. } => arity,
        }
    }

    pub fn weights(&self) -> Vec<usize> {
        match *self {
            Target::AtLeastOne(k) => (1..=k).collect(),
            Target::NotAll(k) => (0..k).collect(),
            Target::ExactlyOne(_) => vec![1],
            Target::Residue { arity, a, p } => (a..=arity).step_by(p).collect(),
        }
    }
}

impl fmt::Display for Target {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Target::AtLeastOne(k) => write!(f, "sum >= 1 over {k}"),
            Target::NotAll(k) => write!(f, "sum < {k} over {k}"),
            Target::ExactlyOne(k) => write!(f, "1-in-{k}"),
            Target::Residue { arity, a, p } => write!(f, "sum = {a} mod {p} over {arity}"),
        }
    }
}

/// Transforms applied in order to the symmetric relation of `S`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Derivation {
    pub steps: Vec<SymmetricMode>,
    pub target: Target,
}

impl Derivation {
    fn new(shift: usize, truncate: usize, group: usize, target: Target) -> Self {
        let mut steps = vec![SymmetricMode::ShiftDown; shift];
        steps.extend(std::iter::repeat_n(SymmetricMode::Truncate, truncate));
        if group > 1 {
            steps.push(SymmetricMode::Group(group));
        }
        Derivation { steps, target }
    }

    pub fn run(&self, rel: &Relation) -> Result<Relation> {
        self.steps.iter().try_fold(rel.clone(), |r, &m| r.symmetric_transform(m))
    }

    pub fn script(&self) -> String {
        self.steps
            .iter()
            .map(|m| match m {
                SymmetricMode::ShiftDown => "shift".to_string(),
                SymmetricMode::Truncate => "truncate".to_string(),
                SymmetricMode::Group(p) => format!("group {p}"),
            })
            .collect::<Vec<_>>()
            .join(", ")
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProgressionAnalysis {
    pub arity: usize,
    pub weights: Vec<usize>,
    pub progressions: Vec<Progression>,
    pub derivations: Vec<Derivation>,
}

fn smallest_prime_factor(p: usize) -> usize {
    (2..=p).find(|q| p.is_multiple_of(*q)).expect("p >= 2")
}

/// Every maximal progression of at least two items (and every single weight
/// for step 1), with derivation scripts for incomplete progressions,
/// isolated weights and a set that is exactly one residue class.
pub fn analyze_symmetric_progressions(s: &SymmetricWeightSet) -> ProgressionAnalysis {
    let n = s.arity();
    let weights = s.weights();
    let mut progressions = Vec::new();
    let mut derivations = Vec::new();
    for step in 1..=n.max(1) {
        for &a in &weights {
            if a >= step && s.contains(a - step) {
                continue;
            }
            let len = (0..).take_while(|&i| a + i * step <= n && s.contains(a + i * step)).count();
            if len < 2 && step > 1 {
                continue;
            }
            let last = a + (len - 1) * step;
            let complete = a < step && last + step > n;
            progressions.push(Progression { start: a, step, len, complete });
            if complete {
                continue;
            }
            if a >= step {
                derivations.push(Derivation::new(a - step, n - (a - step) - len * step, step, Target::AtLeastOne(len)));
            }
            if last + step <= n {
                derivations.push(Derivation::new(a, n - a - len * step, step, Target::NotAll(len)));
            }
        }
    }
    for &w in &weights {
        if w == 0 || s.contains(w - 1) {
            continue;
        }
        let width = (w + 1..=n).take_while(|&x| !s.contains(x)).count() + 1;
        if width >= 2 {
            let shift = w - 1;
            derivations.push(Derivation::new(shift, n - shift - width, 1, Target::ExactlyOne(width)));
        }
    }
    if let Some(class) = progressions.iter().find(|p| p.complete && p.step >= 2 && p.len == weights.len()) {
        let (a, p) = (class.start, class.step);
        derivations.push(Derivation::new(0, 0, 1, Target::Residue { arity: n, a, p }));
        let q = smallest_prime_factor(p);
        if q < p {
            let group = p / q;
            let shift = a % group;
            let arity = (n - shift) / group;
            let target = Target::Residue { arity, a: (a - shift) / group % q, p: q };
            derivations.push(Derivation::new(shift, 0, group, target));
        }
    }
    ProgressionAnalysis { arity: n, weights, progressions, derivations }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn check_all(s: &SymmetricWeightSet) -> ProgressionAnalysis {
        let analysis = analyze_symmetric_progressions(s);
        let rel = Relation::symmetric(s).unwrap();
        for d in &analysis.derivations {
            let out = d.run(&rel).unwrap();
            assert_eq!(out.arity(), d.target.arity(), "{:?} via {}", s.weights(), d.script());
            assert_eq!(out.symmetric_weights().unwrap().weights(), d.target.weights(), "{:?} via {}", s.weights(), d.script());
        }
        analysis
    }

    #[test]
    fn isolated_weight() {
        let a = check_all(&SymmetricWeightSet::new(3, [1]).unwrap());
        assert!(a.derivations.iter().any(|d| d.target == Target::ExactlyOne(3)));
    }

    #[test]
    fn even_weights() {
        let a = check_all(&SymmetricWeightSet::new(4, [0, 2, 4]).unwrap());
        assert!(a.progressions.contains(&Progression { start: 0, step: 2, len: 3, complete: true }));
        assert!(a.derivations.iter().any(|d| d.target == Target::Residue { arity: 4, a: 0, p: 2 }));
    }

    #[test]
    fn full_set_needs_nothing() {
        let a = check_all(&SymmetricWeightSet::full(5));
        assert!(a.derivations.is_empty());
        assert!(a.progressions.iter().any(|p| p.step == 1 && p.complete));
    }

    #[test]
    fn composite_modulus_reaches_a_prime() {
        let s = SymmetricWeightSet::new(12, [2, 6, 10]).unwrap();
        let a = check_all(&s);
        assert!(a.derivations.iter().any(|d| matches!(d.target, Target::Residue { p: 2, .. })));
    }

    #[test]
    fn every_weight_set_up_to_arity_seven() {
        for n in 1..=7 {
            for mask in 0u32..1 << (n + 1) {
                check_all(&SymmetricWeightSet::new(n, (0..=n).filter(|&i| mask >> i & 1 == 1)).unwrap());
            }
        }
    }
}
