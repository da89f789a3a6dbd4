//! Exhaustive enumeration of the Boolean relations of small arity that are
//! preserved by the majority operation (`near_3` over `{0,1}`).
//!
//! These are exactly the intersections of unit and binary clauses, so each
//! relation corresponds to one closed set of the clause generators. The
//! closed sets are listed with Ganter's NextClosure, which visits each one
//! exactly once without remembering earlier outputs.

use crate::error::{Error, Result};

/// Largest arity for which a relation fits in a `u64` membership mask.
pub const MAX_ENUM_ARITY: usize = 6;

/// Unit and binary clauses over `n` variables as membership masks; bit `c`
/// stands for the tuple with code `c`.
pub fn clause_generators(n: usize) -> Vec<u64> {
    let codes = 1usize << n;
    let mask = |f: &dyn Fn(usize) -> bool| (0..codes).filter(|&c| f(c)).fold(0u64, |acc, c| acc | 1 << c);
    let bit = |c: usize, i: usize| c >> i & 1;
    let mut gens = Vec::new();
    for i in 0..n {
        for v in 0..2 {
            gens.push(mask(&|c| bit(c, i) == v));
        }
    }
    for i in 0..n {
        for j in i + 1..n {
            for a in 0..2 {
                for b in 0..2 {
                    gens.push(mask(&|c| bit(c, i) == a || bit(c, j) == b));
                }
            }
        }
    }
    gens
}

fn full_mask(n: usize) -> u64 {
    if n == MAX_ENUM_ARITY {
        u64::MAX
    } else {
        (1u64 << (1 << n)) - 1
    }
}

/// Calls `visit` once with the membership mask of every majority-closed
/// relation of arity `n`, the empty relation included.
pub fn for_each_majority_closed(n: usize, mut visit: impl FnMut(u64)) -> Result<()> {
    if n > MAX_ENUM_ARITY {
        return Err(Error::Infeasible(1u128 << (1u32 << n.min(7))));
    }
    let gens = clause_generators(n);
    let m = gens.len();
    let full = full_mask(n);
    let closure = |r: u64| {
        gens.iter()
            .enumerate()
            .filter(|(_, &g)| g & r == r)
            .fold(0u128, |acc, (i, _)| acc | 1 << i)
    };
    let mut current = closure(full);
    visit(full);
    if n == 0 {
        // no generators; the empty nullary relation is listed by hand
        visit(0);
        return Ok(());
    }
    loop {
        let mut next = None;
        for i in (0..m).rev() {
            if current >> i & 1 == 1 {
                continue;
            }
            let low = current & ((1u128 << i) - 1);
            let mut rel = full & gens[i];
            let mut rest = low;
            while rest != 0 {
                rel &= gens[rest.trailing_zeros() as usize];
                rest &= rest - 1;
            }
            let closed = closure(rel);
            if closed & ((1u128 << i) - 1) == low {
                next = Some((closed, rel));
                break;
            }
        }
        match next {
            Some((closed, rel)) => {
                current = closed;
                visit(rel);
            }
            None => return Ok(()),
        }
    }
}

/// Minimal members of a Boolean relation given as a mask over `n ≤ 6`
/// variables, read as subsets of positions: no proper subset is a member.
pub fn minimal_members(n: usize, rel: u64) -> u64 {
    let codes = 1usize << n;
    let mut below = rel;
    let mut strict = 0u64;
    let zero_masks: Vec<u64> = (0..n)
        .map(|i| (0..codes).filter(|c| c >> i & 1 == 0).fold(0u64, |acc, c| acc | 1 << c))
        .collect();
    for (i, &z) in zero_masks.iter().enumerate() {
        below |= (below & z) << (1 << i);
    }
    for (i, &z) in zero_masks.iter().enumerate() {
        strict |= (below & z) << (1 << i);
    }
    rel & !strict
}

/// Three distinct sets with a common pairwise intersection.
pub fn find_sunflower3(sets: &[u64]) -> Option<[u64; 3]> {
    for (a_i, &a) in sets.iter().enumerate() {
        for (b_i, &b) in sets.iter().enumerate().skip(a_i + 1) {
            let core = a & b;
            for &c in &sets[b_i + 1..] {
                if a & c == core && b & c == core {
                    return Some([a, b, c]);
                }
            }
        }
    }
    None
}
