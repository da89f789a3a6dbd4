use super::{invalid, ExtensionOracle};
use crate::error::Result;
use crate::relation::Value;

/// One block of a Subset-Sum equation: the selected weights' bits in
/// `[lo, hi)` plus `carry_in` equal `target + 2^(hi-lo) · carry_out`.
#[derive(Debug, Clone)]
pub struct SubsetSumBlockOracle {
    block_values: Vec<u64>,
    target: u64,
    width: u32,
    carry_in: u64,
    carry_out: u64,
}

impl SubsetSumBlockOracle {
    pub fn new(weights: Vec<u64>, target: u64, lo: u32, hi: u32, carry_in: u64, carry_out: u64) -> Result<Self> {
        if lo >= hi || hi - lo > 40 || hi > 64 {
            return Err(invalid(format!("bad bit range [{lo}, {hi})")));
        }
        let n = weights.len() as u64;
        if carry_in > n || carry_out > n {
            return Err(invalid(format!("carries ({carry_in}, {carry_out}) outside [0, {n}]")));
        }
        let width = hi - lo;
        let mask = (1u64 << width) - 1;
        let block_values = weights.iter().map(|&w| w >> lo & mask).collect();
        Ok(SubsetSumBlockOracle { block_values, target, width, carry_in, carry_out })
    }

    pub fn block_values(&self) -> &[u64] {
        &self.block_values
    }

    /// The value that the selected block contributions must reach.
    pub fn required_sum(&self) -> Option<u64> {
        (self.target + (self.carry_out << self.width)).checked_sub(self.carry_in)
    }
}

/// All subset sums of `items`, sorted.
pub(crate) fn subset_sums(items: &[u64]) -> Vec<u64> {
    let mut sums = vec![0u64];
    for &x in items {
        let shifted: Vec<u64> = sums.iter().map(|s| s + x).collect();
        sums.extend(shifted);
    }
    sums.sort_unstable();
    sums.dedup();
    sums
}

/// Does some subset of `items` sum to exactly `need`? Meet in the middle.
pub(crate) fn has_subset_sum(items: &[u64], need: u64) -> bool {
    let (a, b) = items.split_at(items.len() / 2);
    let left = subset_sums(a);
    let right = subset_sums(b);
    left.iter()
        .take_while(|&&s| s <= need)
        .any(|&s| right.binary_search(&(need - s)).is_ok())
}

impl ExtensionOracle for SubsetSumBlockOracle {
    fn arity(&self) -> usize {
        self.block_values.len()
    }

    fn domain_size(&self) -> u32 {
        2
    }

    fn accepts(&self, partial: &[Option<Value>]) -> bool {
        let Some(required) = self.required_sum() else {
            return false;
        };
        let mut fixed = 0u64;
        let mut free = Vec::new();
        for (&v, p) in self.block_values.iter().zip(partial) {
            match p {
                Some(1) => fixed += v,
                Some(_) => {}
                None => free.push(v),
            }
        }
        match required.checked_sub(fixed) {
            Some(need) => has_subset_sum(&free, need),
            None => false,
        }
    }
}
