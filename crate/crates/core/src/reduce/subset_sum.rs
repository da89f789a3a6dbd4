//! Subset Sum as a disjunction of 2-edge instances.
//!
//! The binary expansion is cut into blocks; for every guess of the carries
//! between consecutive blocks the equation becomes one block equation per
//! block, each answered by a tabulating extension oracle. Every block
//! equation is a linear equation over the selectors and hence preserved by
//! `edge_2`.

use crate::error::{Error, Result};
use crate::exec;
use crate::instance::{Instance, TypeTag};
use crate::oracle::OracleSpec;
use crate::relation::Value;
use crate::solver::{solve_2edge_mitm, SolveOptions, SolveReport};

/// Block boundaries and the carry range of a split Subset-Sum equation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubsetSumReduction {
    pub weights: Vec<u64>,
    pub target: u64,
    /// Bit ranges `[lo, hi)` of the blocks, least significant first.
    pub blocks: Vec<(u32, u32)>,
}

/// Default number of blocks, `⌈√n⌉`.
pub fn default_blocks(n: usize) -> usize {
    ((n as f64).sqrt().ceil() as usize).max(1)
}

pub fn subset_sum_to_2edge(weights: &[u64], target: u64, blocks: usize) -> Result<SubsetSumReduction> {
    let n = weights.len();
    if blocks == 0 {
        return Err(Error::InvalidParameter("need at least one block".into()));
    }
    let total: u128 = weights.iter().map(|&w| w as u128).sum::<u128>().max(target as u128);
    let bits = (128 - total.leading_zeros()).max(1);
    if bits > 64 {
        return Err(Error::TooLarge(total));
    }
    if n > 0 && bits as usize > 3 * n.max(14) {
        return Err(Error::InvalidParameter(format!("bit length {bits} exceeds 3n")));
    }
    if blocks > bits as usize {
        return Err(Error::InvalidParameter(format!("{blocks} blocks for {bits} bits")));
    }
    let width = bits.div_ceil(blocks as u32);
    let ranges: Vec<(u32, u32)> =
        (0..blocks as u32).map(|b| (b * width, ((b + 1) * width).min(bits))).filter(|(lo, hi)| lo < hi).collect();
    if ranges.iter().any(|(lo, hi)| hi - lo > 40) {
        return Err(Error::InvalidParameter(format!("blocks of {width} bits are too wide")));
    }
    Ok(SubsetSumReduction { weights: weights.to_vec(), target, blocks: ranges })
}

impl SubsetSumReduction {
    pub fn n(&self) -> usize {
        self.weights.len()
    }

    /// Carries range over `0..=n` at each inner block boundary.
    pub fn instance_count(&self) -> u128 {
        (self.n() as u128 + 1).pow(self.blocks.len() as u32 - 1)
    }

    /// Carry vector of the `index`-th guess, lexicographic with the lowest
    /// boundary most significant.
    pub fn carries(&self, index: u128) -> Vec<u64> {
        let base = self.n() as u128 + 1;
        let k = self.blocks.len() - 1;
        let mut out = vec![0; k];
        let mut rest = index;
        for slot in out.iter_mut().rev() {
            *slot = (rest % base) as u64;
            rest /= base;
        }
        out
    }

    /// One constraint per block; the carry into the lowest block and out of
    /// the highest are zero.
    pub fn instance(&self, carries: &[u64]) -> Result<Instance> {
        let n = self.n();
        let mut inst = Instance::new(n, 2)?;
        for (b, &(lo, hi)) in self.blocks.iter().enumerate() {
            let carry_in = if b == 0 { 0 } else { carries[b - 1] };
            let carry_out = carries.get(b).copied().unwrap_or(0);
            let spec = OracleSpec::SsBlock {
                weights: self.weights.clone(),
                target: self.target >> lo & ((1u64 << (hi - lo)) - 1),
                lo,
                hi,
                carry_in,
                carry_out,
            };
            let r = inst.add_oracle(format!("blk{b}"), spec, Some(TypeTag::Edge2))?;
            inst.add_constraint(r, (0..n).collect())?;
        }
        Ok(inst)
    }

    /// Carry guesses in lexicographic order, built on demand.
    pub fn instances(&self) -> impl Iterator<Item = Result<(Vec<u64>, Instance)>> + '_ {
        (0..self.instance_count()).map(|i| {
            let c = self.carries(i);
            self.instance(&c).map(|inst| (c, inst))
        })
    }
}

/// First satisfiable carry guess and its 2-edge solution.
#[derive(Debug, Clone)]
pub struct SubsetSumSolution {
    pub carries: Vec<u64>,
    pub selection: Vec<Value>,
    pub report: SolveReport,
}

/// Solves the guesses with the meet-in-the-middle solver; the lex-min
/// satisfiable carry vector wins. Guesses whose block equations already
/// reject the empty assignment are skipped with one query per block.
pub fn solve_subset_sum_reduction(red: &SubsetSumReduction, opts: &SolveOptions) -> Result<Option<SubsetSumSolution>> {
    let count = usize::try_from(red.instance_count()).map_err(|_| Error::TooLarge(red.instance_count()))?;
    exec::find_first(0..count, |i| {
        let carries = red.carries(i as u128);
        let run = || -> Result<Option<SubsetSumSolution>> {
            let inst = red.instance(&carries)?;
            if inst.relations().iter().any(|r| !r.oracle().query(&[], &[])) {
                return Ok(None);
            }
            let report = solve_2edge_mitm(&inst, opts)?;
            Ok(report.assignment.clone().map(|selection| SubsetSumSolution { carries: carries.clone(), selection, report }))
        };
        run().transpose()
    })
    .transpose()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn dp(weights: &[u64], target: u64) -> bool {
        let t = target as usize;
        let mut reach = vec![false; t + 1];
        reach[0] = true;
        for &w in weights {
            for s in (w as usize..=t).rev() {
                reach[s] |= reach[s - w as usize];
            }
        }
        reach[t]
    }

    fn via_reduction(weights: &[u64], target: u64, blocks: usize) -> bool {
        let red = subset_sum_to_2edge(weights, target, blocks).unwrap();
        let sol = solve_subset_sum_reduction(&red, &SolveOptions::default()).unwrap();
        if let Some(s) = &sol {
            let sum: u64 = weights.iter().zip(&s.selection).map(|(&w, &z)| w * z as u64).sum();
            assert_eq!(sum, target);
        }
        sol.is_some()
    }

    #[test]
    fn small_example() {
        assert!(via_reduction(&[3, 5, 7], 8, 2));
        assert!(!via_reduction(&[3, 5, 7], 9, 2));
        assert!(!via_reduction(&[3, 5, 7], 16, 2));
        let red = subset_sum_to_2edge(&[3, 5, 7], 8, 1).unwrap();
        assert_eq!(red.instance_count(), 1);
        let inst = red.instance(&[]).unwrap();
        assert_eq!(inst.constraints().len(), 1);
        assert!(subset_sum_to_2edge(&[3, 5, 7], 8, 0).is_err());
    }

    #[test]
    fn guess_count_shape() {
        let red = subset_sum_to_2edge(&[100, 200, 300, 400, 500], 700, 3).unwrap();
        assert_eq!(red.blocks.len(), 3);
        assert_eq!(red.instance_count(), 36);
        assert!(red.instance_count() <= 6u128.pow(6));
        assert_eq!(red.instances().count(), 36);
        assert_eq!(red.carries(0), vec![0, 0]);
        assert_eq!(red.carries(7), vec![1, 1]);
    }

    #[test]
    fn random_against_dp() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..30 {
            let n = rng.gen_range(1..=9);
            let weights: Vec<u64> = (0..n).map(|_| rng.gen_range(1..256)).collect();
            let target = if rng.gen_bool(0.5) {
                weights.iter().filter(|_| rng.gen_bool(0.5)).sum()
            } else {
                rng.gen_range(0..weights.iter().sum::<u64>() + 2)
            };
            let blocks = rng.gen_range(1..=3);
            assert_eq!(via_reduction(&weights, target, blocks), dp(&weights, target), "{weights:?} {target} {blocks}");
        }
    }
}
