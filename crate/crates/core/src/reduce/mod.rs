//! Constructive reductions: Subset Sum to 2-edge instances, clause and
//! symmetric-relation extraction from preservation witnesses, progression
//! scripts for symmetric weight sets, and the padded CNF reduction.

pub mod extract;
pub mod progressions;
pub mod seth;
pub mod subset_sum;

pub use extract::{extract_kclause_definition, extract_symmetric_relation, QfppDefinition};
pub use progressions::{analyze_symmetric_progressions, Derivation, Progression, ProgressionAnalysis, Target};
pub use seth::{seth_forward_reduction, SethReduction};
pub use subset_sum::{
    default_blocks, solve_subset_sum_reduction, subset_sum_to_2edge, SubsetSumReduction, SubsetSumSolution,
};
