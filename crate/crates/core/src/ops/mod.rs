//! Partial operations, preservation and hierarchy classification.

pub mod classify;
pub mod decompose;
pub mod enumerate;
pub mod pattern;
pub mod preserve;

pub use classify::{classify_relation, ClassificationEntry, ClassificationReport, OpKind};
pub use decompose::{block_sensitivity, is_k_decomposable, is_rectangular};
pub use pattern::{
    count_defined_sequences, instantiate_pattern, level_of, make_edge, make_near, make_universal, PartialOp,
    PolymorphismPattern,
};
pub use preserve::{preserves, PreservationWitness};
