//! Partial self-dual idempotent operations over finite relations, hierarchy
//! classification of constraint languages, and exponential-time CSP solvers
//! whose running time depends on the partial polymorphisms of the language.

pub mod dimacs;
pub mod error;
pub mod exec;
pub mod gf2;
pub mod instance;
pub mod ops;
pub mod oracle;
pub mod padding;
pub mod reduce;
pub mod relation;
pub mod solver;

pub use error::{Error, Result};
pub use relation::{conjoin, Relation, SignPattern, SymmetricMode, SymmetricWeightSet, Value};
