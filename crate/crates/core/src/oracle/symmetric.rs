use super::ExtensionOracle;
use crate::relation::{SymmetricWeightSet, Value};

/// Boolean tuples whose Hamming weight lies in `S`.
#[derive(Debug, Clone)]
pub struct SymmetricOracle {
    weights: SymmetricWeightSet,
}

impl SymmetricOracle {
    pub fn new(weights: SymmetricWeightSet) -> Self {
        SymmetricOracle { weights }
    }

    pub fn weights(&self) -> &SymmetricWeightSet {
        &self.weights
    }
}

impl ExtensionOracle for SymmetricOracle {
    fn arity(&self) -> usize {
        self.weights.arity()
    }

    fn domain_size(&self) -> u32 {
        2
    }

    fn accepts(&self, partial: &[Option<Value>]) -> bool {
        let ones = partial.iter().filter(|v| **v == Some(1)).count();
        let open = partial.iter().filter(|v| v.is_none()).count();
        (ones..=ones + open).any(|w| self.weights.contains(w))
    }
}
