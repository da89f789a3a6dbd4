use std::collections::HashMap;
use std::sync::{Arc, RwLock};

use super::ExtensionOracle;
use crate::relation::{encode, Relation, Value};

/// Oracle over a materialised relation, caching each projection it needs.
#[derive(Debug)]
pub struct ExplicitOracle {
    rel: Relation,
    cache: RwLock<HashMap<Vec<usize>, Arc<Relation>>>,
}

impl ExplicitOracle {
    pub fn new(rel: Relation) -> Self {
        ExplicitOracle { rel, cache: RwLock::new(HashMap::new()) }
    }

    pub fn relation(&self) -> &Relation {
        &self.rel
    }

    fn projection(&self, idx: &[usize]) -> Arc<Relation> {
        if let Some(p) = self.cache.read().expect("cache lock").get(idx) {
            return Arc::clone(p);
        }
        let p = Arc::new(self.rel.project(idx).expect("indices checked by caller"));
        self.cache
            .write()
            .expect("cache lock")
            .entry(idx.to_vec())
            .or_insert(p)
            .clone()
    }
}

impl ExtensionOracle for ExplicitOracle {
    fn arity(&self) -> usize {
        self.rel.arity()
    }

    fn domain_size(&self) -> u32 {
        self.rel.domain_size()
    }

    fn accepts(&self, partial: &[Option<Value>]) -> bool {
        let (idx, vals): (Vec<usize>, Vec<Value>) = partial
            .iter()
            .enumerate()
            .filter_map(|(i, v)| v.map(|v| (i, v)))
            .unzip();
        if idx.len() == self.rel.arity() {
            return self.rel.contains(&vals);
        }
        if idx.is_empty() {
            return !self.rel.is_empty();
        }
        self.projection(&idx).contains_code(encode(self.rel.domain_size(), &vals))
    }
}
