//! CSP instances: variables over `{0..d-1}`, named relations (explicit or
//! oracle-backed) and constraint applications.

mod format;
pub mod gen;

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::oracle::{ExplicitOracle, ExtensionOracle, OracleSpec};
use crate::relation::{Relation, Value};

pub use format::{parse_instance, serialize_instance};

/// Declared type of a relation, used by the symmetric 3-edge solver.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TypeTag {
    Edge2,
    Nu3,
    SymEdge3,
}

impl fmt::Display for TypeTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TypeTag::Edge2 => "edge2",
            TypeTag::Nu3 => "nu3",
            TypeTag::SymEdge3 => "sym-edge3",
        })
    }
}

impl FromStr for TypeTag {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "edge2" => Ok(TypeTag::Edge2),
            "nu3" => Ok(TypeTag::Nu3),
            "sym-edge3" => Ok(TypeTag::SymEdge3),
            _ => Err(Error::InvalidParameter(format!("unknown type tag {s:?}"))),
        }
    }
}

#[derive(Clone)]
pub enum RelationSource {
    Explicit(Arc<ExplicitOracle>),
    Oracle(OracleSpec, Arc<dyn ExtensionOracle>),
}

impl PartialEq for RelationSource {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (RelationSource::Explicit(a), RelationSource::Explicit(b)) => a.relation() == b.relation(),
            (RelationSource::Oracle(a, _), RelationSource::Oracle(b, _)) => a == b,
            _ => false,
        }
    }
}

impl fmt::Debug for RelationSource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RelationSource::Explicit(o) => write!(f, "Explicit({:?})", o.relation()),
            RelationSource::Oracle(spec, _) => write!(f, "Oracle({spec:?})"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NamedRelation {
    pub name: String,
    pub source: RelationSource,
    pub tag: Option<TypeTag>,
}

impl NamedRelation {
    pub fn arity(&self) -> usize {
        self.oracle().arity()
    }

    pub fn oracle(&self) -> &dyn ExtensionOracle {
        match &self.source {
            RelationSource::Explicit(o) => o.as_ref(),
            RelationSource::Oracle(_, o) => o.as_ref(),
        }
    }

    pub fn explicit(&self) -> Option<&Relation> {
        match &self.source {
            RelationSource::Explicit(o) => Some(o.relation()),
            RelationSource::Oracle(..) => None,
        }
    }

    pub fn spec(&self) -> Option<&OracleSpec> {
        match &self.source {
            RelationSource::Oracle(spec, _) => Some(spec),
            RelationSource::Explicit(_) => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Constraint {
    pub relation: usize,
    pub scope: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Instance {
    n_vars: usize,
    domain_size: u32,
    relations: Vec<NamedRelation>,
    constraints: Vec<Constraint>,
}

fn valid_name(name: &str) -> bool {
    !name.is_empty() && name.chars().all(|c| c.is_ascii_alphanumeric() || "_-.+".contains(c))
}

impl Instance {
    pub fn new(n_vars: usize, domain_size: u32) -> Result<Self> {
        if !(2..=36).contains(&domain_size) {
            return Err(Error::BadDomainSize(domain_size));
        }
        Ok(Instance { n_vars, domain_size, relations: Vec::new(), constraints: Vec::new() })
    }

    pub fn n_vars(&self) -> usize {
        self.n_vars
    }

    pub fn domain_size(&self) -> u32 {
        self.domain_size
    }

    pub fn relations(&self) -> &[NamedRelation] {
        &self.relations
    }

    pub fn constraints(&self) -> &[Constraint] {
        &self.constraints
    }

    pub fn relation_index(&self, name: &str) -> Option<usize> {
        self.relations.iter().position(|r| r.name == name)
    }

    pub fn relation_of(&self, c: &Constraint) -> &NamedRelation {
        &self.relations[c.relation]
    }

    fn push_relation(&mut self, rel: NamedRelation) -> Result<usize> {
        if !valid_name(&rel.name) {
            return Err(Error::InvalidParameter(format!("bad relation name {:?}", rel.name)));
        }
        if self.relation_index(&rel.name).is_some() {
            return Err(Error::InvalidParameter(format!("relation {:?} defined twice", rel.name)));
        }
        if rel.oracle().domain_size() != self.domain_size {
            return Err(Error::DomainMismatch { left: self.domain_size, right: rel.oracle().domain_size() });
        }
        self.relations.push(rel);
        Ok(self.relations.len() - 1)
    }

    pub fn add_relation(&mut self, name: impl Into<String>, rel: Relation, tag: Option<TypeTag>) -> Result<usize> {
        self.push_relation(NamedRelation {
            name: name.into(),
            source: RelationSource::Explicit(Arc::new(ExplicitOracle::new(rel))),
            tag,
        })
    }

    pub fn add_oracle(&mut self, name: impl Into<String>, spec: OracleSpec, tag: Option<TypeTag>) -> Result<usize> {
        let oracle = spec.build()?;
        self.push_relation(NamedRelation { name: name.into(), source: RelationSource::Oracle(spec, oracle), tag })
    }

    /// Returns the index of an existing relation called `name`, or adds `rel`.
    pub fn intern_relation(&mut self, name: &str, rel: impl FnOnce() -> Relation, tag: Option<TypeTag>) -> Result<usize> {
        match self.relation_index(name) {
            Some(i) => Ok(i),
            None => self.add_relation(name, rel(), tag),
        }
    }

    pub fn add_constraint(&mut self, relation: usize, scope: Vec<usize>) -> Result<()> {
        let rel = self
            .relations
            .get(relation)
            .ok_or_else(|| Error::InvalidParameter(format!("no relation with index {relation}")))?;
        if scope.len() != rel.arity() {
            return Err(Error::ArityMismatch { expected: rel.arity(), found: scope.len() });
        }
        if let Some(&index) = scope.iter().find(|&&v| v >= self.n_vars) {
            return Err(Error::IndexOutOfRange { index, arity: self.n_vars });
        }
        self.constraints.push(Constraint { relation, scope });
        Ok(())
    }

    pub fn add_constraint_named(&mut self, name: &str, scope: Vec<usize>) -> Result<()> {
        let idx = self
            .relation_index(name)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown relation {name:?}")))?;
        self.add_constraint(idx, scope)
    }

    /// Every constraint accepts the assignment (full-index oracle query).
    pub fn check_assignment(&self, a: &[Value]) -> bool {
        a.len() == self.n_vars
            && a.iter().all(|&v| v < self.domain_size)
            && self.constraints.iter().all(|c| self.constraint_accepts(c, a))
    }

    pub fn constraint_accepts(&self, c: &Constraint, a: &[Value]) -> bool {
        let values: Vec<Value> = c.scope.iter().map(|&v| a[v]).collect();
        let rel = self.relation_of(c);
        match rel.explicit() {
            Some(r) => r.contains(&values),
            None => {
                let idx: Vec<usize> = (0..values.len()).collect();
                rel.oracle().query(&idx, &values)
            }
        }
    }

    /// The same instance with variable `v` renamed to `perm[v]`.
    pub fn permute_variables(&self, perm: &[usize]) -> Result<Instance> {
        let mut seen = vec![false; self.n_vars];
        if perm.len() != self.n_vars || perm.iter().any(|&p| p >= self.n_vars || std::mem::replace(&mut seen[p], true)) {
            return Err(Error::InvalidParameter("not a permutation of the variables".into()));
        }
        let mut out = self.clone();
        for c in &mut out.constraints {
            for v in &mut c.scope {
                *v = perm[*v];
            }
        }
        Ok(out)
    }

    /// Number of scope occurrences of each variable.
    pub fn degrees(&self) -> Vec<usize> {
        let mut deg = vec![0; self.n_vars];
        for c in &self.constraints {
            for &v in &c.scope {
                deg[v] += 1;
            }
        }
        deg
    }
}
