//! Exact solvers: brute force, 2-edge meet in the middle, 3-NU triangle
//! search, symmetric 3-edge single-label triangles and k-NU local search.
//!
//! Every solver reports its oracle query count and the number of enumerated
//! search nodes; query counts are the cost measure of the oracle model.

pub mod biclique;
pub mod local_search;
pub mod mitm;
pub mod nu3;
pub mod sym3;
pub mod triangle;

use std::fmt;
use std::str::FromStr;
use std::sync::atomic::{AtomicU64, Ordering};
use std::time::{Duration, Instant};

use crate::error::{Error, Result};
use crate::instance::{Constraint, Instance};
use crate::ops::pattern::PartialOp;
use crate::ops::preserve::{preserves, sample_witness, PreservationWitness};
use crate::oracle::ExtensionOracle;
use crate::relation::{decode, format_tuple, table_size, Value};

pub use biclique::{biclique_label, BicliqueLabel};
pub use local_search::{enumerate_minimal_tuples, local_search_from, restart_budget, solve_knu_localsearch};
pub use mitm::solve_2edge_mitm;
pub use nu3::solve_3nu_triangle;
pub use sym3::solve_sym3edge;
pub use triangle::{find_triangle, LabeledTriGraph, TriangleMode};

/// Largest search space any exhaustive enumeration here will touch.
pub const ENUM_GUARD: u128 = 1 << 26;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SolveReport {
    pub algorithm: Algorithm,
    pub assignment: Option<Vec<Value>>,
    pub oracle_queries: u64,
    pub enumerated_nodes: u64,
    /// Edges kept by the triangle-based solvers.
    pub graph_edges: u64,
    pub wall_time: Duration,
    /// `variable_order[i]` is the original variable placed at position `i`.
    pub variable_order: Vec<usize>,
    /// False when an UNSAT answer is only probabilistic.
    pub complete: bool,
}

impl SolveReport {
    pub fn is_sat(&self) -> bool {
        self.assignment.is_some()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Algorithm {
    Brute,
    Mitm2e,
    Tri3nu,
    Sym3e,
    LsKnu,
}

impl Algorithm {
    pub const ALL: [Algorithm; 5] =
        [Algorithm::Brute, Algorithm::Mitm2e, Algorithm::Tri3nu, Algorithm::Sym3e, Algorithm::LsKnu];
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Algorithm::Brute => "brute",
            Algorithm::Mitm2e => "mitm2e",
            Algorithm::Tri3nu => "tri3nu",
            Algorithm::Sym3e => "sym3e",
            Algorithm::LsKnu => "ls-knu",
        })
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Algorithm::ALL
            .into_iter()
            .find(|a| a.to_string() == s)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown algorithm {s:?}")))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SolveOptions {
    pub skip_precheck: bool,
    /// Degree-descending variable reordering before splitting.
    pub reorder: bool,
    /// Level of the near operation for local search.
    pub k: usize,
    /// Local search radius; `None` means `n`.
    pub radius: Option<usize>,
    pub restarts: u64,
    pub seed: u64,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions { skip_precheck: false, reorder: true, k: 3, radius: None, restarts: 1, seed: 0 }
    }
}

pub fn solve(inst: &Instance, algo: Algorithm, opts: &SolveOptions) -> Result<SolveReport> {
    match algo {
        Algorithm::Brute => solve_bruteforce(inst),
        Algorithm::Mitm2e => solve_2edge_mitm(inst, opts),
        Algorithm::Tri3nu => solve_3nu_triangle(inst, opts),
        Algorithm::Sym3e => solve_sym3edge(inst, opts),
        Algorithm::LsKnu => solve_knu_localsearch(inst, opts),
    }
}

/// Shared counters of one solver run.
#[derive(Debug, Default)]
pub struct Counters {
    queries: AtomicU64,
    nodes: AtomicU64,
}

impl Counters {
    pub fn queries(&self) -> u64 {
        self.queries.load(Ordering::Relaxed)
    }

    pub fn nodes(&self) -> u64 {
        self.nodes.load(Ordering::Relaxed)
    }

    pub fn add_nodes(&self, n: u64) {
        self.nodes.fetch_add(n, Ordering::Relaxed);
    }
}

/// A constraint seen as a relation over its distinct variables (ascending).
/// Repeated scope variables are expanded to every position they occupy, so
/// the view is the qfpp-definable relation with equalities folded in.
pub struct ConstraintView<'a> {
    oracle: &'a dyn ExtensionOracle,
    vars: Vec<usize>,
    positions: Vec<Vec<usize>>,
    counters: &'a Counters,
}

impl fmt::Debug for ConstraintView<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ConstraintView").field("vars", &self.vars).finish()
    }
}

impl<'a> ConstraintView<'a> {
    pub fn new(oracle: &'a dyn ExtensionOracle, scope: &[usize], counters: &'a Counters) -> Self {
        let mut vars = scope.to_vec();
        vars.sort_unstable();
        vars.dedup();
        let positions = vars
            .iter()
            .map(|v| scope.iter().enumerate().filter(|(_, s)| *s == v).map(|(p, _)| p).collect())
            .collect();
        ConstraintView { oracle, vars, positions, counters }
    }

    pub fn of(inst: &'a Instance, c: &Constraint, counters: &'a Counters) -> Self {
        Self::new(inst.relation_of(c).oracle(), &c.scope, counters)
    }

    /// Distinct instance variables, ascending.
    pub fn vars(&self) -> &[usize] {
        &self.vars
    }

    /// Does the restriction of a partial instance assignment extend?
    pub fn admits(&self, a: &[Option<Value>]) -> bool {
        let partial: Vec<Option<Value>> = self.vars.iter().map(|&v| a[v]).collect();
        self.accepts(&partial)
    }
}

impl ExtensionOracle for ConstraintView<'_> {
    fn arity(&self) -> usize {
        self.vars.len()
    }

    fn domain_size(&self) -> u32 {
        self.oracle.domain_size()
    }

    fn accepts(&self, partial: &[Option<Value>]) -> bool {
        self.counters.queries.fetch_add(1, Ordering::Relaxed);
        let mut full = vec![None; self.oracle.arity()];
        for (pos, v) in self.positions.iter().zip(partial) {
            for &p in pos {
                full[p] = *v;
            }
        }
        self.oracle.accepts(&full)
    }
}

/// Degree-descending order, ties by index: `order[i]` is the variable put at
/// position `i`.
pub fn degree_order(inst: &Instance) -> Vec<usize> {
    let deg = inst.degrees();
    let mut order: Vec<usize> = (0..inst.n_vars()).collect();
    order.sort_by_key(|&v| (std::cmp::Reverse(deg[v]), v));
    order
}

/// The instance renamed so that `order[i]` becomes variable `i`.
pub(crate) fn reordered(inst: &Instance, reorder: bool) -> Result<(Instance, Vec<usize>)> {
    let order = if reorder { degree_order(inst) } else { (0..inst.n_vars()).collect() };
    let mut perm = vec![0; order.len()];
    for (new, &old) in order.iter().enumerate() {
        perm[old] = new;
    }
    Ok((inst.permute_variables(&perm)?, order))
}

/// Maps an assignment of the reordered instance back to original variables.
pub(crate) fn restore(order: &[usize], a: &[Value]) -> Vec<Value> {
    let mut out = vec![0; a.len()];
    for (new, &old) in order.iter().enumerate() {
        out[old] = a[new];
    }
    out
}

/// `d^k` as a checked count against [`ENUM_GUARD`].
pub(crate) fn guarded_count(d: u32, k: usize) -> Result<usize> {
    let size = table_size(d, k);
    if size > ENUM_GUARD {
        return Err(Error::Infeasible(size));
    }
    Ok(size as usize)
}

/// The `code`-th assignment (lex order) of `vars`, written into a partial
/// instance assignment.
pub(crate) fn write_block(a: &mut [Option<Value>], d: u32, vars: std::ops::Range<usize>, code: usize) {
    let vals = decode(d, vars.len(), code as u64);
    for (v, x) in vars.zip(vals) {
        a[v] = Some(x);
    }
}

pub(crate) fn describe_witness(name: &str, op: &PartialOp, w: &PreservationWitness) -> String {
    let rows: Vec<String> = w.tuples.iter().map(|t| format_tuple(t)).collect();
    format!(
        "relation {name} is not preserved by {}: rows {} give {}",
        op.name(),
        rows.join(","),
        format_tuple(&w.result)
    )
}

/// Checks every explicit relation against `op`; oracle relations are trusted.
/// Relations too large for the exhaustive search get a sampled check.
pub(crate) fn check_language(inst: &Instance, op: &PartialOp) -> Result<()> {
    for rel in inst.relations() {
        let Some(r) = rel.explicit() else { continue };
        let witness = match preserves(op, r) {
            Ok(w) => w,
            Err(Error::Infeasible(_)) => sample_witness(op, r, 10_000, 0)?,
            Err(e) => return Err(e),
        };
        if let Some(w) = witness {
            return Err(Error::Precondition(describe_witness(&rel.name, op, &w)));
        }
    }
    Ok(())
}

/// Constraints with an empty scope decide the instance on their own.
pub(crate) fn nullary_ok(inst: &Instance, counters: &Counters) -> bool {
    inst.constraints()
        .iter()
        .filter(|c| c.scope.is_empty())
        .all(|c| ConstraintView::of(inst, c, counters).accepts(&[]))
}

pub(crate) struct Timer(Instant);

impl Timer {
    pub fn start() -> Self {
        Timer(Instant::now())
    }

    pub fn elapsed(&self) -> Duration {
        self.0.elapsed()
    }
}

/// Exhaustive depth-first search in the original variable order; each
/// constraint is checked as soon as its last variable is set. Returns the
/// lex-min satisfying assignment.
pub fn solve_bruteforce(inst: &Instance) -> Result<SolveReport> {
    let timer = Timer::start();
    let n = inst.n_vars();
    let d = inst.domain_size();
    guarded_count(d, n)?;
    let counters = Counters::default();
    let views: Vec<ConstraintView> = inst.constraints().iter().map(|c| ConstraintView::of(inst, c, &counters)).collect();
    let mut due: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (ci, v) in views.iter().enumerate() {
        if let Some(&last) = v.vars().last() {
            due[last].push(ci);
        }
    }
    let mut assignment = None;
    if nullary_ok(inst, &counters) {
        let mut a: Vec<Option<Value>> = vec![None; n];
        if brute_dfs(0, d, &views, &due, &mut a, &counters) {
            assignment = Some(a.iter().map(|v| v.expect("complete")).collect());
        }
    }
    Ok(SolveReport {
        algorithm: Algorithm::Brute,
        assignment,
        oracle_queries: counters.queries(),
        enumerated_nodes: counters.nodes(),
        graph_edges: 0,
        wall_time: timer.elapsed(),
        variable_order: (0..n).collect(),
        complete: true,
    })
}

fn brute_dfs(
    i: usize,
    d: u32,
    views: &[ConstraintView],
    due: &[Vec<usize>],
    a: &mut [Option<Value>],
    counters: &Counters,
) -> bool {
    counters.add_nodes(1);
    if i == a.len() {
        return true;
    }
    for x in 0..d {
        a[i] = Some(x);
        if due[i].iter().all(|&c| views[c].admits(a)) && brute_dfs(i + 1, d, views, due, a, counters) {
            return true;
        }
    }
    a[i] = None;
    false
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::parse_instance;
    use crate::relation::Relation;

    #[test]
    fn brute_force_cases() {
        let unsat = parse_instance("DOMAIN 2\nVARS 1\nREL Z ARITY 1 TUPLES 0\nREL O ARITY 1 TUPLES 1\nCON Z 0\nCON O 0\n").unwrap();
        assert!(!solve_bruteforce(&unsat).unwrap().is_sat());
        let one = parse_instance("DOMAIN 2\nVARS 3\nREL R ARITY 3 TUPLES 001 010 100\nCON R 0 1 2\n").unwrap();
        assert_eq!(solve_bruteforce(&one).unwrap().assignment, Some(vec![0, 0, 1]));
        let empty = Instance::new(4, 3).unwrap();
        assert_eq!(solve_bruteforce(&empty).unwrap().assignment, Some(vec![0; 4]));
    }

    #[test]
    fn brute_force_matches_plain_enumeration() {
        for seed in 0..30 {
            let inst = crate::instance::gen::gen_ksat(8, 30, 3, seed).unwrap();
            let expect = (0..256u64)
                .map(|c| decode(2, 8, c))
                .find(|a| inst.check_assignment(a));
            assert_eq!(solve_bruteforce(&inst).unwrap().assignment, expect);
        }
    }

    #[test]
    fn nullary_constraints() {
        let mut inst = Instance::new(2, 2).unwrap();
        let f = inst.add_relation("F", Relation::empty(2, 0).unwrap(), None).unwrap();
        inst.add_constraint(f, vec![]).unwrap();
        assert!(!solve_bruteforce(&inst).unwrap().is_sat());
    }

    #[test]
    fn view_expands_repeated_variables() {
        let counters = Counters::default();
        let r = crate::oracle::ExplicitOracle::new(Relation::from_tuples(2, 3, &[[0, 1, 0], [1, 1, 0]]).unwrap());
        let v = ConstraintView::new(&r, &[4, 2, 4], &counters);
        assert_eq!(v.vars(), &[2, 4]);
        assert!(v.query(&[0, 1], &[1, 0]));
        assert!(!v.query(&[0, 1], &[1, 1]));
        assert!(!v.query(&[0], &[0]));
        assert_eq!(counters.queries(), 3);
    }

    #[test]
    fn algorithm_names() {
        for a in Algorithm::ALL {
            assert_eq!(a.to_string().parse::<Algorithm>().unwrap(), a);
        }
    }
}
