//! Local search for Boolean CSPs whose relations are preserved by `near_k`.
//!
//! From a tuple `t`, pick the first falsified constraint, sign-flip its
//! relation so that `t` projects to zero, and branch on the minimal tuples
//! of the flipped relation: flipping `t` along a minimal tuple of weight `i`
//! satisfies the constraint and spends `i` of the radius. For `near_k`
//! relations the minimal tuples of one weight contain no `k`-sunflower,
//! which keeps the branching single-exponential in the radius.

use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{check_language, nullary_ok, Algorithm, ConstraintView, Counters, SolveOptions, SolveReport, Timer};
use crate::error::{Error, Result};
use crate::exec;
use crate::instance::Instance;
use crate::ops::pattern::make_near;
use crate::oracle::materialize;
use crate::relation::{decode, encode, Relation, SignPattern, Value};

/// Minimal tuples of a Boolean relation with `0^n ∉ R`, up to `max_weight`,
/// ordered by weight and then lexicographically.
pub fn enumerate_minimal_tuples(rel: &Relation, max_weight: usize) -> Result<Vec<Vec<Value>>> {
    Ok(minimal_codes(rel, max_weight)?.into_iter().map(|c| decode(2, rel.arity(), c)).collect())
}

fn minimal_codes(rel: &Relation, max_weight: usize) -> Result<Vec<u64>> {
    if !rel.is_boolean() {
        return Err(Error::Precondition("minimal tuples need a Boolean relation".into()));
    }
    if rel.contains_code(0) {
        return Err(Error::Precondition("the all-zero tuple is in the relation".into()));
    }
    let mut codes: Vec<u64> = rel.codes().filter(|c| c.count_ones() as usize <= max_weight).collect();
    codes.sort_by_key(|&c| (c.count_ones(), c));
    let mut minimal: Vec<u64> = Vec::new();
    for c in codes {
        if !minimal.iter().any(|&m| m & !c == 0) {
            minimal.push(c);
        }
    }
    Ok(minimal)
}

/// `⌈(2c)^radius⌉`, saturating: the bound on the search tree when every
/// weight class has at most `c^i` minimal tuples.
pub fn restart_budget(c: f64, radius: usize) -> u64 {
    let b = (2.0 * c).powi(radius as i32).ceil();
    if b >= u64::MAX as f64 {
        u64::MAX
    } else {
        b as u64
    }
}

type MinimalCache = HashMap<(usize, u64), Arc<Vec<u64>>>;

struct Search<'a> {
    /// Constraint relations over their distinct variables.
    rels: Vec<(Vec<usize>, Relation)>,
    /// Minimal codes keyed by constraint and the zeroed projection.
    cache: Mutex<MinimalCache>,
    counters: &'a Counters,
}

impl<'a> Search<'a> {
    fn new(inst: &Instance, counters: &'a Counters) -> Result<Self> {
        let rels = inst
            .constraints()
            .iter()
            .filter(|c| !c.scope.is_empty())
            .map(|c| {
                let view = ConstraintView::of(inst, c, counters);
                Ok((view.vars().to_vec(), materialize(&view)?))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Search { rels, cache: Mutex::new(HashMap::new()), counters })
    }

    fn minimal(&self, ci: usize, proj: &[Value]) -> Result<Arc<Vec<u64>>> {
        let key = (ci, encode(2, proj));
        if let Some(m) = self.cache.lock().expect("cache lock").get(&key) {
            return Ok(m.clone());
        }
        let rel = &self.rels[ci].1;
        let flipped = rel.apply_sign_pattern(&SignPattern::zeroing(proj))?;
        let m = Arc::new(minimal_codes(&flipped, rel.arity())?);
        self.cache.lock().expect("cache lock").insert(key, m.clone());
        Ok(m)
    }

    fn run(&self, t: &mut Vec<Value>, radius: usize) -> Result<bool> {
        self.counters.add_nodes(1);
        let falsified = self.rels.iter().enumerate().find_map(|(ci, (vars, rel))| {
            let proj: Vec<Value> = vars.iter().map(|&v| t[v]).collect();
            (!rel.contains(&proj)).then_some((ci, proj))
        });
        let Some((ci, proj)) = falsified else { return Ok(true) };
        if radius == 0 {
            return Ok(false);
        }
        let r = proj.len();
        for &u in self.minimal(ci, &proj)?.iter() {
            let w = u.count_ones() as usize;
            if w > radius {
                break;
            }
            let flips: Vec<usize> = (0..r).filter(|&i| u >> (r - 1 - i) & 1 == 1).map(|i| self.rels[ci].0[i]).collect();
            for &v in &flips {
                t[v] ^= 1;
            }
            if self.run(t, radius - w)? {
                return Ok(true);
            }
            for &v in &flips {
                t[v] ^= 1;
            }
        }
        Ok(false)
    }
}

fn preconditions(inst: &Instance, k: usize, skip: bool) -> Result<()> {
    if inst.domain_size() != 2 {
        return Err(Error::Precondition("local search needs a Boolean domain".into()));
    }
    if skip {
        return Ok(());
    }
    if let Some(r) = inst.relations().iter().find(|r| r.explicit().is_none()) {
        return Err(Error::Precondition(format!("local search needs explicit relations, {} is an oracle", r.name)));
    }
    check_language(inst, &make_near(k, 2)?)
}

/// Exhaustive search for a solution within Hamming distance `radius` of
/// `start`. Relations are not checked against any operation.
pub fn local_search_from(inst: &Instance, start: &[Value], radius: usize) -> Result<Option<Vec<Value>>> {
    if inst.domain_size() != 2 || start.len() != inst.n_vars() {
        return Err(Error::InvalidParameter("start must be a Boolean tuple over all variables".into()));
    }
    let counters = Counters::default();
    if !nullary_ok(inst, &counters) {
        return Ok(None);
    }
    let search = Search::new(inst, &counters)?;
    let mut t = start.to_vec();
    Ok(search.run(&mut t, radius)?.then_some(t))
}

/// Random restarts of the local search. SAT answers are certified; UNSAT is
/// exact only when the radius covers all `n` variables.
pub fn solve_knu_localsearch(inst: &Instance, opts: &SolveOptions) -> Result<SolveReport> {
    let timer = Timer::start();
    preconditions(inst, opts.k, opts.skip_precheck)?;
    let n = inst.n_vars();
    let radius = opts.radius.unwrap_or(n).min(n);
    let counters = Counters::default();
    let mut found = None;
    if nullary_ok(inst, &counters) {
        let search = Search::new(inst, &counters)?;
        let restarts = usize::try_from(opts.restarts.max(1)).unwrap_or(usize::MAX);
        found = exec::find_first(0..restarts, |r| {
            let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
            rng.set_stream(r as u64);
            let mut t: Vec<Value> = (0..n).map(|_| rng.gen_range(0..2)).collect();
            match search.run(&mut t, radius) {
                Ok(true) => Some(Ok(t)),
                Ok(false) => None,
                Err(e) => Some(Err(e)),
            }
        })
        .transpose()?;
    }
    let complete = found.is_some() || radius >= n || !nullary_ok(inst, &counters);
    Ok(SolveReport {
        algorithm: Algorithm::LsKnu,
        assignment: found,
        oracle_queries: counters.queries(),
        enumerated_nodes: counters.nodes(),
        graph_edges: 0,
        wall_time: timer.elapsed(),
        variable_order: (0..n).collect(),
        complete,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::gen::{clause_relation, gen_ksat};
    use crate::ops::preserve::{close_under, preserves};
    use crate::solver::solve_bruteforce;
    use proptest::prelude::*;

    #[test]
    fn three_clause_minimal_tuples() {
        let clause = clause_relation(&[0, 0, 0]);
        let m = enumerate_minimal_tuples(&clause, 3).unwrap();
        assert_eq!(m, vec![vec![0, 0, 1], vec![0, 1, 0], vec![1, 0, 0]]);
        assert!(enumerate_minimal_tuples(&Relation::full(2, 3).unwrap(), 3).is_err());
    }

    #[test]
    fn all_ones_has_one_minimal_tuple() {
        let ones = Relation::from_tuples(2, 5, &[[1; 5]]).unwrap();
        assert_eq!(enumerate_minimal_tuples(&ones, 5).unwrap(), vec![vec![1; 5]]);
        assert!(enumerate_minimal_tuples(&ones, 4).unwrap().is_empty());
        let mut inst = Instance::new(5, 2).unwrap();
        let r = inst.add_relation("ones", ones, None).unwrap();
        inst.add_constraint(r, (0..5).collect()).unwrap();
        assert_eq!(local_search_from(&inst, &[0; 5], 5).unwrap(), Some(vec![1; 5]));
        assert_eq!(local_search_from(&inst, &[0; 5], 4).unwrap(), None);
    }

    #[test]
    fn satisfied_start_needs_no_search() {
        let inst = gen_ksat(6, 5, 2, 1).unwrap();
        let sol = solve_bruteforce(&inst).unwrap().assignment.unwrap();
        assert_eq!(local_search_from(&inst, &sol, 0).unwrap(), Some(sol));
    }

    #[test]
    fn budget() {
        assert_eq!(restart_budget(1.0, 3), 8);
        assert_eq!(restart_budget(1.5, 2), 9);
        assert_eq!(restart_budget(10.0, 40), u64::MAX);
    }

    #[test]
    fn satisfiable_two_sat_twenty_vars() {
        let sat: Vec<Instance> =
            (0..).map(|seed| gen_ksat(20, 30, 2, seed).unwrap()).filter(|i| solve_bruteforce(i).unwrap().is_sat()).take(10).collect();
        for (seed, inst) in sat.iter().enumerate() {
            let opts = SolveOptions { restarts: restart_budget(1.0, 2), seed: seed as u64, ..SolveOptions::default() };
            let rep = solve_knu_localsearch(inst, &opts).unwrap();
            assert!(inst.check_assignment(&rep.assignment.unwrap()));
        }
    }

    #[test]
    fn full_radius_is_exact() {
        for seed in 0..40 {
            let inst = gen_ksat(10, 22, 2, seed).unwrap();
            let rep = solve_knu_localsearch(&inst, &SolveOptions { seed, ..SolveOptions::default() }).unwrap();
            assert!(rep.complete);
            assert_eq!(rep.is_sat(), solve_bruteforce(&inst).unwrap().is_sat());
            let short = SolveOptions { radius: Some(2), seed, ..SolveOptions::default() };
            let rep = solve_knu_localsearch(&inst, &short).unwrap();
            assert!(rep.is_sat() || !rep.complete);
        }
    }

    #[test]
    fn rejects_non_near_relations() {
        let inst = gen_ksat(6, 5, 3, 0).unwrap();
        assert!(solve_knu_localsearch(&inst, &SolveOptions::default()).is_err());
        let opts = SolveOptions { k: 4, ..SolveOptions::default() };
        assert!(solve_knu_localsearch(&inst, &opts).is_ok());
    }

    fn nearest_distance(inst: &Instance, start: &[Value]) -> Option<usize> {
        let n = inst.n_vars();
        (0..1u64 << n)
            .map(|c| decode(2, n, c))
            .filter(|a| inst.check_assignment(a))
            .map(|a| a.iter().zip(start).filter(|(x, y)| x != y).count())
            .min()
    }

    /// Minimal-tuple families of weight `i` contain no `k` distinct sets
    /// whose pairwise intersections all equal the common core.
    fn has_sunflower(family: &[u64], k: usize) -> bool {
        fn grow(family: &[u64], from: usize, picked: &mut Vec<u64>, k: usize) -> bool {
            if picked.len() == k {
                let core = picked.iter().fold(u64::MAX, |a, &b| a & b);
                return picked.iter().enumerate().all(|(i, &a)| picked[i + 1..].iter().all(|&b| a & b == core));
            }
            (from..family.len()).any(|j| {
                picked.push(family[j]);
                let ok = grow(family, j + 1, picked, k);
                picked.pop();
                ok
            })
        }
        grow(family, 0, &mut Vec::new(), k)
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn finds_solution_iff_within_radius(
            n in 3usize..=12, m in 1usize..20, seed in any::<u64>(), start_code in any::<u64>(), radius in 0usize..6,
        ) {
            let inst = gen_ksat(n, m, 2, seed).unwrap();
            let start = decode(2, n, start_code % (1 << n));
            let got = local_search_from(&inst, &start, radius).unwrap();
            let expect = nearest_distance(&inst, &start).is_some_and(|d| d <= radius);
            prop_assert_eq!(got.is_some(), expect);
            if let Some(a) = got {
                prop_assert!(inst.check_assignment(&a));
                prop_assert!(a.iter().zip(&start).filter(|(x, y)| x != y).count() <= radius);
            }
        }

        #[test]
        fn near3_minimal_families_are_sunflower_free(arity in 3usize..=5, seeds in prop::collection::vec(1u64..32, 1..5)) {
            let total = 1u64 << arity;
            let base = Relation::from_codes(2, arity, seeds.iter().map(|s| s % total).filter(|&c| c != 0)).unwrap();
            prop_assume!(!base.is_empty());
            let rel = close_under(&make_near(3, 2).unwrap(), &base).unwrap();
            prop_assume!(!rel.contains_code(0));
            prop_assert!(preserves(&make_near(3, 2).unwrap(), &rel).unwrap().is_none());
            let minimal = minimal_codes(&rel, arity).unwrap();
            for w in 1..=arity as u32 {
                let family: Vec<u64> = minimal.iter().copied().filter(|c| c.count_ones() == w).collect();
                prop_assert!(!has_sunflower(&family, 3));
            }
        }
    }
}
