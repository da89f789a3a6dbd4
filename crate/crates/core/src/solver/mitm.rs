//! Meet in the middle for CSPs whose relations are preserved by `edge_2`.
//!
//! Split the variables into halves `I`, `J`. A straddling constraint is
//! rectangular between its `I`-part and `J`-part, so two half assignments
//! are compatible exactly when they carry the same biclique label. Each half
//! assignment gets a vector of labels (constraints inside one half
//! contribute a constant marker) and the halves are hash-joined.

use std::collections::HashMap;

use super::{
    biclique_label, check_language, guarded_count, nullary_ok, reordered, restore, write_block, Algorithm,
    ConstraintView, Counters, SolveOptions, SolveReport, Timer,
};
use crate::error::Result;
use crate::exec;
use crate::instance::Instance;
use crate::ops::pattern::make_edge;
use crate::relation::Value;

/// Label token for constraints entirely inside one half.
const MARKER: u8 = 1;

enum Placement {
    Left,
    Right,
    Straddle { left: Vec<usize>, right: Vec<usize> },
}

struct Prepared<'a> {
    views: Vec<ConstraintView<'a>>,
    placement: Vec<Placement>,
}

fn prepare<'a>(inst: &'a Instance, h: usize, counters: &'a Counters) -> Prepared<'a> {
    let mut views = Vec::new();
    let mut placement = Vec::new();
    for c in inst.constraints().iter().filter(|c| !c.scope.is_empty()) {
        let view = ConstraintView::of(inst, c, counters);
        let (left, right): (Vec<usize>, Vec<usize>) = (0..view.vars().len()).partition(|&i| view.vars()[i] < h);
        placement.push(match (left.is_empty(), right.is_empty()) {
            (false, true) => Placement::Left,
            (true, false) => Placement::Right,
            _ => Placement::Straddle { left, right },
        });
        views.push(view);
    }
    Prepared { views, placement }
}

/// Label vector of one half assignment, or `None` if some constraint
/// already rejects it.
fn label_vector(p: &Prepared, a: &[Option<Value>], left_side: bool) -> Option<Vec<u8>> {
    let mut key = Vec::new();
    for (view, place) in p.views.iter().zip(&p.placement) {
        match place {
            Placement::Left | Placement::Right => {
                let own = matches!(place, Placement::Left) == left_side;
                if own && !view.admits(a) {
                    return None;
                }
                key.push(MARKER);
            }
            Placement::Straddle { left, right } => {
                let (mine, other) = if left_side { (left, right) } else { (right, left) };
                let side: Vec<Value> = mine.iter().map(|&i| a[view.vars()[i]].expect("half assigned")).collect();
                let label = biclique_label(view, mine, other, &side).ok()?;
                // normalised to (left part, right part)
                let (l, r) = if left_side { (label.s0, label.t0) } else { (label.t0, label.s0) };
                key.extend(l.iter().chain(&r).map(|&v| v as u8));
            }
        }
    }
    Some(key)
}

pub fn solve_2edge_mitm(inst: &Instance, opts: &SolveOptions) -> Result<SolveReport> {
    let timer = Timer::start();
    if !opts.skip_precheck {
        check_language(inst, &make_edge(2, inst.domain_size())?)?;
    }
    let (work, order) = reordered(inst, opts.reorder)?;
    let n = work.n_vars();
    let d = work.domain_size();
    let h = n.div_ceil(2);
    let left_count = guarded_count(d, h)?;
    let right_count = guarded_count(d, n - h)?;
    let counters = Counters::default();
    let mut found = None;
    if nullary_ok(&work, &counters) {
        let prep = prepare(&work, h, &counters);
        let labels = |count: usize, range: std::ops::Range<usize>, left_side: bool| {
            exec::map_range(0..count, |code| {
                let mut a = vec![None; n];
                write_block(&mut a, d, range.clone(), code);
                label_vector(&prep, &a, left_side)
            })
        };
        let left = labels(left_count, 0..h, true);
        let right = labels(right_count, h..n, false);
        counters.add_nodes((left_count + right_count) as u64);
        let mut table: HashMap<&[u8], usize> = HashMap::new();
        for (code, key) in right.iter().enumerate() {
            if let Some(k) = key {
                table.entry(k.as_slice()).or_insert(code);
            }
        }
        found = left.iter().enumerate().find_map(|(lcode, key)| {
            let rcode = *table.get(key.as_deref()?)?;
            let mut a = vec![None; n];
            write_block(&mut a, d, 0..h, lcode);
            write_block(&mut a, d, h..n, rcode);
            Some(a.into_iter().map(|v| v.expect("assigned")).collect::<Vec<Value>>())
        });
    }
    Ok(SolveReport {
        algorithm: Algorithm::Mitm2e,
        assignment: found.map(|a| restore(&order, &a)),
        oracle_queries: counters.queries(),
        enumerated_nodes: counters.nodes(),
        graph_edges: 0,
        wall_time: timer.elapsed(),
        variable_order: order,
        complete: true,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::gen::{gen_exact_sat, gen_linear_mod};
    use crate::instance::parse_instance;
    use crate::solver::solve_bruteforce;

    fn agree(inst: &Instance) {
        let brute = solve_bruteforce(inst).unwrap();
        let rep = solve_2edge_mitm(inst, &SolveOptions::default()).unwrap();
        assert_eq!(brute.is_sat(), rep.is_sat());
        if let Some(a) = &rep.assignment {
            assert!(inst.check_assignment(a));
        }
        let n = inst.n_vars() as u32;
        let bound = 2 * (inst.domain_size() as u64).pow(n.div_ceil(2));
        assert!(rep.enumerated_nodes <= bound);
    }

    #[test]
    fn parity_systems() {
        for seed in 0..40 {
            agree(&gen_linear_mod(6, 4, 2, seed).unwrap());
            agree(&gen_linear_mod(7, 5, 3, seed).unwrap());
        }
    }

    #[test]
    fn exact_sat() {
        for seed in 0..40 {
            agree(&gen_exact_sat(8, 5, 3, seed).unwrap());
        }
    }

    #[test]
    fn no_straddling_constraints() {
        let inst = parse_instance(
            "DOMAIN 2\nVARS 4\nREL E ARITY 2 TUPLES 00 11\nREL N ARITY 2 TUPLES 01 10\nCON E 0 1\nCON N 2 3\n",
        )
        .unwrap();
        let opts = SolveOptions { reorder: false, ..SolveOptions::default() };
        let rep = solve_2edge_mitm(&inst, &opts).unwrap();
        assert_eq!(rep.assignment, Some(vec![0, 0, 0, 1]));
    }

    #[test]
    fn oracle_backed_constraints() {
        let inst = parse_instance(
            "DOMAIN 2\nVARS 6\nREL L ORACLE linear coeffs=1,1,1,1 target=1 mod=5\nREL M ORACLE linear coeffs=1,2,1 target=3 mod=4\n\
             CON L 0 1 2 3\nCON M 2 4 5\nCON L 1 3 4 5\n",
        )
        .unwrap();
        agree(&inst);
    }

    #[test]
    fn precondition_violation() {
        let inst = parse_instance("DOMAIN 2\nVARS 3\nREL C ARITY 2 TUPLES 01 10 11\nCON C 0 1\n").unwrap();
        let err = solve_2edge_mitm(&inst, &SolveOptions::default()).unwrap_err();
        assert!(err.to_string().contains("not preserved"), "{err}");
        let skipped = SolveOptions { skip_precheck: true, ..SolveOptions::default() };
        assert!(solve_2edge_mitm(&inst, &skipped).is_ok());
    }

    #[test]
    fn repeated_variables() {
        for seed in 0..20 {
            let mut inst = gen_exact_sat(6, 3, 3, seed).unwrap();
            let r = inst.relation_index("x1in3").unwrap();
            inst.add_constraint(r, vec![seed as usize % 6, 5 - seed as usize % 6, seed as usize % 6]).unwrap();
            agree(&inst);
        }
    }
}
