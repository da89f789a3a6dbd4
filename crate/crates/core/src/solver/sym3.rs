//! Single-label triangles for mixed languages of `edge_2` relations,
//! `near_3` relations and symmetric Boolean relations preserved by `edge_3`.
//!
//! The vertices and edges are those of the 3-NU triangle search. Each
//! 2-edge-like constraint additionally labels the edges: an `X` vertex gets
//! the 2-edge label of its assignment in the split `X | Y ∪ Z`, a `YZ` edge
//! the label of the joint assignment. For a symmetric relation the labels
//! are taken in its 2-edge embedding, the residue class that completes its
//! weight set. An edge's colour is the vector of its labels, and satisfying
//! assignments are exactly the single-colour triangles.

use std::collections::HashMap;
use std::sync::Arc;

use super::nu3::{TriSetup, SIDES};
use super::triangle::{find_triangle, LabeledTriGraph, Side, TriangleMode};
use super::{
    biclique_label, describe_witness, nullary_ok, reordered, restore, Algorithm, ConstraintView, Counters,
    SolveOptions, SolveReport, Timer,
};
use crate::error::{Error, Result};
use crate::exec;
use crate::instance::gen::residue_class;
use crate::instance::{Instance, NamedRelation, TypeTag};
use crate::ops::pattern::{make_edge, make_near, PartialOp};
use crate::ops::preserve::{preserves, sample_witness};
use crate::oracle::{ExtensionOracle, OracleSpec, SymmetricOracle};
use crate::relation::{SymmetricWeightSet, Value};

fn violates(op: &PartialOp, rel: &NamedRelation) -> Result<Option<String>> {
    let Some(r) = rel.explicit() else { return Ok(None) };
    let w = match preserves(op, r) {
        Err(Error::Infeasible(_)) => sample_witness(op, r, 10_000, 0)?,
        other => other?,
    };
    Ok(w.map(|w| describe_witness(&rel.name, op, &w)))
}

/// Weight set of a symmetric relation, read from the table, the oracle
/// spec, or by querying one tuple per weight.
fn weight_set(rel: &NamedRelation) -> Result<SymmetricWeightSet> {
    if let Some(r) = rel.explicit() {
        return r
            .symmetric_weights()
            .ok_or_else(|| Error::Precondition(format!("relation {} is tagged sym-edge3 but is not symmetric", rel.name)));
    }
    if let Some(OracleSpec::Symmetric { arity, weights }) = rel.spec() {
        return SymmetricWeightSet::new(*arity, weights.iter().copied());
    }
    let n = rel.arity();
    let idx: Vec<usize> = (0..n).collect();
    let accepted = (0..=n).filter(|&w| {
        let t: Vec<Value> = (0..n).map(|i| Value::from(i < w)).collect();
        rel.oracle().query(&idx, &t)
    });
    SymmetricWeightSet::new(n, accepted)
}

/// Type of every relation: the declared tag, checked when the relation is
/// explicit, or inferred for untagged explicit relations.
pub fn relation_types(inst: &Instance, skip_check: bool) -> Result<Vec<TypeTag>> {
    let d = inst.domain_size();
    let edge2 = make_edge(2, d)?;
    let near3 = make_near(3, d)?;
    let sym_ok = |rel: &NamedRelation| -> Result<Option<String>> {
        if d != 2 {
            return Ok(Some(format!("relation {} is tagged sym-edge3 over a non-Boolean domain", rel.name)));
        }
        let s = weight_set(rel)?;
        if !s.weights().is_empty() && residue_class(&s).is_none() {
            return Ok(Some(format!("relation {} has weight set {:?}, not admissible for edge_3", rel.name, s.weights())));
        }
        violates(&make_edge(3, 2)?, rel)
    };
    inst.relations()
        .iter()
        .map(|rel| match rel.tag {
            Some(tag) => {
                let problem = match tag {
                    TypeTag::Edge2 if !skip_check => violates(&edge2, rel)?,
                    TypeTag::Nu3 if !skip_check => violates(&near3, rel)?,
                    TypeTag::SymEdge3 => sym_ok(rel)?,
                    _ => None,
                };
                match problem {
                    Some(msg) => Err(Error::Precondition(format!("type tag {tag} mismatch: {msg}"))),
                    None => Ok(tag),
                }
            }
            None if rel.explicit().is_none() => {
                Err(Error::Precondition(format!("oracle relation {} needs a TYPE tag", rel.name)))
            }
            None => {
                if violates(&edge2, rel)?.is_none() {
                    Ok(TypeTag::Edge2)
                } else if violates(&near3, rel)?.is_none() {
                    Ok(TypeTag::Nu3)
                } else if sym_ok(rel)?.is_none() {
                    Ok(TypeTag::SymEdge3)
                } else {
                    Err(Error::Precondition(format!(
                        "relation {} is neither edge2, nu3 nor symmetric edge3",
                        rel.name
                    )))
                }
            }
        })
        .collect()
}

/// The relation whose 2-edge labels are used, or `None` for a constant label.
fn embedding(rel: &NamedRelation, tag: TypeTag) -> Result<Option<Arc<dyn ExtensionOracle>>> {
    Ok(match tag {
        TypeTag::Nu3 => None,
        TypeTag::Edge2 => Some(match &rel.source {
            crate::instance::RelationSource::Explicit(o) => o.clone() as Arc<dyn ExtensionOracle>,
            crate::instance::RelationSource::Oracle(_, o) => o.clone(),
        }),
        TypeTag::SymEdge3 => {
            let s = weight_set(rel)?;
            let n = s.arity();
            residue_class(&s).map(|(a, b)| {
                let hat = SymmetricWeightSet::new(n, (a..=n).step_by(b)).expect("weights within arity");
                Arc::new(SymmetricOracle::new(hat)) as Arc<dyn ExtensionOracle>
            })
        }
    })
}

struct Labeller<'a> {
    view: ConstraintView<'a>,
    x_part: Vec<usize>,
    rest: Vec<usize>,
}

/// Builds the coloured graph of an instance in its given variable order.
pub(crate) fn build_graph<'a>(
    inst: &'a Instance,
    hats: &'a [Option<Arc<dyn ExtensionOracle>>],
    counters: &'a Counters,
) -> Result<(TriSetup<'a>, LabeledTriGraph)> {
    let setup = TriSetup::new(inst, counters)?;
    let x_range = setup.ranges[0].clone();
    let labellers: Vec<Labeller> = inst
        .constraints()
        .iter()
        .filter(|c| !c.scope.is_empty())
        .filter_map(|c| {
            let hat = hats[c.relation].as_deref()?;
            let view = ConstraintView::new(hat, &c.scope, counters);
            let (x_part, rest) = (0..view.vars().len()).partition(|&i| x_range.contains(&view.vars()[i]));
            Some(Labeller { view, x_part, rest })
        })
        .collect();
    let label = |a: &[Option<Value>], from_x: bool| -> Option<Vec<u8>> {
        let mut key = Vec::new();
        for l in &labellers {
            let (mine, other) = if from_x { (&l.x_part, &l.rest) } else { (&l.rest, &l.x_part) };
            let side: Vec<Value> = mine.iter().map(|&i| a[l.view.vars()[i]].expect("assigned")).collect();
            let lab = biclique_label(&l.view, mine, other, &side).ok()?;
            let (xp, yzp) = if from_x { (lab.s0, lab.t0) } else { (lab.t0, lab.s0) };
            key.extend(xp.iter().chain(&yzp).map(|&v| v as u8));
        }
        Some(key)
    };
    let x_labels = exec::map_range(0..setup.vertices[0].len(), |i| label(&setup.assignment(&[(0, setup.vertices[0][i])]), true));
    let mut ids: HashMap<Vec<u8>, u32> = HashMap::new();
    let mut intern = |k: Vec<u8>| {
        let next = ids.len() as u32;
        *ids.entry(k).or_insert(next)
    };
    let x_colours: Vec<Option<u32>> = x_labels.into_iter().map(|k| k.map(&mut intern)).collect();
    let mut g = LabeledTriGraph::new(setup.vertices[0].len(), setup.vertices[1].len(), setup.vertices[2].len());
    for (side, p, q) in SIDES {
        let rows = setup.edges(p, q);
        if side == Side::YZ {
            let labelled = exec::map_range(0..rows.len(), |y| {
                rows[y]
                    .iter()
                    .map(|&z| (z, label(&setup.assignment(&[(1, setup.vertices[1][y]), (2, setup.vertices[2][z])]), false)))
                    .collect::<Vec<_>>()
            });
            for (y, row) in labelled.into_iter().enumerate() {
                for (z, key) in row {
                    if let Some(k) = key {
                        g.add_edge(side, y, z, intern(k));
                    }
                }
            }
        } else {
            for (x, row) in rows.into_iter().enumerate() {
                if let Some(c) = x_colours[x] {
                    for b in row {
                        g.add_edge(side, x, b, c);
                    }
                }
            }
        }
    }
    Ok((setup, g))
}

pub fn solve_sym3edge(inst: &Instance, opts: &SolveOptions) -> Result<SolveReport> {
    let timer = Timer::start();
    let types = relation_types(inst, opts.skip_precheck)?;
    let hats = inst
        .relations()
        .iter()
        .zip(&types)
        .map(|(r, &t)| embedding(r, t))
        .collect::<Result<Vec<_>>>()?;
    let (work, order) = reordered(inst, opts.reorder)?;
    let counters = Counters::default();
    let mut found = None;
    let mut edges = 0;
    if nullary_ok(&work, &counters) {
        let (setup, g) = build_graph(&work, &hats, &counters)?;
        counters.add_nodes(setup.enumerated);
        edges = g.edge_count();
        found = find_triangle(&g, TriangleMode::SingleLabel).map(|t| setup.full_assignment(t));
    }
    Ok(SolveReport {
        algorithm: Algorithm::Sym3e,
        assignment: found.map(|a| restore(&order, &a)),
        oracle_queries: counters.queries(),
        enumerated_nodes: counters.nodes(),
        graph_edges: edges,
        wall_time: timer.elapsed(),
        variable_order: order,
        complete: true,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::gen::{gen_binary_csp, gen_exact_sat, gen_ksat, gen_linear_mod, gen_sym3e_instance};
    use crate::instance::parse_instance;
    use crate::ops::preserve::close_under;
    use crate::relation::{decode, Relation};
    use crate::solver::{solve_2edge_mitm, solve_3nu_triangle, solve_bruteforce};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn agree(inst: &Instance) {
        let brute = solve_bruteforce(inst).unwrap();
        let rep = solve_sym3edge(inst, &SolveOptions::default()).unwrap();
        assert_eq!(brute.is_sat(), rep.is_sat(), "{}", crate::instance::serialize_instance(inst));
        if let Some(a) = &rep.assignment {
            assert!(inst.check_assignment(a));
        }
    }

    #[test]
    fn symmetric_with_two_clauses() {
        let text = "DOMAIN 2\nVARS 6\nREL S ARITY 6 TUPLES 100000 010000 001000 000100 000010 000001 \
                    111000 110100 110010 110001 101100 101010 101001 100110 100101 100011 011100 011010 011001 \
                    010110 010101 010011 001110 001101 001011 000111 TYPE sym-edge3\n\
                    REL C ARITY 2 TUPLES 01 10 11 TYPE nu3\nREL D ARITY 2 TUPLES 00 01 10 TYPE nu3\n\
                    CON S 0 1 2 3 4 5\nCON C 0 3\nCON C 1 4\nCON D 0 1\nCON D 3 4\n";
        let inst = parse_instance(text).unwrap();
        assert_eq!(inst.relations()[0].explicit().unwrap().symmetric_weights().unwrap().weights(), vec![1, 3]);
        agree(&inst);
        for seed in 0..30 {
            let mut more = inst.clone();
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            for _ in 0..3 {
                let a = rng.gen_range(0..6);
                let b = (a + rng.gen_range(1..6)) % 6;
                more.add_constraint_named(if rng.gen() { "C" } else { "D" }, vec![a, b]).unwrap();
            }
            agree(&more);
        }
    }

    #[test]
    fn mixed_random() {
        for seed in 0..60 {
            agree(&gen_sym3e_instance(9, 5, seed).unwrap());
        }
    }

    #[test]
    fn agrees_with_other_solvers() {
        let opts = SolveOptions::default();
        for seed in 0..25 {
            let e = gen_exact_sat(8, 5, 3, seed).unwrap();
            assert_eq!(solve_sym3edge(&e, &opts).unwrap().is_sat(), solve_2edge_mitm(&e, &opts).unwrap().is_sat());
            let l = gen_linear_mod(7, 5, 3, seed).unwrap();
            assert_eq!(solve_sym3edge(&l, &opts).unwrap().is_sat(), solve_2edge_mitm(&l, &opts).unwrap().is_sat());
            let b = gen_binary_csp(7, 10, 3, 0.4, seed).unwrap();
            assert_eq!(solve_sym3edge(&b, &opts).unwrap().is_sat(), solve_3nu_triangle(&b, &opts).unwrap().is_sat());
            let s = gen_ksat(9, 18, 2, seed).unwrap();
            assert_eq!(solve_sym3edge(&s, &opts).unwrap().is_sat(), solve_3nu_triangle(&s, &opts).unwrap().is_sat());
        }
    }

    #[test]
    fn tag_checks() {
        let bad = parse_instance("DOMAIN 2\nVARS 3\nREL C ARITY 3 TUPLES 001 010 011 100 101 110 111 TYPE edge2\nCON C 0 1 2\n").unwrap();
        assert!(matches!(solve_sym3edge(&bad, &SolveOptions::default()), Err(Error::Precondition(_))));
        let untagged = parse_instance("DOMAIN 2\nVARS 3\nREL C ARITY 3 TUPLES 001 010 011 100 101 110 111\nCON C 0 1 2\n").unwrap();
        assert!(solve_sym3edge(&untagged, &SolveOptions::default()).is_err());
        let oracle = parse_instance("DOMAIN 2\nVARS 3\nREL L ORACLE linear coeffs=1,1,1 target=1 mod=4\nCON L 0 1 2\n").unwrap();
        assert!(solve_sym3edge(&oracle, &SolveOptions::default()).is_err());
        let tagged = parse_instance(
            "DOMAIN 2\nVARS 6\nREL L ORACLE linear coeffs=1,1,1 target=1 mod=4 TYPE edge2\n\
             REL S ORACLE symmetric arity=5 weights=0,3 TYPE sym-edge3\nCON L 0 1 2\nCON S 1 2 3 4 5\n",
        )
        .unwrap();
        agree(&tagged);
        let wrong = parse_instance("DOMAIN 2\nVARS 4\nREL S ORACLE symmetric arity=4 weights=1,2 TYPE sym-edge3\nCON S 0 1 2 3\n").unwrap();
        assert!(solve_sym3edge(&wrong, &SolveOptions::default()).is_err());
    }

    /// For one relation of each admitted class on variables split 2+2+2,
    /// a triple satisfies it iff it is a single-label triangle.
    fn single_label_exhaustive(rel: Relation, tag: TypeTag) {
        let mut inst = Instance::new(6, 2).unwrap();
        let r = inst.add_relation("R", rel.clone(), Some(tag)).unwrap();
        inst.add_constraint(r, (0..6).collect()).unwrap();
        let types = relation_types(&inst, false).unwrap();
        let hats: Vec<_> = inst.relations().iter().zip(&types).map(|(r, &t)| embedding(r, t).unwrap()).collect();
        let counters = Counters::default();
        let (setup, g) = build_graph(&inst, &hats, &counters).unwrap();
        let index = |p: usize, code: usize| setup.vertices[p].iter().position(|&c| c == code);
        for x in 0..4 {
            for y in 0..4 {
                for z in 0..4 {
                    let t = decode(2, 6, (x * 16 + y * 4 + z) as u64);
                    let single = match (index(0, x), index(1, y), index(2, z)) {
                        (Some(a), Some(b), Some(c)) => {
                            g.has_edge(Side::XY, a, b)
                                && g.has_edge(Side::XZ, a, c)
                                && g.has_edge(Side::YZ, b, c)
                                && g.colour(Side::XY, a, b) == g.colour(Side::YZ, b, c)
                                && g.colour(Side::XZ, a, c) == g.colour(Side::YZ, b, c)
                        }
                        _ => false,
                    };
                    assert_eq!(single, rel.contains(&t), "{tag} {rel:?} at {t:?}");
                }
            }
        }
    }

    #[test]
    fn single_label_triangles_characterise_membership() {
        for mask in 1u32..1 << 7 {
            let s = SymmetricWeightSet::new(6, (0..=6).filter(|&i| mask >> i & 1 == 1)).unwrap();
            if residue_class(&s).is_some() {
                single_label_exhaustive(Relation::symmetric(&s).unwrap(), TypeTag::SymEdge3);
            }
        }
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let edge2 = make_edge(2, 2).unwrap();
        let near3 = make_near(3, 2).unwrap();
        for _ in 0..60 {
            let seeds: Vec<u64> = (0..rng.gen_range(1..5)).map(|_| rng.gen_range(0..64)).collect();
            let base = Relation::from_codes(2, 6, seeds).unwrap();
            single_label_exhaustive(close_under(&edge2, &base).unwrap(), TypeTag::Edge2);
            single_label_exhaustive(close_under(&near3, &base).unwrap(), TypeTag::Nu3);
        }
    }
}
