//! Seeded generators for the example languages and random instances.

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{Instance, TypeTag};
use crate::error::{Error, Result};
use crate::relation::{digit_char, format_tuple, Relation, SymmetricWeightSet, Value};

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn bad(msg: impl Into<String>) -> Error {
    Error::InvalidParameter(msg.into())
}

fn distinct_vars(rng: &mut ChaCha8Rng, n: usize, k: usize) -> Vec<usize> {
    sample(rng, n, k).into_vec()
}

/// `{0,1}^k` without `excluded`: the clause falsified only by `excluded`.
pub fn clause_relation(excluded: &[Value]) -> Relation {
    Relation::from_predicate(2, excluded.len(), |t| t != excluded).expect("small clause")
}

fn clause_name(excluded: &[Value]) -> String {
    format!("cl{}_{}", excluded.len(), format_tuple(excluded))
}

/// Adds the clause `⋁ l_i` given DIMACS-style literals (`±(v+1)`).
pub fn add_clause(inst: &mut Instance, literals: &[i64]) -> Result<()> {
    let mut scope = Vec::with_capacity(literals.len());
    let mut excluded = Vec::with_capacity(literals.len());
    for &lit in literals {
        if lit == 0 {
            return Err(bad("literal 0"));
        }
        scope.push(lit.unsigned_abs() as usize - 1);
        excluded.push(u32::from(lit < 0));
    }
    let rel = inst.intern_relation(&clause_name(&excluded), || clause_relation(&excluded), None)?;
    inst.add_constraint(rel, scope)
}

/// CNF over `n` Boolean variables with DIMACS literals.
pub fn cnf_instance(n: usize, clauses: &[Vec<i64>]) -> Result<Instance> {
    let mut inst = Instance::new(n, 2)?;
    for c in clauses {
        add_clause(&mut inst, c)?;
    }
    Ok(inst)
}

/// Random clauses on `k` distinct variables as DIMACS literals.
pub fn random_clauses(n: usize, m: usize, k: usize, seed: u64) -> Result<Vec<Vec<i64>>> {
    if k == 0 || k > n {
        return Err(bad(format!("clause width {k} needs 1 ≤ k ≤ n = {n}")));
    }
    let mut r = rng(seed);
    Ok((0..m)
        .map(|_| {
            distinct_vars(&mut r, n, k)
                .into_iter()
                .map(|v| if r.gen::<bool>() { v as i64 + 1 } else { -(v as i64 + 1) })
                .collect()
        })
        .collect())
}

/// Random `k`-CNF with `m` clauses.
pub fn gen_ksat(n: usize, m: usize, k: usize, seed: u64) -> Result<Instance> {
    cnf_instance(n, &random_clauses(n, m, k, seed)?)
}

/// `m` random 1-in-`k` constraints.
pub fn gen_exact_sat(n: usize, m: usize, k: usize, seed: u64) -> Result<Instance> {
    if k == 0 || k > n {
        return Err(bad(format!("constraint width {k} needs 1 ≤ k ≤ n = {n}")));
    }
    let mut inst = Instance::new(n, 2)?;
    let rel = inst.add_relation(
        format!("x1in{k}"),
        Relation::from_predicate(2, k, |t| t.iter().sum::<Value>() == 1)?,
        Some(TypeTag::Edge2),
    )?;
    let mut r = rng(seed);
    for _ in 0..m {
        inst.add_constraint(rel, distinct_vars(&mut r, n, k))?;
    }
    Ok(inst)
}

/// `Σ c_i x_i ≡ b (mod p)` over the domain `{0..p-1}`.
pub fn linear_relation(p: u32, coeffs: &[Value], rhs: Value) -> Result<Relation> {
    Relation::from_predicate(p, coeffs.len(), |t| {
        t.iter().zip(coeffs).map(|(&x, &c)| (x * c) % p).sum::<Value>() % p == rhs % p
    })
}

/// `m` random ternary linear equations modulo `p` (domain size `p`),
/// nonzero coefficients, uniform right-hand side.
pub fn gen_linear_mod(n: usize, m: usize, p: u32, seed: u64) -> Result<Instance> {
    if !(2..=36).contains(&p) {
        return Err(Error::BadDomainSize(p));
    }
    let arity = n.min(3);
    if arity == 0 && m > 0 {
        return Err(bad("linear constraints need at least one variable"));
    }
    let mut inst = Instance::new(n, p)?;
    let mut r = rng(seed);
    for _ in 0..m {
        let coeffs: Vec<Value> = (0..arity).map(|_| r.gen_range(1..p)).collect();
        let rhs = r.gen_range(0..p);
        let name = format!("lin{p}_{}_{}", coeffs.iter().map(|&c| digit_char(c)).collect::<String>(), digit_char(rhs));
        let rel = inst.intern_relation(&name, || linear_relation(p, &coeffs, rhs).expect("small"), Some(TypeTag::Edge2))?;
        inst.add_constraint(rel, distinct_vars(&mut r, n, arity))?;
    }
    Ok(inst)
}

/// Roots over GF(2) of `Σ_M Π_{i ∈ M} x_i`; the empty monomial is the
/// constant 1.
pub fn poly_relation(vars: usize, monomials: &[Vec<usize>]) -> Result<Relation> {
    if let Some(&index) = monomials.iter().flatten().find(|&&i| i >= vars) {
        return Err(Error::IndexOutOfRange { index, arity: vars });
    }
    Relation::from_predicate(2, vars, |t| {
        monomials.iter().map(|m| m.iter().map(|&i| t[i]).product::<Value>()).sum::<Value>() % 2 == 0
    })
}

/// Random GF(2) polynomial of degree at most `degree`: every monomial of
/// that degree or less is included with probability 1/2.
pub fn gen_poly_monomials(vars: usize, degree: usize, seed: u64) -> Vec<Vec<usize>> {
    let mut r = rng(seed);
    let mut out = Vec::new();
    for mask in 0u64..1 << vars {
        if (mask.count_ones() as usize) <= degree && r.gen::<bool>() {
            out.push((0..vars).filter(|i| mask >> i & 1 == 1).collect());
        }
    }
    out
}

pub fn gen_poly_relation(vars: usize, degree: usize, seed: u64) -> Result<Relation> {
    if vars > 20 {
        return Err(Error::Infeasible(1u128 << vars));
    }
    poly_relation(vars, &gen_poly_monomials(vars, degree, seed))
}

/// Greedy Sidon set inside `{0..n}`: repeatedly take the smallest value
/// keeping all pairwise sums (repeats included) distinct.
pub fn greedy_sidon(n: usize) -> Vec<usize> {
    let mut set: Vec<usize> = Vec::new();
    let mut sums = std::collections::HashSet::new();
    for x in 0..=n {
        let new: Vec<usize> = set.iter().map(|&s| s + x).chain([2 * x]).collect();
        if new.iter().all(|s| !sums.contains(s)) {
            sums.extend(new);
            set.push(x);
        }
    }
    set
}

pub fn is_sidon(set: &[usize]) -> bool {
    let mut sums = std::collections::HashSet::new();
    set.iter()
        .enumerate()
        .all(|(i, &a)| set[i..].iter().all(|&b| sums.insert(a + b)))
}

/// Symmetric relation of arity `n` accepting the weights of [`greedy_sidon`].
pub fn gen_sidon_relation(n: usize) -> Result<Relation> {
    Relation::symmetric(&SymmetricWeightSet::new(n, greedy_sidon(n))?)
}

/// `n` weights in `[1, 2^bits)` and a target; half the time the target is a
/// planted subset sum, otherwise uniform in `[0, Σ w]`.
pub fn gen_subset_sum(n: usize, bits: u32, seed: u64) -> Result<(Vec<u64>, u64)> {
    if bits == 0 || bits > 40 {
        return Err(bad(format!("weight bit length {bits} outside 1..=40")));
    }
    let mut r = rng(seed);
    let weights: Vec<u64> = (0..n).map(|_| r.gen_range(1..1u64 << bits)).collect();
    let total: u64 = weights.iter().sum();
    let target = if r.gen::<bool>() {
        weights.iter().filter(|_| r.gen::<bool>()).sum()
    } else {
        r.gen_range(0..=total)
    };
    Ok((weights, target))
}

/// Random binary CSP: `m` constraints on distinct pairs, each allowed pair
/// kept with probability `1 - tightness`.
pub fn gen_binary_csp(n: usize, m: usize, d: u32, tightness: f64, seed: u64) -> Result<Instance> {
    if n < 2 && m > 0 {
        return Err(bad("binary constraints need two variables"));
    }
    if !(0.0..=1.0).contains(&tightness) {
        return Err(bad(format!("tightness {tightness} outside [0, 1]")));
    }
    let mut inst = Instance::new(n, d)?;
    let mut r = rng(seed);
    for i in 0..m {
        let pairs: Vec<[Value; 2]> = (0..d * d)
            .filter(|_| r.gen::<f64>() >= tightness)
            .map(|c| [c / d, c % d])
            .collect();
        let rel = inst.add_relation(format!("b{i}"), Relation::from_tuples(d, 2, &pairs)?, Some(TypeTag::Nu3))?;
        inst.add_constraint(rel, distinct_vars(&mut r, n, 2))?;
    }
    Ok(inst)
}

/// Graph colouring with `colors` colours on a random graph with `edges`
/// distinct edges.
pub fn gen_coloring(vertices: usize, edges: usize, colors: u32, seed: u64) -> Result<Instance> {
    let max_edges = vertices * vertices.saturating_sub(1) / 2;
    if edges > max_edges {
        return Err(bad(format!("{edges} edges exceed the {max_edges} possible")));
    }
    let mut inst = Instance::new(vertices, colors)?;
    let neq = inst.add_relation("neq", Relation::from_predicate(colors, 2, |t| t[0] != t[1])?, Some(TypeTag::Nu3))?;
    let mut r = rng(seed);
    let chosen = sample(&mut r, max_edges, edges).into_vec();
    let mut all = Vec::with_capacity(max_edges);
    for a in 0..vertices {
        for b in a + 1..vertices {
            all.push((a, b));
        }
    }
    let mut picked: Vec<(usize, usize)> = chosen.into_iter().map(|i| all[i]).collect();
    picked.sort_unstable();
    for (a, b) in picked {
        inst.add_constraint(neq, vec![a, b])?;
    }
    Ok(inst)
}

/// Weight sets of arity `n` admitted for symmetric 3-edge constraints: a
/// complete residue class inside `{0..n}`, or a two-element set `{a, a+b}`
/// with `a < b` or its mirror `{n-a-b, n-a}`.
pub fn is_admissible_sym3(s: &SymmetricWeightSet) -> bool {
    residue_class(s).is_some()
}

/// `(a, b)` such that `S` is admissible and its embedding accepts exactly
/// the weights `≡ a (mod b)`. Empty sets are reported as `None`.
pub fn residue_class(s: &SymmetricWeightSet) -> Option<(usize, usize)> {
    let n = s.arity();
    let w = s.weights();
    match w.as_slice() {
        [] => None,
        [x] => Some((*x, n + 1)),
        [a, b2, ..] => {
            let b = b2 - a;
            let class: Vec<usize> = (a % b..=n).step_by(b).collect();
            let pair = w.len() == 2 && (*a < b || n - b2 < b);
            (class == w || pair).then_some((a % b, b))
        }
    }
}

/// Random mixed Boolean instance for the symmetric 3-edge solver. Each
/// constraint is one of: an admissible symmetric relation preserved by
/// `edge_3` (tag `sym-edge3`), 1-in-3 or even parity (tag `edge2`), or a
/// 2-clause (tag `nu3`).
pub fn gen_sym3e_instance(n: usize, m: usize, seed: u64) -> Result<Instance> {
    if n < 3 {
        return Err(bad("need at least three variables"));
    }
    let mut inst = Instance::new(n, 2)?;
    let mut r = rng(seed);
    for _ in 0..m {
        match r.gen_range(0..4) {
            0 | 1 => {
                let arity = r.gen_range(3..=n.min(6));
                let s = loop {
                    let s = SymmetricWeightSet::new(arity, (0..=arity).filter(|_| r.gen_bool(0.3)))?;
                    if !s.weights().is_empty() && is_admissible_sym3(&s) {
                        break s;
                    }
                };
                let rel = Relation::symmetric(&s)?;
                let name = format!(
                    "sym{arity}_{}",
                    s.weights().iter().map(|&x| digit_char(x as Value)).collect::<String>()
                );
                let idx = inst.intern_relation(&name, || rel, Some(TypeTag::SymEdge3))?;
                inst.add_constraint(idx, distinct_vars(&mut r, n, arity))?;
            }
            2 => {
                let (name, rel) = if r.gen::<bool>() {
                    ("x1in3", Relation::from_predicate(2, 3, |t| t.iter().sum::<Value>() == 1)?)
                } else {
                    ("even3", Relation::from_predicate(2, 3, |t| t.iter().sum::<Value>() % 2 == 0)?)
                };
                let idx = inst.intern_relation(name, || rel, Some(TypeTag::Edge2))?;
                inst.add_constraint(idx, distinct_vars(&mut r, n, 3))?;
            }
            _ => {
                let excluded: Vec<Value> = (0..2).map(|_| r.gen_range(0..2)).collect();
                let idx = inst.intern_relation(&clause_name(&excluded), || clause_relation(&excluded), Some(TypeTag::Nu3))?;
                inst.add_constraint(idx, distinct_vars(&mut r, n, 2))?;
            }
        }
    }
    Ok(inst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::serialize_instance;
    use crate::ops::pattern::{make_edge, make_universal};
    use crate::ops::preserve::preserves;

    #[test]
    fn deterministic_under_seed() {
        let a = serialize_instance(&gen_ksat(12, 40, 3, 5).unwrap());
        assert_eq!(a, serialize_instance(&gen_ksat(12, 40, 3, 5).unwrap()));
        assert_ne!(a, serialize_instance(&gen_ksat(12, 40, 3, 6).unwrap()));
        assert_eq!(gen_subset_sum(10, 12, 3).unwrap(), gen_subset_sum(10, 12, 3).unwrap());
        assert_eq!(
            serialize_instance(&gen_sym3e_instance(8, 6, 2).unwrap()),
            serialize_instance(&gen_sym3e_instance(8, 6, 2).unwrap())
        );
    }

    #[test]
    fn sidon_prefix() {
        assert_eq!(greedy_sidon(7), vec![0, 1, 3, 7]);
        assert_eq!(greedy_sidon(20), vec![0, 1, 3, 7, 12, 20]);
        for n in 0..40 {
            assert!(is_sidon(&greedy_sidon(n)));
        }
        assert!(!is_sidon(&[0, 1, 2]));
        let rel = gen_sidon_relation(7).unwrap();
        assert_eq!(rel.symmetric_weights().unwrap().weights(), vec![0, 1, 3, 7]);
    }

    #[test]
    fn parity_polynomial() {
        let rel = poly_relation(3, &[vec![0], vec![1], vec![2]]).unwrap();
        let even = Relation::from_predicate(2, 3, |t| t.iter().sum::<Value>() % 2 == 0).unwrap();
        assert_eq!(rel, even);
        assert!(preserves(&make_universal(2).unwrap(), &rel).unwrap().is_none());
    }

    #[test]
    fn exact_sat_relations_preserved_by_edge2() {
        let e2 = make_edge(2, 2).unwrap();
        for k in 1..=5 {
            let inst = gen_exact_sat(6, 3, k, 1).unwrap();
            for r in inst.relations() {
                assert!(preserves(&e2, r.explicit().unwrap()).unwrap().is_none());
            }
        }
    }

    #[test]
    fn linear_relations_preserved_by_edge2() {
        for p in 2..=5 {
            let e2 = make_edge(2, p).unwrap();
            let inst = gen_linear_mod(6, 8, p, 9).unwrap();
            for r in inst.relations() {
                assert!(preserves(&e2, r.explicit().unwrap()).unwrap().is_none());
            }
        }
    }

    #[test]
    fn admissible_weight_sets() {
        let s = |n, w: &[usize]| SymmetricWeightSet::new(n, w.iter().copied()).unwrap();
        assert_eq!(residue_class(&s(6, &[1, 3])), Some((1, 2)));
        assert_eq!(residue_class(&s(6, &[1, 3, 5])), Some((1, 2)));
        assert_eq!(residue_class(&s(6, &[3, 5])), Some((1, 2)));
        assert_eq!(residue_class(&s(6, &[2, 4])), None);
        assert_eq!(residue_class(&s(6, &[0, 1, 3])), None);
        assert_eq!(residue_class(&s(4, &[2])), Some((2, 5)));
        assert_eq!(residue_class(&s(3, &[0, 1, 2, 3])), Some((0, 1)));
    }

    /// Nonempty symmetric relations preserved by `edge_3` are exactly the
    /// admissible ones, over every weight set up to arity 7.
    #[test]
    fn admissible_matches_edge3_preservation() {
        let e3 = make_edge(3, 2).unwrap();
        for n in 1..=7usize {
            for mask in 1u32..1 << (n + 1) {
                let s = SymmetricWeightSet::new(n, (0..=n).filter(|&i| mask >> i & 1 == 1)).unwrap();
                let rel = Relation::symmetric(&s).unwrap();
                let preserved = preserves(&e3, &rel).unwrap().is_none();
                assert_eq!(preserved, is_admissible_sym3(&s), "{s:?}");
            }
        }
    }

    #[test]
    fn coloring_and_binary_csp_shapes() {
        let inst = gen_coloring(6, 9, 3, 4).unwrap();
        assert_eq!(inst.constraints().len(), 9);
        assert!(gen_coloring(4, 7, 3, 0).is_err());
        let csp = gen_binary_csp(6, 10, 3, 0.4, 1).unwrap();
        assert_eq!(csp.relations().len(), 10);
    }
}
