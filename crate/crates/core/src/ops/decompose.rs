//! Structural tests: decomposability, rectangularity and block sensitivity.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::relation::{encode, Relation, Value};

/// All `k`-subsets of `0..n` in lexicographic order.
pub fn subsets_of_size(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..=n - (k - cur.len()) {
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if k <= n {
        rec(0, n, k, &mut Vec::with_capacity(k), &mut out);
    }
    out
}

/// Every excluded tuple is excluded by a projection onto at most `k`
/// coordinates.
pub fn is_k_decomposable(rel: &Relation, k: usize) -> bool {
    let n = rel.arity();
    let d = rel.domain_size();
    let k = k.min(n);
    let projections: Vec<(Vec<usize>, Relation)> = subsets_of_size(n, k)
        .into_iter()
        .map(|idx| {
            let p = rel.project(&idx).expect("indices in range");
            (idx, p)
        })
        .collect();
    let mut t = vec![0 as Value; n];
    for code in 0..rel.table_len() {
        if !rel.contains_code(code) {
            let caught = projections.iter().any(|(idx, p)| {
                let sub: Vec<Value> = idx.iter().map(|&i| t[i]).collect();
                !p.contains_code(encode(d, &sub))
            });
            if !caught {
                return false;
            }
        }
        crate::relation::increment(&mut t, d);
    }
    true
}

/// A connected component of the bipartite graph between two projections.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BipartiteComponent {
    pub left: Vec<Vec<Value>>,
    pub right: Vec<Vec<Value>>,
    pub edges: usize,
}

impl BipartiteComponent {
    pub fn is_biclique(&self) -> bool {
        self.edges == self.left.len() * self.right.len()
    }
}

fn find(parent: &mut [usize], mut x: usize) -> usize {
    while parent[x] != x {
        parent[x] = parent[parent[x]];
        x = parent[x];
    }
    x
}

/// Components of the graph with an edge `pr_left(t) ~ pr_right(t)` for each
/// `t ∈ R`, ordered by their lex-min left vertex.
pub fn bipartite_components(rel: &Relation, left: &[usize], right: &[usize]) -> Vec<BipartiteComponent> {
    let mut ids: HashMap<(bool, Vec<Value>), usize> = HashMap::new();
    let mut keys: Vec<(bool, Vec<Value>)> = Vec::new();
    let mut edges: Vec<(usize, usize)> = Vec::new();
    let mut id_of = |key: (bool, Vec<Value>), keys: &mut Vec<(bool, Vec<Value>)>| {
        *ids.entry(key.clone()).or_insert_with(|| {
            keys.push(key);
            keys.len() - 1
        })
    };
    for t in rel.iter() {
        let l = id_of((false, left.iter().map(|&i| t[i]).collect()), &mut keys);
        let r = id_of((true, right.iter().map(|&i| t[i]).collect()), &mut keys);
        edges.push((l, r));
    }
    let mut parent: Vec<usize> = (0..keys.len()).collect();
    for &(l, r) in &edges {
        let (a, b) = (find(&mut parent, l), find(&mut parent, r));
        parent[a] = b;
    }
    let mut comps: HashMap<usize, BipartiteComponent> = HashMap::new();
    for (id, (side, tuple)) in keys.iter().enumerate() {
        let root = find(&mut parent, id);
        let c = comps.entry(root).or_insert_with(|| BipartiteComponent { left: vec![], right: vec![], edges: 0 });
        if *side { c.right.push(tuple.clone()) } else { c.left.push(tuple.clone()) }
    }
    let mut edge_set: Vec<(usize, usize)> = edges;
    edge_set.sort_unstable();
    edge_set.dedup();
    for (l, _) in edge_set {
        let root = find(&mut parent, l);
        comps.get_mut(&root).expect("component exists").edges += 1;
    }
    let mut out: Vec<BipartiteComponent> = comps.into_values().collect();
    for c in &mut out {
        c.left.sort();
        c.right.sort();
    }
    out.sort_by(|a, b| a.left.cmp(&b.left));
    out
}

/// A binary relation is rectangular when its bipartite graph is a disjoint
/// union of bicliques.
pub fn is_rectangular(rel: &Relation) -> Result<bool> {
    if rel.arity() != 2 {
        return Err(Error::ArityMismatch { expected: 2, found: rel.arity() });
    }
    Ok(bipartite_components(rel, &[0], &[1]).iter().all(BipartiteComponent::is_biclique))
}

/// Largest supported arity for [`block_sensitivity`].
pub const MAX_BS_ARITY: usize = 12;

/// Block sensitivity of the indicator function of a Boolean relation.
pub fn block_sensitivity(rel: &Relation) -> Result<usize> {
    if !rel.is_boolean() {
        return Err(Error::NotBoolean);
    }
    let n = rel.arity();
    if n > MAX_BS_ARITY {
        return Err(Error::Infeasible(1u128 << n));
    }
    let full = 1usize << n;
    // code bit i (from the least significant end) is position n-1-i; block
    // masks use the same bit layout so flipping is a plain xor.
    let per_point = crate::exec::map_range(0..full, |t| {
        let ft = rel.contains_code(t as u64);
        let sensitive: Vec<bool> = (0..full).map(|b| b != 0 && rel.contains_code((t ^ b) as u64) != ft).collect();
        // has_sub[b]: some nonempty subset of b is sensitive
        let mut has_sub = sensitive.clone();
        for i in 0..n {
            for b in 0..full {
                if b >> i & 1 == 1 {
                    has_sub[b] |= has_sub[b ^ (1 << i)];
                }
            }
        }
        let minimal: Vec<usize> = (1..full)
            .filter(|&b| sensitive[b] && (0..n).all(|i| b >> i & 1 == 0 || !has_sub[b ^ (1 << i)]))
            .collect();
        max_packing(&minimal, full - 1)
    });
    Ok(per_point.into_iter().max().unwrap_or(0))
}

/// Maximum number of pairwise disjoint blocks inside `avail`.
fn max_packing(blocks: &[usize], avail: usize) -> usize {
    fn go(blocks: &[usize], avail: usize, memo: &mut HashMap<usize, usize>) -> usize {
        if avail == 0 {
            return 0;
        }
        if let Some(&v) = memo.get(&avail) {
            return v;
        }
        let low = avail & avail.wrapping_neg();
        let mut best = go(blocks, avail ^ low, memo);
        for &b in blocks {
            if b & low != 0 && b & !avail == 0 {
                best = best.max(1 + go(blocks, avail ^ b, memo));
            }
        }
        memo.insert(avail, best);
        best
    }
    go(blocks, avail, &mut HashMap::new())
}
