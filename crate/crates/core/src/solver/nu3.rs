//! Triangle search for CSPs whose relations are preserved by `near_3`.
//!
//! Variables are split into thirds `X, Y, Z`; vertices are the assignments
//! of one third that every constraint still admits, edges the pairs that
//! are jointly admitted. Relations preserved by `near_3` are 2-decomposable
//! over the three blown-up coordinates, so every triangle is a solution.

use std::ops::Range;

use super::triangle::{find_triangle, LabeledTriGraph, Side, TriangleMode};
use super::{
    check_language, guarded_count, nullary_ok, reordered, restore, write_block, Algorithm, ConstraintView,
    Counters, SolveOptions, SolveReport, Timer,
};
use crate::error::Result;
use crate::exec;
use crate::instance::Instance;
use crate::ops::pattern::make_near;
use crate::relation::Value;

pub(crate) const SIDES: [(Side, usize, usize); 3] = [(Side::XY, 0, 1), (Side::XZ, 0, 2), (Side::YZ, 1, 2)];

/// Sizes `⌈n/3⌉`, then half of the rest rounded up, then the remainder.
pub fn split_thirds(n: usize) -> [Range<usize>; 3] {
    let a = n.div_ceil(3);
    let b = (n - a).div_ceil(2);
    [0..a, a..a + b, a + b..n]
}

/// Filtered vertices of the three parts plus the views needed for edges.
pub(crate) struct TriSetup<'a> {
    pub n: usize,
    pub d: u32,
    pub ranges: [Range<usize>; 3],
    pub views: Vec<ConstraintView<'a>>,
    /// Bit `p` set when the constraint has a variable in part `p`.
    pub touch: Vec<u8>,
    /// Surviving vertex codes per part, ascending.
    pub vertices: [Vec<usize>; 3],
    pub enumerated: u64,
}

impl<'a> TriSetup<'a> {
    pub fn new(inst: &'a Instance, counters: &'a Counters) -> Result<Self> {
        let n = inst.n_vars();
        let d = inst.domain_size();
        let ranges = split_thirds(n);
        let counts = [
            guarded_count(d, ranges[0].len())?,
            guarded_count(d, ranges[1].len())?,
            guarded_count(d, ranges[2].len())?,
        ];
        let views: Vec<ConstraintView> = inst
            .constraints()
            .iter()
            .filter(|c| !c.scope.is_empty())
            .map(|c| ConstraintView::of(inst, c, counters))
            .collect();
        let part_of = |v: usize| ranges.iter().position(|r| r.contains(&v)).expect("variable in a part");
        let touch: Vec<u8> = views.iter().map(|w| w.vars().iter().fold(0, |m, &v| m | 1 << part_of(v))).collect();
        let mut setup = TriSetup {
            n,
            d,
            ranges,
            views,
            touch,
            vertices: [Vec::new(), Vec::new(), Vec::new()],
            enumerated: counts.iter().sum::<usize>() as u64,
        };
        for (p, &count) in counts.iter().enumerate() {
            let keep = exec::map_range(0..count, |code| {
                let a = setup.assignment(&[(p, code)]);
                setup.relevant(1 << p).all(|v| v.admits(&a))
            });
            setup.vertices[p] = (0..count).filter(|&c| keep[c]).collect();
        }
        Ok(setup)
    }

    /// Views of the constraints touching every part in `mask`.
    pub fn relevant(&self, mask: u8) -> impl Iterator<Item = &ConstraintView<'a>> + '_ {
        self.views.iter().zip(&self.touch).filter(move |(_, &t)| t & mask == mask).map(|(v, _)| v)
    }

    pub fn assignment(&self, blocks: &[(usize, usize)]) -> Vec<Option<Value>> {
        let mut a = vec![None; self.n];
        for &(p, code) in blocks {
            write_block(&mut a, self.d, self.ranges[p].clone(), code);
        }
        a
    }

    /// For each vertex of part `p` (by index), the indices of the vertices
    /// of part `q` it is jointly admitted with.
    pub fn edges(&self, p: usize, q: usize) -> Vec<Vec<usize>> {
        let mask = 1 << p | 1 << q;
        let shared = self.relevant(mask).count() > 0;
        exec::map_range(0..self.vertices[p].len(), |i| {
            (0..self.vertices[q].len())
                .filter(|&j| {
                    !shared || {
                        let a = self.assignment(&[(p, self.vertices[p][i]), (q, self.vertices[q][j])]);
                        self.relevant(mask).all(|v| v.admits(&a))
                    }
                })
                .collect()
        })
    }

    pub fn full_assignment(&self, tri: (usize, usize, usize)) -> Vec<Value> {
        let (x, y, z) = tri;
        self.assignment(&[(0, self.vertices[0][x]), (1, self.vertices[1][y]), (2, self.vertices[2][z])])
            .into_iter()
            .map(|v| v.expect("all parts assigned"))
            .collect()
    }
}

pub fn solve_3nu_triangle(inst: &Instance, opts: &SolveOptions) -> Result<SolveReport> {
    let timer = Timer::start();
    if !opts.skip_precheck {
        check_language(inst, &make_near(3, inst.domain_size())?)?;
    }
    let (work, order) = reordered(inst, opts.reorder)?;
    let counters = Counters::default();
    let mut found = None;
    let mut edges = 0;
    if nullary_ok(&work, &counters) {
        let setup = TriSetup::new(&work, &counters)?;
        counters.add_nodes(setup.enumerated);
        let mut g = LabeledTriGraph::new(setup.vertices[0].len(), setup.vertices[1].len(), setup.vertices[2].len());
        for (side, p, q) in SIDES {
            for (a, row) in setup.edges(p, q).into_iter().enumerate() {
                for b in row {
                    g.add_edge(side, a, b, 0);
                }
            }
        }
        edges = g.edge_count();
        found = find_triangle(&g, TriangleMode::Any).map(|t| setup.full_assignment(t));
    }
    Ok(SolveReport {
        algorithm: Algorithm::Tri3nu,
        assignment: found.map(|a| restore(&order, &a)),
        oracle_queries: counters.queries(),
        enumerated_nodes: counters.nodes(),
        graph_edges: edges,
        wall_time: timer.elapsed(),
        variable_order: order,
        complete: true,
    })
}
