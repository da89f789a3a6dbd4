//! Triangles in 3-partite graphs with bitset adjacency rows.

use std::collections::HashMap;

use crate::exec;

/// Fixed-size bitset over `0..len`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Bitset {
    words: Vec<u64>,
}

impl Bitset {
    pub fn new(len: usize) -> Self {
        Bitset { words: vec![0; len.div_ceil(64)] }
    }

    pub fn set(&mut self, i: usize) {
        self.words[i / 64] |= 1 << (i % 64);
    }

    pub fn get(&self, i: usize) -> bool {
        self.words[i / 64] >> (i % 64) & 1 == 1
    }

    pub fn count(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    /// Smallest index set in both.
    pub fn first_common(&self, other: &Bitset) -> Option<usize> {
        self.words
            .iter()
            .zip(&other.words)
            .enumerate()
            .find(|(_, (a, b))| *a & *b != 0)
            .map(|(i, (a, b))| i * 64 + (a & b).trailing_zeros() as usize)
    }

    pub fn ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(i, &w)| {
            let mut rest = w;
            std::iter::from_fn(move || {
                (rest != 0).then(|| {
                    let b = rest.trailing_zeros() as usize;
                    rest &= rest - 1;
                    i * 64 + b
                })
            })
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Side {
    XY,
    XZ,
    YZ,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TriangleMode {
    Any,
    /// All three edges carry the same colour.
    SingleLabel,
}

/// 3-partite graph on parts of sizes `nx, ny, nz` with a colour per edge.
#[derive(Debug, Clone)]
pub struct LabeledTriGraph {
    sizes: [usize; 3],
    xy: Vec<Bitset>,
    xz: Vec<Bitset>,
    yz: Vec<Bitset>,
    colours: HashMap<(Side, usize, usize), u32>,
    edges: u64,
}

impl LabeledTriGraph {
    pub fn new(nx: usize, ny: usize, nz: usize) -> Self {
        LabeledTriGraph {
            sizes: [nx, ny, nz],
            xy: vec![Bitset::new(ny); nx],
            xz: vec![Bitset::new(nz); nx],
            yz: vec![Bitset::new(nz); ny],
            colours: HashMap::new(),
            edges: 0,
        }
    }

    pub fn sizes(&self) -> [usize; 3] {
        self.sizes
    }

    pub fn edge_count(&self) -> u64 {
        self.edges
    }

    pub fn add_edge(&mut self, side: Side, a: usize, b: usize, colour: u32) {
        let row = match side {
            Side::XY => &mut self.xy[a],
            Side::XZ => &mut self.xz[a],
            Side::YZ => &mut self.yz[a],
        };
        if !row.get(b) {
            self.edges += 1;
        }
        row.set(b);
        self.colours.insert((side, a, b), colour);
    }

    pub fn has_edge(&self, side: Side, a: usize, b: usize) -> bool {
        match side {
            Side::XY => self.xy[a].get(b),
            Side::XZ => self.xz[a].get(b),
            Side::YZ => self.yz[a].get(b),
        }
    }

    pub fn colour(&self, side: Side, a: usize, b: usize) -> Option<u32> {
        self.colours.get(&(side, a, b)).copied()
    }

    /// Rows of one side restricted to a single colour.
    fn coloured_rows(&self, side: Side, rows: usize, cols: usize) -> HashMap<(usize, u32), Bitset> {
        let mut out: HashMap<(usize, u32), Bitset> = HashMap::new();
        for (&(s, a, b), &c) in &self.colours {
            if s == side {
                out.entry((a, c)).or_insert_with(|| Bitset::new(cols)).set(b);
            }
        }
        debug_assert!(out.keys().all(|&(a, _)| a < rows));
        out
    }
}

/// Lex-first triangle `(x, y, z)`, optionally requiring one colour on all
/// three edges.
pub fn find_triangle(g: &LabeledTriGraph, mode: TriangleMode) -> Option<(usize, usize, usize)> {
    let [nx, ny, nz] = g.sizes;
    match mode {
        TriangleMode::Any => exec::find_first(0..nx, |x| {
            g.xy[x].ones().find_map(|y| g.xz[x].first_common(&g.yz[y]).map(|z| (x, y, z)))
        }),
        TriangleMode::SingleLabel => {
            let xz = g.coloured_rows(Side::XZ, nx, nz);
            let yz = g.coloured_rows(Side::YZ, ny, nz);
            exec::find_first(0..nx, |x| {
                g.xy[x].ones().find_map(|y| {
                    let c = g.colour(Side::XY, x, y)?;
                    let z = xz.get(&(x, c))?.first_common(yz.get(&(y, c))?)?;
                    Some((x, y, z))
                })
            })
        }
    }
}
