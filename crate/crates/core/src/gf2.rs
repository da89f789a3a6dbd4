//! Linear systems over GF(2) with word-packed rows, kept in echelon form as
//! equations are added.

/// A row `Σ bits · x = rhs`, bit `i` of word `i / 64` for variable `i`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Gf2Row {
    pub bits: Vec<u64>,
    pub rhs: bool,
}

impl Gf2Row {
    pub fn new(n_vars: usize) -> Self {
        Gf2Row { bits: vec![0; n_vars.div_ceil(64).max(1)], rhs: false }
    }

    pub fn from_vars(n_vars: usize, vars: impl IntoIterator<Item = usize>, rhs: bool) -> Self {
        let mut row = Self::new(n_vars);
        for v in vars {
            row.toggle(v);
        }
        row.rhs = rhs;
        row
    }

    pub fn toggle(&mut self, var: usize) {
        self.bits[var / 64] ^= 1 << (var % 64);
    }

    pub fn get(&self, var: usize) -> bool {
        self.bits[var / 64] >> (var % 64) & 1 == 1
    }

    fn xor_assign(&mut self, other: &Gf2Row) {
        for (a, b) in self.bits.iter_mut().zip(&other.bits) {
            *a ^= b;
        }
        self.rhs ^= other.rhs;
    }

    fn leading(&self) -> Option<usize> {
        self.bits
            .iter()
            .enumerate()
            .find(|(_, &w)| w != 0)
            .map(|(i, &w)| i * 64 + w.trailing_zeros() as usize)
    }
}

/// Incremental Gaussian elimination. Once an equation reduces to `0 = 1`
/// the system stays inconsistent.
#[derive(Debug, Clone)]
pub struct Gf2System {
    n_vars: usize,
    pivots: Vec<(usize, Gf2Row)>,
    consistent: bool,
}

impl Gf2System {
    pub fn new(n_vars: usize) -> Self {
        Gf2System { n_vars, pivots: Vec::new(), consistent: true }
    }

    pub fn n_vars(&self) -> usize {
        self.n_vars
    }

    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    pub fn is_consistent(&self) -> bool {
        self.consistent
    }

    /// Adds an equation; returns true when it raised the rank.
    pub fn push(&mut self, mut row: Gf2Row) -> bool {
        for (p, prow) in &self.pivots {
            if row.get(*p) {
                row.xor_assign(prow);
            }
        }
        match row.leading() {
            Some(p) => {
                for (_, prow) in self.pivots.iter_mut() {
                    if prow.get(p) {
                        prow.xor_assign(&row);
                    }
                }
                self.pivots.push((p, row));
                true
            }
            None => {
                if row.rhs {
                    self.consistent = false;
                }
                false
            }
        }
    }

    /// True when the equation holds for every solution of a consistent system.
    pub fn implies(&self, row: &Gf2Row) -> bool {
        let mut probe = self.clone();
        probe.consistent = true;
        !probe.push(row.clone()) && probe.consistent
    }

    /// Some solution, free variables set to zero.
    pub fn solve(&self) -> Option<Vec<bool>> {
        if !self.consistent {
            return None;
        }
        let mut x = vec![false; self.n_vars];
        for (p, row) in &self.pivots {
            x[*p] = row.rhs;
        }
        Some(x)
    }
}
