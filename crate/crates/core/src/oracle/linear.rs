use super::{invalid, ExtensionOracle};
use crate::error::Result;
use crate::relation::Value;

/// Boolean solutions of `Σ a_i x_i ≡ β (mod m)`.
#[derive(Debug, Clone)]
pub struct LinearOracle {
    coeffs: Vec<u64>,
    target: u64,
    modulus: u64,
}

/// Residue reachability is tracked in a dense table of this many entries.
const MAX_MODULUS: u64 = 1 << 20;

impl LinearOracle {
    pub fn new(coeffs: Vec<u64>, target: u64, modulus: u64) -> Result<Self> {
        if !(2..=MAX_MODULUS).contains(&modulus) {
            return Err(invalid(format!("modulus {modulus} outside 2..={MAX_MODULUS}")));
        }
        let coeffs = coeffs.into_iter().map(|a| a % modulus).collect();
        Ok(LinearOracle { coeffs, target: target % modulus, modulus })
    }
}

impl ExtensionOracle for LinearOracle {
    fn arity(&self) -> usize {
        self.coeffs.len()
    }

    fn domain_size(&self) -> u32 {
        2
    }

    fn accepts(&self, partial: &[Option<Value>]) -> bool {
        let m = self.modulus;
        let mut fixed = 0u64;
        let mut free = Vec::new();
        for (&a, v) in self.coeffs.iter().zip(partial) {
            match v {
                Some(1) => fixed = (fixed + a) % m,
                Some(_) => {}
                None if a != 0 => free.push(a),
                None => {}
            }
        }
        let need = (self.target + m - fixed) % m;
        let mut reach = vec![false; m as usize];
        reach[0] = true;
        for a in free {
            let prev = reach.clone();
            for (r, &ok) in prev.iter().enumerate() {
                if ok {
                    reach[((r as u64 + a) % m) as usize] = true;
                }
            }
            if reach[need as usize] {
                return true;
            }
        }
        reach[need as usize]
    }
}
