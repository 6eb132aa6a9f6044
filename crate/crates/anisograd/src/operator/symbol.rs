use num_complex::Complex64;
use num_rational::BigRational;

use super::PartMap;
use crate::exact::{Poly, RatMatrix};

/// The 4x2 matrix of `v ↦ vec(𝒜[v ⊗ ξ])` for a fixed complex frequency.
#[derive(Clone, Debug, PartialEq)]
pub struct SymbolMatrix {
    pub entries: [[Complex64; 2]; 4],
}

impl SymbolMatrix {
    pub fn apply(&self, v: [Complex64; 2]) -> [Complex64; 4] {
        let mut out = [Complex64::new(0.0, 0.0); 4];
        for (r, o) in out.iter_mut().enumerate() {
            *o = self.entries[r][0] * v[0] + self.entries[r][1] * v[1];
        }
        out
    }

    pub fn column(&self, k: usize) -> [Complex64; 4] {
        [self.entries[0][k], self.entries[1][k], self.entries[2][k], self.entries[3][k]]
    }
}

pub fn symbol(a: &PartMap, xi: [Complex64; 2]) -> SymbolMatrix {
    let m = a.matrix_f64();
    let mut entries = [[Complex64::new(0.0, 0.0); 2]; 4];
    for (r, row) in entries.iter_mut().enumerate() {
        for (k, e) in row.iter_mut().enumerate() {
            *e = m[r][2 * k] * xi[0] + m[r][2 * k + 1] * xi[1];
        }
    }
    SymbolMatrix { entries }
}

pub fn symbol_exact(a: &PartMap, xi: &[BigRational; 2]) -> RatMatrix {
    let m = a.matrix();
    let mut out = RatMatrix::zeros(4, 2);
    for r in 0..4 {
        for k in 0..2 {
            out.set(r, k, m.get(r, 2 * k) * &xi[0] + m.get(r, 2 * k + 1) * &xi[1]);
        }
    }
    out
}

/// Entries of the symbol on the chart ξ = (1, z) as polynomials in z.
pub fn symbol_chart(a: &PartMap) -> [[Poly; 2]; 4] {
    let m = a.matrix();
    std::array::from_fn(|r| {
        std::array::from_fn(|k| Poly::linear(m.get(r, 2 * k).clone(), m.get(r, 2 * k + 1).clone()))
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{rat, ratio};

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn identity_symbol_columns() {
        let s = symbol(&PartMap::preset("grad").unwrap(), [c(1.0), c(0.0)]);
        assert_eq!(s.column(0), [c(1.0), c(0.0), c(0.0), c(0.0)]);
        assert_eq!(s.column(1), [c(0.0), c(0.0), c(1.0), c(0.0)]);
    }

    #[test]
    fn sym_symbol_on_e1() {
        let a = PartMap::preset("sym").unwrap();
        let s = symbol_exact(&a, &[rat(0), rat(1)]);
        // v = e1, ξ = e2: e1 ⊗ e2 = E12, sym part ½(E12 + E21)
        assert_eq!(s.column(0), vec![rat(0), ratio(1, 2), ratio(1, 2), rat(0)]);
    }

    #[test]
    fn zero_frequency_gives_zero_symbol() {
        for name in super::super::PRESETS {
            let s = symbol(&PartMap::preset(name).unwrap(), [c(0.0), c(0.0)]);
            assert!(s.entries.iter().flatten().all(|z| z.norm() == 0.0));
        }
    }
}
