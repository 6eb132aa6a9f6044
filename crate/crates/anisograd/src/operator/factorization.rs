use num_rational::BigRational;
use num_traits::{One, Zero};
use serde_json::{json, Value};

use super::{Decomposition, PartMap};
use crate::error::{Error, Result};
use crate::exact::{format_rational, rat, RatMatrix};

/// Index of ∂_k∂_l u_a in the ordering
/// (∂₁²u₁, ∂₁∂₂u₁, ∂₂²u₁, ∂₁²u₂, ∂₁∂₂u₂, ∂₂²u₂); all arguments one-based.
pub fn hessian_index(a: usize, k: usize, l: usize) -> usize {
    let (k, l) = if k <= l { (k, l) } else { (l, k) };
    3 * (a - 1) + (k - 1) + (l - 1)
}

/// D²u = C1·∂₁vec(𝒜[Du]) + C2·∂₂vec(𝒜[Du]). Both maps vanish on ker 𝒜.
#[derive(Clone, Debug)]
pub struct SecondOrderFactorization {
    pub c1: RatMatrix,
    pub c2: RatMatrix,
    pub c1f: [[f64; 4]; 6],
    pub c2f: [[f64; 4]; 6],
    /// Determinant of the 6x6 recovery matrix (rank-3 case only).
    pub recovery_det: Option<BigRational>,
}

impl SecondOrderFactorization {
    fn new(c1: RatMatrix, c2: RatMatrix, recovery_det: Option<BigRational>) -> Self {
        let conv = |m: &RatMatrix| {
            let f = m.to_f64();
            std::array::from_fn(|r| std::array::from_fn(|c| f[r][c]))
        };
        SecondOrderFactorization { c1f: conv(&c1), c2f: conv(&c2), c1, c2, recovery_det }
    }

    /// Exact check of the symbol identity on ξ, v ∈ {e₁, e₂, e₁+e₂}.
    pub fn verify_symbol_identity(&self, a: &PartMap) -> bool {
        let dirs = [[1, 0], [0, 1], [1, 1]];
        dirs.iter().all(|xi| {
            dirs.iter().all(|v| {
                let t: Vec<BigRational> = (0..4).map(|i| rat(v[i / 2] * xi[i % 2])).collect();
                let w = a.apply_exact(&t);
                let lhs = [
                    v[0] * xi[0] * xi[0],
                    v[0] * xi[0] * xi[1],
                    v[0] * xi[1] * xi[1],
                    v[1] * xi[0] * xi[0],
                    v[1] * xi[0] * xi[1],
                    v[1] * xi[1] * xi[1],
                ];
                let r1 = self.c1.mul_vec(&w);
                let r2 = self.c2.mul_vec(&w);
                (0..6).all(|i| rat(lhs[i]) == &r1[i] * rat(xi[0]) + &r2[i] * rat(xi[1]))
            })
        })
    }

    pub fn to_json(&self) -> Value {
        json!({
            "C1": self.c1.to_strings(),
            "C2": self.c2.to_strings(),
            "recovery_det": self.recovery_det.as_ref().map(format_rational),
        })
    }
}

pub fn build_second_order_factorization(
    a: &PartMap,
    dec: &Decomposition,
) -> Result<SecondOrderFactorization> {
    let m = a.matrix();
    let (c1, c2, det) = match &dec.table {
        None => {
            if a.rank() != 4 {
                return Err(Error::RankTooLow(a.rank()));
            }
            // vec(Du) = (∂₁u₁, ∂₂u₁, ∂₁u₂, ∂₂u₂)
            let mut c1 = RatMatrix::zeros(6, 4);
            let mut c2 = RatMatrix::zeros(6, 4);
            let one = BigRational::one;
            c1.set(hessian_index(1, 1, 1), 0, one());
            c2.set(hessian_index(1, 1, 2), 0, one());
            c2.set(hessian_index(1, 2, 2), 1, one());
            c1.set(hessian_index(2, 1, 1), 2, one());
            c2.set(hessian_index(2, 1, 2), 2, one());
            c2.set(hessian_index(2, 2, 2), 3, one());
            (c1, c2, None)
        }
        Some(t) => {
            let (p, q) = t.dependent_pair;
            let rows: Vec<(usize, usize)> = t.coeff_pairs.to_vec();
            // (𝔏𝒜[Du])_ij = ∂_j u_i + a_ij ∂_q u_p for the three independent pairs,
            // differentiated in both directions gives six equations in D²u
            let mut big = RatMatrix::zeros(6, 6);
            for (s, &(i, j)) in rows.iter().enumerate() {
                let a_ij = -t.g[2 * (i - 1) + (j - 1)].clone();
                for k in 1..=2 {
                    let r = 2 * s + (k - 1);
                    let c = hessian_index(i, k, j);
                    big.set(r, c, big.get(r, c) + BigRational::one());
                    let c = hessian_index(p, k, q);
                    big.set(r, c, big.get(r, c) + &a_ij);
                }
            }
            let det = big.determinant();
            if det.is_zero() {
                return Err(Error::SingularCertificate);
            }
            let inv = big.inverse().expect("nonzero determinant");
            let mut sel = [RatMatrix::zeros(6, 4), RatMatrix::zeros(6, 4)];
            for (s, &(i, j)) in rows.iter().enumerate() {
                let lrow = t.l.row(2 * (i - 1) + (j - 1));
                for (k, sk) in sel.iter_mut().enumerate() {
                    for (c, v) in lrow.iter().enumerate() {
                        sk.set(2 * s + k, c, v.clone());
                    }
                }
            }
            (inv.mul(&sel[0]), inv.mul(&sel[1]), Some(det))
        }
    };
    let fact = SecondOrderFactorization::new(c1.mul(m), c2.mul(m), det);
    if !fact.verify_symbol_identity(a) {
        return Err(Error::Invalid("factorization fails the symbol identity".into()));
    }
    Ok(fact)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operator::build_decomposition;

    #[test]
    fn presets_factorize() {
        for name in ["grad", "sym", "dev"] {
            let a = PartMap::preset(name).unwrap();
            let d = build_decomposition(&a).unwrap();
            let f = build_second_order_factorization(&a, &d).unwrap();
            assert!(f.verify_symbol_identity(&a), "{name}");
        }
    }

    #[test]
    fn sym_recovery_determinant_matches_certificate() {
        let a = PartMap::preset("sym").unwrap();
        let d = build_decomposition(&a).unwrap();
        let f = build_second_order_factorization(&a, &d).unwrap();
        // pair (2,1): det = −(a₁₁a₂₂ + a₁₂)
        assert_eq!(f.recovery_det.unwrap(), -d.certificate.unwrap());
    }

    #[test]
    fn hessian_index_ordering() {
        assert_eq!(hessian_index(1, 1, 1), 0);
        assert_eq!(hessian_index(1, 2, 1), 1);
        assert_eq!(hessian_index(1, 2, 2), 2);
        assert_eq!(hessian_index(2, 1, 1), 3);
        assert_eq!(hessian_index(2, 1, 2), 4);
        assert_eq!(hessian_index(2, 2, 2), 5);
    }
}
