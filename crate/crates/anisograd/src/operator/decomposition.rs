use num_rational::BigRational;
use num_traits::{One, Zero};
use serde_json::{json, Value};

use super::{classify_ellipticity, PartMap};
use crate::error::{Error, Result};
use crate::exact::{format_rational, RatMatrix};

/// Pair order tried when looking for a tensor product expressible through the other three.
/// (2,1) first, then the rest lexicographically.
pub const PAIR_SEARCH_ORDER: [(usize, usize); 4] = [(2, 1), (1, 1), (1, 2), (2, 2)];

fn pair_index((p, q): (usize, usize)) -> usize {
    2 * (p - 1) + (q - 1)
}

fn unit(k: usize) -> Vec<BigRational> {
    let mut e = vec![BigRational::zero(); 4];
    e[k] = BigRational::one();
    e
}

fn det2(g: &[BigRational]) -> BigRational {
    &g[0] * &g[3] - &g[1] * &g[2]
}

/// The triple read off the dependent tensor pair: 𝔏 sends e_i⊗_𝒜e_j to e_i⊗e_j for the
/// three independent pairs, γ(P) = P_pq and 𝔊 = e_pq − Σ a_ij e_ij.
#[derive(Clone, Debug)]
pub struct TableTriple {
    pub l: RatMatrix,
    pub g: Vec<BigRational>,
    pub dependent_pair: (usize, usize),
    pub coeff_pairs: [(usize, usize); 3],
    pub coeffs: [BigRational; 3],
    /// det 𝔊; for the pair (2,1) this is a₁₁a₂₂ + a₁₂.
    pub certificate: BigRational,
}

impl TableTriple {
    pub fn gamma(&self, p: &[BigRational]) -> BigRational {
        p[pair_index(self.dependent_pair)].clone()
    }
}

/// P = 𝔏(𝒜[P]) + ⟨Q, P⟩ 𝔊.
#[derive(Clone, Debug)]
pub struct Decomposition {
    pub l: RatMatrix,
    pub q: Vec<BigRational>,
    pub g: Vec<BigRational>,
    pub dependent_pair: Option<(usize, usize)>,
    pub coeffs: Option<[BigRational; 3]>,
    pub certificate: Option<BigRational>,
    pub table: Option<TableTriple>,
}

impl Decomposition {
    pub fn gamma(&self, p: &[BigRational]) -> BigRational {
        self.q.iter().zip(p).fold(BigRational::zero(), |acc, (a, b)| acc + a * b)
    }

    /// Checks the identity on the four basis matrices, for the primary and the table triple.
    pub fn verify(&self, a: &PartMap) -> bool {
        (0..4).all(|k| {
            let e = unit(k);
            let ap = a.apply_exact(&e);
            let lhs = self.l.mul_vec(&ap);
            let gam = self.gamma(&e);
            let primary = (0..4).all(|i| &lhs[i] + &gam * &self.g[i] == e[i]);
            let table = self.table.as_ref().is_none_or(|t| {
                let lt = t.l.mul_vec(&ap);
                let gt = t.gamma(&e);
                (0..4).all(|i| &lt[i] + &gt * &t.g[i] == e[i])
            });
            primary && table
        }) && !det2(&self.g).is_zero()
    }

    pub fn to_json(&self) -> Value {
        let v = |xs: &[BigRational]| xs.iter().map(format_rational).collect::<Vec<_>>();
        json!({
            "L": self.l.to_strings(),
            "Q": v(&self.q),
            "G": v(&self.g),
            "dependent_pair": self.dependent_pair.map(|(p, q)| [p, q]),
            "coeffs": self.coeffs.as_ref().map(|c| v(c)),
            "certificate": self.certificate.as_ref().map(format_rational),
            "table": self.table.as_ref().map(|t| json!({
                "L": t.l.to_strings(),
                "G": v(&t.g),
                "gamma_index": [t.dependent_pair.0, t.dependent_pair.1],
                "coeff_pairs": t.coeff_pairs.iter().map(|&(p, q)| [p, q]).collect::<Vec<_>>(),
            })),
        })
    }
}

fn table_triple(a: &PartMap) -> Result<TableTriple> {
    let m = a.matrix();
    for pair in PAIR_SEARCH_ORDER {
        let dep = pair_index(pair);
        let mut others: Vec<(usize, usize)> =
            PAIR_SEARCH_ORDER.iter().copied().filter(|&o| o != pair).collect();
        others.sort();
        let mut basis = RatMatrix::zeros(4, 3);
        for (c, &o) in others.iter().enumerate() {
            for r in 0..4 {
                basis.set(r, c, m.get(r, pair_index(o)).clone());
            }
        }
        let Some(sol) = basis.solve_unique(&m.column(dep)) else { continue };
        let mut g = unit(dep);
        for (k, &o) in others.iter().enumerate() {
            g[pair_index(o)] = -sol[k].clone();
        }
        let certificate = det2(&g);
        if certificate.is_zero() {
            continue;
        }
        // 𝔏 = I − 𝔊 e_pqᵀ
        let mut l = RatMatrix::identity(4);
        for (r, gr) in g.iter().enumerate() {
            let v = l.get(r, dep) - gr;
            l.set(r, dep, v);
        }
        return Ok(TableTriple {
            l,
            g,
            dependent_pair: pair,
            coeff_pairs: [others[0], others[1], others[2]],
            coeffs: [sol[0].clone(), sol[1].clone(), sol[2].clone()],
            certificate,
        });
    }
    Err(Error::NoValidPermutation)
}

pub fn build_decomposition(a: &PartMap) -> Result<Decomposition> {
    if !classify_ellipticity(a).c_elliptic {
        return Err(Error::NotCElliptic);
    }
    match a.rank() {
        4 => Ok(Decomposition {
            l: RatMatrix::identity(4),
            q: vec![BigRational::zero(); 4],
            g: vec![BigRational::one(), BigRational::zero(), BigRational::zero(), BigRational::one()],
            dependent_pair: None,
            coeffs: None,
            certificate: None,
            table: None,
        }),
        3 => {
            let m = a.matrix();
            let mut k = m.nullspace().pop().expect("rank 3 has a one-dimensional kernel");
            let lead = k.iter().position(|x| !x.is_zero()).unwrap();
            let s = k[lead].recip();
            k.iter_mut().for_each(|x| *x *= &s);
            if det2(&k).is_zero() {
                return Err(Error::NotCElliptic);
            }
            // (I − m) = K qᵀ, read q off the row where K is 1
            let comp = RatMatrix::identity(4).sub(m);
            let q = comp.row(lead);
            let table = table_triple(a)?;
            Ok(Decomposition {
                l: RatMatrix::identity(4),
                q,
                g: k,
                dependent_pair: Some(table.dependent_pair),
                coeffs: Some(table.coeffs.clone()),
                certificate: Some(table.certificate.clone()),
                table: Some(table),
            })
        }
        r => Err(Error::RankTooLow(r)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{rat, ratio};

    #[test]
    fn dev_complement_triple() {
        let a = PartMap::preset("dev").unwrap();
        let d = build_decomposition(&a).unwrap();
        assert_eq!(d.l, RatMatrix::identity(4));
        assert_eq!(d.q, vec![ratio(1, 2), rat(0), rat(0), ratio(1, 2)]);
        assert_eq!(d.g, vec![rat(1), rat(0), rat(0), rat(1)]);
        assert!(d.verify(&a));
        let t = d.table.unwrap();
        assert_eq!(t.dependent_pair, (1, 1));
        assert_eq!(t.coeffs, [rat(0), rat(0), rat(-1)]);
    }

    #[test]
    fn sym_dependent_pair() {
        let a = PartMap::preset("sym").unwrap();
        let d = build_decomposition(&a).unwrap();
        assert_eq!(d.dependent_pair, Some((2, 1)));
        assert_eq!(d.coeffs.clone().unwrap(), [rat(0), rat(1), rat(0)]);
        assert_eq!(d.certificate.clone().unwrap(), rat(1));
        assert!(d.verify(&a));
    }

    #[test]
    fn identity_is_trivial() {
        let a = PartMap::preset("grad").unwrap();
        let d = build_decomposition(&a).unwrap();
        assert_eq!(d.l, RatMatrix::identity(4));
        assert!(d.q.iter().all(Zero::is_zero));
        assert!(d.table.is_none());
        assert!(d.verify(&a));
    }

    #[test]
    fn non_c_elliptic_rejected() {
        for name in ["devsym", "skew"] {
            let a = PartMap::preset(name).unwrap();
            assert!(matches!(build_decomposition(&a), Err(Error::NotCElliptic)));
        }
    }
}
