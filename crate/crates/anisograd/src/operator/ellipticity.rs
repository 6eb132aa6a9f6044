use num_complex::Complex64;
use serde::Serialize;

use super::{symbol, symbol_chart, symbol_exact, PartMap};
use crate::exact::{rat, to_f64, Poly};

/// A nonzero pair with 𝔸[ξ]v = 0, stored as floats.
#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct Witness {
    pub xi_re: [f64; 2],
    pub xi_im: [f64; 2],
    pub v_re: [f64; 2],
    pub v_im: [f64; 2],
    /// ‖𝒜[v⊗ξ]‖ / (‖v‖‖ξ‖)
    pub residual: f64,
    pub real: bool,
}

impl Witness {
    pub fn xi(&self) -> [Complex64; 2] {
        [Complex64::new(self.xi_re[0], self.xi_im[0]), Complex64::new(self.xi_re[1], self.xi_im[1])]
    }

    pub fn v(&self) -> [Complex64; 2] {
        [Complex64::new(self.v_re[0], self.v_im[0]), Complex64::new(self.v_re[1], self.v_im[1])]
    }

    fn build(a: &PartMap, xi: [Complex64; 2], v: [Complex64; 2]) -> Self {
        let vn = (v[0].norm_sqr() + v[1].norm_sqr()).sqrt();
        let v = [v[0] / vn, v[1] / vn];
        let xn = (xi[0].norm_sqr() + xi[1].norm_sqr()).sqrt();
        let img = symbol(a, xi).apply(v);
        let residual = img.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt() / xn;
        let real = xi.iter().chain(v.iter()).all(|z| z.im == 0.0);
        Witness {
            xi_re: [xi[0].re, xi[1].re],
            xi_im: [xi[0].im, xi[1].im],
            v_re: [v[0].re, v[1].re],
            v_im: [v[0].im, v[1].im],
            residual,
            real,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct EllipticityReport {
    pub elliptic: bool,
    pub c_elliptic: bool,
    /// Real witness when `elliptic` is false, otherwise a complex one when `c_elliptic` is false.
    pub witness: Option<Witness>,
    /// Degree of the GCD of the 2x2 minors on the chart ξ = (1, z); −1 if all minors vanish.
    pub minor_gcd_degree: i32,
    pub minor_gcd: Vec<String>,
    pub real_root_count: usize,
    pub injective_at_e2: bool,
}

fn null_vector(a: &PartMap, xi: [Complex64; 2]) -> [Complex64; 2] {
    let s = symbol(a, xi);
    let best = (0..4)
        .max_by(|&i, &j| {
            let ni = s.entries[i][0].norm_sqr() + s.entries[i][1].norm_sqr();
            let nj = s.entries[j][0].norm_sqr() + s.entries[j][1].norm_sqr();
            ni.total_cmp(&nj)
        })
        .unwrap();
    let row = s.entries[best];
    if row[0].norm() + row[1].norm() == 0.0 {
        [Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)]
    } else {
        [row[1], -row[0]]
    }
}

fn exact_real_witness(a: &PartMap, xi: [i64; 2]) -> Witness {
    let s = symbol_exact(a, &[rat(xi[0]), rat(xi[1])]);
    let v = s.nullspace().into_iter().next().expect("symbol is not injective here");
    let c = |x: f64| Complex64::new(x, 0.0);
    Witness::build(
        a,
        [c(xi[0] as f64), c(xi[1] as f64)],
        [c(to_f64(&v[0])), c(to_f64(&v[1]))],
    )
}

pub fn classify_ellipticity(a: &PartMap) -> EllipticityReport {
    let chart = symbol_chart(a);
    let mut g = Poly::zero();
    for r in 0..4 {
        for s in r + 1..4 {
            let minor = chart[r][0].mul(&chart[s][1]).sub(&chart[r][1].mul(&chart[s][0]));
            g = g.gcd(&minor);
        }
    }
    let injective_at_e2 = symbol_exact(a, &[rat(0), rat(1)]).rank() == 2;
    let real_root_count = g.count_real_roots();

    let (elliptic, c_elliptic, witness) = if g.is_zero() {
        // every (1, z) is degenerate; z = 0 gives a real witness
        (false, false, Some(exact_real_witness(a, [1, 0])))
    } else if !injective_at_e2 {
        (false, false, Some(exact_real_witness(a, [0, 1])))
    } else if real_root_count > 0 {
        let z = g
            .complex_roots()
            .into_iter()
            .min_by(|x, y| x.im.abs().total_cmp(&y.im.abs()))
            .unwrap();
        let xi = [Complex64::new(1.0, 0.0), Complex64::new(z.re, 0.0)];
        (false, false, Some(Witness::build(a, xi, null_vector(a, xi))))
    } else if g.degree() > 0 {
        let z = g.complex_roots()[0];
        let xi = [Complex64::new(1.0, 0.0), z];
        (true, false, Some(Witness::build(a, xi, null_vector(a, xi))))
    } else {
        (true, true, None)
    };

    EllipticityReport {
        elliptic,
        c_elliptic,
        witness,
        minor_gcd_degree: g.degree(),
        minor_gcd: g.to_strings(),
        real_root_count,
        injective_at_e2,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn presets_classify() {
        let expect = [
            ("grad", true, true),
            ("sym", true, true),
            ("dev", true, true),
            ("devsym", true, false),
            ("skew", false, false),
        ];
        for (name, e, c) in expect {
            let r = classify_ellipticity(&PartMap::preset(name).unwrap());
            assert_eq!((r.elliptic, r.c_elliptic), (e, c), "{name}");
            assert_eq!(r.witness.is_some(), !c, "{name}");
        }
    }

    #[test]
    fn devsym_witness_is_conformal_direction() {
        let r = classify_ellipticity(&PartMap::preset("devsym").unwrap());
        let w = r.witness.unwrap();
        assert!(w.residual <= 1e-10);
        assert!(!w.real);
        // z* = ±i
        assert!(w.xi_re[1].abs() < 1e-14 && (w.xi_im[1].abs() - 1.0).abs() < 1e-14);
        assert_eq!(r.minor_gcd_degree, 2);
    }

    #[test]
    fn skew_witness_is_parallel() {
        let r = classify_ellipticity(&PartMap::preset("skew").unwrap());
        assert_eq!(r.minor_gcd_degree, -1);
        let w = r.witness.unwrap();
        assert!(w.real);
        assert_eq!(w.residual, 0.0);
        // v ∥ ξ
        let cross = w.v_re[0] * w.xi_re[1] - w.v_re[1] * w.xi_re[0];
        assert!(cross.abs() < 1e-15);
    }
}
