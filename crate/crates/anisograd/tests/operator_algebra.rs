use anisograd::exact::{rat, RatMatrix};
use anisograd::operator::{
    build_decomposition, build_second_order_factorization, classify_ellipticity, hessian_index, kernel_basis,
    symbol, symbol_exact, PartMap, PRESETS,
};
use num_complex::Complex64;
use num_rational::BigRational;
use proptest::prelude::*;

fn invertible_2x2() -> impl Strategy<Value = [i64; 4]> {
    prop::array::uniform4(-3i64..=3).prop_filter("singular", |m| m[0] * m[3] - m[1] * m[2] != 0)
}

fn conjugated(base: &str, t: [i64; 4], r: [i64; 4]) -> PartMap {
    let a = PartMap::preset(base).unwrap();
    a.conjugate(&RatMatrix::from_i64(2, 2, &t), &RatMatrix::from_i64(2, 2, &r), "conj").unwrap()
}

#[test]
fn classifier_matrix() {
    let expect = [("grad", true, true), ("sym", true, true), ("dev", true, true), ("devsym", true, false), ("skew", false, false)];
    for (name, ell, cell) in expect {
        let r = classify_ellipticity(&PartMap::preset(name).unwrap());
        assert_eq!((r.elliptic, r.c_elliptic), (ell, cell), "{name}");
        assert_eq!(r.witness.is_some(), !cell, "{name}");
    }
}

#[test]
fn presets_decompose_exactly() {
    for name in PRESETS {
        let a = PartMap::preset(name).unwrap();
        match build_decomposition(&a) {
            Ok(d) => {
                assert!(d.verify(&a), "{name}");
                let f = build_second_order_factorization(&a, &d).unwrap();
                assert!(f.verify_symbol_identity(&a), "{name}");
            }
            Err(_) => assert!(!classify_ellipticity(&a).c_elliptic, "{name}"),
        }
    }
}

/// Coefficients of `∂_k∂_l u_i = ∂_k ε_il + ∂_l ε_ik − ∂_i ε_kl` as maps on vec(ε).
fn sym_three_term() -> [RatMatrix; 2] {
    let mut e = [RatMatrix::zeros(6, 4), RatMatrix::zeros(6, 4)];
    let vec_idx = |p: usize, q: usize| 2 * (p - 1) + (q - 1);
    for i in 1..=2 {
        for k in 1..=2 {
            for l in k..=2 {
                let row = hessian_index(i, k, l);
                for (s, p, q, sign) in [(k, i, l, 1), (l, i, k, 1), (i, k, l, -1)] {
                    let m = &mut e[s - 1];
                    let v = m.get(row, vec_idx(p, q)) + rat(sign);
                    m.set(row, vec_idx(p, q), v);
                }
            }
        }
    }
    e
}

#[test]
fn sym_reproduces_three_term_formula() {
    let a = PartMap::preset("sym").unwrap();
    let d = build_decomposition(&a).unwrap();
    let f = build_second_order_factorization(&a, &d).unwrap();
    let [e1, e2] = sym_three_term();
    assert_eq!(f.c1, e1.mul(a.matrix()));
    assert_eq!(f.c2, e2.mul(a.matrix()));
}

#[test]
fn kernel_is_annihilated_exactly() {
    for name in ["grad", "sym", "dev", "devsym"] {
        let a = PartMap::preset(name).unwrap();
        for e in kernel_basis(&a).elements {
            assert!(a.apply_exact(&e.b_mat_exact).iter().all(|x| *x == rat(0)), "{name}");
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn conjugated_rank3_decomposes(t in invertible_2x2(), r in invertible_2x2(), base in prop::sample::select(vec!["sym", "dev"])) {
        let a = conjugated(base, t, r);
        prop_assert_eq!(a.rank(), 3);
        prop_assert!(classify_ellipticity(&a).c_elliptic);
        let d = build_decomposition(&a).unwrap();
        prop_assert!(d.verify(&a));
        let f = build_second_order_factorization(&a, &d).unwrap();
        prop_assert!(f.verify_symbol_identity(&a));
    }

    #[test]
    fn conjugation_preserves_devsym_class(t in invertible_2x2(), r in invertible_2x2()) {
        let a = conjugated("devsym", t, r);
        let rep = classify_ellipticity(&a);
        prop_assert!(rep.elliptic);
        prop_assert!(!rep.c_elliptic);
    }

    #[test]
    fn symbol_matches_tensor_action(x0 in -5i64..=5, x1 in -5i64..=5, v0 in -5i64..=5, v1 in -5i64..=5,
                                    name in prop::sample::select(PRESETS.to_vec())) {
        let a = PartMap::preset(name).unwrap();
        let xi = [rat(x0), rat(x1)];
        let s = symbol_exact(&a, &xi);
        let v = [rat(v0), rat(v1)];
        let tensor: Vec<BigRational> = (0..4).map(|k| &v[k / 2] * &xi[k % 2]).collect();
        prop_assert_eq!(s.mul_vec(&v), a.apply_exact(&tensor));
        let c = |x: i64| Complex64::new(x as f64, 0.0);
        let sf = symbol(&a, [c(x0), c(x1)]).apply([c(v0), c(v1)]);
        let tf = a.apply(&[(v0 * x0) as f64, (v0 * x1) as f64, (v1 * x0) as f64, (v1 * x1) as f64]);
        for k in 0..4 {
            prop_assert!((sf[k].re - tf[k]).abs() < 1e-12 && sf[k].im.abs() < 1e-12);
        }
    }
}
