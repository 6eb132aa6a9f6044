use anisograd::orlicz::{luxemburg_norm, YoungFunction};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_pair(rng: &mut ChaCha8Rng, n: usize) -> (Vec<f64>, Vec<f64>, Vec<f64>) {
    let u = (0..n).map(|_| rng.gen_range(-3.0..3.0)).collect();
    let v = (0..n).map(|_| rng.gen_range(-3.0..3.0)).collect();
    let w = vec![1.0 / n as f64; n];
    (u, v, w)
}

fn norm(u: &[f64], w: &[f64], phi: &YoungFunction) -> f64 {
    luxemburg_norm(u, w, phi).unwrap().value
}

#[test]
fn power_type_matches_lp() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for p in [1.0, 1.5, 2.0, 3.7] {
        let (u, _, w) = random_pair(&mut rng, 200);
        let lp = u.iter().zip(&w).map(|(x, wk)| wk * x.abs().powf(p)).sum::<f64>().powf(1.0 / p);
        let got = norm(&u, &w, &YoungFunction::Power(p));
        assert!((got - lp).abs() <= 1e-9 * lp, "p={p}: {got} vs {lp}");
    }
}

#[test]
fn constant_field_exp_type() {
    // Σw (e^{(c/λ)^β} − 1) = 1 with total weight m gives λ = c / ln(1 + 1/m)^{1/β}.
    for (c, beta, m) in [(1.0, 1.0, 1.0), (2.5, 0.5, 0.2), (0.3, 2.0, 3.0), (7.0, 0.25, 0.05)] {
        let n = 10;
        let u = vec![c; n];
        let w = vec![m / n as f64; n];
        let expect = c / (1.0 + 1.0 / m).ln().powf(1.0 / beta);
        let got = norm(&u, &w, &YoungFunction::Exp(beta));
        assert!((got - expect).abs() <= 1e-9 * expect, "c={c} beta={beta} m={m}: {got} vs {expect}");
    }
}

#[test]
fn axioms_on_random_pairs() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let phis = [YoungFunction::Exp(0.5), YoungFunction::Exp(1.0), YoungFunction::Exp(2.0), YoungFunction::Power(1.5)];
    for k in 0..1000 {
        let phi = &phis[k % phis.len()];
        let (u, v, w) = random_pair(&mut rng, 32);
        let (nu, nv) = (norm(&u, &w, phi), norm(&v, &w, phi));
        let sum: Vec<f64> = u.iter().zip(&v).map(|(a, b)| a + b).collect();
        let nsum = norm(&sum, &w, phi);
        assert!(nsum <= (nu + nv) * (1.0 + 1e-9), "triangle {k}: {nsum} > {nu} + {nv}");
        // power-of-two scalings commute with every floating-point step
        let c = 2f64.powi(rng.gen_range(-6..6));
        let scaled: Vec<f64> = u.iter().map(|x| -c * x).collect();
        assert_eq!(norm(&scaled, &w, phi), c * nu, "homogeneity {k}");
        let c = rng.gen_range(0.1..10.0);
        let scaled: Vec<f64> = u.iter().map(|x| c * x).collect();
        assert!((norm(&scaled, &w, phi) - c * nu).abs() <= 1e-9 * c * nu, "homogeneity {k}");
    }
}

proptest! {
    #[test]
    fn norm_is_monotone_in_magnitude(u in prop::collection::vec(-5.0f64..5.0, 1..40), beta in 0.2f64..3.0) {
        let w = vec![1.0 / u.len() as f64; u.len()];
        let bigger: Vec<f64> = u.iter().map(|x| x.abs() + 0.5).collect();
        let phi = YoungFunction::Exp(beta);
        prop_assert!(norm(&u, &w, &phi) <= norm(&bigger, &w, &phi) * (1.0 + 1e-12));
    }

    #[test]
    fn residual_is_small(u in prop::collection::vec(-5.0f64..5.0, 1..40), beta in 0.2f64..3.0) {
        prop_assume!(u.iter().any(|x| *x != 0.0));
        let w = vec![1.0 / u.len() as f64; u.len()];
        let r = luxemburg_norm(&u, &w, &YoungFunction::Exp(beta)).unwrap();
        prop_assert!(r.value > 0.0);
        let modular: f64 = u.iter().zip(&w).map(|(x, wk)| wk * ((x.abs() / r.value).powf(beta)).exp_m1()).sum();
        prop_assert!((modular - 1.0).abs() <= 1e-9);
    }
}
