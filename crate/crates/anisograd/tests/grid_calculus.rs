use anisograd::grid::{
    adjoint_a, apply_a, difference_quotient, gradient, read_csv, total_a_variation, write_csv, Axis, BallRegion, Grid,
    MatrixField, VectorField,
};
use anisograd::operator::{build_decomposition, build_second_order_factorization, PartMap, PRESETS};
use anisograd::solver::second_derivative_field;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_vector_field(g: &Grid, rng: &mut ChaCha8Rng) -> VectorField {
    let mut u = VectorField::zeros_like_nodes(g);
    for v in &mut u.values {
        *v = [rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)];
    }
    u
}

fn random_matrix_field(g: &Grid, rng: &mut ChaCha8Rng) -> MatrixField {
    let mut s = MatrixField::zeros_like_cells(g);
    for v in &mut s.values {
        *v = std::array::from_fn(|_| rng.gen_range(-1.0..1.0));
    }
    s
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn adjoint_is_transpose(seed in any::<u64>(), n in 3usize..20, name in prop::sample::select(PRESETS.to_vec())) {
        let g = Grid::unit_square(n).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = PartMap::preset(name).unwrap();
        let v = random_vector_field(&g, &mut rng);
        let s = random_matrix_field(&g, &mut rng);
        let av = apply_a(&a, &v);
        let lhs: f64 = av.values.iter().zip(&s.values).map(|(p, q)| (0..4).map(|k| p[k] * q[k]).sum::<f64>()).sum();
        let adj = adjoint_a(&a, &s);
        let rhs: f64 = v.values.iter().zip(&adj.values).map(|(p, q)| p[0] * q[0] + p[1] * q[1]).sum();
        prop_assert!((lhs - rhs).abs() <= 1e-10 * (1.0 + lhs.abs()));
    }

    #[test]
    fn csv_round_trip(seed in any::<u64>(), nx in 3usize..9, ny in 3usize..9, h in 1e-3f64..10.0) {
        let g = Grid::new(nx, ny, h, [-0.3, 1.7]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut u = random_vector_field(&g, &mut rng);
        u.values[0] = [1e-300, -7.5e300];
        let mut buf = Vec::new();
        write_csv(&u, &mut buf).unwrap();
        let back: VectorField = read_csv(buf.as_slice()).unwrap();
        prop_assert_eq!(back, u);
    }

    #[test]
    fn kernel_fields_have_zero_variation(b in -2.0f64..2.0, c in prop::array::uniform2(-2.0f64..2.0)) {
        // infinitesimal rotations plus translations
        let a = PartMap::preset("sym").unwrap();
        let skew = [0.0, b, -b, 0.0];
        let g = Grid::unit_square(16).unwrap();
        let u = VectorField::on_nodes(&g, |x| [skew[0] * x[0] + skew[1] * x[1] + c[0], skew[2] * x[0] + skew[3] * x[1] + c[1]]);
        let region = BallRegion::new([0.5, 0.5], 0.3).unwrap();
        prop_assert!(total_a_variation(&a, &u, &region).unwrap() < 1e-12);
    }
}

#[test]
fn difference_quotient_of_linear_is_slope() {
    let g = Grid::unit_square(10).unwrap();
    let w = anisograd::grid::ScalarField::on_nodes(&g, |x| 3.0 * x[0] - 2.0 * x[1]);
    for steps in [1, 2, -3] {
        let dx = difference_quotient(&w, Axis::X, steps).unwrap();
        let dy = difference_quotient(&w, Axis::Y, steps).unwrap();
        assert!(dx.values.iter().all(|v| (v - 3.0).abs() < 1e-12));
        assert!(dy.values.iter().all(|v| (v + 2.0).abs() < 1e-12));
    }
}

#[test]
fn gradient_is_forward_difference() {
    let g = Grid::unit_square(4).unwrap();
    let u = VectorField::on_nodes(&g, |x| [x[0] * x[0], x[0] * x[1]]);
    let d = gradient(&u);
    let h = g.h;
    let [x, y] = g.node(1, 2);
    let expect = [(2.0 * x + h), 0.0, y, x];
    let got = d.get(1, 2);
    for k in 0..4 {
        assert!((got[k] - expect[k]).abs() < 1e-12, "{k}: {} vs {}", got[k], expect[k]);
    }
}

fn trig_second_derivative_error(n: usize, name: &str) -> f64 {
    let g = Grid::unit_square(n).unwrap();
    let u = VectorField::on_nodes(&g, |x| [x[0].sin() * x[1].cos(), (x[0] + 2.0 * x[1]).cos()]);
    let exact = |x: [f64; 2]| {
        let (s, c) = (x[0].sin() * x[1].cos(), x[0].cos() * x[1].sin());
        let w = (x[0] + 2.0 * x[1]).cos();
        [-s, -c, -s, -w, -2.0 * w, -4.0 * w]
    };
    let a = PartMap::preset(name).unwrap();
    let d = build_decomposition(&a).unwrap();
    let f = build_second_order_factorization(&a, &d).unwrap();
    let hess = second_derivative_field(&u, &a, &f);
    let mut err = 0.0f64;
    for j in 0..hess.ny {
        for i in 0..hess.nx {
            let e = exact(hess.position(i, j));
            let v = hess.get(i, j);
            for k in 0..6 {
                err = err.max((v[k] - e[k]).abs());
            }
        }
    }
    err
}

#[test]
fn second_derivative_first_order_on_trig_fields() {
    for name in ["grad", "sym", "dev"] {
        let e1 = trig_second_derivative_error(32, name);
        let e2 = trig_second_derivative_error(64, name);
        let order = (e1 / e2).log2();
        assert!(order >= 0.9, "{name}: errors {e1:e} {e2:e}, order {order}");
    }
}
