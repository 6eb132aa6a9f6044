use crate::grid::ops::{apply_a, difference_quotient, Axis};
use crate::grid::{HessianField, VectorField};
use crate::operator::{PartMap, SecondOrderFactorization};

/// `C₁ ∂₁𝒜[Du] + C₂ ∂₂𝒜[Du]` with forward differences of the cell field, on the
/// `(nx−2) × (ny−2)` sites where both differences exist. Site (i, j) sits at node (i+1, j+1).
pub fn second_derivative_field(u: &VectorField, a: &PartMap, fact: &SecondOrderFactorization) -> HessianField {
    let w = apply_a(a, u);
    let h = u.h;
    let (nx, ny) = (w.nx - 1, w.ny - 1);
    let dx = difference_quotient(&w, Axis::X, 1).expect("grid has at least two cells per axis");
    let dy = difference_quotient(&w, Axis::Y, 1).expect("grid has at least two cells per axis");
    let mut values = Vec::with_capacity(nx * ny);
    for j in 0..ny {
        for i in 0..nx {
            let (px, py) = (dx.get(i, j), dy.get(i, j));
            values.push(std::array::from_fn(|r| {
                (0..4).map(|c| fact.c1f[r][c] * px[c] + fact.c2f[r][c] * py[c]).sum::<f64>()
            }));
        }
    }
    HessianField { nx, ny, h, origin: [u.origin[0] + h, u.origin[1] + h], values }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Grid;
    use crate::operator::{build_decomposition, build_second_order_factorization};

    #[test]
    fn quadratic_is_exact() {
        let g = Grid::unit_square(12).unwrap();
        // u1 = x² + 3xy − y², u2 = −2x² + xy + 5y²
        let u = VectorField::on_nodes(&g, |x| {
            [x[0] * x[0] + 3.0 * x[0] * x[1] - x[1] * x[1], -2.0 * x[0] * x[0] + x[0] * x[1] + 5.0 * x[1] * x[1]]
        });
        let expect = [2.0, 3.0, -2.0, -4.0, 1.0, 10.0];
        for name in ["grad", "sym", "dev"] {
            let a = PartMap::preset(name).unwrap();
            let dec = build_decomposition(&a).unwrap();
            let fact = build_second_order_factorization(&a, &dec).unwrap();
            let d2 = second_derivative_field(&u, &a, &fact);
            assert_eq!((d2.nx, d2.ny), (11, 11));
            for v in &d2.values {
                for k in 0..6 {
                    assert!((v[k] - expect[k]).abs() < 1e-9, "{name} {v:?}");
                }
            }
        }
    }
}
