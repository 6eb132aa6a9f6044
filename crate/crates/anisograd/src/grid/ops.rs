use super::{BallRegion, Field, Grid, MatrixField, Value, VectorField};
use crate::error::{Error, Result};
use crate::mat;
use crate::operator::PartMap;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Axis {
    X,
    Y,
}

/// Forward-difference gradient at cells: columns ∂₁ and ∂₂ of each component.
pub fn gradient(v: &VectorField) -> MatrixField {
    let g = v.grid();
    let inv_h = 1.0 / g.h;
    let mut out = MatrixField::zeros_like_cells(&g);
    for j in 0..g.cells_y() {
        for i in 0..g.cells_x() {
            let c = v.get(i, j);
            let e = v.get(i + 1, j);
            let n = v.get(i, j + 1);
            out.set(
                i,
                j,
                [
                    (e[0] - c[0]) * inv_h,
                    (n[0] - c[0]) * inv_h,
                    (e[1] - c[1]) * inv_h,
                    (n[1] - c[1]) * inv_h,
                ],
            );
        }
    }
    out
}

pub fn apply_a(a: &PartMap, v: &VectorField) -> MatrixField {
    let m = a.matrix_f64();
    gradient(v).map(|p| mat::mul_vec(m, p))
}

/// Exact transpose of `apply_a`: ⟨apply_a(v), σ⟩ = ⟨v, adjoint_a(σ)⟩ for every node field v.
pub fn adjoint_a(a: &PartMap, sigma: &MatrixField) -> VectorField {
    let m = a.matrix_f64();
    let h = sigma.h;
    let g = Grid {
        nx: sigma.nx + 1,
        ny: sigma.ny + 1,
        h,
        origin: [sigma.origin[0] - 0.5 * h, sigma.origin[1] - 0.5 * h],
    };
    let mut out = VectorField::zeros_like_nodes(&g);
    scatter_adjoint(m, sigma, &mut out);
    out
}

/// Adds the transpose of `v ↦ m·Dv` applied to `sigma` into `out`.
pub(crate) fn scatter_adjoint(m: &mat::Mat4, sigma: &MatrixField, out: &mut VectorField) {
    let inv_h = 1.0 / sigma.h;
    let nx = out.nx;
    for j in 0..sigma.ny {
        for i in 0..sigma.nx {
            let t = mat::mul_t_vec(m, &sigma.values[j * sigma.nx + i]);
            let c = j * nx + i;
            for a in 0..2 {
                let tx = t[2 * a] * inv_h;
                let ty = t[2 * a + 1] * inv_h;
                out.values[c + 1][a] += tx;
                out.values[c + nx][a] += ty;
                out.values[c][a] -= tx + ty;
            }
        }
    }
}

/// Δ_{s,kh} w(x) = (w(x + k h e_s) − w(x)) / (k h) for a nonzero step count k.
/// The result lives on the sites where both samples exist.
pub fn difference_quotient<T: Value>(w: &Field<T>, axis: Axis, steps: i64) -> Result<Field<T>> {
    if steps == 0 {
        return Err(Error::Invalid("difference quotient needs a nonzero step".into()));
    }
    let k = steps.unsigned_abs() as usize;
    let n_axis = match axis {
        Axis::X => w.nx,
        Axis::Y => w.ny,
    };
    if k >= n_axis {
        return Err(Error::DomainTooSmall(format!("{k} steps on an axis with {n_axis} sites")));
    }
    let (nx, ny) = match axis {
        Axis::X => (w.nx - k, w.ny),
        Axis::Y => (w.nx, w.ny - k),
    };
    let (di, dj) = match axis {
        Axis::X => (k, 0),
        Axis::Y => (0, k),
    };
    let step = steps as f64 * w.h;
    // for negative steps the base point is the upper sample
    let shift = if steps > 0 { 0.0 } else { k as f64 * w.h };
    let mut origin = w.origin;
    match axis {
        Axis::X => origin[0] += shift,
        Axis::Y => origin[1] += shift,
    }
    let mut values = Vec::with_capacity(nx * ny);
    for j in 0..ny {
        for i in 0..nx {
            let lo = w.get(i, j);
            let hi = w.get(i + di, j + dj);
            let (base, target) = if steps > 0 { (lo, hi) } else { (hi, lo) };
            values.push(target.zip(&base, |t, b| (t - b) / step));
        }
    }
    Ok(Field { nx, ny, h: w.h, origin, values })
}

/// Σ over cells of R of |𝒜[Dv]| h².
pub fn total_a_variation(a: &PartMap, v: &VectorField, region: &BallRegion) -> Result<f64> {
    let g = v.grid();
    let cells = region.cells(&g);
    if cells.is_empty() {
        return Err(Error::EmptyRegion);
    }
    let av = apply_a(a, v);
    Ok(cells.iter().map(|&(i, j)| mat::norm(&av.get(i, j))).sum::<f64>() * g.h * g.h)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn forward_bias_on_quadratic() {
        let g = Grid::new(11, 11, 0.1, [0.0, 0.0]).unwrap();
        let v = VectorField::on_nodes(&g, |x| [x[0] * x[0], 0.0]);
        let d = gradient(&v);
        for (i, j) in [(0, 0), (3, 4), (9, 9)] {
            let x1 = g.node(i, j)[0];
            assert!((d.get(i, j)[0] - (2.0 * x1 + 0.1)).abs() < 1e-12);
        }
    }

    #[test]
    fn constant_field_has_zero_gradient() {
        let g = Grid::unit_square(5).unwrap();
        let v = VectorField::on_nodes(&g, |_| [3.0, -1.0]);
        assert!(gradient(&v).values.iter().all(|p| p.iter().all(|&x| x == 0.0)));
    }

    #[test]
    fn identity_adjoint_of_constant_vanishes_inside() {
        let g = Grid::unit_square(6).unwrap();
        let a = PartMap::preset("grad").unwrap();
        let sigma = MatrixField::on_cells(&g, |_| [1.0, 2.0, -0.5, 0.25]);
        let d = adjoint_a(&a, &sigma);
        for j in 1..g.ny - 1 {
            for i in 1..g.nx - 1 {
                assert!(d.get(i, j).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn second_difference_of_square() {
        let w = Field::<f64>::from_fn(10, 3, 0.5, [0.0, 0.0], |x| x[0] * x[0]);
        let d1 = difference_quotient(&w, Axis::X, 1).unwrap();
        let d2 = difference_quotient(&d1, Axis::X, -1).unwrap();
        assert_eq!(d2.nx, 8);
        assert!(d2.values.iter().all(|&v| (v - 2.0).abs() < 1e-12));
        // Δ_{x,h} x² = 2x + h at the base point
        assert!((d1.get(2, 0) - (2.0 * 1.0 + 0.5)).abs() < 1e-12);
    }

    #[test]
    fn too_many_steps() {
        let w = Field::<f64>::from_fn(4, 4, 1.0, [0.0, 0.0], |x| x[0]);
        assert!(matches!(difference_quotient(&w, Axis::Y, 4), Err(Error::DomainTooSmall(_))));
    }
}
