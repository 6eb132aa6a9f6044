use serde::Serialize;

use crate::error::{Error, Result};
use crate::grid::{BallRegion, VectorField};
use crate::mat::Mat2;
use crate::operator::KernelBasis;

#[derive(Debug, Clone, Serialize)]
pub struct KernelProjection {
    /// Coefficients over the kernel basis elements.
    pub coefficients: Vec<f64>,
    /// The fitted affine field `x ↦ Bx + b`.
    pub b_mat: Mat2,
    pub b_vec: [f64; 2],
    /// Max normal-equation residual relative to the right-hand side scale.
    pub normal_residual: f64,
}

impl KernelProjection {
    pub fn eval(&self, x: [f64; 2]) -> [f64; 2] {
        let b = &self.b_mat;
        [b[0] * x[0] + b[1] * x[1] + self.b_vec[0], b[2] * x[0] + b[3] * x[1] + self.b_vec[1]]
    }

    pub fn field(&self, like: &VectorField) -> VectorField {
        let mut out = like.clone();
        for j in 0..out.ny {
            for i in 0..out.nx {
                out.set(i, j, self.eval(out.position(i, j)));
            }
        }
        out
    }
}

/// Least-squares fit of `u` by the kernel over the nodes in `region`.
pub fn kernel_projection(u: &VectorField, region: &BallRegion, kb: &KernelBasis) -> Result<KernelProjection> {
    let nodes = region.sites(u);
    let n = kb.dim();
    if nodes.len() < n {
        return Err(Error::DegenerateRegion);
    }
    let c = region.center;
    // Basis centred at the ball: B(x − c) + b.
    let phi = |k: usize, x: [f64; 2]| {
        let e = &kb.elements[k];
        let y = [x[0] - c[0], x[1] - c[1]];
        let b = &e.b_mat;
        [b[0] * y[0] + b[1] * y[1] + e.b_vec[0], b[2] * y[0] + b[3] * y[1] + e.b_vec[1]]
    };
    let mut gram = vec![vec![0.0; n]; n];
    let mut rhs = vec![0.0; n];
    for &(i, j) in &nodes {
        let x = u.position(i, j);
        let v = u.get(i, j);
        let vals: Vec<[f64; 2]> = (0..n).map(|k| phi(k, x)).collect();
        for k in 0..n {
            rhs[k] += vals[k][0] * v[0] + vals[k][1] * v[1];
            for l in 0..n {
                gram[k][l] += vals[k][0] * vals[l][0] + vals[k][1] * vals[l][1];
            }
        }
    }
    let coeff_c = solve_spd(&gram, &rhs)?;
    let scale = rhs.iter().fold(0.0f64, |m, x| m.max(x.abs())).max(f64::MIN_POSITIVE);
    let normal_residual = (0..n)
        .map(|k| ((0..n).map(|l| gram[k][l] * coeff_c[l]).sum::<f64>() - rhs[k]).abs())
        .fold(0.0, f64::max)
        / scale;

    let mut b_mat = [0.0; 4];
    let mut b_vec = [0.0; 2];
    for (k, e) in kb.elements.iter().enumerate() {
        for q in 0..4 {
            b_mat[q] += coeff_c[k] * e.b_mat[q];
        }
        b_vec[0] += coeff_c[k] * e.b_vec[0];
        b_vec[1] += coeff_c[k] * e.b_vec[1];
    }
    b_vec[0] -= b_mat[0] * c[0] + b_mat[1] * c[1];
    b_vec[1] -= b_mat[2] * c[0] + b_mat[3] * c[1];
    // Back to the uncentred basis: only the constant elements change.
    let mut coefficients = coeff_c.clone();
    for (k, e) in kb.elements.iter().enumerate() {
        if e.b_mat == [0.0; 4] && e.b_vec[0] * e.b_vec[1] == 0.0 {
            let axis = if e.b_vec[0] != 0.0 { 0 } else { 1 };
            coefficients[k] = b_vec[axis] / e.b_vec[axis];
        }
    }
    Ok(KernelProjection { coefficients, b_mat, b_vec, normal_residual })
}

/// Cholesky solve; fails when a pivot collapses relative to the diagonal.
fn solve_spd(a: &[Vec<f64>], b: &[f64]) -> Result<Vec<f64>> {
    let n = b.len();
    let mut l = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in 0..=i {
            let s: f64 = a[i][j] - (0..j).map(|k| l[i][k] * l[j][k]).sum::<f64>();
            if i == j {
                if !(s > 1e-12 * a[i][i].abs()) {
                    return Err(Error::DegenerateRegion);
                }
                l[i][i] = s.sqrt();
            } else {
                l[i][j] = s / l[j][j];
            }
        }
    }
    let mut y = vec![0.0; n];
    for i in 0..n {
        y[i] = (b[i] - (0..i).map(|k| l[i][k] * y[k]).sum::<f64>()) / l[i][i];
    }
    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        x[i] = (y[i] - (i + 1..n).map(|k| l[k][i] * x[k]).sum::<f64>()) / l[i][i];
    }
    Ok(x)
}
