#![allow(dead_code)]

use anisograd::grid::{adjoint_a, apply_a, Grid, VectorField};
use anisograd::operator::PartMap;

/// Symmetric positive-definite band matrix, lower band stored by row: `band[i][d] = A[i][i−d]`.
struct Band {
    n: usize,
    width: usize,
    band: Vec<Vec<f64>>,
}

impl Band {
    fn new(n: usize, width: usize) -> Self {
        Band { n, width, band: vec![vec![0.0; width + 1]; n] }
    }

    fn add(&mut self, r: usize, c: usize, v: f64) {
        if c <= r {
            self.band[r][r - c] += v;
        }
    }

    fn cholesky_solve(mut self, b: &mut [f64]) {
        let (n, w) = (self.n, self.width);
        for i in 0..n {
            for d in (0..=w.min(i)).rev() {
                let j = i - d;
                let mut s = self.band[i][d];
                for k in j.saturating_sub(w).max(i.saturating_sub(w))..j {
                    s -= self.band[i][i - k] * self.band[j][j - k];
                }
                if d == 0 {
                    assert!(s > 0.0, "matrix is not positive definite");
                    self.band[i][0] = s.sqrt();
                } else {
                    self.band[i][d] = s / self.band[j][0];
                }
            }
        }
        for i in 0..n {
            let mut s = b[i];
            for k in i.saturating_sub(w)..i {
                s -= self.band[i][i - k] * b[k];
            }
            b[i] = s / self.band[i][0];
        }
        for i in (0..n).rev() {
            let mut s = b[i];
            for k in i + 1..(i + w + 1).min(n) {
                s -= self.band[k][k - i] * b[k];
            }
            b[i] = s / self.band[i][0];
        }
    }
}

/// Discrete minimiser of `Σ |𝒜[Dv]|² h²` with the boundary values of `u0`, by a direct band
/// Cholesky solve of the normal equations `adjoint_A(apply_A(v)) = 0` at interior nodes.
pub fn laplace_oracle(a: &PartMap, u0: &VectorField) -> VectorField {
    let (nx, ny) = (u0.nx, u0.ny);
    let (mx, my) = (nx - 2, ny - 2);
    let unknown = |i: usize, j: usize, c: usize| 2 * ((j - 1) * mx + (i - 1)) + c;
    // stencil from the centre of a 5x5 patch
    let patch = Grid::new(5, 5, u0.h, [0.0, 0.0]).unwrap();
    let mut stencil = [[[[0.0; 2]; 2]; 3]; 3];
    for c in 0..2 {
        let mut e = VectorField::zeros_like_nodes(&patch);
        let mut v = [0.0; 2];
        v[c] = 1.0;
        e.set(2, 2, v);
        let out = adjoint_a(a, &apply_a(a, &e));
        for dj in 0..3 {
            for di in 0..3 {
                stencil[dj][di][c] = out.get(1 + di, 1 + dj);
            }
        }
    }
    let n = 2 * mx * my;
    let mut m = Band::new(n, 2 * (mx + 1) + 1);
    for j in 1..ny - 1 {
        for i in 1..nx - 1 {
            for c in 0..2 {
                let col = unknown(i, j, c);
                for dj in 0..3 {
                    for di in 0..3 {
                        let (ii, jj) = (i + di - 1, j + dj - 1);
                        if ii == 0 || jj == 0 || ii == nx - 1 || jj == ny - 1 {
                            continue;
                        }
                        for r in 0..2 {
                            m.add(unknown(ii, jj, r), col, stencil[dj][di][c][r]);
                        }
                    }
                }
            }
        }
    }
    let mut boundary = u0.clone();
    for j in 1..ny - 1 {
        for i in 1..nx - 1 {
            boundary.set(i, j, [0.0; 2]);
        }
    }
    let lb = adjoint_a(a, &apply_a(a, &boundary));
    let mut rhs = vec![0.0; n];
    for j in 1..ny - 1 {
        for i in 1..nx - 1 {
            let v = lb.get(i, j);
            rhs[unknown(i, j, 0)] = -v[0];
            rhs[unknown(i, j, 1)] = -v[1];
        }
    }
    m.cholesky_solve(&mut rhs);
    let mut out = boundary;
    for j in 1..ny - 1 {
        for i in 1..nx - 1 {
            out.set(i, j, [rhs[unknown(i, j, 0)], rhs[unknown(i, j, 1)]]);
        }
    }
    out
}

pub fn smooth_boundary(x: [f64; 2]) -> [f64; 2] {
    [
        (std::f64::consts::PI * x[0]).sin() * x[1] + x[0] * x[0],
        (2.0 * x[1]).cos() * x[0] - x[0] * x[1] * x[1],
    ]
}
