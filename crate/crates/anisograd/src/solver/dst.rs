use std::sync::Arc;

use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

/// Sine transform of type I: `X_k = Σ_{j=1}^{N−1} x_j sin(πjk/N)` for k = 1..N−1.
struct Dst {
    n: usize,
    fft: Arc<dyn Fft<f64>>,
}

impl Dst {
    fn new(planner: &mut FftPlanner<f64>, n: usize) -> Self {
        Dst { n, fft: planner.plan_fft_forward(2 * n) }
    }

    /// In place on `data`, reading `len = n−1` values at `offset + k*stride`.
    fn apply(&self, data: &mut [f64], offset: usize, stride: usize, buf: &mut Vec<Complex64>) {
        let n = self.n;
        buf.clear();
        buf.resize(2 * n, Complex64::new(0.0, 0.0));
        for k in 1..n {
            let x = data[offset + (k - 1) * stride];
            buf[k].re = x;
            buf[2 * n - k].re = -x;
        }
        self.fft.process(buf);
        for k in 1..n {
            data[offset + (k - 1) * stride] = -0.5 * buf[k].im;
        }
    }
}

/// Inverse of the 5-point Dirichlet Laplacian (unit spacing) on an `(nx−2) × (ny−2)` block
/// of interior nodes.
pub struct LaplaceSolver {
    mx: usize,
    my: usize,
    dx: Dst,
    dy: Dst,
    inv_eig: Vec<f64>,
}

impl LaplaceSolver {
    /// `nx`, `ny` are node counts including the boundary.
    pub fn new(nx: usize, ny: usize) -> Self {
        let (cx, cy) = (nx - 1, ny - 1);
        let mut planner = FftPlanner::new();
        let dx = Dst::new(&mut planner, cx);
        let dy = Dst::new(&mut planner, cy);
        let (mx, my) = (cx - 1, cy - 1);
        let ex: Vec<f64> = (1..cx)
            .map(|k| 4.0 * (std::f64::consts::PI * k as f64 / (2.0 * cx as f64)).sin().powi(2))
            .collect();
        let ey: Vec<f64> = (1..cy)
            .map(|k| 4.0 * (std::f64::consts::PI * k as f64 / (2.0 * cy as f64)).sin().powi(2))
            .collect();
        let norm = (2.0 / cx as f64) * (2.0 / cy as f64);
        let mut inv_eig = Vec::with_capacity(mx * my);
        for l in &ey {
            for k in &ex {
                inv_eig.push(norm / (k + l));
            }
        }
        LaplaceSolver { mx, my, dx, dy, inv_eig }
    }

    pub fn interior_len(&self) -> usize {
        self.mx * self.my
    }

    /// Solves in place; `data` is row-major with `mx` entries per row.
    pub fn solve(&self, data: &mut [f64]) {
        let mut buf = Vec::new();
        self.transform(data, &mut buf);
        for (d, e) in data.iter_mut().zip(&self.inv_eig) {
            *d *= e;
        }
        self.transform(data, &mut buf);
    }

    fn transform(&self, data: &mut [f64], buf: &mut Vec<Complex64>) {
        for r in 0..self.my {
            self.dx.apply(data, r * self.mx, 1, buf);
        }
        for c in 0..self.mx {
            self.dy.apply(data, c, self.mx, buf);
        }
    }
}
