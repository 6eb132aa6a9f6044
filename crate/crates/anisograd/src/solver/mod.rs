//! Exact minimisation of the discrete regularised energy `Σ_cells f_j(𝒜[Dv]) h²` over
//! node fields with fixed boundary values.

mod dst;
mod second;
mod sweep;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::grid::ops::{apply_a, scatter_adjoint};
use crate::grid::{Grid, MatrixField, VectorField};
use crate::integrand::RegularizedIntegrand;
use crate::mat::{self, Mat4};
use crate::operator::PartMap;

pub use dst::LaplaceSolver;
pub use second::second_derivative_field;
pub use sweep::{viscosity_sweep, SweepEntry, SweepReport};

#[derive(Debug, Clone)]
pub struct DirichletProblem {
    pub a: PartMap,
    pub fj: RegularizedIntegrand,
    /// Only the boundary nodes are used.
    pub u0: VectorField,
    /// Field the energy gap is measured against; defaults to the initial guess.
    pub reference: Option<VectorField>,
}

impl DirichletProblem {
    pub fn new(a: PartMap, fj: RegularizedIntegrand, u0: VectorField) -> Result<Self> {
        if u0.nx < 3 || u0.ny < 3 {
            return Err(Error::DomainTooSmall(format!("{}x{} nodes", u0.nx, u0.ny)));
        }
        if !u0.is_finite() {
            return Err(Error::NonFiniteEnergy);
        }
        Ok(DirichletProblem { a, fj, u0, reference: None })
    }

    pub fn with_reference(mut self, reference: VectorField) -> Self {
        self.reference = Some(reference);
        self
    }

    pub fn grid(&self) -> Grid {
        self.u0.grid()
    }

    /// `(Σ f_j h², 4 ε_mach Σ |f_j| h²)`
    pub fn energy(&self, v: &VectorField) -> (f64, f64) {
        let w = apply_a(&self.a, v);
        let h2 = v.h * v.h;
        let vals: Vec<f64> = w.values.par_iter().map(|p| self.fj.eval(p)).collect();
        let e: f64 = vals.iter().sum::<f64>() * h2;
        let s: f64 = vals.iter().map(|x| x.abs()).sum::<f64>() * h2;
        (e, 4.0 * f64::EPSILON * s)
    }
}

#[derive(Debug, Clone, Default, Serialize, PartialEq)]
pub struct Diagnostics {
    /// `Σ |𝒜[Du]| h²`
    pub mass_a: f64,
    /// `(1/(2A_j j²)) Σ (1+|𝒜[Du]|²) h²`
    pub visc_mass: f64,
    /// `Σ f(𝒜[Du]) h²` with the unregularised density.
    pub base_energy: f64,
    /// Regularised energy of the reference minus that of the solution.
    pub energy_gap_vs_reference: f64,
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct IterationLog {
    pub energy: f64,
    pub el_residual: f64,
    pub cg_iterations: usize,
    pub step: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct SolveReport {
    #[serde(skip)]
    pub u: VectorField,
    pub energy: f64,
    pub el_residual: f64,
    pub iterations: usize,
    pub converged: bool,
    pub j: u32,
    pub a_j: f64,
    pub tol: f64,
    pub diagnostics: Diagnostics,
    pub history: Vec<IterationLog>,
}

#[derive(Debug, Clone, Copy)]
pub struct SolveOptions {
    pub tol: f64,
    pub max_iter: usize,
    pub max_cg_iter: usize,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions { tol: 1e-8, max_iter: 100, max_cg_iter: 4000 }
    }
}

/// Transfinite (Coons) interpolant of the boundary values of `u0`.
pub fn coons_interpolant(u0: &VectorField) -> VectorField {
    let (nx, ny) = (u0.nx, u0.ny);
    let mut out = u0.clone();
    let c00 = u0.get(0, 0);
    let c10 = u0.get(nx - 1, 0);
    let c01 = u0.get(0, ny - 1);
    let c11 = u0.get(nx - 1, ny - 1);
    for j in 1..ny - 1 {
        let t = j as f64 / (ny - 1) as f64;
        for i in 1..nx - 1 {
            let s = i as f64 / (nx - 1) as f64;
            let (w, e, so, no) = (u0.get(0, j), u0.get(nx - 1, j), u0.get(i, 0), u0.get(i, ny - 1));
            let v = std::array::from_fn(|k| {
                (1.0 - s) * w[k] + s * e[k] + (1.0 - t) * so[k] + t * no[k]
                    - ((1.0 - s) * (1.0 - t) * c00[k] + s * (1.0 - t) * c10[k] + (1.0 - s) * t * c01[k] + s * t * c11[k])
            });
            out.set(i, j, v);
        }
    }
    out
}

fn is_interior(nx: usize, ny: usize, k: usize) -> bool {
    let (i, j) = (k % nx, k / nx);
    i > 0 && j > 0 && i < nx - 1 && j < ny - 1
}

/// `adjoint_A(Df_j(𝒜[Dv]))` at all nodes.
fn adjoint_stress(p: &DirichletProblem, v: &VectorField) -> VectorField {
    let w = apply_a(&p.a, v);
    let sigma = w.map(|q| p.fj.grad(q));
    let mut out = v.map(|_| [0.0; 2]);
    scatter_adjoint(p.a.matrix_f64(), &sigma, &mut out);
    out
}

/// Sup over interior nodes of `|adjoint_A(σ_j)|` with `σ_j = Df_j(𝒜[Du])`.
pub fn el_residual(u: &VectorField, p: &DirichletProblem) -> f64 {
    sup_interior(&adjoint_stress(p, u))
}

fn gradient_norm(p: &DirichletProblem, v: &VectorField, h2: f64) -> f64 {
    let adj = adjoint_stress(p, v);
    let (nx, ny) = (v.nx, v.ny);
    let s: f64 = adj
        .values
        .iter()
        .enumerate()
        .filter(|(k, _)| is_interior(nx, ny, *k))
        .map(|(_, x)| x[0] * x[0] + x[1] * x[1])
        .sum();
    h2 * s.sqrt()
}

fn sup_interior(f: &VectorField) -> f64 {
    let (nx, ny) = (f.nx, f.ny);
    f.values
        .iter()
        .enumerate()
        .filter(|(k, _)| is_interior(nx, ny, *k))
        .map(|(_, v)| v[0].hypot(v[1]))
        .fold(0.0, f64::max)
}

type Nodes = Vec<[f64; 2]>;

fn dot(a: &Nodes, b: &Nodes) -> f64 {
    a.iter().zip(b).map(|(x, y)| x[0] * y[0] + x[1] * y[1]).sum()
}

/// Cellwise `mᵀ D²f_j m` acting on raw (unscaled) node differences.
struct Hessian {
    nx: usize,
    ny: usize,
    cells_x: usize,
    blocks: Vec<Mat4>,
}

impl Hessian {
    fn assemble(p: &DirichletProblem, w: &MatrixField, nx: usize, ny: usize) -> Self {
        let m = p.a.matrix_f64();
        let mt = mat::transpose(m);
        let blocks = w
            .values
            .par_iter()
            .map(|q| mat::mul(&mt, &mat::mul(&p.fj.hess_matrix(q), m)))
            .collect();
        Hessian { nx, ny, cells_x: w.nx, blocks }
    }

    fn apply(&self, x: &Nodes, out: &mut Nodes) {
        let nx = self.nx;
        out.iter_mut().for_each(|v| *v = [0.0; 2]);
        for (k, b) in self.blocks.iter().enumerate() {
            let c = (k / self.cells_x) * nx + k % self.cells_x;
            let (xc, xe, xn) = (x[c], x[c + 1], x[c + nx]);
            let d = [xe[0] - xc[0], xn[0] - xc[0], xe[1] - xc[1], xn[1] - xc[1]];
            let y = mat::mul_vec(b, &d);
            out[c + 1][0] += y[0];
            out[c + nx][0] += y[1];
            out[c][0] -= y[0] + y[1];
            out[c + 1][1] += y[2];
            out[c + nx][1] += y[3];
            out[c][1] -= y[2] + y[3];
        }
        for (k, v) in out.iter_mut().enumerate() {
            if !is_interior(nx, self.ny, k) {
                *v = [0.0; 2];
            }
        }
    }
}

fn precondition(lap: &LaplaceSolver, nx: usize, ny: usize, r: &Nodes, z: &mut Nodes) {
    let mx = nx - 2;
    let mut buf = vec![0.0; lap.interior_len()];
    for comp in 0..2 {
        for j in 1..ny - 1 {
            for i in 1..nx - 1 {
                buf[(j - 1) * mx + i - 1] = r[j * nx + i][comp];
            }
        }
        lap.solve(&mut buf);
        for j in 1..ny - 1 {
            for i in 1..nx - 1 {
                z[j * nx + i][comp] = buf[(j - 1) * mx + i - 1];
            }
        }
    }
}

/// Preconditioned CG for `H d = b` until `|r| ≤ eta |b|`; returns the iteration count.
fn pcg(h: &Hessian, lap: &LaplaceSolver, b: &Nodes, eta: f64, max_iter: usize, d: &mut Nodes) -> usize {
    let n = b.len();
    let (nx, ny) = (h.nx, h.ny);
    d.iter_mut().for_each(|v| *v = [0.0; 2]);
    let mut r = b.clone();
    let mut z = vec![[0.0; 2]; n];
    let mut q = vec![[0.0; 2]; n];
    precondition(lap, nx, ny, &r, &mut z);
    let mut p = z.clone();
    let mut rz = dot(&r, &z);
    let target = eta * dot(b, b).sqrt();
    for it in 0..max_iter {
        if dot(&r, &r).sqrt() <= target {
            return it;
        }
        h.apply(&p, &mut q);
        let pq = dot(&p, &q);
        if !(pq > 0.0) {
            return it;
        }
        let alpha = rz / pq;
        for k in 0..n {
            for c in 0..2 {
                d[k][c] += alpha * p[k][c];
                r[k][c] -= alpha * q[k][c];
            }
        }
        precondition(lap, nx, ny, &r, &mut z);
        let rz_new = dot(&r, &z);
        let beta = rz_new / rz;
        rz = rz_new;
        for k in 0..n {
            for c in 0..2 {
                p[k][c] = z[k][c] + beta * p[k][c];
            }
        }
    }
    max_iter
}

fn diagnostics(p: &DirichletProblem, u: &VectorField, e_u: f64, e_ref: f64) -> Diagnostics {
    let w = apply_a(&p.a, u);
    let h2 = u.h * u.h;
    let eps = p.fj.eps();
    let mut d = Diagnostics { energy_gap_vs_reference: e_ref - e_u, ..Default::default() };
    for q in &w.values {
        let n2 = mat::dot(q, q);
        d.mass_a += n2.sqrt() * h2;
        d.visc_mass += 0.5 * eps * (1.0 + n2) * h2;
        d.base_energy += p.fj.base.eval(q) * h2;
    }
    d
}

pub fn minimize(p: &DirichletProblem, opts: &SolveOptions) -> Result<SolveReport> {
    minimize_from(p, None, opts)
}

/// Damped Newton from `start` (boundary values are overwritten by `u0`), or from the
/// Coons interpolant of the boundary data.
pub fn minimize_from(p: &DirichletProblem, start: Option<&VectorField>, opts: &SolveOptions) -> Result<SolveReport> {
    if !(opts.tol > 0.0) {
        return Err(Error::Invalid("tolerance must be positive".into()));
    }
    let g = p.grid();
    let (nx, ny) = (g.nx, g.ny);
    let mut v = coons_interpolant(&p.u0);
    if let Some(s) = start {
        if (s.nx, s.ny) != (nx, ny) || !s.is_finite() {
            return Err(Error::Invalid("start field does not match the grid".into()));
        }
        for k in 0..v.values.len() {
            if is_interior(nx, ny, k) {
                v.values[k] = s.values[k];
            }
        }
    }
    let (mut e, mut slack) = p.energy(&v);
    if !e.is_finite() {
        return Err(Error::NonFiniteEnergy);
    }
    let e_ref = match &p.reference {
        Some(r) => p.energy(r).0,
        None => e,
    };
    let lap = LaplaceSolver::new(nx, ny);
    let h2 = g.h * g.h;
    let mut history = Vec::new();
    let mut d = vec![[0.0; 2]; nx * ny];
    let mut res0 = None;
    let mut converged = false;
    let mut iterations = 0;
    loop {
        let adj = adjoint_stress(p, &v);
        let res = sup_interior(&adj);
        let r0 = *res0.get_or_insert(res);
        log::debug!("newton {iterations}: energy {e:.16e} residual {res:.3e}");
        if res <= opts.tol {
            converged = true;
            history.push(IterationLog { energy: e, el_residual: res, cg_iterations: 0, step: 0.0 });
            break;
        }
        if iterations >= opts.max_iter {
            history.push(IterationLog { energy: e, el_residual: res, cg_iterations: 0, step: 0.0 });
            break;
        }
        iterations += 1;
        // Newton system H d = −∇E with ∇E = h² adjoint_A(σ).
        let b: Nodes = adj
            .values
            .iter()
            .enumerate()
            .map(|(k, x)| if is_interior(nx, ny, k) { [-h2 * x[0], -h2 * x[1]] } else { [0.0; 2] })
            .collect();
        let w = apply_a(&p.a, &v);
        let hess = Hessian::assemble(p, &w, nx, ny);
        let eta = (res / r0).sqrt().min(0.01).max(1e-13);
        let cg = pcg(&hess, &lap, &b, eta, opts.max_cg_iter, &mut d);
        let mut slope = -dot(&b, &d);
        if !(slope < 0.0) {
            precondition(&lap, nx, ny, &b, &mut d);
            slope = -dot(&b, &d);
        }
        // Below the rounding level of the energy sum, decrease of |∇E| decides instead.
        let resolved = -slope > 100.0 * slack;
        let gnorm = dot(&b, &b).sqrt();
        let mut alpha = 1.0;
        let mut accepted = None;
        for _ in 0..60 {
            let mut trial = v.clone();
            for (t, dk) in trial.values.iter_mut().zip(&d) {
                t[0] += alpha * dk[0];
                t[1] += alpha * dk[1];
            }
            let (et, st) = p.energy(&trial);
            let ok = et.is_finite()
                && if resolved {
                    et <= e + 1e-4 * alpha * slope + slack
                } else {
                    et <= e + 100.0 * slack && gradient_norm(p, &trial, h2) <= (1.0 - 1e-4 * alpha) * gnorm
                };
            if ok {
                accepted = Some((trial, et, st));
                break;
            }
            alpha *= 0.5;
        }
        history.push(IterationLog { energy: e, el_residual: res, cg_iterations: cg, step: alpha });
        match accepted {
            Some((trial, et, st)) => {
                v = trial;
                e = et;
                slack = st;
            }
            None => {
                log::warn!("line search stalled at residual {res:.3e}");
                break;
            }
        }
    }
    let el = history.last().map_or(f64::NAN, |h| h.el_residual);
    let report = SolveReport {
        diagnostics: diagnostics(p, &v, e, e_ref),
        u: v,
        energy: e,
        el_residual: el,
        iterations,
        converged,
        j: p.fj.j,
        a_j: p.fj.a_j,
        tol: opts.tol,
        history,
    };
    if converged {
        Ok(report)
    } else {
        Err(Error::MaxIterExceeded(Box::new(report)))
    }
}
