use super::{BallRegion, Grid, ScalarField};
use crate::error::{Error, Result};

/// Bound constant K in |D²ϱ| ≤ K/r² (spectral norm). The quintic profile peaks at
/// 10/√3 ≈ 5.774; no C² transition of width r gets below 4.
pub const QUINTIC_SECOND_DERIVATIVE_BOUND: f64 = 6.0;

/// Slope bound constant in |∇ϱ| ≤ 2/r; the quintic peaks at 15/8.
pub const GRADIENT_BOUND: f64 = 2.0;

fn smoothstep(t: f64) -> f64 {
    let t = t.clamp(0.0, 1.0);
    t * t * t * (10.0 + t * (-15.0 + 6.0 * t))
}

/// 1 on B_r, 0 outside B_{2r}, quintic in the distance on the annulus.
pub fn cutoff_profile(center: [f64; 2], r: f64, x: [f64; 2]) -> f64 {
    let d = ((x[0] - center[0]).powi(2) + (x[1] - center[1]).powi(2)).sqrt();
    1.0 - smoothstep((d - r) / r)
}

#[derive(Clone, Debug)]
pub struct CutoffField {
    pub nodes: ScalarField,
    pub region: BallRegion,
    /// max over cells of the forward-difference gradient norm, times r
    pub max_grad_scaled: f64,
    /// max over nodes of the spectral norm of the discrete Hessian, times r²
    pub max_hess_scaled: f64,
}

impl CutoffField {
    pub fn eval(&self, x: [f64; 2]) -> f64 {
        cutoff_profile(self.region.center, self.region.radius, x)
    }

    pub fn at_cell(&self, g: &Grid, i: usize, j: usize) -> f64 {
        self.eval(g.cell_center(i, j))
    }
}

/// Verifies χ_{B_r} ≤ ϱ ≤ χ_{B_2r} and the discrete derivative bounds; returns the scaled maxima.
pub fn check_bounds(nodes: &ScalarField, region: &BallRegion, g: &Grid) -> Result<(f64, f64)> {
    let outer = region.scaled(2.0);
    let (r, h) = (region.radius, g.h);
    for j in 0..g.ny {
        for i in 0..g.nx {
            let x = g.node(i, j);
            let v = nodes.get(i, j);
            let ok = (0.0..=1.0).contains(&v)
                && (!region.contains(x) || v == 1.0)
                && (outer.contains(x) || v == 0.0);
            if !ok {
                return Err(Error::BoundsViolated(format!("value {v} at node ({i},{j})")));
            }
        }
    }

    let mut max_grad: f64 = 0.0;
    for j in 0..g.ny - 1 {
        for i in 0..g.nx - 1 {
            let v = nodes.get(i, j);
            let gx = (nodes.get(i + 1, j) - v) / h;
            let gy = (nodes.get(i, j + 1) - v) / h;
            max_grad = max_grad.max(gx.hypot(gy));
        }
    }
    let mut max_hess: f64 = 0.0;
    for j in 0..g.ny - 2 {
        for i in 0..g.nx - 2 {
            let v = nodes.get(i, j);
            let a = (nodes.get(i + 2, j) - 2.0 * nodes.get(i + 1, j) + v) / (h * h);
            let d = (nodes.get(i, j + 2) - 2.0 * nodes.get(i, j + 1) + v) / (h * h);
            let b = (nodes.get(i + 1, j + 1) - nodes.get(i + 1, j) - nodes.get(i, j + 1) + v) / (h * h);
            let top = ((a + d) / 2.0).abs() + (((a - d) / 2.0).powi(2) + b * b).sqrt();
            max_hess = max_hess.max(top);
        }
    }
    let max_grad_scaled = max_grad * r;
    let max_hess_scaled = max_hess * r * r;
    if max_grad_scaled > GRADIENT_BOUND {
        return Err(Error::BoundsViolated(format!("|∇ϱ|·r = {max_grad_scaled} > {GRADIENT_BOUND}")));
    }
    if max_hess_scaled > QUINTIC_SECOND_DERIVATIVE_BOUND {
        return Err(Error::BoundsViolated(format!(
            "|D²ϱ|·r² = {max_hess_scaled} > {QUINTIC_SECOND_DERIVATIVE_BOUND}"
        )));
    }
    Ok((max_grad_scaled, max_hess_scaled))
}

pub fn build_cutoff(region: &BallRegion, g: &Grid) -> Result<CutoffField> {
    let outer = region.scaled(2.0);
    if !outer.inside(g) {
        return Err(Error::DomainTooSmall("B_2r is not inside the grid".into()));
    }
    let nodes = ScalarField::on_nodes(g, |x| cutoff_profile(region.center, region.radius, x));
    let (max_grad_scaled, max_hess_scaled) = check_bounds(&nodes, region, g)?;
    Ok(CutoffField { nodes, region: *region, max_grad_scaled, max_hess_scaled })
}
