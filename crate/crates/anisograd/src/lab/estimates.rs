use serde::Serialize;
use serde_json::json;

use super::{kernel_projection, EstimateReport, KernelProjection, SampledField};
use crate::error::{Error, Result};
use crate::grid::{BallRegion, CutoffField, MatrixField, ScalarField};
use crate::integrand::RegularizedIntegrand;
use crate::mat;
use crate::operator::{KernelBasis, PartMap};
use crate::orlicz::{exp_orlicz_norm, v_mu_map, w12_norm, Samples, EXP_CONVENTION};

/// Identifies the instance an estimate was evaluated on.
#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct Instance {
    pub operator: String,
    pub mu: Option<f64>,
    pub j: Option<u32>,
    pub r: f64,
    pub h: f64,
}

impl Instance {
    pub fn new(a: &PartMap, mu: Option<f64>, j: Option<u32>, region: &BallRegion, h: f64) -> Self {
        Instance { operator: a.label().to_string(), mu, j, r: region.radius, h }
    }
}

fn require_inside(field: &SampledField, region: &BallRegion) -> Result<()> {
    if region.inside(&field.grid()) {
        Ok(())
    } else {
        Err(Error::DomainTooSmall(format!("ball of radius {} does not fit in the grid", region.radius)))
    }
}

/// `|u − π|` at the nodes.
fn residual_magnitude(field: &SampledField, proj: &KernelProjection) -> ScalarField {
    let mut out = field.u.map(|_| 0.0);
    for j in 0..out.ny {
        for i in 0..out.nx {
            let p = proj.eval(field.u.position(i, j));
            let v = field.u.get(i, j);
            out.set(i, j, (v[0] - p[0]).hypot(v[1] - p[1]));
        }
    }
    out
}

fn integral(samples: &Samples) -> f64 {
    samples.values.iter().zip(&samples.weights).map(|(v, w)| v * w).sum()
}

fn average(samples: &Samples) -> f64 {
    integral(samples) / samples.measure()
}

/// `‖u − π_u‖_{exp L^β(B_r)} ≤ c ω₂ r ‖𝒜[Du]‖_{exp L^β(B_r)}`
pub fn poincare_check(
    a: &PartMap,
    field: &SampledField,
    region: &BallRegion,
    beta: f64,
    kb: &KernelBasis,
    budget: f64,
) -> Result<EstimateReport> {
    let proj = kernel_projection(&field.u, region, kb)?;
    let lhs = exp_orlicz_norm(&Samples::of(&residual_magnitude(field, &proj), region)?, beta)?;
    let w = field.apply(a);
    let omega2 = std::f64::consts::PI;
    let rhs = omega2 * region.radius * exp_orlicz_norm(&Samples::of(&w, region)?, beta)?;
    let inst = Instance::new(a, None, None, region, field.u.h);
    Ok(EstimateReport::new(
        "poincare",
        &inst,
        lhs,
        rhs,
        budget,
        json!({ "beta": beta, "young": EXP_CONVENTION, "projection": proj }),
    ))
}

/// `‖D(u − π_u)‖_{exp L^{β/(β+1)}(B_r)} ≤ c (1 + 1/r) ‖𝒜[Du]‖_{exp L^β(B_{2r})}`
pub fn korn_check(
    a: &PartMap,
    field: &SampledField,
    region: &BallRegion,
    beta: f64,
    kb: &KernelBasis,
    budget: f64,
) -> Result<EstimateReport> {
    let outer = region.scaled(2.0);
    require_inside(field, &outer)?;
    let proj = kernel_projection(&field.u, region, kb)?;
    let dres = field.du.map(|p| mat::sub(p, &proj.b_mat));
    let lhs = exp_orlicz_norm(&Samples::of(&dres, region)?, beta / (beta + 1.0))?;
    let w = field.apply(a);
    let rhs = (1.0 + 1.0 / region.radius) * exp_orlicz_norm(&Samples::of(&w, &outer)?, beta)?;
    let inst = Instance::new(a, None, None, region, field.u.h);
    Ok(EstimateReport::new(
        "korn",
        &inst,
        lhs,
        rhs,
        budget,
        json!({ "beta": beta, "lhs_exponent": beta / (beta + 1.0), "young": EXP_CONVENTION, "projection": proj }),
    ))
}

#[derive(Debug, Clone, Serialize)]
pub struct WeightedDetails {
    /// `Σ ϱ⁴ ⟨D²f_j(W)∂_kW, ∂_kW⟩ h²`
    pub middle: f64,
    pub cells_checked: usize,
    /// Cells where `λ·lhs > middle` beyond the slack.
    pub lower_bound_violations: usize,
    pub mass_term: f64,
    pub viscosity_term: f64,
    pub zero_order_term: f64,
    pub a_j: f64,
}

/// Weighted second-order bound with the cutoff ϱ of `region`:
/// `Σ ϱ⁴ (1+|W|²)^{−μ/2} |DW|² h² ≤ (c/r²)[∫|W| + (1/(A_j j²))∫(1+|W|²) + (1 + r²/j + r³/j)∫|u−π|/r]`,
/// integrals over `B_{2r}`, `W = 𝒜[Du]`.
pub fn weighted_second_order_check(
    a: &PartMap,
    field: &SampledField,
    fj: &RegularizedIntegrand,
    region: &BallRegion,
    rho: &CutoffField,
    kb: &KernelBasis,
    budget: f64,
) -> Result<(EstimateReport, WeightedDetails)> {
    let mu = fj.base.mu().ok_or_else(|| Error::Invalid("weighted estimate needs a mu-elliptic density".into()))?;
    let outer = region.scaled(2.0);
    require_inside(field, &outer)?;
    let g = field.grid();
    let w = field.apply(a);
    let h = w.h;
    let h2 = h * h;
    let lambda = fj.base.lambda();
    let mut lhs = 0.0;
    let mut middle = 0.0;
    let mut cells_checked = 0;
    let mut violations = 0;
    for j in 0..w.ny - 1 {
        for i in 0..w.nx - 1 {
            let r4 = rho.at_cell(&g, i, j).powi(4);
            if r4 == 0.0 {
                continue;
            }
            let p = w.get(i, j);
            let dx = mat::scale(1.0 / h, &mat::sub(&w.get(i + 1, j), &p));
            let dy = mat::scale(1.0 / h, &mat::sub(&w.get(i, j + 1), &p));
            let weight = (1.0 + mat::dot(&p, &p)).powf(-0.5 * mu);
            let l = r4 * weight * (mat::dot(&dx, &dx) + mat::dot(&dy, &dy)) * h2;
            let m = r4 * (fj.hess(&p, &dx) + fj.hess(&p, &dy)) * h2;
            cells_checked += 1;
            if lambda * l > m * (1.0 + 1e-10) + 1e-300 {
                violations += 1;
            }
            lhs += l;
            middle += m;
        }
    }
    let proj = kernel_projection(&field.u, &outer, kb)?;
    let res = Samples::of(&residual_magnitude(field, &proj), &outer)?;
    let ws = Samples::of(&w, &outer)?;
    let r = region.radius;
    let jf = f64::from(fj.j);
    let mass_term = integral(&ws);
    let viscosity_term = fj.eps() * ws.values.iter().zip(&ws.weights).map(|(v, wk)| (1.0 + v * v) * wk).sum::<f64>();
    let zero_order_term = (1.0 + r * r / jf + r * r * r / jf) * integral(&res) / r;
    let rhs = (mass_term + viscosity_term + zero_order_term) / (r * r);
    let details = WeightedDetails {
        middle,
        cells_checked,
        lower_bound_violations: violations,
        mass_term,
        viscosity_term,
        zero_order_term,
        a_j: fj.a_j,
    };
    let inst = Instance::new(a, Some(mu), Some(fj.j), region, h);
    let report = EstimateReport::new(
        "weighted_second_order",
        &inst,
        lhs,
        rhs,
        budget,
        serde_json::to_value(&details).expect("plain numbers"),
    );
    Ok((report, details))
}

#[derive(Debug, Clone, Serialize)]
pub struct PowerBound {
    /// `‖W‖_{exp L^{2−μ}(B_r)}`
    pub lhs: f64,
    /// `‖V_μ(W)‖_{exp L²(B_r)}^{2/(2−μ)}`
    pub rhs: f64,
    pub holds: bool,
}

pub fn power_bound(w: &MatrixField, region: &BallRegion, mu: f64) -> Result<PowerBound> {
    let v = v_mu_map(w, mu)?;
    let lhs = exp_orlicz_norm(&Samples::of(w, region)?, 2.0 - mu)?;
    let rhs = exp_orlicz_norm(&Samples::of(&v, region)?, 2.0)?.powf(2.0 / (2.0 - mu));
    Ok(PowerBound { lhs, rhs, holds: lhs <= rhs * (1.0 + 1e-9) })
}

#[derive(Debug, Clone, Serialize)]
pub struct ChainBound {
    /// `((2−μ)/2)²`
    pub constant: f64,
    pub pairs_checked: usize,
    /// max of `|ΔV|² / (c (1+d²)^{−μ/2} |ΔW|²)` over neighbour pairs, d the distance from 0
    /// to the segment joining the two values of W.
    pub max_ratio: f64,
    pub holds: bool,
}

fn segment_distance_sq(p: &mat::Mat2, q: &mat::Mat2) -> f64 {
    let d = mat::sub(q, p);
    let dd = mat::dot(&d, &d);
    let t = if dd == 0.0 { 0.0 } else { (-mat::dot(p, &d) / dd).clamp(0.0, 1.0) };
    let x = mat::axpy(p, t, &d);
    mat::dot(&x, &x)
}

/// Difference of `V_μ` between two matrices without cancellation.
fn v_mu_difference(p: &mat::Mat2, q: &mat::Mat2, mu: f64) -> f64 {
    let e = 0.25 * (2.0 - mu);
    let np = 1.0 + mat::dot(p, p);
    let delta = mat::dot(&mat::sub(q, p), &mat::add(q, p));
    np.powf(e) * (e * (delta / np).ln_1p()).exp_m1()
}

/// Discrete chain-rule bound for `V_μ(W)` on neighbouring cells inside `region`.
pub fn chain_bound(w: &MatrixField, region: &BallRegion, mu: f64) -> Result<ChainBound> {
    if !(mu > 1.0 && mu < 2.0) {
        return Err(Error::MuOutOfRange(mu));
    }
    let c = (0.5 * (2.0 - mu)).powi(2);
    let mut out = ChainBound { constant: c, pairs_checked: 0, max_ratio: 0.0, holds: true };
    for &(i, j) in &region.sites(w) {
        let p = w.get(i, j);
        for (ni, nj) in [(i + 1, j), (i, j + 1)] {
            if ni >= w.nx || nj >= w.ny || !region.contains(w.position(ni, nj)) {
                continue;
            }
            let q = w.get(ni, nj);
            let dw = mat::sub(&q, &p);
            let dw2 = mat::dot(&dw, &dw);
            out.pairs_checked += 1;
            if dw2 == 0.0 {
                continue;
            }
            let dv = v_mu_difference(&p, &q, mu);
            let bound = c * (1.0 + segment_distance_sq(&p, &q)).powf(-0.5 * mu) * dw2;
            out.max_ratio = out.max_ratio.max(dv * dv / bound);
        }
    }
    if out.pairs_checked == 0 {
        return Err(Error::EmptyRegion);
    }
    out.holds = out.max_ratio <= 1.0 + 1e-10;
    Ok(out)
}

/// `‖D(u−π)‖_{exp L^{(2−μ)/(3−μ)}(B_r)} ≤ c {(1+1/r²)[(1+1/r²)|𝔸u|(B_{2r}) + ⨍_{B_{2r}}|u−π|/r]^{1/(2−μ)} + ⨍_{B_r}|u−π|/r}`
/// with `π` the kernel projection on `B_{2r}`. Also evaluates the power and chain bounds and
/// `‖V_μ(𝒜[Du])‖_{W^{1,2}(B_r)}`.
pub fn main_estimate_check(
    a: &PartMap,
    field: &SampledField,
    region: &BallRegion,
    mu: f64,
    j: Option<u32>,
    kb: &KernelBasis,
    budget: f64,
) -> Result<(EstimateReport, PowerBound, ChainBound)> {
    if !(mu > 1.0 && mu < 2.0) {
        return Err(Error::MuOutOfRange(mu));
    }
    let outer = region.scaled(2.0);
    require_inside(field, &outer)?;
    let exponent = (2.0 - mu) / (3.0 - mu);
    let proj = kernel_projection(&field.u, &outer, kb)?;
    let dres = field.du.map(|p| mat::sub(p, &proj.b_mat));
    let lhs = exp_orlicz_norm(&Samples::of(&dres, region)?, exponent)?;

    let w = field.apply(a);
    let r = region.radius;
    let variation = integral(&Samples::of(&w, &outer)?);
    let res = residual_magnitude(field, &proj);
    let avg_outer = average(&Samples::of(&res, &outer)?);
    let avg_inner = average(&Samples::of(&res, region)?);
    let k = 1.0 + 1.0 / (r * r);
    let rhs = k * (k * variation + avg_outer / r).powf(1.0 / (2.0 - mu)) + avg_inner / r;

    let power = power_bound(&w, region, mu)?;
    let chain = chain_bound(&w, region, mu)?;
    let v_w12 = w12_norm(&v_mu_map(&w, mu)?, region)?;
    let inst = Instance::new(a, Some(mu), j, region, field.u.h);
    let report = EstimateReport::new(
        "main_exp_estimate",
        &inst,
        lhs,
        rhs,
        budget,
        json!({
            "exponent": exponent,
            "young": EXP_CONVENTION,
            "a_variation": variation,
            "avg_outer": avg_outer,
            "avg_inner": avg_inner,
            "v_mu_w12": v_w12,
            "power_bound": power,
            "chain_bound": chain,
        }),
    );
    Ok((report, power, chain))
}
