//! Both sides of the regularity estimates, evaluated on discrete fields.

mod estimates;
mod ornstein;
mod projection;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::Serialize;
use serde_json::Value as Json;

use crate::grid::ops::gradient;
use crate::grid::{Grid, MatrixField, VectorField};
use crate::mat;
use crate::operator::PartMap;

pub use estimates::{
    chain_bound, korn_check, main_estimate_check, poincare_check, power_bound, weighted_second_order_check,
    ChainBound, Instance, PowerBound, WeightedDetails,
};
pub use ornstein::{conformal_power, ornstein_probe, probe_field, OrnsteinRow, OrnsteinTable};
pub use projection::{kernel_projection, KernelProjection};

/// Quantities at or below this level count as zero when deciding pass/flag.
pub const ZERO_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct EstimateReport {
    pub name: String,
    pub operator: String,
    pub mu: Option<f64>,
    pub j: Option<u32>,
    pub r: f64,
    pub h: f64,
    pub lhs: f64,
    pub rhs: f64,
    /// `lhs/rhs`; 0 when lhs vanishes, infinite when only rhs vanishes.
    pub ratio: f64,
    pub budget: f64,
    pub pass: bool,
    /// Inequality failure: rhs vanishes while lhs does not.
    pub flagged: bool,
    pub details: Json,
}

impl EstimateReport {
    pub fn new(name: &str, inst: &Instance, lhs: f64, rhs: f64, budget: f64, details: Json) -> Self {
        let (ratio, pass, flagged) = if lhs <= ZERO_TOL {
            (0.0, true, false)
        } else if rhs <= ZERO_TOL {
            (f64::INFINITY, false, true)
        } else {
            let q = lhs / rhs;
            (q, q <= budget, false)
        };
        EstimateReport {
            name: name.into(),
            operator: inst.operator.clone(),
            mu: inst.mu,
            j: inst.j,
            r: inst.r,
            h: inst.h,
            lhs,
            rhs,
            ratio,
            budget,
            pass,
            flagged,
            details,
        }
    }
}

/// Node values together with a full gradient on cells.
#[derive(Debug, Clone)]
pub struct SampledField {
    pub u: VectorField,
    pub du: MatrixField,
}

impl SampledField {
    /// Forward-difference gradient of the node values.
    pub fn discrete(u: VectorField) -> Self {
        let du = gradient(&u);
        SampledField { u, du }
    }

    /// Node values of `u` and the exact gradient `du` at cell centres.
    pub fn analytic(g: &Grid, u: impl Fn([f64; 2]) -> [f64; 2], du: impl Fn([f64; 2]) -> mat::Mat2) -> Self {
        SampledField { u: VectorField::on_nodes(g, u), du: MatrixField::on_cells(g, du) }
    }

    pub fn grid(&self) -> Grid {
        self.u.grid()
    }

    pub fn apply(&self, a: &PartMap) -> MatrixField {
        let m = a.matrix_f64();
        self.du.map(|p| mat::mul_vec(m, p))
    }

    /// Adds `x ↦ Bx + b` to the field.
    pub fn shifted(&self, b_mat: &mat::Mat2, b_vec: [f64; 2]) -> Self {
        let mut out = self.clone();
        for j in 0..out.u.ny {
            for i in 0..out.u.nx {
                let x = out.u.position(i, j);
                let v = out.u.get(i, j);
                out.u.set(i, j, [v[0] + b_mat[0] * x[0] + b_mat[1] * x[1] + b_vec[0], v[1] + b_mat[2] * x[0] + b_mat[3] * x[1] + b_vec[1]]);
            }
        }
        out.du = out.du.map(|p| mat::add(p, b_mat));
        out
    }
}

/// Sum of four random plane waves per component with integer wave vectors in `[−3, 3]²`,
/// sampled with its exact gradient.
pub fn random_smooth_field(g: &Grid, seed: u64) -> SampledField {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut modes = Vec::new();
    for comp in 0..2 {
        for _ in 0..4 {
            let k = loop {
                let k = [rng.gen_range(-3i32..=3), rng.gen_range(-3i32..=3)];
                if k != [0, 0] {
                    break [f64::from(k[0]), f64::from(k[1])];
                }
            };
            let c: f64 = rng.sample(StandardNormal);
            let phase = rng.gen::<f64>() * std::f64::consts::TAU;
            modes.push((comp, k, c, phase));
        }
    }
    let arg = |k: [f64; 2], phase: f64, x: [f64; 2]| std::f64::consts::PI * (k[0] * x[0] + k[1] * x[1]) + phase;
    SampledField::analytic(
        g,
        |x| {
            let mut u = [0.0; 2];
            for &(comp, k, c, phase) in &modes {
                u[comp] += c * arg(k, phase, x).sin();
            }
            u
        },
        |x| {
            let mut d = [0.0; 4];
            for &(comp, k, c, phase) in &modes {
                let s = c * std::f64::consts::PI * arg(k, phase, x).cos();
                d[2 * comp] += s * k[0];
                d[2 * comp + 1] += s * k[1];
            }
            d
        },
    )
}
