//! Luxemburg norms of sampled fields.
//!
//! The exponential scale uses `exp(t^β) − 1`, which vanishes at 0 and generates the
//! same space as `exp(t^β)`.

use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::grid::{BallRegion, Field, MatrixField, ScalarField, Value};
use crate::mat;

pub const EXP_CONVENTION: &str = "exp(t^beta) - 1";

#[derive(Clone)]
pub enum YoungFunction {
    Power(f64),
    Exp(f64),
    Custom(String, Arc<dyn Fn(f64) -> f64 + Send + Sync>),
}

impl fmt::Debug for YoungFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.descriptor())
    }
}

impl YoungFunction {
    pub fn eval(&self, t: f64) -> f64 {
        match self {
            YoungFunction::Power(p) => t.powf(*p),
            YoungFunction::Exp(beta) => {
                let e = t.powf(*beta);
                if e > 700.0 {
                    f64::INFINITY
                } else {
                    e.exp_m1()
                }
            }
            YoungFunction::Custom(_, phi) => phi(t),
        }
    }

    pub fn descriptor(&self) -> String {
        match self {
            YoungFunction::Power(p) => format!("t^{p}"),
            YoungFunction::Exp(beta) => EXP_CONVENTION.replace("beta", &beta.to_string()),
            YoungFunction::Custom(name, _) => name.clone(),
        }
    }
}

#[derive(Debug, Clone, Copy, Serialize, PartialEq)]
pub struct LuxemburgResult {
    pub value: f64,
    pub iterations: usize,
    /// `|∫Φ(|u|/λ) − 1|` at the returned λ.
    pub residual: f64,
}

/// Magnitudes and cell areas of the sites of `field` inside `region`.
#[derive(Debug, Clone, Default)]
pub struct Samples {
    pub values: Vec<f64>,
    pub weights: Vec<f64>,
}

impl Samples {
    pub fn of<T: Value>(field: &Field<T>, region: &BallRegion) -> Result<Self> {
        let sites = region.sites(field);
        if sites.is_empty() {
            return Err(Error::EmptyRegion);
        }
        let w = field.h * field.h;
        Ok(Samples {
            values: sites.iter().map(|&(i, j)| field.get(i, j).norm()).collect(),
            weights: vec![w; sites.len()],
        })
    }

    /// All sites of the field.
    pub fn all<T: Value>(field: &Field<T>) -> Self {
        let w = field.h * field.h;
        Samples { values: field.values.iter().map(Value::norm).collect(), weights: vec![w; field.values.len()] }
    }

    pub fn measure(&self) -> f64 {
        self.weights.iter().sum()
    }
}

fn modular(u: &[f64], w: &[f64], phi: &YoungFunction, lambda: f64) -> f64 {
    u.iter().zip(w).map(|(&x, &wk)| if x == 0.0 { 0.0 } else { wk * phi.eval(x / lambda) }).sum()
}

/// `inf{λ > 0 : Σ w Φ(|u|/λ) ≤ 1}` by bisection after bracketing by doubling.
pub fn luxemburg_norm(u: &[f64], weights: &[f64], phi: &YoungFunction) -> Result<LuxemburgResult> {
    if u.len() != weights.len() {
        return Err(Error::Invalid("samples and weights differ in length".into()));
    }
    if u.iter().chain(weights).any(|x| !x.is_finite()) {
        return Err(Error::Invalid("non-finite samples".into()));
    }
    let scale = u.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    if scale == 0.0 {
        return Ok(LuxemburgResult { value: 0.0, iterations: 0, residual: 0.0 });
    }
    let u: Vec<f64> = u.iter().map(|x| x.abs()).collect();
    let f = |l: f64| modular(&u, weights, phi, l) - 1.0;
    let (mut lo, mut hi) = (scale, scale);
    let mut iterations = 0;
    while f(hi) > 0.0 {
        hi *= 2.0;
        iterations += 1;
        if !hi.is_finite() {
            return Err(Error::Invalid("Luxemburg bracket overflow".into()));
        }
    }
    while f(lo) <= 0.0 {
        lo *= 0.5;
        iterations += 1;
        if lo < f64::MIN_POSITIVE {
            return Err(Error::Invalid("Luxemburg bracket underflow".into()));
        }
    }
    // Invariant: f(lo) > 0 ≥ f(hi).
    let mut best = (hi, f(hi).abs());
    loop {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        iterations += 1;
        let r = f(mid);
        if r.abs() < best.1 {
            best = (mid, r.abs());
        }
        if r > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if best.1 <= 1e-11 {
            break;
        }
    }
    Ok(LuxemburgResult { value: best.0, iterations, residual: best.1 })
}

/// Norm in exp L^β with Young function `exp(t^β) − 1`.
pub fn exp_orlicz_norm(samples: &Samples, beta: f64) -> Result<f64> {
    if !(beta > 0.0) {
        return Err(Error::Invalid(format!("beta must be positive, got {beta}")));
    }
    Ok(luxemburg_norm(&samples.values, &samples.weights, &YoungFunction::Exp(beta))?.value)
}

/// `(1+|w|²)^{(2−μ)/4}` cellwise.
pub fn v_mu_map(w: &MatrixField, mu: f64) -> Result<ScalarField> {
    if !(mu > 1.0 && mu < 2.0) {
        return Err(Error::MuOutOfRange(mu));
    }
    let e = 0.25 * (2.0 - mu);
    Ok(w.map(|p| (1.0 + mat::dot(p, p)).powf(e)))
}

/// Discrete W^{1,2} norm over the sites in `region`; difference terms only use pairs of
/// neighbouring sites that both lie in the region.
pub fn w12_norm(s: &ScalarField, region: &BallRegion) -> Result<f64> {
    let sites = region.sites(s);
    if sites.is_empty() {
        return Err(Error::EmptyRegion);
    }
    let h2 = s.h * s.h;
    let inside = |i: usize, j: usize| i < s.nx && j < s.ny && region.contains(s.position(i, j));
    let mut total = 0.0;
    for &(i, j) in &sites {
        let v = s.get(i, j);
        total += v * v * h2;
        if inside(i + 1, j) {
            total += (s.get(i + 1, j) - v).powi(2);
        }
        if inside(i, j + 1) {
            total += (s.get(i, j + 1) - v).powi(2);
        }
    }
    Ok(total.sqrt())
}
