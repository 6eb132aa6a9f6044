use serde::Serialize;

use super::{minimize_from, DirichletProblem, SolveOptions, SolveReport};
use crate::error::{Error, Result};
use crate::grid::ops::apply_a;
use crate::grid::VectorField;
use crate::integrand::{regularize, Integrand};
use crate::operator::PartMap;

#[derive(Debug, Clone, Serialize)]
pub struct SweepEntry {
    pub report: SolveReport,
    /// Base energy of this step's reference field.
    pub e_ref: f64,
    /// `(E_ref + 2/j²)/c₁`
    pub mass_bound: f64,
    /// `2/j²`
    pub visc_bound: f64,
    pub mass_ok: bool,
    pub visc_ok: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepReport {
    pub entries: Vec<SweepEntry>,
    pub all_ok: bool,
}

/// Solves for each `j` in ascending order. Step `j` uses the previous solution (first: `reference`)
/// both to define `A_j` and as the warm start.
pub fn viscosity_sweep(
    a: &PartMap,
    base: &Integrand,
    u0: &VectorField,
    j_list: &[u32],
    reference: &VectorField,
    opts: &SolveOptions,
) -> Result<SweepReport> {
    let mut js = j_list.to_vec();
    js.sort_unstable();
    js.dedup();
    if js.first() == Some(&0) {
        return Err(Error::Invalid("j must be positive".into()));
    }
    let h2 = u0.h * u0.h;
    let mut current = reference.clone();
    let mut entries = Vec::with_capacity(js.len());
    for j in js {
        let w = apply_a(a, &current);
        let e_ref: f64 = w.values.iter().map(|p| base.eval(p)).sum::<f64>() * h2;
        let fj = regularize(base, j, &w)?;
        let p = DirichletProblem::new(a.clone(), fj, u0.clone())?.with_reference(current.clone());
        let report = minimize_from(&p, Some(&current), opts)?;
        let visc_bound = 2.0 / f64::from(j * j);
        let mass_bound = (e_ref + visc_bound) / base.c1();
        let d = &report.diagnostics;
        let entry = SweepEntry {
            e_ref,
            mass_bound,
            visc_bound,
            mass_ok: d.mass_a <= mass_bound,
            visc_ok: d.visc_mass <= visc_bound,
            report,
        };
        if !(entry.mass_ok && entry.visc_ok) {
            log::warn!("sweep bound violated at j = {j}");
        }
        current = entry.report.u.clone();
        entries.push(entry);
    }
    let all_ok = entries.iter().all(|e| e.mass_ok && e.visc_ok);
    Ok(SweepReport { entries, all_ok })
}
