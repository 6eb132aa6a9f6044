//! Batch commands: a parsed config in, report files and an exit code out.

pub mod config;

use std::collections::BTreeMap;
use std::io::Write;
use std::path::{Path, PathBuf};

use log::{info, warn};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value as Json};

pub use config::ExperimentConfig;
use config::{CampaignConfig, IntegrandConfig, KornProbeConfig};

use crate::error::{Error, Result};
use crate::grid::{apply_a, build_cutoff, fmt_f64, write_csv, BallRegion, Grid, VectorField};
use crate::integrand::{regularize, verify_mu_ellipticity, Integrand, RegularizedIntegrand};
use crate::lab::{
    korn_check, main_estimate_check, ornstein_probe, poincare_check, probe_field, random_smooth_field,
    weighted_second_order_check, EstimateReport, Instance, OrnsteinTable, SampledField,
};
use crate::operator::{
    build_decomposition, build_second_order_factorization, classify_ellipticity, kernel_basis, PartMap,
};
use crate::orlicz::EXP_CONVENTION;
use crate::solver::{coons_interpolant, minimize_from, viscosity_sweep, DirichletProblem, SolveOptions, SweepReport};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 1;
pub const EXIT_NOT_CONVERGED: i32 = 2;
pub const EXIT_INEQUALITY: i32 = 3;

pub const CSV_HEADER: &str = "name,operator,mu,j,r,h,lhs,rhs,ratio,pass";

/// How the upper ellipticity constant is normalised in every constants record.
pub const UPPER_WEIGHT_NOTE: &str =
    "Lambda bounds D2f(P) against (1+|P|^2)^(-1/2); the quadratic probe has unbounded Lambda for that weight";

/// Exit code for an error that escaped a command.
pub fn exit_code_for(err: &Error) -> i32 {
    match err {
        Error::MaxIterExceeded(_) | Error::NotConverged(_) | Error::NonFiniteEnergy => EXIT_NOT_CONVERGED,
        _ => EXIT_CONFIG,
    }
}

/// Everything a command needs besides its own config section.
#[derive(Debug, Clone)]
pub struct RunContext {
    pub config: ExperimentConfig,
    /// Config file contents, echoed verbatim into the JSON outputs.
    pub config_text: String,
    pub output_dir: PathBuf,
    pub jobs: usize,
}

impl RunContext {
    pub fn new(config: ExperimentConfig, config_text: String, output_dir: PathBuf, jobs: usize) -> Self {
        RunContext { config, config_text, output_dir, jobs: jobs.max(1) }
    }

    fn path(&self, name: &str) -> PathBuf {
        self.output_dir.join(name)
    }

    fn pool(&self) -> Result<rayon::ThreadPool> {
        rayon::ThreadPoolBuilder::new()
            .num_threads(self.jobs)
            .build()
            .map_err(|e| Error::Invalid(e.to_string()))
    }
}

#[derive(Debug, Clone)]
pub struct Outcome {
    pub exit_code: i32,
    pub files: Vec<PathBuf>,
    pub summary: String,
}

/// Writes through a sibling temporary file and renames it into place.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir)?;
    }
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp");
    let tmp = PathBuf::from(tmp);
    {
        let mut f = std::fs::File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_all()?;
    }
    std::fs::rename(&tmp, path)?;
    Ok(())
}

fn write_json(path: &Path, value: &Json) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| Error::Invalid(e.to_string()))?;
    text.push('\n');
    write_atomic(path, text.as_bytes())
}

fn write_field(path: &Path, u: &VectorField) -> Result<()> {
    let mut buf = Vec::new();
    write_csv(u, &mut buf)?;
    write_atomic(path, &buf)
}

fn to_json<T: Serialize>(v: &T) -> Json {
    serde_json::to_value(v).expect("report serialises")
}

/// Report rows as CSV, preceded by `#` provenance comment lines.
pub fn estimate_csv(reports: &[EstimateReport], config_hash: &str) -> String {
    let mut out = format!("# config_sha256={config_hash}\n# young={EXP_CONVENTION}\n{CSV_HEADER}\n");
    for r in reports {
        let row = [
            r.name.clone(),
            r.operator.clone(),
            r.mu.map(fmt_f64).unwrap_or_default(),
            r.j.map(|j| j.to_string()).unwrap_or_default(),
            fmt_f64(r.r),
            fmt_f64(r.h),
            fmt_f64(r.lhs),
            fmt_f64(r.rhs),
            fmt_f64(r.ratio),
            r.pass.to_string(),
        ];
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

/// Constants of the integrand together with its sampled certificate.
fn constants_record(ctx: &RunContext, f: &Integrand) -> Json {
    let c = &ctx.config.certify;
    let certificate = match verify_mu_ellipticity(f, c.n_samples, c.radius, ctx.config.seed) {
        Ok(cert) => to_json(&cert),
        Err(e) => json!({ "error": e.to_string() }),
    };
    json!({ "constants": f.constants(), "certificate": certificate })
}

fn provenance(ctx: &RunContext, integrands: &[Integrand]) -> Json {
    json!({
        "config_sha256": ctx.config.hash(),
        "config": ctx.config,
        "config_text": ctx.config_text,
        "seed": ctx.config.seed,
        "young_convention": EXP_CONVENTION,
        "upper_weight": UPPER_WEIGHT_NOTE,
        "integrands": integrands.iter().map(|f| constants_record(ctx, f)).collect::<Vec<_>>(),
    })
}

/// Symbol classification, decomposition, factorization and kernel of one part map.
pub fn analyze_operator(a: &PartMap) -> Json {
    let ell = classify_ellipticity(a);
    let dec = build_decomposition(a);
    let fact = match &dec {
        Ok(d) => build_second_order_factorization(a, d).map(|f| {
            let mut v = f.to_json();
            v["symbol_identity"] = json!(f.verify_symbol_identity(a));
            v
        }),
        Err(e) => Err(Error::Invalid(e.to_string())),
    };
    let outcome = |r: Result<Json>| match r {
        Ok(v) => v,
        Err(e) => json!({ "error": e.to_string() }),
    };
    json!({
        "operator": a.label(),
        "matrix": a.matrix().to_strings(),
        "rank": a.rank(),
        "orthogonal": a.is_orthogonal(),
        "ellipticity": ell,
        "decomposition": outcome(dec.as_ref().map(|d| {
            let mut v = d.to_json();
            v["identity_holds"] = json!(d.verify(a));
            v
        }).map_err(|e| Error::Invalid(e.to_string()))),
        "factorization": outcome(fact),
        "kernel_basis": kernel_basis(a).to_json(),
    })
}

pub fn run_analyze(ctx: &RunContext, operator: &str) -> Result<Outcome> {
    let a = ctx.config.operator(operator)?;
    let out = json!({ "provenance": provenance(ctx, &[]), "analysis": analyze_operator(&a) });
    let path = ctx.path(&format!("analysis_{operator}.json"));
    write_json(&path, &out)?;
    let ell = classify_ellipticity(&a);
    Ok(Outcome {
        exit_code: EXIT_OK,
        files: vec![path],
        summary: format!("{operator}: elliptic={} c_elliptic={}", ell.elliptic, ell.c_elliptic),
    })
}

/// Cellwise check of `|Df_j(P)| ≤ c₂ + |P|/(A_j j²)`; also reports the excess over the bound
/// with the viscosity slope halved.
fn gradient_bound_check(fj: &RegularizedIntegrand, a: &PartMap, u: &VectorField) -> Json {
    let w = apply_a(a, u);
    let mut excess = f64::NEG_INFINITY;
    let mut excess_half = f64::NEG_INFINITY;
    for p in &w.values {
        let g = crate::mat::norm(&fj.grad(p));
        let bound = fj.grad_bound(p);
        excess = excess.max(g - bound);
        excess_half = excess_half.max(g - (bound - 0.5 * fj.eps() * crate::mat::norm(p)));
    }
    json!({
        "max_excess": excess,
        "holds": excess <= 1e-12 * (1.0 + fj.base.c2().min(1e300)),
        "max_excess_half_slope": excess_half,
    })
}

fn solve_options(tol: f64, max_iter: usize) -> SolveOptions {
    SolveOptions { tol, max_iter, ..SolveOptions::default() }
}

pub fn run_solve(ctx: &RunContext) -> Result<Outcome> {
    let cfg = ctx.config.solve.as_ref().ok_or_else(|| Error::Config("missing [solve] section".into()))?;
    let a = ctx.config.operator(&cfg.operator)?;
    let f = cfg.integrand.build()?;
    let g = cfg.grid.build()?;
    let u0 = cfg.boundary.build(&a, &g)?;
    let start = coons_interpolant(&u0);
    let fj = regularize(&f, cfg.j, &apply_a(&a, &start))?;
    let problem = DirichletProblem::new(a.clone(), fj.clone(), u0)?.with_reference(start.clone());
    let (report, converged) = match minimize_from(&problem, Some(&start), &solve_options(cfg.tol, cfg.max_iter)) {
        Ok(r) => (r, true),
        Err(Error::MaxIterExceeded(r)) => (*r, false),
        Err(e) => return Err(e),
    };
    let out = json!({
        "provenance": provenance(ctx, &[f]),
        "report": report,
        "gradient_bound": gradient_bound_check(&fj, &a, &report.u),
    });
    let (json_path, csv_path) = (ctx.path("solve_report.json"), ctx.path("solution.csv"));
    write_json(&json_path, &out)?;
    write_field(&csv_path, &report.u)?;
    Ok(Outcome {
        exit_code: if converged { EXIT_OK } else { EXIT_NOT_CONVERGED },
        files: vec![json_path, csv_path],
        summary: format!(
            "j={} converged={} iterations={} residual={:e} energy={}",
            report.j, converged, report.iterations, report.el_residual, report.energy
        ),
    })
}

pub fn run_sweep(ctx: &RunContext) -> Result<Outcome> {
    let cfg = ctx.config.sweep.as_ref().ok_or_else(|| Error::Config("missing [sweep] section".into()))?;
    let a = ctx.config.operator(&cfg.operator)?;
    let f = cfg.integrand.build()?;
    let g = cfg.grid.build()?;
    let u0 = cfg.boundary.build(&a, &g)?;
    let start = coons_interpolant(&u0);
    let sweep = match viscosity_sweep(&a, &f, &u0, &cfg.j_list, &start, &solve_options(cfg.tol, cfg.max_iter)) {
        Ok(s) => s,
        Err(e @ Error::MaxIterExceeded(_)) => {
            let path = ctx.path("sweep_report.json");
            write_json(&path, &json!({ "provenance": provenance(ctx, &[f]), "error": e.to_string() }))?;
            return Ok(Outcome { exit_code: EXIT_NOT_CONVERGED, files: vec![path], summary: e.to_string() });
        }
        Err(e) => return Err(e),
    };
    let json_path = ctx.path("sweep_report.json");
    write_json(&json_path, &json!({ "provenance": provenance(ctx, &[f]), "sweep": sweep }))?;
    let mut files = vec![json_path];
    if let Some(last) = sweep.entries.last() {
        let p = ctx.path("sweep_solution.csv");
        write_field(&p, &last.report.u)?;
        files.push(p);
    }
    Ok(Outcome {
        exit_code: if sweep.all_ok { EXIT_OK } else { EXIT_INEQUALITY },
        files,
        summary: format!("{} solves, bounds hold: {}", sweep.entries.len(), sweep.all_ok),
    })
}

/// One solved instance of a verification campaign.
#[derive(Debug, Clone, Serialize)]
struct InstanceResult {
    key: String,
    operator: String,
    mu: f64,
    n: usize,
    sweep: Option<SweepReport>,
    rows: Vec<EstimateReport>,
    error: Option<String>,
    not_converged: bool,
}

fn verify_instance(
    camp: &CampaignConfig,
    a: &PartMap,
    mu: f64,
    n: usize,
) -> Result<InstanceResult> {
    let key = format!("{}_mu{}_n{}", a.label(), mu, n);
    info!("instance {key}");
    let mut result = InstanceResult {
        key,
        operator: a.label().into(),
        mu,
        n,
        sweep: None,
        rows: Vec::new(),
        error: None,
        not_converged: false,
    };
    let f = IntegrandConfig { name: "mu_family".into(), mu: Some(mu) }.build()?;
    let g = Grid::unit_square(n)?;
    let u0 = camp.boundary.build(a, &g)?;
    let start = coons_interpolant(&u0);
    let sweep = match viscosity_sweep(a, &f, &u0, &camp.j, &start, &solve_options(camp.tol, camp.max_iter)) {
        Ok(s) => s,
        Err(e @ Error::MaxIterExceeded(_)) => {
            warn!("{}: {e}", result.key);
            result.error = Some(e.to_string());
            result.not_converged = true;
            return Ok(result);
        }
        Err(e) => return Err(e),
    };
    let region = BallRegion::new(camp.center, camp.radius)?;
    let rho = build_cutoff(&region, &g)?;
    let kb = kernel_basis(a);
    let b = &camp.budgets;
    for e in &sweep.entries {
        let r = &e.report;
        let inst = Instance::new(a, Some(mu), Some(r.j), &region, g.h);
        if camp.sweep_bounds {
            let d = &r.diagnostics;
            result.rows.push(EstimateReport::new("viscosity_mass", &inst, d.visc_mass, e.visc_bound, 1.0, json!({})));
            result.rows.push(EstimateReport::new(
                "a_mass",
                &inst,
                d.mass_a,
                e.mass_bound,
                1.0,
                json!({ "e_ref": e.e_ref, "c1": f.c1() }),
            ));
        }
        let fj = RegularizedIntegrand::new(f.clone(), r.j, r.a_j)?;
        let field = SampledField::discrete(r.u.clone());
        let (mut report, details) =
            weighted_second_order_check(a, &field, &fj, &region, &rho, &kb, b.weighted_second_order)?;
        if details.lower_bound_violations > 0 {
            report.pass = false;
        }
        result.rows.push(report);
    }
    if let Some(last) = sweep.entries.last() {
        let field = SampledField::discrete(last.report.u.clone());
        let j = Some(last.report.j);
        let (main, power, chain) = main_estimate_check(a, &field, &region, mu, j, &kb, b.main_exp_estimate)?;
        let inst = Instance::new(a, Some(mu), j, &region, g.h);
        result.rows.push(main);
        result.rows.push(EstimateReport::new("power_bound", &inst, power.lhs, power.rhs, 1.0 + 1e-9, json!({})));
        result.rows.push(EstimateReport::new(
            "chain_bound",
            &inst,
            chain.max_ratio,
            1.0,
            1.0 + 1e-10,
            to_json(&chain),
        ));
        let tag = |mut r: EstimateReport| {
            r.mu = Some(mu);
            r.j = j;
            r
        };
        result.rows.push(tag(poincare_check(a, &field, &region, camp.beta, &kb, b.poincare)?));
        result.rows.push(tag(korn_check(a, &field, &region, camp.beta, &kb, b.korn)?));
    }
    result.sweep = Some(sweep);
    Ok(result)
}

/// Ornstein table rows plus a Korn row on the second probe field for a non-C-elliptic operator.
fn probe_rows(
    a: &PartMap,
    k_max: u32,
    n: usize,
    region: &BallRegion,
    beta: f64,
    korn_budget: f64,
) -> Result<(OrnsteinTable, Vec<EstimateReport>)> {
    let table = ornstein_probe(a, k_max, n)?;
    let g = Grid::unit_square(n)?;
    let whole = BallRegion::new([0.5, 0.5], 0.5)?;
    let mut rows = Vec::new();
    for row in &table.rows {
        let inst = Instance::new(a, None, None, &whole, g.h);
        rows.push(EstimateReport::new(
            "ornstein",
            &inst,
            row.du_l1,
            row.adu_l1,
            korn_budget,
            json!({ "k": row.k, "family": table.family, "adu_max": row.adu_max }),
        ));
    }
    let (family, field) = probe_field(a, 2.min(k_max.max(1)), &g)?;
    let mut korn = korn_check(a, &field, region, beta, &kernel_basis(a), korn_budget)?;
    korn.details["probe_family"] = json!(family);
    rows.push(korn);
    Ok((table, rows))
}

fn is_c_elliptic(ops: &BTreeMap<String, PartMap>, name: &str) -> bool {
    ops.get(name).map(|a| classify_ellipticity(a).c_elliptic).unwrap_or(false)
}

fn failure_summary(rows: &[EstimateReport], ops: &BTreeMap<String, PartMap>) -> (usize, usize, usize) {
    let failed: Vec<&EstimateReport> = rows.iter().filter(|r| !r.pass).collect();
    let flagged = rows.iter().filter(|r| r.flagged).count();
    let unexpected = failed.iter().filter(|r| is_c_elliptic(ops, &r.operator)).count();
    (failed.len(), flagged, unexpected)
}

pub fn run_verify(ctx: &RunContext) -> Result<Outcome> {
    let camp = ctx.config.campaign.clone().unwrap_or_default();
    let mut ops = BTreeMap::new();
    for name in camp.operators.iter().chain(&camp.ornstein_operators) {
        ops.insert(name.clone(), ctx.config.operator(name)?);
    }
    for name in &camp.operators {
        if !is_c_elliptic(&ops, name) {
            return Err(Error::Config(format!("campaign operator {name} is not C-elliptic")));
        }
    }
    let mut keys = Vec::new();
    for op in &camp.operators {
        for &mu in &camp.mu {
            for &n in &camp.grids {
                keys.push((op.clone(), mu, n));
            }
        }
    }
    let pool = ctx.pool()?;
    let results: Vec<Result<InstanceResult>> = pool.install(|| {
        keys.par_iter()
            .map(|(op, mu, n)| {
                let r = verify_instance(&camp, &ops[op], *mu, *n)?;
                write_json(&ctx.path(&format!("instances/{}.json", r.key)), &to_json(&r))?;
                Ok(r)
            })
            .collect()
    });
    let results: Vec<InstanceResult> = results.into_iter().collect::<Result<_>>()?;

    let region = BallRegion::new(camp.center, camp.radius)?;
    let mut tables = Vec::new();
    let mut rows: Vec<EstimateReport> = results.iter().flat_map(|r| r.rows.clone()).collect();
    for name in &camp.ornstein_operators {
        let (table, probe) =
            probe_rows(&ops[name], camp.ornstein_k_max, camp.ornstein_grid, &region, camp.beta, camp.budgets.korn)?;
        tables.push(table);
        rows.extend(probe);
    }
    let (failed, flagged, unexpected) = failure_summary(&rows, &ops);
    let not_converged = results.iter().filter(|r| r.not_converged).count();
    let integrands: Vec<Integrand> = camp.mu.iter().map(|&mu| Integrand::mu_elliptic(mu)).collect::<Result<_>>()?;

    let hash = ctx.config.hash();
    let csv_path = ctx.path("verify.csv");
    write_atomic(&csv_path, estimate_csv(&rows, &hash).as_bytes())?;
    let json_path = ctx.path("verify.json");
    let summary = json!({
        "rows": rows.len(),
        "failed": failed,
        "flagged": flagged,
        "unexpected_failures": unexpected,
        "not_converged": not_converged,
    });
    write_json(
        &json_path,
        &json!({
            "provenance": provenance(ctx, &integrands),
            "instances": results,
            "ornstein": tables,
            "reports": rows,
            "summary": summary,
        }),
    )?;
    let exit_code = if not_converged > 0 {
        EXIT_NOT_CONVERGED
    } else if unexpected > 0 {
        EXIT_INEQUALITY
    } else {
        EXIT_OK
    };
    Ok(Outcome {
        exit_code,
        files: vec![csv_path, json_path],
        summary: format!(
            "{} rows, {failed} failed ({flagged} flagged, {unexpected} unexpected), {not_converged} not converged",
            rows.len()
        ),
    })
}

/// Korn and Poincaré ratios over random smooth fields for the C-elliptic operators, with their
/// spread `max/min`; Ornstein probes for the others.
pub fn run_korn_probe(ctx: &RunContext) -> Result<Outcome> {
    let cfg: KornProbeConfig = ctx.config.korn_probe.clone().unwrap_or_default();
    let mut ops = BTreeMap::new();
    for name in &cfg.operators {
        ops.insert(name.clone(), ctx.config.operator(name)?);
    }
    let g = Grid::unit_square(cfg.grid)?;
    let region = BallRegion::new(cfg.center, cfg.radius)?;
    let pool = ctx.pool()?;
    let mut rows = Vec::new();
    let mut spreads = BTreeMap::new();
    let mut tables = Vec::new();
    for name in &cfg.operators {
        let a = &ops[name];
        if classify_ellipticity(a).c_elliptic {
            let kb = kernel_basis(a);
            let per_field: Vec<Result<[EstimateReport; 2]>> = pool.install(|| {
                (0..cfg.n_fields)
                    .into_par_iter()
                    .map(|idx| {
                        let field = random_smooth_field(&g, ctx.config.seed.wrapping_add(idx as u64));
                        Ok([
                            korn_check(a, &field, &region, cfg.beta, &kb, cfg.budgets.korn)?,
                            poincare_check(a, &field, &region, cfg.beta, &kb, cfg.budgets.poincare)?,
                        ])
                    })
                    .collect()
            });
            let per_field: Vec<[EstimateReport; 2]> = per_field.into_iter().collect::<Result<_>>()?;
            for (which, label) in [(0, "korn"), (1, "poincare")] {
                let ratios: Vec<f64> = per_field.iter().map(|r| r[which].ratio).collect();
                let max = ratios.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
                let min = ratios.iter().cloned().fold(f64::INFINITY, f64::min);
                spreads.insert(format!("{name}/{label}"), json!({ "min": min, "max": max, "spread": max / min }));
            }
            rows.extend(per_field.into_iter().flatten());
        } else {
            let (table, probe) = probe_rows(a, cfg.k_max, cfg.grid, &region, cfg.beta, cfg.budgets.korn)?;
            tables.push(table);
            rows.extend(probe);
        }
    }
    let (failed, flagged, unexpected) = failure_summary(&rows, &ops);
    let hash = ctx.config.hash();
    let csv_path = ctx.path("korn_probe.csv");
    write_atomic(&csv_path, estimate_csv(&rows, &hash).as_bytes())?;
    let json_path = ctx.path("korn_probe.json");
    write_json(
        &json_path,
        &json!({
            "provenance": provenance(ctx, &[]),
            "spreads": spreads,
            "ornstein": tables,
            "reports": rows,
            "summary": { "rows": rows.len(), "failed": failed, "flagged": flagged, "unexpected_failures": unexpected },
        }),
    )?;
    Ok(Outcome {
        exit_code: if unexpected > 0 { EXIT_INEQUALITY } else { EXIT_OK },
        files: vec![csv_path, json_path],
        summary: format!("{} rows, {failed} failed ({flagged} flagged, {unexpected} unexpected)", rows.len()),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx(text: &str, dir: &Path) -> RunContext {
        RunContext::new(ExperimentConfig::parse(text).unwrap(), text.into(), dir.to_path_buf(), 2)
    }

    fn scratch(name: &str) -> PathBuf {
        let d = std::env::temp_dir().join(format!("anisograd-campaign-{name}-{}", std::process::id()));
        let _ = std::fs::remove_dir_all(&d);
        d
    }

    #[test]
    fn csv_layout() {
        let region = BallRegion::new([0.5, 0.5], 0.25).unwrap();
        let inst = Instance::new(&PartMap::preset("sym").unwrap(), Some(1.5), Some(4), &region, 0.125);
        let r = EstimateReport::new("korn", &inst, 0.5, 2.0, 1.0, json!({}));
        let text = estimate_csv(&[r], "abc");
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "# config_sha256=abc");
        assert_eq!(lines[2], CSV_HEADER);
        let cells: Vec<&str> = lines[3].split(',').collect();
        assert_eq!(cells.len(), 10);
        assert_eq!(cells[3], "4");
        assert_eq!(cells[8].parse::<f64>().unwrap(), 0.25);
        assert_eq!(cells[9], "true");
    }

    #[test]
    fn empty_campaign_gives_header_only() {
        let dir = scratch("empty");
        let c = ctx("[campaign]\noperators = []\nornstein_operators = []\n", &dir);
        let out = run_verify(&c).unwrap();
        assert_eq!(out.exit_code, EXIT_OK);
        let text = std::fs::read_to_string(dir.join("verify.csv")).unwrap();
        assert_eq!(text.lines().last().unwrap(), CSV_HEADER);
        std::fs::remove_dir_all(&dir).unwrap();
    }

    #[test]
    fn analyze_reports_classification() {
        let dir = scratch("analyze");
        let c = ctx("", &dir);
        run_analyze(&c, "devsym").unwrap();
        let v: Json = serde_json::from_str(&std::fs::read_to_string(dir.join("analysis_devsym.json")).unwrap()).unwrap();
        assert_eq!(v["analysis"]["ellipticity"]["elliptic"], json!(true));
        assert_eq!(v["analysis"]["ellipticity"]["c_elliptic"], json!(false));
        assert_eq!(v["provenance"]["config_sha256"], json!(c.config.hash()));
        assert!(run_analyze(&c, "nonsense").is_err());
        std::fs::remove_dir_all(&dir).unwrap();
    }

    #[test]
    fn solve_kernel_boundary() {
        let dir = scratch("solve");
        let text = r#"
[solve]
operator = "sym"
integrand = { name = "mu_family", mu = 1.5 }
grid = { n = 16 }
boundary = { preset = "kernel" }
j = 4
"#;
        let out = run_solve(&ctx(text, &dir)).unwrap();
        assert_eq!(out.exit_code, EXIT_OK);
        assert_eq!(out.files.len(), 2);
        std::fs::remove_dir_all(&dir).unwrap();
    }

    #[test]
    fn atomic_write_replaces() {
        let dir = scratch("atomic");
        let p = dir.join("x.txt");
        write_atomic(&p, b"one").unwrap();
        write_atomic(&p, b"two").unwrap();
        assert_eq!(std::fs::read_to_string(&p).unwrap(), "two");
        assert!(!dir.join("x.txt.tmp").exists());
        std::fs::remove_dir_all(&dir).unwrap();
    }
}
