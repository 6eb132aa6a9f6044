use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn anisograd(args: &[&str], config: Option<&str>, dir: &Path) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_anisograd"));
    cmd.args(args).arg("--output").arg(dir);
    if let Some(text) = config {
        let path = dir.join("config.toml");
        std::fs::create_dir_all(dir).unwrap();
        std::fs::write(&path, text).unwrap();
        cmd.arg("--config").arg(path);
    }
    cmd.output().unwrap()
}

fn json(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn analyze_presets() {
    let dir = tempfile::tempdir().unwrap();
    for (op, ell, cell) in [("sym", true, true), ("devsym", true, false), ("skew", false, false)] {
        let out = anisograd(&["analyze", "--operator", op], None, dir.path());
        assert_eq!(out.status.code(), Some(0), "{op}");
        let v = json(&dir.path().join(format!("analysis_{op}.json")));
        let e = &v["analysis"]["ellipticity"];
        assert_eq!(e["elliptic"], Value::Bool(ell), "{op}");
        assert_eq!(e["c_elliptic"], Value::Bool(cell), "{op}");
        assert_eq!(e["witness"].is_null(), cell, "{op}");
    }
    let sym = json(&dir.path().join("analysis_sym.json"));
    assert_eq!(sym["analysis"]["decomposition"]["certificate"], "1");
    assert!(sym["provenance"]["config_sha256"].as_str().unwrap().len() == 64);
}

#[test]
fn config_errors_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    let out = anisograd(&["verify"], Some("seed = 1\nunknown_key = 3\n"), dir.path());
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("unknown"));
    let out = anisograd(&["analyze", "--operator", "nope"], None, dir.path());
    assert_eq!(out.status.code(), Some(1));
    let out = anisograd(&["solve"], None, dir.path());
    assert_eq!(out.status.code(), Some(1));
}

const SOLVE: &str = r#"
[solve]
operator = "sym"
integrand = { name = "mu_family", mu = 1.5 }
grid = { n = 128 }
j = 16
"#;

#[test]
fn solve_writes_report_and_field() {
    let dir = tempfile::tempdir().unwrap();
    let out = anisograd(&["solve"], Some(SOLVE), dir.path());
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let v = json(&dir.path().join("solve_report.json"));
    let r = &v["report"];
    assert_eq!(r["converged"], Value::Bool(true));
    for key in ["mass_a", "visc_mass", "base_energy", "energy_gap_vs_reference"] {
        assert!(r["diagnostics"][key].is_number(), "{key}");
    }
    assert_eq!(v["gradient_bound"]["holds"], Value::Bool(true));
    let c = &v["provenance"]["integrands"][0]["constants"];
    for key in ["c1", "c2", "lambda", "Lambda"] {
        assert!(c[key].is_number(), "{key}");
    }
    assert_eq!(v["provenance"]["young_convention"], "exp(t^beta) - 1");
    let csv = std::fs::read_to_string(dir.path().join("solution.csv")).unwrap();
    assert!(csv.starts_with("nx,ny,h,ox,oy,components\n129,129,"));
}

#[test]
fn solve_kernel_boundary_has_no_mass() {
    let dir = tempfile::tempdir().unwrap();
    let text = SOLVE.replace("grid = { n = 128 }", "grid = { n = 32 }\nboundary = { preset = \"kernel\" }");
    let out = anisograd(&["solve", "--operator", "dev"], Some(&text), dir.path());
    assert_eq!(out.status.code(), Some(0));
    let v = json(&dir.path().join("solve_report.json"));
    assert!(v["report"]["diagnostics"]["mass_a"].as_f64().unwrap() <= 1e-12);
}

#[test]
fn non_convergence_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let text = format!("{SOLVE}max_iter = 1\ntol = 1e-14\n");
    let out = anisograd(&["solve"], Some(&text), dir.path());
    assert_eq!(out.status.code(), Some(2));
    let v = json(&dir.path().join("solve_report.json"));
    assert_eq!(v["report"]["converged"], Value::Bool(false));
}

#[test]
fn sweep_reports_bounds() {
    let dir = tempfile::tempdir().unwrap();
    let text = r#"
[sweep]
operator = "dev"
integrand = { name = "mu_family", mu = 1.2 }
grid = { n = 32 }
j_list = [16, 4, 8]
"#;
    let out = anisograd(&["sweep"], Some(text), dir.path());
    assert_eq!(out.status.code(), Some(0));
    let v = json(&dir.path().join("sweep_report.json"));
    let js: Vec<u64> = v["sweep"]["entries"].as_array().unwrap().iter().map(|e| e["report"]["j"].as_u64().unwrap()).collect();
    assert_eq!(js, vec![4, 8, 16]);
    assert_eq!(v["sweep"]["all_ok"], Value::Bool(true));
}

#[test]
fn empty_campaign_is_header_only() {
    let dir = tempfile::tempdir().unwrap();
    let out = anisograd(&["verify"], Some("[campaign]\noperators = []\nornstein_operators = []\n"), dir.path());
    assert_eq!(out.status.code(), Some(0));
    let csv = std::fs::read_to_string(dir.path().join("verify.csv")).unwrap();
    let rows: Vec<&str> = csv.lines().filter(|l| !l.starts_with('#')).collect();
    assert_eq!(rows, vec!["name,operator,mu,j,r,h,lhs,rhs,ratio,pass"]);
}

const CAMPAIGN: &str = r#"
seed = 9
[campaign]
operators = ["sym"]
mu = [1.5]
j = [4, 8]
grids = [32]
"#;

#[test]
fn campaign_flags_only_devsym_probes() {
    let dir = tempfile::tempdir().unwrap();
    let out = anisograd(&["verify", "--jobs", "2"], Some(CAMPAIGN), dir.path());
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
    let csv = std::fs::read_to_string(dir.path().join("verify.csv")).unwrap();
    let mut devsym_rows = 0;
    for line in csv.lines().filter(|l| !l.starts_with('#')).skip(1) {
        let cells: Vec<&str> = line.split(',').collect();
        assert_eq!(cells.len(), 10);
        if cells[1] == "devsym" {
            devsym_rows += 1;
            assert_eq!(cells[8], "inf");
            assert_eq!(cells[9], "false");
        } else {
            assert_eq!(cells[9], "true", "{line}");
        }
    }
    assert_eq!(devsym_rows, 4);
    assert!(dir.path().join("instances/sym_mu1.5_n32.json").exists());
}

#[test]
fn repeated_runs_are_byte_identical() {
    let (d1, d2) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    let text = format!("{CAMPAIGN}[korn_probe]\ngrid = 32\nn_fields = 3\n");
    for (d, jobs) in [(&d1, "1"), (&d2, "3")] {
        for cmd in ["verify", "korn-probe"] {
            assert_eq!(anisograd(&[cmd, "--jobs", jobs], Some(&text), d.path()).status.code(), Some(0));
        }
    }
    for f in ["verify.csv", "verify.json", "korn_probe.csv", "korn_probe.json"] {
        let (a, b) = (std::fs::read(d1.path().join(f)).unwrap(), std::fs::read(d2.path().join(f)).unwrap());
        assert!(a == b, "{f} differs");
    }
}

#[test]
fn seed_flag_changes_the_hash() {
    let dir = tempfile::tempdir().unwrap();
    let text = "[korn_probe]\ngrid = 32\nn_fields = 2\noperators = [\"sym\"]\n";
    anisograd(&["korn-probe", "--seed", "1"], Some(text), dir.path());
    let a = json(&dir.path().join("korn_probe.json"));
    anisograd(&["korn-probe", "--seed", "2"], Some(text), dir.path());
    let b = json(&dir.path().join("korn_probe.json"));
    assert_ne!(a["provenance"]["config_sha256"], b["provenance"]["config_sha256"]);
    assert_ne!(a["reports"][0]["lhs"], b["reports"][0]["lhs"]);
}
