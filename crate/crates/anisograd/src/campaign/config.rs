use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::grid::{read_csv, Grid, VectorField};
use crate::integrand::Integrand;
use crate::operator::{kernel_basis, PartMap, PRESETS};

fn default_tol() -> f64 {
    1e-8
}
fn default_max_iter() -> usize {
    100
}

#[derive(Debug, Clone, Default, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default)]
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_dir: Option<String>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub custom_operators: BTreeMap<String, CustomOperator>,
    #[serde(default)]
    pub certify: CertifyConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub analyze: Option<AnalyzeConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub solve: Option<SolveConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub campaign: Option<CampaignConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub korn_probe: Option<KornProbeConfig>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct CustomOperator {
    /// 4x4 rows of rationals such as "1/2".
    pub m: Vec<Vec<String>>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct CertifyConfig {
    pub n_samples: usize,
    pub radius: f64,
}

impl Default for CertifyConfig {
    fn default() -> Self {
        CertifyConfig { n_samples: 10_000, radius: 1e3 }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct AnalyzeConfig {
    pub operator: String,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct IntegrandConfig {
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mu: Option<f64>,
}

impl IntegrandConfig {
    pub fn build(&self) -> Result<Integrand> {
        Integrand::from_name(&self.name, self.mu)
    }
}

/// Either `n` (unit square with n cells per side) or `nx`, `ny`, `h`.
#[derive(Debug, Clone, Default, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub nx: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ny: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub h: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub origin: Option<[f64; 2]>,
}

impl GridConfig {
    pub fn build(&self) -> Result<Grid> {
        match (self.n, self.nx, self.ny, self.h) {
            (Some(n), None, None, None) => Grid::unit_square(n),
            (None, Some(nx), Some(ny), Some(h)) => Grid::new(nx, ny, h, self.origin.unwrap_or([0.0, 0.0])),
            _ => Err(Error::Config("grid needs either n, or nx, ny and h".into())),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct BoundaryConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub preset: Option<String>,
    /// CSV node field with the layout of `write_csv`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub file: Option<String>,
}

impl Default for BoundaryConfig {
    fn default() -> Self {
        BoundaryConfig { preset: Some("smooth".into()), file: None }
    }
}

pub const BOUNDARY_PRESETS: [&str; 5] = ["smooth", "kernel", "harmonic", "constant", "zero"];

/// Boundary presets evaluated at all nodes (only boundary values are used by the solver).
pub fn boundary_preset(name: &str, a: &PartMap, g: &Grid) -> Result<VectorField> {
    let f: Box<dyn Fn([f64; 2]) -> [f64; 2]> = match name {
        "smooth" => Box::new(|x| {
            [
                (std::f64::consts::PI * x[0]).sin() * x[1] + x[0] * x[0],
                (2.0 * x[1]).cos() * x[0] - x[0] * x[1] * x[1],
            ]
        }),
        "kernel" => {
            let kb = kernel_basis(a);
            let b = kb.elements[0].b_mat;
            Box::new(move |x| [b[0] * x[0] + b[1] * x[1] + 0.1, b[2] * x[0] + b[3] * x[1] - 0.2])
        }
        "harmonic" => Box::new(|x| [x[0] * x[0] - x[1] * x[1], 2.0 * x[0] * x[1]]),
        "constant" => Box::new(|_| [1.0, -0.5]),
        "zero" => Box::new(|_| [0.0, 0.0]),
        other => return Err(Error::Config(format!("unknown boundary preset {other:?}"))),
    };
    Ok(VectorField::on_nodes(g, f))
}

impl BoundaryConfig {
    pub fn build(&self, a: &PartMap, g: &Grid) -> Result<VectorField> {
        match (&self.preset, &self.file) {
            (Some(p), None) => boundary_preset(p, a, g),
            (None, Some(path)) => {
                let file = std::fs::File::open(path)?;
                let u: VectorField = read_csv(std::io::BufReader::new(file))?;
                if (u.nx, u.ny) != (g.nx, g.ny) {
                    return Err(Error::Config(format!("boundary file {path} does not match the grid")));
                }
                Ok(u)
            }
            _ => Err(Error::Config("boundary needs exactly one of preset or file".into())),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct SolveConfig {
    pub operator: String,
    pub integrand: IntegrandConfig,
    pub grid: GridConfig,
    #[serde(default)]
    pub boundary: BoundaryConfig,
    pub j: u32,
    #[serde(default = "default_tol")]
    pub tol: f64,
    #[serde(default = "default_max_iter")]
    pub max_iter: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub operator: String,
    pub integrand: IntegrandConfig,
    pub grid: GridConfig,
    #[serde(default)]
    pub boundary: BoundaryConfig,
    pub j_list: Vec<u32>,
    #[serde(default = "default_tol")]
    pub tol: f64,
    #[serde(default = "default_max_iter")]
    pub max_iter: usize,
}

/// Ratio budgets per estimate. Defaults are about ten times the largest ratio seen in a pilot
/// over random smooth fields and the default campaign.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct Budgets {
    pub poincare: f64,
    pub korn: f64,
    pub weighted_second_order: f64,
    pub main_exp_estimate: f64,
}

impl Default for Budgets {
    fn default() -> Self {
        Budgets { poincare: 1.5, korn: 0.25, weighted_second_order: 0.5, main_exp_estimate: 0.05 }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields, default)]
pub struct CampaignConfig {
    pub operators: Vec<String>,
    pub mu: Vec<f64>,
    pub j: Vec<u32>,
    /// Cells per side of the unit square.
    pub grids: Vec<usize>,
    pub radius: f64,
    pub center: [f64; 2],
    pub beta: f64,
    pub boundary: BoundaryConfig,
    pub tol: f64,
    pub max_iter: usize,
    pub ornstein_operators: Vec<String>,
    pub ornstein_k_max: u32,
    pub ornstein_grid: usize,
    pub sweep_bounds: bool,
    pub budgets: Budgets,
}

impl Default for CampaignConfig {
    fn default() -> Self {
        CampaignConfig {
            operators: vec!["sym".into(), "dev".into()],
            mu: vec![1.2, 1.5, 1.8],
            j: vec![4, 8, 16, 32, 64],
            grids: vec![64],
            radius: 0.25,
            center: [0.5, 0.5],
            beta: 0.5,
            boundary: BoundaryConfig::default(),
            tol: default_tol(),
            max_iter: default_max_iter(),
            ornstein_operators: vec!["devsym".into()],
            ornstein_k_max: 3,
            ornstein_grid: 64,
            sweep_bounds: true,
            budgets: Budgets::default(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields, default)]
pub struct KornProbeConfig {
    pub operators: Vec<String>,
    pub n_fields: usize,
    pub grid: usize,
    pub radius: f64,
    pub center: [f64; 2],
    pub beta: f64,
    pub k_max: u32,
    pub budgets: Budgets,
}

impl Default for KornProbeConfig {
    fn default() -> Self {
        KornProbeConfig {
            operators: vec!["sym".into(), "dev".into(), "devsym".into()],
            n_fields: 10,
            grid: 128,
            radius: 0.2,
            center: [0.5, 0.5],
            beta: 0.5,
            k_max: 3,
            budgets: Budgets::default(),
        }
    }
}

impl ExperimentConfig {
    pub fn parse(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    /// Preset name or an entry of `custom_operators`.
    pub fn operator(&self, name: &str) -> Result<PartMap> {
        if let Some(c) = self.custom_operators.get(name) {
            if PRESETS.contains(&name) {
                return Err(Error::Config(format!("custom operator {name:?} shadows a preset")));
            }
            return PartMap::from_strings(name, &c.m);
        }
        PartMap::preset(name)
    }

    /// SHA-256 of the canonical JSON form of the effective configuration.
    pub fn hash(&self) -> String {
        let canonical = serde_json::to_string(self).expect("config serialises");
        hex::encode(Sha256::digest(canonical.as_bytes()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_keys_rejected() {
        assert!(ExperimentConfig::parse("seed = 1\nbogus = 2").is_err());
        assert!(ExperimentConfig::parse("[campaign]\nradius = 0.2\nextra = 1").is_err());
    }

    #[test]
    fn campaign_defaults_fill_in() {
        let c = ExperimentConfig::parse("[campaign]\nmu = [1.5]").unwrap();
        let camp = c.campaign.unwrap();
        assert_eq!(camp.mu, vec![1.5]);
        assert_eq!(camp.operators, vec!["sym", "dev"]);
        assert_eq!(camp.j, vec![4, 8, 16, 32, 64]);
    }

    #[test]
    fn custom_operator_table() {
        let text = r#"
[custom_operators.halfsym]
m = [["1","0","0","0"],["0","1/2","1/2","0"],["0","1/2","1/2","0"],["0","0","0","1"]]
"#;
        let c = ExperimentConfig::parse(text).unwrap();
        let a = c.operator("halfsym").unwrap();
        assert_eq!(a.matrix(), PartMap::preset("sym").unwrap().matrix());
        assert!(c.operator("missing").is_err());
    }

    #[test]
    fn hash_tracks_content() {
        let a = ExperimentConfig::parse("seed = 1").unwrap();
        let b = ExperimentConfig::parse("seed = 2").unwrap();
        assert_ne!(a.hash(), b.hash());
        assert_eq!(a.hash(), ExperimentConfig::parse("seed = 1\n").unwrap().hash());
    }

    #[test]
    fn grid_forms() {
        assert_eq!(GridConfig { n: Some(8), ..Default::default() }.build().unwrap().nx, 9);
        let g = GridConfig { nx: Some(5), ny: Some(7), h: Some(0.5), ..Default::default() }.build().unwrap();
        assert_eq!((g.nx, g.ny), (5, 7));
        assert!(GridConfig { n: Some(8), h: Some(0.1), ..Default::default() }.build().is_err());
    }
}
