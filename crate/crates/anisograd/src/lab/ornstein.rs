use num_complex::Complex64;
use serde::Serialize;

use super::{SampledField, ZERO_TOL};
use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::mat;
use crate::operator::{classify_ellipticity, PartMap, Witness};

/// `u = (Re z^k, Im z^k)` with `z = x₁ + i x₂` and its exact gradient.
pub fn conformal_power(g: &Grid, k: u32) -> SampledField {
    let z = |x: [f64; 2]| Complex64::new(x[0], x[1]);
    SampledField::analytic(
        g,
        |x| {
            let w = z(x).powu(k);
            [w.re, w.im]
        },
        |x| {
            let d = f64::from(k) * z(x).powu(k - 1);
            [d.re, -d.im, d.im, d.re]
        },
    )
}

/// `u = Re(v e^{2πik ξ·x})` for a symbol witness `(ξ, v)`.
fn witness_wave(g: &Grid, w: &Witness, k: u32) -> SampledField {
    let (xi, v) = (w.xi(), w.v());
    let freq = 2.0 * std::f64::consts::PI * f64::from(k);
    let phase = move |x: [f64; 2]| (Complex64::i() * freq * (xi[0] * x[0] + xi[1] * x[1])).exp();
    SampledField::analytic(
        g,
        |x| {
            let e = phase(x);
            [(v[0] * e).re, (v[1] * e).re]
        },
        |x| {
            let e = Complex64::i() * freq * phase(x);
            [(v[0] * xi[0] * e).re, (v[0] * xi[1] * e).re, (v[1] * xi[0] * e).re, (v[1] * xi[1] * e).re]
        },
    )
}

#[derive(Debug, Clone, Serialize)]
pub struct OrnsteinRow {
    pub k: u32,
    /// `Σ |Du| h²`
    pub du_l1: f64,
    /// `Σ |𝒜[Du]| h²`
    pub adu_l1: f64,
    pub adu_max: f64,
    /// `du_l1 / adu_l1`, infinite when the denominator vanishes.
    pub ratio: f64,
    pub flagged: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct OrnsteinTable {
    pub operator: String,
    /// "conformal" or "witness"
    pub family: String,
    pub rows: Vec<OrnsteinRow>,
}

/// The `k`-th probe field for a non-C-elliptic operator: conformal powers when 𝒜 annihilates
/// every conformal matrix `aI + bJ`, symbol-witness waves otherwise. Returns the family name.
pub fn probe_field(a: &PartMap, k: u32, g: &Grid) -> Result<(&'static str, SampledField)> {
    let report = classify_ellipticity(a);
    if report.c_elliptic {
        return Err(Error::WrongOperatorClass);
    }
    let conformal = [mat::IDENTITY2, [0.0, -1.0, 1.0, 0.0]]
        .iter()
        .all(|p| mat::norm(&a.apply(p)) <= 1e-14);
    if conformal {
        return Ok(("conformal", conformal_power(g, k)));
    }
    let w = report.witness.ok_or_else(|| Error::Invalid("no symbol witness available".into()))?;
    Ok(("witness", witness_wave(g, &w, k)))
}

/// Tabulates `‖Du‖_{L¹}/‖𝒜[Du]‖_{L¹}` for the probe fields `k = 1..=k_max` on the unit square
/// with `n` cells per side.
pub fn ornstein_probe(a: &PartMap, k_max: u32, n: usize) -> Result<OrnsteinTable> {
    let g = Grid::unit_square(n)?;
    let h2 = g.h * g.h;
    let mut rows = Vec::new();
    let mut family = "conformal";
    if classify_ellipticity(a).c_elliptic {
        return Err(Error::WrongOperatorClass);
    }
    for k in 1..=k_max {
        let (fam, field) = probe_field(a, k, &g)?;
        family = fam;
        let adu = field.apply(a);
        let du_l1 = field.du.values.iter().map(mat::norm).sum::<f64>() * h2;
        let adu_l1 = adu.values.iter().map(mat::norm).sum::<f64>() * h2;
        let adu_max = adu.values.iter().map(mat::norm).fold(0.0, f64::max);
        let flagged = adu_max <= ZERO_TOL;
        let ratio = if flagged { f64::INFINITY } else { du_l1 / adu_l1 };
        rows.push(OrnsteinRow { k, du_l1, adu_l1, adu_max, ratio, flagged });
    }
    Ok(OrnsteinTable { operator: a.label().to_string(), family: family.into(), rows })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn devsym_conformal_powers_are_annihilated() {
        let t = ornstein_probe(&PartMap::preset("devsym").unwrap(), 3, 32).unwrap();
        assert_eq!(t.family, "conformal");
        for r in &t.rows {
            assert!(r.adu_max <= 1e-12 && r.du_l1 > 0.0 && r.flagged);
        }
    }

    #[test]
    fn skew_witness_wave() {
        let t = ornstein_probe(&PartMap::preset("skew").unwrap(), 2, 32).unwrap();
        assert_eq!(t.family, "witness");
        assert!(t.rows.iter().all(|r| r.flagged && r.du_l1 > 0.1));
    }

    #[test]
    fn c_elliptic_rejected() {
        for name in ["grad", "sym", "dev"] {
            assert!(matches!(
                ornstein_probe(&PartMap::preset(name).unwrap(), 1, 8),
                Err(Error::WrongOperatorClass)
            ));
        }
    }
}
