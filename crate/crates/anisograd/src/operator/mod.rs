//! Part maps 𝒜 on 2x2 matrices and the algebra of the induced first-order operator 𝔸u = 𝒜[Du].
//!
//! Matrices are flattened row-major, `(i, j) ↦ 2i + j` (zero-based), so the tensor
//! `v ⊗ ξ` has entries `v_a ξ_b` and `Du` has entries `∂_b u_a`.

mod decomposition;
mod ellipticity;
mod factorization;
mod kernel;
mod symbol;

pub use decomposition::{build_decomposition, Decomposition, TableTriple};
pub use ellipticity::{classify_ellipticity, EllipticityReport, Witness};
pub use factorization::{build_second_order_factorization, hessian_index, SecondOrderFactorization};
pub use kernel::{kernel_basis, KernelBasis, KernelElement};
pub use symbol::{symbol, symbol_exact, symbol_chart, SymbolMatrix};

use num_rational::BigRational;

use crate::error::{Error, Result};
use crate::exact::{parse_rational, ratio, rationalize, RatMatrix};
use crate::mat::{Mat2, Mat4};

pub const PRESETS: [&str; 5] = ["grad", "sym", "dev", "devsym", "skew"];

#[derive(Clone, Debug)]
pub struct PartMap {
    m: RatMatrix,
    mf: Mat4,
    label: String,
    orthogonal: bool,
    rank: usize,
}

impl PartMap {
    /// Accepts any idempotent 4x4 rational matrix; orthogonality is recorded, not required.
    pub fn new(label: impl Into<String>, m: RatMatrix) -> Result<Self> {
        if m.rows() != 4 || m.cols() != 4 {
            return Err(Error::Invalid(format!("part map must be 4x4, got {}x{}", m.rows(), m.cols())));
        }
        if m.mul(&m) != m {
            return Err(Error::NotAProjection);
        }
        let f = m.to_f64();
        let mut mf = [[0.0; 4]; 4];
        for (r, row) in f.iter().enumerate() {
            mf[r].copy_from_slice(row);
        }
        Ok(PartMap { orthogonal: m.is_symmetric(), rank: m.rank(), m, mf, label: label.into() })
    }

    pub fn preset(name: &str) -> Result<Self> {
        let h = || ratio(1, 2);
        let z = || ratio(0, 1);
        let o = || ratio(1, 1);
        let rows: Vec<Vec<BigRational>> = match name {
            "grad" => return Self::new(name, RatMatrix::identity(4)),
            "sym" => vec![
                vec![o(), z(), z(), z()],
                vec![z(), h(), h(), z()],
                vec![z(), h(), h(), z()],
                vec![z(), z(), z(), o()],
            ],
            "dev" => vec![
                vec![h(), z(), z(), -h()],
                vec![z(), o(), z(), z()],
                vec![z(), z(), o(), z()],
                vec![-h(), z(), z(), h()],
            ],
            "devsym" => vec![
                vec![h(), z(), z(), -h()],
                vec![z(), h(), h(), z()],
                vec![z(), h(), h(), z()],
                vec![-h(), z(), z(), h()],
            ],
            "skew" => vec![
                vec![z(), z(), z(), z()],
                vec![z(), h(), -h(), z()],
                vec![z(), -h(), h(), z()],
                vec![z(), z(), z(), z()],
            ],
            other => return Err(Error::Config(format!("unknown operator preset {other:?}"))),
        };
        Self::new(name, RatMatrix::from_rows(rows))
    }

    /// Rows of "p/q" strings, as read from a config file.
    pub fn from_strings(label: &str, rows: &[Vec<String>]) -> Result<Self> {
        if rows.len() != 4 || rows.iter().any(|r| r.len() != 4) {
            return Err(Error::Config(format!("operator {label:?}: matrix must be 4x4")));
        }
        let parsed = rows
            .iter()
            .map(|r| r.iter().map(|s| parse_rational(s)).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?;
        Self::new(label, RatMatrix::from_rows(parsed))
    }

    /// Float entry point: entries are rationalized within `tol`, then idempotence is checked exactly.
    pub fn from_f64(label: &str, m: &Mat4, tol: f64) -> Result<Self> {
        let rows = m
            .iter()
            .map(|row| row.iter().map(|&x| rationalize(x, tol)).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?;
        Self::new(label, RatMatrix::from_rows(rows))
    }

    pub fn matrix(&self) -> &RatMatrix {
        &self.m
    }

    pub fn matrix_f64(&self) -> &Mat4 {
        &self.mf
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn is_orthogonal(&self) -> bool {
        self.orthogonal
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn apply(&self, p: &Mat2) -> Mat2 {
        crate::mat::mul_vec(&self.mf, p)
    }

    pub fn apply_exact(&self, p: &[BigRational]) -> Vec<BigRational> {
        self.m.mul_vec(p)
    }

    /// The part map `P ↦ T 𝒜[T⁻¹ P R⁻ᵀ] Rᵀ` for invertible 2x2 `T`, `R`.
    pub fn conjugate(&self, t: &RatMatrix, r: &RatMatrix, label: &str) -> Result<Self> {
        let ti = t.inverse().ok_or_else(|| Error::Invalid("T is singular".into()))?;
        let ri = r.inverse().ok_or_else(|| Error::Invalid("R is singular".into()))?;
        let s = t.kron(r);
        let si = ti.kron(&ri);
        Self::new(label, s.mul(&self.m).mul(&si))
    }
}
