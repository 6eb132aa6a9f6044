//! Uniform 2D grids, node and cell fields, forward-difference calculus, ball regions and cutoffs.

mod cutoff;
mod io;
pub(crate) mod ops;

pub use cutoff::{build_cutoff, check_bounds, cutoff_profile, CutoffField, GRADIENT_BOUND, QUINTIC_SECOND_DERIVATIVE_BOUND};
pub use io::{fmt_f64, read_csv, write_csv};
pub use ops::{
    adjoint_a, apply_a, difference_quotient, gradient, total_a_variation, Axis,
};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Grid {
    pub nx: usize,
    pub ny: usize,
    pub h: f64,
    pub origin: [f64; 2],
}

impl Grid {
    pub fn new(nx: usize, ny: usize, h: f64, origin: [f64; 2]) -> Result<Self> {
        if nx < 3 || ny < 3 {
            return Err(Error::DomainTooSmall(format!("grid needs at least 3x3 nodes, got {nx}x{ny}")));
        }
        if !(h > 0.0 && h.is_finite()) {
            return Err(Error::Invalid(format!("grid spacing must be positive, got {h}")));
        }
        Ok(Grid { nx, ny, h, origin })
    }

    /// The unit square split into `n x n` cells.
    pub fn unit_square(n: usize) -> Result<Self> {
        Self::new(n + 1, n + 1, 1.0 / n as f64, [0.0, 0.0])
    }

    pub fn node(&self, i: usize, j: usize) -> [f64; 2] {
        [self.origin[0] + i as f64 * self.h, self.origin[1] + j as f64 * self.h]
    }

    pub fn cell_center(&self, i: usize, j: usize) -> [f64; 2] {
        [
            self.origin[0] + (i as f64 + 0.5) * self.h,
            self.origin[1] + (j as f64 + 0.5) * self.h,
        ]
    }

    pub fn cells_x(&self) -> usize {
        self.nx - 1
    }

    pub fn cells_y(&self) -> usize {
        self.ny - 1
    }

    pub fn is_boundary(&self, i: usize, j: usize) -> bool {
        i == 0 || j == 0 || i == self.nx - 1 || j == self.ny - 1
    }

    pub fn area(&self) -> f64 {
        (self.cells_x() * self.cells_y()) as f64 * self.h * self.h
    }
}

/// Per-site value of a field.
pub trait Value: Copy + Default + PartialEq + std::fmt::Debug {
    const COMPONENTS: usize;
    fn component(&self, k: usize) -> f64;
    fn from_components(c: &[f64]) -> Self;

    fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        let c: Vec<f64> = (0..Self::COMPONENTS).map(|k| f(self.component(k))).collect();
        Self::from_components(&c)
    }

    fn zip(&self, other: &Self, f: impl Fn(f64, f64) -> f64) -> Self {
        let c: Vec<f64> =
            (0..Self::COMPONENTS).map(|k| f(self.component(k), other.component(k))).collect();
        Self::from_components(&c)
    }

    fn norm(&self) -> f64 {
        (0..Self::COMPONENTS).map(|k| self.component(k).powi(2)).sum::<f64>().sqrt()
    }
}

impl Value for f64 {
    const COMPONENTS: usize = 1;
    fn component(&self, _k: usize) -> f64 {
        *self
    }
    fn from_components(c: &[f64]) -> Self {
        c[0]
    }
}

impl<const N: usize> Value for [f64; N]
where
    [f64; N]: Default,
{
    const COMPONENTS: usize = N;
    fn component(&self, k: usize) -> f64 {
        self[k]
    }
    fn from_components(c: &[f64]) -> Self {
        std::array::from_fn(|k| c[k])
    }
}

/// Values on an `nx x ny` lattice with spacing `h`; site (i, j) sits at `origin + h(i, j)`
/// and is stored at `j * nx + i`.
#[derive(Clone, Debug, PartialEq)]
pub struct Field<T> {
    pub nx: usize,
    pub ny: usize,
    pub h: f64,
    pub origin: [f64; 2],
    pub values: Vec<T>,
}

pub type ScalarField = Field<f64>;
pub type VectorField = Field<[f64; 2]>;
pub type MatrixField = Field<[f64; 4]>;
/// The six second derivatives (∂₁²u₁, ∂₁∂₂u₁, ∂₂²u₁, ∂₁²u₂, ∂₁∂₂u₂, ∂₂²u₂) per cell.
pub type HessianField = Field<[f64; 6]>;

impl<T: Value> Field<T> {
    pub fn filled(nx: usize, ny: usize, h: f64, origin: [f64; 2], v: T) -> Self {
        Field { nx, ny, h, origin, values: vec![v; nx * ny] }
    }

    pub fn from_fn(nx: usize, ny: usize, h: f64, origin: [f64; 2], f: impl Fn([f64; 2]) -> T) -> Self {
        let mut values = Vec::with_capacity(nx * ny);
        for j in 0..ny {
            for i in 0..nx {
                values.push(f([origin[0] + i as f64 * h, origin[1] + j as f64 * h]));
            }
        }
        Field { nx, ny, h, origin, values }
    }

    /// Node field on `g`.
    pub fn on_nodes(g: &Grid, f: impl Fn([f64; 2]) -> T) -> Self {
        Self::from_fn(g.nx, g.ny, g.h, g.origin, f)
    }

    /// Cell field on `g`, sampled at cell centres.
    pub fn on_cells(g: &Grid, f: impl Fn([f64; 2]) -> T) -> Self {
        let o = [g.origin[0] + 0.5 * g.h, g.origin[1] + 0.5 * g.h];
        Self::from_fn(g.cells_x(), g.cells_y(), g.h, o, f)
    }

    pub fn zeros_like_nodes(g: &Grid) -> Self {
        Self::filled(g.nx, g.ny, g.h, g.origin, T::default())
    }

    pub fn zeros_like_cells(g: &Grid) -> Self {
        let o = [g.origin[0] + 0.5 * g.h, g.origin[1] + 0.5 * g.h];
        Self::filled(g.cells_x(), g.cells_y(), g.h, o, T::default())
    }

    pub fn idx(&self, i: usize, j: usize) -> usize {
        j * self.nx + i
    }

    pub fn get(&self, i: usize, j: usize) -> T {
        self.values[j * self.nx + i]
    }

    pub fn set(&mut self, i: usize, j: usize, v: T) {
        let k = self.idx(i, j);
        self.values[k] = v;
    }

    pub fn position(&self, i: usize, j: usize) -> [f64; 2] {
        [self.origin[0] + i as f64 * self.h, self.origin[1] + j as f64 * self.h]
    }

    pub fn map<U: Value>(&self, f: impl Fn(&T) -> U) -> Field<U> {
        Field {
            nx: self.nx,
            ny: self.ny,
            h: self.h,
            origin: self.origin,
            values: self.values.iter().map(f).collect(),
        }
    }

    pub fn scaled(&self, s: f64) -> Self {
        self.map(|v| v.map(|x| s * x))
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!((self.nx, self.ny), (other.nx, other.ny), "field shapes differ");
        let mut out = self.clone();
        for (a, b) in out.values.iter_mut().zip(&other.values) {
            *a = a.zip(b, |x, y| x + y);
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scaled(-1.0))
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a.zip(b, |x, y| x - y).norm())
            .fold(0.0, f64::max)
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| (0..T::COMPONENTS).all(|k| v.component(k).is_finite()))
    }
}

impl VectorField {
    pub fn grid(&self) -> Grid {
        Grid { nx: self.nx, ny: self.ny, h: self.h, origin: self.origin }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BallRegion {
    pub center: [f64; 2],
    pub radius: f64,
}

impl BallRegion {
    pub fn new(center: [f64; 2], radius: f64) -> Result<Self> {
        if !(radius > 0.0) {
            return Err(Error::Invalid(format!("ball radius must be positive, got {radius}")));
        }
        Ok(BallRegion { center, radius })
    }

    pub fn contains(&self, x: [f64; 2]) -> bool {
        let d = ((x[0] - self.center[0]).powi(2) + (x[1] - self.center[1]).powi(2)).sqrt();
        d < self.radius
    }

    pub fn scaled(&self, s: f64) -> Self {
        BallRegion { center: self.center, radius: s * self.radius }
    }

    /// Whether the ball lies in the closed grid rectangle.
    pub fn inside(&self, g: &Grid) -> bool {
        let lo = g.origin;
        let hi = [g.origin[0] + g.cells_x() as f64 * g.h, g.origin[1] + g.cells_y() as f64 * g.h];
        let tol = 1e-12 * g.h;
        (0..2).all(|k| self.center[k] - self.radius >= lo[k] - tol && self.center[k] + self.radius <= hi[k] + tol)
    }

    /// Cells whose centre lies in the ball.
    pub fn cells(&self, g: &Grid) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for j in 0..g.cells_y() {
            for i in 0..g.cells_x() {
                if self.contains(g.cell_center(i, j)) {
                    out.push((i, j));
                }
            }
        }
        out
    }

    /// Sites of any field whose position lies in the ball.
    pub fn sites<T: Value>(&self, field: &Field<T>) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for j in 0..field.ny {
            for i in 0..field.nx {
                if self.contains(field.position(i, j)) {
                    out.push((i, j));
                }
            }
        }
        out
    }

    pub fn nodes(&self, g: &Grid) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for j in 0..g.ny {
            for i in 0..g.nx {
                if self.contains(g.node(i, j)) {
                    out.push((i, j));
                }
            }
        }
        out
    }
}
