//! Algebra of first-order part maps in 2D, a vanishing-viscosity minimiser for
//! linear-growth integrands, and Orlicz-scale estimate checks on discrete solutions.

pub mod campaign;
pub mod error;
pub mod exact;
pub mod grid;
pub mod integrand;
pub mod lab;
pub mod mat;
pub mod operator;
pub mod orlicz;
pub mod solver;

pub use error::{Error, Result};
