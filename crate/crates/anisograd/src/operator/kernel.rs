use num_rational::BigRational;
use num_traits::Zero;
use serde_json::{json, Value};

use super::PartMap;
use crate::exact::{format_rational, to_f64};
use crate::mat::Mat2;

/// The affine field x ↦ Bx + b.
#[derive(Clone, Debug, PartialEq)]
pub struct KernelElement {
    pub b_mat: Mat2,
    pub b_vec: [f64; 2],
    pub b_mat_exact: Vec<BigRational>,
}

impl KernelElement {
    pub fn eval(&self, x: [f64; 2]) -> [f64; 2] {
        let b = &self.b_mat;
        [b[0] * x[0] + b[1] * x[1] + self.b_vec[0], b[2] * x[0] + b[3] * x[1] + self.b_vec[1]]
    }
}

#[derive(Clone, Debug)]
pub struct KernelBasis {
    pub elements: Vec<KernelElement>,
}

impl KernelBasis {
    pub fn dim(&self) -> usize {
        self.elements.len()
    }

    pub fn to_json(&self) -> Value {
        Value::Array(
            self.elements
                .iter()
                .map(|e| {
                    json!({
                        "B": e.b_mat_exact.iter().map(format_rational).collect::<Vec<_>>(),
                        "b": e.b_vec,
                    })
                })
                .collect(),
        )
    }
}

/// Nullspace of m as linear parts, followed by the two constant fields.
pub fn kernel_basis(a: &PartMap) -> KernelBasis {
    let mut elements: Vec<KernelElement> = a
        .matrix()
        .nullspace()
        .into_iter()
        .map(|v| KernelElement {
            b_mat: [to_f64(&v[0]), to_f64(&v[1]), to_f64(&v[2]), to_f64(&v[3])],
            b_vec: [0.0, 0.0],
            b_mat_exact: v,
        })
        .collect();
    for b in [[1.0, 0.0], [0.0, 1.0]] {
        elements.push(KernelElement {
            b_mat: [0.0; 4],
            b_vec: b,
            b_mat_exact: vec![BigRational::zero(); 4],
        });
    }
    KernelBasis { elements }
}
