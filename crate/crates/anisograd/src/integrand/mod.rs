//! Convex linear-growth densities on 2x2 matrices.
//!
//! Radial densities are `f(P) = Φ(|P|) + offset`. Their Hessian has eigenvalue
//! `Φ''(|P|)` along `P` and `Φ'(|P|)/|P|` on the orthogonal complement.

mod certify;
mod profile;

use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::grid::MatrixField;
use crate::mat::{self, Mat2, Mat4};

pub use certify::{recession, verify_mu_ellipticity, EllipticityCertificate, DEFAULT_LADDER};
pub use profile::{integrate, AreaProfile, MuProfile, QuadraticProfile, RadialProfile};

#[derive(Debug, Clone)]
enum Kind {
    Radial(Arc<dyn RadialProfile>),
    /// `⟨S, P⟩`
    Affine(Mat2),
}

/// Growth and ellipticity data echoed into reports.
#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct IntegrandConstants {
    pub name: String,
    pub mu: Option<f64>,
    pub c1: f64,
    pub c2: f64,
    pub lambda: f64,
    /// Upper constant for the weight `(1+|P|²)^{-1/2}`.
    #[serde(rename = "Lambda")]
    pub big_lambda: f64,
    pub offset: f64,
}

#[derive(Debug, Clone)]
pub struct Integrand {
    kind: Kind,
    consts: IntegrandConstants,
}

fn unit(p: &Mat2) -> (f64, Mat2) {
    let t = mat::norm(p);
    if t == 0.0 {
        (0.0, [0.0; 4])
    } else {
        (t, mat::scale(1.0 / t, p))
    }
}

/// Log-spaced radii used to read off the radial constants.
fn radial_scan() -> impl Iterator<Item = f64> {
    (0..=1400).map(|k| 10f64.powf(-6.0 + k as f64 * 0.01))
}

impl Integrand {
    /// `Φ'' = (1+t²)^{-μ/2}` with an offset making `c₁|P| ≤ f(P)` hold for `c₁ = Φ'(∞)/2`.
    pub fn mu_elliptic(mu: f64) -> Result<Self> {
        if !(mu > 1.0 && mu <= 3.0) {
            return Err(Error::MuOutOfRange(mu));
        }
        let prof = MuProfile::new(mu);
        let s_inf = prof.slope_at_infinity();
        let c1 = 0.5 * s_inf;
        // Φ'(t*) = c1, then κ = c1 t* − Φ(t*) is the smallest admissible offset.
        let (mut lo, mut hi) = (0.0, 1.0);
        while prof.dphi(hi) < c1 {
            hi *= 2.0;
        }
        for _ in 0..200 {
            let m = 0.5 * (lo + hi);
            if prof.dphi(m) < c1 {
                lo = m;
            } else {
                hi = m;
            }
        }
        let t_star = 0.5 * (lo + hi);
        let offset = c1 * t_star - prof.phi(t_star);

        let mut big_lambda: f64 = 1.0;
        let mut c2 = s_inf.max(offset);
        for t in radial_scan() {
            let w = (1.0 + t * t).sqrt();
            big_lambda = big_lambda.max(prof.ddphi(t) * w).max(prof.dphi_over_t(t) * w);
            c2 = c2
                .max((prof.phi(t) + offset) / (1.0 + t))
                .max(prof.dphi(t))
                .max(c1 * t - t * prof.dphi(t));
        }
        Ok(Integrand {
            kind: Kind::Radial(Arc::new(prof)),
            consts: IntegrandConstants {
                name: "mu_family".into(),
                mu: Some(mu),
                c1,
                c2,
                lambda: 1.0,
                big_lambda,
                offset,
            },
        })
    }

    /// `√(1+|P|²)`, the μ = 3 member of the area family.
    pub fn area() -> Self {
        Integrand {
            kind: Kind::Radial(Arc::new(AreaProfile)),
            consts: IntegrandConstants {
                name: "area".into(),
                mu: Some(3.0),
                c1: 1.0,
                c2: 1.0,
                lambda: 1.0,
                big_lambda: 1.0,
                offset: 0.0,
            },
        }
    }

    /// `½|P|²`; superlinear, used as a probe.
    pub fn quadratic() -> Self {
        Integrand {
            kind: Kind::Radial(Arc::new(QuadraticProfile)),
            consts: IntegrandConstants {
                name: "quadratic".into(),
                mu: None,
                c1: 0.0,
                c2: f64::INFINITY,
                lambda: 1.0,
                big_lambda: f64::INFINITY,
                offset: 0.0,
            },
        }
    }

    /// `⟨S, P⟩ + b`.
    pub fn affine(slope: Mat2, b: f64) -> Self {
        Integrand {
            kind: Kind::Affine(slope),
            consts: IntegrandConstants {
                name: "affine".into(),
                mu: None,
                c1: 0.0,
                c2: mat::norm(&slope).max(b.abs()),
                lambda: 0.0,
                big_lambda: 0.0,
                offset: b,
            },
        }
    }

    pub fn zero() -> Self {
        let mut f = Self::affine([0.0; 4], 0.0);
        f.consts.name = "zero".into();
        f
    }

    /// Config names: `mu_family` (needs `mu`), `area`, `quadratic`, `zero`.
    pub fn from_name(name: &str, mu: Option<f64>) -> Result<Self> {
        match name {
            "mu_family" => {
                let mu = mu.ok_or_else(|| Error::Config("mu_family needs mu".into()))?;
                Self::mu_elliptic(mu)
            }
            "area" => Ok(Self::area()),
            "quadratic" => Ok(Self::quadratic()),
            "zero" => Ok(Self::zero()),
            other => Err(Error::Config(format!("unknown integrand '{other}'"))),
        }
    }

    pub fn constants(&self) -> &IntegrandConstants {
        &self.consts
    }

    pub fn name(&self) -> &str {
        &self.consts.name
    }

    pub fn mu(&self) -> Option<f64> {
        self.consts.mu
    }

    pub fn c1(&self) -> f64 {
        self.consts.c1
    }

    pub fn c2(&self) -> f64 {
        self.consts.c2
    }

    pub fn lambda(&self) -> f64 {
        self.consts.lambda
    }

    pub fn big_lambda(&self) -> f64 {
        self.consts.big_lambda
    }

    /// Radial profile, if any.
    pub fn profile(&self) -> Option<&dyn RadialProfile> {
        match &self.kind {
            Kind::Radial(p) => Some(p.as_ref()),
            Kind::Affine(_) => None,
        }
    }

    pub fn eval(&self, p: &Mat2) -> f64 {
        self.consts.offset
            + match &self.kind {
                Kind::Radial(prof) => prof.phi(mat::norm(p)),
                Kind::Affine(s) => mat::dot(s, p),
            }
    }

    pub fn grad(&self, p: &Mat2) -> Mat2 {
        match &self.kind {
            Kind::Radial(prof) => mat::scale(prof.dphi_over_t(mat::norm(p)), p),
            Kind::Affine(s) => *s,
        }
    }

    /// `⟨D²f(P)ξ, ξ⟩`
    pub fn hess(&self, p: &Mat2, xi: &Mat2) -> f64 {
        match &self.kind {
            Kind::Radial(prof) => {
                let (t, e) = unit(p);
                let (a, b) = (prof.ddphi(t), prof.dphi_over_t(t));
                let along = mat::dot(&e, xi);
                b * mat::dot(xi, xi) + (a - b) * along * along
            }
            Kind::Affine(_) => 0.0,
        }
    }

    pub fn hess_matrix(&self, p: &Mat2) -> Mat4 {
        let mut h = [[0.0; 4]; 4];
        if let Kind::Radial(prof) = &self.kind {
            let (t, e) = unit(p);
            let (a, b) = (prof.ddphi(t), prof.dphi_over_t(t));
            for r in 0..4 {
                for c in 0..4 {
                    h[r][c] = (a - b) * e[r] * e[c];
                }
                h[r][r] += b;
            }
        }
        h
    }

    /// `Φ'(∞)` for radial densities, `|S|` for affine ones.
    pub fn slope_at_infinity(&self) -> f64 {
        match &self.kind {
            Kind::Radial(p) => p.slope_at_infinity(),
            Kind::Affine(s) => mat::norm(s),
        }
    }
}

/// `f_j(P) = f(P) + ε(1+|P|²)/2` with `ε = 1/(A_j j²)`.
#[derive(Debug, Clone)]
pub struct RegularizedIntegrand {
    pub base: Integrand,
    pub j: u32,
    pub a_j: f64,
}

impl RegularizedIntegrand {
    pub fn new(base: Integrand, j: u32, a_j: f64) -> Result<Self> {
        if j == 0 || !(a_j >= 1.0) {
            return Err(Error::Invalid(format!("need j >= 1 and A_j >= 1, got j={j}, A_j={a_j}")));
        }
        Ok(RegularizedIntegrand { base, j, a_j })
    }

    pub fn eps(&self) -> f64 {
        1.0 / (self.a_j * f64::from(self.j) * f64::from(self.j))
    }

    /// The added viscosity term alone.
    pub fn quadratic_term(&self, p: &Mat2) -> f64 {
        0.5 * self.eps() * (1.0 + mat::dot(p, p))
    }

    pub fn eval(&self, p: &Mat2) -> f64 {
        self.base.eval(p) + self.quadratic_term(p)
    }

    pub fn grad(&self, p: &Mat2) -> Mat2 {
        mat::axpy(&self.base.grad(p), self.eps(), p)
    }

    pub fn hess(&self, p: &Mat2, xi: &Mat2) -> f64 {
        self.base.hess(p, xi) + self.eps() * mat::dot(xi, xi)
    }

    pub fn hess_matrix(&self, p: &Mat2) -> Mat4 {
        let mut h = self.base.hess_matrix(p);
        let eps = self.eps();
        for (r, row) in h.iter_mut().enumerate() {
            row[r] += eps;
        }
        h
    }

    /// `c₂ + |P|/(A_j j²)`
    pub fn grad_bound(&self, p: &Mat2) -> f64 {
        self.base.c2() + self.eps() * mat::norm(p)
    }
}

/// `A_j = 1 + Σ (1+|ref|²) h²` over the cells of `reference`.
pub fn viscosity_weight(reference: &MatrixField) -> f64 {
    let h2 = reference.h * reference.h;
    1.0 + reference.values.iter().map(|p| (1.0 + mat::dot(p, p)) * h2).sum::<f64>()
}

pub fn regularize(f: &Integrand, j: u32, reference: &MatrixField) -> Result<RegularizedIntegrand> {
    RegularizedIntegrand::new(f.clone(), j, viscosity_weight(reference))
}
