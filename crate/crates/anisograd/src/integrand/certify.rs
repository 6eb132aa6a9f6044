use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::Serialize;

use super::Integrand;
use crate::error::{Error, Result};
use crate::mat::{self, Mat2};

/// Scales `10², 10³, …, 10¹²`.
pub const DEFAULT_LADDER: [f64; 11] = [1e2, 1e3, 1e4, 1e5, 1e6, 1e7, 1e8, 1e9, 1e10, 1e11, 1e12];

const FD_STEP: f64 = 1e-5;
const FD_TOL: f64 = 1e-4;

#[derive(Debug, Clone, Serialize)]
pub struct EllipticityCertificate {
    pub n_samples: usize,
    pub radius: f64,
    /// Exponent of the lower weight `(1+|P|²)^{-μ/2}`; 0 when the density has no μ.
    pub mu_weight: f64,
    /// inf of `⟨D²f(P)ξ,ξ⟩ (1+|P|²)^{μ/2} / |ξ|²`
    pub lambda_hat: f64,
    /// sup of `⟨D²f(P)ξ,ξ⟩ (1+|P|²)^{1/2} / |ξ|²`
    pub big_lambda_hat: f64,
    /// The same supremum with the weight `(1+|P|²)`.
    pub big_lambda_hat_quadratic_weight: f64,
    /// `Λ̂` over the whole radius exceeds twice its value over a tenth of it.
    pub upper_unbounded: bool,
    /// inf of `f(P)/|P|`
    pub c1_hat: f64,
    /// sup of `max(f/(1+|P|), |Df|, c₁|P| − ⟨Df,P⟩)`
    pub c2_hat: f64,
    pub fd_max_rel_error: f64,
    pub fd_ok: bool,
}

fn random_unit(rng: &mut ChaCha8Rng) -> Mat2 {
    loop {
        let v: Mat2 = std::array::from_fn(|_| rng.sample(StandardNormal));
        let n = mat::norm(&v);
        if n > 1e-12 {
            return mat::scale(1.0 / n, &v);
        }
    }
}

/// Samples `n_samples` pairs `(P, ξ)` with `|P| ≤ radius`, half uniform in magnitude and
/// half log-uniform down to `10⁻⁴`.
pub fn verify_mu_ellipticity(f: &Integrand, n_samples: usize, radius: f64, seed: u64) -> Result<EllipticityCertificate> {
    if n_samples < 1000 || !(radius > 0.0) {
        return Err(Error::Invalid("need at least 1000 samples and a positive radius".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mu_weight = f.mu().unwrap_or(0.0);
    let c1 = f.c1();
    let small = 1e-4f64.min(radius);
    let mut cert = EllipticityCertificate {
        n_samples,
        radius,
        mu_weight,
        lambda_hat: f64::INFINITY,
        big_lambda_hat: 0.0,
        big_lambda_hat_quadratic_weight: 0.0,
        upper_unbounded: false,
        c1_hat: f64::INFINITY,
        c2_hat: 0.0,
        fd_max_rel_error: 0.0,
        fd_ok: true,
    };
    let mut inner_big_lambda: f64 = 0.0;
    for k in 0..n_samples {
        let t = if k % 2 == 0 {
            radius * rng.gen::<f64>()
        } else {
            small * (radius / small).powf(rng.gen::<f64>())
        };
        let p = mat::scale(t, &random_unit(&mut rng));
        let xi = random_unit(&mut rng);
        let q = f.hess(&p, &xi);
        if q < -1e-10 {
            return Err(Error::ConvexityViolated(q));
        }
        let w = 1.0 + t * t;
        cert.lambda_hat = cert.lambda_hat.min(q * w.powf(0.5 * mu_weight));
        let upper = q * w.sqrt();
        cert.big_lambda_hat = cert.big_lambda_hat.max(upper);
        if t <= 0.1 * radius {
            inner_big_lambda = inner_big_lambda.max(upper);
        }
        cert.big_lambda_hat_quadratic_weight = cert.big_lambda_hat_quadratic_weight.max(q * w);

        let v = f.eval(&p);
        let g = f.grad(&p);
        if t > 0.0 {
            cert.c1_hat = cert.c1_hat.min(v / t);
        }
        cert.c2_hat = cert
            .c2_hat
            .max(v / (1.0 + t))
            .max(mat::norm(&g))
            .max(c1 * t - mat::dot(&g, &p));

        let gp = f.grad(&mat::axpy(&p, FD_STEP, &xi));
        let gm = f.grad(&mat::axpy(&p, -FD_STEP, &xi));
        let fd = mat::dot(&mat::sub(&gp, &gm), &xi) / (2.0 * FD_STEP);
        let err = (fd - q).abs() / q.abs().max(1e-8);
        cert.fd_max_rel_error = cert.fd_max_rel_error.max(err);
    }
    cert.fd_ok = cert.fd_max_rel_error <= FD_TOL;
    cert.upper_unbounded = cert.big_lambda_hat > 2.0 * inner_big_lambda;
    Ok(cert)
}

/// `lim f(sz)/s` along the ladder, accelerated by Aitken's Δ² on consecutive triples.
pub fn recession(f: &Integrand, z: &Mat2, ladder: &[f64]) -> Result<f64> {
    let nz = mat::norm(z);
    if nz == 0.0 {
        return Ok(0.0);
    }
    if (nz - 1.0).abs() > 1e-12 {
        return Err(Error::Invalid(format!("direction must be a unit matrix, |z| = {nz}")));
    }
    if ladder.len() < 4 {
        return Err(Error::Invalid("ladder needs at least four scales".into()));
    }
    let f0 = f.eval(&[0.0; 4]);
    let quot: Vec<f64> = ladder.iter().map(|&s| f.eval(&mat::scale(s, z)) / s).collect();
    // Convexity makes (f(sz) − f(0))/s nondecreasing in s.
    let shifted: Vec<f64> = ladder.iter().zip(&quot).map(|(&s, &q)| q - f0 / s).collect();
    if shifted.windows(2).any(|w| w[1] < w[0] - 1e-12 * w[0].abs().max(1.0)) {
        return Err(Error::Invalid("difference quotient is not monotone; density not convex".into()));
    }
    let n = quot.len();
    let (d1, d2) = ((quot[n - 1] - quot[n - 2]).abs(), (quot[n - 2] - quot[n - 3]).abs());
    if d1 > d2 && d1 > 1e-12 {
        // Aitken would map a diverging geometric sequence to its antilimit.
        return Err(Error::NotConverged(d1));
    }
    let ext: Vec<f64> = quot
        .windows(3)
        .map(|w| {
            let d = w[2] - 2.0 * w[1] + w[0];
            if d.abs() <= 1e-15 * w[2].abs().max(1.0) {
                w[2]
            } else {
                w[2] - (w[2] - w[1]).powi(2) / d
            }
        })
        .collect();
    let (a, b) = (ext[ext.len() - 2], ext[ext.len() - 1]);
    let change = (b - a).abs();
    if !b.is_finite() || change > 1e-6 {
        return Err(Error::NotConverged(change));
    }
    Ok(b)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mu_family_certificate() {
        let f = Integrand::mu_elliptic(1.5).unwrap();
        let c = verify_mu_ellipticity(&f, 4000, 1e3, 7).unwrap();
        assert!(c.lambda_hat >= f.lambda() * (1.0 - 1e-9) && c.lambda_hat > 0.0);
        assert!(c.big_lambda_hat <= f.big_lambda() * (1.0 + 1e-9));
        assert!(c.c1_hat >= f.c1() * (1.0 - 1e-12));
        assert!(c.c2_hat <= f.c2() * (1.0 + 1e-12));
        assert!(c.fd_ok, "{}", c.fd_max_rel_error);
        assert!(!c.upper_unbounded);
    }

    #[test]
    fn quadratic_probe_is_flagged() {
        let c = verify_mu_ellipticity(&Integrand::quadratic(), 2000, 1e3, 1).unwrap();
        assert!(c.upper_unbounded);
    }

    #[test]
    fn affine_has_zero_lambda() {
        let f = Integrand::affine([1.0, 0.0, -2.0, 0.5], 0.3);
        let c = verify_mu_ellipticity(&f, 1000, 10.0, 3).unwrap();
        assert_eq!(c.lambda_hat, 0.0);
    }

    #[test]
    fn recession_limits() {
        let z = [0.5, -0.5, 0.5, 0.5];
        let f = Integrand::mu_elliptic(2.0).unwrap();
        let v = recession(&f, &z, &DEFAULT_LADDER).unwrap();
        assert!((v - std::f64::consts::FRAC_PI_2).abs() < 1e-8, "{v}");
        let v = recession(&Integrand::area(), &z, &DEFAULT_LADDER).unwrap();
        assert!((v - 1.0).abs() < 1e-10);
        assert_eq!(recession(&f, &[0.0; 4], &DEFAULT_LADDER).unwrap(), 0.0);
        assert!(recession(&f, &[2.0, 0.0, 0.0, 0.0], &DEFAULT_LADDER).is_err());
        assert!(matches!(
            recession(&Integrand::quadratic(), &z, &DEFAULT_LADDER),
            Err(Error::NotConverged(_))
        ));
    }

    #[test]
    fn recession_slow_tail() {
        let f = Integrand::mu_elliptic(1.2).unwrap();
        let v = recession(&f, &[1.0, 0.0, 0.0, 0.0], &DEFAULT_LADDER).unwrap();
        assert!((v - f.slope_at_infinity()).abs() < 1e-6, "{v} vs {}", f.slope_at_infinity());
    }
}
