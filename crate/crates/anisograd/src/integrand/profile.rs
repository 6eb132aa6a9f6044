use std::fmt::Debug;

/// Radial profile Φ with f(P) = Φ(|P|).
pub trait RadialProfile: Send + Sync + Debug {
    fn phi(&self, t: f64) -> f64;
    fn dphi(&self, t: f64) -> f64;
    fn ddphi(&self, t: f64) -> f64;
    /// Φ'(t)/t, continuous at 0.
    fn dphi_over_t(&self, t: f64) -> f64;
    /// lim Φ'(t) as t → ∞ (infinite for superlinear profiles).
    fn slope_at_infinity(&self) -> f64;
}

#[derive(Debug)]
pub struct QuadraticProfile;

impl RadialProfile for QuadraticProfile {
    fn phi(&self, t: f64) -> f64 {
        0.5 * t * t
    }
    fn dphi(&self, t: f64) -> f64 {
        t
    }
    fn ddphi(&self, _t: f64) -> f64 {
        1.0
    }
    fn dphi_over_t(&self, _t: f64) -> f64 {
        1.0
    }
    fn slope_at_infinity(&self) -> f64 {
        f64::INFINITY
    }
}

/// Φ(t) = √(1+t²).
#[derive(Debug)]
pub struct AreaProfile;

impl RadialProfile for AreaProfile {
    fn phi(&self, t: f64) -> f64 {
        t.hypot(1.0)
    }
    fn dphi(&self, t: f64) -> f64 {
        t / t.hypot(1.0)
    }
    fn ddphi(&self, t: f64) -> f64 {
        t.hypot(1.0).powi(-3)
    }
    fn dphi_over_t(&self, t: f64) -> f64 {
        1.0 / t.hypot(1.0)
    }
    fn slope_at_infinity(&self) -> f64 {
        1.0
    }
}

const GL8: [(f64, f64); 4] = [
    (0.183_434_642_495_649_8, 0.362_683_783_378_362_0),
    (0.525_532_409_916_329_0, 0.313_706_645_877_887_3),
    (0.796_666_477_413_626_7, 0.222_381_034_453_374_5),
    (0.960_289_856_497_536_3, 0.101_228_536_290_376_3),
];

fn gauss_legendre(f: &impl Fn(f64) -> f64, a: f64, b: f64) -> f64 {
    let (c, r) = (0.5 * (a + b), 0.5 * (b - a));
    r * GL8.iter().map(|&(x, w)| w * (f(c - r * x) + f(c + r * x))).sum::<f64>()
}

fn adaptive(f: &impl Fn(f64) -> f64, a: f64, b: f64, whole: f64, depth: u32) -> f64 {
    let m = 0.5 * (a + b);
    let (l, r) = (gauss_legendre(f, a, m), gauss_legendre(f, m, b));
    if depth == 0 || (l + r - whole).abs() <= 1e-16 * (l + r).abs().max(1e-300) {
        l + r
    } else {
        adaptive(f, a, m, l, depth - 1) + adaptive(f, m, b, r, depth - 1)
    }
}

/// Adaptive Gauss-Legendre (8 points per panel) on [a, b].
pub fn integrate(f: impl Fn(f64) -> f64, a: f64, b: f64) -> f64 {
    let whole = gauss_legendre(&f, a, b);
    adaptive(&f, a, b, whole, 30)
}

/// Quintic Hermite interpolant on [0, 1] from values, first and second derivatives
/// (derivatives already scaled by the panel width).
fn quintic_hermite(s: f64, y0: f64, d0: f64, c0: f64, y1: f64, d1: f64, c1: f64) -> f64 {
    let s2 = s * s;
    let s3 = s2 * s;
    let s4 = s3 * s;
    let s5 = s4 * s;
    let h0 = 1.0 - 10.0 * s3 + 15.0 * s4 - 6.0 * s5;
    let h1 = s - 6.0 * s3 + 8.0 * s4 - 3.0 * s5;
    let h2 = 0.5 * s2 - 1.5 * s3 + 1.5 * s4 - 0.5 * s5;
    let h3 = 0.5 * s3 - s4 + 0.5 * s5;
    let h4 = -4.0 * s3 + 7.0 * s4 - 3.0 * s5;
    let h5 = 10.0 * s3 - 15.0 * s4 + 6.0 * s5;
    y0 * h0 + d0 * h1 + c0 * h2 + c1 * h3 + d1 * h4 + y1 * h5
}

const SERIES_CUTOFF: f64 = 0.25;
const SPLINE_END: f64 = 16.0;
const KNOTS_PER_UNIT: usize = 64;
const SERIES_TERMS: usize = 40;
const TAIL_TERMS: usize = 16;

/// Φ_μ'' = (1+t²)^{−μ/2}, Φ_μ(0) = Φ_μ'(0) = 0.
#[derive(Debug, Clone)]
pub struct MuProfile {
    mu: f64,
    /// binomial coefficients C(−μ/2, k)
    binom: Vec<f64>,
    knots_dphi: Vec<f64>,
    s_inf: f64,
}

impl MuProfile {
    pub fn new(mu: f64) -> Self {
        let mut binom = Vec::with_capacity(SERIES_TERMS);
        let mut c = 1.0;
        for k in 0..SERIES_TERMS {
            binom.push(c);
            c *= (-0.5 * mu - k as f64) / (k as f64 + 1.0);
        }
        let n = (SPLINE_END as usize) * KNOTS_PER_UNIT;
        let dt = 1.0 / KNOTS_PER_UNIT as f64;
        let g = |s: f64| (1.0 + s * s).powf(-0.5 * mu);
        let mut knots_dphi = Vec::with_capacity(n + 1);
        knots_dphi.push(0.0);
        let mut acc = 0.0;
        for k in 0..n {
            acc += integrate(g, k as f64 * dt, (k + 1) as f64 * dt);
            knots_dphi.push(acc);
        }
        let mut p = MuProfile { mu, binom, knots_dphi, s_inf: f64::INFINITY };
        if mu > 1.0 {
            p.s_inf = acc + p.tail(SPLINE_END);
        }
        p
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    /// ∫_t^∞ (1+s²)^{−μ/2} ds for t ≥ SPLINE_END.
    fn tail(&self, t: f64) -> f64 {
        let mu = self.mu;
        let inv2 = 1.0 / (t * t);
        let mut pw = t.powf(1.0 - mu);
        let mut sum = 0.0;
        for k in 0..TAIL_TERMS {
            sum += self.binom[k] * pw / (mu + 2.0 * k as f64 - 1.0);
            pw *= inv2;
        }
        sum
    }

    /// ∫₀ᵗ s(1+s²)^{−μ/2} ds
    fn first_moment(&self, t: f64) -> f64 {
        let e = 1.0 - 0.5 * self.mu;
        let l = (t * t).ln_1p();
        if e.abs() < 1e-12 {
            0.5 * l
        } else {
            (e * l).exp_m1() / (2.0 * e)
        }
    }

    fn series(&self, t: f64, f: impl Fn(usize) -> f64, start_power: i32) -> f64 {
        let t2 = t * t;
        let mut pw = t.powi(start_power);
        let mut sum = 0.0;
        for (k, c) in self.binom.iter().enumerate() {
            let term = c * pw * f(k);
            sum += term;
            if term.abs() < 1e-18 * sum.abs() {
                break;
            }
            pw *= t2;
        }
        sum
    }
}

impl RadialProfile for MuProfile {
    fn phi(&self, t: f64) -> f64 {
        if t <= SERIES_CUTOFF {
            self.series(t, |k| 1.0 / ((2 * k + 1) as f64 * (2 * k + 2) as f64), 2)
        } else {
            // Φ(t) = tΦ'(t) − ∫₀ᵗ sΦ''(s) ds
            t * self.dphi(t) - self.first_moment(t)
        }
    }

    fn dphi(&self, t: f64) -> f64 {
        if t <= SERIES_CUTOFF {
            return self.series(t, |k| 1.0 / (2 * k + 1) as f64, 1);
        }
        if t >= SPLINE_END {
            return if self.mu > 1.0 {
                self.s_inf - self.tail(t)
            } else {
                self.knots_dphi[self.knots_dphi.len() - 1]
                    + integrate(|s| self.ddphi(s), SPLINE_END, t)
            };
        }
        let dt = 1.0 / KNOTS_PER_UNIT as f64;
        let x = t * KNOTS_PER_UNIT as f64;
        let k = (x.floor() as usize).min(self.knots_dphi.len() - 2);
        let s = x - k as f64;
        let (t0, t1) = (k as f64 * dt, (k + 1) as f64 * dt);
        let d = |t: f64| -self.mu * t * (1.0 + t * t).powf(-0.5 * self.mu - 1.0);
        quintic_hermite(
            s,
            self.knots_dphi[k],
            dt * self.ddphi(t0),
            dt * dt * d(t0),
            self.knots_dphi[k + 1],
            dt * self.ddphi(t1),
            dt * dt * d(t1),
        )
    }

    fn ddphi(&self, t: f64) -> f64 {
        (1.0 + t * t).powf(-0.5 * self.mu)
    }

    fn dphi_over_t(&self, t: f64) -> f64 {
        if t <= SERIES_CUTOFF {
            self.series(t, |k| 1.0 / (2 * k + 1) as f64, 0)
        } else {
            self.dphi(t) / t
        }
    }

    fn slope_at_infinity(&self) -> f64 {
        self.s_inf
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hermite_basis_reproduces_quintic() {
        let p = |s: f64| 1.0 + 2.0 * s - s * s + 0.5 * s.powi(3) - 3.0 * s.powi(4) + s.powi(5);
        let d = |s: f64| 2.0 - 2.0 * s + 1.5 * s * s - 12.0 * s.powi(3) + 5.0 * s.powi(4);
        let c = |s: f64| -2.0 + 3.0 * s - 36.0 * s * s + 20.0 * s.powi(3);
        for s in [0.0, 0.3, 0.77, 1.0] {
            let v = quintic_hermite(s, p(0.0), d(0.0), c(0.0), p(1.0), d(1.0), c(1.0));
            assert!((v - p(s)).abs() < 1e-13);
        }
    }

    #[test]
    fn mu2_is_arctan() {
        let p = MuProfile::new(2.0);
        for t in [0.0, 0.1, 0.25, 0.26, 1.0, 3.7, 15.99, 16.0, 40.0, 1e6] {
            assert!((p.dphi(t) - t.atan()).abs() <= 1e-10 * t.atan().max(1e-300), "t={t}");
            // Φ = t arctan t − ½ ln(1+t²)
            let phi = t * t.atan() - 0.5 * (t * t).ln_1p();
            assert!((p.phi(t) - phi).abs() <= 1e-10 * phi.max(1e-300), "t={t}");
        }
        assert!((p.slope_at_infinity() - std::f64::consts::FRAC_PI_2).abs() < 1e-14);
    }

    #[test]
    fn mu3_is_area_derivative() {
        let p = MuProfile::new(3.0);
        for t in [0.05, 0.5, 2.0, 12.0, 100.0] {
            assert!((p.dphi(t) - t / t.hypot(1.0)).abs() < 1e-12);
            assert!((p.phi(t) - (t.hypot(1.0) - 1.0)).abs() < 1e-12 * t.max(1.0));
        }
        assert!((p.slope_at_infinity() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn continuity_across_pieces() {
        for mu in [1.2, 1.5, 1.8, 2.5] {
            let p = MuProfile::new(mu);
            for t0 in [SERIES_CUTOFF, SPLINE_END] {
                let (a, b) = (p.dphi(t0 * (1.0 - 1e-12)), p.dphi(t0 * (1.0 + 1e-12)));
                assert!((a - b).abs() < 1e-11 * a, "mu={mu} t={t0}");
                let (a, b) = (p.phi(t0 * (1.0 - 1e-12)), p.phi(t0 * (1.0 + 1e-12)));
                assert!((a - b).abs() < 1e-11 * a, "mu={mu} t={t0}");
            }
        }
    }
}
