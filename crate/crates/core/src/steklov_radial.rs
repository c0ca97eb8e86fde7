//! Radial solution of the Steklov-Neumann problem `-Δw + w = 0` on the shell.
//!
//! With `p = n/2`,
//!
//! ```text
//! η(r) = K_p(R₁) I_{p-1}(r) + I_p(R₁) K_{p-1}(r)
//! μ(r) = K_p(R₁) I_p(r)     - I_p(R₁) K_p(r)
//! ```
//!
//! the radial solution is `r^{1-p} η(r)` and its derivative `r^{1-p} μ(r)`.
//! The quotient integrands are `h = r^{2-n} η²` and `f = r^{2-n} η μ`; all
//! their derivatives follow from `η' = (p-1)η/r + μ` and `μ' = -pμ/r + η`.

use crate::error::{Error, Result};
use crate::specfun::{bessel_i, bessel_k, BesselOrder};

/// `η, μ, h, f` for fixed `(n, R₁, R₂)` together with `A₀, A₁, A₂`.
#[derive(Debug, Clone, Copy)]
pub struct SteklovRadialContext {
    pub n: usize,
    pub r1: f64,
    pub r2: f64,
    pub a0: f64,
    pub a1: f64,
    pub a2: f64,
    kp_r1: f64,
    ip_r1: f64,
}

fn check(n: usize, r1: f64, r2: f64) -> Result<()> {
    if n != 2 && n != 3 {
        return Err(Error::InvalidParameter(format!("dimension must be 2 or 3, got {n}")));
    }
    if !(r1 > 0.0 && r2 > r1 && r2.is_finite()) {
        return Err(Error::InvalidParameter(format!("radii must satisfy 0 < r1 < r2, got {r1}, {r2}")));
    }
    Ok(())
}

impl SteklovRadialContext {
    pub fn new(n: usize, r1: f64, r2: f64) -> Result<Self> {
        check(n, r1, r2)?;
        let p = BesselOrder::from_twice(n as u32);
        let mut c = Self {
            n,
            r1,
            r2,
            a0: 0.0,
            a1: 0.0,
            a2: 0.0,
            kp_r1: bessel_k(p, r1)?,
            ip_r1: bessel_i(p, r1)?,
        };
        let w = r2.powi(n as i32 - 1);
        let (f, h) = (c.f(r2), c.h(r2));
        c.a0 = w * f * h;
        c.a1 = w * (f * c.h_prime(r2) - c.f_prime(r2) * h);
        c.a2 = w * (f * c.h_second(r2) - c.f_second(r2) * h);
        Ok(c)
    }

    fn orders(&self) -> (BesselOrder, BesselOrder) {
        let p = BesselOrder::from_twice(self.n as u32);
        (p.pred().expect("n >= 2"), p)
    }

    fn half_n(&self) -> f64 {
        self.n as f64 / 2.0
    }

    pub fn eta(&self, r: f64) -> f64 {
        let (pm1, _) = self.orders();
        let i = bessel_i(pm1, r).unwrap_or(f64::NAN);
        let k = bessel_k(pm1, r).unwrap_or(f64::NAN);
        self.kp_r1 * i + self.ip_r1 * k
    }

    pub fn mu(&self, r: f64) -> f64 {
        let (_, p) = self.orders();
        let i = bessel_i(p, r).unwrap_or(f64::NAN);
        let k = bessel_k(p, r).unwrap_or(f64::NAN);
        self.kp_r1 * i - self.ip_r1 * k
    }

    pub fn eta_prime(&self, r: f64) -> f64 {
        (self.half_n() - 1.0) * self.eta(r) / r + self.mu(r)
    }

    pub fn mu_prime(&self, r: f64) -> f64 {
        -self.half_n() * self.mu(r) / r + self.eta(r)
    }

    fn weight(&self, r: f64) -> f64 {
        r.powi(2 - self.n as i32)
    }

    /// `h = r^{2-n} η²`.
    pub fn h(&self, r: f64) -> f64 {
        self.weight(r) * self.eta(r).powi(2)
    }

    /// `f = r^{2-n} η μ`.
    pub fn f(&self, r: f64) -> f64 {
        self.weight(r) * self.eta(r) * self.mu(r)
    }

    pub fn h_prime(&self, r: f64) -> f64 {
        2.0 * self.f(r)
    }

    pub fn h_second(&self, r: f64) -> f64 {
        2.0 * self.f_prime(r)
    }

    fn q(&self, r: f64) -> (f64, f64) {
        let n = self.n as f64;
        let (e, m) = (self.eta(r), self.mu(r));
        let q = (1.0 - n) * e * m / r + m * m + e * e;
        let dq = (1.0 - 2.0 * n) * m * m / r - e * e / r + 2.0 * (n - 1.0) * e * m / (r * r) + 4.0 * e * m;
        (q, dq)
    }

    pub fn f_prime(&self, r: f64) -> f64 {
        self.weight(r) * self.q(r).0
    }

    pub fn f_second(&self, r: f64) -> f64 {
        let p = 2.0 - self.n as f64;
        let (q, dq) = self.q(r);
        p * r.powf(p - 1.0) * q + self.weight(r) * dq
    }

    /// `(η/μ)'(r) = [(n-1)ημ/r + μ² - η²] / μ²`.
    pub fn eta_over_mu_prime(&self, r: f64) -> f64 {
        let n = self.n as f64;
        let (e, m) = (self.eta(r), self.mu(r));
        ((n - 1.0) * e * m / r + m * m - e * e) / (m * m)
    }

    /// `A₁` from `R₂^{n-1} f(R₂)² (η/μ)'(R₂)`.
    pub fn a1_via_ratio(&self) -> f64 {
        let r = self.r2;
        r.powi(self.n as i32 - 1) * self.f(r).powi(2) * self.eta_over_mu_prime(r)
    }

    /// `(n-1)R₂A₁ + R₂²A₂ + 2nA₀`.
    pub fn lemma_combination(&self) -> f64 {
        let n = self.n as f64;
        (n - 1.0) * self.r2 * self.a1 + self.r2 * self.r2 * self.a2 + 2.0 * n * self.a0
    }

    /// `σ₁(A) = f(R₂)/h(R₂) = μ(R₂)/η(R₂)`.
    pub fn sigma1(&self) -> f64 {
        self.mu(self.r2) / self.eta(self.r2)
    }
}

/// `r^{1-n/2} η(r)`: the radial Steklov-Neumann solution with zero slope at
/// `R₁`.
pub fn radial_solution(n: usize, r1: f64, r: f64) -> Result<f64> {
    if !(r >= r1) {
        return Err(Error::Domain { function: "radial_solution", x: r, detail: "r must be >= r1" });
    }
    let c = SteklovRadialContext::new(n, r1, r.max(r1 * (1.0 + 1e-12)))?;
    Ok(r.powf(1.0 - n as f64 / 2.0) * c.eta(r))
}

/// `σ₁(A_{R₁,R₂}) = μ(R₂)/η(R₂)`.
pub fn sigma1_shell(n: usize, r1: f64, r2: f64) -> Result<f64> {
    Ok(SteklovRadialContext::new(n, r1, r2)?.sigma1())
}

/// Outcome of the sign checks.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SignCertificates {
    pub a1_negative: bool,
    pub lemma35_positive: bool,
    pub eta_over_mu_decreasing: bool,
}

impl SignCertificates {
    pub fn all(&self) -> bool {
        self.a1_negative && self.lemma35_positive && self.eta_over_mu_decreasing
    }
}

/// Number of radii sampled for the monotonicity certificate.
pub const CERTIFICATE_SAMPLES: usize = 200;

/// `A₁ < 0`, `(n-1)R₂A₁ + R₂²A₂ + 2nA₀ > 0` and `(η/μ)' < 0` sampled on
/// [`CERTIFICATE_SAMPLES`] uniform radii of `(R₁ + 1e-6, R₂]`.
pub fn sign_certificates(n: usize, r1: f64, r2: f64) -> Result<SignCertificates> {
    let c = SteklovRadialContext::new(n, r1, r2)?;
    let lo = r1 + 1e-6;
    let decreasing = (1..=CERTIFICATE_SAMPLES).all(|i| {
        let r = lo + (r2 - lo) * i as f64 / CERTIFICATE_SAMPLES as f64;
        c.eta_over_mu_prime(r) < 0.0
    });
    Ok(SignCertificates {
        a1_negative: c.a1 < 0.0,
        lemma35_positive: c.lemma_combination() > 0.0,
        eta_over_mu_decreasing: decreasing,
    })
}

/// Largest value of `|g(x₀+t) - g(x₀) - g'(x₀)t - g''(x₀)t²/2| / (ε t²)` over
/// `0 < |t| ≤ ε` for `(g, x₀) ∈ {(h, R₂), (h, R₁), (f, R₂)}`.
///
/// The second-order Taylor remainder is `O(|t|³)`, so the returned value stays
/// bounded as `ε → 0`.
pub fn taylor_residuals(n: usize, r1: f64, r2: f64, eps: f64) -> Result<f64> {
    if !(eps > 0.0 && eps < r1 / 2.0) {
        return Err(Error::InvalidParameter(format!("eps must lie in (0, r1/2), got {eps}")));
    }
    let c = SteklovRadialContext::new(n, r1, r2)?;
    type Eval = fn(&SteklovRadialContext, f64) -> f64;
    let cases: [(Eval, Eval, Eval, f64); 3] = [
        (SteklovRadialContext::h, SteklovRadialContext::h_prime, SteklovRadialContext::h_second, r2),
        (SteklovRadialContext::h, SteklovRadialContext::h_prime, SteklovRadialContext::h_second, r1),
        (SteklovRadialContext::f, SteklovRadialContext::f_prime, SteklovRadialContext::f_second, r2),
    ];
    let mut worst: f64 = 0.0;
    for (g, dg, d2g, x0) in cases {
        let (v, d, d2) = (g(&c, x0), dg(&c, x0), d2g(&c, x0));
        for j in 1..=16 {
            for sign in [-1.0, 1.0] {
                let t = sign * eps * j as f64 / 16.0;
                let rem = g(&c, x0 + t) - v - d * t - 0.5 * d2 * t * t;
                worst = worst.max(rem.abs() / (eps * t * t));
            }
        }
    }
    Ok(worst)
}
