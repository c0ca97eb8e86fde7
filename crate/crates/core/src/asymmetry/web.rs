//! The web test function `w = G(d(x))` built from the shell eigenfunction.

use crate::domains::OuterBody;
use crate::error::{Error, Result};
use crate::quadrature::{gauss_fixed, gauss_legendre, integrate};
use crate::shell::{shell_eigenfunction, RadialEigenpair, ShellGeometry};
use std::sync::OnceLock;

fn gl12() -> &'static (Vec<f64>, Vec<f64>) {
    static R: OnceLock<(Vec<f64>, Vec<f64>)> = OnceLock::new();
    R.get_or_init(|| gauss_legendre(12))
}

/// Fraction of the wall thickness next to `R₁` where `Ψ - z_m` and `Ψ'` are
/// computed by integration instead of subtraction.
const NEAR_INNER: f64 = 0.05;

/// `w(x) = G(d(x))` for `d(x) < R₂ - R₁` and `z_m` beyond, where
/// `G(s) = Ψ(R₂ - s)`.
#[derive(Debug, Clone, Copy)]
pub struct WebFunction {
    pub geom: ShellGeometry,
    pub eig: RadialEigenpair,
}

/// Builds the web function of the shell with the given parameters.
pub fn build_web_function(geom: &ShellGeometry) -> Result<WebFunction> {
    WebFunction::new(geom)
}

impl WebFunction {
    pub fn new(geom: &ShellGeometry) -> Result<Self> {
        let eig = shell_eigenfunction(geom)?;
        Ok(Self { geom: *geom, eig })
    }

    /// `R₂ - R₁`.
    pub fn thickness(&self) -> f64 {
        self.geom.r2 - self.geom.r1
    }

    pub fn z_m(&self) -> f64 {
        self.eig.z_m
    }

    pub fn z_max(&self) -> f64 {
        self.eig.z_max
    }

    /// `G(s)`, extended by `z_m` for `s ≥ R₂ - R₁`. Negative distances are
    /// read as zero.
    pub fn value(&self, s: f64) -> f64 {
        if s >= self.thickness() {
            self.eig.z_m
        } else {
            self.eig.psi(self.geom.r2 - s.max(0.0))
        }
    }

    /// `|∇w|` at distance `s` from the outer boundary.
    pub fn grad_norm(&self, s: f64) -> f64 {
        if s >= self.thickness() {
            0.0
        } else {
            self.eig.psi_prime(self.geom.r2 - s.max(0.0))
        }
    }

    /// `|∇w|² + w² - z_m²` at distance `s`; nonnegative and zero on the
    /// plateau.
    pub fn energy_density(&self, s: f64) -> f64 {
        if s >= self.thickness() {
            return 0.0;
        }
        let r = self.geom.r2 - s.max(0.0);
        let g = self.slope(r);
        g * g + self.rise(r) * (self.eig.psi(r) + self.eig.z_m)
    }

    /// `(s, G(s), |∇w|(s))` on `m + 1` equispaced distances in `[0, R₂ - R₁]`.
    pub fn tabulate(&self, m: usize) -> Vec<(f64, f64, f64)> {
        let c = self.thickness();
        (0..=m)
            .map(|i| {
                let s = c * i as f64 / m.max(1) as f64;
                (s, self.value(s), self.grad_norm(s))
            })
            .collect()
    }

    /// `(value, |∇w|)` at `x ∈ Ω̄₀`.
    pub fn evaluate(&self, outer: &OuterBody, x: &[f64]) -> Result<(f64, f64)> {
        let d = outer.distance(x)?;
        Ok((self.value(d), self.grad_norm(d)))
    }

    /// `Ψ'(r)`. Near `R₁` it uses `r^{n-1}Ψ'(r) = -λ₁ ∫_{R₁}^r ρ^{n-1}Ψ dρ`,
    /// which avoids the cancellation around the zero at `R₁`.
    fn slope(&self, r: f64) -> f64 {
        let g = &self.geom;
        if r - g.r1 >= NEAR_INNER * self.thickness() {
            return self.eig.psi_prime(r);
        }
        let k = g.n as i32 - 1;
        let m = gauss_fixed(|p| p.powi(k) * self.eig.psi(p), g.r1, r, gl12());
        -self.eig.lambda1 * m / r.powi(k)
    }

    /// `Ψ(r) - z_m`.
    fn rise(&self, r: f64) -> f64 {
        let g = &self.geom;
        if r - g.r1 >= NEAR_INNER * self.thickness() {
            return self.eig.psi(r) - self.eig.z_m;
        }
        gauss_fixed(|p| self.eig.psi_prime(p), g.r1, r, gl12())
    }

    /// `√(z_M - z_m)`.
    fn sigma_max(&self) -> f64 {
        (self.eig.z_max - self.eig.z_m).sqrt()
    }

    /// Radius where `Ψ = z_m + σ²`, by safeguarded Newton on `√(Ψ - z_m) = σ`.
    fn radius_at(&self, sigma: f64) -> f64 {
        let (mut lo, mut hi) = (self.geom.r1, self.geom.r2);
        if sigma <= 0.0 {
            return lo;
        }
        if sigma >= self.sigma_max() {
            return hi;
        }
        let mut r = lo + (hi - lo) * sigma / self.sigma_max();
        for _ in 0..100 {
            let q = self.rise(r).max(0.0).sqrt();
            let f = q - sigma;
            if f > 0.0 {
                hi = r;
            } else {
                lo = r;
            }
            let df = if q > 0.0 { self.slope(r) / (2.0 * q) } else { 0.0 };
            let mut next = if df > 0.0 { r - f / df } else { f64::NAN };
            if !(next > lo && next < hi) {
                next = 0.5 * (lo + hi);
            }
            let step = (next - r).abs();
            r = next;
            if step <= 1e-15 * self.geom.r2 {
                break;
            }
        }
        r
    }

    /// `ℓ(t) = |∇z|` on the level set `{z = t}`.
    pub fn level_slope(&self, t: f64) -> f64 {
        let sigma = (t - self.eig.z_m).max(0.0).sqrt();
        self.slope(self.radius_at(sigma))
    }

    /// Integrand of `G^{-1}` after `τ = z_m + σ²`: `2σ/ℓ(z_m + σ²)`, which
    /// stays bounded as `σ → 0`.
    fn kernel(&self, sigma: f64) -> f64 {
        let limit = (2.0 / (-self.eig.lambda1 * self.eig.z_m)).sqrt();
        if sigma < 1e-7 * self.sigma_max() {
            return limit;
        }
        let l = self.slope(self.radius_at(sigma));
        if l > 0.0 {
            2.0 * sigma / l
        } else {
            limit
        }
    }

    fn check_level(&self, t: f64) -> Result<()> {
        if !(t >= self.eig.z_m && t <= self.eig.z_max) {
            return Err(Error::Domain { function: "g_inverse", x: t, detail: "level outside [z_m, z_M]" });
        }
        Ok(())
    }

    /// `G^{-1}(t) = ∫_t^{z_M} dτ/ℓ(τ)` by adaptive quadrature.
    pub fn g_inverse_quadrature(&self, t: f64) -> Result<f64> {
        self.check_level(t)?;
        let s0 = (t - self.eig.z_m).max(0.0).sqrt();
        Ok(integrate(|s| self.kernel(s), s0, self.sigma_max(), 1e-14 * self.thickness()))
    }

    /// `G(s)` by numerically inverting [`Self::g_inverse_quadrature`].
    pub fn g_by_inversion(&self, s: f64) -> Result<f64> {
        let c = self.thickness();
        if !(s >= 0.0 && s <= c) {
            return Err(Error::Domain { function: "g_by_inversion", x: s, detail: "distance outside [0, R2-R1]" });
        }
        let smax = self.sigma_max();
        let tol = 1e-14 * c;
        // H(σ) = ∫_σ^{σ_M} kernel is decreasing; solve H(σ) = s, updating H
        // incrementally between iterates
        let (mut lo, mut hi) = (0.0, smax);
        let mut sigma = smax * (1.0 - s / c);
        let mut h = integrate(|x| self.kernel(x), sigma, smax, tol);
        for _ in 0..100 {
            let f = h - s;
            if f > 0.0 {
                lo = sigma;
            } else {
                hi = sigma;
            }
            let mut next = sigma + f / self.kernel(sigma);
            if !(next > lo && next < hi) {
                next = 0.5 * (lo + hi);
            }
            let dh = integrate(|x| self.kernel(x), sigma, next, tol);
            let step = (next - sigma).abs();
            h -= dh;
            sigma = next;
            if step <= 1e-15 * smax {
                break;
            }
        }
        Ok(self.eig.z_m + sigma * sigma)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn web() -> WebFunction {
        WebFunction::new(&ShellGeometry::new(2, -1.0, 1.0, 2.0).unwrap()).unwrap()
    }

    #[test]
    fn endpoints() {
        let w = web();
        assert!((w.value(0.0) - w.z_max()).abs() < 1e-15);
        assert!((w.value(1.0) - w.z_m()).abs() < 1e-14);
        assert_eq!(w.grad_norm(1.5), 0.0);
        assert!(w.energy_density(1.0).abs() < 1e-14);
    }

    #[test]
    fn quadrature_inverse_matches_closed_form() {
        let w = web();
        for i in 0..=20 {
            let t = w.z_m() + (w.z_max() - w.z_m()) * i as f64 / 20.0;
            let s = w.g_inverse_quadrature(t).unwrap();
            assert!((w.value(s) - t).abs() < 1e-10, "{i} {}", w.value(s) - t);
        }
        let s = 0.5;
        assert!((w.g_by_inversion(s).unwrap() - w.value(s)).abs() < 1e-10);
    }

    #[test]
    fn stable_slope_agrees_with_direct_derivative() {
        let w = web();
        for r in [1.001, 1.01, 1.04] {
            assert!((w.slope(r) - w.eig.psi_prime(r)).abs() < 1e-12);
            assert!((w.rise(r) - (w.eig.psi(r) - w.z_m())).abs() < 1e-13);
        }
    }
}
