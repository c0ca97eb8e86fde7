//! First Robin-Neumann eigenpair of the spherical shell `B_{R2} \ B̄_{R1}`.
//!
//! For `β < 0` the eigenvalue is negative, so with `κ = √(-λ₁)` and
//! `ν = n/2 - 1` the radial profile is
//!
//! ```text
//! Ψ(r) = r^{-ν} [K_{ν+1}(κR₁) I_ν(κr) + I_{ν+1}(κR₁) K_ν(κr)]
//! Ψ'(r) = κ r^{-ν} [K_{ν+1}(κR₁) I_{ν+1}(κr) - I_{ν+1}(κR₁) K_{ν+1}(κr)]
//! ```
//!
//! which satisfies the Neumann condition at `R₁` identically. `κ` is fixed by
//! the Robin condition `Ψ'(R₂) + βΨ(R₂) = 0`.

use crate::error::{Error, Result};
use crate::optim;
use crate::quadrature;
use crate::specfun::{bessel_i_scaled, bessel_k_scaled, BesselOrder};
use crate::unit_ball_volume;
use serde::{Deserialize, Serialize};

/// Problem parameters: dimension, Robin parameter and the reference shell.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ShellGeometry {
    pub n: usize,
    pub beta: f64,
    pub r1: f64,
    pub r2: f64,
}

impl ShellGeometry {
    pub fn new(n: usize, beta: f64, r1: f64, r2: f64) -> Result<Self> {
        let g = Self { n, beta, r1, r2 };
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n != 2 && self.n != 3 {
            return Err(Error::InvalidParameter(format!("dimension must be 2 or 3, got {}", self.n)));
        }
        if !(self.beta < 0.0 && self.beta.is_finite()) {
            return Err(Error::InvalidParameter(format!("beta must be negative, got {}", self.beta)));
        }
        if !(self.r1 > 0.0 && self.r2 > self.r1 && self.r2.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "radii must satisfy 0 < r1 < r2, got r1 = {}, r2 = {}",
                self.r1, self.r2
            )));
        }
        Ok(())
    }

    pub fn with_beta(&self, beta: f64) -> Self {
        Self { beta, ..*self }
    }

    /// `ω_n`, the volume of the unit ball.
    pub fn omega(&self) -> f64 {
        unit_ball_volume(self.n)
    }

    /// `|A_{R₁,R₂}| = ω_n (R₂ⁿ - R₁ⁿ)`.
    pub fn shell_volume(&self) -> f64 {
        self.omega() * (self.r2.powi(self.n as i32) - self.r1.powi(self.n as i32))
    }

    /// `P(B_{R₂}) = n ω_n R₂^{n-1}`.
    pub fn outer_perimeter(&self) -> f64 {
        self.n as f64 * self.omega() * self.r2.powi(self.n as i32 - 1)
    }

    /// `|B_{R₁}| = ω_n R₁ⁿ`.
    pub fn hole_volume(&self) -> f64 {
        self.omega() * self.r1.powi(self.n as i32)
    }

    fn nu(&self) -> BesselOrder {
        // n/2 - 1
        BesselOrder::from_twice(self.n as u32 - 2)
    }
}

/// Unnormalized profile for a fixed `κ`, scaled by `e^{κ(R₁-R₂)}` so that it
/// stays `O(1)` on `[R₁, R₂]` even for large `κ`.
#[derive(Debug, Clone, Copy)]
struct Profile {
    n: usize,
    r1: f64,
    r2: f64,
    kappa: f64,
    nu: BesselOrder,
    /// `e^{κR₁} K_{ν+1}(κR₁)`
    ks1: f64,
    /// `e^{-κR₁} I_{ν+1}(κR₁)`
    is1: f64,
}

impl Profile {
    fn new(geom: &ShellGeometry, kappa: f64) -> Result<Self> {
        let nu = geom.nu();
        let a = kappa * geom.r1;
        Ok(Self {
            n: geom.n,
            r1: geom.r1,
            r2: geom.r2,
            kappa,
            nu,
            ks1: bessel_k_scaled(nu.succ(), a)?,
            is1: bessel_i_scaled(nu.succ(), a)?,
        })
    }

    fn value(&self, r: f64) -> f64 {
        let k = self.kappa;
        let x = k * r;
        let is = bessel_i_scaled(self.nu, x).unwrap_or(f64::NAN);
        let ks = bessel_k_scaled(self.nu, x).unwrap_or(f64::NAN);
        let inner = self.ks1 * is + (2.0 * k * (self.r1 - r)).exp() * self.is1 * ks;
        r.powf(-self.nu.nu()) * (k * (r - self.r2)).exp() * inner
    }

    fn derivative(&self, r: f64) -> f64 {
        let k = self.kappa;
        let x = k * r;
        let nu1 = self.nu.succ();
        let is = bessel_i_scaled(nu1, x).unwrap_or(f64::NAN);
        let ks = bessel_k_scaled(nu1, x).unwrap_or(f64::NAN);
        let inner = self.ks1 * is - (2.0 * k * (self.r1 - r)).exp() * self.is1 * ks;
        k * r.powf(-self.nu.nu()) * (k * (r - self.r2)).exp() * inner
    }

    fn l2_norm_sq(&self) -> f64 {
        let n = self.n;
        let omega = unit_ball_volume(n);
        let scale = self.value(self.r2).powi(2) * self.r2.powi(n as i32 - 1) * (self.r2 - self.r1);
        let integral = quadrature::integrate(
            |r| self.value(r).powi(2) * r.powi(n as i32 - 1),
            self.r1,
            self.r2,
            1e-15 * scale,
        );
        n as f64 * omega * integral
    }
}

/// Robin residual `Ψ'(R₂)/Ψ(R₂) + β` as a function of `κ`.
fn robin_residual(geom: &ShellGeometry, kappa: f64) -> f64 {
    match Profile::new(geom, kappa) {
        Ok(p) => p.derivative(geom.r2) / p.value(geom.r2) + geom.beta,
        Err(_) => f64::NAN,
    }
}

fn kappa_max(geom: &ShellGeometry) -> f64 {
    10.0 * geom.beta.abs().max(1.0) * (1.0 / (geom.r2 - geom.r1)).max(1.0)
}

fn find_kappa(geom: &ShellGeometry, kappa_lo: f64, kappa_hi: f64, samples: usize) -> Result<f64> {
    let ratio = (kappa_hi / kappa_lo).ln();
    let mut prev_k = kappa_lo;
    let mut prev_f = robin_residual(geom, prev_k);
    for i in 1..=samples {
        let k = kappa_lo * (ratio * i as f64 / samples as f64).exp();
        let f = robin_residual(geom, k);
        if prev_f.is_finite() && f.is_finite() && (prev_f < 0.0) != (f < 0.0) {
            let root = optim::brent(|x| robin_residual(geom, x), prev_k, k, 1e-16 * k)
                .unwrap_or_else(|| optim::bisect(|x| robin_residual(geom, x), prev_k, k, 1e-16 * k));
            return Ok(newton_polish(geom, root, prev_k, k));
        }
        prev_k = k;
        prev_f = f;
    }
    Err(Error::Bracketing { lo: kappa_lo, hi: kappa_hi })
}

/// A few secant-Newton steps, kept only while they reduce the residual and
/// stay in the bracket.
fn newton_polish(geom: &ShellGeometry, mut k: f64, lo: f64, hi: f64) -> f64 {
    let mut fk = robin_residual(geom, k);
    for _ in 0..3 {
        let h = 1e-7 * k;
        let d = (robin_residual(geom, k + h) - robin_residual(geom, k - h)) / (2.0 * h);
        if !(d.is_finite() && d != 0.0) {
            break;
        }
        let cand = k - fk / d;
        if !(cand > lo && cand < hi) {
            break;
        }
        let fc = robin_residual(geom, cand);
        if fc.abs() < fk.abs() {
            k = cand;
            fk = fc;
        } else {
            break;
        }
    }
    k
}

/// First eigenvalue and `L²(A)`-normalized radial eigenfunction of the shell.
#[derive(Debug, Clone, Copy)]
pub struct RadialEigenpair {
    pub geom: ShellGeometry,
    /// `λ₁(β, A) < 0`.
    pub lambda1: f64,
    /// `κ = √(-λ₁)`.
    pub kappa: f64,
    /// `min z = Ψ(R₁)`.
    pub z_m: f64,
    /// `max z = Ψ(R₂)`.
    pub z_max: f64,
    profile: Profile,
    scale: f64,
}

impl RadialEigenpair {
    /// `Ψ(r)`.
    pub fn psi(&self, r: f64) -> f64 {
        self.scale * self.profile.value(r)
    }

    /// `Ψ'(r)`.
    pub fn psi_prime(&self, r: f64) -> f64 {
        self.scale * self.profile.derivative(r)
    }

    /// `Ψ''(r)` from the radial equation `Ψ'' + (n-1)Ψ'/r = -λ₁Ψ`.
    pub fn psi_second(&self, r: f64) -> f64 {
        -self.lambda1 * self.psi(r) - (self.geom.n as f64 - 1.0) * self.psi_prime(r) / r
    }

    /// Inverse of `Ψ` on `[Ψ(R₁), Ψ(R₂)]` by bisection.
    pub fn psi_inverse(&self, t: f64) -> f64 {
        let (a, b) = (self.geom.r1, self.geom.r2);
        if t <= self.z_m {
            return a;
        }
        if t >= self.z_max {
            return b;
        }
        optim::brent(|r| self.psi(r) - t, a, b, 1e-15 * b).unwrap_or_else(|| optim::bisect(|r| self.psi(r) - t, a, b, 1e-15))
    }

    /// `R_A(z)` evaluated by quadrature: Dirichlet energy plus the Robin
    /// boundary term, divided by the `L²` norm.
    pub fn rayleigh_quotient(&self) -> f64 {
        let g = &self.geom;
        let n = g.n as i32;
        let tol = 1e-15 * self.z_max.powi(2) * g.r2.powi(n - 1) * (g.r2 - g.r1);
        let grad = quadrature::integrate(|r| self.psi_prime(r).powi(2) * r.powi(n - 1), g.r1, g.r2, tol);
        let mass = quadrature::integrate(|r| self.psi(r).powi(2) * r.powi(n - 1), g.r1, g.r2, tol);
        let boundary = g.beta * g.r2.powi(n - 1) * self.z_max.powi(2);
        (grad + boundary) / mass
    }

    /// `n ω_n ∫ Ψ² r^{n-1} dr`, which is one after normalization.
    pub fn l2_norm_sq(&self) -> f64 {
        self.scale * self.scale * self.profile.l2_norm_sq()
    }
}

/// `λ₁(β, A_{R₁,R₂})`.
pub fn shell_eigenvalue(geom: &ShellGeometry) -> Result<f64> {
    geom.validate()?;
    let k = find_kappa(geom, 1e-6, kappa_max(geom), 400)?;
    Ok(-k * k)
}

/// `λ₁(β, A)` with a caller-chosen scan interval for `κ`. The first sign
/// change of the Robin residual inside `[kappa_lo, kappa_hi]` is used.
pub fn shell_eigenvalue_with_bracket(geom: &ShellGeometry, kappa_lo: f64, kappa_hi: f64) -> Result<f64> {
    geom.validate()?;
    if !(kappa_lo > 0.0 && kappa_hi > kappa_lo) {
        return Err(Error::InvalidParameter(format!(
            "kappa bracket must satisfy 0 < lo < hi, got [{kappa_lo}, {kappa_hi}]"
        )));
    }
    let k = find_kappa(geom, kappa_lo, kappa_hi, 400)?;
    Ok(-k * k)
}

/// The normalized eigenpair of the shell.
pub fn shell_eigenfunction(geom: &ShellGeometry) -> Result<RadialEigenpair> {
    let lambda1 = shell_eigenvalue(geom)?;
    let kappa = (-lambda1).sqrt();
    let profile = Profile::new(geom, kappa)?;
    let scale = 1.0 / profile.l2_norm_sq().sqrt();
    let z_m = scale * profile.value(geom.r1);
    let z_max = scale * profile.value(geom.r2);
    Ok(RadialEigenpair { geom: *geom, lambda1, kappa, z_m, z_max, profile, scale })
}

/// `λ₁(β, A)` along an increasing list of negative `β`.
pub fn shell_eigenvalue_beta_curve(geom: &ShellGeometry, betas: &[f64]) -> Result<Vec<(f64, f64)>> {
    for (i, &b) in betas.iter().enumerate() {
        if !(b < 0.0) {
            return Err(Error::InvalidParameter(format!("betas[{i}] = {b} is not negative")));
        }
        if i > 0 && !(b > betas[i - 1]) {
            return Err(Error::InvalidParameter(format!("betas must be strictly increasing at index {i}")));
        }
    }
    betas
        .iter()
        .map(|&b| shell_eigenvalue(&geom.with_beta(b)).map(|l| (b, l)))
        .collect()
}
