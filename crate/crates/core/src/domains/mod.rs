//! Nearly spherical and nearly annular sets.
//!
//! The outer body is `Ω₀ = {ξ r : 0 ≤ r < R₂ + u(ξ)}` and the hole is
//! `Θ = {ξ r : 0 ≤ r < R₁ + v(ξ)}` for band-limited profiles `u, v` on the
//! unit sphere: Fourier series for `n = 2`, real spherical harmonics for
//! `n = 3`.

mod convex;
mod lemmas;
mod parallel;
pub mod sphere;

pub use convex::{
    hausdorff_asymmetry, hausdorff_distance, support_function, ConvexPolygon, PlacedBody, SupportTable,
};
pub use lemmas::{lemma_checks, LemmaReport};
pub use parallel::{
    distance_to_outer_boundary, inner_parallel, parallel_level_for_volume, InnerParallel, OuterBody,
    DEFAULT_POLYGON_VERTICES,
};

use crate::error::{Error, Result};
use crate::optim;
use crate::shell::ShellGeometry;
use crate::unit_ball_volume;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use sphere::{real_sh, sh_index, SphereGrid};
use std::f64::consts::PI;

/// Coefficients of a band-limited function on the sphere.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "basis", rename_all = "snake_case", deny_unknown_fields)]
pub enum Coefficients {
    /// `u(θ) = a₀ + Σ_{k≥1} aₖ cos kθ + bₖ sin kθ`; `sin[0]` is unused.
    Fourier { cos: Vec<f64>, sin: Vec<f64> },
    /// `u = Σ c_{lm} Y_{lm}` with `values[l² + l + m]`.
    Harmonic { lmax: usize, values: Vec<f64> },
}

/// A band-limited profile on `S^{n-1}` around a base radius.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoundaryProfile {
    pub n: usize,
    pub base_radius: f64,
    pub coeffs: Coefficients,
    /// Trapezoid nodes (`n = 2`) or Gauss-Legendre latitudes (`n = 3`).
    pub grid_size: usize,
}

/// Profile values on a quadrature grid.
#[derive(Debug, Clone)]
pub struct ProfileSamples {
    pub grid: SphereGrid,
    pub u: Vec<f64>,
    /// `|∇_τ u|²`
    pub grad_sq: Vec<f64>,
}

fn default_grid(n: usize, band: usize) -> usize {
    if n == 2 {
        (16 * (band + 1)).max(256).next_power_of_two()
    } else {
        (4 * (band + 1)).max(32)
    }
}

impl BoundaryProfile {
    /// `u ≡ 0`.
    pub fn zero(n: usize, base_radius: f64) -> Self {
        match n {
            2 => Self::fourier(base_radius, vec![0.0], vec![0.0]),
            _ => Self::harmonic(base_radius, 0, vec![0.0]),
        }
    }

    /// Planar profile from Fourier coefficients. `cos` and `sin` are padded
    /// to a common length.
    pub fn fourier(base_radius: f64, mut cos: Vec<f64>, mut sin: Vec<f64>) -> Self {
        let len = cos.len().max(sin.len()).max(1);
        cos.resize(len, 0.0);
        sin.resize(len, 0.0);
        sin[0] = 0.0;
        Self { n: 2, base_radius, grid_size: default_grid(2, len - 1), coeffs: Coefficients::Fourier { cos, sin } }
    }

    /// Single planar mode `amp·cos(kθ)`.
    pub fn cosine_mode(base_radius: f64, k: usize, amp: f64) -> Self {
        let mut cos = vec![0.0; k + 1];
        cos[k] += amp;
        Self::fourier(base_radius, cos, vec![])
    }

    /// Spatial profile from real spherical-harmonic coefficients.
    pub fn harmonic(base_radius: f64, lmax: usize, mut values: Vec<f64>) -> Self {
        values.resize((lmax + 1) * (lmax + 1), 0.0);
        Self { n: 3, base_radius, grid_size: default_grid(3, lmax), coeffs: Coefficients::Harmonic { lmax, values } }
    }

    /// Planar profile whose radial function `R + u` interpolates `radius(θ)`
    /// at `4(kmax+1)` equispaced angles, truncated to modes `≤ kmax`.
    pub fn fit_radial_function<F: Fn(f64) -> f64>(base_radius: f64, radius: F, kmax: usize) -> Self {
        let m = 8 * (kmax + 1);
        let vals: Vec<f64> = (0..m).map(|j| radius(2.0 * PI * j as f64 / m as f64) - base_radius).collect();
        let mut cos = vec![0.0; kmax + 1];
        let mut sin = vec![0.0; kmax + 1];
        for k in 0..=kmax {
            let (mut a, mut b) = (0.0, 0.0);
            for (j, v) in vals.iter().enumerate() {
                let t = 2.0 * PI * (k * j) as f64 / m as f64;
                a += v * t.cos();
                b += v * t.sin();
            }
            let s = if k == 0 { 1.0 } else { 2.0 } / m as f64;
            cos[k] = a * s;
            sin[k] = b * s;
        }
        Self::fourier(base_radius, cos, sin)
    }

    /// Planar disk of radius `radius` centred at `center`, seen as a radial
    /// graph around the origin (the origin must lie inside the disk).
    pub fn translated_disk(base_radius: f64, radius: f64, center: [f64; 2], kmax: usize) -> Self {
        Self::fit_radial_function(
            base_radius,
            |t| {
                let (s, c) = t.sin_cos();
                let along = center[0] * c + center[1] * s;
                let across = center[0] * s - center[1] * c;
                along + (radius * radius - across * across).sqrt()
            },
            kmax,
        )
    }

    /// Highest Fourier mode or spherical-harmonic degree.
    pub fn band_limit(&self) -> usize {
        match &self.coeffs {
            Coefficients::Fourier { cos, .. } => cos.len() - 1,
            Coefficients::Harmonic { lmax, .. } => *lmax,
        }
    }

    pub fn with_grid_size(mut self, grid_size: usize) -> Self {
        self.grid_size = grid_size;
        self
    }

    pub fn with_base_radius(mut self, base_radius: f64) -> Self {
        self.base_radius = base_radius;
        self
    }

    /// `u + c`.
    pub fn shifted(&self, c: f64) -> Self {
        let mut p = self.clone();
        match &mut p.coeffs {
            Coefficients::Fourier { cos, .. } => cos[0] += c,
            Coefficients::Harmonic { values, .. } => values[0] += c * (4.0 * PI).sqrt(),
        }
        p
    }

    /// `s·u`.
    pub fn scaled(&self, s: f64) -> Self {
        let mut p = self.clone();
        match &mut p.coeffs {
            Coefficients::Fourier { cos, sin } => {
                cos.iter_mut().chain(sin.iter_mut()).for_each(|c| *c *= s);
            }
            Coefficients::Harmonic { values, .. } => values.iter_mut().for_each(|c| *c *= s),
        }
        p
    }

    /// `u` with its mean (degree-zero part) removed.
    pub fn without_mean(&self) -> Self {
        let mut p = self.clone();
        match &mut p.coeffs {
            Coefficients::Fourier { cos, .. } => cos[0] = 0.0,
            Coefficients::Harmonic { values, .. } => values[0] = 0.0,
        }
        p
    }

    /// `u` without its degree-one part.
    pub fn without_degree_one(&self) -> Self {
        let mut p = self.clone();
        match &mut p.coeffs {
            Coefficients::Fourier { cos, sin } => {
                if cos.len() > 1 {
                    cos[1] = 0.0;
                    sin[1] = 0.0;
                }
            }
            Coefficients::Harmonic { lmax, values } => {
                if *lmax >= 1 {
                    values[1..4].iter_mut().for_each(|c| *c = 0.0);
                }
            }
        }
        p
    }

    /// `(u, u', u'')` at angle `θ` (planar profiles).
    pub fn eval_planar(&self, theta: f64) -> (f64, f64, f64) {
        match &self.coeffs {
            Coefficients::Fourier { cos, sin } => {
                let (mut v, mut d1, mut d2) = (cos[0], 0.0, 0.0);
                for k in 1..cos.len() {
                    let kf = k as f64;
                    let (s, c) = (kf * theta).sin_cos();
                    v += cos[k] * c + sin[k] * s;
                    d1 += kf * (-cos[k] * s + sin[k] * c);
                    d2 -= kf * kf * (cos[k] * c + sin[k] * s);
                }
                (v, d1, d2)
            }
            Coefficients::Harmonic { .. } => panic!("eval_planar on a spatial profile"),
        }
    }

    /// `(u, ∂_θ u, ∂_φ u)` at colatitude `θ`, azimuth `φ` (spatial profiles).
    pub fn eval_spatial(&self, theta: f64, phi: f64) -> (f64, f64, f64) {
        match &self.coeffs {
            Coefficients::Harmonic { lmax, values } => {
                let (y, dt, dp) = real_sh(*lmax, theta, phi);
                let mut out = (0.0, 0.0, 0.0);
                for i in 0..values.len() {
                    out.0 += values[i] * y[i];
                    out.1 += values[i] * dt[i];
                    out.2 += values[i] * dp[i];
                }
                out
            }
            Coefficients::Fourier { .. } => panic!("eval_spatial on a planar profile"),
        }
    }

    /// `u` in the direction of a nonzero vector (only the first `n`
    /// components are read).
    pub fn value_at(&self, x: &[f64]) -> f64 {
        if self.n == 2 {
            self.eval_planar(x[1].atan2(x[0])).0
        } else {
            let (t, p) = sphere::angles_of(&[x[0], x[1], x[2]]);
            self.eval_spatial(t, p).0
        }
    }

    /// `(u, |∇_τ u|²)` at a grid node.
    fn value_and_grad_sq(&self, angles: (f64, f64)) -> (f64, f64) {
        if self.n == 2 {
            let (v, d, _) = self.eval_planar(angles.0);
            (v, d * d)
        } else {
            let (v, dt, dp) = self.eval_spatial(angles.0, angles.1);
            let st = angles.0.sin().max(1e-300);
            (v, dt * dt + (dp / st).powi(2))
        }
    }

    pub fn grid(&self) -> SphereGrid {
        self.grid_of_size(self.grid_size)
    }

    fn grid_of_size(&self, size: usize) -> SphereGrid {
        if self.n == 2 {
            SphereGrid::circle(size)
        } else {
            SphereGrid::sphere(size)
        }
    }

    pub fn samples(&self) -> ProfileSamples {
        self.samples_on(self.grid())
    }

    pub fn samples_on(&self, grid: SphereGrid) -> ProfileSamples {
        let (u, grad_sq) = grid.angles.iter().map(|&a| self.value_and_grad_sq(a)).unzip();
        ProfileSamples { grid, u, grad_sq }
    }

    /// `∫ u`.
    pub fn integral(&self) -> f64 {
        let s = self.samples();
        s.grid.weights.iter().zip(&s.u).map(|(w, u)| w * u).sum()
    }

    /// `‖u‖²_{L²(S^{n-1})}`.
    pub fn l2_norm_sq(&self) -> f64 {
        let s = self.samples();
        s.grid.weights.iter().zip(&s.u).map(|(w, u)| w * u * u).sum()
    }

    /// `‖∇_τ u‖²_{L²(S^{n-1})}`.
    pub fn grad_l2_norm_sq(&self) -> f64 {
        let s = self.samples();
        s.grid.weights.iter().zip(&s.grad_sq).map(|(w, g)| w * g).sum()
    }

    fn fine_samples(&self) -> ProfileSamples {
        self.samples_on(self.grid_of_size(if self.n == 2 { 8 * self.grid_size } else { 2 * self.grid_size }))
    }

    /// `(‖u‖_∞, ‖∇_τ u‖_∞)` sampled on a grid finer than the quadrature grid.
    pub fn sup_norms(&self) -> (f64, f64) {
        let s = self.fine_samples();
        let a = s.u.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let b = s.grad_sq.iter().fold(0.0f64, |m, v| m.max(*v)).sqrt();
        (a, b)
    }

    /// `‖u‖_{W^{1,∞}} = ‖u‖_∞ + ‖∇_τ u‖_∞`.
    pub fn w1inf_norm(&self) -> f64 {
        let (a, b) = self.sup_norms();
        a + b
    }

    /// Smallest radius `R + u` on the fine grid.
    pub fn min_radius(&self) -> f64 {
        let s = self.fine_samples();
        self.base_radius + s.u.iter().fold(f64::INFINITY, |m, v| m.min(*v))
    }

    /// Checks that the body bounded by `R + u` is convex. Planar profiles use
    /// the sign of the polar curvature `r² + 2r'² - r r''`; spatial profiles
    /// a seeded Monte-Carlo midpoint test.
    pub fn check_convex(&self) -> Result<()> {
        if self.n == 2 {
            let m = 8 * self.grid_size;
            for j in 0..m {
                let t = 2.0 * PI * j as f64 / m as f64;
                let (u, d1, d2) = self.eval_planar(t);
                let r = self.base_radius + u;
                if r * r + 2.0 * d1 * d1 - r * d2 <= 0.0 || r <= 0.0 {
                    return Err(Error::NonConvex { direction: t });
                }
            }
            Ok(())
        } else {
            let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_c0de);
            let dir = |rng: &mut ChaCha8Rng| {
                let z: f64 = rng.random_range(-1.0..1.0);
                let p: f64 = rng.random_range(0.0..2.0 * PI);
                let s = (1.0 - z * z).sqrt();
                [s * p.cos(), s * p.sin(), z]
            };
            for _ in 0..4000 {
                let (a, b) = (dir(&mut rng), dir(&mut rng));
                let ra = self.base_radius + self.value_at(&a);
                let rb = self.base_radius + self.value_at(&b);
                for t in [0.25, 0.5, 0.75] {
                    let m: Vec<f64> = (0..3).map(|i| (1.0 - t) * ra * a[i] + t * rb * b[i]).collect();
                    let norm = (m[0] * m[0] + m[1] * m[1] + m[2] * m[2]).sqrt();
                    if norm < 1e-12 {
                        continue;
                    }
                    let limit = self.base_radius + self.value_at(&m);
                    if norm > limit * (1.0 + 1e-12) {
                        let (theta, _) = sphere::angles_of(&[m[0], m[1], m[2]]);
                        return Err(Error::NonConvex { direction: theta });
                    }
                }
            }
            Ok(())
        }
    }

    /// Barycenter of the body `{ξ r : r < R + u(ξ)}`.
    pub fn barycenter(&self) -> Vec<f64> {
        let s = self.samples();
        let n = self.n;
        let mut c = vec![0.0; n];
        let mut vol = 0.0;
        for ((d, w), u) in s.grid.dirs.iter().zip(&s.grid.weights).zip(&s.u) {
            let r = self.base_radius + u;
            vol += w * r.powi(n as i32) / n as f64;
            for i in 0..n {
                c[i] += w * r.powi(n as i32 + 1) / (n as f64 + 1.0) * d[i];
            }
        }
        c.iter_mut().for_each(|x| *x /= vol);
        c
    }
}

/// `|{ξ r : r < R + u(ξ)}| = (1/n) ∫ (R + u)ⁿ`.
pub fn volume(profile: &BoundaryProfile) -> f64 {
    let s = profile.samples();
    let n = profile.n as i32;
    s.grid.weights.iter().zip(&s.u).map(|(w, u)| w * (profile.base_radius + u).powi(n)).sum::<f64>() / n as f64
}

/// `∫ (R + u)^{n-1} √(1 + |∇_τ u|² / (R + u)²)`.
pub fn perimeter(profile: &BoundaryProfile) -> f64 {
    let s = profile.samples();
    let n = profile.n as i32;
    s.grid
        .weights
        .iter()
        .zip(s.u.iter().zip(&s.grad_sq))
        .map(|(w, (u, g))| {
            let r = profile.base_radius + u;
            w * r.powi(n - 1) * (1.0 + g / (r * r)).sqrt()
        })
        .sum()
}

/// A nearly annular set `Ω₀ \ Θ̄` together with the shell parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HoledDomain {
    pub geom: ShellGeometry,
    pub u: BoundaryProfile,
    pub v: BoundaryProfile,
    /// Class constant `ϑ`: both `d_H(Θ, Ω₀)` and the inradius of `Θ` must be
    /// at least this large.
    pub theta_min: f64,
}

/// Outcome of the class-membership tests.
#[derive(Debug, Clone, Serialize)]
pub struct ClassReport {
    pub outer_convex: bool,
    pub hole_convex: bool,
    pub hausdorff_gap: f64,
    pub hole_inradius: f64,
    pub theta_min: f64,
}

impl ClassReport {
    pub fn member(&self) -> bool {
        self.outer_convex
            && self.hole_convex
            && self.hausdorff_gap >= self.theta_min
            && self.hole_inradius >= self.theta_min
    }
}

/// Default class constant `min{R₁, R₂ - R₁}/4`.
pub fn default_theta_min(geom: &ShellGeometry) -> f64 {
    geom.r1.min(geom.r2 - geom.r1) / 4.0
}

impl HoledDomain {
    pub fn new(geom: ShellGeometry, u: BoundaryProfile, v: BoundaryProfile) -> Result<Self> {
        let d = Self { geom, u, v, theta_min: default_theta_min(&geom) };
        d.validate()?;
        Ok(d)
    }

    /// The shell itself.
    pub fn annulus(geom: ShellGeometry) -> Self {
        Self {
            geom,
            u: BoundaryProfile::zero(geom.n, geom.r2),
            v: BoundaryProfile::zero(geom.n, geom.r1),
            theta_min: default_theta_min(&geom),
        }
    }

    pub fn with_theta_min(mut self, theta_min: f64) -> Self {
        self.theta_min = theta_min;
        self
    }

    /// Admissibility: matching dimensions and base radii, the `W^{1,∞}`
    /// bounds of the nearly annular definition, and `Θ̄ ⊂ Ω₀`.
    pub fn validate(&self) -> Result<()> {
        let g = &self.geom;
        g.validate()?;
        if self.u.n != g.n || self.v.n != g.n {
            return Err(Error::Inadmissible("profile dimension does not match geometry".into()));
        }
        if self.u.base_radius != g.r2 || self.v.base_radius != g.r1 {
            return Err(Error::Inadmissible("profile base radii must be R2 (outer) and R1 (hole)".into()));
        }
        let nu = self.u.w1inf_norm();
        if !(nu < g.r2 / 2.0) {
            return Err(Error::Inadmissible(format!("||u||_W1inf = {nu} is not below R2/2")));
        }
        let nv = self.v.w1inf_norm();
        if !(nv <= g.r1 / 2.0) {
            return Err(Error::Inadmissible(format!("||v||_W1inf = {nv} exceeds R1/2")));
        }
        let gap = self.min_wall_thickness();
        if !(gap > 0.0) {
            return Err(Error::Inadmissible(format!("hole touches the outer boundary (gap {gap})")));
        }
        Ok(())
    }

    /// `min_ξ (R₂ + u(ξ)) - (R₁ + v(ξ))` on a fine direction grid.
    pub fn min_wall_thickness(&self) -> f64 {
        let grid = if self.geom.n == 2 {
            SphereGrid::circle(8 * self.u.grid_size.max(self.v.grid_size))
        } else {
            SphereGrid::sphere(2 * self.u.grid_size.max(self.v.grid_size))
        };
        let su = self.u.samples_on(grid.clone());
        let sv = self.v.samples_on(grid);
        su.u.iter()
            .zip(&sv.u)
            .map(|(a, b)| (self.geom.r2 + a) - (self.geom.r1 + b))
            .fold(f64::INFINITY, f64::min)
    }

    /// `|Ω₀| - |Θ|`.
    pub fn volume(&self) -> f64 {
        volume(&self.u) - volume(&self.v)
    }

    pub fn outer_perimeter(&self) -> f64 {
        perimeter(&self.u)
    }

    /// Residuals `(P(Ω₀) - P(B_{R₂}), |Ω| - |A|)`.
    pub fn constraint_residuals(&self) -> (f64, f64) {
        (self.outer_perimeter() - self.geom.outer_perimeter(), self.volume() - self.geom.shell_volume())
    }

    /// Convexity of both bodies, `d_H(Θ, Ω₀)` and the inradius of `Θ`.
    pub fn class_membership(&self) -> Result<ClassReport> {
        let outer_convex = self.u.check_convex().is_ok();
        let hole_convex = self.v.check_convex().is_ok();
        let (gap, inradius) = if outer_convex && hole_convex {
            let origin = vec![0.0; self.geom.n];
            let gap = hausdorff_distance((&self.v, &origin[..]), (&self.u, &origin[..]))?;
            let inradius = OuterBody::new(&self.v)?.inradius();
            (gap, inradius)
        } else {
            (f64::NAN, f64::NAN)
        };
        Ok(ClassReport { outer_convex, hole_convex, hausdorff_gap: gap, hole_inradius: inradius, theta_min: self.theta_min })
    }
}

/// Shifts `u` by a constant so that `P(Ω₀) = P(B_{R₂})`, then `v` so that
/// `|Ω| = |A|`. Non-constant modes are untouched.
pub fn project_constraints(domain: &HoledDomain) -> Result<HoledDomain> {
    let g = domain.geom;
    let p_target = g.outer_perimeter();
    let span = g.r2 / 2.0;
    let c0 = optim::brent(|c| perimeter(&domain.u.shifted(c)) - p_target, -span, span, 1e-16)
        .ok_or_else(|| Error::Infeasible("no constant shift of u matches the outer perimeter".into()))?;
    let u = domain.u.shifted(c0);
    let hole_target = volume(&u) - g.shell_volume();
    if !(hole_target > 0.0) {
        return Err(Error::Infeasible(format!("required hole volume {hole_target} is not positive")));
    }
    let span = g.r1 / 2.0;
    let c1 = optim::brent(|c| volume(&domain.v.shifted(c)) - hole_target, -span, span, 1e-16)
        .ok_or_else(|| Error::Infeasible("no constant shift of v matches the volume".into()))?;
    let v = domain.v.shifted(c1);
    let out = HoledDomain { geom: g, u, v, theta_min: domain.theta_min };
    let nu = out.u.w1inf_norm();
    let nv = out.v.w1inf_norm();
    if !(nu < g.r2 / 2.0) || !(nv <= g.r1 / 2.0) {
        return Err(Error::Infeasible(format!(
            "projected profiles violate the W1inf bounds (||u|| = {nu}, ||v|| = {nv})"
        )));
    }
    if !(out.min_wall_thickness() > 0.0) {
        return Err(Error::Infeasible("projected hole touches the outer boundary".into()));
    }
    Ok(out)
}

/// Unit ball volume in the dimension of a profile.
pub(crate) fn omega(n: usize) -> f64 {
    unit_ball_volume(n)
}

/// Random planar profile `Σ_{k=kmin}^{kmax} aₖ cos kθ + bₖ sin kθ` with mode
/// weights `∝ k^{-2}`, scaled to `‖u‖_{W^{1,∞}} = amplitude`.
pub fn random_planar_profile<R: Rng>(
    rng: &mut R,
    base_radius: f64,
    kmin: usize,
    kmax: usize,
    amplitude: f64,
) -> BoundaryProfile {
    let mut cos = vec![0.0; kmax + 1];
    let mut sin = vec![0.0; kmax + 1];
    for k in kmin.max(1)..=kmax {
        let w = 1.0 / (k * k) as f64;
        cos[k] = w * rng.random_range(-1.0..1.0);
        sin[k] = w * rng.random_range(-1.0..1.0);
    }
    let p = BoundaryProfile::fourier(base_radius, cos, sin);
    let norm = p.w1inf_norm();
    if norm == 0.0 {
        p
    } else {
        p.scaled(amplitude / norm)
    }
}

/// Random spatial profile with degrees `lmin..=lmax`, weights `∝ l^{-2}`,
/// scaled to `‖u‖_{W^{1,∞}} = amplitude`.
pub fn random_spatial_profile<R: Rng>(
    rng: &mut R,
    base_radius: f64,
    lmin: usize,
    lmax: usize,
    amplitude: f64,
) -> BoundaryProfile {
    let mut values = vec![0.0; (lmax + 1) * (lmax + 1)];
    for l in lmin.max(1)..=lmax {
        let w = 1.0 / (l * l) as f64;
        for m in -(l as i64)..=(l as i64) {
            values[sh_index(l, m)] = w * rng.random_range(-1.0..1.0);
        }
    }
    let p = BoundaryProfile::harmonic(base_radius, lmax, values);
    let norm = p.w1inf_norm();
    if norm == 0.0 {
        p
    } else {
        p.scaled(amplitude / norm)
    }
}
