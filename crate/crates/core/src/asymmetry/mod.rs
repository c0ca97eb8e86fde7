//! The web test function and the hybrid asymmetry
//! `α(Ω) = max{g(𝒜_H(Ω₀)), Ã(Θ; Ω₀)}`.

mod fraenkel;
mod web;

pub use fraenkel::{
    parallel_level, weak_fraenkel_asymmetry, weak_fraenkel_monte_carlo, weak_fraenkel_with, MonteCarloEstimate,
    PLANAR_RAYS, SPATIAL_RAY_GRID,
};
pub use web::{build_web_function, WebFunction};

use crate::domains::sphere::SphereGrid;
use crate::domains::{hausdorff_asymmetry, perimeter, volume, BoundaryProfile, HoledDomain, InnerParallel, OuterBody};
use crate::error::{Error, Result};
use crate::optim::{bisect, brent, golden_min};
use crate::quadrature::{gauss_fixed, gauss_legendre};
use crate::shell::{shell_eigenvalue, ShellGeometry};
use rayon::prelude::*;
use serde::Serialize;

/// Values of `α` at or below this are reported as the shell branch.
pub const ZERO_ASYMMETRY: f64 = 1e-10;

/// Which term of the hybrid asymmetry dominates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum AsymmetryBranch {
    Shell,
    OuterHausdorff,
    HoleFraenkel,
}

#[derive(Debug, Clone, Serialize)]
pub struct AsymmetryReport {
    /// `𝒜_H(Ω₀)`
    pub hausdorff_asym: f64,
    /// Centre of the optimal ball in `𝒜_H`.
    pub center: Vec<f64>,
    pub g_of_asym: f64,
    /// `Ã(Θ; Ω₀)`
    pub weak_fraenkel: f64,
    pub alpha: f64,
    /// `t_{Ω₀}`
    pub t_level: f64,
    pub z_m: f64,
    pub z_max: f64,
    pub branch: AsymmetryBranch,
}

/// `f(t) = √(t log(1/t))`.
fn f_modulus(t: f64) -> f64 {
    (-t * t.ln()).sqrt()
}

/// `g(s)`: `s²` for `n = 2`, `f^{-1}(s²)` on `(0, 1/e)` for `n = 3`,
/// `s^{(n+1)/2}` for `n ≥ 4`.
pub fn g_modulus(s: f64, n: usize) -> Result<f64> {
    if !(s >= 0.0) {
        return Err(Error::Domain { function: "g_modulus", x: s, detail: "argument must be nonnegative" });
    }
    match n {
        2 => Ok(s * s),
        3 => {
            let y = s * s;
            if y == 0.0 {
                return Ok(0.0);
            }
            let top = (-1.0f64).exp();
            if y > f_modulus(top) {
                return Err(Error::Domain { function: "g_modulus", x: s, detail: "s² exceeds sup f = e^{-1/2}" });
            }
            // bisection in log t keeps relative accuracy for tiny levels
            let x = bisect(|x| f_modulus(x.exp()) - y, -700.0, -1.0, 1e-15);
            Ok(x.exp())
        }
        n if n >= 4 => Ok(s.powf((n as f64 + 1.0) / 2.0)),
        _ => Err(Error::InvalidParameter(format!("dimension {n} is not supported"))),
    }
}

/// `α(Ω)` with both terms.
pub fn hybrid_asymmetry(domain: &HoledDomain) -> Result<AsymmetryReport> {
    let web = WebFunction::new(&domain.geom)?;
    hybrid_asymmetry_with(domain, &web)
}

pub fn hybrid_asymmetry_with(domain: &HoledDomain, web: &WebFunction) -> Result<AsymmetryReport> {
    let geom = &domain.geom;
    let (hausdorff_asym, center) = hausdorff_asymmetry(&domain.u, geom)?;
    let g_of_asym = g_modulus(hausdorff_asym, geom.n)?;
    let outer = OuterBody::new(&domain.u)?;
    let t_level = parallel_level(&outer, domain)?;
    let weak_fraenkel = weak_fraenkel_with(&outer, domain, web, t_level)?;
    let alpha = g_of_asym.max(weak_fraenkel);
    let branch = if alpha <= ZERO_ASYMMETRY {
        AsymmetryBranch::Shell
    } else if g_of_asym >= weak_fraenkel {
        AsymmetryBranch::OuterHausdorff
    } else {
        AsymmetryBranch::HoleFraenkel
    };
    Ok(AsymmetryReport {
        hausdorff_asym,
        center,
        g_of_asym,
        weak_fraenkel,
        alpha,
        t_level,
        z_m: web.z_m(),
        z_max: web.z_max(),
        branch,
    })
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct InnerStability {
    pub lambda_shell: f64,
    /// `λ₁(β, A) - λ₁(β, Ω)`
    pub gap: f64,
    pub weak_fraenkel: f64,
    /// `min{1, |λ₁(β, A)|} · Ã(Θ; Ω₀)`
    pub bound: f64,
    pub holds: bool,
}

/// Compares the eigenvalue gap with `min{1, |λ₁(β, A)|}·Ã(Θ; Ω₀)`; `holds`
/// allows a slack of `tol`.
pub fn inner_stability_check(domain: &HoledDomain, lambda_omega: f64, tol: f64) -> Result<InnerStability> {
    let lambda_shell = shell_eigenvalue(&domain.geom)?;
    let web = WebFunction::new(&domain.geom)?;
    let weak_fraenkel = weak_fraenkel_asymmetry(domain, &web)?;
    let gap = lambda_shell - lambda_omega;
    let bound = lambda_shell.abs().min(1.0) * weak_fraenkel;
    Ok(InnerStability { lambda_shell, gap, weak_fraenkel, bound, holds: gap >= bound - tol })
}

/// Pieces of the Rayleigh quotient of the web function on `Ω`.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct WebRayleigh {
    pub rq: f64,
    /// `∫_Ω |∇w|²`
    pub dirichlet: f64,
    /// `∫_Ω w²`
    pub mass: f64,
    /// `∫_{∂Ω₀} w² = z_M² P(Ω₀)`
    pub boundary: f64,
    /// `∫_{∂B_{R₂}} z² = z_M² P(B_{R₂})`
    pub boundary_ball: f64,
}

/// `R_Ω(w_{Ω₀})` by ray integration from the origin over `Ω₀ \ Θ̄`. Along a
/// ray the plateau `{d ≥ R₂ - R₁}` is integrated in closed form.
pub fn web_rayleigh_bounds(domain: &HoledDomain, web: &WebFunction) -> Result<WebRayleigh> {
    let n = domain.geom.n;
    let outer = OuterBody::new(&domain.u)?;
    let c = web.thickness();
    let grid = if n == 2 { SphereGrid::circle(PLANAR_RAYS) } else { SphereGrid::sphere(SPATIAL_RAY_GRID) };
    let nodes = gauss_legendre(32);
    let (u, v) = (&domain.u, &domain.v);
    let k = n as i32 - 1;
    let zm2 = web.z_m() * web.z_m();
    let parts: Vec<(f64, f64)> = grid
        .dirs
        .par_iter()
        .zip(&grid.weights)
        .map(|(dir, w)| {
            let a = v.base_radius + v.value_at(dir);
            let b = u.base_radius + u.value_at(dir);
            let d = |r: f64| outer.distance_unchecked(&[r * dir[0], r * dir[1], r * dir[2]]).max(0.0);
            let xtol = 1e-14 * b;
            let graded = |lo: f64, hi: f64| {
                let g = gauss_fixed(|r| web.grad_norm(d(r)).powi(2) * r.powi(k), lo, hi, &nodes);
                let m = gauss_fixed(|r| web.value(d(r)).powi(2) * r.powi(k), lo, hi, &nodes);
                (g, m)
            };
            let plateau = |lo: f64, hi: f64| zm2 * (hi.powi(n as i32) - lo.powi(n as i32)) / n as f64;
            let (g, m) = if d(a) >= c {
                let rc = brent(|r| d(r) - c, a, b, xtol).unwrap_or(a);
                let (g, m) = graded(rc, b);
                (g, m + plateau(a, rc))
            } else {
                let (peak, dp) = golden_min(|r| -d(r), a, b, xtol);
                if -dp <= c {
                    graded(a, b)
                } else {
                    let r0 = brent(|r| d(r) - c, a, peak, xtol).unwrap_or(peak);
                    let r1 = brent(|r| d(r) - c, peak, b, xtol).unwrap_or(peak);
                    let (g0, m0) = graded(a, r0);
                    let (g1, m1) = graded(r1, b);
                    (g0 + g1, m0 + m1 + plateau(r0, r1))
                }
            };
            (w * g, w * m)
        })
        .collect();
    let (dirichlet, mass) = parts.iter().fold((0.0, 0.0), |x, y| (x.0 + y.0, x.1 + y.1));
    let zmax2 = web.z_max() * web.z_max();
    let boundary = zmax2 * perimeter(u);
    let boundary_ball = zmax2 * domain.geom.outer_perimeter();
    let rq = (dirichlet + domain.geom.beta * boundary) / mass;
    Ok(WebRayleigh { rq, dirichlet, mass, boundary, boundary_ball })
}

/// Planar hole equal to the inner parallel set `K_{Ω₀}` of a given outer
/// profile, at the level fixed by the volume constraint `|Ω₀| - |Θ| = |A|`.
/// The radial function of the polygonal parallel set is fitted with modes
/// up to `kmax`.
pub fn parallel_hole(outer: &BoundaryProfile, geom: &ShellGeometry, kmax: usize) -> Result<BoundaryProfile> {
    if geom.n != 2 || outer.n != 2 {
        return Err(Error::InvalidParameter("parallel holes are built for planar domains only".into()));
    }
    let body = OuterBody::new(outer)?;
    let target = volume(outer) - geom.shell_volume();
    let t = body.level_for_volume(target)?;
    let InnerParallel::Planar(k) = body.inner_parallel(t)? else { unreachable!() };
    if !k.contains([0.0, 0.0]) {
        return Err(Error::Inadmissible("inner parallel set does not contain the origin".into()));
    }
    let radius = |th: f64| {
        let (s, cth) = th.sin_cos();
        k.normals()
            .iter()
            .zip(k.offsets())
            .filter_map(|(nv, h)| {
                let a = nv[0] * cth + nv[1] * s;
                (a > 0.0).then(|| h / a)
            })
            .fold(f64::INFINITY, f64::min)
    };
    Ok(BoundaryProfile::fit_radial_function(geom.r1, radius, kmax))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn modulus_values() {
        assert_eq!(g_modulus(0.0, 3).unwrap(), 0.0);
        assert!((g_modulus(0.3, 2).unwrap() - 0.09).abs() < 1e-15);
        let t = g_modulus(0.2, 3).unwrap();
        assert!((f_modulus(t) - 0.04).abs() < 1e-10);
        assert!(t < (-1.0f64).exp());
        assert!(g_modulus(0.9, 3).is_err());
        assert!((g_modulus(0.5, 5).unwrap() - 0.125).abs() < 1e-15);
    }

    #[test]
    fn shell_has_zero_asymmetry() {
        let g = ShellGeometry::new(2, -1.0, 1.0, 2.0).unwrap();
        let r = hybrid_asymmetry(&HoledDomain::annulus(g)).unwrap();
        assert!(r.alpha <= 1e-10, "{r:?}");
        assert_eq!(r.branch, AsymmetryBranch::Shell);
    }

    #[test]
    fn shell_rayleigh_quotient_is_the_eigenvalue() {
        let g = ShellGeometry::new(2, -1.0, 1.0, 2.0).unwrap();
        let web = WebFunction::new(&g).unwrap();
        let q = web_rayleigh_bounds(&HoledDomain::annulus(g), &web).unwrap();
        assert!((q.rq - web.eig.lambda1).abs() < 1e-8 * web.eig.lambda1.abs(), "{q:?}");
        assert!((q.mass - 1.0).abs() < 1e-8);
    }
}
