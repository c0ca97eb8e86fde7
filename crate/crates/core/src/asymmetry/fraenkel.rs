//! The weak weighted Fraenkel asymmetry `Ã(Θ; Ω₀)`.
//!
//! Only points of `Θ` with `d(x) < min(t_{Ω₀}, R₂ - R₁)` contribute: beyond
//! `t_{Ω₀}` they lie in `K_{Ω₀}`, beyond `R₂ - R₁` the integrand vanishes.
//! Rays from the origin cross the hole boundary once, and since `d` is
//! concave on a convex `Ω₀` each ray meets the contributing set in at most
//! two intervals.

use super::WebFunction;
use crate::domains::sphere::SphereGrid;
use crate::domains::{volume, HoledDomain, OuterBody};
use crate::error::{Error, Result};
use crate::optim::{brent, golden_min};
use crate::quadrature::{gauss_fixed, gauss_legendre};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

/// Rays for planar integration.
pub const PLANAR_RAYS: usize = 1024;
/// `sphere(m)` grid for spatial integration.
pub const SPATIAL_RAY_GRID: usize = 24;
const RAY_NODES: usize = 32;

fn check_hole(domain: &HoledDomain) -> Result<f64> {
    let hole = volume(&domain.v);
    if !(hole > 0.0) || !(domain.v.min_radius() > 0.0) {
        return Err(Error::Inadmissible("degenerate hole".into()));
    }
    Ok(hole)
}

/// `t_{Ω₀}` with `|K_{Ω₀}| = |Θ|`.
pub fn parallel_level(outer: &OuterBody, domain: &HoledDomain) -> Result<f64> {
    let hole = check_hole(domain)?;
    outer.level_for_volume(hole)
}

/// `Ã(Θ; Ω₀)` by ray integration.
pub fn weak_fraenkel_asymmetry(domain: &HoledDomain, web: &WebFunction) -> Result<f64> {
    let outer = OuterBody::new(&domain.u)?;
    let t = parallel_level(&outer, domain)?;
    weak_fraenkel_with(&outer, domain, web, t)
}

fn ray_grid(n: usize) -> SphereGrid {
    if n == 2 {
        SphereGrid::circle(PLANAR_RAYS)
    } else {
        SphereGrid::sphere(SPATIAL_RAY_GRID)
    }
}

/// `Ã` for a prepared outer body and level `t`.
pub fn weak_fraenkel_with(outer: &OuterBody, domain: &HoledDomain, web: &WebFunction, t: f64) -> Result<f64> {
    check_hole(domain)?;
    let n = domain.geom.n;
    let m = t.min(web.thickness());
    let grid = ray_grid(n);
    let nodes = gauss_legendre(RAY_NODES);
    let v = &domain.v;
    let total = grid
        .dirs
        .par_iter()
        .zip(&grid.weights)
        .map(|(dir, w)| {
            let rho = v.base_radius + v.value_at(dir);
            let d = |r: f64| outer.distance_unchecked(&[r * dir[0], r * dir[1], r * dir[2]]).max(0.0);
            let f = |r: f64| web.energy_density(d(r)) * r.powi(n as i32 - 1);
            let ray = |a: f64, b: f64| gauss_fixed(f, a, b, &nodes);
            let xtol = 1e-14 * rho;
            let (d0, d1) = (d(0.0), d(rho));
            let s = if d0 > m {
                if d1 >= m {
                    0.0
                } else {
                    let b = brent(|r| d(r) - m, 0.0, rho, xtol).unwrap_or(rho);
                    ray(b, rho)
                }
            } else {
                let (peak, dp) = golden_min(|r| -d(r), 0.0, rho, xtol);
                if -dp <= m {
                    ray(0.0, rho)
                } else {
                    let a = brent(|r| d(r) - m, 0.0, peak, xtol).unwrap_or(0.0);
                    let mut s = ray(0.0, a);
                    if d1 < m {
                        let b = brent(|r| d(r) - m, peak, rho, xtol).unwrap_or(rho);
                        s += ray(b, rho);
                    }
                    s
                }
            };
            w * s
        })
        .collect::<Vec<f64>>();
    // fixed summation order keeps results independent of the thread count
    Ok(total.iter().sum())
}

/// Monte-Carlo estimate with its standard error.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct MonteCarloEstimate {
    pub mean: f64,
    pub std_error: f64,
    pub samples: usize,
    pub seed: u64,
}

/// Stratified Monte-Carlo estimate of `Ã` over the shell
/// `min ρ_{Ω₀} - min(t, R₂-R₁) < |x| < max ρ_Θ`, which contains the whole
/// integration region. Each stratum draws from its own ChaCha stream, so the
/// result does not depend on the thread count.
pub fn weak_fraenkel_monte_carlo(
    domain: &HoledDomain,
    web: &WebFunction,
    samples: usize,
    seed: u64,
) -> Result<MonteCarloEstimate> {
    let outer = OuterBody::new(&domain.u)?;
    let t = parallel_level(&outer, domain)?;
    let n = domain.geom.n;
    let m = t.min(web.thickness());
    let v = &domain.v;
    let r_lo = (domain.u.min_radius() - m).max(0.0);
    let r_hi = v.base_radius + v.sup_norms().0;
    // (angular cells, radial cells)
    let (na, nb, nr) = if n == 2 { (64, 1, 8) } else { (16, 8, 4) };
    let strata = na * nb * nr;
    let per = (samples / strata).max(2);
    let p = n as f64;
    let (lo_p, hi_p) = (r_lo.powf(p), r_hi.powf(p));
    let parts: Vec<(f64, f64)> = (0..strata)
        .into_par_iter()
        .map(|k| {
            let (ia, rest) = (k % na, k / na);
            let (ib, ir) = (rest % nb, rest / nb);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(k as u64);
            let ra = lo_p + (hi_p - lo_p) * ir as f64 / nr as f64;
            let rb = lo_p + (hi_p - lo_p) * (ir + 1) as f64 / nr as f64;
            let two_pi = 2.0 * std::f64::consts::PI;
            // angular measure times radial measure ∫ r^{n-1} dr
            let vol = if n == 2 {
                two_pi / na as f64 * (rb - ra) / 2.0
            } else {
                (2.0 / nb as f64) * (two_pi / na as f64) * (rb - ra) / 3.0
            };
            let (mut s1, mut s2) = (0.0, 0.0);
            for _ in 0..per {
                let r = (ra + (rb - ra) * rng.random::<f64>()).powf(1.0 / p);
                let phi = two_pi * (ia as f64 + rng.random::<f64>()) / na as f64;
                let dir = if n == 2 {
                    [phi.cos(), phi.sin(), 0.0]
                } else {
                    let z: f64 = -1.0 + 2.0 * (ib as f64 + rng.random::<f64>()) / nb as f64;
                    let q = (1.0 - z * z).max(0.0).sqrt();
                    [q * phi.cos(), q * phi.sin(), z]
                };
                let x = [r * dir[0], r * dir[1], r * dir[2]];
                let mut val = 0.0;
                if r < v.base_radius + v.value_at(&dir) {
                    let d = outer.distance_unchecked(&x).max(0.0);
                    if d < m {
                        val = web.energy_density(d);
                    }
                }
                s1 += val;
                s2 += val * val;
            }
            let k = per as f64;
            let mean = s1 / k;
            let var = (s2 / k - mean * mean).max(0.0) * k / (k - 1.0);
            (vol * mean, vol * vol * var / k)
        })
        .collect();
    let mean = parts.iter().map(|p| p.0).sum();
    let var: f64 = parts.iter().map(|p| p.1).sum();
    Ok(MonteCarloEstimate { mean, std_error: var.sqrt(), samples: per * strata, seed })
}
