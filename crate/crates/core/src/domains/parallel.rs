//! Distance to the outer boundary and inner parallel sets.
//!
//! Planar bodies are replaced by the circumscribed polygon of
//! [`DEFAULT_POLYGON_VERTICES`] tangent lines. Its erosion by `t` is the
//! intersection of the shifted tangent half-planes, so every level set is an
//! outer approximation of the true one. Point distances are refined on the
//! smooth curve. Spatial bodies use a circumscribed polytope built from 2048
//! support planes.

use super::convex::{boundary_point, tangent_at, tangent_lines, ConvexPolygon, SupportTable};
use super::sphere::{angles_of, SphereGrid};
use super::BoundaryProfile;
use crate::error::{Error, Result};
use crate::optim::{brent, golden_min, nelder_mead};
use crate::shell::ShellGeometry;

/// Number of tangent lines for planar outer bodies.
pub const DEFAULT_POLYGON_VERTICES: usize = 10_000;

const BLOCK: usize = 32;

#[derive(Debug, Clone)]
enum Body {
    Planar {
        polygon: ConvexPolygon,
        normals: Vec<[f64; 2]>,
        offsets: Vec<f64>,
        thetas: Vec<f64>,
        normal_angles: Vec<f64>,
        reach: f64,
    },
    Spatial {
        table: SupportTable,
        center: Vec<f64>,
        inradius: f64,
    },
}

/// A convex outer body prepared for repeated distance and parallel-set
/// queries.
#[derive(Debug, Clone)]
pub struct OuterBody {
    pub profile: BoundaryProfile,
    body: Body,
}

/// Inner parallel set `{x ∈ Ω₀ : d(x) > t}`.
#[derive(Debug, Clone)]
pub enum InnerParallel {
    Planar(ConvexPolygon),
    /// Star-shaped about `center` with radial function sampled on `grid`.
    Spatial { center: [f64; 3], grid: SphereGrid, radii: Vec<f64>, volume: f64 },
}

impl InnerParallel {
    pub fn volume(&self) -> f64 {
        match self {
            Self::Planar(p) => p.area(),
            Self::Spatial { volume, .. } => *volume,
        }
    }

    /// Membership test. Spatial sets use the radius of the nearest grid
    /// direction.
    pub fn contains(&self, x: &[f64]) -> bool {
        match self {
            Self::Planar(p) => p.contains([x[0], x[1]]),
            Self::Spatial { center, grid, radii, .. } => {
                let d = [x[0] - center[0], x[1] - center[1], x[2] - center[2]];
                let r = (d[0] * d[0] + d[1] * d[1] + d[2] * d[2]).sqrt();
                if r == 0.0 {
                    return true;
                }
                let (i, _) = grid
                    .dirs
                    .iter()
                    .enumerate()
                    .map(|(i, g)| (i, g[0] * d[0] + g[1] * d[1] + g[2] * d[2]))
                    .fold((0, f64::NEG_INFINITY), |a, b| if b.1 > a.1 { b } else { a });
                r < radii[i]
            }
        }
    }
}

fn spatial_depth(table: &SupportTable, x: &[f64]) -> (usize, f64) {
    table
        .dirs
        .iter()
        .zip(&table.values)
        .map(|(d, h)| h - d[0] * x[0] - d[1] * x[1] - d[2] * x[2])
        .enumerate()
        .fold((0, f64::INFINITY), |a, b| if b.1 < a.1 { b } else { a })
}

fn spatial_chebyshev(table: &SupportTable, profile: &BoundaryProfile) -> (Vec<f64>, f64) {
    let start = profile.barycenter();
    let scale = 0.05 * profile.base_radius;
    let f = |x: &[f64]| -spatial_depth(table, x).1;
    let mut best = nelder_mead(f, &start, scale, 1e-10, 1e-14, 3000);
    for _ in 0..3 {
        let next = nelder_mead(f, &best.0, scale * 0.1, 1e-10, 1e-14, 3000);
        if next.1 < best.1 {
            best = next;
        }
    }
    (best.0, -best.1)
}

impl OuterBody {
    /// Prepares a convex outer body; non-convex profiles are rejected.
    pub fn new(profile: &BoundaryProfile) -> Result<Self> {
        profile.check_convex()?;
        let body = if profile.n == 2 {
            let (normals, offsets, thetas) = tangent_lines(profile, DEFAULT_POLYGON_VERTICES)?;
            let polygon = ConvexPolygon::from_halfplanes(&normals, &offsets)
                .ok_or_else(|| Error::InvalidParameter("tangent polygon is degenerate".into()))?;
            let reach = polygon.vertices().iter().fold(0.0f64, |m, v| m.max(v[0].hypot(v[1])));
            let first = normals[0][1].atan2(normals[0][0]);
            // unwrap so that the angles increase with the index
            let normal_angles = normals
                .iter()
                .map(|n| first + (n[1].atan2(n[0]) - first).rem_euclid(2.0 * std::f64::consts::PI))
                .collect();
            Body::Planar { polygon, normals, offsets, thetas, normal_angles, reach }
        } else {
            let table = SupportTable::new(profile, &[0.0, 0.0, 0.0], 32);
            let (center, inradius) = spatial_chebyshev(&table, profile);
            Body::Spatial { table, center, inradius }
        };
        Ok(Self { profile: profile.clone(), body })
    }

    pub fn n(&self) -> usize {
        self.profile.n
    }

    /// Planar tangent polygon, if any.
    pub fn polygon(&self) -> Option<&ConvexPolygon> {
        match &self.body {
            Body::Planar { polygon, .. } => Some(polygon),
            Body::Spatial { .. } => None,
        }
    }

    /// `min_j (cⱼ - nⱼ·x)` over the supporting lines or planes together
    /// with the index of the minimizer. Planar queries use branch and bound
    /// over blocks of lines: `g(φ) = h(φ) - n(φ)·x` is Lipschitz in the
    /// normal angle with constant `max|vertex| + |x|`.
    fn depth(&self, x: &[f64]) -> (usize, f64) {
        match &self.body {
            Body::Planar { normals, offsets, normal_angles, reach, .. } => {
                let m = normals.len();
                let g = |j: usize| offsets[j] - normals[j][0] * x[0] - normals[j][1] * x[1];
                let lip = reach + x[0].hypot(x[1]);
                let nb = m.div_ceil(BLOCK);
                let mut best = (0, f64::INFINITY);
                let mut bounds = Vec::with_capacity(nb);
                for b in 0..nb {
                    let s = b * BLOCK;
                    let e = ((b + 1) * BLOCK).min(m) - 1;
                    let (gs, ge) = (g(s), g(e));
                    if gs < best.1 {
                        best = (s, gs);
                    }
                    if ge < best.1 {
                        best = (e, ge);
                    }
                    let span = normal_angles[e] - normal_angles[s];
                    bounds.push(((gs + ge - lip * span) / 2.0, s, e));
                }
                bounds.sort_by(|a, b| a.0.total_cmp(&b.0));
                for (lb, s, e) in bounds {
                    if lb >= best.1 {
                        break;
                    }
                    for j in s..=e {
                        let v = g(j);
                        if v < best.1 {
                            best = (j, v);
                        }
                    }
                }
                best
            }
            Body::Spatial { table, .. } => spatial_depth(table, x),
        }
    }

    /// Distance from `x ∈ Ω̄₀` to `∂Ω₀`, exact up to the minimization
    /// tolerance.
    pub fn distance(&self, x: &[f64]) -> Result<f64> {
        let d = self.distance_unchecked(x);
        if d < -1e-10 * self.profile.base_radius {
            return Err(Error::OutsideDomain { x: x[0], y: x[1] });
        }
        Ok(d.max(0.0))
    }

    /// Signed distance (negative outside) without the containment check.
    pub fn distance_unchecked(&self, x: &[f64]) -> f64 {
        let (j, coarse) = self.depth(x);
        match &self.body {
            Body::Planar { thetas, .. } => {
                let step = thetas[1] - thetas[0];
                let t0 = thetas[j];
                let (_, v) = golden_min(
                    |t| {
                        let (n, c) = tangent_at(&self.profile, t);
                        c - n[0] * x[0] - n[1] * x[1]
                    },
                    t0 - 2.0 * step,
                    t0 + 2.0 * step,
                    1e-10,
                );
                v.min(coarse)
            }
            Body::Spatial { table, .. } => {
                if coarse < 0.0 {
                    return coarse;
                }
                // nearest boundary point, seeded by the foot on the best plane
                let nu = table.dirs[j];
                let foot = [x[0] + coarse * nu[0], x[1] + coarse * nu[1], x[2] + coarse * nu[2]];
                let (t0, p0) = angles_of(&foot);
                let origin = [0.0; 3];
                let gap = |a: &[f64]| {
                    let y = boundary_point(&self.profile, &origin, (a[0], a[1]));
                    ((y[0] - x[0]).powi(2) + (y[1] - x[1]).powi(2) + (y[2] - x[2]).powi(2)).sqrt()
                };
                let (_, v) = nelder_mead(gap, &[t0, p0], 0.02, 1e-12, 1e-16, 400);
                let r = (x[0] * x[0] + x[1] * x[1] + x[2] * x[2]).sqrt();
                if r > 0.0 && r > self.profile.base_radius + self.profile.value_at(x) {
                    -v
                } else {
                    v.min(coarse)
                }
            }
        }
    }

    /// Largest inscribed radius.
    pub fn inradius(&self) -> f64 {
        match &self.body {
            Body::Planar { polygon, .. } => polygon.inradius(),
            Body::Spatial { inradius, .. } => *inradius,
        }
    }

    /// Centre of a largest inscribed ball.
    pub fn chebyshev_center(&self) -> Vec<f64> {
        match &self.body {
            Body::Planar { polygon, .. } => {
                let r = polygon.inradius();
                // the erosion just below the inradius is a tiny polygon
                let mut t = r * (1.0 - 1e-9);
                loop {
                    if let Some(p) = polygon.eroded(t) {
                        let c = p.centroid();
                        return vec![c[0], c[1]];
                    }
                    t *= 1.0 - 1e-6;
                }
            }
            Body::Spatial { center, .. } => center.clone(),
        }
    }

    pub fn volume(&self) -> f64 {
        match &self.body {
            Body::Planar { polygon, .. } => polygon.area(),
            Body::Spatial { .. } => self.spatial_parallel(0.0).map(|p| p.volume()).unwrap_or(0.0),
        }
    }

    fn spatial_parallel(&self, t: f64) -> Result<InnerParallel> {
        let Body::Spatial { table, center: c, inradius } = &self.body else { unreachable!() };
        if !(t < *inradius) {
            return Err(Error::EmptyParallelSet { t, inradius: *inradius });
        }
        let grid = SphereGrid::sphere(24);
        let mut radii = Vec::with_capacity(grid.len());
        let mut volume = 0.0;
        for (w, om) in grid.weights.iter().zip(&grid.dirs) {
            // along c + sω the plane j is reached at s = (hⱼ - νⱼ·c - t)/(νⱼ·ω)
            let mut s_max = f64::INFINITY;
            for (d, h) in table.dirs.iter().zip(&table.values) {
                let a = d[0] * om[0] + d[1] * om[1] + d[2] * om[2];
                if a > 0.0 {
                    let b = h - d[0] * c[0] - d[1] * c[1] - d[2] * c[2] - t;
                    s_max = s_max.min(b / a);
                }
            }
            radii.push(s_max);
            volume += w * s_max.powi(3) / 3.0;
        }
        Ok(InnerParallel::Spatial { center: [c[0], c[1], c[2]], grid, radii, volume })
    }

    /// `{x : d(x) > t}`.
    pub fn inner_parallel(&self, t: f64) -> Result<InnerParallel> {
        if !(t >= 0.0) {
            return Err(Error::InvalidParameter(format!("offset must be nonnegative, got {t}")));
        }
        match &self.body {
            Body::Planar { polygon, .. } => polygon
                .eroded(t)
                .map(InnerParallel::Planar)
                .ok_or_else(|| Error::EmptyParallelSet { t, inradius: polygon.inradius() }),
            Body::Spatial { .. } => self.spatial_parallel(t),
        }
    }

    /// Level `t` with `|{d > t}| = target`.
    pub fn level_for_volume(&self, target: f64) -> Result<f64> {
        let max = self.volume();
        if !(target > 0.0 && target < max) {
            return Err(Error::VolumeOutOfRange { target, max });
        }
        let rho = self.inradius();
        let f = |t: f64| self.inner_parallel(t).map(|k| k.volume()).unwrap_or(0.0) - target;
        brent(f, 0.0, rho, 1e-15 * rho.max(1.0)).ok_or(Error::VolumeOutOfRange { target, max })
    }
}

fn check_geometry(outer: &BoundaryProfile, geom: &ShellGeometry) -> Result<()> {
    if outer.n != geom.n {
        return Err(Error::InvalidParameter("profile and geometry dimensions differ".into()));
    }
    Ok(())
}

/// `K = {x ∈ Ω₀ : d(x) > t}`.
pub fn inner_parallel(outer: &BoundaryProfile, geom: &ShellGeometry, t: f64) -> Result<InnerParallel> {
    check_geometry(outer, geom)?;
    OuterBody::new(outer)?.inner_parallel(t)
}

/// `t_{Ω₀}` with `|{d > t_{Ω₀}}| = target_volume`.
pub fn parallel_level_for_volume(outer: &BoundaryProfile, geom: &ShellGeometry, target_volume: f64) -> Result<f64> {
    check_geometry(outer, geom)?;
    OuterBody::new(outer)?.level_for_volume(target_volume)
}

/// `dist(x, ∂Ω₀)` for `x ∈ Ω̄₀`. Builds an [`OuterBody`] per call; reuse one
/// for repeated queries.
pub fn distance_to_outer_boundary(outer: &BoundaryProfile, geom: &ShellGeometry, x: &[f64]) -> Result<f64> {
    check_geometry(outer, geom)?;
    OuterBody::new(outer)?.distance(x)
}
