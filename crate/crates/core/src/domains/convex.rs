//! Convex polygons, support functions and Hausdorff distances.

use super::sphere::{angles_of, SphereGrid};
use super::{omega, BoundaryProfile};
use crate::error::{Error, Result};
use crate::optim::{golden_min, nelder_mead};
use crate::shell::ShellGeometry;
use std::collections::VecDeque;
use std::f64::consts::PI;

/// A convex body given by a profile and a translation of its centre.
pub type PlacedBody<'a> = (&'a BoundaryProfile, &'a [f64]);

/// Bounded convex polygon `{x : nⱼ·x ≤ cⱼ}` with unit outward normals sorted
/// by angle. Only the non-redundant lines are kept; vertex `i` is the
/// intersection of lines `i` and `i + 1`.
#[derive(Debug, Clone)]
pub struct ConvexPolygon {
    normals: Vec<[f64; 2]>,
    offsets: Vec<f64>,
    vertices: Vec<[f64; 2]>,
}

fn cross(a: [f64; 2], b: [f64; 2]) -> f64 {
    a[0] * b[1] - a[1] * b[0]
}

fn dot(a: [f64; 2], b: [f64; 2]) -> f64 {
    a[0] * b[0] + a[1] * b[1]
}

#[derive(Clone, Copy)]
struct Line {
    n: [f64; 2],
    c: f64,
    angle: f64,
}

impl Line {
    fn dir(&self) -> [f64; 2] {
        [-self.n[1], self.n[0]]
    }

    fn violation(&self, p: [f64; 2]) -> f64 {
        dot(self.n, p) - self.c
    }
}

fn intersect(a: &Line, b: &Line) -> Option<[f64; 2]> {
    let det = a.n[0] * b.n[1] - a.n[1] * b.n[0];
    if det.abs() < 1e-300 {
        return None;
    }
    Some([(a.c * b.n[1] - b.c * a.n[1]) / det, (a.n[0] * b.c - b.n[0] * a.c) / det])
}

impl ConvexPolygon {
    /// Intersection of half-planes `nⱼ·x ≤ cⱼ`. Returns `None` when the
    /// intersection is empty or has no interior.
    pub fn from_halfplanes(normals: &[[f64; 2]], offsets: &[f64]) -> Option<Self> {
        let mut lines: Vec<Line> = normals
            .iter()
            .zip(offsets)
            .map(|(n, &c)| {
                let len = (n[0] * n[0] + n[1] * n[1]).sqrt();
                let n = [n[0] / len, n[1] / len];
                Line { n, c: c / len, angle: n[1].atan2(n[0]) }
            })
            .collect();
        lines.sort_by(|a, b| a.angle.total_cmp(&b.angle).then(a.c.total_cmp(&b.c)));
        lines.dedup_by(|b, a| (b.angle - a.angle).abs() < 1e-15);
        if lines.len() < 3 {
            return None;
        }
        let scale = lines.iter().fold(0.0f64, |m, l| m.max(l.c.abs())).max(1e-300);
        let tol = 1e-13 * scale;
        let mut dq: VecDeque<Line> = VecDeque::with_capacity(lines.len());
        for l in lines {
            while dq.len() >= 2 {
                let k = dq.len();
                match intersect(&dq[k - 2], &dq[k - 1]) {
                    Some(p) if l.violation(p) > tol => {
                        dq.pop_back();
                    }
                    _ => break,
                }
            }
            while dq.len() >= 2 {
                match intersect(&dq[0], &dq[1]) {
                    Some(p) if l.violation(p) > tol => {
                        dq.pop_front();
                    }
                    _ => break,
                }
            }
            if let Some(last) = dq.back() {
                if cross(last.dir(), l.dir()) <= 0.0 {
                    // turning by π or more: the region is empty or unbounded
                    if dot(last.n, l.n) < 0.0 && last.c + l.c <= tol {
                        return None;
                    }
                    if cross(last.dir(), l.dir()).abs() < 1e-15 {
                        continue;
                    }
                }
            }
            dq.push_back(l);
        }
        loop {
            let k = dq.len();
            if k < 3 {
                return None;
            }
            if let Some(p) = intersect(&dq[k - 2], &dq[k - 1]) {
                if dq[0].violation(p) > tol {
                    dq.pop_back();
                    continue;
                }
            }
            if let Some(p) = intersect(&dq[0], &dq[1]) {
                if dq[k - 1].violation(p) > tol {
                    dq.pop_front();
                    continue;
                }
            }
            break;
        }
        let lines: Vec<Line> = dq.into_iter().collect();
        let k = lines.len();
        let mut vertices = Vec::with_capacity(k);
        for i in 0..k {
            vertices.push(intersect(&lines[i], &lines[(i + 1) % k])?);
        }
        let poly = Self {
            normals: lines.iter().map(|l| l.n).collect(),
            offsets: lines.iter().map(|l| l.c).collect(),
            vertices,
        };
        // consecutive normals must turn by less than π, and the result must
        // satisfy every kept constraint
        for i in 0..k {
            if cross(poly.normals[i], poly.normals[(i + 1) % k]) <= 0.0 {
                return None;
            }
        }
        let area = poly.area();
        if !(area > 1e-14 * scale * scale) {
            return None;
        }
        for v in &poly.vertices {
            if lines.iter().step_by((k / 64).max(1)).any(|l| l.violation(*v) > 1e-9 * scale) {
                return None;
            }
        }
        Some(poly)
    }

    /// Polygon from counter-clockwise vertices; rejects non-convex input.
    pub fn from_vertices(vertices: &[[f64; 2]]) -> Result<Self> {
        let k = vertices.len();
        if k < 3 {
            return Err(Error::InvalidParameter("a polygon needs at least 3 vertices".into()));
        }
        let mut normals = Vec::with_capacity(k);
        let mut offsets = Vec::with_capacity(k);
        for i in 0..k {
            let (a, b, c) = (vertices[i], vertices[(i + 1) % k], vertices[(i + 2) % k]);
            let e1 = [b[0] - a[0], b[1] - a[1]];
            let e2 = [c[0] - b[0], c[1] - b[1]];
            if cross(e1, e2) <= 0.0 {
                return Err(Error::NonConvex { direction: e2[1].atan2(e2[0]) });
            }
            let len = (e1[0] * e1[0] + e1[1] * e1[1]).sqrt();
            let n = [e1[1] / len, -e1[0] / len];
            normals.push(n);
            offsets.push(dot(n, a));
        }
        Self::from_halfplanes(&normals, &offsets)
            .ok_or_else(|| Error::InvalidParameter("degenerate polygon".into()))
    }

    /// Circumscribed polygon of the planar convex body `R + u` formed by
    /// `m` tangent lines at equispaced polar angles.
    pub fn tangent_polygon(profile: &BoundaryProfile, m: usize) -> Result<Self> {
        let (normals, offsets, _) = tangent_lines(profile, m)?;
        Self::from_halfplanes(&normals, &offsets)
            .ok_or_else(|| Error::InvalidParameter("tangent polygon is degenerate".into()))
    }

    pub fn vertices(&self) -> &[[f64; 2]] {
        &self.vertices
    }

    pub fn normals(&self) -> &[[f64; 2]] {
        &self.normals
    }

    pub fn offsets(&self) -> &[f64] {
        &self.offsets
    }

    pub fn area(&self) -> f64 {
        let k = self.vertices.len();
        (0..k).map(|i| cross(self.vertices[i], self.vertices[(i + 1) % k])).sum::<f64>() / 2.0
    }

    pub fn perimeter(&self) -> f64 {
        let k = self.vertices.len();
        (0..k)
            .map(|i| {
                let (a, b) = (self.vertices[i], self.vertices[(i + 1) % k]);
                ((b[0] - a[0]).powi(2) + (b[1] - a[1]).powi(2)).sqrt()
            })
            .sum()
    }

    pub fn centroid(&self) -> [f64; 2] {
        let k = self.vertices.len();
        let (mut cx, mut cy, mut a) = (0.0, 0.0, 0.0);
        for i in 0..k {
            let (p, q) = (self.vertices[i], self.vertices[(i + 1) % k]);
            let w = cross(p, q);
            a += w;
            cx += (p[0] + q[0]) * w;
            cy += (p[1] + q[1]) * w;
        }
        [cx / (3.0 * a), cy / (3.0 * a)]
    }

    /// `min_j (cⱼ - nⱼ·x)`: the distance to the boundary for interior points,
    /// negative outside.
    pub fn signed_depth(&self, x: [f64; 2]) -> f64 {
        self.normals.iter().zip(&self.offsets).map(|(n, c)| c - dot(*n, x)).fold(f64::INFINITY, f64::min)
    }

    pub fn contains(&self, x: [f64; 2]) -> bool {
        self.signed_depth(x) > 0.0
    }

    /// `max_{v} v·dir`.
    pub fn support(&self, dir: [f64; 2]) -> f64 {
        self.vertices.iter().map(|v| dot(*v, dir)).fold(f64::NEG_INFINITY, f64::max)
    }

    /// Inward offset `{x : x + tB ⊂ P}`; `None` when empty.
    pub fn eroded(&self, t: f64) -> Option<Self> {
        if t == 0.0 {
            return Some(self.clone());
        }
        let offsets: Vec<f64> = self.offsets.iter().map(|c| c - t).collect();
        Self::from_halfplanes(&self.normals, &offsets)
    }

    /// Radius of the largest inscribed disk, by bisection on erosion.
    pub fn inradius(&self) -> f64 {
        let mut lo = 0.0;
        let mut hi = self.width() / 2.0;
        for _ in 0..100 {
            let mid = 0.5 * (lo + hi);
            if self.eroded(mid).is_some() {
                lo = mid;
            } else {
                hi = mid;
            }
            if hi - lo < 1e-14 * (1.0 + hi) {
                break;
            }
        }
        lo
    }

    /// Minimal width over the polygon's own normals.
    pub fn width(&self) -> f64 {
        self.normals
            .iter()
            .zip(&self.offsets)
            .map(|(n, c)| c + self.support([-n[0], -n[1]]))
            .fold(f64::INFINITY, f64::min)
    }
}

/// Tangent lines of a planar convex profile at `m` equispaced polar angles:
/// unit outward normals, offsets `nⱼ·γ(θⱼ)` and the angles `θⱼ`.
pub(crate) fn tangent_lines(profile: &BoundaryProfile, m: usize) -> Result<(Vec<[f64; 2]>, Vec<f64>, Vec<f64>)> {
    if profile.n != 2 {
        return Err(Error::InvalidParameter("tangent lines need a planar profile".into()));
    }
    let mut normals = Vec::with_capacity(m);
    let mut offsets = Vec::with_capacity(m);
    let mut thetas = Vec::with_capacity(m);
    for j in 0..m {
        let t = 2.0 * PI * j as f64 / m as f64;
        let (n, c) = tangent_at(profile, t);
        normals.push(n);
        offsets.push(c);
        thetas.push(t);
    }
    Ok((normals, offsets, thetas))
}

/// Unit outward normal and support offset of the tangent line at polar angle `θ`.
pub(crate) fn tangent_at(profile: &BoundaryProfile, t: f64) -> ([f64; 2], f64) {
    let (u, du, _) = profile.eval_planar(t);
    let r = profile.base_radius + u;
    let (s, c) = t.sin_cos();
    let p = [r * c, r * s];
    let tan = [du * c - r * s, du * s + r * c];
    let len = (tan[0] * tan[0] + tan[1] * tan[1]).sqrt();
    let n = [tan[1] / len, -tan[0] / len];
    (n, dot(n, p))
}

pub(crate) fn boundary_point(profile: &BoundaryProfile, center: &[f64], angles: (f64, f64)) -> [f64; 3] {
    if profile.n == 2 {
        let r = profile.base_radius + profile.eval_planar(angles.0).0;
        [center[0] + r * angles.0.cos(), center[1] + r * angles.0.sin(), 0.0]
    } else {
        let r = profile.base_radius + profile.eval_spatial(angles.0, angles.1).0;
        let st = angles.0.sin();
        [
            center[0] + r * st * angles.1.cos(),
            center[1] + r * st * angles.1.sin(),
            center[2] + r * angles.0.cos(),
        ]
    }
}

fn dot3(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

/// Support function values of one body on a fixed direction set.
#[derive(Debug, Clone)]
pub struct SupportTable {
    pub dirs: Vec<[f64; 3]>,
    pub values: Vec<f64>,
}

/// Boundary point cloud used to seed support-function maximization.
struct Cloud {
    angles: Vec<(f64, f64)>,
    points: Vec<[f64; 3]>,
}

impl Cloud {
    fn new(profile: &BoundaryProfile, center: &[f64]) -> Self {
        let grid = if profile.n == 2 { SphereGrid::circle(4096) } else { SphereGrid::sphere(48) };
        let points = grid.angles.iter().map(|&a| boundary_point(profile, center, a)).collect();
        Self { angles: grid.angles, points }
    }

    fn support(&self, profile: &BoundaryProfile, center: &[f64], dir: &[f64; 3]) -> f64 {
        let (best, _) = self
            .points
            .iter()
            .enumerate()
            .map(|(i, p)| (i, dot3(p, dir)))
            .fold((0, f64::NEG_INFINITY), |a, b| if b.1 > a.1 { b } else { a });
        let (t0, p0) = self.angles[best];
        if profile.n == 2 {
            let step = 2.0 * PI / self.points.len() as f64;
            let (_, v) = golden_min(
                |t| -dot3(&boundary_point(profile, center, (t, 0.0)), dir),
                t0 - 1.5 * step,
                t0 + 1.5 * step,
                1e-11,
            );
            -v
        } else {
            let (_, v) = nelder_mead(
                |a| -dot3(&boundary_point(profile, center, (a[0], a[1])), dir),
                &[t0, p0],
                0.03,
                1e-10,
                1e-14,
                400,
            );
            (-v).max(dot3(&self.points[best], dir))
        }
    }
}

/// Support function `h(dir) = max_{y ∈ ∂E} y·dir` of the convex body
/// `center + {ξ r : r < R + u(ξ)}`; `dir` must be a unit vector.
pub fn support_function(profile: &BoundaryProfile, center: &[f64], dir: &[f64]) -> f64 {
    let d = [dir[0], dir[1], if profile.n == 3 { dir[2] } else { 0.0 }];
    Cloud::new(profile, center).support(profile, center, &d)
}

impl SupportTable {
    /// Support values on `m` equispaced directions (`n = 2`) or on the
    /// `sphere(m)` grid (`n = 3`).
    pub fn new(profile: &BoundaryProfile, center: &[f64], m: usize) -> Self {
        let grid = if profile.n == 2 { SphereGrid::circle(m) } else { SphereGrid::sphere(m) };
        let cloud = Cloud::new(profile, center);
        let values = grid.dirs.iter().map(|d| cloud.support(profile, center, d)).collect();
        Self { dirs: grid.dirs, values }
    }
}

fn check_convex_input(body: PlacedBody<'_>) -> Result<()> {
    body.0.check_convex()?;
    if body.1.len() < body.0.n {
        return Err(Error::InvalidParameter("centre has too few coordinates".into()));
    }
    Ok(())
}

/// `d_H(E, F) = ‖h_E - h_F‖_∞` for two convex bodies given as profiles with
/// centres.
pub fn hausdorff_distance(a: PlacedBody<'_>, b: PlacedBody<'_>) -> Result<f64> {
    check_convex_input(a)?;
    check_convex_input(b)?;
    let n = a.0.n;
    if b.0.n != n {
        return Err(Error::InvalidParameter("bodies live in different dimensions".into()));
    }
    let m = if n == 2 { 4096 } else { 32 };
    let ta = SupportTable::new(a.0, a.1, m);
    let tb = SupportTable::new(b.0, b.1, m);
    let (best, gap) = ta
        .values
        .iter()
        .zip(&tb.values)
        .map(|(x, y)| (x - y).abs())
        .enumerate()
        .fold((0, 0.0f64), |acc, (i, g)| if g > acc.1 { (i, g) } else { acc });
    let (ca, cb) = (Cloud::new(a.0, a.1), Cloud::new(b.0, b.1));
    let diff = |d: &[f64; 3]| (ca.support(a.0, a.1, d) - cb.support(b.0, b.1, d)).abs();
    let refined = if n == 2 {
        let phi0 = 2.0 * PI * best as f64 / m as f64;
        let step = 2.0 * PI / m as f64;
        -golden_min(|p| -diff(&[p.cos(), p.sin(), 0.0]), phi0 - step, phi0 + step, 1e-10).1
    } else {
        let (t0, p0) = angles_of(&ta.dirs[best]);
        let dir = |a: &[f64]| [a[0].sin() * a[1].cos(), a[0].sin() * a[1].sin(), a[0].cos()];
        -nelder_mead(|a| -diff(&dir(a)), &[t0, p0], 0.05, 1e-8, 1e-13, 300).1
    };
    Ok(gap.max(refined))
}

/// `𝒜_H(Ω₀) = inf_{x₀} d_H(Ω₀, B_R(x₀)) / (ωₙ Rⁿ)` with `R = R₂`.
///
/// Returns the value and the minimizing centre.
pub fn hausdorff_asymmetry(outer: &BoundaryProfile, geom: &ShellGeometry) -> Result<(f64, Vec<f64>)> {
    outer.check_convex()?;
    let n = outer.n;
    let r = geom.r2;
    let origin = vec![0.0; n];
    let table = SupportTable::new(outer, &origin, if n == 2 { 4096 } else { 32 });
    let objective = |x: &[f64]| {
        table
            .dirs
            .iter()
            .zip(&table.values)
            .map(|(d, h)| (h - (0..n).map(|i| x[i] * d[i]).sum::<f64>() - r).abs())
            .fold(0.0f64, f64::max)
    };
    let bary = outer.barycenter();
    let cheb = super::OuterBody::new(outer)?.chebyshev_center();
    let scale = 0.05 * r;
    let mut best = (bary.clone(), objective(&bary));
    for start in [&bary, &cheb] {
        let (x, v) = nelder_mead(objective, start, scale, 1e-9, 1e-14, 4000);
        if v < best.1 {
            best = (x, v);
        }
    }
    if n == 2 {
        // coarse grid fallback around the barycentre
        let half = 0.2 * r;
        let steps = 20;
        let mut grid_best = (bary.clone(), f64::INFINITY);
        for i in 0..=steps {
            for j in 0..=steps {
                let x = vec![
                    bary[0] - half + 2.0 * half * i as f64 / steps as f64,
                    bary[1] - half + 2.0 * half * j as f64 / steps as f64,
                ];
                let v = objective(&x);
                if v < grid_best.1 {
                    grid_best = (x, v);
                }
            }
        }
        if grid_best.1 < best.1 + 1e-12 {
            let (x, v) = nelder_mead(objective, &grid_best.0, 2.0 * half / steps as f64, 1e-9, 1e-14, 4000);
            if v < best.1 {
                best = (x, v);
            }
        }
    }
    let value = best.1 / (omega(n) * r.powi(n as i32));
    Ok((value, best.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn square(side: f64) -> ConvexPolygon {
        let h = side / 2.0;
        ConvexPolygon::from_vertices(&[[-h, -h], [h, -h], [h, h], [-h, h]]).unwrap()
    }

    #[test]
    fn square_erosion() {
        let s = square(2.0);
        assert!((s.area() - 4.0).abs() < 1e-14);
        let e = s.eroded(0.3).unwrap();
        assert!((e.area() - 1.96).abs() < 1e-13);
        assert!((s.inradius() - 1.0).abs() < 1e-12);
        assert!(s.eroded(1.0 + 1e-9).is_none());
        assert!((s.signed_depth([0.5, 0.0]) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn nonconvex_vertices_rejected() {
        let r = ConvexPolygon::from_vertices(&[[0.0, 0.0], [2.0, 0.0], [1.0, 0.2], [2.0, 2.0], [0.0, 2.0]]);
        assert!(matches!(r, Err(Error::NonConvex { .. })));
    }

    #[test]
    fn tangent_polygon_of_disk() {
        let p = BoundaryProfile::zero(2, 2.0);
        let poly = ConvexPolygon::tangent_polygon(&p, 10_000).unwrap();
        assert!(poly.area() >= 4.0 * PI && poly.area() - 4.0 * PI < 1e-6);
        let e = poly.eroded(1.0).unwrap();
        assert!(e.area() >= PI);
        assert!((poly.inradius() - 2.0).abs() < 1e-10);
    }

    #[test]
    fn hausdorff_concentric() {
        let a = BoundaryProfile::zero(2, 1.0);
        let b = BoundaryProfile::zero(2, 1.3);
        let o = [0.0, 0.0];
        let d = hausdorff_distance((&a, &o), (&b, &o)).unwrap();
        assert!((d - 0.3).abs() < 1e-12);
        let shifted = [0.1, -0.2];
        let d = hausdorff_distance((&a, &o), (&a, &shifted)).unwrap();
        assert!((d - 0.05f64.sqrt()).abs() < 1e-9);
    }

    #[test]
    fn asymmetry_of_ball_is_zero() {
        let g = ShellGeometry::new(2, -1.0, 1.0, 2.0).unwrap();
        let (a, _) = hausdorff_asymmetry(&BoundaryProfile::zero(2, 2.0), &g).unwrap();
        assert!(a < 1e-9);
        let t = BoundaryProfile::translated_disk(2.0, 2.0, [0.1, 0.05], 32);
        let (a, c) = hausdorff_asymmetry(&t, &g).unwrap();
        assert!(a < 1e-7, "{a}");
        assert!((c[0] - 0.1).abs() < 1e-5 && (c[1] - 0.05).abs() < 1e-5);
    }
}
