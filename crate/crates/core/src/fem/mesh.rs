//! Triangulations of planar holed domains.
//!
//! Meshes are O-grids: `n_r + 1` rings of `n_θ` vertices between the two
//! radial graphs, every other ring shifted by half an angular step so that
//! the triangles are close to equilateral. Doubling both counts halves the
//! mesh size with an identical local pattern, which is what Richardson
//! extrapolation needs.

use crate::domains::HoledDomain;
use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use std::f64::consts::PI;
use std::fmt::Write as _;

/// Ring and angle counts of an O-grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct OGrid {
    pub n_theta: usize,
    pub n_r: usize,
}

impl OGrid {
    pub fn refined(self) -> Self {
        Self { n_theta: 2 * self.n_theta, n_r: 2 * self.n_r }
    }

    fn offset(self, ring: usize) -> f64 {
        if ring % 2 == 1 {
            0.5
        } else {
            0.0
        }
    }

    /// `(θ, ξ)` of vertex `ring·n_θ + j`, with `ξ ∈ [0, 1]` from hole to
    /// outer boundary.
    pub fn params(self, index: usize) -> (f64, f64) {
        let (i, j) = (index / self.n_theta, index % self.n_theta);
        let dt = 2.0 * PI / self.n_theta as f64;
        ((j as f64 + self.offset(i)) * dt, i as f64 / self.n_r as f64)
    }

    /// Piecewise-linear interpolation of nodal values given on this grid:
    /// linear in `θ` along the two neighbouring rings, then linear in `ξ`.
    pub fn interpolate(self, values: &[f64], theta: f64, xi: f64) -> f64 {
        let t = (xi * self.n_r as f64).clamp(0.0, self.n_r as f64);
        let i0 = (t.floor() as usize).min(self.n_r.saturating_sub(1));
        let w = t - i0 as f64;
        let ring = |i: usize| {
            let dt = 2.0 * PI / self.n_theta as f64;
            let s = (theta / dt - self.offset(i)).rem_euclid(self.n_theta as f64);
            let j0 = (s.floor() as usize).min(self.n_theta - 1);
            let a = s - j0 as f64;
            let j1 = (j0 + 1) % self.n_theta;
            let base = i * self.n_theta;
            (1.0 - a) * values[base + j0] + a * values[base + j1]
        };
        (1.0 - w) * ring(i0) + w * ring(i0 + 1)
    }
}

/// Conforming triangulation with marked boundary edges.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Mesh2D {
    pub vertices: Vec<[f64; 2]>,
    pub triangles: Vec<[usize; 3]>,
    pub outer_boundary_edges: Vec<[usize; 2]>,
    pub inner_boundary_edges: Vec<[usize; 2]>,
    pub h_max: f64,
    /// Structure of meshes built by [`mesh_holed_domain`].
    pub grid: Option<OGrid>,
}

fn signed_area(a: [f64; 2], b: [f64; 2], c: [f64; 2]) -> f64 {
    0.5 * ((b[0] - a[0]) * (c[1] - a[1]) - (c[0] - a[0]) * (b[1] - a[1]))
}

fn dist(a: [f64; 2], b: [f64; 2]) -> f64 {
    (a[0] - b[0]).hypot(a[1] - b[1])
}

impl Mesh2D {
    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn area(&self, t: usize) -> f64 {
        let [a, b, c] = self.triangles[t];
        signed_area(self.vertices[a], self.vertices[b], self.vertices[c])
    }

    pub fn total_area(&self) -> f64 {
        (0..self.triangles.len()).map(|t| self.area(t)).sum()
    }

    fn edge_length_sum(&self, edges: &[[usize; 2]]) -> f64 {
        edges.iter().map(|e| dist(self.vertices[e[0]], self.vertices[e[1]])).sum()
    }

    /// Length of the polygonal outer boundary.
    pub fn outer_length(&self) -> f64 {
        self.edge_length_sum(&self.outer_boundary_edges)
    }

    /// Length of the polygonal hole boundary.
    pub fn inner_length(&self) -> f64 {
        self.edge_length_sum(&self.inner_boundary_edges)
    }

    /// Edge multiplicities keyed by sorted vertex pairs.
    fn edge_counts(&self) -> HashMap<(usize, usize), usize> {
        let mut counts = HashMap::with_capacity(3 * self.triangles.len() / 2 + 16);
        for t in &self.triangles {
            for k in 0..3 {
                let (a, b) = (t[k], t[(k + 1) % 3]);
                *counts.entry((a.min(b), a.max(b))).or_insert(0) += 1;
            }
        }
        counts
    }

    /// `V - E + F` with `F` the number of triangles.
    pub fn euler_characteristic(&self) -> i64 {
        self.vertices.len() as i64 - self.edge_counts().len() as i64 + self.triangles.len() as i64
    }

    fn compute_h_max(&self) -> f64 {
        self.edge_counts()
            .keys()
            .map(|&(a, b)| dist(self.vertices[a], self.vertices[b]))
            .fold(0.0, f64::max)
    }

    /// Positive areas, every edge shared by at most two triangles, and every
    /// boundary edge marked exactly once.
    pub fn validate(&self) -> Result<()> {
        let nv = self.vertices.len();
        for (k, t) in self.triangles.iter().enumerate() {
            if t.iter().any(|&i| i >= nv) {
                return Err(Error::Mesh(format!("triangle {k} references a missing vertex")));
            }
            if !(self.area(k) > 0.0) {
                return Err(Error::Mesh(format!("triangle {k} has non-positive area {}", self.area(k))));
            }
        }
        let counts = self.edge_counts();
        let mut marks: HashMap<(usize, usize), usize> = HashMap::new();
        for e in self.outer_boundary_edges.iter().chain(&self.inner_boundary_edges) {
            *marks.entry((e[0].min(e[1]), e[0].max(e[1]))).or_insert(0) += 1;
        }
        for (e, &c) in &counts {
            match (c, marks.get(e).copied().unwrap_or(0)) {
                (1, 1) | (2, 0) => {}
                (c, m) => {
                    return Err(Error::Mesh(format!(
                        "edge {e:?} belongs to {c} triangles and carries {m} boundary markers"
                    )))
                }
            }
        }
        if marks.len() != self.outer_boundary_edges.len() + self.inner_boundary_edges.len()
            || marks.keys().any(|e| !counts.contains_key(e))
        {
            return Err(Error::Mesh("boundary markers are duplicated or not mesh edges".into()));
        }
        Ok(())
    }

    /// Plain-text export: counts followed by one record per line.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "mesh2d 1");
        let _ = writeln!(s, "vertices {}", self.vertices.len());
        for v in &self.vertices {
            let _ = writeln!(s, "{:e} {:e}", v[0], v[1]);
        }
        let _ = writeln!(s, "triangles {}", self.triangles.len());
        for t in &self.triangles {
            let _ = writeln!(s, "{} {} {}", t[0], t[1], t[2]);
        }
        for (name, edges) in [("outer_edges", &self.outer_boundary_edges), ("inner_edges", &self.inner_boundary_edges)] {
            let _ = writeln!(s, "{name} {}", edges.len());
            for e in edges {
                let _ = writeln!(s, "{} {}", e[0], e[1]);
            }
        }
        s
    }

    /// Parses [`Self::to_text`] output and validates the result.
    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty());
        let bad = |m: &str| Error::Mesh(format!("malformed mesh text: {m}"));
        if lines.next() != Some("mesh2d 1") {
            return Err(bad("missing header"));
        }
        let mut section = |name: &str| -> Result<Vec<Vec<f64>>> {
            let head = lines.next().ok_or_else(|| bad(name))?;
            let count = head
                .strip_prefix(name)
                .and_then(|r| r.trim().parse::<usize>().ok())
                .ok_or_else(|| bad(head))?;
            (0..count)
                .map(|_| {
                    let l = lines.next().ok_or_else(|| bad(name))?;
                    l.split_whitespace().map(|x| x.parse::<f64>().map_err(|_| bad(l))).collect()
                })
                .collect()
        };
        let idx = |r: &[f64], k: usize| -> Result<Vec<usize>> {
            if r.len() != k || r.iter().any(|x| *x < 0.0 || x.fract() != 0.0) {
                return Err(Error::Mesh("malformed index record".into()));
            }
            Ok(r.iter().map(|x| *x as usize).collect())
        };
        let vertices = section("vertices")?
            .into_iter()
            .map(|r| if r.len() == 2 { Ok([r[0], r[1]]) } else { Err(Error::Mesh("vertex needs two coordinates".into())) })
            .collect::<Result<Vec<_>>>()?;
        let triangles = section("triangles")?
            .iter()
            .map(|r| idx(r, 3).map(|v| [v[0], v[1], v[2]]))
            .collect::<Result<Vec<_>>>()?;
        let outer = section("outer_edges")?.iter().map(|r| idx(r, 2).map(|v| [v[0], v[1]])).collect::<Result<Vec<_>>>()?;
        let inner = section("inner_edges")?.iter().map(|r| idx(r, 2).map(|v| [v[0], v[1]])).collect::<Result<Vec<_>>>()?;
        let mut mesh = Mesh2D {
            vertices,
            triangles,
            outer_boundary_edges: outer,
            inner_boundary_edges: inner,
            h_max: 0.0,
            grid: None,
        };
        mesh.validate()?;
        mesh.h_max = mesh.compute_h_max();
        Ok(mesh)
    }
}

/// Radial functions of the hole and the outer boundary at angle `θ`.
fn radii(domain: &HoledDomain, theta: f64) -> (f64, f64) {
    let x = [theta.cos(), theta.sin()];
    (domain.geom.r1 + domain.v.value_at(&x), domain.geom.r2 + domain.u.value_at(&x))
}

/// O-grid mesh with the given counts.
pub fn mesh_with_grid(domain: &HoledDomain, grid: OGrid) -> Result<Mesh2D> {
    if domain.geom.n != 2 {
        return Err(Error::Mesh("only planar domains are meshed".into()));
    }
    let OGrid { n_theta: nt, n_r: nr } = grid;
    if nt < 3 || nr < 1 {
        return Err(Error::Mesh(format!("grid {nt}x{nr} is too coarse")));
    }
    let mut vertices = Vec::with_capacity(nt * (nr + 1));
    for index in 0..nt * (nr + 1) {
        let (theta, xi) = grid.params(index);
        let (a, b) = radii(domain, theta);
        if !(b > a) {
            return Err(Error::Mesh(format!("boundaries cross at angle {theta}")));
        }
        let r = a + xi * (b - a);
        vertices.push([r * theta.cos(), r * theta.sin()]);
    }
    let id = |i: usize, j: usize| i * nt + j % nt;
    let mut triangles = Vec::with_capacity(2 * nt * nr);
    for i in 0..nr {
        for j in 0..nt {
            // ring i+1 is shifted right of ring i when i is even
            let tris = if i % 2 == 0 {
                [[id(i, j), id(i, j + 1), id(i + 1, j)], [id(i + 1, j), id(i, j + 1), id(i + 1, j + 1)]]
            } else {
                [[id(i, j), id(i, j + 1), id(i + 1, j + 1)], [id(i + 1, j), id(i, j), id(i + 1, j + 1)]]
            };
            for mut t in tris {
                if signed_area(vertices[t[0]], vertices[t[1]], vertices[t[2]]) < 0.0 {
                    t.swap(1, 2);
                }
                triangles.push(t);
            }
        }
    }
    let inner_boundary_edges = (0..nt).map(|j| [id(0, j), id(0, j + 1)]).collect();
    let outer_boundary_edges = (0..nt).map(|j| [id(nr, j), id(nr, j + 1)]).collect();
    let mut mesh = Mesh2D { vertices, triangles, outer_boundary_edges, inner_boundary_edges, h_max: 0.0, grid: Some(grid) };
    for k in 0..mesh.triangles.len() {
        if !(mesh.area(k) > 0.0) {
            return Err(Error::Mesh(format!("degenerate triangle {k}")));
        }
    }
    mesh.h_max = mesh.compute_h_max();
    Ok(mesh)
}

/// Counts for which the O-grid of `domain` has `h_max ≤ h_target`.
pub fn grid_for(domain: &HoledDomain, h_target: f64) -> Result<OGrid> {
    if !(h_target > 0.0) {
        return Err(Error::InvalidParameter(format!("h_target must be positive, got {h_target}")));
    }
    let samples = 1024;
    let (mut r_out, mut wall) = (0.0f64, 0.0f64);
    for k in 0..samples {
        let (a, b) = radii(domain, 2.0 * PI * k as f64 / samples as f64);
        r_out = r_out.max(b);
        wall = wall.max(b - a);
    }
    // near-equilateral pattern: ring spacing √3/2 of the angular spacing
    let mut grid = OGrid {
        n_theta: (2.0 * PI * r_out / h_target).ceil() as usize,
        n_r: (wall / (0.5 * 3f64.sqrt() * h_target)).ceil() as usize,
    };
    for _ in 0..20 {
        let h = mesh_with_grid(domain, grid)?.h_max;
        if h <= h_target {
            return Ok(grid);
        }
        let f = (h / h_target) * 1.01;
        grid = OGrid { n_theta: (grid.n_theta as f64 * f).ceil() as usize, n_r: (grid.n_r as f64 * f).ceil() as usize };
    }
    Err(Error::Mesh(format!("could not reach h_max <= {h_target}")))
}

/// Conforming triangulation of `Ω₀ \ Θ̄` with `h_max ≤ h_target`. Boundary
/// vertices lie on the two radial graphs.
pub fn mesh_holed_domain(domain: &HoledDomain, h_target: f64) -> Result<Mesh2D> {
    domain.validate()?;
    let grid = grid_for(domain, h_target)?;
    mesh_with_grid(domain, grid)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ShellGeometry;

    fn annulus() -> HoledDomain {
        HoledDomain::annulus(ShellGeometry::new(2, -1.0, 1.0, 2.0).unwrap())
    }

    #[test]
    fn annulus_mesh_is_valid() {
        let m = mesh_holed_domain(&annulus(), 0.1).unwrap();
        assert!(m.h_max <= 0.1);
        m.validate().unwrap();
        assert_eq!(m.euler_characteristic(), 0);
        for v in &m.vertices {
            let r = v[0].hypot(v[1]);
            assert!(r >= 1.0 - 1e-12 && r <= 2.0 + 1e-12);
        }
        for e in &m.outer_boundary_edges {
            assert!((m.vertices[e[0]][0].hypot(m.vertices[e[0]][1]) - 2.0).abs() < 1e-12);
        }
    }

    #[test]
    fn text_round_trip() {
        let m = mesh_with_grid(&annulus(), OGrid { n_theta: 12, n_r: 3 }).unwrap();
        let back = Mesh2D::from_text(&m.to_text()).unwrap();
        assert_eq!(back.triangles, m.triangles);
        assert_eq!(back.outer_boundary_edges, m.outer_boundary_edges);
        for (a, b) in back.vertices.iter().zip(&m.vertices) {
            assert!(dist(*a, *b) < 1e-15);
        }
        let mut broken = back.clone();
        broken.outer_boundary_edges.pop();
        assert!(broken.validate().is_err());
    }

    #[test]
    fn interpolation_reproduces_linear_functions_of_parameters() {
        let g = OGrid { n_theta: 16, n_r: 4 };
        let vals: Vec<f64> = (0..16 * 5).map(|k| g.params(k).1 * 3.0 + 1.0).collect();
        assert!((g.interpolate(&vals, 0.3, 0.55) - 2.65).abs() < 1e-12);
    }
}
