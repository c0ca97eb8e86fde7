//! P1 stiffness, mass and boundary-mass matrices.

use super::mesh::Mesh2D;
use rayon::prelude::*;

/// Compressed sparse row matrix; all assembled matrices are symmetric.
#[derive(Debug, Clone)]
pub struct CsrMatrix {
    pub n: usize,
    pub row_ptr: Vec<usize>,
    pub cols: Vec<usize>,
    pub vals: Vec<f64>,
}

impl CsrMatrix {
    /// Sums duplicate entries. Bucketed by row, then each row is sorted.
    pub fn from_triplets(n: usize, t: Vec<(usize, usize, f64)>) -> Self {
        let mut count = vec![0usize; n + 1];
        for e in &t {
            count[e.0 + 1] += 1;
        }
        for i in 0..n {
            count[i + 1] += count[i];
        }
        let mut fill = count.clone();
        let mut bucket = vec![(0usize, 0.0f64); t.len()];
        for (i, j, v) in t {
            bucket[fill[i]] = (j, v);
            fill[i] += 1;
        }
        let mut row_ptr = vec![0; n + 1];
        let mut cols = Vec::with_capacity(bucket.len());
        let mut vals: Vec<f64> = Vec::with_capacity(bucket.len());
        for i in 0..n {
            let row = &mut bucket[count[i]..count[i + 1]];
            row.sort_unstable_by_key(|e| e.0);
            let start = cols.len();
            for &(j, v) in row.iter() {
                if cols.len() > start && *cols.last().unwrap() == j {
                    *vals.last_mut().unwrap() += v;
                } else {
                    cols.push(j);
                    vals.push(v);
                }
            }
            row_ptr[i + 1] = cols.len();
        }
        Self { n, row_ptr, cols, vals }
    }

    pub fn mul(&self, x: &[f64], y: &mut [f64]) {
        for i in 0..self.n {
            let mut s = 0.0;
            for k in self.row_ptr[i]..self.row_ptr[i + 1] {
                s += self.vals[k] * x[self.cols[k]];
            }
            y[i] = s;
        }
    }

    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.n];
        self.mul(x, &mut y);
        y
    }

    /// `xᵀ A y`
    pub fn form(&self, x: &[f64], y: &[f64]) -> f64 {
        let mut s = 0.0;
        for i in 0..self.n {
            let mut r = 0.0;
            for k in self.row_ptr[i]..self.row_ptr[i + 1] {
                r += self.vals[k] * y[self.cols[k]];
            }
            s += x[i] * r;
        }
        s
    }

    /// `a·self + b·other` for matrices with arbitrary patterns.
    pub fn combine(&self, a: f64, other: &CsrMatrix, b: f64) -> CsrMatrix {
        let mut t = self.triplets(a);
        t.extend(other.triplets(b));
        Self::from_triplets(self.n, t)
    }

    pub fn triplets(&self, scale: f64) -> Vec<(usize, usize, f64)> {
        let mut t = Vec::with_capacity(self.vals.len());
        for i in 0..self.n {
            for k in self.row_ptr[i]..self.row_ptr[i + 1] {
                t.push((i, self.cols[k], scale * self.vals[k]));
            }
        }
        t
    }
}

/// Element stiffness and mass of one triangle.
fn element(p: [[f64; 2]; 3]) -> ([[f64; 3]; 3], [[f64; 3]; 3]) {
    let area = 0.5 * ((p[1][0] - p[0][0]) * (p[2][1] - p[0][1]) - (p[2][0] - p[0][0]) * (p[1][1] - p[0][1]));
    // gradients of barycentric coordinates: (y_j - y_k, x_k - x_j) / (2A)
    let mut g = [[0.0; 2]; 3];
    for i in 0..3 {
        let (j, k) = ((i + 1) % 3, (i + 2) % 3);
        g[i] = [(p[j][1] - p[k][1]) / (2.0 * area), (p[k][0] - p[j][0]) / (2.0 * area)];
    }
    let mut ke = [[0.0; 3]; 3];
    let mut me = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            ke[i][j] = area * (g[i][0] * g[j][0] + g[i][1] * g[j][1]);
            me[i][j] = area / 12.0 * if i == j { 2.0 } else { 1.0 };
        }
    }
    (ke, me)
}

/// Sparsity pattern of the vertex adjacency of `mesh`, diagonal included.
fn pattern(mesh: &Mesh2D) -> CsrMatrix {
    let n = mesh.num_vertices();
    let mut t = Vec::with_capacity(9 * mesh.triangles.len());
    for tri in &mesh.triangles {
        for &i in tri {
            for &j in tri {
                t.push((i, j, 0.0));
            }
        }
    }
    CsrMatrix::from_triplets(n, t)
}

/// Stiffness `K` and consistent mass `M` on the shared adjacency pattern;
/// element blocks are computed in parallel and scattered once.
pub fn stiffness_and_mass(mesh: &Mesh2D) -> (CsrMatrix, CsrMatrix) {
    let mut k = pattern(mesh);
    let mut m = k.clone();
    let blocks: Vec<_> = mesh
        .triangles
        .par_iter()
        .map(|t| element([mesh.vertices[t[0]], mesh.vertices[t[1]], mesh.vertices[t[2]]]))
        .collect();
    for (t, (ke, me)) in mesh.triangles.iter().zip(&blocks) {
        for i in 0..3 {
            let row = k.row_ptr[t[i]]..k.row_ptr[t[i] + 1];
            let cols = &k.cols[row.clone()];
            for j in 0..3 {
                let pos = row.start + cols.binary_search(&t[j]).expect("pattern holds every element entry");
                k.vals[pos] += ke[i][j];
                m.vals[pos] += me[i][j];
            }
        }
    }
    (k, m)
}

/// Consistent mass of the given boundary edges: `|e|/6 [[2, 1], [1, 2]]`.
pub fn boundary_mass(mesh: &Mesh2D, edges: &[[usize; 2]]) -> CsrMatrix {
    let mut t = Vec::with_capacity(4 * edges.len());
    for e in edges {
        let (a, b) = (mesh.vertices[e[0]], mesh.vertices[e[1]]);
        let len = (a[0] - b[0]).hypot(a[1] - b[1]);
        t.push((e[0], e[0], len / 3.0));
        t.push((e[1], e[1], len / 3.0));
        t.push((e[0], e[1], len / 6.0));
        t.push((e[1], e[0], len / 6.0));
    }
    CsrMatrix::from_triplets(mesh.num_vertices(), t)
}
