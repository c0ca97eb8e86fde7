//! Smallest eigenpair of a symmetric pencil `A x = λ B x` by shift-invert
//! subspace iteration with Rayleigh-Ritz projection.

use super::assembly::CsrMatrix;
use crate::error::{Error, Result};
use faer::prelude::*;
use faer::sparse::linalg::solvers::{Llt, SymbolicLlt};
use faer::sparse::{SparseColMat, Triplet};
use faer::Side;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Subspace dimension.
pub const BLOCK: usize = 4;

#[derive(Debug, Clone)]
pub struct EigenSolution {
    pub value: f64,
    /// Normalized to `xᵀ B x = 1` with a positive sum.
    pub vector: Vec<f64>,
    /// `‖A x - λ B x‖ / ‖B x‖`
    pub residual: f64,
    pub iterations: usize,
    /// Shift that was factorized successfully.
    pub shift: f64,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Eigen-decomposition of a small symmetric matrix by cyclic Jacobi
/// rotations; eigenvalues are returned in descending order with the
/// eigenvectors as columns of `v[i][k]`.
pub fn symmetric_eigen(a: &[Vec<f64>]) -> (Vec<f64>, Vec<Vec<f64>>) {
    let k = a.len();
    let mut a: Vec<Vec<f64>> = a.to_vec();
    let mut v: Vec<Vec<f64>> = (0..k).map(|i| (0..k).map(|j| if i == j { 1.0 } else { 0.0 }).collect()).collect();
    for _sweep in 0..100 {
        let off: f64 = (0..k).flat_map(|i| (0..k).filter(move |&j| j != i).map(move |j| (i, j))).map(|(i, j)| a[i][j] * a[i][j]).sum();
        let diag: f64 = (0..k).map(|i| a[i][i] * a[i][i]).sum();
        if off <= 1e-32 * diag || off == 0.0 {
            break;
        }
        for p in 0..k {
            for q in p + 1..k {
                if a[p][q] == 0.0 {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for r in 0..k {
                    let (arp, arq) = (a[r][p], a[r][q]);
                    a[r][p] = c * arp - s * arq;
                    a[r][q] = s * arp + c * arq;
                }
                for r in 0..k {
                    let (apr, aqr) = (a[p][r], a[q][r]);
                    a[p][r] = c * apr - s * aqr;
                    a[q][r] = s * apr + c * aqr;
                }
                for r in 0..k {
                    let (vrp, vrq) = (v[r][p], v[r][q]);
                    v[r][p] = c * vrp - s * vrq;
                    v[r][q] = s * vrp + c * vrq;
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by(|&i, &j| a[j][j].total_cmp(&a[i][i]));
    let vals = order.iter().map(|&i| a[i][i]).collect();
    let vecs = (0..k).map(|r| order.iter().map(|&i| v[r][i]).collect()).collect();
    (vals, vecs)
}

/// Lower Cholesky factor of a small SPD matrix.
fn small_cholesky(a: &[Vec<f64>]) -> Option<Vec<Vec<f64>>> {
    let k = a.len();
    let mut l = vec![vec![0.0; k]; k];
    for i in 0..k {
        for j in 0..=i {
            let s = a[i][j] - (0..j).map(|m| l[i][m] * l[j][m]).sum::<f64>();
            if i == j {
                if !(s > 0.0) {
                    return None;
                }
                l[i][i] = s.sqrt();
            } else {
                l[i][j] = s / l[j][j];
            }
        }
    }
    Some(l)
}

/// Orthonormalizes the columns in place (two passes of modified
/// Gram-Schmidt); columns that collapse are replaced by random vectors.
fn orthonormalize(x: &mut [Vec<f64>], rng: &mut ChaCha8Rng) {
    for j in 0..x.len() {
        let scale = dot(&x[j], &x[j]).sqrt();
        for _attempt in 0..3 {
            for _pass in 0..2 {
                for i in 0..j {
                    let (head, tail) = x.split_at_mut(j);
                    let c = dot(&head[i], &tail[0]);
                    tail[0].iter_mut().zip(&head[i]).for_each(|(a, b)| *a -= c * b);
                }
            }
            let nrm = dot(&x[j], &x[j]).sqrt();
            if nrm > 1e-10 * scale && nrm > 0.0 {
                x[j].iter_mut().for_each(|a| *a /= nrm);
                break;
            }
            x[j].iter_mut().for_each(|a| *a = rng.random_range(-1.0..1.0));
        }
    }
}

/// Factorization of `A - sB`; the shift is lowered until the matrix is
/// positive definite.
struct ShiftedSolver {
    llt: Llt<usize, f64>,
    shift: f64,
}

impl ShiftedSolver {
    fn new(a: &CsrMatrix, b: &CsrMatrix, mut shift: f64) -> Result<Self> {
        let n = a.n;
        let build = |s: f64| -> Result<SparseColMat<usize, f64>> {
            let m = a.combine(1.0, b, -s);
            let trip: Vec<Triplet<usize, usize, f64>> =
                m.triplets(1.0).into_iter().filter(|t| t.0 >= t.1).map(|(i, j, v)| Triplet::new(i, j, v)).collect();
            SparseColMat::try_new_from_triplets(n, n, &trip).map_err(|e| Error::Factorization(format!("{e:?}")))
        };
        let mat = build(shift)?;
        let symbolic = SymbolicLlt::try_new(mat.symbolic(), Side::Lower).map_err(|e| Error::Factorization(format!("{e:?}")))?;
        let mut current = mat;
        for _ in 0..40 {
            match Llt::try_new_with_symbolic(symbolic.clone(), current.as_ref(), Side::Lower) {
                Ok(llt) => return Ok(Self { llt, shift }),
                Err(_) => {
                    shift -= 1.0 + shift.abs();
                    current = build(shift)?;
                }
            }
        }
        Err(Error::Factorization(format!("no positive definite shift found down to {shift}")))
    }

    fn solve(&self, cols: &[Vec<f64>]) -> Vec<Vec<f64>> {
        let n = cols[0].len();
        let mut rhs = Mat::from_fn(n, cols.len(), |i, j| cols[j][i]);
        self.llt.solve_in_place(rhs.as_mut());
        (0..cols.len()).map(|j| (0..n).map(|i| rhs[(i, j)]).collect()).collect()
    }
}

/// Smallest eigenpair of `A x = λ B x` with `A - shift·B` assumed positive
/// definite (the shift is lowered otherwise). `start` may hold up to
/// [`BLOCK`] initial vectors; the rest are filled with seeded random
/// vectors.
pub fn smallest_eigenpair(
    a: &CsrMatrix,
    b: &CsrMatrix,
    shift: f64,
    start: &[Vec<f64>],
    tol: f64,
    max_iter: usize,
) -> Result<EigenSolution> {
    let n = a.n;
    let solver = ShiftedSolver::new(a, b, shift)?;
    let s = solver.shift;
    let mut rng = ChaCha8Rng::seed_from_u64(0x51ab_1e);
    let mut x: Vec<Vec<f64>> = start.iter().take(BLOCK).cloned().collect();
    while x.len() < BLOCK {
        x.push((0..n).map(|_| rng.random_range(-1.0..1.0)).collect());
    }
    orthonormalize(&mut x, &mut rng);
    let mut best = (f64::NAN, vec![], f64::INFINITY);
    for it in 1..=max_iter {
        let bx: Vec<Vec<f64>> = x.iter().map(|c| b.apply(c)).collect();
        let mut y = solver.solve(&bx);
        orthonormalize(&mut y, &mut rng);
        let ay: Vec<Vec<f64>> = y.iter().map(|c| a.apply(c)).collect();
        let by: Vec<Vec<f64>> = y.iter().map(|c| b.apply(c)).collect();
        let k = y.len();
        let mut ah = vec![vec![0.0; k]; k];
        let mut bh = vec![vec![0.0; k]; k];
        for i in 0..k {
            for j in 0..k {
                ah[i][j] = dot(&y[i], &ay[j]) - s * dot(&y[i], &by[j]);
                bh[i][j] = dot(&y[i], &by[j]);
            }
        }
        for i in 0..k {
            for j in 0..i {
                let m = 0.5 * (ah[i][j] + ah[j][i]);
                ah[i][j] = m;
                ah[j][i] = m;
                let m = 0.5 * (bh[i][j] + bh[j][i]);
                bh[i][j] = m;
                bh[j][i] = m;
            }
        }
        let l = small_cholesky(&ah).ok_or_else(|| Error::Factorization("projected shifted matrix is not definite".into()))?;
        // C = L⁻¹ B̂ L⁻ᵀ
        let linv = invert_lower(&l);
        let c: Vec<Vec<f64>> = (0..k)
            .map(|i| {
                (0..k)
                    .map(|j| (0..k).map(|p| (0..k).map(|q| linv[i][p] * bh[p][q] * linv[j][q]).sum::<f64>()).sum())
                    .collect()
            })
            .collect();
        let (mu, w) = symmetric_eigen(&c);
        // coefficients L⁻ᵀ w
        let coef: Vec<Vec<f64>> = (0..k).map(|col| (0..k).map(|i| (0..k).map(|p| linv[p][i] * w[p][col]).sum()).collect()).collect();
        x = coef
            .iter()
            .map(|cf| {
                let mut v = vec![0.0; n];
                for (yi, ci) in y.iter().zip(cf) {
                    v.iter_mut().zip(yi).for_each(|(a, b)| *a += ci * b);
                }
                v
            })
            .collect();
        let lambda = s + 1.0 / mu[0];
        let v0 = &x[0];
        let av = a.apply(v0);
        let bv = b.apply(v0);
        let r: f64 = av.iter().zip(&bv).map(|(p, q)| (p - lambda * q).powi(2)).sum::<f64>().sqrt();
        let residual = r / dot(&bv, &bv).sqrt();
        if residual < best.2 {
            best = (lambda, v0.clone(), residual);
        }
        if residual <= tol {
            let mut vector = x[0].clone();
            let nb = b.form(&vector, &vector).sqrt();
            let sign = if vector.iter().sum::<f64>() < 0.0 { -1.0 } else { 1.0 };
            vector.iter_mut().for_each(|v| *v *= sign / nb);
            let value = a.form(&vector, &vector) / b.form(&vector, &vector);
            return Ok(EigenSolution { value, vector, residual, iterations: it, shift: s });
        }
        orthonormalize(&mut x, &mut rng);
    }
    Err(Error::NoConvergence { iterations: max_iter, residual: best.2 })
}

fn invert_lower(l: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let k = l.len();
    let mut inv = vec![vec![0.0; k]; k];
    for j in 0..k {
        inv[j][j] = 1.0 / l[j][j];
        for i in j + 1..k {
            let s: f64 = (j..i).map(|m| l[i][m] * inv[m][j]).sum();
            inv[i][j] = -s / l[i][i];
        }
    }
    inv
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn jacobi_diagonalizes() {
        let a = vec![vec![4.0, 1.0, 0.5], vec![1.0, 3.0, 0.2], vec![0.5, 0.2, 1.0]];
        let (vals, vecs) = symmetric_eigen(&a);
        for k in 0..3 {
            for i in 0..3 {
                let av: f64 = (0..3).map(|j| a[i][j] * vecs[j][k]).sum();
                assert!((av - vals[k] * vecs[i][k]).abs() < 1e-12);
            }
        }
        assert!(vals[0] >= vals[1] && vals[1] >= vals[2]);
    }

    #[test]
    fn diagonal_pencil() {
        let n = 50;
        let a = CsrMatrix::from_triplets(n, (0..n).map(|i| (i, i, (i + 1) as f64)).collect());
        let b = CsrMatrix::from_triplets(n, (0..n).map(|i| (i, i, 2.0)).collect());
        // a shift above λ₁ forces the fallback
        let s = smallest_eigenpair(&a, &b, 3.0, &[], 1e-12, 200).unwrap();
        assert!((s.value - 0.5).abs() < 1e-12);
        assert!(s.shift < 0.5);
    }
}
