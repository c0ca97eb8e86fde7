//! Quadrature grids on `S¹`, `S²` and real spherical harmonics.

use crate::quadrature::gauss_legendre;
use std::f64::consts::PI;

/// Quadrature nodes on the unit sphere of `R^n` with their weights.
///
/// `angles[i]` holds `(θ, φ)`: for `n = 2` the polar angle of the direction
/// and `φ = 0`; for `n = 3` colatitude and azimuth.
#[derive(Debug, Clone)]
pub struct SphereGrid {
    pub n: usize,
    pub dirs: Vec<[f64; 3]>,
    pub weights: Vec<f64>,
    pub angles: Vec<(f64, f64)>,
}

impl SphereGrid {
    /// Uniform `m`-point trapezoidal grid on the circle.
    pub fn circle(m: usize) -> Self {
        let w = 2.0 * PI / m as f64;
        let mut dirs = Vec::with_capacity(m);
        let mut angles = Vec::with_capacity(m);
        for j in 0..m {
            let t = w * j as f64;
            dirs.push([t.cos(), t.sin(), 0.0]);
            angles.push((t, 0.0));
        }
        Self { n: 2, dirs, weights: vec![w; m], angles }
    }

    /// Product grid: `nt` Gauss-Legendre nodes in `cos θ` times `2·nt`
    /// uniform azimuths. Exact for spherical polynomials of degree
    /// `< 2·nt`.
    pub fn sphere(nt: usize) -> Self {
        let (x, wx) = gauss_legendre(nt);
        let np = 2 * nt;
        let wp = 2.0 * PI / np as f64;
        let mut dirs = Vec::with_capacity(nt * np);
        let mut weights = Vec::with_capacity(nt * np);
        let mut angles = Vec::with_capacity(nt * np);
        for (ct, w) in x.iter().zip(&wx) {
            let theta = ct.acos();
            let st = theta.sin();
            for k in 0..np {
                let phi = wp * k as f64;
                dirs.push([st * phi.cos(), st * phi.sin(), *ct]);
                weights.push(w * wp);
                angles.push((theta, phi));
            }
        }
        Self { n: 3, dirs, weights, angles }
    }

    pub fn len(&self) -> usize {
        self.dirs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dirs.is_empty()
    }
}

/// Index of the real harmonic of degree `l` and order `m ∈ [-l, l]`.
pub fn sh_index(l: usize, m: i64) -> usize {
    (l * l) as usize + (l as i64 + m) as usize
}

/// Values of all real orthonormal spherical harmonics of degree `≤ lmax` at
/// `(θ, φ)`, together with `∂/∂θ` and `∂/∂φ`.
pub fn real_sh(lmax: usize, theta: f64, phi: f64) -> (Vec<f64>, Vec<f64>, Vec<f64>) {
    let theta = theta.clamp(1e-7, PI - 1e-7);
    let (st, ct) = theta.sin_cos();
    let size = (lmax + 1) * (lmax + 1);
    let mut val = vec![0.0; size];
    let mut dth = vec![0.0; size];
    let mut dph = vec![0.0; size];
    // normalized associated Legendre P̃_l^m(cos θ), stored by (l, m ≥ 0)
    let mut p = vec![vec![0.0; lmax + 1]; lmax + 1];
    p[0][0] = (0.25 / PI).sqrt();
    for m in 1..=lmax {
        let mf = m as f64;
        p[m][m] = -((2.0 * mf + 1.0) / (2.0 * mf)).sqrt() * st * p[m - 1][m - 1];
    }
    for m in 0..lmax {
        p[m + 1][m] = (2.0 * m as f64 + 3.0).sqrt() * ct * p[m][m];
    }
    for m in 0..=lmax {
        let mf = m as f64;
        for l in (m + 2)..=lmax {
            let lf = l as f64;
            let a = ((4.0 * lf * lf - 1.0) / (lf * lf - mf * mf)).sqrt();
            let b = (((lf - 1.0).powi(2) - mf * mf) / (4.0 * (lf - 1.0).powi(2) - 1.0)).sqrt();
            p[l][m] = a * (ct * p[l - 1][m] - b * p[l - 2][m]);
        }
    }
    let sqrt2 = 2f64.sqrt();
    for l in 0..=lmax {
        let lf = l as f64;
        for m in 0..=l {
            let mf = m as f64;
            let prev = if l > m { p[l - 1][m] } else { 0.0 };
            let c = ((2.0 * lf + 1.0) / (2.0 * lf - 1.0) * (lf * lf - mf * mf)).max(0.0).sqrt();
            let dp = (lf * ct * p[l][m] - c * prev) / st;
            if m == 0 {
                let i = sh_index(l, 0);
                val[i] = p[l][0];
                dth[i] = dp;
            } else {
                let (s, co) = (mf * phi).sin_cos();
                let ip = sh_index(l, m as i64);
                let im = sh_index(l, -(m as i64));
                val[ip] = sqrt2 * p[l][m] * co;
                dth[ip] = sqrt2 * dp * co;
                dph[ip] = -sqrt2 * p[l][m] * mf * s;
                val[im] = sqrt2 * p[l][m] * s;
                dth[im] = sqrt2 * dp * s;
                dph[im] = sqrt2 * p[l][m] * mf * co;
            }
        }
    }
    (val, dth, dph)
}

/// `(θ, φ)` of a nonzero vector in `R³`.
pub fn angles_of(x: &[f64; 3]) -> (f64, f64) {
    let r = (x[0] * x[0] + x[1] * x[1] + x[2] * x[2]).sqrt();
    let theta = (x[2] / r).clamp(-1.0, 1.0).acos();
    let phi = x[1].atan2(x[0]);
    (theta, phi)
}
