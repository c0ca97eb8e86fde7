//! Residuals of the constraint expansions and of the norm estimates for
//! nearly spherical profiles.

use super::{perimeter, volume, BoundaryProfile, HoledDomain};
use crate::shell::ShellGeometry;
use serde::Serialize;

/// Norm estimates for one profile.
#[derive(Debug, Clone, Serialize)]
pub struct ProfileBounds {
    pub sup: f64,
    pub grad_sup: f64,
    pub l2_sq: f64,
    pub grad_l2_sq: f64,
    /// `‖∇_τ ũ‖² / ‖ũ‖²` for `ũ = u` minus its degree-0 and degree-1 parts;
    /// `NaN` when `ũ = 0`.
    pub poincare_ratio: f64,
    /// `2n‖u₀‖² - ‖∇_τ u‖²` for the mean-zero part `u₀`; the ε-corrected
    /// Poincaré inequality asks this to be at most `Cε`.
    pub poincare_defect: f64,
    /// `‖u₀‖_∞^{n-1}` and its bound, for the mean-zero part `u₀`.
    pub sup_bound_lhs: f64,
    pub sup_bound_rhs: f64,
    /// `‖∇_τ u‖_∞` against `3‖u‖_∞^{1/2}`.
    pub grad_bound_lhs: f64,
    pub grad_bound_rhs: f64,
    pub convex: bool,
}

impl ProfileBounds {
    pub fn poincare_holds(&self, n: usize) -> bool {
        self.poincare_ratio.is_nan() || self.poincare_ratio >= 2.0 * n as f64 * (1.0 - 1e-10)
    }

    pub fn sup_bound_holds(&self) -> bool {
        self.sup_bound_lhs <= self.sup_bound_rhs * (1.0 + 1e-12) + 1e-300
    }

    pub fn grad_bound_holds(&self) -> bool {
        self.grad_bound_lhs <= self.grad_bound_rhs * (1.0 + 1e-12) + 1e-300
    }
}

/// Output of [`lemma_checks`].
#[derive(Debug, Clone, Serialize)]
pub struct LemmaReport {
    pub eps: f64,
    /// Both profiles satisfy `‖·‖_{W^{1,∞}} ≤ ε`.
    pub within_eps: bool,
    /// Outer perimeter expansion residual, normalized by `‖u‖² + ‖∇_τu‖²`.
    pub perimeter_expansion_residual: f64,
    /// Volume expansion residual with the second-order weights
    /// `(n-1)R^{n-2}/2`, normalized by `‖u‖² + ‖v‖²`.
    pub volume_expansion_residual: f64,
    /// Same with the weights `(n-1)R^{n-1}/2` on the quadratic terms.
    pub volume_expansion_residual_alt: f64,
    pub outer: ProfileBounds,
    pub inner: ProfileBounds,
}

/// `num/den`, with `0/0` read as zero; `scale` sets what counts as zero.
fn ratio(num: f64, den: f64, scale: f64) -> f64 {
    if den <= 1e-300 {
        if num <= 1e-13 * scale {
            0.0
        } else {
            f64::INFINITY
        }
    } else {
        num / den
    }
}

fn bounds(p: &BoundaryProfile) -> ProfileBounds {
    let n = p.n;
    let l2_sq = p.l2_norm_sq();
    let grad_l2_sq = p.grad_l2_norm_sq();
    let (sup, grad_sup) = p.sup_norms();
    let high = p.without_mean().without_degree_one();
    let h2 = high.l2_norm_sq();
    let poincare_ratio = if h2 > 1e-300 { high.grad_l2_norm_sq() / h2 } else { f64::NAN };
    let zero_mean = p.without_mean();
    let (sup0, _) = zero_mean.sup_norms();
    let poincare_defect = 2.0 * n as f64 * zero_mean.l2_norm_sq() - grad_l2_sq;
    let g = grad_l2_sq.sqrt();
    let (lhs, rhs) = if n == 2 {
        (sup0, std::f64::consts::PI * g)
    } else if grad_l2_sq > 0.0 {
        let arg = 8.0 * std::f64::consts::E * grad_sup.powi(n as i32 - 1) / grad_l2_sq;
        (sup0.powi(n as i32 - 1), 4.0 * grad_l2_sq * arg.ln())
    } else {
        (sup0.powi(n as i32 - 1), 0.0)
    };
    ProfileBounds {
        sup,
        grad_sup,
        l2_sq,
        grad_l2_sq,
        poincare_ratio,
        poincare_defect,
        sup_bound_lhs: lhs,
        sup_bound_rhs: rhs,
        grad_bound_lhs: grad_sup,
        grad_bound_rhs: 3.0 * sup.sqrt(),
        convex: p.check_convex().is_ok(),
    }
}

/// Evaluates the expansion residuals and the norm estimates for `(u, v)`.
pub fn lemma_checks(domain: &HoledDomain, eps: f64) -> LemmaReport {
    let ShellGeometry { n, r1, r2, .. } = domain.geom;
    let nf = n as f64;
    let (u, v) = (&domain.u, &domain.v);
    let outer = bounds(u);
    let inner = bounds(v);
    let (iu, iv) = (u.integral(), v.integral());

    let p_ball = domain.geom.outer_perimeter();
    let q1 = r2.powi(n as i32 - 2) * iu
        + r2.powi(n as i32 - 3) / (2.0 * (nf - 1.0)) * outer.grad_l2_sq
        + (nf - 2.0) / 2.0 * r2.powi(n as i32 - 3) * outer.l2_sq;
    let res1 = ((perimeter(u) - p_ball) / (nf - 1.0) - q1).abs();

    let dv = (volume(u) - volume(v)) - domain.geom.shell_volume();
    let lin = r2.powi(n as i32 - 1) * iu - r1.powi(n as i32 - 1) * iv;
    let q2 = lin + (nf - 1.0) / 2.0 * (r2.powi(n as i32 - 2) * outer.l2_sq - r1.powi(n as i32 - 2) * inner.l2_sq);
    let q2_alt = lin + (nf - 1.0) / 2.0 * (r2.powi(n as i32 - 1) * outer.l2_sq - r1.powi(n as i32 - 1) * inner.l2_sq);
    let den1 = outer.l2_sq + outer.grad_l2_sq;
    let den2 = outer.l2_sq + inner.l2_sq;

    LemmaReport {
        eps,
        within_eps: u.w1inf_norm() <= eps * (1.0 + 1e-12) && v.w1inf_norm() <= eps * (1.0 + 1e-12),
        perimeter_expansion_residual: ratio(res1, den1, p_ball),
        volume_expansion_residual: ratio((dv - q2).abs(), den2, domain.geom.shell_volume()),
        volume_expansion_residual_alt: ratio((dv - q2_alt).abs(), den2, domain.geom.shell_volume()),
        outer,
        inner,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_profiles_have_zero_residuals() {
        let g = ShellGeometry::new(2, -1.0, 1.0, 2.0).unwrap();
        let r = lemma_checks(&HoledDomain::annulus(g), 0.01);
        assert_eq!(r.perimeter_expansion_residual, 0.0);
        assert_eq!(r.volume_expansion_residual, 0.0);
        assert!(r.outer.poincare_holds(2));
    }

    #[test]
    fn pure_mode_poincare_ratio() {
        for k in 2..7 {
            let p = BoundaryProfile::cosine_mode(2.0, k, 0.01);
            let b = bounds(&p);
            assert!((b.poincare_ratio - (k * k) as f64).abs() < 1e-10);
            assert!(b.sup_bound_holds());
        }
    }
}
