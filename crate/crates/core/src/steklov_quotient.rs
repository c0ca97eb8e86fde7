//! The outer-boundary quotient `N(Ω)/D(Ω)` for nearly spherical outer
//! profiles, which bounds the first Steklov-Neumann eigenvalue from above.
//!
//! ```text
//! N(Ω) = ∫ f(R₂+u) (R₂+u)^{n-1}
//! D(Ω) = ∫ h(R₂+u) (R₂+u)^{n-1} √(1 + |∇_τu|²/(R₂+u)²)
//! ```

use crate::domains::BoundaryProfile;
use crate::error::{Error, Result};
use crate::shell::ShellGeometry;
use crate::steklov_radial::SteklovRadialContext;
use serde::Serialize;

/// Amplitude above which a profile is outside the small-deformation regime,
/// as a fraction of `R₂`.
pub const NEARLY_SPHERICAL_FRACTION: f64 = 0.05;

#[derive(Debug, Clone, Copy, Serialize)]
pub struct QuotientEvaluation {
    pub n_val: f64,
    pub d_val: f64,
    pub ratio: f64,
    /// `(N(A)D(Ω) - D(A)N(Ω)) / (nωₙ)`.
    pub gap: f64,
    /// `‖∇_τu‖²_{L²}`
    pub gradient_norm_sq: f64,
    /// `‖u‖_{W^{1,∞}} > 0.05·R₂`.
    pub outside_hypotheses: bool,
}

fn check(outer: &BoundaryProfile, geom: &ShellGeometry) -> Result<()> {
    if outer.n != geom.n {
        return Err(Error::InvalidParameter("profile and geometry dimensions differ".into()));
    }
    if outer.base_radius != geom.r2 {
        return Err(Error::InvalidParameter("outer profile must be based at R2".into()));
    }
    let rmin = outer.min_radius();
    if !(rmin > geom.r1) {
        return Err(Error::Inadmissible(format!("outer radius {rmin} drops below R1 = {}", geom.r1)));
    }
    Ok(())
}

/// `N`, `D`, their ratio and the gap against the shell.
pub fn evaluate_quotient(outer: &BoundaryProfile, geom: &ShellGeometry) -> Result<QuotientEvaluation> {
    check(outer, geom)?;
    let ctx = SteklovRadialContext::new(geom.n, geom.r1, geom.r2)?;
    evaluate_with(&ctx, outer, geom)
}

fn evaluate_with(ctx: &SteklovRadialContext, outer: &BoundaryProfile, geom: &ShellGeometry) -> Result<QuotientEvaluation> {
    let n = geom.n as i32;
    let s = outer.samples();
    let (mut nv, mut dv, mut g2) = (0.0, 0.0, 0.0);
    for ((w, u), g) in s.grid.weights.iter().zip(&s.u).zip(&s.grad_sq) {
        let r = geom.r2 + u;
        let jac = r.powi(n - 1);
        nv += w * ctx.f(r) * jac;
        dv += w * ctx.h(r) * jac * (1.0 + g / (r * r)).sqrt();
        g2 += w * g;
    }
    let sphere = geom.outer_perimeter() / geom.r2.powi(n - 1);
    let base = geom.r2.powi(n - 1);
    let (na, da) = (sphere * base * ctx.f(geom.r2), sphere * base * ctx.h(geom.r2));
    let n_omega = sphere;
    Ok(QuotientEvaluation {
        n_val: nv,
        d_val: dv,
        ratio: nv / dv,
        gap: (na * dv - da * nv) / n_omega,
        gradient_norm_sq: g2,
        outside_hypotheses: outer.w1inf_norm() > NEARLY_SPHERICAL_FRACTION * geom.r2,
    })
}

/// `(gap, gap/‖∇_τu‖²)`; the ratio is `NaN` for `u ≡ 0`.
pub fn stability_gap(outer: &BoundaryProfile, geom: &ShellGeometry) -> Result<(f64, f64)> {
    let q = evaluate_quotient(outer, geom)?;
    let ratio = if q.gradient_norm_sq > 0.0 { q.gap / q.gradient_norm_sq } else { f64::NAN };
    Ok((q.gap, ratio))
}

/// Second-order prediction of the gap for a perimeter-constrained profile:
///
/// ```text
/// gap ≈ R₂^{n-2} (nA₁ + R₂A₂)/2 ‖ũ‖² + R₂^{n-3} (A₀/2 - R₂A₁/(2(n-1))) ‖∇_τũ‖²
/// ```
///
/// where `ũ` is `u` without its mean. The degree-zero part enters only
/// through the perimeter constraint, which ties `∫u` to the quadratic terms.
pub fn predicted_gap(outer: &BoundaryProfile, geom: &ShellGeometry) -> Result<f64> {
    let ctx = SteklovRadialContext::new(geom.n, geom.r1, geom.r2)?;
    let (a, b) = quadratic_weights(&ctx);
    let shape = outer.without_mean();
    Ok(a * shape.l2_norm_sq() + b * shape.grad_l2_norm_sq())
}

/// Weights `(a, b)` of `‖ũ‖²` and `‖∇_τũ‖²` in [`predicted_gap`].
pub fn quadratic_weights(ctx: &SteklovRadialContext) -> (f64, f64) {
    let n = ctx.n as f64;
    let r = ctx.r2;
    let a = r.powf(n - 2.0) * (n * ctx.a1 + r * ctx.a2) / 2.0;
    let b = r.powf(n - 3.0) * (ctx.a0 / 2.0 - r * ctx.a1 / (2.0 * (n - 1.0)));
    (a, b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domains::{project_constraints, HoledDomain};
    use crate::steklov_radial::sigma1_shell;

    fn geom() -> ShellGeometry {
        ShellGeometry::new(2, -1.0, 1.0, 2.0).unwrap()
    }

    #[test]
    fn radial_case_is_exact() {
        for g in [geom(), ShellGeometry::new(3, -1.0, 0.5, 1.5).unwrap()] {
            let q = evaluate_quotient(&BoundaryProfile::zero(g.n, g.r2), &g).unwrap();
            let s = sigma1_shell(g.n, g.r1, g.r2).unwrap();
            assert!((q.ratio - s).abs() < 1e-13 * s);
            let scale = q.n_val * q.d_val / (g.outer_perimeter() / g.r2.powi(g.n as i32 - 1));
            assert!(q.gap.abs() < 1e-13 * scale, "{} {scale}", q.gap);
        }
    }

    #[test]
    fn projected_mode_has_positive_gap_matching_prediction() {
        let g = geom();
        let mut ratios = vec![];
        for eps in [0.01, 0.005] {
            let d = HoledDomain::new(g, BoundaryProfile::cosine_mode(2.0, 2, eps), BoundaryProfile::zero(2, 1.0))
                .unwrap();
            let u = project_constraints(&d).unwrap().u;
            let q = evaluate_quotient(&u, &g).unwrap();
            assert!(q.gap > 0.0);
            let pred = predicted_gap(&u, &g).unwrap();
            ratios.push(q.gap / pred);
        }
        let extrap = (4.0 * ratios[1] - ratios[0]) / 3.0;
        assert!((extrap - 1.0).abs() < 1e-5, "{ratios:?}");
    }

    #[test]
    fn rejects_profile_below_inner_radius() {
        let g = ShellGeometry::new(2, -1.0, 1.9, 2.0).unwrap();
        let u = BoundaryProfile::cosine_mode(2.0, 2, 0.2);
        assert!(evaluate_quotient(&u, &g).is_err());
    }
}
