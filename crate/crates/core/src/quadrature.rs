//! Gauss-Legendre rules and adaptive integration on intervals.

use std::sync::OnceLock;

/// Nodes and weights of the `m`-point Gauss-Legendre rule on `[-1, 1]`.
///
/// Nodes are returned in increasing order.
pub fn gauss_legendre(m: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(m >= 1, "Gauss-Legendre rule needs at least one node");
    let mut x = vec![0.0; m];
    let mut w = vec![0.0; m];
    let mf = m as f64;
    for i in 0..m.div_ceil(2) {
        // Tricomi's initial guess, then Newton on P_m.
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (mf + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(m, z);
            dp = d;
            let dz = p / d;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(m, z);
        if d != 0.0 {
            dp = d;
        }
        let wi = 2.0 / ((1.0 - z * z) * dp * dp);
        x[i] = -z;
        x[m - 1 - i] = z;
        w[i] = wi;
        w[m - 1 - i] = wi;
    }
    if m % 2 == 1 {
        x[m / 2] = 0.0;
    }
    (x, w)
}

fn legendre_with_derivative(m: usize, z: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = z;
    if m == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=m {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * z * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = m as f64 * (z * p1 - p0) / (z * z - 1.0);
    (p1, d)
}

struct Rule {
    x: Vec<f64>,
    w: Vec<f64>,
}

fn rule20() -> &'static Rule {
    static R: OnceLock<Rule> = OnceLock::new();
    R.get_or_init(|| {
        let (x, w) = gauss_legendre(20);
        Rule { x, w }
    })
}

/// Fixed `m`-point Gauss-Legendre approximation of `∫_a^b f`.
pub fn gauss_fixed<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, nodes: &(Vec<f64>, Vec<f64>)) -> f64 {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let mut s = 0.0;
    for (xi, wi) in nodes.0.iter().zip(&nodes.1) {
        s += wi * f(c + h * xi);
    }
    s * h
}

fn gl20<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64) -> f64 {
    let r = rule20();
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let mut s = 0.0;
    for (xi, wi) in r.x.iter().zip(&r.w) {
        s += wi * f(c + h * xi);
    }
    s * h
}

/// Adaptive Gauss-Legendre integration of `∫_a^b f` to absolute tolerance
/// `tol` (a relative floor of `1e-15·|I|` is applied).
///
/// A 20-point panel is split in half whenever the two halves disagree with
/// the whole by more than the local share of the tolerance.
pub fn integrate<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, tol: f64) -> f64 {
    if a == b {
        return 0.0;
    }
    let whole = gl20(&mut f, a, b);
    adapt(&mut f, a, b, whole, tol.max(1e-300), 0)
}

fn adapt<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64, whole: f64, tol: f64, depth: u32) -> f64 {
    let m = 0.5 * (a + b);
    let left = gl20(f, a, m);
    let right = gl20(f, m, b);
    let both = left + right;
    let err = (both - whole).abs();
    if err <= tol.max(1e-15 * both.abs()) || depth >= 40 || (b - a).abs() < 1e-14 * (a.abs() + b.abs()) {
        return both;
    }
    adapt(f, a, m, left, 0.5 * tol, depth + 1) + adapt(f, m, b, right, 0.5 * tol, depth + 1)
}

/// Composite rule: `panels` equal sub-intervals, each integrated adaptively.
///
/// Useful for periodic or oscillatory integrands where a single initial panel
/// could under-resolve the function and stop early.
pub fn integrate_panels<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, panels: usize, tol: f64) -> f64 {
    let panels = panels.max(1);
    let h = (b - a) / panels as f64;
    let mut s = 0.0;
    for i in 0..panels {
        let lo = a + h * i as f64;
        let hi = if i + 1 == panels { b } else { lo + h };
        s += integrate(&mut f, lo, hi, tol / panels as f64);
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rule_integrates_polynomials_exactly() {
        for m in [1usize, 2, 5, 10, 20, 33] {
            let r = gauss_legendre(m);
            for deg in 0..(2 * m) {
                let exact = if deg % 2 == 1 { 0.0 } else { 2.0 / (deg as f64 + 1.0) };
                let got = gauss_fixed(|x| x.powi(deg as i32), -1.0, 1.0, &r);
                assert!((got - exact).abs() < 1e-13, "m={m} deg={deg} got={got}");
            }
            let wsum: f64 = r.1.iter().sum();
            assert!((wsum - 2.0).abs() < 1e-13);
        }
    }

    #[test]
    fn adaptive_handles_endpoint_singularity() {
        let got = integrate(|x: f64| x.sqrt(), 0.0, 1.0, 1e-13);
        assert!((got - 2.0 / 3.0).abs() < 1e-12);
        let got = integrate(|x: f64| (-x).exp(), 0.0, 40.0, 1e-14);
        assert!((got - (1.0 - (-40.0f64).exp())).abs() < 1e-13);
    }

    #[test]
    fn panels_match_single_interval() {
        let f = |x: f64| (3.0 * x).sin().powi(2);
        let a = integrate_panels(f, 0.0, 2.0 * std::f64::consts::PI, 16, 1e-13);
        assert!((a - std::f64::consts::PI).abs() < 1e-12);
    }
}
