//! Acceptance suite. Runs every primary criterion at full size and prints one
//! PASS/FAIL line each; the process exits non-zero if any criterion fails.
//!
//! `ACCEPTANCE_ONLY=bessel,web` restricts the run to the named criteria.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rnshell::asymmetry::{hybrid_asymmetry, AsymmetryBranch, WebFunction, ZERO_ASYMMETRY};
use rnshell::domains::HoledDomain;
use rnshell::fem::refine_and_extrapolate;
use rnshell::harness::{
    cmd_asymmetry, cmd_lemma_checks, cmd_stability_sweep, cmd_steklov_gap, cmd_verify_isoperimetric, Assertion,
    ExperimentConfig,
};
use rnshell::shell::{shell_eigenfunction, shell_eigenvalue};
use rnshell::specfun::{bessel_i, bessel_j, bessel_k, bessel_y};
use rnshell::steklov_radial::sign_certificates;
use rnshell::{BesselOrder, ShellGeometry};
use std::f64::consts::PI;
use std::path::PathBuf;
use std::time::{Duration, Instant};

type Outcome = Result<(bool, String), String>;
type Criterion = (&'static str, fn() -> Outcome);

fn config(name: &str) -> ExperimentConfig {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../configs").join(name);
    let mut cfg = ExperimentConfig::from_file(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
    cfg.workers = std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1);
    cfg
}

fn summarize(assertions: &[Assertion]) -> (bool, String) {
    let ok = !assertions.is_empty() && assertions.iter().all(|a| a.passed);
    let text = assertions
        .iter()
        .map(|a| format!("{}={} ({})", a.name, if a.passed { "ok" } else { "FAILED" }, a.detail))
        .collect::<Vec<_>>()
        .join("; ");
    (ok, text)
}

fn within(elapsed: Duration, limit: Duration) -> (bool, String) {
    (elapsed <= limit, format!("{:.1}s of {:.0}s", elapsed.as_secs_f64(), limit.as_secs_f64()))
}

/// Bessel function of any order the identities reach, with integer
/// reflection for `ν = -1` and the closed forms for `ν = -1/2`.
fn eval(kind: char, nu: f64, x: f64) -> f64 {
    if nu == -1.0 {
        return match kind {
            'J' => -eval('J', 1.0, x),
            'Y' => -eval('Y', 1.0, x),
            'I' | 'K' => eval(kind, 1.0, x),
            _ => unreachable!(),
        };
    }
    if nu == -0.5 {
        let c = (2.0 / (PI * x)).sqrt();
        return match kind {
            'J' => c * x.cos(),
            'Y' => c * x.sin(),
            'I' => c * x.cosh(),
            'K' => eval('K', 0.5, x),
            _ => unreachable!(),
        };
    }
    let o = BesselOrder::new(nu).unwrap();
    match kind {
        'J' => bessel_j(o, x),
        'Y' => bessel_y(o, x),
        'I' => bessel_i(o, x),
        'K' => bessel_k(o, x),
        _ => unreachable!(),
    }
    .unwrap()
}

/// Five-point central difference. The two-point rule has a truncation error
/// of about `(h/x)²` relative, which is above 1e-8 near `x = 0.05`.
fn central_difference<F: Fn(f64) -> f64>(g: F, x: f64, h: f64) -> f64 {
    (8.0 * (g(x + h) - g(x - h)) - (g(x + 2.0 * h) - g(x - 2.0 * h))) / (12.0 * h)
}

fn bessel_suite() -> Outcome {
    const ALGEBRAIC: f64 = 1e-11;
    const FINITE_DIFF: f64 = 1e-8;
    const STEP: f64 = 1e-5;
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let orders = [0.0, 0.5, 1.0, 1.5];
    let (mut worst_alg, mut worst_fd) = (0.0f64, 0.0f64);
    let mut failures = 0;
    for _ in 0..500 {
        let nu = orders[rng.random_range(0..orders.len())];
        let x = (0.05f64.ln() + (30.0f64 / 0.05).ln() * rng.random::<f64>()).exp();
        let mut errs_alg = Vec::new();
        let mut errs_fd = Vec::new();
        // recurrences in the three-term form, relative to the largest term
        for (kind, sign) in [('I', 1.0), ('K', -1.0)] {
            let (lo, mid, hi) = (eval(kind, nu - 1.0, x), eval(kind, nu, x), eval(kind, nu + 1.0, x));
            let t = sign * 2.0 * nu / x * mid;
            errs_alg.push((lo - t - hi).abs() / lo.abs().max(t.abs()).max(hi.abs()));
        }
        // derivation rules (x^{-ν} C_ν)' = ∓ x^{-ν} C_{ν+1}
        for (kind, sign) in [('J', -1.0), ('Y', -1.0), ('I', 1.0), ('K', -1.0)] {
            let fd = central_difference(|s| s.powf(-nu) * eval(kind, nu, s), x, STEP);
            let exact = sign * x.powf(-nu) * eval(kind, nu + 1.0, x);
            errs_fd.push((fd - exact).abs() / exact.abs().max(1.0));
        }
        // derivatives of I and K through the neighbouring orders
        for (kind, sign) in [('I', 1.0), ('K', -1.0)] {
            let fd = central_difference(|s| eval(kind, nu, s), x, STEP);
            let exact = sign * 0.5 * (eval(kind, nu - 1.0, x) + eval(kind, nu + 1.0, x));
            errs_fd.push((fd - exact).abs() / exact.abs().max(1.0));
        }
        let a = errs_alg.iter().cloned().fold(0.0, f64::max);
        let f = errs_fd.iter().cloned().fold(0.0, f64::max);
        if a > ALGEBRAIC || f > FINITE_DIFF {
            failures += 1;
        }
        worst_alg = worst_alg.max(a);
        worst_fd = worst_fd.max(f);
    }
    let (fast, time) = within(start.elapsed(), Duration::from_secs(5));
    Ok((
        failures == 0 && fast,
        format!("500 pairs, {failures} failing; worst recurrence {worst_alg:.1e}, worst derivative {worst_fd:.1e}; {time}"),
    ))
}

fn shell_vs_fem() -> Outcome {
    let start = Instant::now();
    let mut ok = true;
    let mut parts = Vec::new();
    for beta in [-0.25, -1.0, -4.0] {
        let g = ShellGeometry::new(2, beta, 1.0, 2.0).map_err(|e| e.to_string())?;
        let exact = shell_eigenvalue(&g).map_err(|e| e.to_string())?;
        let ext = refine_and_extrapolate(&HoledDomain::annulus(g), beta, 0.02, 3).map_err(|e| e.to_string())?;
        let rel = ((ext.value - exact) / exact).abs();
        let good = rel <= 1e-4 && (ext.observed_order - 2.0).abs() <= 0.2;
        ok &= good;
        parts.push(format!("β={beta}: rel {rel:.1e}, order {:.3}", ext.observed_order));
    }
    let (fast, time) = within(start.elapsed(), Duration::from_secs(120));
    Ok((ok && fast, format!("{}; {time}", parts.join(", "))))
}

fn steklov_certificates() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(35);
    let mut bad = Vec::new();
    let mut thick = 0;
    for i in 0..50 {
        let n = if i % 2 == 0 { 2 } else { 3 };
        let r1 = rng.random_range(0.1..3.0);
        let r2 = r1 * rng.random_range(1.05..4.0);
        let c = sign_certificates(n, r1, r2).map_err(|e| e.to_string())?;
        if !c.all() {
            // beyond these radii the combination is negative for some R₂
            if r1 > if n == 2 { 1.083 } else { 2f64.sqrt() } {
                thick += 1;
            }
            bad.push(format!("(n={n}, R₁={r1:.3}, R₂={r2:.3}): {c:?}"));
        }
    }
    let (fast, time) = within(start.elapsed(), Duration::from_secs(10));
    Ok((bad.is_empty() && fast, format!("50 configurations, {} failing ({thick} with R₁ above 1.083 for n=2 or √2 for n=3) {bad:?}; {time}", bad.len())))
}

fn web_identity() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    let (mut worst_g, mut worst_rq) = (0.0f64, 0.0f64);
    for i in 0..10 {
        let n = if i < 7 { 2 } else { 3 };
        let beta = -rng.random_range(0.25..4.0);
        let r1 = rng.random_range(0.5..1.5);
        let r2 = r1 + rng.random_range(0.3..2.0);
        let g = ShellGeometry::new(n, beta, r1, r2).map_err(|e| e.to_string())?;
        let web = WebFunction::new(&g).map_err(|e| e.to_string())?;
        let c = web.thickness();
        for j in 0..100 {
            let s = c * (j as f64 + 0.5) / 100.0;
            let direct = web.g_by_inversion(s).map_err(|e| e.to_string())?;
            worst_g = worst_g.max((direct - web.eig.psi(r2 - s)).abs());
        }
        let eig = shell_eigenfunction(&g).map_err(|e| e.to_string())?;
        worst_rq = worst_rq.max(((eig.rayleigh_quotient() - eig.lambda1) / eig.lambda1).abs());
    }
    Ok((
        worst_g <= 1e-8 && worst_rq <= 1e-8,
        format!("10 configurations × 100 levels: worst |G - Ψ(R₂-s)| {worst_g:.1e}; worst R_A(z) rel. error {worst_rq:.1e}"),
    ))
}

fn isoperimetric_sweep() -> Outcome {
    let start = Instant::now();
    let r = cmd_verify_isoperimetric(&config("verify_isoperimetric.toml")).map_err(|e| e.to_string())?;
    let (ok, text) = summarize(&r.assertions);
    let (fast, time) = within(start.elapsed(), Duration::from_secs(30 * 60));
    let complete = r.records.len() == 100 && r.failures.is_empty();
    Ok((ok && fast && complete, format!("{} domains, {} solver failures; {text}; {time}", r.records.len(), r.failures.len())))
}

fn inner_stability() -> Outcome {
    let r = cmd_stability_sweep(&config("stability_inner.toml")).map_err(|e| e.to_string())?;
    let (ok, text) = summarize(&r.assertions);
    let complete = r.records.len() == 50 && r.failures.is_empty();
    Ok((ok && complete, format!("{} domains, {} solver failures; {text}", r.records.len(), r.failures.len())))
}

fn steklov_gap() -> Outcome {
    let r = cmd_steklov_gap(&config("steklov_gap.toml")).map_err(|e| e.to_string())?;
    let (ok, text) = summarize(&r.assertions);
    let fem = r.records.iter().filter(|x| x.sigma_fem.is_some()).count();
    Ok((ok && fem == 10 && r.failures.is_empty(), format!("{fem} FEM domains; {text}")))
}

fn hybrid_asymmetry_cases() -> Outcome {
    let mut ok = true;
    let mut parts = Vec::new();
    for preset in ["shell", "translated_hole", "parallel_hole"] {
        let (report, assertions) = cmd_asymmetry(&config(&format!("asymmetry_{preset}.toml"))).map_err(|e| e.to_string())?;
        let (good, _) = summarize(&assertions);
        ok &= good;
        parts.push(format!("{preset}: {:?} α={:.3e}", report.branch, report.alpha));
    }
    let shell = hybrid_asymmetry(&HoledDomain::annulus(ShellGeometry::new(2, -1.0, 1.0, 2.0).unwrap()))
        .map_err(|e| e.to_string())?;
    let zero = shell.alpha <= ZERO_ASYMMETRY && shell.branch == AsymmetryBranch::Shell;
    Ok((ok && zero, format!("{}; α(A) = {}", parts.join(", "), shell.alpha)))
}

fn lemma_suite() -> Outcome {
    let r = cmd_lemma_checks(&config("lemma_checks.toml")).map_err(|e| e.to_string())?;
    let (ok, text) = summarize(&r.assertions);
    Ok((ok, text))
}

fn main() {
    let criteria: [Criterion; 9] = [
        ("bessel", bessel_suite),
        ("shell_vs_fem", shell_vs_fem),
        ("steklov_certificates", steklov_certificates),
        ("web", web_identity),
        ("isoperimetric_sweep", isoperimetric_sweep),
        ("inner_stability", inner_stability),
        ("steklov_gap", steklov_gap),
        ("hybrid_asymmetry", hybrid_asymmetry_cases),
        ("lemma_suite", lemma_suite),
    ];
    let only = std::env::var("ACCEPTANCE_ONLY").ok();
    let selected = |name: &str| only.as_deref().is_none_or(|o| o.split(',').any(|s| s.trim() == name));
    // cargo passes libtest flags such as --list; answer those without running
    if std::env::args().any(|a| a == "--list") {
        for (name, _) in criteria {
            println!("{name}: test");
        }
        return;
    }
    let mut failed = 0;
    for (name, run) in criteria.iter().filter(|(n, _)| selected(n)) {
        let start = Instant::now();
        let (ok, detail) = match run() {
            Ok(x) => x,
            Err(e) => (false, format!("error: {e}")),
        };
        if !ok {
            failed += 1;
        }
        println!("{} {name} [{:.1}s] {detail}", if ok { "PASS" } else { "FAIL" }, start.elapsed().as_secs_f64());
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}
