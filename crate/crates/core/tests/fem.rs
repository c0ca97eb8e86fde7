use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rnshell::domains::{perimeter, project_constraints, random_planar_profile, BoundaryProfile, HoledDomain};
use rnshell::fem::{
    boundary_mass, grid_for, mesh_holed_domain, mesh_with_grid, refine_and_extrapolate, refine_and_extrapolate_steklov,
    robin_neumann_eigenvalue, steklov_neumann_eigenvalue, stiffness_and_mass, DiscreteEigenResult, Mesh2D, OGrid,
};
use rnshell::shell::shell_eigenvalue;
use rnshell::steklov_quotient::evaluate_quotient;
use rnshell::steklov_radial::sigma1_shell;
use rnshell::ShellGeometry;

fn annulus(beta: f64) -> HoledDomain {
    HoledDomain::annulus(ShellGeometry::new(2, beta, 1.0, 2.0).unwrap())
}

fn perturbed(seed: u64) -> HoledDomain {
    let g = ShellGeometry::new(2, -1.0, 1.0, 2.0).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let u = random_planar_profile(&mut rng, 2.0, 2, 6, 0.05);
    let v = random_planar_profile(&mut rng, 1.0, 1, 6, 0.05);
    project_constraints(&HoledDomain::new(g, u, v).unwrap()).unwrap()
}

#[test]
fn annulus_extrapolation_matches_the_shell() {
    let d = annulus(-1.0);
    let exact = shell_eigenvalue(&d.geom).unwrap();
    let e = refine_and_extrapolate(&d, -1.0, 0.02, 3).unwrap();
    let err = (e.value - exact).abs();
    assert!(err < 1e-4 * exact.abs(), "{} {exact}", e.value);
    assert!(err <= e.error_estimate, "{err} {}", e.error_estimate);
    assert!((1.8..=2.2).contains(&e.observed_order), "{}", e.observed_order);
    assert!(e.monotone);
    assert!(e.finest.residual <= 1e-9);
}

#[test]
fn small_beta_gives_small_negative_eigenvalue() {
    let d = annulus(-1.0);
    let m = mesh_holed_domain(&d, 0.1).unwrap();
    let mut prev = f64::NEG_INFINITY;
    for beta in [-1e-1, -1e-2, -1e-3, -1e-4] {
        let r = robin_neumann_eigenvalue(&m, beta).unwrap();
        assert!(r.eigenvalue < 0.0);
        // R(1) = βP/|Ω| bounds λ₁ from above and is sharp to O(β²)
        let rho = beta * m.outer_length() / m.total_area();
        assert!(r.eigenvalue <= rho + 1e-12);
        assert!((r.eigenvalue - rho).abs() < 2.0 * beta * beta, "{beta} {} {rho}", r.eigenvalue);
        assert!(r.eigenvalue > prev);
        prev = r.eigenvalue;
    }
}

#[test]
fn eigenvalue_is_the_rayleigh_quotient_of_its_vector() {
    let d = perturbed(1);
    let m = mesh_holed_domain(&d, 0.05).unwrap();
    let (k, mm) = stiffness_and_mass(&m);
    let b = boundary_mass(&m, &m.outer_boundary_edges);
    let r = robin_neumann_eigenvalue(&m, -1.0).unwrap();
    let x = &r.eigenvector;
    let rq = (k.form(x, x) - b.form(x, x)) / mm.form(x, x);
    assert!((rq - r.eigenvalue).abs() < 1e-10 * r.eigenvalue.abs());
    assert!(r.residual <= 1e-9);
    assert!(x.iter().all(|&v| v > -1e-8));
    let s = steklov_neumann_eigenvalue(&m).unwrap();
    let x = &s.eigenvector;
    let q = (k.form(x, x) + mm.form(x, x)) / b.form(x, x);
    assert!((q - s.eigenvalue).abs() < 1e-10 * s.eigenvalue);
    assert!(x.iter().all(|&v| v > -1e-8));
}

#[test]
fn eigenvalue_is_nondecreasing_in_beta() {
    let m = mesh_holed_domain(&perturbed(2), 0.08).unwrap();
    let lams: Vec<f64> =
        [-4.0, -2.0, -1.0, -0.5, -0.25].iter().map(|&b| robin_neumann_eigenvalue(&m, b).unwrap().eigenvalue).collect();
    assert!(lams.windows(2).all(|w| w[0] <= w[1]), "{lams:?}");
}

#[test]
fn annulus_eigenvector_increases_along_rays() {
    let d = annulus(-1.0);
    let m = mesh_holed_domain(&d, 0.05).unwrap();
    let r = robin_neumann_eigenvalue(&m, -1.0).unwrap();
    let g = m.grid.unwrap();
    let h = m.h_max;
    let top = r.eigenvector.iter().cloned().fold(0.0, f64::max);
    for j in (0..g.n_theta).step_by(7) {
        for i in (0..g.n_r - 1).step_by(2) {
            let (a, b) = (r.eigenvector[i * g.n_theta + j], r.eigenvector[(i + 2) * g.n_theta + j]);
            assert!(b >= a - h * top, "ray {j} ring {i}");
        }
    }
    assert!(r.eigenvector.iter().all(|&v| v > 0.0));
}

#[test]
fn unrelated_meshes_agree_within_the_refinement_band() {
    let d = perturbed(4);
    let g1 = grid_for(&d, 0.05).unwrap();
    let g2 = OGrid { n_theta: g1.n_theta * 5 / 4, n_r: g1.n_r * 6 / 5 };
    let band = |g: OGrid| {
        let a = robin_neumann_eigenvalue(&mesh_with_grid(&d, g).unwrap(), -1.0).unwrap().eigenvalue;
        let b = robin_neumann_eigenvalue(&mesh_with_grid(&d, g.refined()).unwrap(), -1.0).unwrap().eigenvalue;
        // estimated discretization error of the coarse value
        (a, 4.0 / 3.0 * (a - b).abs())
    };
    let (l1, e1) = band(g1);
    let (l2, e2) = band(g2);
    assert!((l1 - l2).abs() <= e1 + e2, "{l1} {l2} {e1} {e2}");
}

#[test]
fn perturbed_domain_stays_below_the_shell() {
    let d = perturbed(6);
    let la = shell_eigenvalue(&d.geom).unwrap();
    let e = refine_and_extrapolate(&d, -1.0, 0.04, 3).unwrap();
    assert!(e.value <= la + e.error_estimate, "{} {la}", e.value);
    assert!(e.value < la);
    // Cauchy-like: shrinking level differences
    assert!(e.monotone, "{:?}", e.finest.refinement_history);
}

#[test]
fn steklov_annulus_matches_the_radial_value() {
    let d = annulus(-1.0);
    let exact = sigma1_shell(2, 1.0, 2.0).unwrap();
    let e = refine_and_extrapolate_steklov(&d, 0.04, 3).unwrap();
    assert!(e.finest.h_max <= 0.01 + 1e-12);
    assert!((e.value - exact).abs() < 1e-3 * exact, "{} {exact}", e.value);
    assert!(e.finest.eigenvalue > 0.0);
}

#[test]
fn steklov_eigenvalue_is_below_the_quotient() {
    // the quotient bounds σ₁ when the hole contains B_{R₁}
    let g = ShellGeometry::new(2, -1.0, 1.0, 2.0).unwrap();
    for (k, amp) in [(2, 0.03), (3, 0.02), (5, 0.01)] {
        let u = BoundaryProfile::cosine_mode(2.0, k, amp);
        let d = HoledDomain::new(g, u.clone(), BoundaryProfile::zero(2, 1.0)).unwrap();
        let q = evaluate_quotient(&u, &g).unwrap();
        let e = refine_and_extrapolate_steklov(&d, 0.05, 3).unwrap();
        assert!(e.value > 0.0);
        assert!(e.value <= q.ratio + e.error_estimate, "k={k}: {} {}", e.value, q.ratio);
    }
}

#[test]
fn boundary_lengths_converge_quadratically() {
    let d = perturbed(8);
    let errs: Vec<f64> = [0.08, 0.04, 0.02]
        .iter()
        .map(|&h| {
            let m = mesh_holed_domain(&d, h).unwrap();
            assert!(m.h_max <= h);
            (m.outer_length() - perimeter(&d.u)).abs() + (m.inner_length() - perimeter(&d.v)).abs()
        })
        .collect();
    for w in errs.windows(2) {
        let order = (w[0] / w[1]).log2();
        assert!(order > 1.7, "{errs:?}");
    }
}

#[test]
fn mesh_and_result_serialization_round_trip() {
    let m = mesh_holed_domain(&perturbed(9), 0.2).unwrap();
    let back = Mesh2D::from_text(&m.to_text()).unwrap();
    assert_eq!(back.triangles, m.triangles);
    assert_eq!(back.outer_boundary_edges, m.outer_boundary_edges);
    let r = robin_neumann_eigenvalue(&back, -1.0).unwrap();
    let json = serde_json::to_string(&r).unwrap();
    let r2: DiscreteEigenResult = serde_json::from_str(&json).unwrap();
    assert_eq!(r2.eigenvalue, r.eigenvalue);
    assert_eq!(r2.refinement_history, r.refinement_history);
}

#[test]
fn invalid_inputs_are_rejected() {
    let m = mesh_holed_domain(&annulus(-1.0), 0.2).unwrap();
    assert!(robin_neumann_eigenvalue(&m, 0.5).is_err());
    assert!(refine_and_extrapolate(&annulus(-1.0), -1.0, 0.1, 2).is_err());
    let mut bad = m.clone();
    bad.triangles[0].swap(1, 2);
    assert!(bad.validate().is_err());
}
