use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rnshell::asymmetry::{
    hybrid_asymmetry, parallel_hole, weak_fraenkel_asymmetry, weak_fraenkel_monte_carlo, web_rayleigh_bounds,
    AsymmetryBranch, WebFunction,
};
use rnshell::domains::{project_constraints, random_planar_profile, BoundaryProfile, HoledDomain, OuterBody};
use rnshell::ShellGeometry;

fn geom() -> ShellGeometry {
    ShellGeometry::new(2, -1.0, 1.0, 2.0).unwrap()
}

fn rotated(p: &BoundaryProfile, phi: f64) -> BoundaryProfile {
    let rnshell::domains::Coefficients::Fourier { cos, sin } = &p.coeffs else { panic!() };
    let (mut c, mut s) = (cos.clone(), sin.clone());
    for k in 0..c.len() {
        let (sk, ck) = (k as f64 * phi).sin_cos();
        c[k] = cos[k] * ck - sin[k] * sk;
        s[k] = cos[k] * sk + sin[k] * ck;
    }
    BoundaryProfile::fourier(p.base_radius, c, s)
}

fn generic_pair(seed: u64) -> HoledDomain {
    let g = geom();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let u = random_planar_profile(&mut rng, 2.0, 2, 6, 0.04);
    let v = random_planar_profile(&mut rng, 1.0, 1, 6, 0.06);
    project_constraints(&HoledDomain::new(g, u, v).unwrap()).unwrap()
}

#[test]
fn web_function_on_the_ball_is_the_eigenfunction() {
    let g = geom();
    let web = WebFunction::new(&g).unwrap();
    let body = OuterBody::new(&BoundaryProfile::zero(2, 2.0)).unwrap();
    for r in [1.0, 1.2, 1.5, 1.9, 2.0] {
        let (w, gr) = web.evaluate(&body, &[r * 0.6, r * 0.8]).unwrap();
        assert!((w - web.eig.psi(r)).abs() < 1e-8);
        assert!((gr - web.eig.psi_prime(r)).abs() < 1e-8);
    }
    assert_eq!(web.evaluate(&body, &[0.3, 0.2]).unwrap(), (web.z_m(), 0.0));
    assert!(web.evaluate(&body, &[2.1, 0.0]).is_err());
}

#[test]
fn translated_hole_in_the_ball_has_positive_fraenkel_term() {
    let g = geom();
    let v = BoundaryProfile::translated_disk(1.0, 1.0, [0.1, 0.0], 48);
    let d = HoledDomain::new(g, BoundaryProfile::zero(2, 2.0), v).unwrap();
    let r = hybrid_asymmetry(&d).unwrap();
    assert!(r.weak_fraenkel > 1e-6, "{r:?}");
    assert!(r.g_of_asym < 1e-12);
    assert_eq!(r.branch, AsymmetryBranch::HoleFraenkel);
    assert_eq!(r.alpha, r.weak_fraenkel);
}

#[test]
fn parallel_hole_selects_the_outer_term() {
    let g = geom();
    let u = BoundaryProfile::cosine_mode(2.0, 3, 0.03);
    let u = project_constraints(&HoledDomain::new(g, u, BoundaryProfile::zero(2, 1.0)).unwrap()).unwrap().u;
    let v = parallel_hole(&u, &g, 64).unwrap();
    let d = HoledDomain::new(g, u, v).unwrap();
    let r = hybrid_asymmetry(&d).unwrap();
    assert!(r.g_of_asym > 1e-6, "{r:?}");
    assert!(r.weak_fraenkel < 1e-3 * r.g_of_asym, "{r:?}");
    assert_eq!(r.branch, AsymmetryBranch::OuterHausdorff);
}

#[test]
fn hole_deep_inside_the_parallel_set_gives_zero() {
    // |Θ| = π·0.81, so K = B_{1.1} and t = 0.9 + ... > R₂ - R₁
    let g = geom();
    let v = BoundaryProfile::translated_disk(1.0, 0.9, [0.05, 0.0], 48);
    let d = HoledDomain::new(g, BoundaryProfile::zero(2, 2.0), v).unwrap();
    let web = WebFunction::new(&g).unwrap();
    assert_eq!(weak_fraenkel_asymmetry(&d, &web).unwrap(), 0.0);
}

#[test]
fn ray_integration_matches_monte_carlo() {
    let d = generic_pair(7);
    let web = WebFunction::new(&d.geom).unwrap();
    let a = weak_fraenkel_asymmetry(&d, &web).unwrap();
    let mc = weak_fraenkel_monte_carlo(&d, &web, 1_000_000, 11).unwrap();
    assert!(a > 0.0);
    assert!((a - mc.mean).abs() < 3.0 * mc.std_error, "{a} {mc:?}");
    assert!(mc.std_error < 0.05 * a);
}

#[test]
fn rigid_rotation_leaves_the_asymmetry_unchanged() {
    let d = generic_pair(3);
    let web = WebFunction::new(&d.geom).unwrap();
    let a = weak_fraenkel_asymmetry(&d, &web).unwrap();
    let phi = 0.731;
    let r = HoledDomain::new(d.geom, rotated(&d.u, phi), rotated(&d.v, phi)).unwrap();
    let b = weak_fraenkel_asymmetry(&r, &web).unwrap();
    assert!((a - b).abs() < 1e-6 * a.max(1e-12), "{a} {b}");
}

#[test]
fn boundary_term_matches_the_ball() {
    let d = generic_pair(5);
    let web = WebFunction::new(&d.geom).unwrap();
    let q = web_rayleigh_bounds(&d, &web).unwrap();
    assert!((q.boundary - q.boundary_ball).abs() < 1e-10 * q.boundary_ball);
    // the web function does at least as well as the shell eigenfunction
    assert!(q.rq <= web.eig.lambda1 + 1e-8, "{} {}", q.rq, web.eig.lambda1);
}

#[test]
fn energy_density_dominates_the_l1_term() {
    let web = WebFunction::new(&geom()).unwrap();
    for (s, w, _) in web.tabulate(200) {
        assert!(web.energy_density(s) >= 2.0 * web.z_m() * (w - web.z_m()) - 1e-14);
    }
}
