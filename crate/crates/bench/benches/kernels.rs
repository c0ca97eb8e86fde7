use criterion::{criterion_group, criterion_main, Criterion};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rnshell::asymmetry::{hybrid_asymmetry_with, WebFunction};
use rnshell::domains::{project_constraints, random_planar_profile, HoledDomain};
use rnshell::fem::{mesh_holed_domain, robin_neumann_eigenvalue, stiffness_and_mass};
use rnshell::shell::shell_eigenvalue;
use rnshell::specfun::{bessel_i, bessel_k};
use rnshell::steklov_quotient::evaluate_quotient;
use rnshell::{BesselOrder, ShellGeometry};
use std::hint::black_box;

fn geom() -> ShellGeometry {
    ShellGeometry::new(2, -1.0, 1.0, 2.0).unwrap()
}

fn perturbed() -> HoledDomain {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let u = random_planar_profile(&mut rng, 2.0, 2, 8, 0.05);
    let v = random_planar_profile(&mut rng, 1.0, 2, 8, 0.05);
    project_constraints(&HoledDomain::new(geom(), u, v).unwrap()).unwrap()
}

fn special_functions(c: &mut Criterion) {
    c.bench_function("bessel_i_k/orders_0_to_3half", |b| {
        b.iter(|| {
            let mut s = 0.0;
            for nu in [0.0, 0.5, 1.0, 1.5] {
                let o = BesselOrder::new(nu).unwrap();
                for x in [0.1, 1.0, 5.0, 25.0] {
                    s += bessel_i(o, black_box(x)).unwrap() + bessel_k(o, black_box(x)).unwrap();
                }
            }
            s
        })
    });
    c.bench_function("shell_eigenvalue", |b| b.iter(|| shell_eigenvalue(black_box(&geom())).unwrap()));
}

fn domains_and_asymmetry(c: &mut Criterion) {
    let d = perturbed();
    let web = WebFunction::new(&geom()).unwrap();
    c.bench_function("steklov_quotient", |b| b.iter(|| evaluate_quotient(black_box(&d.u), &d.geom).unwrap()));
    let mut g = c.benchmark_group("asymmetry");
    g.sample_size(10);
    g.bench_function("hybrid", |b| b.iter(|| hybrid_asymmetry_with(black_box(&d), &web).unwrap()));
    g.finish();
}

fn fem(c: &mut Criterion) {
    let d = perturbed();
    let mesh = mesh_holed_domain(&d, 0.04).unwrap();
    let mut g = c.benchmark_group("fem_h0.04");
    g.sample_size(10);
    g.bench_function("mesh", |b| b.iter(|| mesh_holed_domain(black_box(&d), 0.04).unwrap()));
    g.bench_function("assemble", |b| b.iter(|| stiffness_and_mass(black_box(&mesh))));
    g.bench_function("eigensolve", |b| b.iter(|| robin_neumann_eigenvalue(black_box(&mesh), -1.0).unwrap()));
    g.finish();
}

criterion_group!(benches, special_functions, domains_and_asymmetry, fem);
criterion_main!(benches);
