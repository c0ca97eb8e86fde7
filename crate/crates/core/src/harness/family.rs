//! Seeded perturbation families with rejection against convexity and the
//! class constraints.

use super::config::{FamilyConfig, FamilyKind};
use crate::domains::{project_constraints, random_planar_profile, BoundaryProfile, HoledDomain};
use crate::error::{Error, Result};
use crate::shell::ShellGeometry;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

/// Modes used to represent translated holes.
const HOLE_MODES: usize = 48;
/// Draws per requested sample before giving up.
const MAX_ATTEMPTS_PER_SAMPLE: usize = 50;

#[derive(Debug, Clone)]
pub struct SampledDomain {
    pub id: usize,
    pub domain: HoledDomain,
    /// Amplitude of the draw (`ε` for single-mode families).
    pub amplitude: f64,
    pub mode: Option<usize>,
}

#[derive(Debug, Clone, Serialize)]
pub struct FamilyStats {
    pub accepted: usize,
    pub attempts: usize,
    pub acceptance_rate: f64,
}

/// Profile of `hole(θ) + p(θ)` for a translated disk and a perturbation `p`.
fn perturbed_translated_hole(geom: &ShellGeometry, center: [f64; 2], p: &BoundaryProfile) -> BoundaryProfile {
    let disk = BoundaryProfile::translated_disk(geom.r1, geom.r1, center, HOLE_MODES);
    BoundaryProfile::fit_radial_function(
        geom.r1,
        |t| geom.r1 + disk.eval_planar(t).0 + p.eval_planar(t).0,
        HOLE_MODES,
    )
}

fn accept(domain: &HoledDomain) -> bool {
    domain.validate().is_ok() && domain.class_membership().map(|c| c.member()).unwrap_or(false)
}

fn draw<R: Rng>(rng: &mut R, geom: &ShellGeometry, fam: &FamilyConfig) -> Result<HoledDomain> {
    let zero_outer = BoundaryProfile::zero(2, geom.r2);
    let zero_hole = BoundaryProfile::zero(2, geom.r1);
    let raw = match fam.kind {
        FamilyKind::Random => {
            let u = random_planar_profile(rng, geom.r2, fam.kmin, fam.kmax, fam.amplitude);
            let v = random_planar_profile(rng, geom.r1, fam.kmin, fam.kmax, fam.hole_amplitude);
            HoledDomain::new(*geom, u, v)?
        }
        FamilyKind::Inner => {
            let r = fam.max_translation * (geom.r2 - geom.r1) * rng.random::<f64>();
            let phi = std::f64::consts::TAU * rng.random::<f64>();
            let p = if fam.hole_amplitude > 0.0 {
                random_planar_profile(rng, geom.r1, fam.kmin, fam.kmax, fam.hole_amplitude)
            } else {
                zero_hole
            };
            let v = perturbed_translated_hole(geom, [r * phi.cos(), r * phi.sin()], &p);
            HoledDomain::new(*geom, zero_outer, v)?
        }
        FamilyKind::Outer => {
            let u = random_planar_profile(rng, geom.r2, fam.kmin, fam.kmax, fam.amplitude);
            HoledDomain::new(*geom, u, zero_hole)?
        }
        FamilyKind::SingleMode => unreachable!("single-mode families are not random"),
    };
    project_constraints(&raw)
}

/// Samples a family. Random kinds are drawn from one ChaCha8 stream seeded
/// by `fam.seed` and filtered by admissibility and class membership.
/// Single-mode families contain `u = ε cos kθ` shifted onto the perimeter
/// constraint, with the hole `B_{R₁}`.
pub fn sample_family(geom: &ShellGeometry, fam: &FamilyConfig) -> Result<(Vec<SampledDomain>, FamilyStats)> {
    if geom.n != 2 {
        return Err(Error::InvalidParameter("families are planar".into()));
    }
    let mut out = Vec::new();
    let mut attempts = 0;
    if fam.kind == FamilyKind::SingleMode {
        for &k in &fam.modes {
            for &eps in &fam.amplitudes {
                attempts += 1;
                let u = BoundaryProfile::cosine_mode(geom.r2, k, eps);
                let d = HoledDomain::new(*geom, u, BoundaryProfile::zero(2, geom.r1))?;
                let u = project_constraints(&d)?.u;
                let domain = HoledDomain::new(*geom, u, BoundaryProfile::zero(2, geom.r1))?;
                if domain.u.check_convex().is_ok() {
                    out.push(SampledDomain { id: out.len(), domain, amplitude: eps, mode: Some(k) });
                }
            }
        }
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(fam.seed);
        while out.len() < fam.samples {
            if attempts >= MAX_ATTEMPTS_PER_SAMPLE * fam.samples {
                return Err(Error::Infeasible(format!(
                    "only {} of {} domains accepted after {attempts} draws",
                    out.len(),
                    fam.samples
                )));
            }
            attempts += 1;
            let Ok(domain) = draw(&mut rng, geom, fam) else { continue };
            if accept(&domain) {
                out.push(SampledDomain { id: out.len(), domain, amplitude: fam.amplitude, mode: None });
            }
        }
    }
    let stats = FamilyStats {
        accepted: out.len(),
        attempts,
        acceptance_rate: if attempts > 0 { out.len() as f64 / attempts as f64 } else { 0.0 },
    };
    Ok((out, stats))
}
