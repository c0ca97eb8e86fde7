//! P1 finite elements for the Robin-Neumann problem
//! `-Δψ = λψ` in `Ω`, `∂_νψ + βψ = 0` on `∂Ω₀`, `∂_νψ = 0` on `∂Θ`,
//! and for the Steklov-Neumann problem `-Δφ + φ = 0`, `∂_νφ = σφ` on `∂Ω₀`,
//! on planar holed domains.

mod assembly;
mod eigen;
mod mesh;

pub use assembly::{boundary_mass, stiffness_and_mass, CsrMatrix};
pub use eigen::{smallest_eigenpair, symmetric_eigen, EigenSolution, BLOCK};
pub use mesh::{grid_for, mesh_holed_domain, mesh_with_grid, Mesh2D, OGrid};

use crate::domains::HoledDomain;
use crate::error::{Error, Result};
use crate::shell::{shell_eigenvalue, ShellGeometry};
use serde::{Deserialize, Serialize};

/// Residual target of the eigensolver.
pub const RESIDUAL_TOL: f64 = 1e-10;
pub const MAX_ITERATIONS: usize = 500;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DiscreteEigenResult {
    pub eigenvalue: f64,
    /// Nodal values, normalized in the mass form of the pencil and positive.
    pub eigenvector: Vec<f64>,
    /// `‖Ax - λBx‖ / ‖Bx‖`
    pub residual: f64,
    pub h_max: f64,
    pub iterations: usize,
    /// `(h_max, λ_h)` of the levels solved so far, coarsest first.
    pub refinement_history: Vec<(f64, f64)>,
}

/// Which pencil to solve.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Problem {
    /// `(K + βB_out, M)`
    RobinNeumann { beta: f64 },
    /// `(K + M, B_out)`
    SteklovNeumann,
}

/// Optional solver inputs: an initial shift and start vectors.
#[derive(Debug, Clone, Default)]
pub struct SolveHints {
    pub shift: Option<f64>,
    pub start: Vec<Vec<f64>>,
}

fn pencil(mesh: &Mesh2D, problem: Problem) -> (CsrMatrix, CsrMatrix) {
    let (k, m) = stiffness_and_mass(mesh);
    let b = boundary_mass(mesh, &mesh.outer_boundary_edges);
    match problem {
        Problem::RobinNeumann { beta } => (k.combine(1.0, &b, beta), m),
        Problem::SteklovNeumann => (k.combine(1.0, &m, 1.0), b),
    }
}

/// Smallest eigenvalue of the chosen pencil on `mesh`.
pub fn solve(mesh: &Mesh2D, problem: Problem, hints: &SolveHints) -> Result<DiscreteEigenResult> {
    mesh.validate()?;
    if let Problem::RobinNeumann { beta } = problem {
        if !(beta < 0.0) {
            return Err(Error::InvalidParameter(format!("beta must be negative, got {beta}")));
        }
    }
    let (a, b) = pencil(mesh, problem);
    let shift = hints.shift.unwrap_or_else(|| match problem {
        Problem::RobinNeumann { beta } => {
            // R(1) = βP/|Ω| is an upper bound for λ₁
            let rho = beta * mesh.outer_length() / mesh.total_area();
            rho - rho.abs() - 1.0
        }
        Problem::SteklovNeumann => 0.0,
    });
    let mut start = hints.start.clone();
    if start.len() < BLOCK {
        start.push(vec![1.0; mesh.num_vertices()]);
        start.push(mesh.vertices.iter().map(|v| v[0]).collect());
        start.push(mesh.vertices.iter().map(|v| v[1]).collect());
    }
    let s = smallest_eigenpair(&a, &b, shift, &start, RESIDUAL_TOL, MAX_ITERATIONS)?;
    Ok(DiscreteEigenResult {
        eigenvalue: s.value,
        eigenvector: s.vector,
        residual: s.residual,
        h_max: mesh.h_max,
        iterations: s.iterations,
        refinement_history: vec![(mesh.h_max, s.value)],
    })
}

/// `λ₁` of `(K + βB_out, M)`; requires `β < 0`.
pub fn robin_neumann_eigenvalue(mesh: &Mesh2D, beta: f64) -> Result<DiscreteEigenResult> {
    solve(mesh, Problem::RobinNeumann { beta }, &SolveHints::default())
}

/// `σ₁` of `(K + M, B_out)`.
pub fn steklov_neumann_eigenvalue(mesh: &Mesh2D) -> Result<DiscreteEigenResult> {
    solve(mesh, Problem::SteklovNeumann, &SolveHints::default())
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Extrapolation {
    /// Richardson value from the two finest levels.
    pub value: f64,
    /// `|E_L - E_{L-1}|` between the last two extrapolants.
    pub error_estimate: f64,
    /// `log₂` of the ratio of the last two level differences.
    pub observed_order: f64,
    /// Level differences shrink and keep their sign.
    pub monotone: bool,
    pub extrapolants: Vec<f64>,
    /// Finest-level solution, carrying the full history.
    pub finest: DiscreteEigenResult,
}

/// Solves on the O-grid meshes with `h_max ≤ h_target`, `h/2`, `h/4`, ...
/// and Richardson-extrapolates assuming `O(h²)`. Coarse eigenvectors seed
/// the finer solves and fix their shifts.
pub fn refine_and_extrapolate_problem(
    domain: &HoledDomain,
    problem: Problem,
    h_target: f64,
    levels: usize,
) -> Result<Extrapolation> {
    if levels < 3 {
        return Err(Error::InvalidParameter(format!("at least 3 levels are needed, got {levels}")));
    }
    domain.validate()?;
    let mut grid = grid_for(domain, h_target)?;
    let mut values: Vec<f64> = Vec::with_capacity(levels);
    let mut history = Vec::with_capacity(levels);
    let mut prev: Option<(OGrid, Vec<f64>)> = None;
    let mut last = None;
    for level in 0..levels {
        let mesh = mesh_with_grid(domain, grid)?;
        let mut hints = SolveHints::default();
        if let Some((g, vec)) = &prev {
            hints.start.push(
                (0..mesh.num_vertices())
                    .map(|i| {
                        let (th, xi) = grid.params(i);
                        g.interpolate(vec, th, xi)
                    })
                    .collect(),
            );
        }
        let lam_prev = values.last().copied();
        hints.shift = match (problem, lam_prev) {
            (_, Some(lp)) => {
                let delta = if level >= 2 { (values[level - 1] - values[level - 2]).abs() } else { 0.1 * (1.0 + lp.abs()) };
                Some(lp - 2.0 * delta - 0.05 * (1.0 + lp.abs()))
            }
            (Problem::RobinNeumann { beta }, None) => {
                let g = &domain.geom;
                let la = shell_eigenvalue(&ShellGeometry::new(g.n, beta, g.r1, g.r2)?)?;
                Some(la - la.abs() - 1.0)
            }
            (Problem::SteklovNeumann, None) => Some(0.0),
        };
        let r = solve(&mesh, problem, &hints)?;
        values.push(r.eigenvalue);
        history.push((r.h_max, r.eigenvalue));
        prev = Some((grid, r.eigenvector.clone()));
        last = Some(r);
        grid = grid.refined();
    }
    let extrapolants: Vec<f64> = values.windows(2).map(|w| (4.0 * w[1] - w[0]) / 3.0).collect();
    let l = extrapolants.len();
    let value = extrapolants[l - 1];
    let error_estimate = (extrapolants[l - 1] - extrapolants[l - 2]).abs();
    let diffs: Vec<f64> = values.windows(2).map(|w| w[1] - w[0]).collect();
    let d = diffs.len();
    let observed_order = (diffs[d - 2] / diffs[d - 1]).abs().log2();
    let monotone = diffs.windows(2).all(|w| w[0] * w[1] > 0.0 && w[1].abs() < w[0].abs());
    let mut finest = last.expect("levels >= 3");
    finest.refinement_history = history;
    Ok(Extrapolation { value, error_estimate, observed_order, monotone, extrapolants, finest })
}

/// Extrapolated `λ₁(β, Ω)`.
pub fn refine_and_extrapolate(domain: &HoledDomain, beta: f64, h_target: f64, levels: usize) -> Result<Extrapolation> {
    refine_and_extrapolate_problem(domain, Problem::RobinNeumann { beta }, h_target, levels)
}

/// Extrapolated `σ₁(Ω)`.
pub fn refine_and_extrapolate_steklov(domain: &HoledDomain, h_target: f64, levels: usize) -> Result<Extrapolation> {
    refine_and_extrapolate_problem(domain, Problem::SteklovNeumann, h_target, levels)
}
