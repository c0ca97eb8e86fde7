use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{function}: argument {x} is outside the domain ({detail})")]
    Domain {
        function: &'static str,
        x: f64,
        detail: &'static str,
    },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("no sign change of the boundary residual found on [{lo:e}, {hi:e}]")]
    Bracketing { lo: f64, hi: f64 },

    #[error("profile is not admissible: {0}")]
    Inadmissible(String),

    #[error("body is not convex: curvature test fails near direction {direction:.6}")]
    NonConvex { direction: f64 },

    #[error("point ({x:.6}, {y:.6}) lies outside the outer body")]
    OutsideDomain { x: f64, y: f64 },

    #[error("inner parallel set is empty for t = {t} (inradius {inradius})")]
    EmptyParallelSet { t: f64, inradius: f64 },

    #[error("target volume {target} out of range (0, {max})")]
    VolumeOutOfRange { target: f64, max: f64 },

    #[error("constraint projection infeasible: {0}")]
    Infeasible(String),

    #[error("mesh generation failed: {0}")]
    Mesh(String),

    #[error("eigensolver did not converge after {iterations} iterations (residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },

    #[error("sparse factorization failed: {0}")]
    Factorization(String),

    #[error("configuration error at `{path}`: {message}")]
    Config { path: String, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
