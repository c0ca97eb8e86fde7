//! Experiment orchestration: configuration, perturbation families, the
//! sweep commands and their CSV/JSON output.

mod commands;
mod config;
mod family;

pub use commands::{
    cmd_asymmetry, cmd_lemma_checks, cmd_shell_eig, cmd_stability_sweep, cmd_steklov_gap, cmd_verify_isoperimetric,
    domain_from_config, loglog_slope, Assertion, Failure, LemmaRecord, Report, ShellEigRow, SteklovRecord, SweepRecord,
};
pub use config::{
    DomainConfig, ExperimentConfig, FamilyConfig, FamilyKind, OutputConfig, SolverConfig, DEFAULT_TOLERANCES,
    SCHEMA_VERSION,
};
pub use family::{sample_family, FamilyStats, SampledDomain};
