//! Experiment configuration: a versioned TOML document with unknown keys
//! rejected and semantic checks reported with field paths.

use crate::error::{Error, Result};
use crate::shell::ShellGeometry;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

pub const SCHEMA_VERSION: u32 = 1;

/// Names and defaults of the tolerances used by report assertions.
pub const DEFAULT_TOLERANCES: &[(&str, f64)] = &[
    // absolute slack added to FEM error bars
    ("eigen_slack", 1e-8),
    // α below this is treated as the exact shell
    ("asymmetry_floor", 1e-10),
    // number of standard errors allowed for Monte-Carlo estimates
    ("mc_sigmas", 3.0),
    // perimeter and volume residuals after projection
    ("constraint", 1e-10),
    // slack on N/D gaps and on FEM σ₁ ≤ N/D
    ("steklov_slack", 1e-9),
    ("exponent_min", 1.9),
    ("exponent_max", 2.1),
    // allowed deviation of the expansion-residual slope from 1
    ("expansion_slope", 0.2),
    // relative slack on the Poincaré identity for pure harmonics
    ("poincare", 1e-10),
    // λ₁ may decrease by this much between consecutive β
    ("monotone_slack", 0.0),
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FamilyKind {
    /// Both boundaries perturbed by random band-limited profiles.
    Random,
    /// `Ω₀ = B_{R₂}` with a translated and perturbed hole.
    Inner,
    /// Perturbed outer boundary with the centred hole `B_{R₁}`.
    Outer,
    /// `u = ε cos kθ` on every mode and amplitude of the schedule.
    SingleMode,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FamilyConfig {
    pub kind: FamilyKind,
    #[serde(default = "default_samples")]
    pub samples: usize,
    #[serde(default)]
    pub seed: u64,
    /// `‖u‖_{W^{1,∞}}` of random outer profiles.
    #[serde(default = "default_amplitude")]
    pub amplitude: f64,
    /// `‖v‖_{W^{1,∞}}` of random hole profiles.
    #[serde(default = "default_amplitude")]
    pub hole_amplitude: f64,
    /// Largest hole translation as a fraction of `R₂ - R₁`.
    #[serde(default = "default_translation")]
    pub max_translation: f64,
    #[serde(default = "default_kmin")]
    pub kmin: usize,
    #[serde(default = "default_kmax")]
    pub kmax: usize,
    /// Modes of a single-mode family.
    #[serde(default = "default_modes")]
    pub modes: Vec<usize>,
    /// Amplitude schedule of single-mode families and of the lemma checks.
    #[serde(default = "default_amplitudes")]
    pub amplitudes: Vec<f64>,
    /// Monte-Carlo samples per domain for the error bar of `Ã`; `0` skips
    /// the estimate.
    #[serde(default)]
    pub mc_samples: usize,
    /// Number of domains cross-checked with the FEM Steklov solver.
    #[serde(default = "default_fem_subsample")]
    pub fem_subsample: usize,
}

fn default_samples() -> usize {
    10
}
fn default_amplitude() -> f64 {
    0.05
}
fn default_translation() -> f64 {
    0.1
}
fn default_kmin() -> usize {
    2
}
fn default_kmax() -> usize {
    8
}
fn default_modes() -> Vec<usize> {
    vec![2, 3, 4, 5, 6]
}
fn default_amplitudes() -> Vec<f64> {
    vec![0.04, 0.02, 0.01]
}
fn default_fem_subsample() -> usize {
    10
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverConfig {
    #[serde(default = "default_h")]
    pub h_target: f64,
    #[serde(default = "default_levels")]
    pub levels: usize,
}

fn default_h() -> f64 {
    0.02
}
fn default_levels() -> usize {
    3
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self { h_target: default_h(), levels: default_levels() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    pub dir: PathBuf,
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self { dir: PathBuf::from("out") }
    }
}

/// A single domain for the `asymmetry` command: either a preset or
/// explicit Fourier coefficients. The outer profile is projected onto the
/// perimeter constraint and the hole onto the volume constraint when
/// `project` is set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DomainConfig {
    /// `shell`, `translated_hole` or `parallel_hole`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub preset: Option<String>,
    #[serde(default)]
    pub outer_cos: Vec<f64>,
    #[serde(default)]
    pub outer_sin: Vec<f64>,
    #[serde(default)]
    pub hole_cos: Vec<f64>,
    #[serde(default)]
    pub hole_sin: Vec<f64>,
    /// Translation of the hole; the hole is then a disk of radius `R₁`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hole_center: Option<[f64; 2]>,
    #[serde(default = "default_true")]
    pub project: bool,
}

fn default_true() -> bool {
    true
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub schema_version: u32,
    /// Worker threads for sweeps.
    #[serde(default = "default_workers")]
    pub workers: usize,
    /// β grid of the `shell-eig` command.
    #[serde(default)]
    pub betas: Vec<f64>,
    pub geometry: ShellGeometry,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub family: Option<FamilyConfig>,
    #[serde(default)]
    pub solver: SolverConfig,
    #[serde(default)]
    pub tolerances: BTreeMap<String, f64>,
    #[serde(default)]
    pub output: OutputConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub domain: Option<DomainConfig>,
}

fn default_workers() -> usize {
    1
}

fn config_error(path: &str, message: impl Into<String>) -> Error {
    Error::Config { path: path.to_string(), message: message.into() }
}

impl ExperimentConfig {
    /// Configuration with defaults everywhere except the geometry.
    pub fn new(geometry: ShellGeometry) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            geometry,
            family: None,
            solver: SolverConfig::default(),
            tolerances: BTreeMap::new(),
            output: OutputConfig::default(),
            betas: Vec::new(),
            domain: None,
            workers: 1,
        }
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        let de = toml::Deserializer::parse(text).map_err(|e| config_error("", e.to_string()))?;
        let cfg: Self = serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            config_error(if path == "." { "" } else { &path }, e.into_inner().message().to_string())
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        Self::from_toml(&std::fs::read_to_string(path)?)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("configuration serializes")
    }

    pub fn validate(&self) -> Result<()> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(config_error(
                "schema_version",
                format!("unsupported version {} (expected {SCHEMA_VERSION})", self.schema_version),
            ));
        }
        let g = &self.geometry;
        g.validate().map_err(|e| config_error("geometry", e.to_string()))?;
        let s = &self.solver;
        if !(s.h_target > 0.0 && s.h_target < g.r2 - g.r1) {
            return Err(config_error("solver.h_target", format!("must lie in (0, R2 - R1), got {}", s.h_target)));
        }
        if s.levels < 3 {
            return Err(config_error("solver.levels", format!("at least 3 levels are needed, got {}", s.levels)));
        }
        for (name, value) in &self.tolerances {
            if !DEFAULT_TOLERANCES.iter().any(|(k, _)| k == name) {
                return Err(config_error(&format!("tolerances.{name}"), "unknown tolerance"));
            }
            if !(value.is_finite() && *value >= 0.0) {
                return Err(config_error(&format!("tolerances.{name}"), format!("must be nonnegative, got {value}")));
            }
        }
        if self.workers == 0 {
            return Err(config_error("workers", "must be at least 1"));
        }
        for (i, b) in self.betas.iter().enumerate() {
            if !(*b < 0.0 && b.is_finite()) {
                return Err(config_error(&format!("betas[{i}]"), format!("must be negative, got {b}")));
            }
        }
        if let Some(f) = &self.family {
            if f.samples == 0 {
                return Err(config_error("family.samples", "must be positive"));
            }
            // W^{1,∞} admissibility
            if !(f.amplitude > 0.0 && f.amplitude < g.r2 / 2.0) {
                return Err(config_error("family.amplitude", format!("must lie in (0, R2/2), got {}", f.amplitude)));
            }
            if !(f.hole_amplitude >= 0.0 && f.hole_amplitude <= g.r1 / 2.0) {
                return Err(config_error(
                    "family.hole_amplitude",
                    format!("must lie in [0, R1/2], got {}", f.hole_amplitude),
                ));
            }
            if !(0.0..1.0).contains(&f.max_translation) {
                return Err(config_error("family.max_translation", "must lie in [0, 1)"));
            }
            if f.kmin < 1 || f.kmax < f.kmin {
                return Err(config_error("family.kmax", format!("need 1 <= kmin <= kmax, got {}..{}", f.kmin, f.kmax)));
            }
            for (i, k) in f.modes.iter().enumerate() {
                if *k < 1 {
                    return Err(config_error(&format!("family.modes[{i}]"), "modes start at 1"));
                }
            }
            for (i, a) in f.amplitudes.iter().enumerate() {
                if !(*a > 0.0 && *a < g.r2 / 2.0) {
                    return Err(config_error(&format!("family.amplitudes[{i}]"), format!("must lie in (0, R2/2), got {a}")));
                }
            }
        }
        if let Some(d) = &self.domain {
            if let Some(p) = &d.preset {
                if !["shell", "translated_hole", "parallel_hole"].contains(&p.as_str()) {
                    return Err(config_error("domain.preset", format!("unknown preset `{p}`")));
                }
            }
        }
        Ok(())
    }

    /// Named tolerance, falling back to its default.
    pub fn tolerance(&self, name: &str) -> f64 {
        self.tolerances.get(name).copied().unwrap_or_else(|| {
            DEFAULT_TOLERANCES.iter().find(|(k, _)| *k == name).map(|(_, v)| *v).unwrap_or_else(|| {
                panic!("tolerance `{name}` has no default");
            })
        })
    }

    pub fn family(&self) -> Result<&FamilyConfig> {
        self.family.as_ref().ok_or_else(|| config_error("family", "this command needs a [family] section"))
    }

    /// SHA-256 of the canonical JSON form, in hex.
    pub fn hash(&self) -> String {
        let json = serde_json::to_vec(self).expect("configuration serializes");
        Sha256::digest(&json).iter().map(|b| format!("{b:02x}")).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"
schema_version = 1
[geometry]
n = 2
beta = -1.0
r1 = 1.0
r2 = 2.0
"#;

    #[test]
    fn minimal_config_uses_defaults() {
        let c = ExperimentConfig::from_toml(MINIMAL).unwrap();
        assert_eq!(c.solver, SolverConfig::default());
        assert_eq!(c.tolerance("mc_sigmas"), 3.0);
        assert_eq!(c.hash().len(), 64);
        let back = ExperimentConfig::from_toml(&c.to_toml()).unwrap();
        assert_eq!(back, c);
        assert_eq!(back.hash(), c.hash());
    }

    #[test]
    fn errors_carry_field_paths() {
        let bad = format!("{MINIMAL}\n[family]\nkind = \"random\"\namplitud = 0.1\n");
        match ExperimentConfig::from_toml(&bad) {
            Err(Error::Config { path, .. }) => assert_eq!(path, "family.amplitud"),
            other => panic!("{other:?}"),
        }
        let bad = format!("{MINIMAL}\n[family]\nkind = \"random\"\namplitude = 1.5\n");
        match ExperimentConfig::from_toml(&bad) {
            Err(Error::Config { path, .. }) => assert_eq!(path, "family.amplitude"),
            other => panic!("{other:?}"),
        }
        let bad = MINIMAL.replace("schema_version = 1", "schema_version = 2");
        assert!(matches!(ExperimentConfig::from_toml(&bad), Err(Error::Config { path, .. }) if path == "schema_version"));
        let bad = format!("{MINIMAL}\n[tolerances]\nfoo = 1.0\n");
        assert!(matches!(ExperimentConfig::from_toml(&bad), Err(Error::Config { path, .. }) if path == "tolerances.foo"));
    }
}
