//! Run configuration: one JSON document per run, validated against the
//! hypotheses of the theory before any numerics start.
//!
//! Validation is delegated to the owning modules where possible (the
//! singularity exponent to [`crate::disk::SingularityConfig`], the curvature
//! data to [`crate::potential::Potential`]), so a rejected config names the
//! same constraint the library itself enforces.

use crate::disk::{DiskError, SingularityConfig, P2};
use crate::potential::{Potential, PotentialError, PotentialKind};
use crate::solver::{Schedule, SolverOpts, StopRule};
use serde::{Deserialize, Serialize};
use std::path::Path;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read config: {0}")]
    Io(#[from] std::io::Error),
    #[error("cannot parse config: {0}")]
    Parse(#[from] serde_json::Error),
    #[error(transparent)]
    Disk(#[from] DiskError),
    #[error(transparent)]
    Potential(#[from] PotentialError),
    #[error("invalid config: {0}")]
    Invalid(String),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SingularitySection {
    pub x0_angle: f64,
    pub alpha: f64,
}

impl Default for SingularitySection {
    fn default() -> Self {
        Self { x0_angle: 0.0, alpha: 0.25 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MeshSection {
    pub n_r: usize,
    pub n_t: usize,
    pub grade_exponent: f64,
}

impl Default for MeshSection {
    fn default() -> Self {
        Self { n_r: 48, n_t: 96, grade_exponent: 2.0 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PotentialKindName {
    Constant,
    HoelderBump,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PotentialSection {
    pub kind: PotentialKindName,
    pub level: f64,
    pub bound_b: f64,
    #[serde(rename = "hoelder_A")]
    pub hoelder_a: f64,
    pub hoelder_s: f64,
    pub bump_center: [f64; 2],
    pub bump_radius: f64,
}

impl Default for PotentialSection {
    fn default() -> Self {
        Self {
            kind: PotentialKindName::Constant,
            level: 1.0,
            bound_b: 1.0,
            hoelder_a: 0.0,
            hoelder_s: 1.0,
            bump_center: [1.0, 0.0],
            bump_radius: 1.0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SolverSection {
    pub tol: f64,
    pub max_iter: usize,
    pub damping_min: f64,
}

impl Default for SolverSection {
    fn default() -> Self {
        Self { tol: 1e-10, max_iter: 60, damping_min: 1e-9 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ContinuationMode {
    Lambda,
    Mass,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ContinuationSection {
    pub mode: ContinuationMode,
    pub targets: Vec<f64>,
    pub mass_ceiling: f64,
}

impl Default for ContinuationSection {
    fn default() -> Self {
        Self {
            mode: ContinuationMode::Mass,
            targets: vec![1.0, 2.0, 4.0, 6.0],
            mass_ceiling: 16.0 * std::f64::consts::PI - 0.1,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ExtractionSection {
    pub epsilon: f64,
    pub peak_threshold_offset: f64,
    pub max_candidates: usize,
}

impl Default for ExtractionSection {
    fn default() -> Self {
        Self { epsilon: 0.1, peak_threshold_offset: 5.0, max_candidates: 4 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputSection {
    pub dir: String,
    pub formats: Vec<String>,
}

impl Default for OutputSection {
    fn default() -> Self {
        Self { dir: "out".into(), formats: vec!["csv".into(), "json".into()] }
    }
}

/// Complete run configuration. Every section has defaults, so a partial
/// JSON document (or `{}`) is a valid input.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct LabConfig {
    pub singularity: SingularitySection,
    pub mesh: MeshSection,
    pub potential: PotentialSection,
    pub solver: SolverSection,
    pub continuation: ContinuationSection,
    pub extraction: ExtractionSection,
    pub output: OutputSection,
}

impl LabConfig {
    pub fn from_json_str(text: &str) -> Result<Self, ConfigError> {
        let cfg: LabConfig = serde_json::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_json_file(path: &Path) -> Result<Self, ConfigError> {
        Self::from_json_str(&std::fs::read_to_string(path)?)
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serialization cannot fail")
    }

    /// Checks every hypothesis-derived constraint; the error message names
    /// the violated interval.
    pub fn validate(&self) -> Result<(), ConfigError> {
        self.singularity()?;
        self.build_potential()?;
        let m = &self.mesh;
        if m.n_r < 8 || m.n_t < 8 {
            return Err(ConfigError::Invalid("mesh.n_r and mesh.n_t must both be at least 8".into()));
        }
        if !m.grade_exponent.is_finite() || m.grade_exponent < 1.0 {
            return Err(ConfigError::Invalid("mesh.grade_exponent must be at least 1".into()));
        }
        let s = &self.solver;
        if !(s.tol > 0.0) || !s.tol.is_finite() {
            return Err(ConfigError::Invalid("solver.tol must be positive".into()));
        }
        if s.max_iter == 0 {
            return Err(ConfigError::Invalid("solver.max_iter must be at least 1".into()));
        }
        if !(s.damping_min > 0.0 && s.damping_min <= 1.0) {
            return Err(ConfigError::Invalid("solver.damping_min must lie in (0, 1]".into()));
        }
        let c = &self.continuation;
        if !c.mass_ceiling.is_finite() || c.mass_ceiling >= 16.0 * std::f64::consts::PI {
            return Err(ConfigError::Invalid(
                "continuation.mass_ceiling must stay strictly below 16π".into(),
            ));
        }
        if c.mass_ceiling <= 0.0 {
            return Err(ConfigError::Invalid("continuation.mass_ceiling must be positive".into()));
        }
        if c.targets.iter().any(|t| !t.is_finite() || *t <= 0.0) {
            return Err(ConfigError::Invalid("continuation.targets must be positive".into()));
        }
        if c.mode == ContinuationMode::Mass
            && c.targets.iter().any(|t| *t > c.mass_ceiling)
        {
            return Err(ConfigError::Invalid(
                "continuation.targets must stay at or below continuation.mass_ceiling (< 16π)".into(),
            ));
        }
        let e = &self.extraction;
        if !e.epsilon.is_finite() || e.epsilon <= 0.0 || e.epsilon >= 0.25 {
            return Err(ConfigError::Invalid(
                "extraction.epsilon must lie in the open interval (0, 1/4)".into(),
            ));
        }
        if !e.peak_threshold_offset.is_finite() {
            return Err(ConfigError::Invalid("extraction.peak_threshold_offset must be finite".into()));
        }
        if e.max_candidates == 0 {
            return Err(ConfigError::Invalid("extraction.max_candidates must be at least 1".into()));
        }
        if self.output.dir.is_empty() {
            return Err(ConfigError::Invalid("output.dir must not be empty".into()));
        }
        for f in &self.output.formats {
            if f != "csv" && f != "json" {
                return Err(ConfigError::Invalid(format!("unknown output format {f:?}")));
            }
        }
        Ok(())
    }

    pub fn singularity(&self) -> Result<SingularityConfig, ConfigError> {
        Ok(SingularityConfig::new(self.singularity.x0_angle, self.singularity.alpha)?)
    }

    pub fn build_potential(&self) -> Result<Potential, ConfigError> {
        let p = &self.potential;
        let v = match p.kind {
            PotentialKindName::Constant => Potential::constant(p.level, p.bound_b)?,
            PotentialKindName::HoelderBump => Potential::hoelder_bump(
                p.level,
                p.bound_b,
                p.hoelder_a,
                p.hoelder_s,
                P2::new(p.bump_center[0], p.bump_center[1]),
                p.bump_radius,
            )?,
        };
        debug_assert!(matches!(
            (p.kind, v.kind),
            (PotentialKindName::Constant, PotentialKind::Constant)
                | (PotentialKindName::HoelderBump, PotentialKind::HoelderBump)
        ));
        Ok(v)
    }

    pub fn solver_opts(&self) -> SolverOpts {
        SolverOpts {
            tol: self.solver.tol,
            max_iter: self.solver.max_iter,
            damping_min: self.solver.damping_min,
        }
    }

    pub fn schedule(&self) -> Schedule {
        match self.continuation.mode {
            ContinuationMode::Lambda => Schedule::Lambda(self.continuation.targets.clone()),
            ContinuationMode::Mass => Schedule::MassTargets(self.continuation.targets.clone()),
        }
    }

    pub fn stop_rule(&self) -> StopRule {
        StopRule { max_peak: f64::INFINITY, max_mass: self.continuation.mass_ceiling }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_pass_validation_and_round_trip() {
        let cfg = LabConfig::default();
        cfg.validate().unwrap();
        let text = cfg.to_json_string();
        let back = LabConfig::from_json_str(&text).unwrap();
        assert_eq!(cfg, back);
        // A second serialization is byte-identical (fixed field order).
        assert_eq!(text, back.to_json_string());
    }

    #[test]
    fn empty_document_yields_the_default_config() {
        let cfg = LabConfig::from_json_str("{}").unwrap();
        assert_eq!(cfg, LabConfig::default());
        assert_eq!(cfg.extraction.epsilon, 0.1);
        assert_eq!(cfg.continuation.targets, vec![1.0, 2.0, 4.0, 6.0]);
    }

    #[test]
    fn alpha_outside_the_open_interval_names_the_constraint() {
        let err = LabConfig::from_json_str(r#"{"singularity": {"alpha": 0.6}}"#).unwrap_err();
        assert!(err.to_string().contains("(0, 1/2)"), "{err}");
        let err = LabConfig::from_json_str(r#"{"singularity": {"alpha": 0.0}}"#).unwrap_err();
        assert!(err.to_string().contains("(0, 1/2)"), "{err}");
    }

    #[test]
    fn hoelder_exponent_outside_the_half_open_interval_names_it() {
        let text = r#"{"potential": {"kind": "hoelder_bump", "hoelder_s": 0.4, "hoelder_A": 1.0}}"#;
        let err = LabConfig::from_json_str(text).unwrap_err();
        assert!(err.to_string().contains("(1/2, 1]"), "{err}");
    }

    #[test]
    fn mass_ceiling_at_or_above_16_pi_is_rejected() {
        let text = format!(
            r#"{{"continuation": {{"mass_ceiling": {}}}}}"#,
            16.0 * std::f64::consts::PI
        );
        let err = LabConfig::from_json_str(&text).unwrap_err();
        assert!(err.to_string().contains("16π"), "{err}");
        let ok = format!(
            r#"{{"continuation": {{"mass_ceiling": {}}}}}"#,
            16.0 * std::f64::consts::PI - 0.5
        );
        LabConfig::from_json_str(&ok).unwrap();
    }

    #[test]
    fn unknown_fields_and_bad_sections_are_rejected() {
        assert!(LabConfig::from_json_str(r#"{"solvr": {}}"#).is_err());
        assert!(LabConfig::from_json_str(r#"{"extraction": {"epsilon": 0.25}}"#).is_err());
        assert!(LabConfig::from_json_str(r#"{"solver": {"tol": 0.0}}"#).is_err());
        assert!(LabConfig::from_json_str(r#"{"output": {"formats": ["yaml"]}}"#).is_err());
    }

    #[test]
    fn sections_convert_into_library_types() {
        let cfg = LabConfig::default();
        let sing = cfg.singularity().unwrap();
        assert_eq!(sing.alpha, 0.25);
        let v = cfg.build_potential().unwrap();
        assert_eq!(v.eval(P2::zeros()), 1.0);
        assert!(matches!(cfg.schedule(), Schedule::MassTargets(t) if t.len() == 4));
        assert_eq!(cfg.solver_opts().max_iter, 60);
        assert!(cfg.stop_rule().max_mass < 16.0 * std::f64::consts::PI);
    }
}
