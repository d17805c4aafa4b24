use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use shiftlab_core::constructions::{MixedParams, TranslationWeightParams};
use shiftlab_core::criteria::{DEFAULT_MAX_K, DEFAULT_SERIES_CUTOFF, DEFAULT_TOL};

use crate::error::CliError;

/// One experiment: a weight family or algebra context, a schedule, a provider and the checks to run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub name: String,
    #[serde(default)]
    pub description: String,
    /// Window half-width; ignored when a grid fixes it.
    #[serde(default = "default_m_max")]
    pub m_max: usize,
    pub family: FamilySpec,
    #[serde(default)]
    pub unitary: UnitarySpec,
    pub schedule: ScheduleSpec,
    #[serde(default)]
    pub provider: ProviderSpec,
    /// `J` in `[J] = {-J, ..., J}`.
    #[serde(default)]
    pub range_j: usize,
    /// Projection radius for `P_m`.
    #[serde(default = "default_m")]
    pub m: usize,
    pub checks: Vec<CheckName>,
    #[serde(default = "default_tol")]
    pub tol: f64,
    #[serde(default = "default_cutoff")]
    pub series_cutoff: usize,
    /// Basis indices used as test vectors by `pointwise_sufficient`.
    #[serde(default)]
    pub test_vectors: TestVectorSpec,
    #[serde(default)]
    pub output_dir: Option<PathBuf>,
    #[serde(default)]
    pub seed: u64,
}

fn default_m_max() -> usize {
    4
}

fn default_m() -> usize {
    1
}

fn default_tol() -> f64 {
    DEFAULT_TOL
}

fn default_cutoff() -> usize {
    DEFAULT_SERIES_CUTOFF
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub half_width: f64,
    pub h: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixSpec {
    pub re: Vec<Vec<f64>>,
    #[serde(default)]
    pub im: Option<Vec<Vec<f64>>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum FamilySpec {
    Identity,
    Salas {
        lambda: f64,
    },
    Translation {
        grid: GridSpec,
        params: TranslationWeightParams,
    },
    Mixed {
        grid: GridSpec,
        params: TranslationWeightParams,
        mixed: MixedParams,
    },
    /// `W_j = matrices[(j - offset) mod len]`.
    CustomMatrixList {
        matrices: Vec<MatrixSpec>,
        #[serde(default)]
        offset: i64,
    },
    /// `b = nonneg` on `n >= 0`, `neg` on `n < 0`, `Phi(f) = f(. - alpha_step)`.
    PhiCommutative {
        window_size: usize,
        alpha_step: i64,
        b_nonneg: f64,
        b_neg: f64,
        /// Plateau radius `rho` of `K = [-rho, rho]`.
        radius: usize,
    },
    /// `b = W U` with `W` the cyclic Salas shift, `Phi(F) = U^* F U`.
    PhiCompact {
        lambda: f64,
        horizon: usize,
    },
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum UnitarySpec {
    #[default]
    Identity,
    DiagonalPhase {
        angles: Vec<f64>,
    },
    Permutation {
        perm: Vec<usize>,
    },
    CyclicShift {
        s: i64,
    },
    /// Polar factor of a random matrix drawn from the experiment seed.
    Random,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ScheduleSpec {
    Explicit {
        t: Vec<usize>,
    },
    Arithmetic {
        start: usize,
        step: usize,
        #[serde(default = "default_max_k")]
        max_k: usize,
    },
    Geometric {
        start: usize,
        ratio: f64,
        #[serde(default = "default_max_k")]
        max_k: usize,
    },
}

fn default_max_k() -> usize {
    DEFAULT_MAX_K
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ProviderSpec {
    /// `D = G = chi_[-k,k] P_m` on the family's grid (unit grid when there is none).
    #[default]
    Example,
    ConstantP,
    Custom {
        d: MatrixSpec,
        g: MatrixSpec,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TestVectorSpec {
    pub h1: Vec<i64>,
    pub h2: Vec<i64>,
}

impl Default for TestVectorSpec {
    fn default() -> Self {
        Self {
            h1: vec![0],
            h2: vec![0],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckName {
    DenseHypercyclicity,
    PointwiseSufficient,
    Chaos,
    AvgTransitivity,
    NecessaryPeriodicT,
    NecessaryPeriodicS,
    TransitivityWitness,
    AvgWitness,
    PeriodicPoint,
    HcCriterionPhi,
    PointwiseMultiplier,
}

impl CheckName {
    pub fn is_phi(self) -> bool {
        matches!(self, CheckName::HcCriterionPhi | CheckName::PointwiseMultiplier)
    }
}

impl ExperimentConfig {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let cfg: Self = serde_json::from_str(text).map_err(|e| CliError::Parse(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    fn validate(&self) -> Result<(), CliError> {
        let invalid = |msg: String| Err(CliError::Config(msg));
        if self.checks.is_empty() {
            return invalid("no checks requested".into());
        }
        if !(self.tol > 0.0) {
            return invalid(format!("tol must be positive, got {}", self.tol));
        }
        for c in &self.checks {
            if !applies(*c, &self.family) {
                return invalid(format!("check {c:?} does not apply to family {:?}", family_kind(&self.family)));
            }
        }
        Ok(())
    }
}

/// The compact context also runs the shift-module checker on the constant family `W_j = W`.
fn applies(check: CheckName, family: &FamilySpec) -> bool {
    match family {
        FamilySpec::PhiCommutative { .. } => check.is_phi(),
        FamilySpec::PhiCompact { .. } => check.is_phi() || check == CheckName::DenseHypercyclicity,
        _ => !check.is_phi(),
    }
}

pub fn family_kind(f: &FamilySpec) -> &'static str {
    match f {
        FamilySpec::Identity => "identity",
        FamilySpec::Salas { .. } => "salas",
        FamilySpec::Translation { .. } => "translation",
        FamilySpec::Mixed { .. } => "mixed",
        FamilySpec::CustomMatrixList { .. } => "custom_matrix_list",
        FamilySpec::PhiCommutative { .. } => "phi_commutative",
        FamilySpec::PhiCompact { .. } => "phi_compact",
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_config_parses_with_defaults() {
        let cfg = ExperimentConfig::parse(
            r#"{"name": "x", "family": {"kind": "salas", "lambda": 2.0},
                "schedule": {"kind": "arithmetic", "start": 1, "step": 1},
                "checks": ["dense_hypercyclicity"]}"#,
        )
        .unwrap();
        assert_eq!(cfg.m, 1);
        assert_eq!(cfg.tol, 1e-6);
        assert_eq!(cfg.seed, 0);
        assert_eq!(cfg.provider, ProviderSpec::Example);
        assert_eq!(cfg.schedule, ScheduleSpec::Arithmetic { start: 1, step: 1, max_k: 40 });
    }

    #[test]
    fn unknown_fields_and_mismatched_checks_are_rejected() {
        let bad = r#"{"name": "x", "family": {"kind": "salas", "lambda": 2.0, "mu": 1},
                      "schedule": {"kind": "explicit", "t": [1]}, "checks": ["chaos"]}"#;
        assert!(matches!(ExperimentConfig::parse(bad), Err(CliError::Parse(_))));
        let bad = r#"{"name": "x", "family": {"kind": "salas", "lambda": 2.0},
                      "schedule": {"kind": "explicit", "t": [1]}, "checks": ["hc_criterion_phi"]}"#;
        assert!(matches!(ExperimentConfig::parse(bad), Err(CliError::Config(_))));
        assert!(matches!(ExperimentConfig::parse("{"), Err(CliError::Parse(_))));
    }
}
