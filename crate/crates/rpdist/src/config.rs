//! Experiment configuration: a TOML-backed description of what to
//! sample, how to measure it, and which thresholds a comparison must
//! meet. The same structure drives every subcommand, round-trips
//! through TOML without loss, and is embedded verbatim in the metadata
//! of every run so outputs are self-describing.

use crate::empirics::{Binning, EnergyWindow, Histogram, MomentAccumulator};
use crate::ensemble::EnsembleParams;
use crate::theory::NormalizationMode;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::path::{Path, PathBuf};
use thiserror::Error;

/// Errors from loading or validating a configuration.
#[derive(Debug, Error)]
pub enum ConfigError {
    /// The file could not be read.
    #[error("cannot read config {path}: {source}")]
    Io {
        /// Offending path.
        path: PathBuf,
        /// Underlying error.
        source: std::io::Error,
    },
    /// The TOML failed to parse or deserialize.
    #[error("cannot parse config: {0}")]
    Parse(#[from] toml::de::Error),
    /// The TOML failed to serialize.
    #[error("cannot serialize config: {0}")]
    Serialize(#[from] toml::ser::Error),
    /// The configuration is structurally valid but semantically wrong.
    #[error("invalid config: {detail}")]
    Invalid {
        /// Human-readable description.
        detail: String,
    },
}

fn invalid(detail: impl Into<String>) -> ConfigError {
    ConfigError::Invalid {
        detail: detail.into(),
    }
}

/// Which eigensolver path a run uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum SolverChoice {
    /// Windowed solver when the window covers less than half the
    /// spectrum and is rank-based; full decomposition otherwise.
    #[default]
    Auto,
    /// Always the full decomposition.
    Full,
    /// Always the windowed solver (rank-based windows only).
    Windowed,
}

/// Grid and curve selection for the `theory` subcommand.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TheorySection {
    /// Curves to emit: any of `center`, `bulk`, `tail`, `general`.
    pub curves: Vec<String>,
    /// Number of grid points per curve.
    pub points: usize,
    /// Eigenvalue energy for the `general` curve.
    pub energy: f64,
}

impl Default for TheorySection {
    fn default() -> Self {
        TheorySection {
            curves: vec![
                "center".to_string(),
                "bulk".to_string(),
                "tail".to_string(),
                "general".to_string(),
            ],
            points: 2001,
            energy: 0.5,
        }
    }
}

/// Acceptance thresholds for the `compare` subcommand.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Thresholds {
    /// Maximum χ²/dof for a histogram-versus-density fit.
    pub max_chi2_per_dof: f64,
    /// Maximum relative error of measured moments against the exact
    /// predictions.
    pub max_moment_rel_error: f64,
    /// Maximum relative error of the fitted Lorentzian width against
    /// the predicted spreading width.
    pub max_width_rel_error: f64,
    /// Bins with expected counts below this are excluded from χ².
    pub min_expected: f64,
}

impl Default for Thresholds {
    fn default() -> Self {
        Thresholds {
            max_chi2_per_dof: 2.0,
            max_moment_rel_error: 0.1,
            max_width_rel_error: 0.2,
            min_expected: 10.0,
        }
    }
}

/// Complete description of an experiment.
///
/// Scalar and list fields come first so the structure serializes to
/// valid TOML (tables last).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    /// Number of matrix realizations to sample.
    pub realizations: u64,
    /// Seed of the master random stream; realization `r` draws from an
    /// independent substream derived from `(master_seed, r)`.
    #[serde(default)]
    pub master_seed: u64,
    /// Worker threads for the realization farm; `0` means one per
    /// available CPU. The merged output is identical for any value.
    #[serde(default)]
    pub workers: usize,
    /// Output directory; the CLI `--out` flag overrides it.
    #[serde(default = "default_out_dir")]
    pub out_dir: PathBuf,
    /// Component rescalings to histogram.
    #[serde(default = "default_modes")]
    pub modes: Vec<NormalizationMode>,
    /// Moment orders `q` to accumulate (finite, ≥ 0).
    #[serde(default = "default_orders")]
    pub moment_orders: Vec<f64>,
    /// Matrix dimensions for the `moments` size scan; defaults to the
    /// single dimension in `params`.
    #[serde(default)]
    pub n_list: Option<Vec<usize>>,
    /// Which eigensolver path to use.
    #[serde(default)]
    pub solver: SolverChoice,
    /// Record the mean-squared-component profile (cheap; on by default).
    #[serde(default = "default_true")]
    pub measure_profile: bool,
    /// Number of profile bins.
    #[serde(default = "default_profile_bins")]
    pub profile_bins: usize,
    /// Half-width of the profile in energy; defaults to four spreading
    /// widths at the spectrum center.
    #[serde(default)]
    pub profile_half_width: Option<f64>,
    /// Dump windowed eigenvectors per realization for debugging.
    /// Refused above n = 256 (the files grow as n²).
    #[serde(default)]
    pub dump_eigenvectors: bool,
    /// Ensemble parameters.
    pub params: EnsembleParams,
    /// Which eigenfunctions enter the statistics.
    #[serde(default = "default_window")]
    pub window: EnergyWindow,
    /// Bulk-mode histogram layout; defaults to `[−8ε, 8ε]` in 160 bins.
    #[serde(default)]
    pub bulk_binning: Option<Binning>,
    /// Tail-mode histogram layout; defaults to 100 bins uniform in `z²`
    /// up to `0.8·n^{1−γ/2}`.
    #[serde(default)]
    pub tail_binning: Option<Binning>,
    /// Raw-mode histogram layout; defaults to `[−1, 1]` in 200 bins.
    #[serde(default)]
    pub raw_binning: Option<Binning>,
    /// Grid and curve selection for `theory`.
    #[serde(default)]
    pub theory: TheorySection,
    /// Pass/fail thresholds for `compare`.
    #[serde(default)]
    pub thresholds: Thresholds,
}

fn default_out_dir() -> PathBuf {
    PathBuf::from("out")
}

fn default_modes() -> Vec<NormalizationMode> {
    vec![NormalizationMode::Bulk, NormalizationMode::Tail]
}

fn default_orders() -> Vec<f64> {
    vec![0.0, 0.125, 0.5, 1.0, 2.0]
}

fn default_window() -> EnergyWindow {
    EnergyWindow::CentralFraction { fraction: 0.125 }
}

fn default_true() -> bool {
    true
}

fn default_profile_bins() -> usize {
    40
}

impl ExperimentConfig {
    /// A ready-to-run configuration with library defaults for the
    /// given ensemble parameters.
    pub fn with_defaults(params: EnsembleParams, realizations: u64) -> Self {
        ExperimentConfig {
            realizations,
            master_seed: 0,
            workers: 0,
            out_dir: default_out_dir(),
            modes: default_modes(),
            moment_orders: default_orders(),
            n_list: None,
            solver: SolverChoice::Auto,
            measure_profile: true,
            profile_bins: default_profile_bins(),
            profile_half_width: None,
            dump_eigenvectors: false,
            params,
            window: default_window(),
            bulk_binning: None,
            tail_binning: None,
            raw_binning: None,
            theory: TheorySection::default(),
            thresholds: Thresholds::default(),
        }
    }

    /// Parse a configuration from TOML text and validate it.
    pub fn from_toml_str(text: &str) -> Result<Self, ConfigError> {
        let config: ExperimentConfig = toml::from_str(text)?;
        config.validate()?;
        Ok(config)
    }

    /// Load a configuration file.
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::from_toml_str(&text)
    }

    /// Serialize back to TOML.
    pub fn to_toml_string(&self) -> Result<String, ConfigError> {
        Ok(toml::to_string_pretty(self)?)
    }

    /// Check every cross-field invariant.
    pub fn validate(&self) -> Result<(), ConfigError> {
        self.params
            .validate()
            .map_err(|e| invalid(e.to_string()))?;
        if self.realizations == 0 {
            return Err(invalid("realizations must be at least 1"));
        }
        if self.modes.is_empty() {
            return Err(invalid("at least one normalization mode is required"));
        }
        for (i, mode) in self.modes.iter().enumerate() {
            if self.modes[..i].contains(mode) {
                return Err(invalid(format!(
                    "mode '{}' listed more than once; outputs would collide",
                    mode.label()
                )));
            }
        }
        MomentAccumulator::new(self.moment_orders.clone())
            .map_err(|e| invalid(e.to_string()))?;
        // Rank-based windows are checked against n here; energy windows
        // are checked for interval validity against an empty spectrum.
        match &self.window {
            EnergyWindow::EnergyInterval { .. } => {
                self.window.select(&[]).map_err(|e| invalid(e.to_string()))?;
            }
            _ => {
                self.window
                    .rank_range(self.params.n)
                    .map_err(|e| invalid(e.to_string()))?;
            }
        }
        for binning in [&self.bulk_binning, &self.tail_binning, &self.raw_binning]
            .into_iter()
            .flatten()
        {
            Histogram::new(binning.clone()).map_err(|e| invalid(e.to_string()))?;
        }
        if let Some(ns) = &self.n_list {
            if ns.is_empty() {
                return Err(invalid("n_list must not be empty when present"));
            }
            for &n in ns {
                EnsembleParams::new(n, self.params.gamma_exp, self.params.epsilon)
                    .map_err(|e| invalid(format!("n_list entry {n}: {e}")))?;
            }
        }
        if self.measure_profile && self.profile_bins < 4 {
            return Err(invalid("profile_bins must be at least 4"));
        }
        if let Some(hw) = self.profile_half_width {
            if !(hw.is_finite() && hw > 0.0) {
                return Err(invalid(format!(
                    "profile_half_width must be positive, got {hw}"
                )));
            }
        }
        if self.dump_eigenvectors && self.params.n > 256 {
            return Err(invalid(
                "dump_eigenvectors is limited to n ≤ 256 (files grow as n²)",
            ));
        }
        if self.theory.points < 16 {
            return Err(invalid("theory.points must be at least 16"));
        }
        if !self.theory.energy.is_finite() {
            return Err(invalid("theory.energy must be finite"));
        }
        for name in &self.theory.curves {
            if !matches!(name.as_str(), "center" | "bulk" | "tail" | "general") {
                return Err(invalid(format!(
                    "unknown theory curve '{name}' (expected center, bulk, tail, or general)"
                )));
            }
        }
        let t = &self.thresholds;
        if !(t.max_chi2_per_dof > 0.0)
            || !(t.max_moment_rel_error > 0.0)
            || !(t.max_width_rel_error > 0.0)
            || !(t.min_expected >= 0.0)
        {
            return Err(invalid("thresholds must be positive"));
        }
        Ok(())
    }

    /// The histogram layout for a mode, falling back to parameter-aware
    /// defaults.
    pub fn binning_for(&self, mode: NormalizationMode) -> Binning {
        let n = self.params.n as f64;
        let eps = self.params.epsilon;
        match mode {
            NormalizationMode::Bulk => self.bulk_binning.clone().unwrap_or(Binning::Uniform {
                lo: -8.0 * eps,
                hi: 8.0 * eps,
                bins: 160,
            }),
            NormalizationMode::Tail => {
                self.tail_binning.clone().unwrap_or(Binning::UniformInSquare {
                    max_abs: 0.8 * n.powf(1.0 - self.params.gamma_exp / 2.0),
                    bins: 100,
                })
            }
            NormalizationMode::Raw => self.raw_binning.clone().unwrap_or(Binning::Uniform {
                lo: -1.0,
                hi: 1.0,
                bins: 200,
            }),
        }
    }

    /// The profile half-width: explicit, or four spreading widths
    /// `4·Γ(0)` with `Γ(0) = ε²√(π/2)/n^{γ−1}`.
    pub fn profile_half_width_resolved(&self) -> f64 {
        self.profile_half_width.unwrap_or_else(|| {
            let n = self.params.n as f64;
            4.0 * self.params.epsilon.powi(2) * (PI / 2.0).sqrt()
                / n.powf(self.params.gamma_exp - 1.0)
        })
    }

    /// The copy of this configuration used for one entry of the
    /// `moments` size scan.
    pub fn for_dimension(&self, n: usize) -> Result<ExperimentConfig, ConfigError> {
        let params = EnsembleParams::new(n, self.params.gamma_exp, self.params.epsilon)
            .map_err(|e| invalid(e.to_string()))?;
        let mut clone = self.clone();
        clone.params = params;
        clone.bulk_binning = None;
        clone.tail_binning = None;
        clone.raw_binning = None;
        clone.validate()?;
        Ok(clone)
    }
}
