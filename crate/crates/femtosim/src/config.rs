//! Scenario configuration: a flat `key = value` text format with defaults.
//!
//! Every simulation input is a documented key. Unknown keys are errors, not
//! warnings, so a typo cannot silently fall back to a default. An empty file
//! (or no file at all) resolves to the default scenario.

use std::fmt::Write as _;
use std::path::Path;
use std::str::FromStr;

use thiserror::Error;

use crate::analysis::{SirThreshold, TransmitPowers};
use crate::channel::{free_space_reference_gain, ChannelParams};
use crate::deployment::DeploymentSpec;
use crate::schemes::{ResizePolicy, SchemeKind};
use crate::spectrum::Band;

/// Errors from reading, parsing, or validating a scenario file.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConfigError {
    #[error("cannot read config file {path}: {message}")]
    Read { path: String, message: String },
    #[error("config line {line_no} is not `key = value`: {line:?}")]
    Syntax { line_no: usize, line: String },
    #[error("unknown config key {key:?}")]
    UnknownKey { key: String },
    #[error("config key {key:?}: {detail}")]
    BadValue { key: String, detail: String },
    #[error("config key {key:?}: {detail}")]
    Constraint { key: String, detail: String },
}

/// Which rate the throughput columns report.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ThroughputMetric {
    /// Per-femtocell downlink capacity: every band component the cell
    /// transmits on contributes width times capped spectral efficiency,
    /// each component evaluated at its representative user.
    Cell,
    /// Rate of the edge-region reference user alone, on its active band.
    EdgeUe,
}

impl ThroughputMetric {
    pub fn as_str(&self) -> &'static str {
        match self {
            ThroughputMetric::Cell => "cell",
            ThroughputMetric::EdgeUe => "edge_ue",
        }
    }
}

impl FromStr for ThroughputMetric {
    type Err = String;

    fn from_str(s: &str) -> Result<ThroughputMetric, String> {
        match s {
            "cell" => Ok(ThroughputMetric::Cell),
            "edge_ue" => Ok(ThroughputMetric::EdgeUe),
            other => Err(format!("expected \"cell\" or \"edge_ue\", got {other:?}")),
        }
    }
}

/// How many femtocells each sweep cell places per trial.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PlacementMode {
    /// Exactly the sweep cell's count, every trial.
    Fixed,
    /// A Poisson draw per trial with mean `poisson_mean` (or the cell's
    /// count when no mean is configured).
    Poisson,
}

impl PlacementMode {
    pub fn as_str(&self) -> &'static str {
        match self {
            PlacementMode::Fixed => "fixed",
            PlacementMode::Poisson => "poisson",
        }
    }
}

impl FromStr for PlacementMode {
    type Err = String;

    fn from_str(s: &str) -> Result<PlacementMode, String> {
        match s {
            "fixed" => Ok(PlacementMode::Fixed),
            "poisson" => Ok(PlacementMode::Poisson),
            other => Err(format!("expected \"fixed\" or \"poisson\", got {other:?}")),
        }
    }
}

/// A fully resolved simulation scenario.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    pub seed: u64,
    pub schemes: Vec<SchemeKind>,
    /// Femtocell counts of the density sweep, excluding the reference
    /// femtocell that every trial adds on top.
    pub femtocell_counts: Vec<u64>,
    pub trials: u64,
    pub macro_radius_m: f64,
    pub femto_radius_m: f64,
    pub reference_fap_distance_m: f64,
    pub ue_distance_m: f64,
    pub center_ue_distance_m: f64,
    pub carrier_mhz: f64,
    pub macro_tx_power_w: f64,
    pub fap_tx_power_w: f64,
    pub bs_height_m: f64,
    pub fap_height_m: f64,
    pub gamma_db: f64,
    pub neighbor_threshold_m: f64,
    pub walls_between_femtocells: u32,
    pub dedicated_femto_fraction: f64,
    pub subband_fraction: f64,
    pub total_band_mhz: f64,
    pub eta1: f64,
    pub eta2: f64,
    pub eta3: f64,
    pub shadow_sigma_femto_db: f64,
    pub shadow_sigma_macro_db: f64,
    pub wall_loss_db: f64,
    /// Reference path gain of femto links at 1 m; `None` means "auto",
    /// the free-space gain at the configured carrier.
    pub p0_femto: Option<f64>,
    /// Reference path gain of macro downlinks at 1 m. The default is a
    /// fitted outdoor-to-indoor intercept, not a physical free-space gain.
    pub p0_macro: f64,
    /// Counts strictly above this are the dense regime in the summary.
    pub dense_threshold: u64,
    pub inner_radius_fraction: f64,
    pub se_cap_bits_per_hz: f64,
    pub throughput_metric: ThroughputMetric,
    pub placement_mode: PlacementMode,
    pub poisson_mean: Option<f64>,
    pub resize_shrink_factor: f64,
    pub min_cell_radius_m: f64,
}

impl Default for ScenarioConfig {
    fn default() -> ScenarioConfig {
        ScenarioConfig {
            seed: 1,
            schemes: SchemeKind::ALL.to_vec(),
            femtocell_counts: vec![100, 500, 1000, 2000],
            trials: 10_000,
            macro_radius_m: 1_000.0,
            femto_radius_m: 10.0,
            reference_fap_distance_m: 200.0,
            ue_distance_m: 5.0,
            center_ue_distance_m: 2.5,
            carrier_mhz: 900.0,
            macro_tx_power_w: 1_500.0,
            fap_tx_power_w: 0.01,
            bs_height_m: 50.0,
            fap_height_m: 2.0,
            gamma_db: 9.0,
            neighbor_threshold_m: 60.0,
            walls_between_femtocells: 1,
            dedicated_femto_fraction: 0.333,
            subband_fraction: 0.333,
            total_band_mhz: 30.0,
            eta1: 2.0,
            eta2: 2.2,
            eta3: 4.6,
            shadow_sigma_femto_db: 4.0,
            shadow_sigma_macro_db: 4.0,
            wall_loss_db: 5.0,
            p0_femto: None,
            p0_macro: 4.5,
            dense_threshold: 1_000,
            inner_radius_fraction: 0.5,
            se_cap_bits_per_hz: 10.0,
            throughput_metric: ThroughputMetric::Cell,
            placement_mode: PlacementMode::Fixed,
            poisson_mean: None,
            resize_shrink_factor: 0.8,
            min_cell_radius_m: 4.0,
        }
    }
}

fn parse_num<T: FromStr>(key: &str, value: &str, what: &str) -> Result<T, ConfigError> {
    value.parse().map_err(|_| ConfigError::BadValue {
        key: key.to_string(),
        detail: format!("expected {what}, got {value:?}"),
    })
}

fn require_positive(key: &str, value: f64) -> Result<(), ConfigError> {
    if value > 0.0 && value.is_finite() {
        Ok(())
    } else {
        Err(ConfigError::Constraint {
            key: key.to_string(),
            detail: format!("must be positive and finite, got {value}"),
        })
    }
}

fn require_finite(key: &str, value: f64) -> Result<(), ConfigError> {
    if value.is_finite() {
        Ok(())
    } else {
        Err(ConfigError::Constraint {
            key: key.to_string(),
            detail: format!("must be finite, got {value}"),
        })
    }
}

fn require_nonnegative(key: &str, value: f64) -> Result<(), ConfigError> {
    if value >= 0.0 && value.is_finite() {
        Ok(())
    } else {
        Err(ConfigError::Constraint {
            key: key.to_string(),
            detail: format!("must be nonnegative and finite, got {value}"),
        })
    }
}

fn require_open_unit(key: &str, value: f64) -> Result<(), ConfigError> {
    if value > 0.0 && value < 1.0 {
        Ok(())
    } else {
        Err(ConfigError::Constraint {
            key: key.to_string(),
            detail: format!("must lie strictly between 0 and 1, got {value}"),
        })
    }
}

impl ScenarioConfig {
    /// Reads and fully resolves a scenario file.
    pub fn load(path: &Path) -> Result<ScenarioConfig, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|e| ConfigError::Read {
            path: path.display().to_string(),
            message: e.to_string(),
        })?;
        let config = ScenarioConfig::parse(&text)?;
        config.validate()?;
        Ok(config)
    }

    /// Parses scenario text on top of the defaults. Later assignments to
    /// the same key win. Validation is separate so callers can layer
    /// command-line overrides first.
    pub fn parse(text: &str) -> Result<ScenarioConfig, ConfigError> {
        let mut config = ScenarioConfig::default();
        for (idx, raw) in text.lines().enumerate() {
            let line = match raw.find('#') {
                Some(pos) => &raw[..pos],
                None => raw,
            }
            .trim();
            if line.is_empty() {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(ConfigError::Syntax {
                    line_no: idx + 1,
                    line: raw.to_string(),
                });
            };
            config.set(key.trim(), value.trim())?;
        }
        Ok(config)
    }

    /// Applies one `key = value` assignment.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), ConfigError> {
        match key {
            "seed" => self.seed = parse_num(key, value, "an unsigned integer")?,
            "schemes" => self.schemes = parse_scheme_list(value)?,
            "femtocell_counts" => {
                self.femtocell_counts = parse_count_list(key, value)?;
            }
            "trials" => self.trials = parse_num(key, value, "an unsigned integer")?,
            "macro_radius_m" => self.macro_radius_m = parse_num(key, value, "a number")?,
            "femto_radius_m" => self.femto_radius_m = parse_num(key, value, "a number")?,
            "reference_fap_distance_m" => {
                self.reference_fap_distance_m = parse_num(key, value, "a number")?;
            }
            "ue_distance_m" => self.ue_distance_m = parse_num(key, value, "a number")?,
            "center_ue_distance_m" => {
                self.center_ue_distance_m = parse_num(key, value, "a number")?;
            }
            "carrier_mhz" => self.carrier_mhz = parse_num(key, value, "a number")?,
            "macro_tx_power_w" => self.macro_tx_power_w = parse_num(key, value, "a number")?,
            "fap_tx_power_w" => self.fap_tx_power_w = parse_num(key, value, "a number")?,
            "bs_height_m" => self.bs_height_m = parse_num(key, value, "a number")?,
            "fap_height_m" => self.fap_height_m = parse_num(key, value, "a number")?,
            "gamma_db" => self.gamma_db = parse_num(key, value, "a number")?,
            "neighbor_threshold_m" => {
                self.neighbor_threshold_m = parse_num(key, value, "a number")?;
            }
            "walls_between_femtocells" => {
                self.walls_between_femtocells = parse_num(key, value, "an unsigned integer")?;
            }
            "dedicated_femto_fraction" => {
                self.dedicated_femto_fraction = parse_num(key, value, "a number")?;
            }
            "subband_fraction" => self.subband_fraction = parse_num(key, value, "a number")?,
            "total_band_mhz" => self.total_band_mhz = parse_num(key, value, "a number")?,
            "eta1" => self.eta1 = parse_num(key, value, "a number")?,
            "eta2" => self.eta2 = parse_num(key, value, "a number")?,
            "eta3" => self.eta3 = parse_num(key, value, "a number")?,
            "shadow_sigma_femto_db" => {
                self.shadow_sigma_femto_db = parse_num(key, value, "a number")?;
            }
            "shadow_sigma_macro_db" => {
                self.shadow_sigma_macro_db = parse_num(key, value, "a number")?;
            }
            "wall_loss_db" => self.wall_loss_db = parse_num(key, value, "a number")?,
            "p0_femto" => {
                self.p0_femto = if value == "auto" {
                    None
                } else {
                    Some(parse_num(key, value, "a number or \"auto\"")?)
                };
            }
            "p0_macro" => self.p0_macro = parse_num(key, value, "a number")?,
            "dense_threshold" => {
                self.dense_threshold = parse_num(key, value, "an unsigned integer")?;
            }
            "inner_radius_fraction" => {
                self.inner_radius_fraction = parse_num(key, value, "a number")?;
            }
            "se_cap_bits_per_hz" => self.se_cap_bits_per_hz = parse_num(key, value, "a number")?,
            "throughput_metric" => {
                self.throughput_metric =
                    value.parse().map_err(|detail| ConfigError::BadValue {
                        key: key.to_string(),
                        detail,
                    })?;
            }
            "placement_mode" => {
                self.placement_mode = value.parse().map_err(|detail| ConfigError::BadValue {
                    key: key.to_string(),
                    detail,
                })?;
            }
            "poisson_mean" => {
                self.poisson_mean = if value == "auto" {
                    None
                } else {
                    Some(parse_num(key, value, "a number or \"auto\"")?)
                };
            }
            "resize_shrink_factor" => {
                self.resize_shrink_factor = parse_num(key, value, "a number")?;
            }
            "min_cell_radius_m" => self.min_cell_radius_m = parse_num(key, value, "a number")?,
            other => {
                return Err(ConfigError::UnknownKey {
                    key: other.to_string(),
                })
            }
        }
        Ok(())
    }

    /// Checks every cross-field invariant, naming the offending key.
    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.schemes.is_empty() {
            return Err(ConfigError::Constraint {
                key: "schemes".to_string(),
                detail: "at least one scheme is required".to_string(),
            });
        }
        if self.femtocell_counts.is_empty() {
            return Err(ConfigError::Constraint {
                key: "femtocell_counts".to_string(),
                detail: "at least one count is required".to_string(),
            });
        }
        if self.trials == 0 {
            return Err(ConfigError::Constraint {
                key: "trials".to_string(),
                detail: "at least one trial is required".to_string(),
            });
        }
        require_positive("macro_radius_m", self.macro_radius_m)?;
        require_positive("femto_radius_m", self.femto_radius_m)?;
        require_positive("reference_fap_distance_m", self.reference_fap_distance_m)?;
        require_positive("ue_distance_m", self.ue_distance_m)?;
        require_positive("center_ue_distance_m", self.center_ue_distance_m)?;
        require_positive("carrier_mhz", self.carrier_mhz)?;
        require_positive("macro_tx_power_w", self.macro_tx_power_w)?;
        require_positive("fap_tx_power_w", self.fap_tx_power_w)?;
        require_positive("bs_height_m", self.bs_height_m)?;
        require_positive("fap_height_m", self.fap_height_m)?;
        require_finite("gamma_db", self.gamma_db)?;
        require_positive("neighbor_threshold_m", self.neighbor_threshold_m)?;
        require_open_unit("dedicated_femto_fraction", self.dedicated_femto_fraction)?;
        require_open_unit("subband_fraction", self.subband_fraction)?;
        require_positive("total_band_mhz", self.total_band_mhz)?;
        for (key, eta) in [("eta1", self.eta1), ("eta2", self.eta2), ("eta3", self.eta3)] {
            if !(eta >= 1.0) || !eta.is_finite() {
                return Err(ConfigError::Constraint {
                    key: key.to_string(),
                    detail: format!("path-loss exponent must be at least 1, got {eta}"),
                });
            }
        }
        require_nonnegative("shadow_sigma_femto_db", self.shadow_sigma_femto_db)?;
        require_nonnegative("shadow_sigma_macro_db", self.shadow_sigma_macro_db)?;
        require_nonnegative("wall_loss_db", self.wall_loss_db)?;
        if let Some(p0) = self.p0_femto {
            require_positive("p0_femto", p0)?;
        }
        require_positive("p0_macro", self.p0_macro)?;
        if !(self.inner_radius_fraction > 0.0) || self.inner_radius_fraction > 1.0 {
            return Err(ConfigError::Constraint {
                key: "inner_radius_fraction".to_string(),
                detail: format!(
                    "must lie in (0, 1], got {}",
                    self.inner_radius_fraction
                ),
            });
        }
        require_positive("se_cap_bits_per_hz", self.se_cap_bits_per_hz)?;
        if let Some(mean) = self.poisson_mean {
            require_nonnegative("poisson_mean", mean)?;
        }
        require_open_unit("resize_shrink_factor", self.resize_shrink_factor)?;
        require_positive("min_cell_radius_m", self.min_cell_radius_m)?;
        if self.min_cell_radius_m > self.femto_radius_m {
            return Err(ConfigError::Constraint {
                key: "min_cell_radius_m".to_string(),
                detail: format!(
                    "cannot exceed femto_radius_m ({} > {})",
                    self.min_cell_radius_m, self.femto_radius_m
                ),
            });
        }
        // The channel model enforces its own parameter ranges; surface any
        // violation under the key it came from.
        self.channel_params()
            .validate()
            .map_err(|e| ConfigError::Constraint {
                key: "channel parameters".to_string(),
                detail: e.to_string(),
            })?;
        Ok(())
    }

    /// The resolved propagation model, with the auto femto reference gain
    /// expanded to the free-space value at the configured carrier.
    pub fn channel_params(&self) -> ChannelParams {
        ChannelParams {
            p0_femto: self
                .p0_femto
                .unwrap_or_else(|| free_space_reference_gain(self.carrier_mhz)),
            p0_macro: self.p0_macro,
            eta1: self.eta1,
            eta2: self.eta2,
            eta3: self.eta3,
            shadow_sigma_femto_db: self.shadow_sigma_femto_db,
            shadow_sigma_macro_db: self.shadow_sigma_macro_db,
            wall_loss_db: self.wall_loss_db,
            carrier_mhz: self.carrier_mhz,
            bs_height_m: self.bs_height_m,
            fap_height_m: self.fap_height_m,
        }
    }

    /// Geometry inputs for one sweep cell with `count` placed femtocells.
    pub fn deployment_spec(&self, count: u64) -> DeploymentSpec {
        DeploymentSpec {
            macro_radius_m: self.macro_radius_m,
            femtocell_count: count,
            reference_fap_distance_m: self.reference_fap_distance_m,
            ue_distance_m: self.ue_distance_m,
            cell_radius_m: self.femto_radius_m,
            inner_radius_fraction: self.inner_radius_fraction,
            neighbor_threshold_m: self.neighbor_threshold_m,
            walls_between_femtocells: self.walls_between_femtocells,
        }
    }

    /// The full licensed band.
    pub fn total_band(&self) -> Result<Band, ConfigError> {
        Band::from_mhz(0.0, self.total_band_mhz).map_err(|e| ConfigError::Constraint {
            key: "total_band_mhz".to_string(),
            detail: e.to_string(),
        })
    }

    pub fn transmit_powers(&self) -> TransmitPowers {
        TransmitPowers {
            fap_w: self.fap_tx_power_w,
            macro_w: self.macro_tx_power_w,
        }
    }

    pub fn sir_threshold(&self) -> SirThreshold {
        SirThreshold::from_db(self.gamma_db)
    }

    pub fn resize_policy(&self) -> ResizePolicy {
        ResizePolicy {
            shrink_factor: self.resize_shrink_factor,
            min_radius_m: self.min_cell_radius_m,
        }
    }

    /// Serializes the configuration as scenario text that parses back to
    /// an identical configuration.
    pub fn to_config_text(&self) -> String {
        let mut out = String::new();
        let mut kv = |key: &str, value: String| {
            let _ = writeln!(out, "{key} = {value}");
        };
        kv("seed", self.seed.to_string());
        kv(
            "schemes",
            self.schemes
                .iter()
                .map(SchemeKind::as_str)
                .collect::<Vec<_>>()
                .join(","),
        );
        kv(
            "femtocell_counts",
            self.femtocell_counts
                .iter()
                .map(u64::to_string)
                .collect::<Vec<_>>()
                .join(","),
        );
        kv("trials", self.trials.to_string());
        kv("macro_radius_m", self.macro_radius_m.to_string());
        kv("femto_radius_m", self.femto_radius_m.to_string());
        kv(
            "reference_fap_distance_m",
            self.reference_fap_distance_m.to_string(),
        );
        kv("ue_distance_m", self.ue_distance_m.to_string());
        kv("center_ue_distance_m", self.center_ue_distance_m.to_string());
        kv("carrier_mhz", self.carrier_mhz.to_string());
        kv("macro_tx_power_w", self.macro_tx_power_w.to_string());
        kv("fap_tx_power_w", self.fap_tx_power_w.to_string());
        kv("bs_height_m", self.bs_height_m.to_string());
        kv("fap_height_m", self.fap_height_m.to_string());
        kv("gamma_db", self.gamma_db.to_string());
        kv("neighbor_threshold_m", self.neighbor_threshold_m.to_string());
        kv(
            "walls_between_femtocells",
            self.walls_between_femtocells.to_string(),
        );
        kv(
            "dedicated_femto_fraction",
            self.dedicated_femto_fraction.to_string(),
        );
        kv("subband_fraction", self.subband_fraction.to_string());
        kv("total_band_mhz", self.total_band_mhz.to_string());
        kv("eta1", self.eta1.to_string());
        kv("eta2", self.eta2.to_string());
        kv("eta3", self.eta3.to_string());
        kv(
            "shadow_sigma_femto_db",
            self.shadow_sigma_femto_db.to_string(),
        );
        kv(
            "shadow_sigma_macro_db",
            self.shadow_sigma_macro_db.to_string(),
        );
        kv("wall_loss_db", self.wall_loss_db.to_string());
        kv(
            "p0_femto",
            self.p0_femto
                .map_or_else(|| "auto".to_string(), |v| v.to_string()),
        );
        kv("p0_macro", self.p0_macro.to_string());
        kv("dense_threshold", self.dense_threshold.to_string());
        kv(
            "inner_radius_fraction",
            self.inner_radius_fraction.to_string(),
        );
        kv("se_cap_bits_per_hz", self.se_cap_bits_per_hz.to_string());
        kv(
            "throughput_metric",
            self.throughput_metric.as_str().to_string(),
        );
        kv("placement_mode", self.placement_mode.as_str().to_string());
        kv(
            "poisson_mean",
            self.poisson_mean
                .map_or_else(|| "auto".to_string(), |v| v.to_string()),
        );
        kv(
            "resize_shrink_factor",
            self.resize_shrink_factor.to_string(),
        );
        kv("min_cell_radius_m", self.min_cell_radius_m.to_string());
        out
    }
}

fn parse_scheme_list(value: &str) -> Result<Vec<SchemeKind>, ConfigError> {
    let mut schemes = Vec::new();
    for part in value.split(',') {
        let name = part.trim();
        if name.is_empty() {
            continue;
        }
        let kind: SchemeKind = name.parse().map_err(|_| ConfigError::BadValue {
            key: "schemes".to_string(),
            detail: format!(
                "unknown scheme {name:?}; expected any of shared, dedicated, subband, static, dynamic"
            ),
        })?;
        if !schemes.contains(&kind) {
            schemes.push(kind);
        }
    }
    Ok(schemes)
}

fn parse_count_list(key: &str, value: &str) -> Result<Vec<u64>, ConfigError> {
    let mut counts = Vec::new();
    for part in value.split(',') {
        let item = part.trim();
        if item.is_empty() {
            continue;
        }
        counts.push(parse_num(key, item, "a comma-separated list of unsigned integers")?);
    }
    Ok(counts)
}
