//! Scenario parameters and their TOML representation.
//!
//! Every field has a default taken from the reference deployment (128
//! subcarriers, 5 users, 800 m cell, 2.4 GHz), so a config file only needs
//! the keys it wants to override. Unknown keys are rejected.

use std::path::Path;

use serde::{Deserialize, Serialize};

use super::units::{db_to_linear, dbm_to_watts};
use crate::error::{Error, Result};
use crate::model::InterferenceGain;

/// Log-distance pathloss: `PL(d) = reference_loss_db + 10 * exponent * log10(d / reference_dist_m)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PathlossModel {
    pub reference_loss_db: f64,
    pub exponent: f64,
    pub reference_dist_m: f64,
}

impl Default for PathlossModel {
    fn default() -> Self {
        Self {
            reference_loss_db: 41.0,
            exponent: 3.5,
            reference_dist_m: 1.0,
        }
    }
}

impl PathlossModel {
    pub fn loss_db(&self, distance_m: f64) -> Result<f64> {
        if !(distance_m > 0.0) || !distance_m.is_finite() {
            return Err(Error::NonPositiveDistance(distance_m));
        }
        Ok(self.reference_loss_db + 10.0 * self.exponent * (distance_m / self.reference_dist_m).log10())
    }

    /// Linear power gain at `distance_m`.
    pub fn gain(&self, distance_m: f64) -> Result<f64> {
        Ok(db_to_linear(-self.loss_db(distance_m)?))
    }
}

/// Where the radar's illumination lands, reduced to what the link budget needs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RadarTargetArea {
    /// Distance at which one-way pathloss equals the radar's round-trip
    /// (radar -> target -> radar) loss.
    pub range_m: f64,
    /// Extra attenuation on the radar -> user path, which only reaches users
    /// after scattering off the target area.
    pub scatter_loss_db: f64,
}

impl Default for RadarTargetArea {
    fn default() -> Self {
        Self {
            range_m: 23.0,
            scatter_loss_db: 20.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Geometry {
    /// BS -> radar receiver distance. The radar sits on the x axis.
    pub bs_radar_dist_m: f64,
    pub radar_target_area: RadarTargetArea,
}

impl Default for Geometry {
    fn default() -> Self {
        Self {
            bs_radar_dist_m: 40.0,
            radar_target_area: RadarTargetArea::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScenarioConfig {
    pub n_subcarriers: usize,
    pub n_users: usize,
    /// Informational; the log-distance constants already encode the band.
    pub carrier_freq_hz: f64,
    pub cell_radius_m: f64,
    pub noise_comm_dbm: f64,
    pub noise_radar_dbm: f64,
    pub p_c_max_dbm: f64,
    pub p_r_max_dbm: f64,
    pub p_c_cap_dbm: f64,
    pub p_r_cap_dbm: f64,
    /// Radar SINR floor. `-inf` disables the constraint.
    pub sinr_floor_db: f64,
    pub eta: f64,
    /// Accept `eta < 0.5`, where sharing-free optima are no longer guaranteed.
    pub allow_small_eta: bool,
    pub interference_gain: InterferenceGain,
    pub shadowing_sigma_db: f64,
    pub rayleigh_fading: bool,
    pub seed: u64,
    pub pathloss: PathlossModel,
    pub geometry: Geometry,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        Self {
            n_subcarriers: 128,
            n_users: 5,
            carrier_freq_hz: 2.4e9,
            cell_radius_m: 800.0,
            noise_comm_dbm: -105.0,
            noise_radar_dbm: -105.0,
            p_c_max_dbm: 50.0,
            p_r_max_dbm: 45.0,
            p_c_cap_dbm: 30.0,
            p_r_cap_dbm: 30.0,
            sinr_floor_db: 20.0,
            eta: 0.5,
            allow_small_eta: false,
            interference_gain: InterferenceGain::Receiver,
            shadowing_sigma_db: 8.0,
            rayleigh_fading: true,
            seed: 1,
            pathloss: PathlossModel::default(),
            geometry: Geometry::default(),
        }
    }
}

/// Non-fatal configuration oddities.
#[derive(Debug, Clone, PartialEq)]
pub enum ConfigWarning {
    CommCapExceedsBudget { cap_w: f64, budget_w: f64 },
    RadarCapExceedsBudget { cap_w: f64, budget_w: f64 },
}

impl std::fmt::Display for ConfigWarning {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ConfigWarning::CommCapExceedsBudget { cap_w, budget_w } => write!(
                f,
                "per-subcarrier comm cap {cap_w} W exceeds the comm budget {budget_w} W"
            ),
            ConfigWarning::RadarCapExceedsBudget { cap_w, budget_w } => write!(
                f,
                "per-subcarrier radar cap {cap_w} W exceeds the radar budget {budget_w} W"
            ),
        }
    }
}

fn invalid(field: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidConfig {
        field,
        reason: reason.into(),
    }
}

fn finite(field: &'static str, value: f64) -> Result<()> {
    if value.is_finite() {
        Ok(())
    } else {
        Err(invalid(field, format!("must be finite, got {value}")))
    }
}

fn positive(field: &'static str, value: f64) -> Result<()> {
    if value > 0.0 && value.is_finite() {
        Ok(())
    } else {
        Err(invalid(field, format!("must be positive and finite, got {value}")))
    }
}

impl ScenarioConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let config: Self = toml::from_str(text)?;
        config.validate()?;
        Ok(config)
    }

    pub fn from_file(path: impl AsRef<Path>) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_toml_str(&text)
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string_pretty(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_subcarriers == 0 {
            return Err(invalid("n_subcarriers", "must be at least 1"));
        }
        if self.n_users == 0 {
            return Err(invalid("n_users", "must be at least 1"));
        }
        finite("carrier_freq_hz", self.carrier_freq_hz)?;
        positive("cell_radius_m", self.cell_radius_m)?;
        finite("noise_comm_dbm", self.noise_comm_dbm)?;
        finite("noise_radar_dbm", self.noise_radar_dbm)?;
        finite("p_c_max_dbm", self.p_c_max_dbm)?;
        finite("p_r_max_dbm", self.p_r_max_dbm)?;
        finite("p_c_cap_dbm", self.p_c_cap_dbm)?;
        finite("p_r_cap_dbm", self.p_r_cap_dbm)?;
        if self.sinr_floor_db.is_nan() || self.sinr_floor_db == f64::INFINITY {
            return Err(invalid("sinr_floor_db", "must be finite or -inf"));
        }
        if !(self.eta >= 0.0) || !self.eta.is_finite() {
            return Err(invalid("eta", format!("must be finite and non-negative, got {}", self.eta)));
        }
        if self.eta < 0.5 && !self.allow_small_eta {
            return Err(invalid(
                "eta",
                format!("{} is below 0.5; set allow_small_eta = true to override", self.eta),
            ));
        }
        if !(self.shadowing_sigma_db >= 0.0) || !self.shadowing_sigma_db.is_finite() {
            return Err(invalid("shadowing_sigma_db", "must be finite and non-negative"));
        }
        finite("pathloss.reference_loss_db", self.pathloss.reference_loss_db)?;
        positive("pathloss.exponent", self.pathloss.exponent)?;
        positive("pathloss.reference_dist_m", self.pathloss.reference_dist_m)?;
        if self.cell_radius_m < self.pathloss.reference_dist_m {
            return Err(invalid("cell_radius_m", "must not be smaller than pathloss.reference_dist_m"));
        }
        positive("geometry.bs_radar_dist_m", self.geometry.bs_radar_dist_m)?;
        positive("geometry.radar_target_area.range_m", self.geometry.radar_target_area.range_m)?;
        finite(
            "geometry.radar_target_area.scatter_loss_db",
            self.geometry.radar_target_area.scatter_loss_db,
        )?;
        Ok(())
    }

    pub fn warnings(&self) -> Vec<ConfigWarning> {
        let mut out = Vec::new();
        if self.comm_cap_w() > self.comm_budget_w() {
            out.push(ConfigWarning::CommCapExceedsBudget {
                cap_w: self.comm_cap_w(),
                budget_w: self.comm_budget_w(),
            });
        }
        if self.radar_cap_w() > self.radar_budget_w() {
            out.push(ConfigWarning::RadarCapExceedsBudget {
                cap_w: self.radar_cap_w(),
                budget_w: self.radar_budget_w(),
            });
        }
        out
    }

    pub fn comm_noise_w(&self) -> f64 {
        dbm_to_watts(self.noise_comm_dbm)
    }

    pub fn radar_noise_w(&self) -> f64 {
        dbm_to_watts(self.noise_radar_dbm)
    }

    pub fn comm_budget_w(&self) -> f64 {
        dbm_to_watts(self.p_c_max_dbm)
    }

    pub fn radar_budget_w(&self) -> f64 {
        dbm_to_watts(self.p_r_max_dbm)
    }

    pub fn comm_cap_w(&self) -> f64 {
        dbm_to_watts(self.p_c_cap_dbm)
    }

    pub fn radar_cap_w(&self) -> f64 {
        dbm_to_watts(self.p_r_cap_dbm)
    }

    /// Linear SINR floor; zero when the constraint is disabled.
    pub fn sinr_floor_linear(&self) -> f64 {
        db_to_linear(self.sinr_floor_db)
    }
}
