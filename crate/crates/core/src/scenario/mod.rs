//! Units, configuration and randomized channel generation.

mod channels;
mod config;
mod units;

pub use channels::{generate_channels, generate_channels_seeded, ChannelSet};
pub use config::{ConfigWarning, Geometry, PathlossModel, RadarTargetArea, ScenarioConfig};
pub use units::{db_to_linear, dbm_to_watts, linear_to_db, watts_to_dbm};
