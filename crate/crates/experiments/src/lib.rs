//! Reproducible experiment runs, presets and the nuisance-label demo built
//! on `hsp-core`.

pub mod config;
pub mod error;
pub mod nuisance;
pub mod presets;
pub mod report;
pub mod sampling;

pub use config::ExperimentConfig;
pub use error::{ExpError, Result};
pub use nuisance::{nuisance_demo, NuisanceConfig, NuisanceReport};
pub use presets::{run_preset, Preset};
pub use report::{run_experiment, Outcome, Summary};
