//! Experiment harness for the grid-based variational time evolution engine:
//! scenario configuration, built-in presets, batch execution, and CSV/JSON
//! artifact emission.
//!
//! The library half of the `qvte` binary. [`config`] defines the TOML
//! scenario schema, [`presets`] ships the built-in scenarios, [`run`]
//! executes one scenario into a set of artifact files, and [`report`]
//! computes the derived thresholding-density and width-spread tables.

pub mod config;
pub mod error;
pub mod presets;
pub mod report;
pub mod run;

pub use config::Scenario;
pub use error::HarnessError;
