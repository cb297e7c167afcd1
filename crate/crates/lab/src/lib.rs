//! Experiment harness: configuration, randomized test-function families,
//! parameter sweeps and audits, and deterministic result files.

pub mod anchors;
pub mod calibration;
pub mod config;
pub mod error;
pub mod families;
pub mod result;
pub mod sweeps;

pub use calibration::Calibration;
pub use config::{ExperimentConfig, Regime};
pub use error::{LabError, Result};
pub use families::{Family, Placement, TestFunctionSpec};
pub use result::{emit, read_csv, read_json, write_csv, write_json, Format, Row, SweepResult};
pub use sweeps::{run_decoupling_audit, run_extension_sweep, run_step3_audit};
