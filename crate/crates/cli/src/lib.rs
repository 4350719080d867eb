//! Configuration, orchestration and reporting for the zslab verification
//! suites.

pub mod config;
pub mod report;
pub mod suites;

pub use config::{parse_config, parse_config_with, ConfigError, RunConfig, WindowOverrides};
pub use report::{render_text, SuiteReport, SuiteStatus, VerificationReport, SCHEMA_VERSION};
pub use suites::{run_suites, select_suites, RunError};
