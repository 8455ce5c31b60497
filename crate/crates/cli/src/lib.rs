//! Verification harness: configuration, the check registry, suite execution
//! and deterministic reports.

pub mod checks;
pub mod config;
pub mod experiment;
pub mod report;
pub mod scan;
pub mod suite;

pub use config::{parse_config, Config, ConfigError, Tier};
pub use report::Report;
pub use suite::{default_suite, run_suite, EXIT_CONFIG, EXIT_FAIL, EXIT_PASS};
