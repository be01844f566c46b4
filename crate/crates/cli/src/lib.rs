//! Configuration-driven batch runs of the `cp-pressure` computations.

pub mod config;
pub mod emit;
pub mod error;
pub mod report;
pub mod run;

pub use config::{Budget, ExperimentConfig, Overrides, TaskKind};
pub use emit::emit_tables;
pub use error::CliError;
pub use report::{CheckEntry, Reported, RunReport, Table, TableKind, TaskReport};
pub use run::run;
