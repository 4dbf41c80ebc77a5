//! Command-line front end for `meerr-core`: scenario documents, report
//! tables and the `theory`, `simulate`, `compare` and `sweep` commands.

pub mod config;
pub mod report;
pub mod run;

pub use config::{
    emit, parse_config, ConfigError, EntryKind, EstimatorEntry, Scenario, SchemaIssue,
};
pub use report::{format_number, Cell, Format, Table};
pub use run::{
    compare_report, compare_table, run, run_scenario, simulate_stats, simulate_table, sweep_table,
    theory_table, Axis, Command, Outcome, RunConfig, RunError, Sweep, EXIT_COMPARISON_FAILED,
    EXIT_ERROR, EXIT_OK,
};
