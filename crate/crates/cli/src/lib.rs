//! Command-line front end for `dissim-core`: TOML run configurations,
//! subcommand dispatch, CSV trajectories and JSON reports.

pub mod config;
pub mod error;
pub mod pauli;
pub mod run;

pub use config::{parse_config, to_toml, RunConfig};
pub use error::{CliError, CliResult};
pub use run::{run, Command, RunOutcome};
