//! Command-line front end for the `lasgap` library.
//!
//! Exit codes: 0 on success (gap certified, vector feasible, certificate
//! found), 1 when a checked condition fails, 2 on invalid input.

pub mod cli;
pub mod commands;
pub mod files;
pub mod report;

pub use cli::Cli;
pub use commands::{run, EXIT_FAILED, EXIT_OK, EXIT_USAGE};
