//! Command-line companion of [`sjk_core`]: JSON encoding of points, group
//! elements and reports, a parallel driver for the property fuzzer, and the
//! `sjk` command.

pub mod cli;
pub mod error;
pub mod json;
pub mod verify;

pub use error::CliError;
