//! File formats and command implementations for the `quasifit` tool.
//!
//! Data files are CSV with a header. Design coordinates are the columns
//! `x1..xd`, responses are `y`, and an optional `w` column holds positive
//! weights; any other column is ignored. Fitted models are JSON documents
//! tagged with [`model_file::FORMAT_VERSION`].

pub mod cli;
pub mod commands;
pub mod error;
pub mod io;
pub mod model_file;

pub use error::{CliError, CliResult};
pub use quasifit_core as core;
