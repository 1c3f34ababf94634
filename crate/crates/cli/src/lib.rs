//! Command-line front end for `prspace`: reads prediction files and writes
//! JSON or CSV reports and SVG plots.

pub mod commands;
pub mod error;
pub mod format;
pub mod input;
pub mod plot;

pub use commands::{run, Cli};
pub use error::{CliError, Result};
