//! Command-line front end for `cartier-core`: descriptor and expression
//! parsing, command dispatch and report rendering.

pub mod commands;
pub mod descriptor;
pub mod error;
pub mod eval;
pub mod parse;
pub mod report;

pub use commands::{run, Cli, Command, Format};
pub use error::{CliError, CliResult};
pub use report::Report;
