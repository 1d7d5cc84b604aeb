//! File formats, JSON reports, the benchmark harness and the command line
//! for `lapsolve-core`.

pub mod bench;
pub mod cli;
pub mod error;
pub mod io;
pub mod report;

pub use error::{CliError, CliResult};
