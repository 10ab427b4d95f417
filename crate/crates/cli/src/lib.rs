//! Library behind the `multirec` binary: rendering, named words, the figure
//! harness and the subcommands.

pub mod commands;
pub mod error;
pub mod figures;
pub mod presets;
pub mod render;

pub use commands::{run, Cli};
pub use error::{CliError, CliResult};
