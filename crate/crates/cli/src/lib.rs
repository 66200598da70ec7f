//! Library side of the `ingham` command-line tool: config and report schemas, the command
//! implementations and the output encoders.

pub mod commands;
pub mod error;
pub mod output;
pub mod scan;

pub use commands::{dispatch, Command, Target};
pub use error::CliError;
pub use output::{Envelope, ErrorEnvelope, Format, RunContext};
