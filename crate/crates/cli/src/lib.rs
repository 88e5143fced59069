//! Command-line front end: file formats, reports and command dispatch.

pub mod args;
pub mod format;
pub mod report;
pub mod run;

pub use args::{Cli, Command, Format, Opts};
pub use run::{run, Outcome};
