//! Library backing the `geodescent` command-line tool: configuration
//! loading, instance/trace/report file formats, SVG rendering, and the
//! subcommand implementations. The binary in `main.rs` is a thin argument
//! parser over [`commands`].

pub mod commands;
pub mod config;
pub mod csvio;
pub mod error;
pub mod instancefile;
pub mod svg;

pub use commands::{
    cmd_certify, cmd_generate, cmd_plot, cmd_run, CertifyPlan, CertifySummary, GeneratePlan,
    PlotPlan, RunPlan, RunSummary,
};
pub use error::{CliError, Result, EXIT_CERTIFICATION_FAILURE, EXIT_USAGE};
