//! Command-line front end for towers of function algebras: a small script
//! language, run configuration, the statement runner and its report.

pub mod config;
pub mod golden;
pub mod runner;
pub mod script;

pub use config::{FileConfig, RunConfig};
pub use runner::{emit_outputs, run_script, ExitKind, RunReport};
pub use script::{parse_script, ProblemScript, ScriptError};
