//! Front end for lief: the `.lie` script format, its evaluator and the
//! bundled suites.

pub mod runner;
pub mod script;
pub mod suites;

pub use runner::{run, Report, RunOptions};
pub use script::{parse_script, FieldChoice, Script, ScriptError};
