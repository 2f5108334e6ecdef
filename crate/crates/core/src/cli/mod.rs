//! Command-line front end: curve documents, the bundled catalog, command
//! dispatch and report rendering.

pub mod catalog;
pub mod document;
pub mod run;

pub use document::CurveDocument;
pub use run::{emit, exit_code, run, Command, Format, Report, RunConfig, Status};
