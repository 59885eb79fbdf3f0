//! Session documents for `hermsig`: parsing, rendering and execution.

pub mod expr;
pub mod run;
pub mod session;

pub use run::{run, Record, RecordError, Report, RunOptions};
pub use session::{parse_session, render, Diagnostic, Loc, Op, SessionDocument};
