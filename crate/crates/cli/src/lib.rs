//! Front-end for `modlie`: expression parsing, run configuration and the
//! batch commands behind the `modlie` binary.

pub mod commands;
pub mod config;
pub mod expr;
pub mod subalg;

pub use commands::{run, Command, Outcome, RepChoice};
pub use config::{ConfigError, RunConfig};
pub use expr::{parse, parse_in, print, Expr, ExprError};
