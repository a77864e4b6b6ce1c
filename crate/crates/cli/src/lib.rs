//! Command-line companion to `modpm-core`: a small expression language for
//! naming level-1 forms, a JSON wire format for eigensystem records, a
//! content-addressed record store, and the `modpm` subcommands themselves.
//!
//! Exit-code contract shared by every subcommand:
//! 0 = success, 1 = mathematical finding (not an eigenform, no occurrence,
//! no congruent pair), 2 = usage problem, 3 = internal precision failure.

pub mod cmd;
pub mod expr;
pub mod records;
pub mod store;

pub use cmd::{run, Cli};
