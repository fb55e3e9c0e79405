//! File formats, plots, the acceptance suite and the subcommands behind the
//! `rotlab` binary.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod acceptance;
pub mod commands;
pub mod error;
pub mod output;
pub mod spec_file;

pub use error::{CliError, CliResult};
