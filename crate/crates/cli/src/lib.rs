//! Configuration, CSV output and the `phyllo` command-line tool built on
//! [`phyllo_core`].

pub mod cli;
pub mod config;
pub mod output;

pub use config::{ConfigError, RunConfig};
