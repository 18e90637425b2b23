//! File formats, configuration and command-line plumbing around `spinroute-core`.

pub use spinroute_core as core;

pub mod codefile;
pub mod config;
pub mod error;
pub mod run;
pub mod schedule_io;

pub use error::{Error, Result};
