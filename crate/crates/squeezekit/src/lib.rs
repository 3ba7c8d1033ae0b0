//! Command line driver and file formats around `squeezekit-core`.

pub mod atomfile;
pub mod cli;
pub mod compare;
pub mod config;
pub mod ensemble;
pub mod error;
pub mod output;
pub mod reproduce;
pub mod runconfig;

pub use error::{CliError, Result};
