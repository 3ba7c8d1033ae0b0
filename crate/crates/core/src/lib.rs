//! Spin squeezing of large-spin atoms coupled to a cavity through vector and
//! tensor light shifts.
//!
//! Everything here is `no_std` with `alloc`. File formats, the command line
//! and parallel ensembles live in the `squeezekit` crate.

#![no_std]

extern crate alloc;

pub mod atomic;
mod error;
pub mod moments;
pub mod noise;
mod ode;
pub mod oracle;
pub mod params;
pub mod stochastic;

pub use error::Error;

pub type Result<T> = core::result::Result<T, Error>;

pub(crate) const TWO_PI: f64 = 2.0 * core::f64::consts::PI;
