//! IO, file formats and experiment harness for the `anytime` CLI.
//!
//! The algorithmic core lives in `anytime-core`; this crate adds the
//! archivable-experiment plumbing: JSON configs with flag overrides,
//! code/certificate file formats, CSV emission with config-echoing
//! headers, and the Monte Carlo exponent estimator.

pub mod commands;
pub mod config;
pub mod fit;
pub mod formats;
