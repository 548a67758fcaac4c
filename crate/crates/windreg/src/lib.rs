//! Wind-turbine power regression benchmark: dataset tooling, model
//! persistence, report emission, and the `windreg` command-line interface.
//!
//! The numeric building blocks (regressors, metrics, cross-validation) live
//! in [`windreg_core`]; this crate adds everything that touches files,
//! timestamps, or a terminal.

#![forbid(unsafe_code)]

pub mod cli;
pub mod dataset;
pub mod modelfile;
pub mod report;
