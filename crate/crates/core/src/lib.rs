//! Regression models, error metrics and the validation protocol used by the
//! wind power benchmark.
//!
//! The crate is `no_std`-compatible (with `alloc`): enable the `libm` feature
//! instead of `std` to build for targets without a platform math library.
//! Dataset handling, file formats and the CLI live in the companion `windreg`
//! crate.
//!
//! ```
//! use windreg_core::validation::{cross_validate, kfold, MetricTag, RegressorSpec};
//! use windreg_core::Matrix;
//!
//! let features = Matrix::from_rows(&[
//!     [1.0, 4.2], [2.0, 3.1], [3.0, 5.0], [4.0, 4.4],
//!     [5.0, 3.6], [6.0, 4.9], [7.0, 4.1], [8.0, 4.7],
//! ]);
//! let target = vec![10.0, 13.9, 19.2, 22.8, 26.1, 30.2, 33.8, 38.1];
//! let folds = kfold(target.len(), 2, 42).unwrap();
//! let spec = RegressorSpec::linear(42);
//! let cv = cross_validate(&spec, &features, &target, &folds, MetricTag::Mae).unwrap();
//! println!("mean MAE: {:.3}", cv.average);
//! ```

#![cfg_attr(not(feature = "std"), no_std)]
#![forbid(unsafe_code)]

#[cfg(not(any(feature = "std", feature = "libm")))]
compile_error!("windreg-core requires either the `std` or the `libm` feature");

extern crate alloc;

pub mod float;
pub mod knn;
pub mod linear;
pub mod matrix;
pub mod metrics;
pub mod standardize;
pub mod stats;
pub mod tree;
pub mod validation;

pub use matrix::Matrix;
