//! Sampling-density diagnostics for scattered data.
//!
//! A function is sampled at an increasing number of random points. At each
//! step its Delaunay piecewise-linear interpolant is evaluated on a fixed
//! set of query points, and the rate at which successive interpolants (and
//! their gradients) stop changing is reported. Rates near 2 (1 for
//! gradients) mean the sampling resolves the function's features; rates
//! near 0 (-1 for gradients) mean the samples cannot tell the function
//! apart from noise.

// `!(x > y)` is used on purpose so that NaN fails the check.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod diagnostic;
pub mod error;
pub mod geometry;
pub mod gradient;
pub mod report;
pub mod sampling;
pub mod testbed;

pub use error::{Error, GeometryError, Result};
