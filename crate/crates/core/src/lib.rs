//! Finite-element kernels for the scalar Signorini (boundary obstacle) problem
//! in two dimensions.
//!
//! The crate is `no_std` (with `alloc`) and contains only the numerical core:
//!
//! - [`geometry`]: domain descriptors, structured triangulations, tubular
//!   frames along boundary segments, intrinsic boundary distance and the
//!   non-convexity indicator.
//! - [`fields`]: scalar data fields (expression language and a small catalog),
//!   the nonnegative obstacle extension and the force/flux balance checks.
//! - [`assembly`]: P1 stiffness, mass and load assembly plus the compatibility
//!   functional.
//! - [`solver`]: projected Gauss-Seidel, primal-dual active set and an
//!   exhaustive active-set oracle for the discrete variational inequality.
//! - [`barriers`]: explicit supersolutions, constant selection, pointwise
//!   verification and discrete comparison checks.
//! - [`coincidence`]: extraction and coverage of the discrete coincidence set.
//!
//! File formats, configuration and the command-line front end live in the
//! companion `signorini-lab` crate.

#![cfg_attr(not(feature = "std"), no_std)]
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::excessive_precision, clippy::needless_range_loop)]

extern crate alloc;

pub mod assembly;
pub mod barriers;
pub mod coincidence;
pub mod dense;
mod error;
pub mod fields;
pub mod geometry;
pub mod math;
pub mod solver;
pub mod sparse;

pub use error::{Error, Result};

/// Two-dimensional point or vector.
pub type Point = [f64; 2];
