//! Feasibility tests and explicit smooth witnesses for the moment problem
//!
//! ```text
//! find f on [0,1], f(0)=0, f(1)=1, Df > 0, with
//!     I f(1) = a,   I^2 f(1) = b,   I^3 f(1) = c
//! ```
//!
//! where `I` is integration from 0. [`region`] decides which triples are
//! attainable, [`construct`] builds an explicit piecewise-smooth witness for
//! a strictly feasible triple, and [`wn`] lifts both to endpoint data of
//! higher-order problems.
//!
//! All curves are carried in the [`curve::Curve`] representation, which has a
//! lossless JSON form (`curve/1`).

// `!(x < y)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod construct;
pub mod corner;
pub mod curve;
mod error;
pub mod formats;
pub mod hkernel;
pub mod jets;
mod poly;
mod quad;
pub mod region;
pub mod stepfn;
pub mod wn;

pub use error::{Error, Result};
pub use poly::Poly;
pub use quad::{adaptive_gauss_legendre, gauss_legendre};
