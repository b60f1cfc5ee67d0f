//! Local statistics of the fractional parts of `sqrt(n)`.
//!
//! * [`seq`] generates the sorted point sets `sqrt(n) mod 1` and `n^a mod 1`.
//! * [`stats`] computes scaled gaps, pair correlation, windowed counts and
//!   their joint distribution and mixed moments.
//! * [`lattice`] models random affine lattices: Iwasawa coordinates, the
//!   group action, triangle counts, Haar sampling, the limiting counting
//!   process and the cusp majorant used to rule out escape of mass.
//! * [`numth`] holds exact arithmetic: totient, divisor counts, Jacobi
//!   symbols, quadratic Gauss sums and the coprime sum behind the escape
//!   estimate.
//! * [`cli`] drives everything from the command line.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod error;
pub mod interval;
pub mod lattice;
pub mod numeric;
pub mod numth;
pub mod seq;
pub mod stats;

pub use error::{Error, Result};
pub use interval::{Interval, IntervalBox};
pub use seq::FracSequence;
