//! Exact magnitude, magnitude homology, blurred magnitude homology and
//! Vietoris–Rips persistence for finite quasi-pseudo-metric spaces.
//!
//! All distances are exact rationals. Magnitude is computed as a rational
//! function in `q`, magnitude homology over the integers, and persistence
//! barcodes over a prime field.

pub mod chain;
pub mod cli;
pub mod error;
pub mod filtration;
pub mod homology;
pub mod io;
pub mod limits;
pub mod magnitude;
pub mod metric;
pub mod persistence;
pub mod snf;

pub use error::{Error, ErrorKind, Result};
pub use metric::{ExtRational, FiniteMetricSpace, Flag, Tuple};
