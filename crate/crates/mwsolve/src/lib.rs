//! Exact and certified numerics for the two-scale averaging equation
//!
//! ```text
//! phi(x) = phi(x/2) + phi((x+1)/2) - phi(1/2),   phi(0) = 0, phi(1) = 1,
//! ```
//!
//! on increasing continuous `phi: [0,1] -> [0,1]` (the MW problem, after
//! Matkowski and Wesolowski). The crate constructs every solution family it
//! knows how to build — de Rham curves, Cantor-type averages of IFS
//! distribution functions, integral mixtures, convex combinations and finite
//! series — evaluates them exactly on dyadic rationals, certifies enclosures
//! everywhere else, and exposes the moment-sequence diagnostics that separate
//! integral-form solutions from the rest.
//!
//! Everything is big-integer rational arithmetic; nothing rounds.

pub mod derham;
pub mod error;
pub mod harness;
pub mod ifs;
pub mod moments;
pub mod numerics;
pub mod solutions;

pub use error::{Error, Result};
