//! Mechanics on the noncommutative plane: deformed Poisson brackets, the NC
//! oscillator, its spectrum and Wigner functions, and Einstein-solid
//! thermodynamics.

// `!(x > 0.0)` is used on purpose so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod classical;
pub mod cli;
pub mod config;
pub mod dual;
pub mod error;
pub mod oracles;
pub mod params;
pub mod phasespace;
pub mod selftest;
pub mod quantum;
pub mod symmetry;
pub mod thermo;
pub mod wigner;

pub use error::{Error, Result};
pub use params::NCParams;
