//! Lévy-noise building blocks: variance-gamma and Student-t laws, their
//! transition densities, the Student-t mixture representation, Lévy
//! triplets, and Lévy-driven Ornstein–Uhlenbeck simulation.

// `!(x > 0.0)` is the NaN-rejecting form; long literals are published coefficients.
#![allow(
    clippy::neg_cmp_op_on_partial_ord,
    clippy::excessive_precision,
    clippy::needless_range_loop
)]

pub mod cli;
pub mod error;
pub mod laws;
pub mod mixture;
pub mod process;
pub mod quad;
pub mod simulate;
pub mod specfun;
pub mod triplet;
pub mod verify;

pub use error::{Error, Result};
