//! Numerical toolkit for the q-deformed oscillator on the quantum line.
//!
//! The crate is layered bottom up: [`qcore`] and [`qhyper`] provide
//! q-calculus primitives and basic hypergeometric series, [`lattice`]
//! the representation space, [`oscillator`] the operators and spectrum,
//! [`eigenbasis`] the eigenfunctions with their norms, and [`verify`]
//! the numerical checks that tie everything together.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod numeric;
pub mod qcore;
pub mod qhyper;
pub mod lattice;
pub mod oscillator;
pub mod eigenbasis;
pub mod verify;

pub use error::{Error, Result};
pub use numeric::{CompensatedSum, Scaled};
pub use qcore::{QParams, Tolerance};
