//! Nonclassicality of single-mode bosonic states under thermal-loss noise.
//!
//! A state is called nonclassical when its Glauber-Sudarshan P-function is
//! not a probability density. The crate provides
//!
//! - [`states`]: state specs, Fock-basis density matrices, normally ordered
//!   characteristic functions and s-parameterized distributions;
//! - [`channel`]: the thermal-loss channel in both representations;
//! - [`witness`]: Gaussian and discrete witness functions and the
//!   noise-compensated Gaussian witness;
//! - [`bochner`]: the discrete Bochner positive-definiteness test;
//! - [`homodyne`]: unbalanced-homodyne counting statistics and the
//!   reconstruction series.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bochner;
pub mod channel;
mod error;
pub mod grid;
pub mod homodyne;
pub(crate) mod special;
pub mod states;
pub mod witness;

pub use error::{Error, Result};
pub use grid::PhaseGrid;
