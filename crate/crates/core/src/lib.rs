//! Quasiconformal maps on uniform square grids.
//!
//! Two independent constructions of the normalized solution of
//! `∂z̄Φ = μ ∂zΦ` are provided: a Neumann series for the Beurling transform
//! ([`neumann`]) and a weak Hodge-star solve followed by exponentiation
//! ([`variational`]). [`verify`] cross-checks them.

pub mod demo;
pub mod error;
mod fft;
pub mod grid;
pub mod hodge;
pub mod kernel;
pub mod neumann;
pub mod operators;
pub mod render;
pub mod solution;
pub mod solver;
pub mod variational;
pub mod verify;

pub use error::{Error, Result};
pub use grid::{ComplexField, GridSpec, OneForm, RealField};
pub use num_complex::Complex64;
