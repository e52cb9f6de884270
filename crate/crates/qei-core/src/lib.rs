//! Numerical laboratory for the free Klein–Gordon field on static,
//! spatially compact `1+1` dimensional spacetimes `R × S¹`.
//!
//! The crate is `no_std` (it needs `alloc`) and contains only pure numerics:
//!
//! * [`mode_catalog`]: spatial mode decompositions, analytic on the
//!   ultrastatic cylinder and by finite differences for general static metrics.
//! * [`states`]: quasifree and finitely excited states in mode space, plus
//!   truncated Fock-space realizations of fields, Weyl operators and smearing.
//! * [`energy_density`]: normal-ordered point-split energy density, smeared and
//!   integrated energies, and the generator identity on truncations.
//! * [`qwei`]: atomic spectral measures of the pulled-back reference energy
//!   density, the `Q`, `q` and integrated `Q` functions, limiting constants and
//!   static energy inequality margins.
//! * [`passivity`]: derivations, unitary words, cyclic processes and work.
//! * [`microlocal`]: windowed Fourier decay probes and Hadamard cone geometry.
//!
//! IO, configuration, randomized campaigns and the CLI live in the `qei` crate.

#![no_std]
// `Float` supplies libm-backed methods on toolchains where core lacks them.
#![allow(unused_imports)]

extern crate alloc;

pub mod energy_density;
pub mod error;
pub mod fit;
pub mod linalg;
pub mod microlocal;
pub mod mode_catalog;
pub mod passivity;
pub mod quadrature;
pub mod qwei;
pub mod states;
pub mod window;

pub use error::{Error, Result};

/// Complex scalar used throughout.
pub type C64 = num_complex::Complex64;

/// Dense complex matrix (Fock-space operators).
pub type CMat = nalgebra::DMatrix<C64>;

/// Dense complex vector (Fock-space state vectors).
pub type CVec = nalgebra::DVector<C64>;

/// A value together with its numerical certificate.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Certified {
    pub value: f64,
    /// Estimated absolute error of `value` (quadrature step-halving, Parseval
    /// discrepancy or similar).
    pub error: f64,
}

impl Certified {
    pub fn new(value: f64, error: f64) -> Self {
        Self { value, error }
    }
}
