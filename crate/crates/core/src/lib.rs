//! Two-strain bacterial reaction–cross-diffusion model on a leaf surface.
//!
//! The crate is `no_std` and only needs `alloc`. It covers:
//!
//! * [`model`]: parameters, density-dependent coefficient laws, reaction
//!   kinetics, homogeneous equilibrium, Jacobian and the map from kinetic
//!   (microscopic) rates to macroscopic coefficients;
//! * [`stability`]: linearized diffusion matrix, dispersion relation,
//!   critical wavenumber and Turing thresholds with and without
//!   cross-diffusion;
//! * [`bifurcation`]: region classification and two-parameter sweeps;
//! * [`fem`]: crisscross triangulation, CSR matrices, P1 assembly and a
//!   preconditioned BiCGSTAB solver;
//! * [`timestepper`]: backward Euler with Picard linearization, seeded
//!   initial data and run diagnostics;
//! * [`kinetic`]: a 1D discrete-velocity relaxation solver used to check the
//!   diffusive-limit coefficients.
//!
//! File formats and the command-line tool live in the companion `phyllo`
//! crate.

#![no_std]
// Index loops mirror the math; negated comparisons are deliberate NaN guards.
#![allow(clippy::needless_range_loop, clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod bifurcation;
pub mod error;
pub mod fem;
pub mod kinetic;
pub mod model;
pub mod stability;
pub mod timestepper;

pub use error::{Error, Result};
pub use model::{CoeffSpec, DeltaRatio, ModelParams};
