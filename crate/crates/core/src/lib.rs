//! Computable core of the order completion method.
//!
//! The crate models nearly finite normal lower semi-continuous (NLSC)
//! functions in two ways:
//!
//! * [`grid::GridFn`]: extended-real samples on a uniform grid, with the
//!   discrete lower/upper Baire envelopes and their compositions;
//! * [`pw::PwPoly`] / [`pw::PwExpr`]: exact piecewise polynomials on
//!   axis-aligned cell complexes, evaluated with incident-cell minimum
//!   semantics, which is the continuum `I∘S` regularization.
//!
//! On top of these sit the Dedekind lattice operations and order
//! convergence checks ([`lattice`]), a small expression language for
//! nonlinear PDE operators ([`pde`]) and the constructive band solver
//! ([`solve`]) that glues local Taylor patches into certified
//! ε-approximate solutions.
//!
//! Everything here is `no_std` + `alloc`; file formats, threading and the
//! command line live in the companion `ordcomp` crate.
#![no_std]
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod error;
pub mod geom;
pub mod grid;
pub mod lattice;
pub mod pde;
pub mod poly;
pub mod pw;

pub mod solve;
pub mod xreal;

pub use error::{Error, Result};
pub use geom::{bisect, monomial_eval, sample_cells, AxisBox, MultiIndex, Point, SampleSet};
pub use xreal::XReal;
