//! Magnetic geodesic flow on the round sphere `S^{2n+1} ⊂ C^{n+1}` with the
//! magnetic field given by the differential of the standard contact form.
//!
//! The crate is organised by capability:
//!
//! - [`geom`]: ambient complex linear algebra, unit tangent states, the
//!   contact form, the Reeb field and the Lorentz force.
//! - [`closed_form`]: explicit magnetic geodesics on Clifford tori.
//! - [`oracle`]: fixed-step RK4 integration of the geodesic equations, drift
//!   diagnostics and the free-period loop action.
//! - [`connectivity`]: the two-point problem (chord law, energy
//!   classification, boundary lattice, constructive solver).
//! - [`hopf`]: projection to `S^2(1/2)`, projected circles and restricted
//!   primitives around a Hopf fibre.
//! - [`symmetry`]: unitary magnetomorphisms, the moment map and totally
//!   magnetic subspaces.
//! - [`mane`]: the Mañé critical value and Mather set of the system.
//! - [`cli`]: the command-line front end used by the `magflow` binary.
//!
//! Hermitian products are conjugate-linear in the second slot:
//! `⟨a, b⟩ = Σ a_j · conj(b_j)`.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod closed_form;
pub mod connectivity;
mod error;
pub mod geom;
pub mod hopf;
pub mod mane;
pub mod oracle;
pub mod sampling;
pub mod symmetry;

pub use error::{Error, Result};
pub use num_complex::Complex64 as C64;
