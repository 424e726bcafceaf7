//! Exact symbolic verification of averaging for Poisson connections on
//! foliated charts with torus symmetry.
//!
//! The crate is layered bottom-up:
//!
//! * [`symcalc`]: the canonical coefficient ring (rational polynomials times
//!   trigonometric polynomials in group angles) with exact Haar averaging.
//! * [`geom`]: forms, multivector fields, vector-valued forms, and the Lie,
//!   Schouten and Frölicher–Nijenhuis brackets.
//! * [`foliation`]: Ehresmann connections given by horizontal frames,
//!   bigrading, covariant exterior derivative and curvature.
//! * [`poisson`]: vertical Poisson bivectors and the braided wedge `{Q∧β}_P`.
//! * [`action`]: torus actions with explicit flows, averaging, the
//!   connection difference form and the Hannay–Berry connection.
//! * [`hamcurv`]: Hamiltonian curvature forms, admissibility, the
//!   de Rham–Casimir differential and the adiabatic condition.
//! * [`dirac`]: Courant calculus and coupling Dirac structures.
//! * [`scenario`] and [`pipeline`]: JSON scenario files and the staged
//!   verification report used by the command-line tool.

pub mod action;
pub mod dirac;
mod error;
pub mod foliation;
pub mod geom;
pub mod hamcurv;
pub mod pipeline;
pub mod poisson;
pub mod scenario;
pub mod symcalc;
mod verdict;

pub use error::{Error, Result};
pub use verdict::{Verdict, Witness};
