//! Eighth-order discrete iterative solvers for the singular Lane-Emden
//! boundary value problem
//!
//! ```text
//! u'' + (beta/x) u' = f(x, u),   0 < x <= 1,   u'(0) = 0,   u(1) = alpha
//! ```
//!
//! (or the Robin condition `mu u(1) + sigma u'(1) = alpha`).
//!
//! The solution is written through the Green's function of the linear
//! operator and the source `phi = f(x, u)` is found by fixed-point iteration.
//! Each weighted integral of the representation is evaluated by the
//! trapezoid rule with Euler-Maclaurin endpoint corrections up to `h^6`,
//! whose endpoint derivatives come from finite-difference stencils. The
//! resulting schemes are eighth-order accurate.
//!
//! The crate is `no_std` (it needs `alloc`) and generic over the scalar
//! type: `f64` or the bundled [`DoubleDouble`].

#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

mod dd;
pub mod error;
pub mod scalar;

pub mod bench;
pub mod expr;
pub mod grid;
pub mod greens;
pub mod problems;
pub mod quadrature;
pub mod solver;
pub mod stencil;

pub use crate::error::Error;
pub use crate::grid::{GridFunction, UniformGrid};
pub use crate::scalar::{DoubleDouble, Precision, Real};
pub use crate::solver::{
    solve, Beta, Boundary, ProblemSpec, SolveConfig, SolveReport, Termination,
};
