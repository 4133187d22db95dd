use core::fmt;

use crate::expr::EvalError;

/// Errors raised by the solver library.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// Fewer intervals than the smallest supported grid.
    GridTooSmall { intervals: usize, min: usize },
    /// A value sequence does not match the grid.
    LengthMismatch { expected: usize, found: usize },
    /// A sampled or computed value is NaN or infinite.
    NonFinite { index: usize, x: f64 },
    /// Restriction needs an even interval count on the fine grid.
    OddIntervalCount(usize),
    /// Two grid functions are not on nested grids.
    NotNested { coarse: usize, fine: usize },
    /// The stencil needs more nodes than the grid provides.
    StencilTooWide { deriv: usize, accuracy: usize, intervals: usize },
    /// The stencil window leaves `[0, N]` at this index.
    StencilOutOfRange { index: usize, intervals: usize },
    /// An operator was called with a plan for the other beta case.
    WrongBetaCase(&'static str),
    /// Invalid problem or kernel parameter.
    InvalidParameter(&'static str),
    /// Kernel argument outside `(0, 1]`.
    OutsideDomain { x: f64, t: f64 },
    /// The right-hand side failed at a node.
    RhsEvaluation { x: f64, u: f64, source: EvalError },
    /// The right-hand side returned a non-finite value at a node.
    NonFiniteRhs { x: f64, u: f64 },
    /// The fixed-point iteration diverged on a sweep level.
    Diverged { intervals: usize },
    /// A sweep level failed.
    SweepLevel {
        intervals: usize,
        source: alloc::boxed::Box<Error>,
    },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::GridTooSmall { intervals, min } => {
                write!(f, "N must be >= {min} (got {intervals})")
            }
            Error::LengthMismatch { expected, found } => {
                write!(f, "expected {expected} grid values, found {found}")
            }
            Error::NonFinite { index, x } => {
                write!(f, "non-finite value at node {index} (x = {x})")
            }
            Error::OddIntervalCount(n) => {
                write!(f, "cannot restrict a grid with an odd interval count ({n})")
            }
            Error::NotNested { coarse, fine } => {
                write!(f, "grids with N = {coarse} and N = {fine} are not nested")
            }
            Error::StencilTooWide {
                deriv,
                accuracy,
                intervals,
            } => write!(
                f,
                "a stencil for derivative {deriv} with accuracy {accuracy} needs {} nodes, grid has {}",
                deriv + accuracy,
                intervals + 1
            ),
            Error::StencilOutOfRange { index, intervals } => {
                write!(f, "stencil window at index {index} leaves [0, {intervals}]")
            }
            Error::WrongBetaCase(what) => write!(f, "quadrature plan has the wrong beta case: {what}"),
            Error::InvalidParameter(what) => write!(f, "invalid parameter: {what}"),
            Error::OutsideDomain { x, t } => {
                write!(f, "kernel arguments must lie in (0, 1], got x = {x}, t = {t}")
            }
            Error::RhsEvaluation { x, u, source } => {
                write!(f, "right-hand side failed at (x, u) = ({x}, {u}): {source}")
            }
            Error::NonFiniteRhs { x, u } => {
                write!(f, "right-hand side is not finite at (x, u) = ({x}, {u})")
            }
            Error::Diverged { intervals } => write!(f, "iteration diverged at N = {intervals}"),
            Error::SweepLevel { intervals, source } => write!(f, "N = {intervals}: {source}"),
        }
    }
}
impl core::error::Error for Error {
    fn source(&self) -> Option<&(dyn core::error::Error + 'static)> {
        match self {
            Error::SweepLevel { source, .. } => Some(source.as_ref()),
            _ => None,
        }
    }
}
