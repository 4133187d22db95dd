//! Uniform grids on `[0, 1]` and functions sampled on them.

use alloc::vec::Vec;
use core::ops::Index;

use crate::error::Error;
use crate::scalar::Real;

/// `N + 1` equispaced nodes `x_i = i / N` on `[0, 1]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct UniformGrid<S> {
    intervals: usize,
    h: S,
}

impl<S: Real> UniformGrid<S> {
    /// Smallest grid on which every 7-point stencil fits.
    pub const MIN_INTERVALS: usize = 8;

    pub fn new(intervals: usize) -> Result<Self, Error> {
        if intervals < Self::MIN_INTERVALS {
            return Err(Error::GridTooSmall {
                intervals,
                min: Self::MIN_INTERVALS,
            });
        }
        Ok(UniformGrid {
            intervals,
            h: S::one() / S::from_i64(intervals as i64),
        })
    }

    /// Interval count `N`.
    pub fn intervals(&self) -> usize {
        self.intervals
    }

    /// Node count `N + 1`.
    pub fn len(&self) -> usize {
        self.intervals + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn h(&self) -> S {
        self.h
    }

    /// `x_i`, computed directly from the index so that `x_N == 1`.
    pub fn node(&self, i: usize) -> S {
        S::from_i64(i as i64) / S::from_i64(self.intervals as i64)
    }

    pub fn nodes(&self) -> Vec<S> {
        (0..=self.intervals).map(|i| self.node(i)).collect()
    }
}

/// Values `g(x_i)` of a function on a uniform grid.
#[derive(Clone, Debug, PartialEq)]
pub struct GridFunction<S> {
    grid: UniformGrid<S>,
    values: Vec<S>,
}

impl<S: Real> GridFunction<S> {
    pub fn new(grid: UniformGrid<S>, values: Vec<S>) -> Result<Self, Error> {
        if values.len() != grid.len() {
            return Err(Error::LengthMismatch {
                expected: grid.len(),
                found: values.len(),
            });
        }
        if let Some(index) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite {
                index,
                x: grid.node(index).to_f64(),
            });
        }
        Ok(GridFunction { grid, values })
    }

    pub fn zeros(grid: UniformGrid<S>) -> Self {
        GridFunction {
            grid,
            values: alloc::vec![S::zero(); grid.len()],
        }
    }

    pub fn constant(grid: UniformGrid<S>, c: S) -> Self {
        GridFunction {
            grid,
            values: alloc::vec![c; grid.len()],
        }
    }

    /// Samples `g` at every node; fails at the first non-finite value.
    pub fn sample(grid: UniformGrid<S>, g: impl Fn(S) -> S) -> Result<Self, Error> {
        let mut values = Vec::with_capacity(grid.len());
        for i in 0..grid.len() {
            let x = grid.node(i);
            let v = g(x);
            if !v.is_finite() {
                return Err(Error::NonFinite {
                    index: i,
                    x: x.to_f64(),
                });
            }
            values.push(v);
        }
        Ok(GridFunction { grid, values })
    }

    pub fn grid(&self) -> &UniformGrid<S> {
        &self.grid
    }

    pub fn values(&self) -> &[S] {
        &self.values
    }

    pub fn into_values(self) -> Vec<S> {
        self.values
    }

    /// `max_i |g_i|`
    pub fn max_norm(&self) -> S {
        self.values
            .iter()
            .fold(S::zero(), |m, v| m.max(v.abs()))
    }

    /// Pointwise combination with another function on the same grid.
    pub fn zip_map(&self, other: &GridFunction<S>, f: impl Fn(S, S) -> S) -> Result<Self, Error> {
        if other.grid.intervals != self.grid.intervals {
            return Err(Error::LengthMismatch {
                expected: self.values.len(),
                found: other.values.len(),
            });
        }
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(&a, &b)| f(a, b))
            .collect();
        GridFunction::new(self.grid, values)
    }

    pub fn map(&self, f: impl Fn(S) -> S) -> Result<Self, Error> {
        GridFunction::new(self.grid, self.values.iter().map(|&v| f(v)).collect())
    }

    /// `||self - other||_inf`
    pub fn max_diff(&self, other: &GridFunction<S>) -> Result<S, Error> {
        Ok(self.zip_map(other, |a, b| a - b)?.max_norm())
    }

    /// Keeps the even-indexed values of a function on a `2N` grid.
    pub fn restrict_to_coarse(&self) -> Result<Self, Error> {
        let fine = self.grid.intervals;
        if fine % 2 != 0 {
            return Err(Error::OddIntervalCount(fine));
        }
        let grid = UniformGrid::new(fine / 2)?;
        let values = self.values.iter().step_by(2).copied().collect();
        Ok(GridFunction { grid, values })
    }
}

impl<S> Index<usize> for GridFunction<S> {
    type Output = S;

    fn index(&self, i: usize) -> &S {
        &self.values[i]
    }
}
