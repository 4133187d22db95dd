//! Finite-difference approximations `D_m^(n)` of the n-th derivative with
//! accuracy order m on a uniform grid.
//!
//! A stencil uses exactly `n + m` consecutive nodes. The window is centered
//! on the evaluation index when it fits (even widths put the extra node on
//! the left) and is otherwise shifted to stay inside `[0, N]`, which makes
//! it one-sided at the ends. Weights are computed exactly as rationals by
//! differentiating the Lagrange basis polynomials of the integer offsets and
//! are converted to the scalar type only once.

use alloc::vec::Vec;

use crate::error::Error;
use crate::grid::{GridFunction, UniformGrid};
use crate::scalar::Real;

/// Weights of one finite-difference formula, in units of `1/h^n`.
#[derive(Clone, Debug, PartialEq)]
pub struct Stencil<S> {
    deriv: usize,
    accuracy: usize,
    /// Offset of the first node relative to the evaluation index.
    first: isize,
    weights: Vec<S>,
}

fn gcd(mut a: i64, mut b: i64) -> i64 {
    a = a.abs();
    b = b.abs();
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

/// Exact weights `(numerator, denominator)` of the derivative of order
/// `deriv` at offset 0 for the interpolant through `offsets`.
pub(crate) fn rational_weights(offsets: &[i64], deriv: usize) -> Vec<(i64, i64)> {
    let w = offsets.len();
    let fact: i64 = (1..=deriv as i64).product();
    (0..w)
        .map(|j| {
            // coefficients of prod_{k != j} (x - o_k), lowest degree first
            let mut poly: Vec<i64> = alloc::vec![1];
            let mut den: i64 = 1;
            for (k, &ok) in offsets.iter().enumerate() {
                if k == j {
                    continue;
                }
                let mut next = alloc::vec![0i64; poly.len() + 1];
                for (d, &c) in poly.iter().enumerate() {
                    next[d + 1] += c;
                    next[d] -= ok * c;
                }
                poly = next;
                den *= offsets[j] - ok;
            }
            let num = poly.get(deriv).copied().unwrap_or(0) * fact;
            let g = gcd(num, den).max(1);
            let (mut num, mut den) = (num / g, den / g);
            if den < 0 {
                num = -num;
                den = -den;
            }
            (num, den)
        })
        .collect()
}

/// First node of the window for evaluation index `i`.
fn window_start(width: usize, i: usize, intervals: usize) -> usize {
    let last_start = intervals + 1 - width;
    i.saturating_sub(width / 2).min(last_start)
}

impl<S: Real> Stencil<S> {
    /// Builds `D_accuracy^(deriv)` for evaluation at index `i` of an
    /// `intervals`-interval grid.
    pub fn new(deriv: usize, accuracy: usize, i: usize, intervals: usize) -> Result<Self, Error> {
        if deriv == 0 || accuracy == 0 {
            return Err(Error::InvalidParameter(
                "stencil derivative and accuracy orders must be >= 1",
            ));
        }
        let width = deriv + accuracy;
        if width > intervals + 1 {
            return Err(Error::StencilTooWide {
                deriv,
                accuracy,
                intervals,
            });
        }
        if i > intervals {
            return Err(Error::StencilOutOfRange { index: i, intervals });
        }
        let start = window_start(width, i, intervals);
        let first = start as isize - i as isize;
        let offsets: Vec<i64> = (0..width as i64).map(|j| first as i64 + j).collect();
        let weights = rational_weights(&offsets, deriv)
            .into_iter()
            .map(|(n, d)| S::ratio(n, d))
            .collect();
        Ok(Stencil {
            deriv,
            accuracy,
            first,
            weights,
        })
    }

    pub fn deriv(&self) -> usize {
        self.deriv
    }

    pub fn accuracy(&self) -> usize {
        self.accuracy
    }

    pub fn width(&self) -> usize {
        self.weights.len()
    }

    /// Node offsets relative to the evaluation index.
    pub fn offsets(&self) -> impl Iterator<Item = isize> + '_ {
        (0..self.weights.len() as isize).map(move |j| self.first + j)
    }

    pub fn weights(&self) -> &[S] {
        &self.weights
    }

    /// `sum_j w_j g[i + o_j] / h^n`
    pub fn apply(&self, g: &GridFunction<S>, i: usize) -> Result<S, Error> {
        let n = g.grid().intervals();
        let start = i as isize + self.first;
        let end = start + self.weights.len() as isize - 1;
        if start < 0 || end > n as isize {
            return Err(Error::StencilOutOfRange { index: i, intervals: n });
        }
        Ok(self.apply_slice(g.values(), start as usize, n))
    }

    fn apply_slice(&self, values: &[S], start: usize, intervals: usize) -> S {
        let mut acc = S::zero();
        for (w, v) in self.weights.iter().zip(&values[start..]) {
            acc += *w * *v;
        }
        acc * S::from_i64(intervals as i64).powi(self.deriv as i32)
    }
}

/// All windows of one `D_m^(n)` on a fixed grid, indexed by the position
/// of the evaluation node inside the window.
#[derive(Clone, Debug)]
pub struct StencilFamily<S> {
    deriv: usize,
    accuracy: usize,
    intervals: usize,
    by_position: Vec<Vec<S>>,
    scale: S,
}

impl<S: Real> StencilFamily<S> {
    pub fn new(deriv: usize, accuracy: usize, grid: &UniformGrid<S>) -> Result<Self, Error> {
        let intervals = grid.intervals();
        let width = deriv + accuracy;
        // construct once to validate the orders against the grid
        Stencil::<S>::new(deriv, accuracy, 0, intervals)?;
        let by_position = (0..width)
            .map(|pos| {
                let offsets: Vec<i64> = (0..width as i64).map(|j| j - pos as i64).collect();
                rational_weights(&offsets, deriv)
                    .into_iter()
                    .map(|(n, d)| S::ratio(n, d))
                    .collect()
            })
            .collect();
        Ok(StencilFamily {
            deriv,
            accuracy,
            intervals,
            by_position,
            scale: S::from_i64(intervals as i64).powi(deriv as i32),
        })
    }

    pub fn deriv(&self) -> usize {
        self.deriv
    }

    pub fn accuracy(&self) -> usize {
        self.accuracy
    }

    /// Derivative estimate at node `i` from the node values.
    pub fn at(&self, values: &[S], i: usize) -> S {
        let width = self.deriv + self.accuracy;
        let start = window_start(width, i, self.intervals);
        let weights = &self.by_position[i - start];
        let mut acc = S::zero();
        for (w, v) in weights.iter().zip(&values[start..]) {
            acc += *w * *v;
        }
        acc * self.scale
    }

    /// Derivative estimates at every node.
    pub fn all(&self, values: &[S]) -> Vec<S> {
        (0..=self.intervals).map(|i| self.at(values, i)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::DoubleDouble;
    use alloc::vec;

    #[test]
    fn known_central_weights() {
        let w = rational_weights(&[-1, 0, 1], 2);
        assert_eq!(w, vec![(1, 1), (-2, 1), (1, 1)]);
        let w = rational_weights(&[-2, -1, 0, 1, 2], 1);
        assert_eq!(w, vec![(1, 12), (-2, 3), (0, 1), (2, 3), (-1, 12)]);
        let w = rational_weights(&[0, 1, 2], 1);
        assert_eq!(w, vec![(-3, 2), (2, 1), (-1, 2)]);
    }

    #[test]
    fn window_placement() {
        let st = Stencil::<f64>::new(1, 6, 8, 16).unwrap();
        assert_eq!(st.offsets().collect::<Vec<_>>(), vec![-3, -2, -1, 0, 1, 2, 3]);
        let st = Stencil::<f64>::new(2, 4, 8, 16).unwrap();
        assert_eq!(st.offsets().next(), Some(-3));
        let st = Stencil::<f64>::new(2, 4, 0, 16).unwrap();
        assert_eq!(st.offsets().collect::<Vec<_>>(), vec![0, 1, 2, 3, 4, 5]);
        let st = Stencil::<f64>::new(5, 2, 16, 16).unwrap();
        assert_eq!(st.offsets().collect::<Vec<_>>(), vec![-6, -5, -4, -3, -2, -1, 0]);
    }

    #[test]
    fn spec_examples() {
        let n = 16;
        let grid = UniformGrid::<f64>::new(n).unwrap();
        let x = GridFunction::sample(grid, |x| x).unwrap();
        let d = Stencil::new(1, 6, n / 2, n).unwrap().apply(&x, n / 2).unwrap();
        assert!((d - 1.0).abs() < 1e-13);

        let grid8 = UniformGrid::<f64>::new(8).unwrap();
        let x5 = GridFunction::sample(grid8, |x| x.powi(5)).unwrap();
        let d = Stencil::new(5, 2, 0, 8).unwrap().apply(&x5, 0).unwrap();
        assert!((d - 120.0).abs() < 1e-8, "{d}");

        let x2 = GridFunction::sample(grid8, |x| x * x).unwrap();
        let d = Stencil::new(2, 4, 8, 8).unwrap().apply(&x2, 8).unwrap();
        assert!((d - 2.0).abs() < 1e-11, "{d}");
    }

    #[test]
    fn constants_are_annihilated() {
        let grid = UniformGrid::<DoubleDouble>::new(16).unwrap();
        let c = GridFunction::constant(grid, DoubleDouble::from(3.5));
        for i in 0..=16 {
            let d = Stencil::new(1, 6, i, 16).unwrap().apply(&c, i).unwrap();
            assert!(d.abs() < DoubleDouble::from(1e-28), "{d:?}");
        }
        for &(n, m) in &[(1, 6), (2, 4), (3, 4), (4, 2), (5, 2)] {
            for pos in 0..(n + m) {
                let offsets: Vec<i64> = (0..(n + m) as i64).map(|j| j - pos as i64).collect();
                let sum: f64 = rational_weights(&offsets, n)
                    .iter()
                    .map(|&(a, b)| a as f64 / b as f64)
                    .sum();
                assert!(sum.abs() < 1e-9);
            }
        }
    }

    #[test]
    fn third_derivative_of_cubic() {
        let grid = UniformGrid::<f64>::new(16).unwrap();
        let g = GridFunction::sample(grid, |x| x * x * x).unwrap();
        let fam = StencilFamily::new(3, 4, &grid).unwrap();
        for (i, d) in fam.all(g.values()).into_iter().enumerate() {
            assert!((d - 6.0).abs() < 1e-8, "node {i}: {d}");
        }
    }

    #[test]
    fn fourth_derivative_of_sine_is_second_order() {
        // analytic: (sin)'''' = sin
        let exact = libm::sin(0.5);
        let err = |n: usize| {
            let grid = UniformGrid::<f64>::new(n).unwrap();
            let g = GridFunction::sample(grid, |x| x.sin()).unwrap();
            let i = n / 2;
            (Stencil::new(4, 2, i, n).unwrap().apply(&g, i).unwrap() - exact).abs()
        };
        let e64 = err(64);
        assert!(e64 < 1e-3, "{e64}");
        let ratio = err(32) / e64;
        assert!(ratio > 3.5 && ratio < 4.5, "{ratio}");
    }

    #[test]
    fn family_matches_single_stencils() {
        let grid = UniformGrid::<DoubleDouble>::new(12).unwrap();
        let g = GridFunction::sample(grid, |x| x.exp()).unwrap();
        for &(n, m) in &[(1, 6), (2, 4), (5, 2), (1, 2)] {
            let fam = StencilFamily::new(n, m, &grid).unwrap();
            for i in 0..=12 {
                let single = Stencil::new(n, m, i, 12).unwrap().apply(&g, i).unwrap();
                assert_eq!(fam.at(g.values(), i), single);
            }
        }
    }

    #[test]
    fn interior_weights_do_not_depend_on_index() {
        let a = Stencil::<DoubleDouble>::new(3, 4, 5, 32).unwrap();
        let b = Stencil::<DoubleDouble>::new(3, 4, 20, 32).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn errors() {
        assert!(matches!(
            Stencil::<f64>::new(5, 2, 0, 5),
            Err(Error::StencilTooWide { .. })
        ));
        let st = Stencil::<f64>::new(1, 6, 8, 16).unwrap();
        let small = GridFunction::zeros(UniformGrid::<f64>::new(8).unwrap());
        assert!(st.apply(&small, 8).is_err());
        assert!(st.apply(&small, 1).is_err());
        assert!(Stencil::<f64>::new(0, 2, 0, 8).is_err());
    }
}
