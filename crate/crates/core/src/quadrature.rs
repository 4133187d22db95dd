//! Corrected trapezoid rule and the eighth-order weighted-integral operators.
//!
//! For a smooth integrand `Phi` on a uniform grid,
//!
//! ```text
//! int_a^b Phi = T(h) - h^2/12   [Phi'(b)     - Phi'(a)]
//!                    + h^4/720  [Phi'''(b)   - Phi'''(a)]
//!                    - h^6/30240[Phi^(5)(b)  - Phi^(5)(a)] + O(h^8)
//! ```
//!
//! The operators below integrate `t^q phi(t)` (q = 0, 1 or n) from `0` to
//! `x_i` or from `x_i` to `1`. Endpoint derivatives of the integrand are
//! expanded with the Leibniz rule,
//! `(t^q phi)^(p) = sum_m C(p, m) (t^q)^(m) phi^(p-m)`. Each derivative
//! order `p` of `phi` has one stencil (see [`STENCILS`]), centered in the
//! interior and clamped to the grid near `x = 0` and `x = 1`.

use alloc::vec::Vec;

use crate::error::Error;
use crate::grid::{GridFunction, UniformGrid};
use crate::scalar::Real;
use crate::stencil::StencilFamily;

/// Which Green's-function representation a plan serves.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BetaCase {
    /// beta = 1
    One,
    /// integer beta = n >= 2
    Int(u32),
}

/// First, third and fifth derivatives of an integrand at both ends.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EndpointDerivs<S> {
    pub d1_a: S,
    pub d3_a: S,
    pub d5_a: S,
    pub d1_b: S,
    pub d3_b: S,
    pub d5_b: S,
}

impl<S: Real> EndpointDerivs<S> {
    pub fn zero() -> Self {
        EndpointDerivs {
            d1_a: S::zero(),
            d3_a: S::zero(),
            d5_a: S::zero(),
            d1_b: S::zero(),
            d3_b: S::zero(),
            d5_b: S::zero(),
        }
    }
}

/// Euler-Maclaurin corrected trapezoid rule on equispaced `samples` with
/// spacing `h`, using the supplied endpoint derivatives.
pub fn em_trapezoid<S: Real>(h: S, samples: &[S], derivs: &EndpointDerivs<S>) -> Result<S, Error> {
    if samples.len() < 2 {
        return Err(Error::InvalidParameter(
            "corrected trapezoid rule needs at least two samples",
        ));
    }
    let last = samples.len() - 1;
    let half = S::ratio(1, 2);
    let interior: S = samples[1..last].iter().copied().sum();
    let trapezoid = h * ((samples[0] + samples[last]) * half + interior);
    let h2 = h * h;
    let h4 = h2 * h2;
    let h6 = h4 * h2;
    Ok(trapezoid - h2 / S::from_i64(12) * (derivs.d1_b - derivs.d1_a)
        + h4 / S::from_i64(720) * (derivs.d3_b - derivs.d3_a)
        - h6 / S::from_i64(30240) * (derivs.d5_b - derivs.d5_a))
}

const BINOM3: [i64; 4] = [1, 3, 3, 1];
const BINOM5: [i64; 6] = [1, 5, 10, 10, 5, 1];

/// `(t^q)^(p)` at every node for p = 0..=5.
fn monomial_derivs<S: Real>(grid: &UniformGrid<S>, q: u32) -> Vec<[S; 6]> {
    (0..grid.len())
        .map(|i| {
            let x = grid.node(i);
            let mut d = [S::zero(); 6];
            for (p, slot) in d.iter_mut().enumerate() {
                let p = p as u32;
                if p > q {
                    break;
                }
                let coef: i64 = ((q - p + 1)..=q).map(i64::from).product();
                *slot = S::from_i64(coef) * x.powi((q - p) as i32);
            }
            d
        })
        .collect()
}

/// Stencil derivatives `phi^(p)`, `p = 1..=5`, of one grid function at
/// every node.
struct Derivatives<S>([Vec<S>; 5]);

/// `(derivative, accuracy)` of the stencil used for each derivative order:
/// 9 points for `phi'` to `phi'''`, 7 points for `phi''''` and `phi^(5)`.
/// All of them fit the smallest grid.
pub const STENCILS: [(usize, usize); 5] = [(1, 8), (2, 7), (3, 6), (4, 3), (5, 2)];

/// Precomputed operators for one grid and one beta case.
#[derive(Clone, Debug)]
pub struct QuadPlan<S> {
    grid: UniformGrid<S>,
    case: BetaCase,
    stencils: [StencilFamily<S>; 5],
    unit: Vec<[S; 6]>,
    linear: Vec<[S; 6]>,
    power: Vec<[S; 6]>,
}

impl<S: Real> QuadPlan<S> {
    pub fn new(grid: UniformGrid<S>, case: BetaCase) -> Result<Self, Error> {
        if let BetaCase::Int(n) = case {
            if n < 2 {
                return Err(Error::InvalidParameter("integer beta case needs n >= 2"));
            }
        }
        let fam = |k: usize| StencilFamily::new(STENCILS[k].0, STENCILS[k].1, &grid);
        let power = match case {
            BetaCase::One => Vec::new(),
            BetaCase::Int(n) => monomial_derivs(&grid, n),
        };
        Ok(QuadPlan {
            stencils: [fam(0)?, fam(1)?, fam(2)?, fam(3)?, fam(4)?],
            unit: monomial_derivs(&grid, 0),
            linear: monomial_derivs(&grid, 1),
            power,
            grid,
            case,
        })
    }

    pub fn grid(&self) -> &UniformGrid<S> {
        &self.grid
    }

    pub fn case(&self) -> BetaCase {
        self.case
    }

    /// `d_i^p = (t^n)^(p)` at `x_i` for the integer case, `p <= 5`.
    pub fn monomial_table(&self) -> &[[S; 6]] {
        &self.power
    }

    fn check(&self, phi: &GridFunction<S>) -> Result<(), Error> {
        if phi.grid().intervals() != self.grid.intervals() {
            return Err(Error::LengthMismatch {
                expected: self.grid.len(),
                found: phi.values().len(),
            });
        }
        Ok(())
    }

    fn require_one(&self, what: &'static str) -> Result<(), Error> {
        match self.case {
            BetaCase::One => Ok(()),
            BetaCase::Int(_) => Err(Error::WrongBetaCase(what)),
        }
    }

    fn require_int(&self, what: &'static str) -> Result<(), Error> {
        match self.case {
            BetaCase::Int(_) => Ok(()),
            BetaCase::One => Err(Error::WrongBetaCase(what)),
        }
    }

    fn derivatives(&self, values: &[S]) -> Derivatives<S> {
        Derivatives(core::array::from_fn(|k| self.stencils[k].all(values)))
    }

    /// Endpoint correction `-h^2/12 Phi' + h^4/720 Phi''' - h^6/30240 Phi^(5)`
    /// at every node, for `Phi = w * phi` with `w` given by its derivatives.
    fn corrections(&self, weight: &[[S; 6]], values: &[S], d: &Derivatives<S>) -> Vec<S> {
        let h = self.grid.h();
        let h2 = h * h;
        let c1 = h2 / S::from_i64(12);
        let c3 = h2 * h2 / S::from_i64(720);
        let c5 = h2 * h2 * h2 / S::from_i64(30240);
        (0..self.grid.len())
            .map(|i| {
                let w = &weight[i];
                let dp = |p: usize| if p == 0 { values[i] } else { d.0[p - 1][i] };
                let d1 = w[0] * dp(1) + w[1] * dp(0);
                let mut d3 = S::zero();
                for m in 0..=3 {
                    d3 += S::from_i64(BINOM3[m]) * w[m] * dp(3 - m);
                }
                let mut d5 = S::zero();
                for m in 0..=5 {
                    d5 += S::from_i64(BINOM5[m]) * w[m] * dp(5 - m);
                }
                c3 * d3 - c1 * d1 - c5 * d5
            })
            .collect()
    }

    /// Weighted samples, per-interval trapezoid areas and corrections.
    fn pieces(&self, weight: &[[S; 6]], values: &[S], d: &Derivatives<S>) -> (Vec<S>, Vec<S>) {
        let h = self.grid.h();
        let half = S::ratio(1, 2);
        let big_phi: Vec<S> = weight.iter().zip(values).map(|(w, &v)| w[0] * v).collect();
        let areas = big_phi
            .windows(2)
            .map(|p| h * half * (p[0] + p[1]))
            .collect();
        (areas, self.corrections(weight, values, d))
    }

    /// `int_0^{x_i} w phi` at every node; exactly zero at `i = 0`.
    fn from_left(&self, weight: &[[S; 6]], values: &[S], d: &Derivatives<S>) -> Vec<S> {
        let (areas, corr) = self.pieces(weight, values, d);
        let mut out = Vec::with_capacity(values.len());
        out.push(S::zero());
        let mut acc = S::zero();
        for i in 1..values.len() {
            acc += areas[i - 1];
            out.push(acc + (corr[i] - corr[0]));
        }
        out
    }

    /// `int_{x_i}^1 w phi` at every node; exactly zero at `i = N`.
    fn to_right(&self, weight: &[[S; 6]], values: &[S], d: &Derivatives<S>) -> Vec<S> {
        let (areas, corr) = self.pieces(weight, values, d);
        let n = values.len() - 1;
        let mut out = alloc::vec![S::zero(); n + 1];
        let mut acc = S::zero();
        for i in (0..n).rev() {
            acc += areas[i];
            out[i] = acc + (corr[n] - corr[i]);
        }
        out
    }

    /// `L8(I1, x_i) phi ~ int_0^{x_i} t phi(t) dt` at every node.
    pub fn l8_i1_all(&self, phi: &GridFunction<S>) -> Result<Vec<S>, Error> {
        self.require_one("I1 needs beta = 1")?;
        self.check(phi)?;
        let d = self.derivatives(phi.values());
        Ok(self.from_left(&self.linear, phi.values(), &d))
    }

    pub fn l8_i1(&self, phi: &GridFunction<S>, i: usize) -> Result<S, Error> {
        Ok(self.l8_i1_all(phi)?[i])
    }

    fn f_from_i1(&self, i1: &[S]) -> Vec<S> {
        let mut f = Vec::with_capacity(i1.len());
        f.push(S::zero());
        for (i, &v) in i1.iter().enumerate().skip(1) {
            f.push(v / self.grid.node(i));
        }
        f
    }

    /// `F(x_i) = L8(I1, x_i) phi / x_i`, with `F(0) = 0`.
    pub fn l8_f_values(&self, phi: &GridFunction<S>) -> Result<GridFunction<S>, Error> {
        let i1 = self.l8_i1_all(phi)?;
        GridFunction::new(self.grid, self.f_from_i1(&i1))
    }

    /// `L8(F, x_i) phi ~ int_{x_i}^1 F(t) dt` at every node, with the
    /// derivatives of `F` taken from stencils applied to the values of `F`.
    pub fn l8_f_integral_all(&self, phi: &GridFunction<S>) -> Result<Vec<S>, Error> {
        let f = self.l8_f_values(phi)?;
        let d = self.derivatives(f.values());
        Ok(self.to_right(&self.unit, f.values(), &d))
    }

    /// `L8(I2, x_i) phi ~ int_{x_i}^1 t ln(t) phi(t) dt` at every node.
    pub fn l8_i2_all(&self, phi: &GridFunction<S>) -> Result<Vec<S>, Error> {
        let i1 = self.l8_i1_all(phi)?;
        Ok(self.i2_from_i1(&i1))
    }

    fn i2_from_i1(&self, i1: &[S]) -> Vec<S> {
        let f = self.f_from_i1(i1);
        let d = self.derivatives(&f);
        let lf = self.to_right(&self.unit, &f, &d);
        let n = self.grid.intervals();
        let mut out = Vec::with_capacity(n + 1);
        out.push(-lf[0]);
        for i in 1..n {
            let x = self.grid.node(i);
            out.push(-(x * x.ln() * f[i]) - lf[i]);
        }
        out.push(S::zero());
        out
    }

    pub fn l8_i2(&self, phi: &GridFunction<S>, i: usize) -> Result<S, Error> {
        Ok(self.l8_i2_all(phi)?[i])
    }

    /// Both beta = 1 integrals, `(L8(I1), L8(I2))`, from one pass.
    pub fn l8_i1_i2(&self, phi: &GridFunction<S>) -> Result<(Vec<S>, Vec<S>), Error> {
        let i1 = self.l8_i1_all(phi)?;
        let i2 = self.i2_from_i1(&i1);
        Ok((i1, i2))
    }

    /// `L8(A1, x_i) phi ~ int_0^{x_i} t^n phi(t) dt`.
    pub fn l8_a1_all(&self, phi: &GridFunction<S>) -> Result<Vec<S>, Error> {
        self.require_int("A1 needs integer beta > 1")?;
        self.check(phi)?;
        let d = self.derivatives(phi.values());
        Ok(self.from_left(&self.power, phi.values(), &d))
    }

    /// `L8(A2, x_i) phi ~ int_{x_i}^1 t^n phi(t) dt`.
    pub fn l8_a2_all(&self, phi: &GridFunction<S>) -> Result<Vec<S>, Error> {
        self.require_int("A2 needs integer beta > 1")?;
        self.check(phi)?;
        let d = self.derivatives(phi.values());
        Ok(self.to_right(&self.power, phi.values(), &d))
    }

    /// `L8(A3, x_i) phi ~ int_{x_i}^1 t phi(t) dt`.
    pub fn l8_a3_all(&self, phi: &GridFunction<S>) -> Result<Vec<S>, Error> {
        self.require_int("A3 needs integer beta > 1")?;
        self.check(phi)?;
        let d = self.derivatives(phi.values());
        Ok(self.to_right(&self.linear, phi.values(), &d))
    }

    /// All three integer-case integrals from one set of stencil derivatives.
    pub fn l8_a_all(&self, phi: &GridFunction<S>) -> Result<[Vec<S>; 3], Error> {
        self.require_int("A1/A2/A3 need integer beta > 1")?;
        self.check(phi)?;
        let d = self.derivatives(phi.values());
        let v = phi.values();
        Ok([
            self.from_left(&self.power, v, &d),
            self.to_right(&self.power, v, &d),
            self.to_right(&self.linear, v, &d),
        ])
    }

    pub fn l8_a1(&self, phi: &GridFunction<S>, i: usize) -> Result<S, Error> {
        Ok(self.l8_a1_all(phi)?[i])
    }

    pub fn l8_a2(&self, phi: &GridFunction<S>, i: usize) -> Result<S, Error> {
        Ok(self.l8_a2_all(phi)?[i])
    }

    pub fn l8_a3(&self, phi: &GridFunction<S>, i: usize) -> Result<S, Error> {
        Ok(self.l8_a3_all(phi)?[i])
    }

    /// `int_0^1 t^beta phi(t) dt`.
    pub fn l8_full_interval(&self, phi: &GridFunction<S>) -> Result<S, Error> {
        let n = self.grid.intervals();
        match self.case {
            BetaCase::One => self.l8_i1(phi, n),
            BetaCase::Int(_) => self.l8_a1(phi, n),
        }
    }
}
