//! Scalar precision contract.
//!
//! Every numerical routine in the crate is generic over [`Real`]. Two
//! implementations exist: `f64` ([`Precision::Standard`]) and
//! [`DoubleDouble`] ([`Precision::Extended`], about 32 significant digits).
//! Because the mode is a type parameter, mixing modes inside one
//! computation does not compile.

use core::fmt::{Debug, Display};
use core::iter::Sum;
use core::ops::{Add, AddAssign, Div, DivAssign, Mul, MulAssign, Neg, Sub, SubAssign};

pub use crate::dd::DoubleDouble;

/// Arithmetic precision mode of a computation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Precision {
    /// binary64
    Standard,
    /// double-double, at least 30 significant decimal digits
    Extended,
}

impl Precision {
    pub fn name(self) -> &'static str {
        match self {
            Precision::Standard => "std",
            Precision::Extended => "ext",
        }
    }
}

impl Display for Precision {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.write_str(self.name())
    }
}

/// Real number type used by all solvers.
pub trait Real:
    Copy
    + Debug
    + Display
    + PartialEq
    + PartialOrd
    + Send
    + Sync
    + 'static
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + AddAssign
    + SubAssign
    + MulAssign
    + DivAssign
    + Sum
{
    const PRECISION: Precision;

    fn from_f64(v: f64) -> Self;
    /// Exact for |v| < 2^53 in standard mode and for all i64 in extended mode.
    fn from_i64(v: i64) -> Self;
    fn to_f64(self) -> f64;
    /// Rounds a double-double value to this precision.
    fn from_dd(v: DoubleDouble) -> Self;

    /// Unit roundoff of the mode (2^-53 or 2^-106).
    fn epsilon() -> Self;

    fn zero() -> Self {
        Self::from_f64(0.0)
    }
    fn one() -> Self {
        Self::from_f64(1.0)
    }
    fn pi() -> Self;
    fn e() -> Self;

    fn abs(self) -> Self;
    fn sqrt(self) -> Self;
    fn exp(self) -> Self;
    fn ln(self) -> Self;
    fn sin(self) -> Self;
    fn cos(self) -> Self;
    fn powi(self, n: i32) -> Self;
    fn powf(self, y: Self) -> Self;
    fn floor(self) -> Self;
    fn is_finite(self) -> bool;

    /// Parses a decimal literal such as `-1.25e-3`.
    fn parse_decimal(s: &str) -> Option<Self>;

    fn ratio(num: i64, den: i64) -> Self {
        Self::from_i64(num) / Self::from_i64(den)
    }

    fn max(self, other: Self) -> Self {
        if other > self {
            other
        } else {
            self
        }
    }

    fn min(self, other: Self) -> Self {
        if other < self {
            other
        } else {
            self
        }
    }

    fn log2(self) -> Self {
        self.ln() / Self::from_i64(2).ln()
    }
}

impl Real for f64 {
    const PRECISION: Precision = Precision::Standard;

    fn from_f64(v: f64) -> Self {
        v
    }
    fn from_i64(v: i64) -> Self {
        v as f64
    }
    fn to_f64(self) -> f64 {
        self
    }
    fn from_dd(v: DoubleDouble) -> Self {
        v.hi() + v.lo()
    }
    fn epsilon() -> Self {
        f64::EPSILON / 2.0
    }
    fn pi() -> Self {
        core::f64::consts::PI
    }
    fn e() -> Self {
        core::f64::consts::E
    }
    fn abs(self) -> Self {
        libm::fabs(self)
    }
    fn sqrt(self) -> Self {
        libm::sqrt(self)
    }
    fn exp(self) -> Self {
        libm::exp(self)
    }
    fn ln(self) -> Self {
        libm::log(self)
    }
    fn sin(self) -> Self {
        libm::sin(self)
    }
    fn cos(self) -> Self {
        libm::cos(self)
    }
    fn powi(self, n: i32) -> Self {
        crate::dd::powi_by_squaring(self, n)
    }
    fn powf(self, y: Self) -> Self {
        libm::pow(self, y)
    }
    fn floor(self) -> Self {
        libm::floor(self)
    }
    fn is_finite(self) -> bool {
        f64::is_finite(self)
    }
    fn parse_decimal(s: &str) -> Option<Self> {
        s.trim().parse().ok()
    }
}

impl Real for DoubleDouble {
    const PRECISION: Precision = Precision::Extended;

    fn from_f64(v: f64) -> Self {
        DoubleDouble::from(v)
    }
    fn from_i64(v: i64) -> Self {
        DoubleDouble::from_i64(v)
    }
    fn to_f64(self) -> f64 {
        self.hi() + self.lo()
    }
    fn from_dd(v: DoubleDouble) -> Self {
        v
    }
    fn epsilon() -> Self {
        DoubleDouble::EPSILON
    }
    fn pi() -> Self {
        DoubleDouble::PI
    }
    fn e() -> Self {
        DoubleDouble::E
    }
    fn abs(self) -> Self {
        DoubleDouble::abs(self)
    }
    fn sqrt(self) -> Self {
        DoubleDouble::sqrt(self)
    }
    fn exp(self) -> Self {
        DoubleDouble::exp(self)
    }
    fn ln(self) -> Self {
        DoubleDouble::ln(self)
    }
    fn sin(self) -> Self {
        DoubleDouble::sin(self)
    }
    fn cos(self) -> Self {
        DoubleDouble::cos(self)
    }
    fn powi(self, n: i32) -> Self {
        DoubleDouble::powi(self, n)
    }
    fn powf(self, y: Self) -> Self {
        DoubleDouble::powf(self, y)
    }
    fn floor(self) -> Self {
        DoubleDouble::floor(self)
    }
    fn is_finite(self) -> bool {
        DoubleDouble::is_finite(self)
    }
    fn parse_decimal(s: &str) -> Option<Self> {
        s.trim().parse().ok()
    }
}
