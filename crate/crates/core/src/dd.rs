//! Double-double arithmetic: a value is the unevaluated sum `hi + lo` of two
//! binary64 numbers with `|lo| <= ulp(hi) / 2`, giving roughly 106 bits of
//! significand.
//!
//! The error-free transformations follow Dekker and Knuth; the elementary
//! functions use the argument reductions of Hida, Li and Bailey's QD library.

use core::cmp::Ordering;
use core::fmt;
use core::iter::Sum;
use core::ops::{Add, AddAssign, Div, DivAssign, Mul, MulAssign, Neg, Sub, SubAssign};
use core::str::FromStr;

#[derive(Clone, Copy, Default)]
pub struct DoubleDouble {
    hi: f64,
    lo: f64,
}

#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

#[inline]
fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    (s, b - (s - a))
}

#[inline]
fn split(a: f64) -> (f64, f64) {
    const SPLITTER: f64 = 134_217_729.0; // 2^27 + 1
    let t = SPLITTER * a;
    let hi = t - (t - a);
    (hi, a - hi)
}

#[inline]
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    let (ah, al) = split(a);
    let (bh, bl) = split(b);
    (p, ((ah * bh - p) + ah * bl + al * bh) + al * bl)
}

/// Integer power by repeated squaring, shared by both scalar modes.
pub(crate) fn powi_by_squaring<T>(x: T, n: i32) -> T
where
    T: Copy + Mul<Output = T> + Div<Output = T> + From<f64>,
{
    let mut base = x;
    let mut e = n.unsigned_abs();
    let mut acc = T::from(1.0);
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * base;
        }
        e >>= 1;
        if e > 0 {
            base = base * base;
        }
    }
    if n < 0 {
        T::from(1.0) / acc
    } else {
        acc
    }
}

impl DoubleDouble {
    pub const PI: DoubleDouble = DoubleDouble {
        hi: 3.141592653589793116e+00,
        lo: 1.224646799147353207e-16,
    };
    pub const E: DoubleDouble = DoubleDouble {
        hi: 2.718281828459045091e+00,
        lo: 1.445646891729250158e-16,
    };
    pub const LN2: DoubleDouble = DoubleDouble {
        hi: 6.931471805599452862e-01,
        lo: 2.319046813846299558e-17,
    };
    const TWO_PI: DoubleDouble = DoubleDouble {
        hi: 6.283185307179586232e+00,
        lo: 2.449293598294706414e-16,
    };
    const PI_2: DoubleDouble = DoubleDouble {
        hi: 1.570796326794896558e+00,
        lo: 6.123233995736766036e-17,
    };
    /// 2^-106
    pub const EPSILON: DoubleDouble = DoubleDouble {
        hi: 1.232595164407830946e-32,
        lo: 0.0,
    };

    pub const fn from_parts(hi: f64, lo: f64) -> Self {
        DoubleDouble { hi, lo }
    }

    /// Builds a normalized value from two arbitrary doubles.
    pub fn from_sum(a: f64, b: f64) -> Self {
        let (hi, lo) = two_sum(a, b);
        DoubleDouble { hi, lo }
    }

    pub fn hi(self) -> f64 {
        self.hi
    }

    pub fn lo(self) -> f64 {
        self.lo
    }

    pub fn from_i64(v: i64) -> Self {
        let hi = v as f64;
        let lo = (v as i128 - hi as i128) as f64;
        DoubleDouble::from_sum(hi, lo)
    }

    pub fn is_finite(self) -> bool {
        self.hi.is_finite() && self.lo.is_finite()
    }

    pub fn is_nan(self) -> bool {
        self.hi.is_nan() || self.lo.is_nan()
    }

    pub fn is_sign_negative(self) -> bool {
        self.hi < 0.0 || (self.hi == 0.0 && self.hi.is_sign_negative())
    }

    fn nan() -> Self {
        DoubleDouble {
            hi: f64::NAN,
            lo: f64::NAN,
        }
    }

    fn ldexp(self, e: i32) -> Self {
        DoubleDouble {
            hi: libm::scalbn(self.hi, e),
            lo: libm::scalbn(self.lo, e),
        }
    }

    fn mul_pow2(self, p: f64) -> Self {
        DoubleDouble {
            hi: self.hi * p,
            lo: self.lo * p,
        }
    }

    pub fn sqr(self) -> Self {
        let (p1, mut p2) = two_prod(self.hi, self.hi);
        p2 += 2.0 * self.hi * self.lo;
        p2 += self.lo * self.lo;
        let (hi, lo) = quick_two_sum(p1, p2);
        DoubleDouble { hi, lo }
    }

    pub fn abs(self) -> Self {
        if self.hi < 0.0 {
            -self
        } else {
            self
        }
    }

    pub fn floor(self) -> Self {
        let hi = libm::floor(self.hi);
        if hi == self.hi {
            let (h, l) = quick_two_sum(hi, libm::floor(self.lo));
            DoubleDouble { hi: h, lo: l }
        } else {
            DoubleDouble { hi, lo: 0.0 }
        }
    }

    pub fn round(self) -> Self {
        (self + DoubleDouble::from(0.5)).floor()
    }

    pub fn sqrt(self) -> Self {
        if self.hi == 0.0 {
            return DoubleDouble::default();
        }
        if self.hi < 0.0 {
            return Self::nan();
        }
        let x = 1.0 / libm::sqrt(self.hi);
        let ax = DoubleDouble::from(self.hi * x);
        let r = (self - ax.sqr()).hi * (x * 0.5);
        let (hi, lo) = two_sum(ax.hi, r);
        let y = DoubleDouble { hi, lo };
        // one more Newton step in full precision
        y + (self - y.sqr()) / y.mul_pow2(2.0)
    }

    pub fn exp(self) -> Self {
        const INV_K: f64 = 1.0 / 512.0;
        if self.hi <= -709.0 {
            return DoubleDouble::default();
        }
        if self.hi >= 709.0 {
            return DoubleDouble {
                hi: f64::INFINITY,
                lo: 0.0,
            };
        }
        if self.hi == 0.0 && self.lo == 0.0 {
            return DoubleDouble::from(1.0);
        }
        let m = libm::floor(self.hi / Self::LN2.hi + 0.5);
        let r = (self - Self::LN2 * DoubleDouble::from(m)).mul_pow2(INV_K);

        // exp(r) - 1 by Taylor series; |r| < 7e-4
        let mut p = r.sqr();
        let mut s = r + p.mul_pow2(0.5);
        let mut fact = 2.0;
        let mut n = 3.0;
        loop {
            p *= r;
            fact *= n;
            let t = p / DoubleDouble::from(fact);
            s += t;
            n += 1.0;
            if libm::fabs(t.hi) <= INV_K * Self::EPSILON.hi || n > 14.0 {
                break;
            }
        }
        // undo the scaling by 2^-9: (1+s)^2 - 1 = 2s + s^2
        for _ in 0..9 {
            s = s.mul_pow2(2.0) + s.sqr();
        }
        (s + DoubleDouble::from(1.0)).ldexp(m as i32)
    }

    pub fn ln(self) -> Self {
        if self.hi == 1.0 && self.lo == 0.0 {
            return DoubleDouble::default();
        }
        if self.hi <= 0.0 {
            if self.hi == 0.0 {
                return DoubleDouble {
                    hi: f64::NEG_INFINITY,
                    lo: 0.0,
                };
            }
            return Self::nan();
        }
        if !self.hi.is_finite() {
            return self;
        }
        // Newton iteration on exp(x) = a
        let mut x = DoubleDouble::from(libm::log(self.hi));
        x = x + self * (-x).exp() - DoubleDouble::from(1.0);
        x
    }

    /// Returns (sin, cos) of the argument.
    pub fn sin_cos(self) -> (Self, Self) {
        if self.hi == 0.0 {
            return (DoubleDouble::default(), DoubleDouble::from(1.0));
        }
        let z = (self / Self::TWO_PI).round();
        let r = self - Self::TWO_PI * z;
        let j = libm::floor(r.hi / Self::PI_2.hi + 0.5);
        let t = r - Self::PI_2 * DoubleDouble::from(j);

        let t2 = t.sqr();
        // sin series
        let mut term = t;
        let mut sin_t = t;
        let mut k = 1.0;
        loop {
            term = -(term * t2) / DoubleDouble::from((k + 1.0) * (k + 2.0));
            sin_t += term;
            k += 2.0;
            if libm::fabs(term.hi) < 1e-34 || k > 60.0 {
                break;
            }
        }
        let mut term = DoubleDouble::from(1.0);
        let mut cos_t = term;
        let mut k = 0.0;
        loop {
            term = -(term * t2) / DoubleDouble::from((k + 1.0) * (k + 2.0));
            cos_t += term;
            k += 2.0;
            if libm::fabs(term.hi) < 1e-34 || k > 60.0 {
                break;
            }
        }
        match j as i32 {
            0 => (sin_t, cos_t),
            1 => (cos_t, -sin_t),
            -1 => (-cos_t, sin_t),
            _ => (-sin_t, -cos_t),
        }
    }

    pub fn sin(self) -> Self {
        self.sin_cos().0
    }

    pub fn cos(self) -> Self {
        self.sin_cos().1
    }

    pub fn powi(self, n: i32) -> Self {
        powi_by_squaring(self, n)
    }

    pub fn powf(self, y: Self) -> Self {
        let yi = y.floor();
        if yi == y && libm::fabs(y.hi) < 2147483647.0 {
            return self.powi(y.hi as i32);
        }
        if self.hi > 0.0 {
            (y * self.ln()).exp()
        } else if self.hi == 0.0 && self.lo == 0.0 {
            if y.hi > 0.0 {
                DoubleDouble::default()
            } else {
                DoubleDouble {
                    hi: f64::INFINITY,
                    lo: 0.0,
                }
            }
        } else {
            Self::nan()
        }
    }

    /// Decimal digits and exponent: value = 0.d1d2d3... * 10^(exp+1).
    fn decimal_digits(self, nd: usize, buf: &mut [u8]) -> i32 {
        let ten = DoubleDouble::from(10.0);
        let mut r = self.abs();
        let mut e = libm::floor(libm::log10(r.hi)) as i32;
        if e < -300 {
            r = r * ten.powi(300);
            r = r / ten.powi(e + 300);
        } else if e > 0 {
            r = r / ten.powi(e);
        } else if e < 0 {
            r = r * ten.powi(-e);
        }
        if r >= ten {
            r = r / ten;
            e += 1;
        } else if r < DoubleDouble::from(1.0) {
            r = r * ten;
            e -= 1;
        }

        let mut digits = [0i32; 48];
        for d in digits.iter_mut().take(nd + 1) {
            let v = libm::floor(r.hi) as i32;
            r = (r - DoubleDouble::from(v as f64)) * ten;
            *d = v;
        }
        // fix digits that escaped [0, 9]
        for i in (1..=nd).rev() {
            if digits[i] < 0 {
                digits[i - 1] -= 1;
                digits[i] += 10;
            } else if digits[i] > 9 {
                digits[i - 1] += 1;
                digits[i] -= 10;
            }
        }
        // round on the extra digit
        if digits[nd] >= 5 {
            digits[nd - 1] += 1;
            let mut i = nd - 1;
            while i > 0 && digits[i] > 9 {
                digits[i] -= 10;
                digits[i - 1] += 1;
                i -= 1;
            }
        }
        if digits[0] > 9 {
            e += 1;
            for i in (1..nd).rev() {
                digits[i] = digits[i - 1];
            }
            digits[0] = 1;
            digits[1] = 0;
        }
        for i in 0..nd {
            buf[i] = b'0' + digits[i] as u8;
        }
        e
    }
}

impl From<f64> for DoubleDouble {
    fn from(v: f64) -> Self {
        DoubleDouble { hi: v, lo: 0.0 }
    }
}

impl Add for DoubleDouble {
    type Output = Self;
    #[inline]
    fn add(self, b: Self) -> Self {
        let (s, e) = two_sum(self.hi, b.hi);
        let (t, f) = two_sum(self.lo, b.lo);
        let (s, e) = quick_two_sum(s, e + t);
        let (hi, lo) = quick_two_sum(s, e + f);
        DoubleDouble { hi, lo }
    }
}

impl Neg for DoubleDouble {
    type Output = Self;
    #[inline]
    fn neg(self) -> Self {
        DoubleDouble {
            hi: -self.hi,
            lo: -self.lo,
        }
    }
}

impl Sub for DoubleDouble {
    type Output = Self;
    #[inline]
    fn sub(self, b: Self) -> Self {
        self + (-b)
    }
}

impl Mul for DoubleDouble {
    type Output = Self;
    #[inline]
    fn mul(self, b: Self) -> Self {
        let (p, mut e) = two_prod(self.hi, b.hi);
        e += self.hi * b.lo + self.lo * b.hi;
        let (hi, lo) = quick_two_sum(p, e);
        DoubleDouble { hi, lo }
    }
}

impl Div for DoubleDouble {
    type Output = Self;
    fn div(self, b: Self) -> Self {
        let q1 = self.hi / b.hi;
        let mut r = self - b * DoubleDouble::from(q1);
        let q2 = r.hi / b.hi;
        r -= b * DoubleDouble::from(q2);
        let q3 = r.hi / b.hi;
        let (q1, q2) = quick_two_sum(q1, q2);
        DoubleDouble { hi: q1, lo: q2 } + DoubleDouble::from(q3)
    }
}

macro_rules! assign_op {
    ($tr:ident, $m:ident, $op:tt) => {
        impl $tr for DoubleDouble {
            #[inline]
            fn $m(&mut self, rhs: Self) {
                *self = *self $op rhs;
            }
        }
    };
}
assign_op!(AddAssign, add_assign, +);
assign_op!(SubAssign, sub_assign, -);
assign_op!(MulAssign, mul_assign, *);
assign_op!(DivAssign, div_assign, /);

impl Sum for DoubleDouble {
    fn sum<I: Iterator<Item = Self>>(iter: I) -> Self {
        iter.fold(DoubleDouble::default(), |a, b| a + b)
    }
}

impl PartialEq for DoubleDouble {
    fn eq(&self, other: &Self) -> bool {
        self.hi == other.hi && self.lo == other.lo
    }
}

impl PartialOrd for DoubleDouble {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        match self.hi.partial_cmp(&other.hi)? {
            Ordering::Equal => self.lo.partial_cmp(&other.lo),
            o => Some(o),
        }
    }
}

impl fmt::Debug for DoubleDouble {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "DoubleDouble({:e} + {:e})", self.hi, self.lo)
    }
}

/// Scientific notation; the formatter precision is the number of digits
/// after the decimal point (default 31, i.e. 32 significant digits).
impl fmt::Display for DoubleDouble {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.hi.is_nan() {
            return f.write_str("NaN");
        }
        if self.hi.is_infinite() {
            return f.write_str(if self.hi > 0.0 { "inf" } else { "-inf" });
        }
        let frac = f.precision().unwrap_or(31).min(40);
        let nd = frac + 1;
        if self.hi == 0.0 {
            f.write_str("0.")?;
            for _ in 0..frac.max(1) {
                f.write_str("0")?;
            }
            return f.write_str("e0");
        }
        let mut buf = [0u8; 48];
        let e = self.decimal_digits(nd, &mut buf);
        if self.hi < 0.0 {
            f.write_str("-")?;
        }
        let digits = core::str::from_utf8(&buf[..nd]).map_err(|_| fmt::Error)?;
        f.write_str(&digits[..1])?;
        if nd > 1 {
            f.write_str(".")?;
            f.write_str(&digits[1..])?;
        }
        write!(f, "e{e}")
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseDoubleDoubleError;

impl fmt::Display for ParseDoubleDoubleError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("invalid decimal literal")
    }
}

impl FromStr for DoubleDouble {
    type Err = ParseDoubleDoubleError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        let bytes = s.as_bytes();
        let mut pos = 0;
        let mut negative = false;
        if pos < bytes.len() && (bytes[pos] == b'+' || bytes[pos] == b'-') {
            negative = bytes[pos] == b'-';
            pos += 1;
        }
        let ten = DoubleDouble::from(10.0);
        // significant digits are gathered exactly in an integer
        let mut acc: u128 = 0;
        let mut digits = 0usize;
        let mut frac_digits = 0i32;
        let mut seen_point = false;
        const ACC_LIMIT: u128 = 10u128.pow(37);
        while pos < bytes.len() {
            match bytes[pos] {
                c @ b'0'..=b'9' => {
                    if acc < ACC_LIMIT {
                        acc = acc * 10 + (c - b'0') as u128;
                        if seen_point {
                            frac_digits += 1;
                        }
                    } else if !seen_point {
                        frac_digits -= 1;
                    }
                    digits += 1;
                }
                b'.' if !seen_point => seen_point = true,
                _ => break,
            }
            pos += 1;
        }
        if digits == 0 {
            return Err(ParseDoubleDoubleError);
        }
        let mut exp: i32 = 0;
        if pos < bytes.len() && (bytes[pos] == b'e' || bytes[pos] == b'E') {
            exp = s[pos + 1..].parse().map_err(|_| ParseDoubleDoubleError)?;
            pos = bytes.len();
        }
        if pos != bytes.len() {
            return Err(ParseDoubleDoubleError);
        }
        let e = exp - frac_digits;
        let hi = acc as f64;
        let lo = (acc as i128 - hi as i128) as f64;
        let acc = DoubleDouble::from_sum(hi, lo);
        // 10^k is exact in double-double up to k = 45
        let mut v = if e >= 0 {
            acc * ten.powi(e)
        } else if e >= -45 {
            acc / ten.powi(-e)
        } else {
            acc / ten.powi(45) / ten.powi(-e - 45)
        };
        if negative {
            v = -v;
        }
        Ok(v)
    }
}
