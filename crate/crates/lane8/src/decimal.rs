//! Lossless decimal text for the scalar types.
//!
//! `f64` uses the shortest string that parses back to the same value.
//! A [`DoubleDouble`] `hi + lo` is an exact binary fraction, so it has a
//! finite decimal expansion; [`Decimal::to_decimal`] emits the shortest
//! rounding of that expansion (at most 64 digits, the full expansion
//! otherwise) that [`Decimal::from_decimal`] maps back to the same pair.
//! Parsing rounds the decimal to the nearest `f64` for `hi` and rounds the
//! exact remainder for `lo`.

use lane8_core::{DoubleDouble, Real};
use num_bigint::{BigInt, Sign};

/// Decimal conversions that round-trip bit-exactly.
pub trait Decimal: Real {
    fn to_decimal(self) -> String;
    fn from_decimal(text: &str) -> Option<Self>;
}

impl Decimal for f64 {
    fn to_decimal(self) -> String {
        format!("{self:e}")
    }

    fn from_decimal(text: &str) -> Option<f64> {
        parse_exact(text)?;
        text.trim().parse().ok().filter(|v: &f64| v.is_finite())
    }
}

impl Decimal for DoubleDouble {
    fn to_decimal(self) -> String {
        let (hi, lo) = (self.hi(), self.lo());
        if hi == 0.0 {
            return if hi.is_sign_negative() { "-0e0" } else { "0e0" }.into();
        }
        let (a, e) = add_exact(exact_f64(hi), exact_f64(lo));
        let negative = a.sign() == Sign::Minus;
        let digits = a.magnitude().to_string();
        for sig in 1..=64.min(digits.len()) {
            let text = rounded(negative, &digits, e, sig);
            if let Some(back) = DoubleDouble::from_decimal(&text) {
                if back.hi().to_bits() == hi.to_bits() && back.lo().to_bits() == lo.to_bits() {
                    return text;
                }
            }
        }
        scientific(negative, &digits, e)
    }

    fn from_decimal(text: &str) -> Option<DoubleDouble> {
        let (a, e) = parse_exact(text)?;
        let hi: f64 = text.trim().parse().ok()?;
        if !hi.is_finite() {
            return None;
        }
        let (r, re) = add_exact((a, e), negate(exact_f64(hi)));
        let lo: f64 = format!("{r}e{re}").parse().ok()?;
        Some(DoubleDouble::from_parts(hi, lo))
    }
}

/// `m * 10^e` equal to `v`.
fn exact_f64(v: f64) -> (BigInt, i64) {
    if v == 0.0 {
        return (BigInt::from(0), 0);
    }
    let bits = v.to_bits();
    let biased = ((bits >> 52) & 0x7ff) as i64;
    let fraction = bits & ((1u64 << 52) - 1);
    let (mantissa, exp2) = if biased == 0 {
        (fraction, -1074)
    } else {
        (fraction | (1u64 << 52), biased - 1075)
    };
    let mut m = BigInt::from(mantissa);
    if v < 0.0 {
        m = -m;
    }
    if exp2 >= 0 {
        (m << exp2 as usize, 0)
    } else {
        // 2^-k = 5^k / 10^k
        (m * BigInt::from(5).pow(-exp2 as u32), exp2)
    }
}

fn negate((m, e): (BigInt, i64)) -> (BigInt, i64) {
    (-m, e)
}

fn add_exact((a, ea): (BigInt, i64), (b, eb): (BigInt, i64)) -> (BigInt, i64) {
    let e = ea.min(eb);
    let scale = |m: BigInt, from: i64| m * BigInt::from(10).pow((from - e) as u32);
    (scale(a, ea) + scale(b, eb), e)
}

/// Exact value of `[+-]digits[.digits][(e|E)[+-]digits]` as `m * 10^e`.
fn parse_exact(text: &str) -> Option<(BigInt, i64)> {
    let t = text.trim();
    let (mantissa, exp) = match t.find(['e', 'E']) {
        Some(p) => (&t[..p], t[p + 1..].parse::<i64>().ok()?),
        None => (t, 0),
    };
    let (negative, body) = match mantissa.as_bytes().first()? {
        b'-' => (true, &mantissa[1..]),
        b'+' => (false, &mantissa[1..]),
        _ => (false, mantissa),
    };
    let (int, frac) = body.split_once('.').unwrap_or((body, ""));
    if int.is_empty() && frac.is_empty() {
        return None;
    }
    if !int.bytes().chain(frac.bytes()).all(|b| b.is_ascii_digit()) {
        return None;
    }
    let digits = format!("{int}{frac}");
    let mut m: BigInt = if digits.is_empty() {
        BigInt::from(0)
    } else {
        digits.parse().ok()?
    };
    if negative {
        m = -m;
    }
    Some((m, exp.checked_sub(frac.len() as i64)?))
}

fn scientific(negative: bool, digits: &str, e: i64) -> String {
    let trimmed = digits.trim_end_matches('0');
    let trimmed = if trimmed.is_empty() { "0" } else { trimmed };
    let exp = e + digits.len() as i64 - 1;
    let sign = if negative { "-" } else { "" };
    match trimmed.len() {
        1 => format!("{sign}{trimmed}e{exp}"),
        _ => format!("{sign}{}.{}e{exp}", &trimmed[..1], &trimmed[1..]),
    }
}

/// `digits * 10^e` rounded half-up to `sig` significant digits.
fn rounded(negative: bool, digits: &str, e: i64, sig: usize) -> String {
    if sig >= digits.len() {
        return scientific(negative, digits, e);
    }
    let mut head: Vec<u8> = digits.as_bytes()[..sig].to_vec();
    let mut exp = e + (digits.len() - sig) as i64;
    if digits.as_bytes()[sig] >= b'5' {
        let mut k = head.len();
        loop {
            if k == 0 {
                head.insert(0, b'1');
                head.pop();
                exp += 1;
                break;
            }
            k -= 1;
            if head[k] == b'9' {
                head[k] = b'0';
            } else {
                head[k] += 1;
                break;
            }
        }
    }
    let head = String::from_utf8(head).expect("ascii digits");
    scientific(negative, &head, exp)
}
