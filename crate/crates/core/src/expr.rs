//! Arithmetic expressions in `x` and `u` for user-supplied right-hand sides.
//!
//! Grammar, loosest binding first: `+ -` (left), `* /` (left), unary `-`,
//! `^` (right). So `-e^u` is `-(e^u)` and `2^3^2` is `2^(3^2)`.
//! Functions: `exp ln log sqrt sin cos abs` of one argument and `pow(a, b)`.
//! Constants: `pi`, `e`. `log` is the natural logarithm.

use alloc::boxed::Box;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use crate::scalar::{DoubleDouble, Real};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Var {
    X,
    U,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Constant {
    Pi,
    E,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

impl BinOp {
    fn symbol(self) -> char {
        match self {
            BinOp::Add => '+',
            BinOp::Sub => '-',
            BinOp::Mul => '*',
            BinOp::Div => '/',
            BinOp::Pow => '^',
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Func {
    Exp,
    Ln,
    Log,
    Sqrt,
    Sin,
    Cos,
    Abs,
    Pow,
}

impl Func {
    fn lookup(name: &str) -> Option<Func> {
        Some(match name {
            "exp" => Func::Exp,
            "ln" => Func::Ln,
            "log" => Func::Log,
            "sqrt" => Func::Sqrt,
            "sin" => Func::Sin,
            "cos" => Func::Cos,
            "abs" => Func::Abs,
            "pow" => Func::Pow,
            _ => return None,
        })
    }

    pub fn name(self) -> &'static str {
        match self {
            Func::Exp => "exp",
            Func::Ln => "ln",
            Func::Log => "log",
            Func::Sqrt => "sqrt",
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Abs => "abs",
            Func::Pow => "pow",
        }
    }

    pub fn arity(self) -> usize {
        match self {
            Func::Pow => 2,
            _ => 1,
        }
    }
}

/// Expression tree. Literals keep their source text so that printing
/// reproduces them verbatim.
#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    Num { text: String, value: DoubleDouble },
    Var(Var),
    Const(Constant),
    Neg(Box<Expr>),
    Binary(BinOp, Box<Expr>, Box<Expr>),
    Call(Func, Vec<Expr>),
}

/// Syntax error with the character offset where it was detected.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParseError {
    pub offset: usize,
    pub kind: ParseErrorKind,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ParseErrorKind {
    Empty,
    UnexpectedChar(char),
    UnknownOperator(String),
    UnknownIdentifier(String),
    BadNumber(String),
    Arity {
        func: &'static str,
        expected: usize,
        found: usize,
    },
    UnbalancedParen,
    UnexpectedToken(String),
    UnexpectedEnd,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "at offset {}: ", self.offset)?;
        match &self.kind {
            ParseErrorKind::Empty => write!(f, "empty expression"),
            ParseErrorKind::UnexpectedChar(c) => write!(f, "unexpected character '{c}'"),
            ParseErrorKind::UnknownOperator(op) => write!(f, "unknown operator '{op}'"),
            ParseErrorKind::UnknownIdentifier(id) => write!(f, "unknown identifier '{id}'"),
            ParseErrorKind::BadNumber(s) => write!(f, "malformed number '{s}'"),
            ParseErrorKind::Arity {
                func,
                expected,
                found,
            } => write!(f, "{func} takes {expected} argument(s), got {found}"),
            ParseErrorKind::UnbalancedParen => write!(f, "unbalanced parenthesis"),
            ParseErrorKind::UnexpectedToken(t) => write!(f, "unexpected '{t}'"),
            ParseErrorKind::UnexpectedEnd => write!(f, "unexpected end of expression"),
        }
    }
}

/// Domain error raised while evaluating an expression.
#[derive(Clone, Debug, PartialEq)]
pub struct EvalError {
    pub kind: EvalErrorKind,
    /// Printed form of the failing sub-expression.
    pub expr: String,
    /// Offending operand (the divisor, the logarithm argument, ...).
    pub value: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EvalErrorKind {
    DivisionByZero,
    LogOfNonPositive,
    SqrtOfNegative,
    NegativeBaseFractionalPower,
    NonFinite,
}

impl fmt::Display for EvalError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let what = match self.kind {
            EvalErrorKind::DivisionByZero => "division by zero",
            EvalErrorKind::LogOfNonPositive => "logarithm of non-positive value",
            EvalErrorKind::SqrtOfNegative => "square root of negative value",
            EvalErrorKind::NegativeBaseFractionalPower => {
                "negative base raised to a non-integer power"
            }
            EvalErrorKind::NonFinite => "non-finite result",
        };
        write!(f, "{what} {} in {}", self.value, self.expr)
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(String),
    Ident(String),
    Op(char),
    LParen,
    RParen,
    Comma,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Num(s) | Tok::Ident(s) => s.clone(),
            Tok::Op(c) => c.to_string(),
            Tok::LParen => "(".into(),
            Tok::RParen => ")".into(),
            Tok::Comma => ",".into(),
        }
    }
}

fn tokenize(text: &str) -> Result<Vec<(usize, Tok)>, ParseError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    let err = |offset, kind| Err(ParseError { offset, kind });
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        let start = i;
        if c.is_ascii_digit() || c == '.' {
            while i < chars.len() && (chars[i].is_ascii_digit() || chars[i] == '.') {
                i += 1;
            }
            if i < chars.len() && (chars[i] == 'e' || chars[i] == 'E') {
                let mut j = i + 1;
                if j < chars.len() && (chars[j] == '+' || chars[j] == '-') {
                    j += 1;
                }
                if j < chars.len() && chars[j].is_ascii_digit() {
                    while j < chars.len() && chars[j].is_ascii_digit() {
                        j += 1;
                    }
                    i = j;
                }
            }
            let s: String = chars[start..i].iter().collect();
            if s.chars().filter(|&c| c == '.').count() > 1 || s.starts_with(".e") || s == "." {
                return err(start, ParseErrorKind::BadNumber(s));
            }
            out.push((start, Tok::Num(s)));
        } else if c.is_ascii_alphabetic() || c == '_' {
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            out.push((start, Tok::Ident(chars[start..i].iter().collect())));
        } else {
            let tok = match c {
                '+' | '-' | '*' | '/' | '^' => Tok::Op(c),
                '(' => Tok::LParen,
                ')' => Tok::RParen,
                ',' => Tok::Comma,
                _ => return err(start, ParseErrorKind::UnexpectedChar(c)),
            };
            if let Tok::Op(a) = tok {
                if let Some(&b) = chars.get(i + 1) {
                    if matches!(b, '*' | '/' | '^') || (a == '^' && b == '^') {
                        let mut op = String::new();
                        op.push(a);
                        op.push(b);
                        return err(start, ParseErrorKind::UnknownOperator(op));
                    }
                }
            }
            out.push((start, tok));
            i += 1;
        }
    }
    Ok(out)
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    pos: usize,
    end: usize,
}

const UNARY_PREC: u8 = 3;

fn binary_prec(op: char) -> Option<(u8, BinOp, bool)> {
    // (precedence, operator, right associative)
    Some(match op {
        '+' => (1, BinOp::Add, false),
        '-' => (1, BinOp::Sub, false),
        '*' => (2, BinOp::Mul, false),
        '/' => (2, BinOp::Div, false),
        '^' => (4, BinOp::Pow, true),
        _ => return None,
    })
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(_, t)| t)
    }

    fn offset(&self) -> usize {
        self.toks.get(self.pos).map_or(self.end, |(o, _)| *o)
    }

    fn fail<T>(&self, kind: ParseErrorKind) -> Result<T, ParseError> {
        Err(ParseError {
            offset: self.offset(),
            kind,
        })
    }

    fn expr(&mut self, min_prec: u8) -> Result<Expr, ParseError> {
        let mut lhs = self.unary()?;
        while let Some(Tok::Op(c)) = self.peek() {
            let (prec, op, right) = binary_prec(*c).expect("tokenizer only emits known operators");
            if prec < min_prec {
                break;
            }
            self.pos += 1;
            let rhs = self.expr(if right { prec } else { prec + 1 })?;
            lhs = Expr::Binary(op, Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        match self.peek() {
            Some(Tok::Op('-')) => {
                self.pos += 1;
                Ok(Expr::Neg(Box::new(self.expr(UNARY_PREC)?)))
            }
            Some(Tok::Op('+')) => {
                self.pos += 1;
                self.expr(UNARY_PREC)
            }
            _ => self.primary(),
        }
    }

    fn primary(&mut self) -> Result<Expr, ParseError> {
        let Some((offset, tok)) = self.toks.get(self.pos).cloned() else {
            return self.fail(ParseErrorKind::UnexpectedEnd);
        };
        self.pos += 1;
        match tok {
            Tok::Num(text) => match text.parse::<DoubleDouble>() {
                Ok(value) => Ok(Expr::Num { text, value }),
                Err(_) => Err(ParseError {
                    offset,
                    kind: ParseErrorKind::BadNumber(text),
                }),
            },
            Tok::Ident(name) => {
                if self.peek() == Some(&Tok::LParen) {
                    let Some(func) = Func::lookup(&name) else {
                        return Err(ParseError {
                            offset,
                            kind: ParseErrorKind::UnknownIdentifier(name),
                        });
                    };
                    self.pos += 1;
                    let args = self.arguments()?;
                    if args.len() != func.arity() {
                        return Err(ParseError {
                            offset,
                            kind: ParseErrorKind::Arity {
                                func: func.name(),
                                expected: func.arity(),
                                found: args.len(),
                            },
                        });
                    }
                    return Ok(Expr::Call(func, args));
                }
                match name.as_str() {
                    "x" => Ok(Expr::Var(Var::X)),
                    "u" => Ok(Expr::Var(Var::U)),
                    "pi" => Ok(Expr::Const(Constant::Pi)),
                    "e" => Ok(Expr::Const(Constant::E)),
                    _ => Err(ParseError {
                        offset,
                        kind: if Func::lookup(&name).is_some() {
                            ParseErrorKind::Arity {
                                func: Func::lookup(&name).unwrap().name(),
                                expected: Func::lookup(&name).unwrap().arity(),
                                found: 0,
                            }
                        } else {
                            ParseErrorKind::UnknownIdentifier(name)
                        },
                    }),
                }
            }
            Tok::LParen => {
                let inner = self.expr(1)?;
                match self.peek() {
                    Some(Tok::RParen) => {
                        self.pos += 1;
                        Ok(inner)
                    }
                    None => Err(ParseError {
                        offset,
                        kind: ParseErrorKind::UnbalancedParen,
                    }),
                    Some(t) => self.fail(ParseErrorKind::UnexpectedToken(t.describe())),
                }
            }
            Tok::RParen => Err(ParseError {
                offset,
                kind: ParseErrorKind::UnbalancedParen,
            }),
            other => Err(ParseError {
                offset,
                kind: ParseErrorKind::UnexpectedToken(other.describe()),
            }),
        }
    }

    /// Arguments after an opening parenthesis, through the closing one.
    fn arguments(&mut self) -> Result<Vec<Expr>, ParseError> {
        let open = self.toks[self.pos - 1].0;
        let mut args = Vec::new();
        if self.peek() == Some(&Tok::RParen) {
            self.pos += 1;
            return Ok(args);
        }
        loop {
            args.push(self.expr(1)?);
            match self.peek() {
                Some(Tok::Comma) => self.pos += 1,
                Some(Tok::RParen) => {
                    self.pos += 1;
                    return Ok(args);
                }
                None => {
                    return Err(ParseError {
                        offset: open,
                        kind: ParseErrorKind::UnbalancedParen,
                    })
                }
                Some(t) => return self.fail(ParseErrorKind::UnexpectedToken(t.describe())),
            }
        }
    }
}

/// Parses a right-hand side such as `1/2 - 1/(8*u^2)`.
pub fn parse_rhs(text: &str) -> Result<Expr, ParseError> {
    let toks = tokenize(text)?;
    let end = text.chars().count();
    if toks.is_empty() {
        return Err(ParseError {
            offset: 0,
            kind: ParseErrorKind::Empty,
        });
    }
    let mut p = Parser { toks, pos: 0, end };
    let e = p.expr(1)?;
    match p.peek() {
        None => Ok(e),
        Some(Tok::RParen) => p.fail(ParseErrorKind::UnbalancedParen),
        Some(t) => p.fail(ParseErrorKind::UnexpectedToken(t.describe())),
    }
}

impl core::str::FromStr for Expr {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, ParseError> {
        parse_rhs(s)
    }
}

/// Largest exponent evaluated by repeated multiplication.
const MAX_INT_POWER: i64 = 1 << 20;

fn as_small_integer<S: Real>(v: S) -> Option<i32> {
    if v.floor() == v && v.abs() <= S::from_i64(MAX_INT_POWER) {
        Some(v.to_f64() as i32)
    } else {
        None
    }
}

impl Expr {
    /// Evaluates the expression at `(x, u)` in the precision of `S`.
    pub fn eval<S: Real>(&self, x: S, u: S) -> Result<S, EvalError> {
        let fail = |kind, value: S| {
            Err(EvalError {
                kind,
                expr: self.to_string(),
                value: value.to_f64(),
            })
        };
        let v = match self {
            Expr::Num { value, .. } => S::from_dd(*value),
            Expr::Var(Var::X) => x,
            Expr::Var(Var::U) => u,
            Expr::Const(Constant::Pi) => S::pi(),
            Expr::Const(Constant::E) => S::e(),
            Expr::Neg(a) => -a.eval(x, u)?,
            Expr::Binary(op, a, b) => {
                let a = a.eval(x, u)?;
                let b = b.eval(x, u)?;
                match op {
                    BinOp::Add => a + b,
                    BinOp::Sub => a - b,
                    BinOp::Mul => a * b,
                    BinOp::Div => {
                        if b == S::zero() {
                            return fail(EvalErrorKind::DivisionByZero, b);
                        }
                        a / b
                    }
                    BinOp::Pow => match power(a, b) {
                        Some(v) => v,
                        None if a == S::zero() => {
                            return fail(EvalErrorKind::DivisionByZero, a)
                        }
                        None => return fail(EvalErrorKind::NegativeBaseFractionalPower, a),
                    },
                }
            }
            Expr::Call(func, args) => {
                let a = args[0].eval(x, u)?;
                match func {
                    Func::Exp => a.exp(),
                    Func::Ln | Func::Log => {
                        if a <= S::zero() {
                            return fail(EvalErrorKind::LogOfNonPositive, a);
                        }
                        a.ln()
                    }
                    Func::Sqrt => {
                        if a < S::zero() {
                            return fail(EvalErrorKind::SqrtOfNegative, a);
                        }
                        a.sqrt()
                    }
                    Func::Sin => a.sin(),
                    Func::Cos => a.cos(),
                    Func::Abs => a.abs(),
                    Func::Pow => {
                        let b = args[1].eval(x, u)?;
                        match power(a, b) {
                            Some(v) => v,
                            None if a == S::zero() => {
                                return fail(EvalErrorKind::DivisionByZero, a)
                            }
                            None => {
                                return fail(EvalErrorKind::NegativeBaseFractionalPower, a)
                            }
                        }
                    }
                }
            }
        };
        if !v.is_finite() {
            return fail(EvalErrorKind::NonFinite, v);
        }
        Ok(v)
    }

    /// True if the expression mentions `u`.
    pub fn depends_on_u(&self) -> bool {
        match self {
            Expr::Var(Var::U) => true,
            Expr::Num { .. } | Expr::Var(Var::X) | Expr::Const(_) => false,
            Expr::Neg(a) => a.depends_on_u(),
            Expr::Binary(_, a, b) => a.depends_on_u() || b.depends_on_u(),
            Expr::Call(_, args) => args.iter().any(Expr::depends_on_u),
        }
    }
}

/// `a^b`; `None` for a negative base with a fractional exponent or for a
/// zero base with a negative exponent.
fn power<S: Real>(a: S, b: S) -> Option<S> {
    if let Some(n) = as_small_integer(b) {
        if a == S::zero() && n < 0 {
            return None;
        }
        return Some(a.powi(n));
    }
    if a > S::zero() {
        Some(a.powf(b))
    } else if a == S::zero() && b > S::zero() {
        Some(S::zero())
    } else {
        None
    }
}

/// Fully parenthesized canonical form; parsing it gives back the same tree.
impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Num { text, .. } => f.write_str(text),
            Expr::Var(Var::X) => f.write_str("x"),
            Expr::Var(Var::U) => f.write_str("u"),
            Expr::Const(Constant::Pi) => f.write_str("pi"),
            Expr::Const(Constant::E) => f.write_str("e"),
            Expr::Neg(a) => write!(f, "(-{a})"),
            Expr::Binary(op, a, b) => write!(f, "({a} {} {b})", op.symbol()),
            Expr::Call(func, args) => {
                write!(f, "{}(", func.name())?;
                for (k, a) in args.iter().enumerate() {
                    if k > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{a}")?;
                }
                f.write_str(")")
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn eval(s: &str, x: f64, u: f64) -> Result<f64, EvalError> {
        parse_rhs(s).unwrap().eval(x, u)
    }

    #[test]
    fn parses_function_call() {
        assert_eq!(
            parse_rhs("exp(u)").unwrap(),
            Expr::Call(Func::Exp, alloc::vec![Expr::Var(Var::U)])
        );
    }

    #[test]
    fn membrane_rhs() {
        assert_eq!(eval("1/2 - 1/(8*u^2)", 0.3, 1.0).unwrap(), 0.375);
    }

    #[test]
    fn double_star_is_rejected() {
        let e = parse_rhs("2**u").unwrap_err();
        assert_eq!(e.offset, 1);
        assert_eq!(e.kind, ParseErrorKind::UnknownOperator("**".into()));
    }

    #[test]
    fn evaluation_examples() {
        assert_eq!(eval("x^2 + u", 0.5, 1.0).unwrap(), 1.25);
        assert_eq!(eval("-e^u", 0.7, 0.0).unwrap(), -1.0);
        let err = eval("ln(x)", 0.0, 1.0).unwrap_err();
        assert_eq!(err.kind, EvalErrorKind::LogOfNonPositive);
        assert_eq!(err.value, 0.0);
        assert_eq!(err.expr, "ln(x)");
        assert_eq!(eval("1/(u-1)", 0.0, 1.0).unwrap_err().kind, EvalErrorKind::DivisionByZero);
        assert_eq!(eval("sqrt(u)", 0.0, -1.0).unwrap_err().kind, EvalErrorKind::SqrtOfNegative);
    }

    #[test]
    fn precedence_and_associativity() {
        assert_eq!(eval("2^3^2", 0.0, 0.0).unwrap(), 512.0);
        assert_eq!(eval("10-4-3", 0.0, 0.0).unwrap(), 3.0);
        assert_eq!(eval("12/3/2", 0.0, 0.0).unwrap(), 2.0);
        assert_eq!(eval("-2^2", 0.0, 0.0).unwrap(), -4.0);
        assert_eq!(eval("2^-1", 0.0, 0.0).unwrap(), 0.5);
        assert_eq!(eval("1+2*3", 0.0, 0.0).unwrap(), 7.0);
        assert_eq!(eval("pow(2, 10)", 0.0, 0.0).unwrap(), 1024.0);
        assert_eq!(eval("log(e)", 0.0, 0.0).unwrap(), 1.0);
        assert!((eval("x^1.5", 4.0, 0.0).unwrap() - 8.0).abs() < 1e-14);
        assert_eq!(eval("(-8)^(1/3)", 0.0, 0.0).unwrap_err().kind,
            EvalErrorKind::NegativeBaseFractionalPower);
    }

    #[test]
    fn syntax_errors_have_offsets() {
        let cases: &[(&str, usize)] = &[
            ("", 0),
            ("foo(u)", 0),
            ("x + y", 4),
            ("exp(u", 3),
            ("(x + 1", 0),
            ("x + 1)", 5),
            ("pow(x)", 0),
            ("sin(x, u)", 0),
            ("x $ 2", 2),
            ("x +", 3),
            ("2 3", 2),
        ];
        for &(text, offset) in cases {
            let e = parse_rhs(text).unwrap_err();
            assert_eq!(e.offset, offset, "{text}: {e}");
        }
        assert!(matches!(
            parse_rhs("sqrt").unwrap_err().kind,
            ParseErrorKind::Arity { .. }
        ));
    }

    #[test]
    fn canonical_printing() {
        let e = parse_rhs("-e^u + 2*x").unwrap();
        assert_eq!(e.to_string(), "((-(e ^ u)) + (2 * x))");
        assert!(parse_rhs("1 + x").unwrap().depends_on_u() == false);
        assert!(parse_rhs("exp(u)").unwrap().depends_on_u());
    }

    #[test]
    fn literals_keep_extended_digits() {
        let e = parse_rhs("0.1").unwrap();
        let v: DoubleDouble = e.eval(DoubleDouble::from(0.0), DoubleDouble::from(0.0)).unwrap();
        let tenth = DoubleDouble::from(1.0) / DoubleDouble::from(10.0);
        assert!((v - tenth).abs() < DoubleDouble::from(1e-32));
    }

    fn arb_expr() -> impl Strategy<Value = String> {
        let leaf = prop_oneof![
            Just("x".to_string()),
            Just("u".to_string()),
            Just("pi".to_string()),
            Just("e".to_string()),
            (0u32..1000).prop_map(|n| n.to_string()),
            (0u32..1000, 1u32..100).prop_map(|(a, b)| alloc::format!("{a}.{b}")),
        ];
        leaf.prop_recursive(4, 32, 3, |inner| {
            prop_oneof![
                (inner.clone(), inner.clone(), prop_oneof![Just('+'), Just('-'), Just('*'), Just('/'), Just('^')])
                    .prop_map(|(a, b, op)| alloc::format!("{a} {op} {b}")),
                inner.clone().prop_map(|a| alloc::format!("-{a}")),
                inner.clone().prop_map(|a| alloc::format!("({a})")),
                (inner.clone(), prop_oneof![Just("exp"), Just("sin"), Just("abs"), Just("ln")])
                    .prop_map(|(a, f)| alloc::format!("{f}({a})")),
                (inner.clone(), inner).prop_map(|(a, b)| alloc::format!("pow({a}, {b})")),
            ]
        })
    }

    proptest! {
        #[test]
        fn print_parse_is_idempotent(src in arb_expr()) {
            let first = parse_rhs(&src).unwrap();
            let printed = first.to_string();
            let second = parse_rhs(&printed).unwrap();
            prop_assert_eq!(&first, &second);
            prop_assert_eq!(printed, second.to_string());
        }
    }
}
