//! Flat `key = value` problem definitions.
//!
//! ```text
//! # membrane cap
//! beta = 3
//! alpha = 1
//! rhs = 1/2 - 1/(8*u^2)
//! boundary = dirichlet
//! ```
//!
//! Keys: `beta` (`1`, an integer or `r/s`), `alpha` (default `0`), `rhs`,
//! `boundary` (`dirichlet` or `robin <mu> <sigma>`, default `dirichlet`)
//! and `exact`, an optional expression in `x`. `key: value` is accepted
//! too. Blank lines and lines starting with `#` are skipped.

use std::fmt;

use lane8_core::expr::{parse_rhs, Expr, Var};
use lane8_core::{Beta, Boundary, ProblemSpec};

use crate::decimal::Decimal;

/// A parsed problem file.
#[derive(Debug)]
pub struct ProblemFile<S> {
    pub spec: ProblemSpec<S>,
    pub exact: Option<Expr>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FileError {
    /// 1-based; 0 for errors that concern the whole file.
    pub line: usize,
    pub message: String,
}

impl fmt::Display for FileError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.line {
            0 => f.write_str(&self.message),
            n => write!(f, "line {n}: {}", self.message),
        }
    }
}

impl std::error::Error for FileError {}

fn mentions(e: &Expr, var: Var) -> bool {
    match e {
        Expr::Var(v) => *v == var,
        Expr::Num { .. } | Expr::Const(_) => false,
        Expr::Neg(a) => mentions(a, var),
        Expr::Binary(_, a, b) => mentions(a, var) || mentions(b, var),
        Expr::Call(_, args) => args.iter().any(|a| mentions(a, var)),
    }
}

/// A number written as a decimal literal or as a constant expression such
/// as `sqrt(3/4)`.
pub fn parse_constant<S: Decimal>(text: &str) -> Result<S, String> {
    if let Some(v) = S::from_decimal(text) {
        return Ok(v);
    }
    let e = parse_rhs(text).map_err(|err| format!("'{text}': {err}"))?;
    if mentions(&e, Var::X) || mentions(&e, Var::U) {
        return Err(format!("'{text}' must not depend on x or u"));
    }
    e.eval(S::zero(), S::zero())
        .map_err(|err| format!("'{text}': {err}"))
}

/// `dirichlet` or `robin <mu> <sigma>`.
pub fn parse_boundary<S: Decimal>(text: &str) -> Result<Boundary<S>, String> {
    let words: Vec<&str> = text.split_whitespace().collect();
    let boundary = match words.as_slice() {
        [w] if w.eq_ignore_ascii_case("dirichlet") => Boundary::Dirichlet,
        [w, mu, sigma] if w.eq_ignore_ascii_case("robin") => Boundary::Robin {
            mu: parse_constant(mu)?,
            sigma: parse_constant(sigma)?,
        },
        _ => return Err(format!("boundary must be 'dirichlet' or 'robin <mu> <sigma>', got '{text}'")),
    };
    boundary.validate().map_err(|e| e.to_string())?;
    Ok(boundary)
}

/// An expression for the closed-form solution; it may only use `x`.
pub fn parse_exact(text: &str) -> Result<Expr, String> {
    let e = parse_rhs(text).map_err(|err| format!("'{text}': {err}"))?;
    if mentions(&e, Var::U) {
        return Err("the exact solution must not depend on u".into());
    }
    Ok(e)
}

pub fn parse<S: Decimal>(text: &str) -> Result<ProblemFile<S>, FileError> {
    const KEYS: [&str; 5] = ["beta", "alpha", "rhs", "boundary", "exact"];
    let mut values: [Option<(usize, &str)>; 5] = [None; 5];
    for (k, raw) in text.lines().enumerate() {
        let line = k + 1;
        let body = raw.trim();
        if body.is_empty() || body.starts_with('#') {
            continue;
        }
        let err = |message: String| FileError { line, message };
        let Some(split) = body.find(['=', ':']) else {
            return Err(err(format!("expected 'key = value', got '{body}'")));
        };
        let key = body[..split].trim().to_ascii_lowercase();
        let value = body[split + 1..].trim();
        let Some(slot) = KEYS.iter().position(|&k| k == key) else {
            return Err(err(format!("unknown key '{key}'")));
        };
        if values[slot].is_some() {
            return Err(err(format!("duplicate key '{key}'")));
        }
        values[slot] = Some((line, value));
    }
    let at = |line: usize| move |message: String| FileError { line, message };
    let [beta, alpha, rhs, boundary, exact] = values;
    let (line, beta) = beta.ok_or(FileError {
        line: 0,
        message: "missing key 'beta'".into(),
    })?;
    let beta: Beta = beta.parse().map_err(|e: lane8_core::Error| at(line)(e.to_string()))?;
    let (line, rhs) = rhs.ok_or(FileError {
        line: 0,
        message: "missing key 'rhs'".into(),
    })?;
    let rhs = parse_rhs(rhs).map_err(|e| at(line)(e.to_string()))?;
    let alpha = match alpha {
        Some((line, text)) => parse_constant(text).map_err(at(line))?,
        None => S::zero(),
    };
    let boundary = match boundary {
        Some((line, text)) => parse_boundary(text).map_err(at(line))?,
        None => Boundary::Dirichlet,
    };
    let exact = match exact {
        Some((line, text)) => Some(parse_exact(text).map_err(at(line))?),
        None => None,
    };
    let mut spec = ProblemSpec::new(beta, alpha, rhs);
    spec.boundary = boundary;
    Ok(ProblemFile { spec, exact })
}
