//! Registry of benchmark problems.
//!
//! | id   | beta | alpha      | f(x, u)                   | boundary          |
//! |------|------|------------|---------------------------|-------------------|
//! | ex1  | 1    | 0          | `e^u`                     | Dirichlet         |
//! | ex2a | 1    | 0          | `-0.5 e^u`                | Dirichlet         |
//! | ex2b | 1    | 0          | `-e^u`                    | Dirichlet         |
//! | ex2c | 2    | 0          | `-0.5 e^u`                | Dirichlet         |
//! | ex2d | 2    | 0          | `-e^u`                    | Dirichlet         |
//! | ex3  | 2    | `sqrt(3/4)`| `-u^5`                    | Dirichlet         |
//! | ex4  | 3    | 1          | `1/2 - 1/(8u^2)`          | Dirichlet         |
//! | ex5  | 2    | 1          | `u/(1 + 0.1u)`            | Dirichlet         |
//! | ex6  | 3/2  | `sqrt(2)`  | see [`EX6_RHS`]           | Dirichlet         |
//! | ex7  | 2    | 0          | `-e^(-u)`                 | `2u(1) + u'(1)=0` |

use alloc::string::String;

use crate::expr::{parse_rhs, Expr};
use crate::scalar::Real;
use crate::solver::{Beta, Boundary, ProblemSpec};

/// `u''(x) + (beta/x) u'(x) = 1/(x^2+1)^(3/2) + 1.5/sqrt(x^2+1) - 1 + e^(-sqrt(x^2+1)) e^u`
pub const EX6_RHS: &str = "1/(x^2+1)^(3/2) + 1.5/sqrt(x^2+1) - 1 + exp(-sqrt(x^2+1))*exp(u)";

/// A benchmark problem.
#[derive(Clone, Debug)]
pub struct ExampleDef<S> {
    pub id: &'static str,
    pub spec: ProblemSpec<S>,
    /// Source text of the right-hand side.
    pub rhs_text: &'static str,
    /// Closed-form solution, if known.
    pub exact: Option<fn(S) -> S>,
    /// `(u'(x), u''(x))` of the closed-form solution.
    pub exact_derivatives: Option<fn(S) -> (S, S)>,
    pub citation: &'static str,
    /// Bounds `(M, L)` under which the contraction test passes.
    pub bounds: Option<(S, S)>,
}

fn d_ex1<S: Real>() -> S {
    S::from_i64(2) * S::from_i64(6).sqrt() - S::from_i64(5)
}

fn d_ex2b<S: Real>() -> S {
    S::from_i64(3) - S::from_i64(2) * S::from_i64(2).sqrt()
}

/// `2 ln((d+1)/(d x^2 + 1))`
fn log_family<S: Real>(d: S, x: S) -> S {
    S::from_i64(2) * ((d + S::one()) / (d * x * x + S::one())).ln()
}

fn log_family_derivs<S: Real>(d: S, x: S) -> (S, S) {
    let den = S::one() + d * x * x;
    let four = S::from_i64(4);
    let du = -four * d * x / den;
    let d2u = (four * d * d * x * x - four * d) / (den * den);
    (du, d2u)
}

fn ex1_exact<S: Real>(x: S) -> S {
    log_family(d_ex1(), x)
}

fn ex1_derivs<S: Real>(x: S) -> (S, S) {
    log_family_derivs(d_ex1(), x)
}

fn ex2b_exact<S: Real>(x: S) -> S {
    log_family(d_ex2b(), x)
}

fn ex2b_derivs<S: Real>(x: S) -> (S, S) {
    log_family_derivs(d_ex2b(), x)
}

fn ex3_exact<S: Real>(x: S) -> S {
    (S::from_i64(3) / (S::from_i64(3) + x * x)).sqrt()
}

fn ex3_derivs<S: Real>(x: S) -> (S, S) {
    let r3 = S::from_i64(3).sqrt();
    let w = S::from_i64(3) + x * x;
    let w32 = w * w.sqrt();
    let w52 = w32 * w;
    (
        -r3 * x / w32,
        -r3 / w32 + S::from_i64(3) * r3 * x * x / w52,
    )
}

fn ex6_exact<S: Real>(x: S) -> S {
    (x * x + S::one()).sqrt()
}

fn ex6_derivs<S: Real>(x: S) -> (S, S) {
    let w = (x * x + S::one()).sqrt();
    (x / w, S::one() / (w * w * w))
}

fn rhs(text: &str) -> Expr {
    parse_rhs(text).expect("registry expressions are valid")
}

struct Entry<S> {
    id: &'static str,
    beta: Beta,
    alpha: S,
    rhs: &'static str,
    boundary: Boundary<S>,
    exact: Option<(fn(S) -> S, fn(S) -> (S, S))>,
    citation: &'static str,
    bounds: Option<(S, S)>,
}

fn build<S: Real>(e: Entry<S>) -> ExampleDef<S> {
    let mut spec = ProblemSpec::new(e.beta, e.alpha, rhs(e.rhs));
    spec.boundary = e.boundary;
    ExampleDef {
        id: e.id,
        spec,
        rhs_text: e.rhs,
        exact: e.exact.map(|p| p.0),
        exact_derivatives: e.exact.map(|p| p.1),
        citation: e.citation,
        bounds: e.bounds,
    }
}

/// All benchmark problems in a fixed order.
pub fn registry<S: Real>() -> alloc::vec::Vec<ExampleDef<S>> {
    let zero = S::zero();
    let e = S::e();
    let half = S::ratio(1, 2);
    let four = S::from_i64(4);
    let dirichlet = Boundary::Dirichlet;
    [
        Entry {
            id: "ex1",
            beta: Beta::One,
            alpha: zero,
            rhs: "exp(u)",
            boundary: dirichlet,
            exact: Some((ex1_exact::<S>, ex1_derivs::<S>)),
            citation: "Example 1, exponential source",
            bounds: Some((four, e)),
        },
        Entry {
            id: "ex2a",
            beta: Beta::One,
            alpha: zero,
            rhs: "-0.5*exp(u)",
            boundary: dirichlet,
            exact: None,
            citation: "Example 2, beta = 1, mu = 0.5",
            bounds: Some((four, half * e)),
        },
        Entry {
            id: "ex2b",
            beta: Beta::One,
            alpha: zero,
            rhs: "-exp(u)",
            boundary: dirichlet,
            exact: Some((ex2b_exact::<S>, ex2b_derivs::<S>)),
            citation: "Example 2, beta = 1, mu = 1",
            bounds: Some((four, e)),
        },
        Entry {
            id: "ex2c",
            beta: Beta::Int(2),
            alpha: zero,
            rhs: "-0.5*exp(u)",
            boundary: dirichlet,
            exact: None,
            citation: "Example 2, beta = 2, mu = 0.5",
            bounds: None,
        },
        Entry {
            id: "ex2d",
            beta: Beta::Int(2),
            alpha: zero,
            rhs: "-exp(u)",
            boundary: dirichlet,
            exact: None,
            citation: "Example 2, beta = 2, mu = 1",
            bounds: None,
        },
        Entry {
            id: "ex3",
            beta: Beta::Int(2),
            alpha: S::ratio(3, 4).sqrt(),
            rhs: "-u^5",
            boundary: dirichlet,
            exact: Some((ex3_exact::<S>, ex3_derivs::<S>)),
            citation: "Example 3, isothermal gas sphere",
            bounds: None,
        },
        Entry {
            id: "ex4",
            beta: Beta::Int(3),
            alpha: S::one(),
            rhs: "1/2 - 1/(8*u^2)",
            boundary: dirichlet,
            exact: None,
            citation: "Example 4, shallow membrane cap",
            bounds: None,
        },
        Entry {
            id: "ex5",
            beta: Beta::Int(2),
            alpha: S::one(),
            rhs: "u/(1 + 0.1*u)",
            boundary: dirichlet,
            exact: None,
            citation: "Example 5, electroactive polymer film",
            bounds: None,
        },
        Entry {
            id: "ex6",
            beta: Beta::Rational { r: 3, s: 2 },
            alpha: S::from_i64(2).sqrt(),
            rhs: EX6_RHS,
            boundary: dirichlet,
            exact: Some((ex6_exact::<S>, ex6_derivs::<S>)),
            citation: "Example 6, fractional beta",
            bounds: None,
        },
        Entry {
            id: "ex7",
            beta: Beta::Int(2),
            alpha: zero,
            rhs: "-exp(-u)",
            boundary: Boundary::Robin {
                mu: S::from_i64(2),
                sigma: S::one(),
            },
            exact: None,
            citation: "Example 7, heat conduction in the human head",
            bounds: None,
        },
    ]
    .into_iter()
    .map(build)
    .collect()
}

/// Looks up an example by id (case-insensitive).
pub fn find<S: Real>(id: &str) -> Option<ExampleDef<S>> {
    registry().into_iter().find(|e| e.id.eq_ignore_ascii_case(id))
}

/// Comma-separated list of registry ids.
pub fn ids() -> String {
    let mut out = String::new();
    for (k, e) in registry::<f64>().iter().enumerate() {
        if k > 0 {
            out.push_str(", ");
        }
        out.push_str(e.id);
    }
    out
}
