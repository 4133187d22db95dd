//! Problem definition and the fixed-point drivers.
//!
//! One iteration maps a source `Phi_k` on the grid to the discrete solution
//! `U_k` of the linear problem with that source (a "step"), then updates
//! `Phi_{k+1}(x_i) = f(x_i, U_k(x_i))`. Starting from `Phi_0 = f(x, 0)` the
//! loop stops once `||Phi_{k+1} - Phi_k|| <= tol`.
//!
//! * beta = 1 uses [`method1_step`] (logarithmic kernel).
//! * integer beta = n >= 2 uses [`method2_step`].
//! * rational beta = r/s substitutes `x = y^s`, which turns the equation into
//!   `v'' + ((r - s + 1)/y) v' = s^2 y^(2s-2) f(y^s, v)` with an integer
//!   coefficient, solved by method 2 on a uniform `y` grid.
//! * Robin conditions shift the kernel by `-sigma/mu` ([`robin_step`]).

use alloc::sync::Arc;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use crate::error::Error;
use crate::expr::{EvalError, Expr};
use crate::grid::{GridFunction, UniformGrid};
use crate::quadrature::{BetaCase, QuadPlan};
use crate::scalar::{Precision, Real};

fn gcd(mut a: u32, mut b: u32) -> u32 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

/// The coefficient `beta` of the singular term, tagged by structure.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Beta {
    One,
    Int(u32),
    /// `r/s` in lowest terms with `r > s > 1`.
    Rational { r: u32, s: u32 },
}

impl Beta {
    /// `r/s` reduced to lowest terms; values below 1 are rejected.
    pub fn ratio(r: u32, s: u32) -> Result<Beta, Error> {
        if s == 0 {
            return Err(Error::InvalidParameter("beta denominator must be positive"));
        }
        if r < s {
            return Err(Error::InvalidParameter("beta must be >= 1"));
        }
        let g = gcd(r, s);
        let (r, s) = (r / g, s / g);
        Ok(match (r, s) {
            (1, 1) => Beta::One,
            (n, 1) => Beta::Int(n),
            (r, s) => Beta::Rational { r, s },
        })
    }

    pub fn integer(n: u32) -> Result<Beta, Error> {
        Beta::ratio(n, 1)
    }

    pub fn value<S: Real>(self) -> S {
        match self {
            Beta::One => S::one(),
            Beta::Int(n) => S::from_i64(n.into()),
            Beta::Rational { r, s } => S::ratio(r.into(), s.into()),
        }
    }
}

impl fmt::Display for Beta {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Beta::One => f.write_str("1"),
            Beta::Int(n) => write!(f, "{n}"),
            Beta::Rational { r, s } => write!(f, "{r}/{s}"),
        }
    }
}

impl FromStr for Beta {
    type Err = Error;

    /// Accepts `"1"`, `"3"` or `"3/2"`.
    fn from_str(text: &str) -> Result<Beta, Error> {
        let bad = Error::InvalidParameter("beta must be a positive integer or r/s");
        let num = |t: &str| t.trim().parse::<u32>().map_err(|_| bad.clone());
        match text.split_once('/') {
            Some((r, s)) => Beta::ratio(num(r)?, num(s)?),
            None => Beta::integer(num(text)?),
        }
    }
}

/// Condition imposed at `x = 1`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Boundary<S> {
    /// `u(1) = alpha`
    Dirichlet,
    /// `mu u(1) + sigma u'(1) = alpha`
    Robin { mu: S, sigma: S },
}

impl<S: Real> Boundary<S> {
    pub fn validate(&self) -> Result<(), Error> {
        match *self {
            Boundary::Dirichlet => Ok(()),
            Boundary::Robin { mu, sigma } => {
                if !(mu > S::zero()) {
                    Err(Error::InvalidParameter("Robin mu must be > 0"))
                } else if !(sigma >= S::zero()) {
                    Err(Error::InvalidParameter("Robin sigma must be >= 0"))
                } else {
                    Ok(())
                }
            }
        }
    }
}

/// Right-hand side `f(x, u)`.
pub trait Rhs<S>: Send + Sync {
    fn eval(&self, x: S, u: S) -> Result<S, EvalError>;
}

impl<S: Real> Rhs<S> for Expr {
    fn eval(&self, x: S, u: S) -> Result<S, EvalError> {
        Expr::eval(self, x, u)
    }
}

impl<S, F> Rhs<S> for F
where
    F: Fn(S, S) -> S + Send + Sync,
{
    fn eval(&self, x: S, u: S) -> Result<S, EvalError> {
        Ok(self(x, u))
    }
}

/// A boundary value problem instance.
#[derive(Clone)]
pub struct ProblemSpec<S> {
    pub beta: Beta,
    pub alpha: S,
    pub rhs: Arc<dyn Rhs<S>>,
    pub boundary: Boundary<S>,
}

impl<S: Real> ProblemSpec<S> {
    pub fn new(beta: Beta, alpha: S, rhs: impl Rhs<S> + 'static) -> Self {
        ProblemSpec {
            beta,
            alpha,
            rhs: Arc::new(rhs),
            boundary: Boundary::Dirichlet,
        }
    }

    pub fn with_boundary(mut self, boundary: Boundary<S>) -> Result<Self, Error> {
        boundary.validate()?;
        self.boundary = boundary;
        Ok(self)
    }
}

impl<S: fmt::Debug> fmt::Debug for ProblemSpec<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ProblemSpec")
            .field("beta", &self.beta)
            .field("alpha", &self.alpha)
            .field("boundary", &self.boundary)
            .finish_non_exhaustive()
    }
}

/// Contraction test for caller-supplied bounds `|f| <= M` and Lipschitz
/// constant `L` in `u`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WellPosedness<S> {
    pub big_m: S,
    pub lipschitz: S,
    /// `L / (2 (beta + 1))`
    pub q: S,
    /// `|alpha| + M / (2 (beta + 1))`
    pub u_bound: S,
    /// `M / (beta + 1)`
    pub du_bound: S,
    pub contractive: bool,
}

pub fn check_wellposedness<S: Real>(
    p: &ProblemSpec<S>,
    big_m: S,
    lipschitz: S,
) -> Result<WellPosedness<S>, Error> {
    if !(big_m > S::zero()) {
        return Err(Error::InvalidParameter("M must be > 0"));
    }
    if !(lipschitz >= S::zero()) {
        return Err(Error::InvalidParameter("L must be >= 0"));
    }
    let (c0, c1) = crate::greens::bound_constants(p.beta.value::<S>())?;
    let q = lipschitz * c0;
    Ok(WellPosedness {
        big_m,
        lipschitz,
        q,
        u_bound: p.alpha.abs() + big_m * c0,
        du_bound: big_m * c1,
        contractive: q < S::one(),
    })
}

/// Iteration settings. The precision is the scalar type `S`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SolveConfig<S> {
    pub n: usize,
    pub tol: S,
    pub max_iter: usize,
}

impl<S: Real> SolveConfig<S> {
    pub const DEFAULT_MAX_ITER: usize = 100;

    /// `10^-22` in extended precision, `10^-14` in standard precision.
    pub fn default_tol() -> S {
        match S::PRECISION {
            Precision::Extended => S::parse_decimal("1e-22").expect("valid literal"),
            Precision::Standard => S::from_f64(1e-14),
        }
    }

    pub fn new(n: usize) -> Self {
        SolveConfig {
            n,
            tol: Self::default_tol(),
            max_iter: Self::DEFAULT_MAX_ITER,
        }
    }

    pub fn with_tol(mut self, tol: S) -> Self {
        self.tol = tol;
        self
    }

    pub fn with_max_iter(mut self, max_iter: usize) -> Self {
        self.max_iter = max_iter;
        self
    }

    pub fn validate(&self) -> Result<(), Error> {
        if self.n < UniformGrid::<S>::MIN_INTERVALS {
            return Err(Error::GridTooSmall {
                intervals: self.n,
                min: UniformGrid::<S>::MIN_INTERVALS,
            });
        }
        if !(self.tol > S::zero()) {
            return Err(Error::InvalidParameter("tol must be > 0"));
        }
        if self.tol < S::from_i64(50) * S::epsilon() {
            return Err(Error::InvalidParameter(
                "tol is below 50 units of roundoff of the precision mode",
            ));
        }
        if self.max_iter == 0 {
            return Err(Error::InvalidParameter("max_iter must be >= 1"));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Termination {
    Converged,
    MaxIter,
    Diverged,
}

impl Termination {
    pub fn name(self) -> &'static str {
        match self {
            Termination::Converged => "CONVERGED",
            Termination::MaxIter => "MAX_ITER",
            Termination::Diverged => "DIVERGED",
        }
    }
}

impl fmt::Display for Termination {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Result of a solve.
#[derive(Clone, Debug, PartialEq)]
pub struct SolveReport<S> {
    /// Physical nodes `x_i`; `(i/N)^s` for rational `beta = r/s`.
    pub nodes: Vec<S>,
    /// Final iterate `U_k`, indexed like `nodes`.
    pub solution: GridFunction<S>,
    /// Number of iterations `k`, equal to `residual_history.len()`.
    pub iterations: usize,
    /// `||Phi_{j+1} - Phi_j||` for `j = 0..k`.
    pub residual_history: Vec<S>,
    pub termination: Termination,
}

/// Residual growth factor, relative to the first residual, that stops the
/// iteration as divergent.
pub const DIVERGENCE_FACTOR: f64 = 1e6;

/// `U_k` for beta = 1: `alpha + L8(I2) + ln(x_i) L8(I1)`.
pub fn method1_step<S: Real>(
    plan: &QuadPlan<S>,
    phi: &GridFunction<S>,
    alpha: S,
) -> Result<GridFunction<S>, Error> {
    let (i1, i2) = plan.l8_i1_i2(phi)?;
    let grid = *plan.grid();
    let mut u = Vec::with_capacity(grid.len());
    u.push(alpha + i2[0]);
    for i in 1..grid.len() {
        u.push(alpha + i2[i] + grid.node(i).ln() * i1[i]);
    }
    GridFunction::new(grid, u)
}

/// `U_k` for beta = n:
/// `alpha + ((x^(1-n) - 1) L8(A1) - L8(A2) + L8(A3)) / (1 - n)`.
pub fn method2_step<S: Real>(
    plan: &QuadPlan<S>,
    phi: &GridFunction<S>,
    alpha: S,
) -> Result<GridFunction<S>, Error> {
    let BetaCase::Int(n) = plan.case() else {
        return Err(Error::WrongBetaCase("method 2 needs integer beta > 1"));
    };
    let [a1, a2, a3] = plan.l8_a_all(phi)?;
    let grid = *plan.grid();
    let c = S::one() / (S::one() - S::from_i64(n.into()));
    let mut u = Vec::with_capacity(grid.len());
    u.push(alpha + c * (a3[0] - a2[0]));
    for i in 1..grid.len() {
        let xf = grid.node(i).powi(1 - n as i32) - S::one();
        u.push(alpha + c * (xf * a1[i] - a2[i] + a3[i]));
    }
    GridFunction::new(grid, u)
}

fn dirichlet_step<S: Real>(
    plan: &QuadPlan<S>,
    phi: &GridFunction<S>,
    alpha: S,
) -> Result<GridFunction<S>, Error> {
    match plan.case() {
        BetaCase::One => method1_step(plan, phi, alpha),
        BetaCase::Int(_) => method2_step(plan, phi, alpha),
    }
}

/// `U_k` for `mu u(1) + sigma u'(1) = alpha`: the Dirichlet step with
/// constant `alpha/mu`, minus `(sigma/mu) int_0^1 t^beta Phi_k`.
pub fn robin_step<S: Real>(
    plan: &QuadPlan<S>,
    phi: &GridFunction<S>,
    mu: S,
    sigma: S,
    alpha: S,
) -> Result<GridFunction<S>, Error> {
    Boundary::Robin { mu, sigma }.validate()?;
    let base = dirichlet_step(plan, phi, alpha / mu)?;
    if sigma == S::zero() {
        return Ok(base);
    }
    let shift = sigma / mu * plan.l8_full_interval(phi)?;
    base.map(|v| v - shift)
}

/// `s^2 y^(2s-2) f(y^s, v)`
struct Substituted<S> {
    inner: Arc<dyn Rhs<S>>,
    s: u32,
}

impl<S: Real> Rhs<S> for Substituted<S> {
    fn eval(&self, y: S, v: S) -> Result<S, EvalError> {
        let s = self.s as i32;
        let x = y.powi(s);
        let f = self.inner.eval(x, v)?;
        Ok(S::from_i64((s * s).into()) * y.powi(2 * s - 2) * f)
    }
}

fn evaluate_rhs<S: Real>(
    rhs: &dyn Rhs<S>,
    grid: &UniformGrid<S>,
    u: &[S],
) -> Result<GridFunction<S>, Error> {
    let mut phi = Vec::with_capacity(u.len());
    for (i, &ui) in u.iter().enumerate() {
        let x = grid.node(i);
        let v = rhs.eval(x, ui).map_err(|source| Error::RhsEvaluation {
            x: x.to_f64(),
            u: ui.to_f64(),
            source,
        })?;
        if !v.is_finite() {
            return Err(Error::NonFiniteRhs {
                x: x.to_f64(),
                u: ui.to_f64(),
            });
        }
        phi.push(v);
    }
    GridFunction::new(*grid, phi)
}

/// Fixed-point loop on a uniform grid, started from `Phi_0 = f(x, 0)`.
/// When `f(x, 0)` cannot be evaluated the start is `f(x, fallback)`.
fn iterate<S: Real>(
    rhs: &dyn Rhs<S>,
    grid: UniformGrid<S>,
    cfg: &SolveConfig<S>,
    fallback: S,
    step: impl Fn(&GridFunction<S>) -> Result<GridFunction<S>, Error>,
) -> Result<(GridFunction<S>, Vec<S>, Termination), Error> {
    let zeros = alloc::vec![S::zero(); grid.len()];
    let mut phi = match evaluate_rhs(rhs, &grid, &zeros) {
        Ok(phi) => phi,
        Err(first) => {
            let start = alloc::vec![fallback; grid.len()];
            evaluate_rhs(rhs, &grid, &start).map_err(|_| first)?
        }
    };
    let mut history = Vec::new();
    let limit = S::from_f64(DIVERGENCE_FACTOR);
    loop {
        let u = step(&phi)?;
        let next = evaluate_rhs(rhs, &grid, u.values())?;
        let r = next.max_diff(&phi)?;
        history.push(r);
        if r <= cfg.tol {
            return Ok((u, history, Termination::Converged));
        }
        if r > limit * history[0] {
            return Ok((u, history, Termination::Diverged));
        }
        if history.len() >= cfg.max_iter {
            return Ok((u, history, Termination::MaxIter));
        }
        phi = next;
    }
}

fn integer_solve<S: Real>(
    beta: Beta,
    alpha: S,
    rhs: &dyn Rhs<S>,
    boundary: Boundary<S>,
    cfg: &SolveConfig<S>,
) -> Result<(GridFunction<S>, Vec<S>, Termination), Error> {
    let case = match beta {
        Beta::One => BetaCase::One,
        Beta::Int(n) => BetaCase::Int(n),
        Beta::Rational { .. } => return Err(Error::WrongBetaCase("rational beta needs method 3")),
    };
    let grid = UniformGrid::new(cfg.n)?;
    let plan = QuadPlan::new(grid, case)?;
    match boundary {
        Boundary::Dirichlet => {
            iterate(rhs, grid, cfg, alpha, |phi| dirichlet_step(&plan, phi, alpha))
        }
        Boundary::Robin { mu, sigma } => iterate(rhs, grid, cfg, alpha / mu, |phi| {
            robin_step(&plan, phi, mu, sigma, alpha)
        }),
    }
}

/// Solves `p` on `cfg.n` intervals.
pub fn solve<S: Real>(p: &ProblemSpec<S>, cfg: &SolveConfig<S>) -> Result<SolveReport<S>, Error> {
    cfg.validate()?;
    p.boundary.validate()?;
    if let Beta::Rational { .. } = p.beta {
        return method3_solve(p, cfg);
    }
    let (solution, residual_history, termination) =
        integer_solve(p.beta, p.alpha, p.rhs.as_ref(), p.boundary, cfg)?;
    Ok(SolveReport {
        nodes: solution.grid().nodes(),
        solution,
        iterations: residual_history.len(),
        residual_history,
        termination,
    })
}

/// Rational `beta = r/s` through the substitution `x = y^s`.
pub fn method3_solve<S: Real>(
    p: &ProblemSpec<S>,
    cfg: &SolveConfig<S>,
) -> Result<SolveReport<S>, Error> {
    cfg.validate()?;
    let Beta::Rational { r, s } = p.beta else {
        return Err(Error::WrongBetaCase("method 3 needs rational beta"));
    };
    let n = r - s + 1;
    if n < 2 {
        return Err(Error::InvalidParameter("transformed coefficient r - s + 1 must be >= 2"));
    }
    let rhs = Substituted {
        inner: p.rhs.clone(),
        s,
    };
    // u'(1) = v'(1) / s
    let boundary = match p.boundary {
        Boundary::Dirichlet => Boundary::Dirichlet,
        Boundary::Robin { mu, sigma } => Boundary::Robin {
            mu,
            sigma: sigma / S::from_i64(s.into()),
        },
    };
    let (solution, residual_history, termination) =
        integer_solve(Beta::Int(n), p.alpha, &rhs, boundary, cfg)?;
    let nodes = solution
        .grid()
        .nodes()
        .into_iter()
        .map(|y| y.powi(s as i32))
        .collect();
    Ok(SolveReport {
        nodes,
        solution,
        iterations: residual_history.len(),
        residual_history,
        termination,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::DoubleDouble;
    use alloc::string::ToString;

    type D = DoubleDouble;

    fn d(v: f64) -> D {
        D::from(v)
    }

    #[test]
    fn beta_parsing() {
        assert_eq!("1".parse::<Beta>().unwrap(), Beta::One);
        assert_eq!("3".parse::<Beta>().unwrap(), Beta::Int(3));
        assert_eq!("3/2".parse::<Beta>().unwrap(), Beta::Rational { r: 3, s: 2 });
        assert_eq!("6/4".parse::<Beta>().unwrap(), Beta::Rational { r: 3, s: 2 });
        assert_eq!("4/2".parse::<Beta>().unwrap(), Beta::Int(2));
        assert!("1/2".parse::<Beta>().is_err());
        assert!("0".parse::<Beta>().is_err());
        assert!("x".parse::<Beta>().is_err());
        assert_eq!(Beta::Rational { r: 3, s: 2 }.to_string(), "3/2");
    }

    #[test]
    fn wellposedness_examples() {
        let p = ProblemSpec::new(Beta::One, d(0.0), |_x: D, u: D| u.exp());
        let w = check_wellposedness(&p, d(4.0), D::e()).unwrap();
        assert!((w.q - D::e() / d(4.0)).abs() < d(1e-30));
        assert!(w.contractive);
        assert_eq!(w.u_bound, d(1.0));
        assert_eq!(w.du_bound, d(2.0));
        let w = check_wellposedness(&p, d(4.0), d(0.0)).unwrap();
        assert_eq!(w.q, d(0.0));
        let p2 = ProblemSpec::new(Beta::Int(2), d(0.0), |_x: D, _u: D| d(1.0));
        let w = check_wellposedness(&p2, d(1.0), d(6.1)).unwrap();
        assert!(!w.contractive);
        assert!(check_wellposedness(&p2, d(0.0), d(1.0)).is_err());
    }

    #[test]
    fn zero_source_steps_return_alpha() {
        let grid = UniformGrid::<D>::new(8).unwrap();
        let z = GridFunction::zeros(grid);
        let one = QuadPlan::new(grid, BetaCase::One).unwrap();
        let two = QuadPlan::new(grid, BetaCase::Int(2)).unwrap();
        for u in [
            method1_step(&one, &z, d(0.3)).unwrap(),
            method2_step(&two, &z, d(0.3)).unwrap(),
        ] {
            assert!(u.values().iter().all(|&v| v == d(0.3)));
        }
        let r = robin_step(&two, &z, d(2.0), d(1.0), d(3.0)).unwrap();
        assert!(r.values().iter().all(|&v| v == d(1.5)));
        assert!(robin_step(&two, &z, d(0.0), d(1.0), d(3.0)).is_err());
    }

    #[test]
    fn constant_source_steps() {
        let grid = UniformGrid::<D>::new(16).unwrap();
        let c = GridFunction::constant(grid, d(1.0));
        let one = QuadPlan::new(grid, BetaCase::One).unwrap();
        let u = method1_step(&one, &c, d(0.0)).unwrap();
        for i in 0..=16 {
            let x = grid.node(i);
            assert!((u[i] - (x * x - d(1.0)) / d(4.0)).abs() < d(1e-12), "{i}");
        }
        assert_eq!(u[16], d(0.0));
        let two = QuadPlan::new(grid, BetaCase::Int(2)).unwrap();
        let u = method2_step(&two, &c, d(0.0)).unwrap();
        assert!((u[0] + d(1.0) / d(6.0)).abs() < d(1e-25));
        assert_eq!(u[16], d(0.0));
    }

    #[test]
    fn pure_source_converges_in_one_iteration() {
        let p = ProblemSpec::new(Beta::Int(2), d(0.0), |x: D, _u: D| x * x);
        let r = solve(&p, &SolveConfig::new(8)).unwrap();
        assert_eq!(r.termination, Termination::Converged);
        assert_eq!(r.iterations, 1);
        assert_eq!(r.residual_history, alloc::vec![d(0.0)]);
    }

    #[test]
    fn config_validation() {
        assert!(matches!(
            SolveConfig::<f64>::new(4).validate(),
            Err(Error::GridTooSmall { .. })
        ));
        assert!(SolveConfig::<f64>::new(8).with_tol(1e-20).validate().is_err());
        assert!(SolveConfig::<D>::new(8).validate().is_ok());
    }

    #[test]
    fn start_falls_back_to_alpha_when_rhs_is_singular_at_zero() {
        let rhs = crate::expr::parse_rhs("1/2 - 1/(8*u^2)").unwrap();
        let p = ProblemSpec::new(Beta::Int(3), d(1.0), rhs);
        let r = solve(&p, &SolveConfig::new(8)).unwrap();
        assert_eq!(r.termination, Termination::Converged);
        let bad = ProblemSpec::new(Beta::Int(2), d(0.0), crate::expr::parse_rhs("1/u").unwrap());
        assert!(matches!(
            solve(&bad, &SolveConfig::new(8)),
            Err(Error::RhsEvaluation { .. })
        ));
    }

    #[test]
    fn method3_transform() {
        let rhs = Substituted::<D> {
            inner: Arc::new(|x: D, _u: D| x),
            s: 2,
        };
        // s^2 y^2 * y^2 at y = 0.5
        assert_eq!(rhs.eval(d(0.5), d(0.0)).unwrap(), d(0.25));
        let p = ProblemSpec::new(Beta::Rational { r: 3, s: 2 }, d(0.0), |_x: D, _u: D| d(0.0));
        let r = solve(&p, &SolveConfig::new(8)).unwrap();
        assert!(r.solution.values().iter().all(|&v| v == d(0.0)));
        assert_eq!(r.nodes[4], d(0.25));
    }
}
