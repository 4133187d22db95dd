//! Error metrics and observed convergence orders.

use alloc::boxed::Box;
use alloc::string::String;
use alloc::vec::Vec;

use crate::error::Error;
use crate::grid::GridFunction;
use crate::scalar::Real;
use crate::solver::{solve, ProblemSpec, SolveConfig, SolveReport, Termination};

/// `max_i |U_i - u(x_i)|` over the given physical nodes.
pub fn error_exact<S: Real>(u: &GridFunction<S>, nodes: &[S], exact: impl Fn(S) -> S) -> S {
    u.values()
        .iter()
        .zip(nodes)
        .fold(S::zero(), |m, (&v, &x)| m.max((v - exact(x)).abs()))
}

/// `max_i |U_N(x_i) - U_2N(x_2i)|`.
pub fn error_double_mesh<S: Real>(
    coarse: &GridFunction<S>,
    fine: &GridFunction<S>,
) -> Result<S, Error> {
    let (nc, nf) = (coarse.grid().intervals(), fine.grid().intervals());
    if nf != 2 * nc {
        return Err(Error::NotNested {
            coarse: nc,
            fine: nf,
        });
    }
    coarse.max_diff(&fine.restrict_to_coarse()?)
}

/// Errors below this level are treated as roundoff: `100` units of roundoff.
pub fn precision_floor<S: Real>() -> S {
    S::from_i64(100) * S::epsilon()
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Order<S> {
    Value(S),
    /// An error was zero or at the precision floor.
    Unreliable,
}

impl<S: Real> Order<S> {
    pub fn value(self) -> Option<S> {
        match self {
            Order::Value(v) => Some(v),
            Order::Unreliable => None,
        }
    }
}

/// `log2(E_coarse / E_fine)`.
pub fn convergence_order<S: Real>(e_coarse: S, e_fine: S) -> Order<S> {
    let floor = precision_floor::<S>();
    if e_fine <= S::zero() || e_coarse <= S::zero() || e_fine < floor || e_coarse < floor {
        return Order::Unreliable;
    }
    Order::Value((e_coarse / e_fine).log2())
}

/// How a sweep measures its errors.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ErrorKind {
    /// Against the closed-form solution.
    Exact,
    /// Against the solve on the next finer grid.
    DoubleMesh,
}

/// One row of a sweep.
#[derive(Clone, Debug, PartialEq)]
pub struct RunResult<S> {
    pub example: String,
    pub n: usize,
    pub iterations: usize,
    pub termination: Termination,
    pub error: S,
    /// `None` on the first level.
    pub order: Option<Order<S>>,
    /// `error` is below [`precision_floor`].
    pub floored: bool,
    /// Wallclock of the solve at this `N`.
    pub seconds: f64,
}

/// Runs at `N = n0 * 2^j`, `j = 0..levels`.
#[derive(Clone, Debug, PartialEq)]
pub struct Sweep<S> {
    pub example: String,
    pub kind: ErrorKind,
    pub runs: Vec<RunResult<S>>,
}

impl<S: Real> Sweep<S> {
    pub fn all_converged(&self) -> bool {
        self.runs
            .iter()
            .all(|r| r.termination == Termination::Converged)
    }

    pub fn orders(&self) -> Vec<Option<S>> {
        self.runs
            .iter()
            .map(|r| r.order.and_then(Order::value))
            .collect()
    }

    pub fn errors(&self) -> Vec<S> {
        self.runs.iter().map(|r| r.error).collect()
    }
}

/// Solves `spec` at `n0, 2 n0, ..` and tabulates errors and orders.
///
/// With `exact` the error is measured against it on the physical nodes;
/// otherwise each level is compared with one extra, finer solve. `clock`
/// returns seconds from any fixed origin.
pub fn run_sweep<S: Real>(
    example: &str,
    spec: &ProblemSpec<S>,
    exact: Option<&dyn Fn(S) -> S>,
    n0: usize,
    levels: usize,
    cfg: &SolveConfig<S>,
    clock: &dyn Fn() -> f64,
) -> Result<Sweep<S>, Error> {
    if levels == 0 {
        return Err(Error::InvalidParameter("a sweep needs at least one level"));
    }
    let solves = if exact.is_some() { levels } else { levels + 1 };
    let mut reports: Vec<(SolveReport<S>, f64)> = Vec::with_capacity(solves);
    for j in 0..solves {
        let n = n0 << j;
        let level_cfg = SolveConfig { n, ..*cfg };
        let start = clock();
        let report = solve(spec, &level_cfg).map_err(|e| Error::SweepLevel {
            intervals: n,
            source: Box::new(e),
        })?;
        let seconds = clock() - start;
        if report.termination == Termination::Diverged {
            return Err(Error::Diverged { intervals: n });
        }
        reports.push((report, seconds));
    }
    let floor = precision_floor::<S>();
    let mut runs: Vec<RunResult<S>> = Vec::with_capacity(levels);
    for j in 0..levels {
        let (report, seconds) = &reports[j];
        let error = match exact {
            Some(u) => error_exact(&report.solution, &report.nodes, u),
            None => error_double_mesh(&report.solution, &reports[j + 1].0.solution)?,
        };
        let order = runs.last().map(|prev| convergence_order(prev.error, error));
        runs.push(RunResult {
            example: example.into(),
            n: n0 << j,
            iterations: report.iterations,
            termination: report.termination,
            error,
            order,
            floored: error < floor,
            seconds: *seconds,
        });
    }
    Ok(Sweep {
        example: example.into(),
        kind: if exact.is_some() {
            ErrorKind::Exact
        } else {
            ErrorKind::DoubleMesh
        },
        runs,
    })
}
