//! Green's kernels of the linear problem and a brute-force reference solver.
//!
//! For `u'' + (beta/x) u' = phi`, `u'(0) = 0`, `u(1) = alpha`:
//!
//! ```text
//! u(x) = alpha + int_0^1 t^beta G0(x, t) phi(t) dt,   G0(x, t) = K(max(x, t))
//! K(z) = ln z                          (beta = 1)
//! K(z) = (z^(1-beta) - 1) / (1 - beta) (beta > 1)
//! ```
//!
//! With the Robin condition `mu u(1) + sigma u'(1) = alpha` the kernel is
//! shifted by `-sigma/mu` and the constant becomes `alpha/mu`.
//!
//! The reference solver evaluates these integrals with composite 10-point
//! Gauss-Legendre panels that are aligned with the evaluation nodes (so the
//! kink at `t = x` is never inside a panel) and graded geometrically towards
//! `t = 0`. It is meant for tests, not for production solves.

use alloc::vec::Vec;

use crate::error::Error;
use crate::grid::GridFunction;
use crate::scalar::Real;
use crate::solver::Boundary;

/// `G0` for a given exponent and boundary condition.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Kernel<S> {
    beta: S,
    boundary: Boundary<S>,
}

impl<S: Real> Kernel<S> {
    pub fn new(beta: S, boundary: Boundary<S>) -> Result<Self, Error> {
        if !(beta >= S::one()) {
            return Err(Error::InvalidParameter("beta must be >= 1"));
        }
        boundary.validate()?;
        Ok(Kernel { beta, boundary })
    }

    pub fn dirichlet(beta: S) -> Result<Self, Error> {
        Self::new(beta, Boundary::Dirichlet)
    }

    pub fn beta(&self) -> S {
        self.beta
    }

    pub fn boundary(&self) -> Boundary<S> {
        self.boundary
    }

    /// `sigma/mu` for Robin, zero for Dirichlet.
    pub fn shift(&self) -> S {
        match self.boundary {
            Boundary::Dirichlet => S::zero(),
            Boundary::Robin { mu, sigma } => sigma / mu,
        }
    }

    /// Additive constant of the integral representation.
    pub fn constant(&self, alpha: S) -> S {
        match self.boundary {
            Boundary::Dirichlet => alpha,
            Boundary::Robin { mu, .. } => alpha / mu,
        }
    }

    /// `K(z)`, the kernel branch evaluated at `z = max(x, t)`.
    pub fn branch(&self, z: S) -> S {
        if self.beta == S::one() {
            z.ln()
        } else {
            let e = S::one() - self.beta;
            (z.powf(e) - S::one()) / e
        }
    }

    fn check(x: S, t: S) -> Result<(), Error> {
        let inside = |v: S| v > S::zero() && v <= S::one();
        if inside(x) && inside(t) {
            Ok(())
        } else {
            Err(Error::OutsideDomain {
                x: x.to_f64(),
                t: t.to_f64(),
            })
        }
    }

    /// `G0(x, t)` for `x, t` in `(0, 1]`.
    pub fn g0(&self, x: S, t: S) -> Result<S, Error> {
        Self::check(x, t)?;
        Ok(self.branch(x.max(t)) - self.shift())
    }

    /// `G1(x, t) = dG0/dx`: zero for `x < t`, `x^(-beta)` for `x > t`.
    pub fn g1(&self, x: S, t: S) -> Result<S, Error> {
        Self::check(x, t)?;
        if x <= t {
            Ok(S::zero())
        } else {
            Ok(S::one() / x.powf(self.beta))
        }
    }
}

/// `(1/(2(beta+1)), 1/(beta+1))`: bounds on `int_0^1 |t^beta G0|` and
/// `int_0^1 |t^beta G1|` over `x`.
pub fn bound_constants<S: Real>(beta: S) -> Result<(S, S), Error> {
    if !(beta >= S::one()) {
        return Err(Error::InvalidParameter("beta must be >= 1"));
    }
    let b1 = beta + S::one();
    Ok((S::one() / (S::from_i64(2) * b1), S::one() / b1))
}

/// Gauss-Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre<S: Real>(n: usize) -> (Vec<S>, Vec<S>) {
    let mut nodes = Vec::with_capacity(n);
    let mut weights = Vec::with_capacity(n);
    let nf = S::from_i64(n as i64);
    for k in 1..=n {
        let guess = S::pi() * (S::from_i64(k as i64) - S::ratio(1, 4)) / (nf + S::ratio(1, 2));
        let mut x = guess.cos();
        let mut dp = S::one();
        for _ in 0..100 {
            let (p, d) = legendre(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() <= S::epsilon() * S::from_i64(4) {
                break;
            }
        }
        let (_, d) = legendre(n, x);
        if d != S::zero() {
            dp = d;
        }
        nodes.push(x);
        weights.push(S::from_i64(2) / ((S::one() - x * x) * dp * dp));
    }
    (nodes, weights)
}

/// `(P_n(x), P_n'(x))` by the three-term recurrence.
fn legendre<S: Real>(n: usize, x: S) -> (S, S) {
    let mut p0 = S::one();
    let mut p1 = x;
    for k in 2..=n {
        let kf = S::from_i64(k as i64);
        let p2 = ((S::from_i64(2) * kf - S::one()) * x * p1 - (kf - S::one()) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let nf = S::from_i64(n as i64);
    (p1, nf * (x * p1 - p0) / (x * x - S::one()))
}

const GAUSS_POINTS: usize = 10;
const GRADING_LEVELS: usize = 60;

/// Minimum panel count accepted by the reference solvers.
pub const MIN_FINE_PANELS: usize = 1024;

/// Panel breakpoints: the uniform `1/m` partition merged with `nodes`,
/// graded geometrically towards zero and refined so that no panel is longer
/// than a quarter of its distance from the origin. That keeps endpoint
/// singularities such as `t ln t` far outside each panel relative to its
/// size, where Gauss-Legendre converges quickly.
fn breakpoints<S: Real>(nodes: &[S], m_fine: usize) -> Vec<S> {
    let mut pts: Vec<S> = (0..=m_fine)
        .map(|k| S::ratio(k as i64, m_fine as i64))
        .chain(nodes.iter().copied())
        .collect();
    pts.sort_by(|a, b| a.partial_cmp(b).expect("finite breakpoints"));
    pts.dedup();
    let half = S::ratio(1, 2);
    let mut coarse = Vec::with_capacity(pts.len() + GRADING_LEVELS);
    coarse.push(S::zero());
    let mut level = pts[1];
    let mut inner = Vec::with_capacity(GRADING_LEVELS);
    for _ in 0..GRADING_LEVELS {
        level *= half;
        inner.push(level);
    }
    coarse.extend(inner.into_iter().rev());
    coarse.extend(pts.into_iter().skip(1));

    let mut out = Vec::with_capacity(coarse.len() * 2);
    out.push(coarse[0]);
    for ab in coarse.windows(2) {
        let (a, b) = (ab[0], ab[1]);
        if a > S::zero() {
            let parts = (libm::ceil((S::from_i64(4) * (b - a) / a).to_f64()) as i64).max(1);
            for j in 1..parts {
                out.push(a + (b - a) * S::ratio(j, parts));
            }
        }
        out.push(b);
    }
    out
}

/// Left and right integrals of `weight(t) phi(t)`:
/// `left[i] = int_0^{x_i}` and `right[i] = int_{x_i}^1` for sorted nodes
/// `x_i` in `[0, 1]`.
pub fn weighted_integrals<S: Real>(
    weight: impl Fn(S) -> S,
    phi: impl Fn(S) -> S,
    nodes: &[S],
    m_fine: usize,
) -> Result<(Vec<S>, Vec<S>), Error> {
    let g = |t| weight(t) * phi(t);
    if m_fine == 0 {
        return Err(Error::InvalidParameter("panel count must be positive"));
    }
    if nodes.windows(2).any(|w| !(w[0] <= w[1]))
        || nodes.iter().any(|&x| x < S::zero() || x > S::one())
    {
        return Err(Error::InvalidParameter("nodes must be sorted and lie in [0, 1]"));
    }
    let (gx, gw) = gauss_legendre::<S>(GAUSS_POINTS);
    let pts = breakpoints(nodes, m_fine);
    let half = S::ratio(1, 2);
    let panels: Vec<(S, S)> = pts
        .windows(2)
        .map(|ab| {
            let (a, b) = (ab[0], ab[1]);
            let mid = (a + b) * half;
            let rad = (b - a) * half;
            let s: S = gx
                .iter()
                .zip(&gw)
                .map(|(&x, &w)| w * g(mid + rad * x))
                .sum();
            (a, s * rad)
        })
        .collect();
    let mut left = Vec::with_capacity(nodes.len());
    let mut acc = S::zero();
    let mut k = 0;
    for &x in nodes {
        while k < panels.len() && panels[k].0 < x {
            acc += panels[k].1;
            k += 1;
        }
        left.push(acc);
    }
    // summing the tail separately keeps right[i] accurate when it is small
    let mut right = alloc::vec![S::zero(); nodes.len()];
    let mut acc = S::zero();
    let mut k = panels.len();
    for (i, &x) in nodes.iter().enumerate().rev() {
        while k > 0 && panels[k - 1].0 >= x {
            acc += panels[k - 1].1;
            k -= 1;
        }
        right[i] = acc;
    }
    Ok((left, right))
}

/// `u(x_i) = c + int_0^1 t^beta G0(x_i, t) phi(t) dt` at sorted nodes in
/// `[0, 1]`; at `x = 0` the limit `c + int_0^1 t^beta G0(0+, t) phi` is used.
pub fn oracle_solve_fn<S: Real>(
    kernel: &Kernel<S>,
    phi: impl Fn(S) -> S,
    alpha: S,
    nodes: &[S],
    m_fine: usize,
) -> Result<Vec<S>, Error> {
    if m_fine < MIN_FINE_PANELS {
        return Err(Error::InvalidParameter("reference solver needs at least 1024 panels"));
    }
    let beta = kernel.beta();
    let weight = |t: S| {
        if t == S::zero() {
            S::zero()
        } else {
            t.powf(beta)
        }
    };
    // int_0^x t^beta phi, and int_x^1 t^beta K(t) phi
    let (plain, plain_right) = weighted_integrals(weight, &phi, nodes, m_fine)?;
    let (_, with_k) = weighted_integrals(
        |t| {
            if t == S::zero() {
                S::zero()
            } else {
                weight(t) * kernel.branch(t)
            }
        },
        &phi,
        nodes,
        m_fine,
    )?;
    let full = match nodes.first() {
        Some(_) => plain[0] + plain_right[0],
        None => return Ok(Vec::new()),
    };
    let c = kernel.constant(alpha);
    let shift = kernel.shift();
    Ok(nodes
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let near = if x == S::zero() {
                S::zero()
            } else {
                kernel.branch(x) * plain[i]
            };
            c + near + with_k[i] - shift * full
        })
        .collect())
}

/// Local Lagrange interpolant of grid values (up to 10 points).
pub fn interpolate<S: Real>(phi: &GridFunction<S>, t: S) -> S {
    let grid = phi.grid();
    let n = grid.intervals();
    let width = (GAUSS_POINTS).min(n + 1);
    let pos = (t * S::from_i64(n as i64)).floor().to_f64();
    let j = if pos < 0.0 { 0 } else { (pos as usize).min(n - 1) };
    let start = j.saturating_sub(width / 2 - 1).min(n + 1 - width);
    let mut acc = S::zero();
    for a in start..start + width {
        let xa = grid.node(a);
        let mut l = S::one();
        for b in start..start + width {
            if a != b {
                let xb = grid.node(b);
                l *= (t - xb) / (xa - xb);
            }
        }
        acc += l * phi[a];
    }
    acc
}

/// Reference solution of the linear problem with source `phi` given on a
/// grid, evaluated at that grid's nodes.
pub fn oracle_solve_linear<S: Real>(
    kernel: &Kernel<S>,
    phi: &GridFunction<S>,
    alpha: S,
    m_fine: usize,
) -> Result<GridFunction<S>, Error> {
    let grid = *phi.grid();
    let values = oracle_solve_fn(kernel, |t| interpolate(phi, t), alpha, &grid.nodes(), m_fine)?;
    GridFunction::new(grid, values)
}
