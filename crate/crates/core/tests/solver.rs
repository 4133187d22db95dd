use lane8_core::bench::{error_exact, run_sweep};
use lane8_core::greens::{bound_constants, oracle_solve_fn, weighted_integrals, Kernel};
use lane8_core::problems::find;
use lane8_core::quadrature::{BetaCase, QuadPlan};
use lane8_core::solver::{check_wellposedness, method1_step, method2_step, robin_step};
use lane8_core::{
    solve, Beta, Boundary, DoubleDouble as D, GridFunction, ProblemSpec, Real, SolveConfig,
    Termination, UniformGrid,
};

fn d(v: f64) -> D {
    D::from(v)
}

#[test]
fn robin_manufactured_solution_is_reproduced() {
    // u = 1 + x^2: u'' + (2/x) u' = 6 and 2 u(1) + u'(1) = 6
    let rhs = |x: D, u: D| d(6.0) + u - d(1.0) - x * x;
    let spec = ProblemSpec::new(Beta::Int(2), d(6.0), rhs)
        .with_boundary(Boundary::Robin { mu: d(2.0), sigma: d(1.0) })
        .unwrap();
    let r = solve(&spec, &SolveConfig::new(16).with_tol(d(1e-29))).unwrap();
    assert_eq!(r.termination, Termination::Converged);
    let err = error_exact(&r.solution, &r.nodes, |x| d(1.0) + x * x);
    assert!(err < d(1e-26), "{err}");
}

#[test]
fn robin_with_beta_one() {
    // u = 1 + x^2: u'' + u'/x = 4 and u(1) + u'(1) = 4
    let spec = ProblemSpec::new(Beta::One, d(4.0), |_x: D, _u: D| d(4.0))
        .with_boundary(Boundary::Robin { mu: d(1.0), sigma: d(1.0) })
        .unwrap();
    let r = solve(&spec, &SolveConfig::new(8)).unwrap();
    let err = error_exact(&r.solution, &r.nodes, |x| d(1.0) + x * x);
    assert!(err < d(1e-26), "{err}");
}

#[test]
fn method3_constant_source_is_exact() {
    // beta = 5/2, u = x^2 - 1 gives f = 2 + 2 beta = 7
    let spec = ProblemSpec::new(Beta::ratio(5, 2).unwrap(), d(0.0), |_x: D, _u: D| d(7.0));
    let r = solve(&spec, &SolveConfig::new(8)).unwrap();
    let err = error_exact(&r.solution, &r.nodes, |x| x * x - d(1.0));
    assert!(err < d(1e-26), "{err}");
    assert_eq!(r.nodes[8], d(1.0));
    assert_eq!(r.nodes[2], d(0.0625));
}

#[test]
fn method3_is_eighth_order_on_a_smooth_source() {
    // u = cos x - cos 1 with beta = 3/2
    let spec = ProblemSpec::new(Beta::ratio(3, 2).unwrap(), d(0.0), |x: D, _u: D| {
        if x == D::zero() {
            d(-2.5)
        } else {
            -x.cos() - d(1.5) * x.sin() / x
        }
    });
    let exact = |x: D| x.cos() - D::one().cos();
    let sweep = run_sweep("m3", &spec, Some(&exact), 8, 3, &SolveConfig::new(8), &|| 0.0).unwrap();
    for o in sweep.orders().into_iter().flatten() {
        let o = o.to_f64();
        assert!((7.0..12.0).contains(&o), "{o}");
    }
}

#[test]
fn boundary_value_is_exact_after_every_solve() {
    for id in ["ex1", "ex3", "ex4", "ex5", "ex6"] {
        let ex = find::<D>(id).unwrap();
        let r = solve(&ex.spec, &SolveConfig::new(8)).unwrap();
        assert_eq!(*r.solution.values().last().unwrap(), ex.spec.alpha, "{id}");
    }
}

#[test]
fn solves_are_deterministic() {
    let ex = find::<D>("ex7").unwrap();
    let a = solve(&ex.spec, &SolveConfig::new(16)).unwrap();
    let b = solve(&ex.spec, &SolveConfig::new(16)).unwrap();
    assert_eq!(a, b);
}

#[test]
fn standard_and_extended_agree_at_coarse_grids() {
    let ext = find::<D>("ex1").unwrap();
    let std = find::<f64>("ex1").unwrap();
    let re = solve(&ext.spec, &SolveConfig::new(8)).unwrap();
    let rs = solve(&std.spec, &SolveConfig::new(8)).unwrap();
    let ee = error_exact(&re.solution, &re.nodes, ext.exact.unwrap()).to_f64();
    let es = error_exact(&rs.solution, &rs.nodes, std.exact.unwrap());
    assert!(((ee - es) / ee).abs() < 0.005, "{ee} {es}");
    for (a, b) in re.solution.values().iter().zip(rs.solution.values()) {
        assert!((a.to_f64() - b).abs() < 1e-13);
    }
}

#[test]
fn residuals_contract_geometrically() {
    let ex = find::<D>("ex1").unwrap();
    let r = solve(&ex.spec, &SolveConfig::new(16)).unwrap();
    let floor = d(1e-28);
    for w in r.residual_history.windows(2) {
        if w[0] > floor {
            assert!(w[1] <= d(0.85) * w[0], "{} -> {}", w[0], w[1]);
        }
    }
}

#[test]
fn iteration_limit_and_divergence_are_reported() {
    let ex = find::<D>("ex1").unwrap();
    let r = solve(&ex.spec, &SolveConfig::new(8).with_max_iter(3)).unwrap();
    assert_eq!(r.termination, Termination::MaxIter);
    assert_eq!(r.iterations, 3);
    // L = 40 is far outside the contractive range
    let spec = ProblemSpec::new(Beta::One, d(1.0), |_x: D, u: D| d(-40.0) * u);
    let r = solve(&spec, &SolveConfig::new(8)).unwrap();
    assert_eq!(r.termination, Termination::Diverged);
}

#[test]
fn steps_match_the_reference_solver() {
    let n = 32;
    let grid = UniformGrid::<D>::new(n).unwrap();
    let phi = GridFunction::sample(grid, |t| t.cos()).unwrap();
    let nodes = grid.nodes();
    for (case, beta) in [(BetaCase::One, 1.0), (BetaCase::Int(2), 2.0), (BetaCase::Int(4), 4.0)] {
        let plan = QuadPlan::new(grid, case).unwrap();
        let step = match case {
            BetaCase::One => method1_step(&plan, &phi, d(0.5)),
            BetaCase::Int(_) => method2_step(&plan, &phi, d(0.5)),
        }
        .unwrap();
        let kernel = Kernel::dirichlet(d(beta)).unwrap();
        let reference = oracle_solve_fn(&kernel, |t| t.cos(), d(0.5), &nodes, 2048).unwrap();
        for (a, b) in step.values().iter().zip(&reference) {
            assert!((*a - *b).abs() < d(1e-11), "beta {beta}: {a} vs {b}");
        }
        let robin = robin_step(&plan, &phi, d(2.0), d(1.0), d(0.5)).unwrap();
        let kernel = Kernel::new(d(beta), Boundary::Robin { mu: d(2.0), sigma: d(1.0) }).unwrap();
        let reference = oracle_solve_fn(&kernel, |t| t.cos(), d(0.5), &nodes, 2048).unwrap();
        for (a, b) in robin.values().iter().zip(&reference) {
            assert!((*a - *b).abs() < d(1e-11), "robin beta {beta}: {a} vs {b}");
        }
    }
}

#[test]
fn bound_constants_match_fine_quadrature() {
    let nodes: Vec<D> = (0..=64).map(|i| D::ratio(i, 64)).collect();
    for beta in [1i64, 2, 3] {
        let b = D::from_i64(beta);
        let (c0, c1) = bound_constants(b).unwrap();
        let kernel = Kernel::dirichlet(b).unwrap();
        // G0 <= 0, so the integral of t^beta |G0| is minus the solve with phi = 1
        let u = oracle_solve_fn(&kernel, |_t| D::one(), D::zero(), &nodes, 1024).unwrap();
        let sup0 = u.iter().fold(D::zero(), |m, v| m.max(v.abs()));
        assert!((sup0 - c0).abs() < d(1e-6), "{beta}: {sup0}");
        let (left, _) = weighted_integrals(|t: D| t.powi(beta as i32), |_t| D::one(), &nodes, 1024).unwrap();
        let sup1 = nodes
            .iter()
            .zip(&left)
            .skip(1)
            .fold(D::zero(), |m, (&x, &l)| m.max(l / x.powi(beta as i32)));
        assert!((sup1 - c1).abs() < d(1e-6), "{beta}: {sup1}");
    }
}

#[test]
fn contraction_factor_for_example_one() {
    let ex = find::<D>("ex1").unwrap();
    let w = check_wellposedness(&ex.spec, d(4.0), D::e()).unwrap();
    assert!((w.q - D::e() / d(4.0)).abs() < d(1e-30));
    assert!(w.contractive);
}
