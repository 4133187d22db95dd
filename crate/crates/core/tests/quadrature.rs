use lane8_core::greens::weighted_integrals;
use lane8_core::quadrature::{em_trapezoid, BetaCase, EndpointDerivs, QuadPlan};
use lane8_core::{DoubleDouble as D, GridFunction, Real, UniformGrid};
use proptest::prelude::*;

fn d(v: f64) -> D {
    D::from(v)
}

/// Least-squares slope of `-log2 E` against `log2 N`.
fn fitted_order(ns: &[usize], errs: &[D]) -> f64 {
    let xs: Vec<f64> = ns.iter().map(|&n| (n as f64).log2()).collect();
    let ys: Vec<f64> = errs.iter().map(|e| -e.to_f64().log2()).collect();
    let k = xs.len() as f64;
    let (mx, my) = (xs.iter().sum::<f64>() / k, ys.iter().sum::<f64>() / k);
    let num: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let den: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    num / den
}

fn max_diff(a: &[D], b: &[D]) -> D {
    a.iter().zip(b).fold(D::zero(), |m, (&x, &y)| m.max((x - y).abs()))
}

#[test]
fn corrected_trapezoid_integrates_degree_seven_exactly() {
    for n in [8usize, 16, 32] {
        let grid = UniformGrid::<D>::new(n).unwrap();
        for p in 0..=7i32 {
            let samples: Vec<D> = grid.nodes().iter().map(|&x| x.powi(p)).collect();
            let dp = |k: i32| -> D {
                if k > p {
                    D::zero()
                } else {
                    D::from_i64(((p - k + 1)..=p).map(i64::from).product())
                }
            };
            // derivatives at 0 vanish unless the order equals p
            let at_zero = |k: i32| if k == p { dp(k) } else { D::zero() };
            let derivs = EndpointDerivs {
                d1_a: at_zero(1),
                d3_a: at_zero(3),
                d5_a: at_zero(5),
                d1_b: dp(1),
                d3_b: dp(3),
                d5_b: dp(5),
            };
            let got = em_trapezoid(grid.h(), &samples, &derivs).unwrap();
            let want = D::one() / D::from_i64(i64::from(p) + 1);
            assert!(
                (got - want).abs() <= d(1e3) * D::epsilon() * want,
                "N={n} p={p}"
            );
        }
    }
}

#[test]
fn corrected_trapezoid_of_exp_has_order_eight() {
    let ns = [8usize, 16, 32, 64];
    let e1 = D::one().exp();
    let errs: Vec<D> = ns
        .iter()
        .map(|&n| {
            let grid = UniformGrid::<D>::new(n).unwrap();
            let samples: Vec<D> = grid.nodes().iter().map(|&x| x.exp()).collect();
            let derivs = EndpointDerivs {
                d1_a: D::one(),
                d3_a: D::one(),
                d5_a: D::one(),
                d1_b: e1,
                d3_b: e1,
                d5_b: e1,
            };
            (em_trapezoid(grid.h(), &samples, &derivs).unwrap() - (e1 - D::one())).abs()
        })
        .collect();
    let o = fitted_order(&ns, &errs);
    assert!((o - 8.0).abs() < 0.3, "{o}");
}

#[test]
fn corrected_trapezoid_needs_two_nodes() {
    assert!(em_trapezoid(d(0.5), &[d(1.0)], &EndpointDerivs::zero()).is_err());
    let one = em_trapezoid(d(1.0), &[d(1.0), d(1.0)], &EndpointDerivs::zero()).unwrap();
    assert_eq!(one, d(1.0));
}

/// Operator values on one grid against a composite Gauss oracle.
fn operator_errors(n: usize) -> Vec<(&'static str, D)> {
    let grid = UniformGrid::<D>::new(n).unwrap();
    let nodes = grid.nodes();
    let phi = GridFunction::sample(grid, |t: D| t.exp()).unwrap();
    let m = 2048;
    let mut out = Vec::new();

    let one = QuadPlan::new(grid, BetaCase::One).unwrap();
    let (i1, _) = weighted_integrals(|t: D| t, |t: D| t.exp(), &nodes, m).unwrap();
    let (_, i2) = weighted_integrals(
        |t: D| if t == D::zero() { D::zero() } else { t * t.ln() },
        |t: D| t.exp(),
        &nodes,
        m,
    )
    .unwrap();
    out.push(("I1", max_diff(&one.l8_i1_all(&phi).unwrap(), &i1)));
    out.push(("I2", max_diff(&one.l8_i2_all(&phi).unwrap(), &i2)));
    let f_want: Vec<D> = nodes
        .iter()
        .zip(&i1)
        .map(|(&x, &v)| if x == D::zero() { D::zero() } else { v / x })
        .collect();
    out.push(("F", max_diff(one.l8_f_values(&phi).unwrap().values(), &f_want)));
    let fint_want: Vec<D> = nodes
        .iter()
        .zip(i1.iter().zip(&i2))
        .map(|(&x, (&a, &b))| {
            if x == D::zero() {
                -b
            } else {
                -x.ln() * a - b
            }
        })
        .collect();
    out.push(("intF", max_diff(&one.l8_f_integral_all(&phi).unwrap(), &fint_want)));

    for (k, name) in [(2u32, ["A1(n=2)", "A2(n=2)", "A3(n=2)"]), (3, ["A1(n=3)", "A2(n=3)", "A3(n=3)"])] {
        let plan = QuadPlan::new(grid, BetaCase::Int(k)).unwrap();
        let [a1, a2, a3] = plan.l8_a_all(&phi).unwrap();
        let (l, r) = weighted_integrals(|t: D| t.powi(k as i32), |t: D| t.exp(), &nodes, m).unwrap();
        let (_, r1) = weighted_integrals(|t: D| t, |t: D| t.exp(), &nodes, m).unwrap();
        out.push((name[0], max_diff(&a1, &l)));
        out.push((name[1], max_diff(&a2, &r)));
        out.push((name[2], max_diff(&a3, &r1)));
    }
    out
}

#[test]
fn operators_converge_at_order_eight_against_gauss_oracle() {
    let ns = [8usize, 16, 32, 64];
    let table: Vec<_> = ns.iter().map(|&n| operator_errors(n)).collect();
    for j in 0..table[0].len() {
        let errs: Vec<D> = table.iter().map(|row| row[j].1).collect();
        let o = fitted_order(&ns, &errs);
        assert!((o - 8.0).abs() <= 0.7, "{}: order {o}, errors {errs:?}", table[0][j].0);
    }
}

#[test]
fn closed_form_values() {
    let grid = UniformGrid::<D>::new(16).unwrap();
    let ones = GridFunction::constant(grid, D::one());
    let one = QuadPlan::new(grid, BetaCase::One).unwrap();
    let tiny = d(1e-28);
    assert!((one.l8_i1(&ones, 16).unwrap() - d(0.5)).abs() < tiny);
    let f = one.l8_f_values(&ones).unwrap();
    for i in 0..=16 {
        assert!((f[i] - grid.node(i) / d(2.0)).abs() < tiny);
    }
    let t = GridFunction::sample(grid, |x| x).unwrap();
    let f = one.l8_f_values(&t).unwrap();
    for i in 0..=16 {
        let x = grid.node(i);
        assert!((f[i] - x * x / d(3.0)).abs() < tiny);
    }
    let i2 = one.l8_i2(&ones, 0).unwrap();
    assert!((i2 + d(0.25)).abs() < d(1e-9), "{i2}");
    assert!((one.l8_full_interval(&ones).unwrap() - d(0.5)).abs() < tiny);

    let two = QuadPlan::new(grid, BetaCase::Int(2)).unwrap();
    assert!((two.l8_a1(&ones, 16).unwrap() - D::ratio(1, 3)).abs() < tiny);
    assert!((two.l8_a2(&ones, 0).unwrap() - D::ratio(1, 3)).abs() < tiny);
    assert!((two.l8_a3(&ones, 0).unwrap() - d(0.5)).abs() < tiny);
    assert!((two.l8_full_interval(&ones).unwrap() - D::ratio(1, 3)).abs() < tiny);

    let e = GridFunction::sample(grid, |x: D| x.exp()).unwrap();
    let a1 = two.l8_a1(&e, 16).unwrap();
    assert!((a1 - (D::e() - d(2.0))).abs() < d(1e-12), "{a1}");
    let i1 = one.l8_i1(&e, 16).unwrap();
    assert!((i1 - D::one()).abs() < d(1e-12), "{i1}");
}

#[test]
fn structural_zeros_are_exact() {
    let grid = UniformGrid::<D>::new(8).unwrap();
    let phi = GridFunction::sample(grid, |x: D| (x * d(3.0)).sin() + d(2.0)).unwrap();
    let one = QuadPlan::new(grid, BetaCase::One).unwrap();
    assert_eq!(one.l8_i1(&phi, 0).unwrap(), D::zero());
    assert_eq!(one.l8_i2(&phi, 8).unwrap(), D::zero());
    assert_eq!(one.l8_f_values(&phi).unwrap()[0], D::zero());
    for n in [2u32, 3, 5] {
        let plan = QuadPlan::new(grid, BetaCase::Int(n)).unwrap();
        assert_eq!(plan.l8_a1(&phi, 0).unwrap(), D::zero());
        assert_eq!(plan.l8_a2(&phi, 8).unwrap(), D::zero());
        assert_eq!(plan.l8_a3(&phi, 8).unwrap(), D::zero());
        let table = plan.monomial_table();
        for row in table {
            for p in (n as usize + 1)..6 {
                assert_eq!(row[p], D::zero());
            }
        }
        assert_eq!(table[8][0], D::one());
    }
}

fn sample(grid: UniformGrid<D>, c: &[f64]) -> GridFunction<D> {
    GridFunction::sample(grid, |x: D| {
        d(c[0]) + d(c[1]) * x + d(c[2]) * (d(c[3]) * x).sin() + (x * d(c[4])).exp()
    })
    .unwrap()
}

fn combine(a: &[D], b: &[D], s: D, t: D) -> Vec<D> {
    a.iter().zip(b).map(|(&x, &y)| s * x + t * y).collect()
}

fn check_linear(op: impl Fn(&GridFunction<D>) -> Vec<D>, f: &GridFunction<D>, g: &GridFunction<D>, s: D, t: D) {
    let grid = *f.grid();
    let mixed = GridFunction::new(grid, combine(f.values(), g.values(), s, t)).unwrap();
    let lhs = op(&mixed);
    let rhs = combine(&op(f), &op(g), s, t);
    let scale = lhs.iter().fold(D::one(), |m, v| m.max(v.abs()));
    for (a, b) in lhs.iter().zip(&rhs) {
        assert!((*a - *b).abs() <= d(10.0) * D::epsilon() * scale * d(64.0), "{a} vs {b}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]
    #[test]
    fn operators_are_linear(
        c1 in prop::array::uniform5(-2.0f64..2.0),
        c2 in prop::array::uniform5(-2.0f64..2.0),
        s in -3.0f64..3.0,
        t in -3.0f64..3.0,
        n in 8usize..24,
    ) {
        let grid = UniformGrid::<D>::new(n).unwrap();
        let (f, g) = (sample(grid, &c1), sample(grid, &c2));
        let (s, t) = (d(s), d(t));
        let one = QuadPlan::new(grid, BetaCase::One).unwrap();
        check_linear(|p| one.l8_i1_all(p).unwrap(), &f, &g, s, t);
        check_linear(|p| one.l8_i2_all(p).unwrap(), &f, &g, s, t);
        let two = QuadPlan::new(grid, BetaCase::Int(2)).unwrap();
        check_linear(|p| two.l8_a1_all(p).unwrap(), &f, &g, s, t);
        check_linear(|p| two.l8_a2_all(p).unwrap(), &f, &g, s, t);
        check_linear(|p| two.l8_a3_all(p).unwrap(), &f, &g, s, t);
    }
}
