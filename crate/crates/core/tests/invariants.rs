use ellipcenter::baselines::{cg_solve, gradient_step, ConjugateGradient};
use ellipcenter::bench::Method;
use ellipcenter::ellipcenter::{ellipse_center_coeffs, level_step};
use ellipcenter::theory::dominance_check;
use ellipcenter::{me_iterate, me_solve, Branch, LinearOperator, QuadraticProblem, SolveOptions, Termination};
use proptest::prelude::*;

fn dot(u: &[f64], v: &[f64]) -> f64 {
    u.iter().zip(v).map(|(a, b)| a * b).sum()
}

fn norm(v: &[f64]) -> f64 {
    dot(v, v).sqrt()
}

fn diag_problem() -> impl Strategy<Value = QuadraticProblem> {
    (1usize..12).prop_flat_map(|n| {
        (
            prop::collection::vec(0.1f64..100.0, n),
            prop::collection::vec(-10.0f64..10.0, n),
            -5.0f64..5.0,
        )
            .prop_map(|(d, b, c)| QuadraticProblem::new(LinearOperator::diagonal(d).unwrap(), b, c).unwrap())
    })
}

fn rank_one_problem() -> impl Strategy<Value = QuadraticProblem> {
    (1usize..12).prop_flat_map(|n| {
        (
            prop::collection::vec(-3.0f64..3.0, n),
            0.1f64..10.0,
            prop::collection::vec(-10.0f64..10.0, n),
        )
            .prop_map(|(v, s, b)| QuadraticProblem::new(LinearOperator::rank_one(v, s).unwrap(), b, 0.0).unwrap())
    })
}

/// `B B^T + shift I`
fn dense_problem() -> impl Strategy<Value = QuadraticProblem> {
    (1usize..10).prop_flat_map(|n| {
        (
            prop::collection::vec(-2.0f64..2.0, n * n),
            0.1f64..3.0,
            prop::collection::vec(-10.0f64..10.0, n),
        )
            .prop_map(move |(bm, shift, b)| {
                let mut a = vec![0.0; n * n];
                for i in 0..n {
                    for j in 0..n {
                        a[i * n + j] = (0..n).map(|k| bm[i * n + k] * bm[j * n + k]).sum();
                    }
                    a[i * n + i] += shift;
                }
                QuadraticProblem::new(LinearOperator::dense(n, a).unwrap(), b, 0.0).unwrap()
            })
    })
}

fn any_problem() -> impl Strategy<Value = QuadraticProblem> {
    prop_oneof![diag_problem(), rank_one_problem(), dense_problem()]
}

fn problem_and_point() -> impl Strategy<Value = (QuadraticProblem, Vec<f64>)> {
    any_problem().prop_flat_map(|p| {
        let n = p.dim();
        (Just(p), prop::collection::vec(-10.0f64..10.0, n))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn gradient_matches_central_differences((p, x) in problem_and_point()) {
        let g = p.grad(&x).unwrap();
        for i in 0..p.dim() {
            let h = 1e-4;
            let (mut xp, mut xm) = (x.clone(), x.clone());
            xp[i] += h;
            xm[i] -= h;
            let fd = (p.eval(&xp).unwrap() - p.eval(&xm).unwrap()) / (2.0 * h);
            // Central differences are exact for quadratics up to rounding.
            let scale = p.eval(&x).unwrap().abs().max(1.0);
            prop_assert!((fd - g[i]).abs() <= 1e-8 * scale / h, "i={} fd={} g={}", i, fd, g[i]);
        }
    }

    #[test]
    fn gap_is_half_squared_a_norm((p, x) in problem_and_point()) {
        let xs = p.minimizer().unwrap();
        let e: Vec<f64> = x.iter().zip(&xs).map(|(a, b)| a - b).collect();
        let gap = p.eval(&x).unwrap() - p.eval(&xs).unwrap();
        let a_norm = 0.5 * p.a_norm_sq(&e).unwrap();
        prop_assert!((gap - a_norm).abs() <= 1e-9 * gap.abs().max(1.0));
    }

    #[test]
    fn rank_one_agrees_with_dense(v in prop::collection::vec(-3.0f64..3.0, 1..15), s in 0.1f64..10.0, seed in 0u64..1000) {
        let n = v.len();
        let r = LinearOperator::rank_one(v, s).unwrap();
        let d = LinearOperator::Dense(r.to_dense());
        let mut rng = ellipcenter::rng::SplitMix64::new(seed);
        let x = rng.vector(n, -5.0, 5.0);
        let (a, b) = (r.apply(&x).unwrap(), d.apply(&x).unwrap());
        for (u, w) in a.iter().zip(&b) {
            prop_assert!((u - w).abs() <= 1e-12 * u.abs().max(1.0));
        }
    }

    #[test]
    fn level_point_stays_on_the_level_set((p, x) in problem_and_point()) {
        let g = p.grad(&x).unwrap();
        prop_assume!(norm(&g) > 1e-9);
        let (_, y) = level_step(&p, &x, &g).unwrap();
        let (fx, fy) = (p.eval(&x).unwrap(), p.eval(&y).unwrap());
        prop_assert!((fx - fy).abs() <= 1e-9 * fx.abs().max(1.0));
    }

    #[test]
    fn center_minimizes_f_on_the_plane((p, x) in problem_and_point(), probes in prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 20)) {
        let g = p.grad(&x).unwrap();
        prop_assume!(norm(&g) > 1e-9);
        let (_, y) = level_step(&p, &x, &g).unwrap();
        let gy = p.grad(&y).unwrap();
        let Ok(c) = ellipse_center_coeffs(&p, &g, &gy, 1e-12) else {
            return Ok(());
        };
        let center: Vec<f64> = (0..p.dim()).map(|i| x[i] + c.alpha * g[i] + c.beta * gy[i]).collect();
        let fc = p.eval(&center).unwrap();
        let scale = (c.alpha.abs() + c.beta.abs()).max(1e-12);
        for (s, t) in probes {
            let z: Vec<f64> = (0..p.dim()).map(|i| center[i] + scale * (s * g[i] + t * gy[i])).collect();
            prop_assert!(fc <= p.eval(&z).unwrap() + 1e-9 * fc.abs().max(1.0));
        }
    }

    #[test]
    fn new_gradient_is_orthogonal_to_the_plane((p, x) in problem_and_point()) {
        let rec = me_iterate(&p, &x, &SolveOptions::absolute(1e-12)).unwrap();
        prop_assume!(rec.branch == Branch::EllipseCenter);
        let g_next = p.grad(&rec.x_next).unwrap();
        let g = rec.g_x;
        let gy = rec.g_y.unwrap();
        let bound = 1e-8 * norm(&g) * (norm(&g) + norm(&gy)).max(1.0);
        prop_assert!(dot(&g_next, &g).abs() <= bound);
        prop_assert!(dot(&g_next, &gy).abs() <= bound);
    }

    #[test]
    fn one_me_step_never_loses_to_the_gradient_step((p, x) in problem_and_point()) {
        prop_assume!(norm(&p.grad(&x).unwrap()) > 1e-9);
        let d = dominance_check(&p, &x, 1e-12).unwrap();
        prop_assert!(d.holds(1e-10), "f_me={} f_grad={}", d.f_me, d.f_grad);
        let xg = gradient_step(&p, &x).unwrap();
        prop_assert_eq!(p.eval(&xg).unwrap(), d.f_grad);
    }

    #[test]
    fn two_dimensional_problems_are_solved_in_one_step(
        l1 in 0.1f64..50.0, l2 in 0.1f64..50.0, th in 0.0f64..3.14,
        b in prop::collection::vec(-10.0f64..10.0, 2),
        x1 in prop::collection::vec(-10.0f64..10.0, 2),
    ) {
        let (c, s) = (th.cos(), th.sin());
        let a = vec![l1 * c * c + l2 * s * s, (l1 - l2) * c * s, (l1 - l2) * c * s, l1 * s * s + l2 * c * c];
        let p = QuadraticProblem::new(LinearOperator::dense(2, a).unwrap(), b, 0.0).unwrap();
        prop_assume!(norm(&p.grad(&x1).unwrap()) > 1e-9);
        let rec = me_iterate(&p, &x1, &SolveOptions::absolute(1e-300)).unwrap();
        let xs = p.minimizer().unwrap();
        let err = norm(&[rec.x_next[0] - xs[0], rec.x_next[1] - xs[1]]);
        // Either branch lands on the minimizer: the center in general, the
        // midpoint when x - x* is an eigenvector.
        prop_assert!(err <= 1e-7 * (1.0 + norm(&xs)), "branch {:?} err {}", rec.branch, err);
    }

    #[test]
    fn methods_agree_on_the_optimal_value(p in any_problem()) {
        let opts = SolveOptions::relative(1e-10).with_max_iterations(200_000);
        let x1 = vec![0.0; p.dim()];
        let f_star = p.optimal_value().unwrap();
        for m in Method::DEFAULT {
            let r = m.solve(&p, &x1, &opts, &Default::default()).unwrap();
            prop_assert_eq!(r.terminated_by, Termination::GradientTolerance, "{}", m);
            prop_assert!((r.f_final - f_star).abs() <= 1e-6 * f_star.abs().max(1.0), "{} {} {}", m, r.f_final, f_star);
        }
    }

    #[test]
    fn wolfe_gradient_reaches_moderate_accuracy(p in any_problem()) {
        let opts = SolveOptions::relative(1e-6).with_max_iterations(200_000);
        let r = Method::GradWolfe.solve(&p, &vec![0.0; p.dim()], &opts, &Default::default()).unwrap();
        prop_assert_eq!(r.terminated_by, Termination::GradientTolerance);
        let f_star = p.optimal_value().unwrap();
        prop_assert!(r.f_final - f_star <= 1e-6 * f_star.abs().max(1.0));
    }

    #[test]
    fn cg_directions_are_conjugate(p in diag_problem()) {
        let n = p.dim();
        let mut cg = ConjugateGradient::new(&p, &vec![0.0; n]).unwrap();
        let mut dirs: Vec<Vec<f64>> = Vec::new();
        for _ in 0..n {
            if norm(&p.grad(&cg.x).unwrap()) <= 1e-6 * norm(p.b()).max(1e-300) {
                break;
            }
            let step = cg.step(&p).unwrap();
            for d in &dirs {
                let c = p.a_inner(d, &step.direction).unwrap();
                let s = p.a_norm_sq(d).unwrap().sqrt() * p.a_norm_sq(&step.direction).unwrap().sqrt();
                prop_assert!(c.abs() <= 1e-6 * s);
            }
            dirs.push(step.direction);
        }
    }

    #[test]
    fn cg_stops_within_n_plus_two(p in prop_oneof![diag_problem(), rank_one_problem()]) {
        let r = cg_solve(&p, &vec![0.0; p.dim()], &SolveOptions::relative(1e-8)).unwrap();
        prop_assert_eq!(r.terminated_by, Termination::GradientTolerance);
        prop_assert!(r.iterations <= p.dim() + 2);
    }

    #[test]
    fn me_trace_is_monotone(p in any_problem()) {
        let r = me_solve(&p, &vec![0.0; p.dim()], &SolveOptions::relative(1e-8).with_trace()).unwrap();
        let recs = r.me_records.unwrap();
        for rec in &recs {
            prop_assert!(rec.f_next <= rec.f_value + 1e-12 * rec.f_value.abs().max(1.0));
        }
    }
}
