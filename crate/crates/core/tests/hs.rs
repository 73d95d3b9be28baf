use proptest::prelude::*;
use tresse::hs::*;
use tresse::pde::residual_on;
use tresse::sym::{is_zero, parse, Env, Expr};

fn p(s: &str) -> Expr {
    parse(s).unwrap()
}

fn same(a: &Expr, b: &Expr) -> bool {
    (a.clone() - b.clone()).is_zero()
}

#[test]
fn constraint_for_exponential_and_constant_g() {
    assert!(same(&constraint_g(&p("exp(w)")), &p("16*exp(2*u_x/(2 - t*u_x))*u_xx - (2 - t*u_x)^4")));
    assert!(same(&constraint_g(&p("1/2")), &p("8*u_xx - (2 - t*u_x)^4")));
}

#[test]
fn quotient_form_of_the_constraint_satisfies_the_syzygy() {
    // H = (2 − IJ)⁴/(16 g(w)) with w = 2J/(2 − IJ), plugged into 2H_I − J²H_J + 4JH
    let h = p("(2 - I*J)^4/(16*g(2*J/(2 - I*J)))");
    let d = |e: &Expr, v: &str| tresse::sym::partial(e, &tresse::Var::named(v));
    let r = Expr::int(2) * d(&h, "I") - p("J^2") * d(&h, "J") + p("4*J") * h.clone();
    assert!(r.is_zero(), "{r}");
}

// closed forms for g = e^w, C = 0, with u_x = 2w/(tw+2) substituted (A = tw + 2)
fn exp_closed(t: f64, w: f64) -> (f64, f64) {
    let a = t * w + 2.0;
    let x = ((2.0 * a - 4.0 * t).powi(2) + 4.0 * a * a) / 32.0 * w.exp();
    let u = (16.0 * t + 4.0 * t * t * w * w + 8.0 * w * a - 4.0 * a * a) / 16.0 * w.exp();
    (x, u)
}

#[test]
fn exponential_g_matches_closed_forms() {
    let sol = general_solution(p("exp(w)"), Expr::zero(), Anchor::NegInfinity).unwrap();
    for t in [0.0, 1.0, 2.0] {
        for w in [-1.0, 0.5, 2.0] {
            let (x, u) = exp_closed(t, w);
            assert!((sol.x_of(t, w).unwrap() - x).abs() < 1e-9, "x at ({t}, {w})");
            assert!((sol.u_of(t, w).unwrap() - u).abs() < 1e-9, "u at ({t}, {w})");
        }
    }
}

#[test]
fn exponential_closed_forms_agree_with_the_u_x_version() {
    // the u_x-parametrized forms where u_x is finite
    for (t, w) in [(0.0, -1.0), (1.0, 0.5), (2.0, 2.0), (0.5, -3.0)] {
        let ux = slope(t, w);
        let e = (2.0 * ux / (2.0 - t * ux)).exp();
        let d = (2.0 - t * ux).powi(2);
        let x = ((t * (t * ux - 2.0) + 2.0).powi(2) + 4.0) / (2.0 * d) * e;
        let u = (t * (2.0 - ux * t).powi(2) + t * t * ux * ux + 4.0 * ux - 4.0) / d * e;
        let (xc, uc) = exp_closed(t, w);
        assert!((x - xc).abs() < 1e-12 && (u - uc).abs() < 1e-12);
    }
}

fn cubic_closed() -> (Expr, Expr) {
    let x = p("p^2*(5*t^4*p^4 - 60*t^3*p^3 - 4*t^2*p^4 + 300*t^2*p^2 + 48*t*p^3 - 640*t*p - 240*p^2 + 480)/(15*(t*p - 2)^6)");
    let u = p("-2*p^3*(5*t^3*p^3 - 60*t^2*p^2 - 8*t*p^3 + 180*t*p + 96*p^2 - 160)/(15*(t*p - 2)^6)");
    let ux = p("2*w/(t*w + 2)");
    (x.subst_named("p", &ux), u.subst_named("p", &ux))
}

#[test]
fn cubic_g_matches_closed_forms() {
    let sol = general_solution(p("w*(1 + w)*(1 - w)"), Expr::zero(), Anchor::Zero).unwrap();
    let (xe, ue) = cubic_closed();
    for t in [0.0, 1.0, 2.0] {
        for w in [-1.0, 0.5, 2.0] {
            let env = Env::new().with("t", t).with("w", w);
            // the closed forms have a removable 0/0 at tw + 2 = 0; approach it symmetrically
            let at = |e: &Expr| match e.eval(&env) {
                Ok(v) => v,
                Err(_) => {
                    let h = 1e-4;
                    let f = |d: f64| e.eval(&Env::new().with("t", t).with("w", w + d)).unwrap();
                    (4.0 * (f(h / 2.0) + f(-h / 2.0)) - (f(h) + f(-h))) / 6.0
                }
            };
            assert!((sol.x_of(t, w).unwrap() - at(&xe)).abs() < 1e-9, "x at ({t}, {w})");
            assert!((sol.u_of(t, w).unwrap() - at(&ue)).abs() < 1e-9, "u at ({t}, {w})");
        }
    }
}

fn grid(ts: (f64, f64), ws: (f64, f64), n: usize) -> Vec<(f64, f64)> {
    let (ts, ws) = (linspace(ts.0, ts.1, n), linspace(ws.0, ws.1, n));
    ts.iter().flat_map(|&t| ws.iter().map(move |&w| (t, w))).collect()
}

#[test]
fn residual_is_small_off_the_singular_set() {
    let sol = general_solution(p("exp(w)"), Expr::zero(), Anchor::NegInfinity).unwrap();
    let rep = sol.residual(&grid((0.0, 1.5), (-1.0, 2.0), 20), 1e-3);
    assert_eq!(rep.evaluated, 400, "{:?}", rep.excluded.first());
    assert!(rep.max < 1e-8, "{}", rep.max);

    let sol = general_solution(p("w*(1 + w)*(1 - w)"), Expr::zero(), Anchor::Zero).unwrap();
    let rep = sol.residual(&grid((0.0, 0.5), (1.2, 3.0), 20), 1e-3);
    assert_eq!(rep.evaluated, 400);
    assert!(rep.max < 1e-8, "{}", rep.max);
}

#[test]
fn near_singular_points_are_excluded_and_reported() {
    let sol = general_solution(p("exp(w)"), Expr::zero(), Anchor::NegInfinity).unwrap();
    let rep = sol.residual(&[(1.0, -2.0), (1.0, 0.0)], 1e-3);
    assert_eq!(rep.evaluated, 1);
    assert_eq!(rep.excluded.len(), 1);
    assert_eq!((rep.excluded[0].0, rep.excluded[0].1), (1.0, -2.0));
    assert_eq!(sol.point(1.0, -2.0).flag, PointFlag::Singular);
}

#[test]
fn zero_g_is_degenerate() {
    let sol = general_solution(Expr::zero(), p("t^2"), Anchor::Zero).unwrap();
    assert!(sol.degenerate);
    assert_eq!(sol.x_of(3.0, 1.5).unwrap(), 9.0);
    assert_eq!(sol.u_of(3.0, -7.0).unwrap(), 6.0);
    assert_eq!(sol.point(1.0, 1.0).flag, PointFlag::Singular);
    assert_eq!(sol.residual(&[(1.0, 1.0)], 1e-3).evaluated, 0);
}

#[test]
fn surface_csv_flags_every_bad_row() {
    let sol = general_solution(p("exp(w)"), Expr::zero(), Anchor::NegInfinity).unwrap().with_window(-5.0, 1.0);
    let pts = sol.surface(&[1.0], &[-2.0, 0.0, 2.0]);
    let csv = surface_csv(&pts);
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "t,w,x,u,u_x,flag");
    assert!(lines[1].ends_with(",singular"));
    assert!(lines[2].ends_with(",ok"));
    assert!(lines[3].ends_with(",excluded"));
    for l in &lines[1..] {
        assert!(!l.contains("NaN") || !l.ends_with(",ok"));
    }
    // 17 significant digits
    assert!(lines[2].split(',').next().unwrap().starts_with("1.0000000000000000e0"));
}

#[test]
fn quadrature_failure_flags_the_point_without_aborting() {
    // ∫ from −∞ of e^{w²} diverges
    let sol = general_solution(p("exp(w^2)"), Expr::zero(), Anchor::NegInfinity).unwrap();
    let pts = sol.surface(&[0.0], &[0.0]);
    assert_eq!(pts[0].flag, PointFlag::Excluded);
    assert!(sol.residual(&[(0.0, 0.0)], 1e-3).excluded.len() == 1);
}

#[test]
fn explicit_cauchy_solutions_are_exact() {
    let f = equation();
    for u in [
        "(2*x*(t - 1) + 1 - ((t - 1)^3 + 3*x*(t - 1) + 1)^(2/3))/(t - 1)^2",
        "(1 + 2*t*x - (t^3 + 3*t*x + 1)^(2/3))/t^2",
    ] {
        let r = residual_on(&f, &p(u));
        assert!(is_zero(&r).unwrap().passed(), "{u}: {r}");
    }
}

fn problem(t0: f64, u0: &str, window: (f64, f64)) -> CauchyProblem {
    CauchyProblem { t0, u0: p(u0), window }
}

#[test]
fn cauchy_g_worked_problems() {
    let cg = cauchy_g(&problem(1.0, "exp(-x)", (-3.0, 30.0))).unwrap();
    assert!(cg.symbolic);
    assert!(same(&cg.g, &p("-8/(w*(w + 2)^3)")), "{}", cg.g);
    let cg = cauchy_g(&problem(1.0, "x^2", (-10.0, 10.0))).unwrap();
    assert!(same(&cg.g, &p("8/(2 + w)^4")), "{}", cg.g);
    assert_eq!(cg.branches.len(), 2, "split where 2 − t0 u0' vanishes");
    let cg = cauchy_g(&problem(0.0, "x^2", (-1.0, 1.0))).unwrap();
    assert!(same(&cg.g, &p("1/2")), "{}", cg.g);
}

#[test]
fn cauchy_g_needs_convexity() {
    let e = cauchy_g(&problem(1.0, "3*x + 1", (-1.0, 1.0))).unwrap_err();
    assert!(e.to_string().contains("u0''"), "{e}");
}

#[test]
fn cauchy_g_numeric_inverse_and_branches() {
    // u0' = 3x² + x has no elementary inverse in the supported forms
    let cg = cauchy_g(&problem(0.0, "x^3 + x^2/2", (0.5, 2.0))).unwrap();
    assert!(!cg.symbolic);
    for x in [0.7, 1.3, 1.9] {
        let w = cg.slope_w(x).unwrap();
        let g = cg.g.eval(&cg.env.clone().with("w", w)).unwrap();
        assert!((g - 1.0 / cg.u0_xx(x).unwrap()).abs() < 1e-9);
    }
    // u0'' = 6x changes sign at 0
    let cg = cauchy_g(&problem(0.0, "x^3", (-2.0, 2.0))).unwrap();
    assert_eq!(cg.branches.len(), 2);
    assert!(cg.branches[0].x.1.abs() < 1e-9);
}

#[test]
fn numeric_g_fits_each_branch_separately() {
    // t0 u0' = 2 splits each convex/concave half again; the w-ranges of the pieces overlap
    let cg = cauchy_g(&problem(0.5, "x^3", (-2.0, 2.0))).unwrap();
    assert!(!cg.symbolic);
    assert_eq!(cg.branches.len(), 4);
    for b in 0..4 {
        let x = cg.branches[b].x;
        let an = Anchor::At(cg.slope_w((x.0 + x.1) / 2.0).unwrap());
        let fit = fit_c(&cg, b, an, &CRule::Linear).unwrap();
        assert!(fit.spread < 1e-10, "branch {b}: {}", fit.spread);
        let sol = cg.solution(b, an, &fit).unwrap();
        assert!(cg.round_trip(&sol, b, 20).unwrap() < 1e-7, "branch {b}");
    }
}

fn decay_solution() -> (CauchyG, ParamSolution, CFit) {
    let cg = cauchy_g(&problem(1.0, "exp(-x)", (-3.0, 30.0))).unwrap();
    let fit = fit_c(&cg, 0, Anchor::Infinity, &CRule::Decay).unwrap();
    let sol = cg.solution(0, Anchor::Infinity, &fit).unwrap();
    (cg, sol, fit)
}

#[test]
fn decay_rule_for_exponential_data() {
    let (cg, sol, fit) = decay_solution();
    assert!(fit.spread < 1e-10, "{}", fit.spread);
    let d = fit.decay.as_ref().unwrap();
    assert!(d.w.abs() < 1e-12);
    let consistent = |t: f64| -t * t / 2.0 - t + 1.5 - 2f64.ln();
    for t in linspace(0.0, 2.0, 20) {
        assert!((fit.eval(t).unwrap() - consistent(t)).abs() < 1e-10, "t = {t}");
    }
    assert!(cg.round_trip(&sol, 0, 50).unwrap() < 1e-7);
    // u → 0 at the decaying end for other times too
    for t in [0.5, 1.5] {
        assert!(sol.u_of(t, -1e-9).unwrap().abs() < 1e-7);
    }
}

#[test]
fn decay_rule_needs_a_right_end() {
    let cg = cauchy_g(&problem(1.0, "x^2", (-10.0, 10.0))).unwrap();
    let e = fit_c(&cg, 0, Anchor::Infinity, &CRule::Decay).unwrap_err();
    assert!(e.to_string().contains("decay rule inapplicable"), "{e}");
    let e = fit_c(&cg, 1, Anchor::Infinity, &CRule::Decay).unwrap_err();
    assert!(e.to_string().contains("decay rule inapplicable"), "{e}");
}

#[test]
fn explicit_zero_c() {
    let cg = cauchy_g(&problem(1.0, "x^2", (-10.0, 10.0))).unwrap();
    let fit = fit_c(&cg, 0, Anchor::Infinity, &CRule::Explicit(Expr::zero())).unwrap();
    assert!(fit.c.is_zero());
    assert!(fit.mismatch.unwrap() > 1.0);
}

#[test]
fn square_data_on_both_branches() {
    let cg = cauchy_g(&problem(1.0, "x^2", (-10.0, 10.0))).unwrap();
    for b in 0..2 {
        let fit = fit_c(&cg, b, Anchor::Infinity, &CRule::Linear).unwrap();
        let [a0, a1, a2] = fit.coeffs.unwrap();
        assert!(a0.abs() < 1e-10 && (a1 - 1.0).abs() < 1e-10 && a2 == 0.0, "branch {b}: {:?}", fit.coeffs);
        let sol = cg.solution(b, Anchor::Infinity, &fit).unwrap();
        assert!(cg.round_trip(&sol, b, 40).unwrap() < 1e-7);
    }
}

#[test]
fn square_data_singular_points() {
    let cg = cauchy_g(&problem(1.0, "x^2", (-10.0, 10.0))).unwrap();
    let ts = [-2.0, -1.0, -0.5, 0.25, 0.5, 0.75, 1.5, 2.0, 3.0];
    let mut n = 0;
    for b in 0..2 {
        let fit = fit_c(&cg, b, Anchor::Infinity, &CRule::Linear).unwrap();
        let sol = cg.solution(b, Anchor::Infinity, &fit).unwrap();
        for s in singular_curve(&sol, &ts) {
            n += 1;
            let (x, u, t) = (s.x, s.u, s.t);
            assert!((3.0 * x * x * u * u + 4.0 * x.powi(3) - u.powi(3) + 1.0).abs() < 1e-10 * (1.0 + u.abs().powi(3)));
            assert!((x + (t * t - 3.0 * t + 3.0) * t / (3.0 * (t - 1.0))).abs() < 1e-10);
            assert!((u + (2.0 * (t - 1.0).powi(3) - 1.0) / (3.0 * (t - 1.0).powi(2))).abs() < 1e-10);
        }
    }
    assert_eq!(n, ts.len());
}

#[test]
fn exponential_data_singular_points() {
    let (_, sol, _) = decay_solution();
    let pts = singular_curve(&sol, &[1.1, 1.2, 1.4, 2.0]);
    assert_eq!(pts.len(), 4);
    for s in pts {
        assert!((2.0 * s.u - (1.5 - s.x).exp()).abs() < 1e-10, "{s:?}");
    }
}

#[test]
fn constant_g_singular_set() {
    let sol = general_solution(p("1/2"), Expr::zero(), Anchor::Zero).unwrap();
    for t in [0.5, 2.0, -1.0] {
        let pts = singular_curve(&sol, &[t]);
        assert_eq!(pts.len(), 1);
        assert_eq!(pts[0].w, -2.0 / t);
        assert_eq!(sol.x_w(t, pts[0].w).unwrap(), 0.0);
    }
    assert!(singular_curve(&sol, &[0.0]).is_empty());
}

#[test]
fn constant_g_implicit_relation() {
    let sol = general_solution(p("1/2"), p("1/(3*t)"), Anchor::Zero).unwrap();
    let rel = p("t^4*u^3 - 6*t^3*x*u^2 + 12*t^2*x^2*u - 8*t*x^3 + 9*x^2");
    for t in [0.25, 0.5, 1.0, 2.0] {
        for w in [-1.0, 0.3, 2.0] {
            let (x, u) = (sol.x_of(t, w).unwrap(), sol.u_of(t, w).unwrap());
            let mut env = Env::new().with("t", t).with("x", x);
            env.set(tresse::Var::jet(0, 0), u);
            let r = rel.eval(&env).unwrap();
            assert!(r.abs() < 1e-9 * (1.0 + x * x), "({t}, {w}): {r}");
        }
    }
    assert!(same(&rel.subst_named("t", &Expr::zero()), &p("9*x^2")));
}

#[test]
fn transform_table() {
    let s = p("s");
    let g = p("exp(w)");
    assert!(same(&transform_g(HsGenerator::SpaceScaling, &s, &g), &p("exp(-s)*exp(w)")));
    assert!(same(&transform_g(HsGenerator::Projective, &s, &p("w^3")), &p("(w + 2*s)^3")));
    assert!(same(&transform_g(HsGenerator::TimeScaling, &s, &p("w^2")), &p("exp(-2*s)*w^2")));
    assert!(same(&transform_g(HsGenerator::Translation, &s, &p("1")), &p("16/(2 - s*w)^4")));
    for gen in HsGenerator::ALL {
        assert!(same(&transform_g(gen, &Expr::zero(), &p("g(w)")), &p("g(w)")), "{gen}");
    }
}

#[test]
fn generator_names_round_trip() {
    for gen in HsGenerator::ALL {
        assert_eq!(HsGenerator::parse(gen.name()).unwrap(), gen);
    }
    assert!(HsGenerator::parse("boost").is_err());
}

/// A jet of the e^w solution at (t, w), with u_xx = 16/((tw+2)⁴ g).
fn exp_jet(t: f64, w: f64) -> Jet2 {
    let (x, u) = exp_closed(t, w);
    let a = t * w + 2.0;
    Jet2 { t, x, u, u_x: slope(t, w), u_xx: 16.0 / (a.powi(4) * w.exp()) }
}

fn g_residual(g: &Expr, j: Jet2) -> f64 {
    let env = Env::new().with("t", j.t).with("x", j.x).with("s", 0.0);
    let mut env = env;
    env.set(tresse::Var::jet(0, 1), j.u_x).set(tresse::Var::jet(0, 2), j.u_xx);
    constraint_g(g).eval(&env).unwrap() / (2.0 - j.t * j.u_x).powi(4)
}

#[test]
fn flowed_surface_satisfies_the_transformed_constraint() {
    let g = p("exp(w)");
    for gen in HsGenerator::ALL {
        for (s, sq) in [(0.1, "1/10"), (-0.05, "-1/20")] {
            let gt = transform_g(gen, &p(sq), &g);
            for (t, w) in [(0.3, -0.5), (0.5, 0.4), (1.0, 1.0)] {
                let j = flow_jet(gen, -s, exp_jet(t, w), 200).unwrap();
                let r = g_residual(&gt, j);
                assert!(r.abs() < 1e-7, "{gen} s = {s} at ({t}, {w}): {r}");
            }
        }
    }
}

#[test]
fn forward_flow_does_not_match_the_table() {
    let g = p("exp(w)");
    let gt = transform_g(HsGenerator::SpaceScaling, &p("1/10"), &g);
    let j = flow_jet(HsGenerator::SpaceScaling, 0.1, exp_jet(0.5, 0.4), 200).unwrap();
    assert!(g_residual(&gt, j).abs() > 1e-3);
}

#[test]
fn comparison_with_the_classical_form() {
    let c = hs_comparison(&p("exp(w)"), &Env::new()).unwrap();
    let (rel, slope) = c.check(&linspace(-1.0, 1.0, 9), 1e-3).unwrap();
    assert!(rel < 1e-8, "{rel}");
    assert!(slope < 1e-8, "{slope}");

    let c = hs_comparison(&p("1"), &Env::new()).unwrap();
    for w in [-1.0, 0.5, 2.0] {
        assert!((c.xi(w).unwrap() - w).abs() < 1e-14);
        assert!((c.alpha(w).unwrap() - w * w / 2.0).abs() < 1e-14);
        assert!((c.beta(w).unwrap() - w.powi(3) / 6.0).abs() < 1e-14);
    }
    assert!(hs_comparison(&Expr::zero(), &Env::new()).is_err());
    let c = hs_comparison(&p("w*(1 - w^2)"), &Env::new()).unwrap();
    assert_eq!(c.branches(-2.0, 2.0).len(), 4);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn slope_identity_from_quadrature(t in 0.0f64..2.0, w in -1.5f64..2.0) {
        prop_assume!((t * w + 2.0).abs() > 0.3);
        let sol = general_solution(p("exp(w)"), p("t^3"), Anchor::NegInfinity).unwrap();
        let h = 1e-3;
        let d = |f: &dyn Fn(f64) -> f64| (8.0 * (f(w + h) - f(w - h)) - (f(w + 2.0 * h) - f(w - 2.0 * h))) / (12.0 * h);
        let xw = d(&|v| sol.x_of(t, v).unwrap());
        let uw = d(&|v| sol.u_of(t, v).unwrap());
        prop_assert!((uw / xw - slope(t, w)).abs() < 1e-9);
    }

    #[test]
    fn slope_is_injective_on_a_slice(t in -2.0f64..2.0, w1 in -1.0f64..0.9, dw in 0.01f64..0.5) {
        let w2 = w1 + dw;
        prop_assume!((t * w1 + 2.0) > 0.1 && (t * w2 + 2.0) > 0.1);
        prop_assert!(slope(t, w2) > slope(t, w1));
    }
}
