//! The eleven acceptance criteria, one report line each. Tolerances and runtimes are the
//! published ones; a failing criterion prints what it measured.

use std::time::{Duration, Instant};

use tresse::catalog::{self, characteristics_solve, CharSettings, InitialCurve, Report, Stage};
use tresse::hs::{
    cauchy_g, equation, fit_c, general_solution, linspace, singular_curve, Anchor, CRule, CauchyProblem,
};
use tresse::invariants::{check_invariant, discover_syzygy, DiscoverSettings, Realizer, Syzygy, TresseFrame};
use tresse::jet::VectorField;
use tresse::pde::{residual_on, Check, PdeManifold};
use tresse::sym::{Env, Lambda, Verdict};
use tresse::{parse, Expr};

type Outcome = Result<String, String>;

fn p(s: &str) -> Expr {
    parse(s).unwrap()
}

fn exact(c: &Check, what: &str) -> Result<(), String> {
    match c.verdict {
        Verdict::Exact => Ok(()),
        v => Err(format!("{what}: {v:?}, residual {}", c.residual)),
    }
}

fn within(elapsed: Duration, limit: f64, what: &str) -> Result<(), String> {
    let s = elapsed.as_secs_f64();
    if s < limit {
        Ok(())
    } else {
        Err(format!("{what} took {s:.1} s (limit {limit} s)"))
    }
}

fn burgers() -> PdeManifold {
    PdeManifold::parse("u_xx - u_t - u*u_x", "u_t").unwrap()
}

fn burgers_full() -> Vec<VectorField> {
    [("1", "0", "0"), ("0", "1", "0"), ("0", "t", "1"), ("2*t", "x", "-u"), ("t^2", "t*x", "x - t*u")]
        .iter()
        .map(|(a, b, c)| VectorField::parse(a, b, c).unwrap())
        .collect()
}

/// Items of one stage across the reports, failing on anything short of an exact zero.
fn stage_exact(reports: &[Report], stage: Stage, entries: Option<&[&str]>) -> Result<usize, String> {
    let mut n = 0;
    for r in reports {
        if entries.is_some_and(|es| !es.contains(&r.entry.as_str())) {
            continue;
        }
        for i in r.items.iter().filter(|i| i.stage == stage) {
            if i.verdict != Verdict::Exact {
                return Err(format!("{} [{stage}] {}: {:?}, residual {}", r.entry, i.item, i.verdict, i.residual));
            }
            n += 1;
        }
        if !r.passed {
            return Err(format!("{} did not pass verification", r.entry));
        }
    }
    Ok(n)
}

fn has_stage(reports: &[Report], entry: &str, stage: Stage) -> Result<(), String> {
    let r = reports.iter().find(|r| r.entry == entry).ok_or_else(|| format!("no entry {entry}"))?;
    if r.items.iter().any(|i| i.stage == stage) {
        Ok(())
    } else {
        Err(format!("{entry} has no {stage} items"))
    }
}

fn c1_symmetry(reports: &[Report]) -> Outcome {
    let start = Instant::now();
    let m = burgers();
    for x in burgers_full() {
        exact(&m.check_symmetry(&x).map_err(|e| e.to_string())?, &format!("Burgers {x}"))?;
    }
    let n = stage_exact(reports, Stage::Symmetry, None)?;
    within(start.elapsed(), 30.0, "symmetry suite")?;
    Ok(format!("5 Burgers generators and {n} catalog symmetries exact"))
}

fn c2_invariance(reports: &[Report]) -> Outcome {
    let m = burgers();
    let gens = burgers_full();
    for e in ["u_xxx^3/u_xx^4", "u_xxx*u_xxxx/u_xx^3", "u_xxxxx/u_xx^2", "u_xxx^2*u_xxxxxx/u_xx^5"] {
        for (k, c) in check_invariant(&p(e), &gens, &m).map_err(|e| e.to_string())?.iter().enumerate() {
            exact(c, &format!("{e} under generator {k}"))?;
        }
    }
    let n = stage_exact(reports, Stage::Invariance, None)?;
    Ok(format!("order-6 invariants under all 5 generators and {n} catalog invariance checks exact"))
}

fn c3_frames(reports: &[Report]) -> Outcome {
    let n = stage_exact(reports, Stage::Duality, None)?;
    if n != 4 * reports.len() {
        return Err(format!("{n} duality identities for {} entries", reports.len()));
    }
    for e in ["hunter-saxton", "burgers-h3"] {
        has_stage(reports, e, Stage::Commutation)?;
    }
    stage_exact(reports, Stage::Commutation, Some(&["hunter-saxton", "burgers-h3"]))?;
    Ok(format!("{n} duality identities; HS and burgers-h3 commutation exact"))
}

fn c4_syzygies(reports: &[Report]) -> Outcome {
    let listed = [
        "hunter-saxton",
        "burgers-h3",
        "burgers-full",
        "hs-3dim",
        "liouville-3dim",
        "type1-general",
        "type2-general",
        "type3-general",
        "type4-general",
    ];
    for e in listed {
        has_stage(reports, e, Stage::Syzygy)?;
    }
    let n = stage_exact(reports, Stage::Syzygy, Some(&listed))?;
    // the one-syzygy form and the K-elimination identity, checked directly
    let m = burgers();
    let fr = TresseFrame::new(&p("u_x"), &p("u_xx"), &m).map_err(|e| e.to_string())?;
    let mut r = Realizer::new(&m, &fr, &[("H", p("u_xxx"))]).map_err(|e| e.to_string())?;
    let one = Syzygy::parse("J^2*H_II + 2*J*H*H_IJ + H^2*H_JJ + I^2*H_I + 3*I*J*H_J - 4*I*H - 3*J^2").unwrap();
    exact(&r.check(&one).map_err(|e| e.to_string())?, "Burgers one-syzygy form")?;
    let fr = TresseFrame::new(&p("u_xxx^3/u_xx^4"), &p("u_xxx*u_xxxx/u_xx^3"), &m).map_err(|e| e.to_string())?;
    let mut r = Realizer::new(&m, &fr, &[("H", p("u_xxxxx/u_xx^2")), ("K", p("u_xxx^2*u_xxxxxx/u_xx^5"))])
        .map_err(|e| e.to_string())?;
    let k = Syzygy::parse("K + (I*(4*I - 3*J)*H_I + ((3*J - H)*I - J^2)*H_J - 2*I*H)").unwrap();
    exact(&r.check(&k).map_err(|e| e.to_string())?, "K-elimination identity")?;
    Ok(format!("{n} catalog syzygies, the one-syzygy form and the K-elimination identity exact"))
}

fn c5_quotient_solutions(reports: &[Report]) -> Outcome {
    let listed =
        ["hunter-saxton", "ex1.1", "ex1.2", "ex2.1", "ex2.2", "ex2.3", "ex3.1", "ex3.2", "ex3.3", "ex4.1", "ex4.3", "disguised"];
    for e in listed {
        has_stage(reports, e, Stage::QuotientSolution)?;
    }
    let n = stage_exact(reports, Stage::QuotientSolution, Some(&listed))?;
    Ok(format!("{n} quotient-solution identities exact over {} entries", listed.len()))
}

fn c6_reconstructions() -> Outcome {
    let unary = |v: &str, b: &str| Lambda::unary(v, p(b));
    let err = |e: tresse::Error| e.to_string();
    let e = catalog::entry("ex3.3").map_err(err)?;
    let inst = e.instantiate(&[("g", unary("x", "x")), ("C", unary("t", "t"))], &[]).map_err(err)?;
    exact(inst.residual.as_ref().ok_or("ex3.3: no solution")?, "ex3.3")?;
    let e = catalog::entry("ex4.1").map_err(err)?;
    let inst = e.instantiate(&[("g", unary("x", "x"))], &[("A", Expr::int(2))]).map_err(err)?;
    exact(inst.residual.as_ref().ok_or("ex4.1: no solution")?, "ex4.1, A = 2")?;
    let e = catalog::entry("ode-reduction").map_err(err)?;
    let inst = e.instantiate(&[], &[("A", p("A")), ("B", p("B")), ("C", p("C"))]).map_err(err)?;
    exact(inst.residual.as_ref().ok_or("ode-reduction: no solution")?, "ode-reduction")?;
    let f = equation();
    for u in [
        "(2*x*(t - 1) + 1 - ((t - 1)^3 + 3*x*(t - 1) + 1)^(2/3))/(t - 1)^2",
        "(1 + 2*t*x - (t^3 + 3*t*x + 1)^(2/3))/t^2",
    ] {
        exact(&Check::of(residual_on(&f, &p(u))).map_err(err)?, u)?;
    }
    let g = catalog::entry("ex2.3").map_err(err)?.constraint().ok_or("ex2.3: no constraint")?;
    let got = catalog::on_first_derivative(&g, &p("-2*D(v,0,1)(t, x)/v(t, x)"));
    exact(&Check::of(got - p("-(2*D(v,0,2)(t, x) + g(x)*v(t, x))/v(t, x)")).map_err(err)?, "Riccati to Schrödinger")?;
    Ok("ex3.3, ex4.1, ode-reduction, both explicit HS Cauchy solutions and the Schrödinger identity exact".into())
}

fn c7_hs_pipeline() -> Outcome {
    let start = Instant::now();
    let err = |e: tresse::Error| e.to_string();
    // e^w from −∞: A = tw + 2
    let exp_closed = |t: f64, w: f64| {
        let a = t * w + 2.0;
        let x = ((2.0 * a - 4.0 * t).powi(2) + 4.0 * a * a) / 32.0 * w.exp();
        let u = (16.0 * t + 4.0 * t * t * w * w + 8.0 * w * a - 4.0 * a * a) / 16.0 * w.exp();
        (x, u)
    };
    let cubic_x = p("p^2*(5*t^4*p^4 - 60*t^3*p^3 - 4*t^2*p^4 + 300*t^2*p^2 + 48*t*p^3 - 640*t*p - 240*p^2 + 480)/(15*(t*p - 2)^6)");
    let cubic_u = p("-2*p^3*(5*t^3*p^3 - 60*t^2*p^2 - 8*t*p^3 + 180*t*p + 96*p^2 - 160)/(15*(t*p - 2)^6)");
    let ux = p("2*w/(t*w + 2)");
    let (cubic_x, cubic_u) = (cubic_x.subst_named("p", &ux), cubic_u.subst_named("p", &ux));
    let exp_sol = general_solution(p("exp(w)"), Expr::zero(), Anchor::NegInfinity).map_err(err)?;
    let cubic_sol = general_solution(p("w*(1 + w)*(1 - w)"), Expr::zero(), Anchor::Zero).map_err(err)?;
    let mut worst = 0f64;
    for t in [0.0, 1.0, 2.0] {
        for w in [-1.0, 0.5, 2.0] {
            let (x, u) = exp_closed(t, w);
            worst = worst.max((exp_sol.x_of(t, w).map_err(err)? - x).abs());
            worst = worst.max((exp_sol.u_of(t, w).map_err(err)? - u).abs());
            // removable 0/0 of the cubic forms at tw + 2 = 0: symmetric Richardson limit
            let at = |e: &Expr| -> Result<f64, String> {
                let f = |d: f64| e.eval(&Env::new().with("t", t).with("w", w + d));
                match f(0.0) {
                    Ok(v) => Ok(v),
                    Err(_) => {
                        let h = 1e-4;
                        let s = |d: f64| -> Result<f64, String> { Ok(f(d).map_err(err)? + f(-d).map_err(err)?) };
                        Ok((4.0 * s(h / 2.0)? - s(h)?) / 6.0)
                    }
                }
            };
            worst = worst.max((cubic_sol.x_of(t, w).map_err(err)? - at(&cubic_x)?).abs());
            worst = worst.max((cubic_sol.u_of(t, w).map_err(err)? - at(&cubic_u)?).abs());
        }
    }
    if worst >= 1e-9 {
        return Err(format!("closed-form mismatch {worst:.3e} ≥ 1e-9"));
    }
    let grid = |ts: (f64, f64), ws: (f64, f64)| -> Vec<(f64, f64)> {
        let (ts, ws) = (linspace(ts.0, ts.1, 20), linspace(ws.0, ws.1, 20));
        ts.iter().flat_map(|&t| ws.iter().map(move |&w| (t, w))).collect()
    };
    let mut res = 0f64;
    for (sol, ts, ws) in [(&exp_sol, (0.0, 1.5), (-1.0, 2.0)), (&cubic_sol, (0.0, 0.5), (1.2, 3.0))] {
        let rep = sol.residual(&grid(ts, ws), 1e-3);
        if rep.evaluated != 400 {
            return Err(format!("only {} of 400 residual points evaluated", rep.evaluated));
        }
        res = res.max(rep.max);
    }
    if res >= 1e-8 {
        return Err(format!("PDE residual {res:.3e} ≥ 1e-8"));
    }
    within(start.elapsed(), 60.0, "HS pipeline")?;
    Ok(format!("closed forms to {worst:.1e}, residual {res:.1e} on 2 × 400 points"))
}

fn square_problem() -> CauchyProblem {
    CauchyProblem { t0: 1.0, u0: p("x^2"), window: (-10.0, 10.0) }
}

fn decay_problem() -> CauchyProblem {
    CauchyProblem { t0: 1.0, u0: p("exp(-x)"), window: (-3.0, 30.0) }
}

fn c8_cauchy() -> Outcome {
    let err = |e: tresse::Error| e.to_string();
    let cg = cauchy_g(&decay_problem()).map_err(err)?;
    if !(cg.symbolic && (cg.g.clone() - p("-8/(w*(w + 2)^3)")).is_zero()) {
        return Err(format!("e^(-x) data gave g = {}", cg.g));
    }
    let sq = cauchy_g(&square_problem()).map_err(err)?;
    if !(sq.symbolic && (sq.g.clone() - p("8/(2 + w)^4")).is_zero()) {
        return Err(format!("x² data gave g = {}", sq.g));
    }
    let fit = fit_c(&cg, 0, Anchor::Infinity, &CRule::Decay).map_err(err)?;
    let sol = cg.solution(0, Anchor::Infinity, &fit).map_err(err)?;
    let round_trip = cg.round_trip(&sol, 0, 50).map_err(err)?;
    let published = |t: f64| -t * t / 2.0 - t + 2.0 - 2f64.ln();
    let mut dev = 0f64;
    for t in linspace(0.0, 2.0, 20) {
        dev = dev.max((fit.eval(t).map_err(err)? - published(t)).abs());
    }
    let mut fails = Vec::new();
    if dev >= 1e-12 {
        fails.push(format!("C(t) differs from −t²/2 − t + 2 − ln 2 by {dev:.6} (fit: {}, constant 3/2 − ln 2 off by {:.1e})", fit.c, (fit.eval(0.0).map_err(err)? - (1.5 - 2f64.ln())).abs()));
    }
    if round_trip >= 1e-7 {
        fails.push(format!("initial-slice error {round_trip:.3e}"));
    }
    if fails.is_empty() {
        Ok(format!("both g exact; C to {dev:.1e}; round trip {round_trip:.1e}"))
    } else {
        Err(format!("both g exact, round trip {round_trip:.1e}; {}", fails.join("; ")))
    }
}

fn c9_singular() -> Outcome {
    let err = |e: tresse::Error| e.to_string();
    let sq = cauchy_g(&square_problem()).map_err(err)?;
    let ts = [-2.0, -1.0, -0.5, 0.25, 0.5, 0.75, 1.5, 2.0, 3.0];
    let (mut n, mut worst_sq) = (0, 0f64);
    for b in 0..sq.branches.len() {
        let fit = fit_c(&sq, b, Anchor::Infinity, &CRule::Linear).map_err(err)?;
        let sol = sq.solution(b, Anchor::Infinity, &fit).map_err(err)?;
        for s in singular_curve(&sol, &ts) {
            let (x, u) = (s.x, s.u);
            let r = (3.0 * x * x * u * u + 4.0 * x.powi(3) - u.powi(3) + 1.0) / (1.0 + u.abs().powi(3));
            worst_sq = worst_sq.max(r.abs());
            n += 1;
        }
    }
    let cg = cauchy_g(&decay_problem()).map_err(err)?;
    let fit = fit_c(&cg, 0, Anchor::Infinity, &CRule::Decay).map_err(err)?;
    let sol = cg.solution(0, Anchor::Infinity, &fit).map_err(err)?;
    let pts = singular_curve(&sol, &[1.1, 1.2, 1.4, 2.0]);
    let off = |a: f64| pts.iter().map(|s| (2.0 * s.u - (a - s.x).exp()).abs()).fold(0.0, f64::max);
    let (worst_exp, consistent) = (off(2.0), off(1.5));
    let mut fails = Vec::new();
    if n < ts.len() || worst_sq >= 1e-10 {
        fails.push(format!("x² curve: {n} points, relative residual {worst_sq:.3e}"));
    }
    if pts.is_empty() || worst_exp >= 1e-10 {
        fails.push(format!("e^(-x) curve: {} points off 2u = e^(2−x) by up to {worst_exp:.6}, 2u = e^(3/2−x) holds to {consistent:.1e}", pts.len()));
    }
    if fails.is_empty() {
        Ok(format!("{n} x² points to {worst_sq:.1e}; {} e^(-x) points to {worst_exp:.1e}", pts.len()))
    } else {
        Err(format!("x² relation holds to {worst_sq:.1e} on {n} points; {}", fails.join("; ")))
    }
}

fn c10_discovery() -> Outcome {
    let err = |e: tresse::Error| e.to_string();
    let m = burgers();
    let hs = PdeManifold::parse("u_tx + u*u_xx + u_x^2/2", "u_tx").unwrap();
    let cases: [(&PdeManifold, (&str, &str), Vec<(&str, Expr)>, Vec<&str>, u32, &str); 2] = [
        (&m, ("u_x", "u_xx"), vec![("H", p("u_xxx")), ("K", p("u_xxxx"))], vec!["H", "K"], 2, "J*H_I + H*H_J - K"),
        (&hs, ("t", "u_x"), vec![("H", p("u_xx"))], vec!["H"], 3, "2*H_I - J^2*H_J + 4*J*H"),
    ];
    for (m, (i, j), gens, names, degree, want) in cases {
        let fr = TresseFrame::new(&p(i), &p(j), m).map_err(err)?;
        let mut r = Realizer::new(m, &fr, &gens).map_err(err)?;
        let want = p(want);
        for seed in 0..10u64 {
            let st = DiscoverSettings { seed: 0x5eed + 7919 * seed, ..Default::default() };
            let d = discover_syzygy(&names, degree, &mut r, &st).map_err(err)?;
            let [s] = d.syzygies.as_slice() else {
                return Err(format!("seed {seed}: {} relations for {want}", d.syzygies.len()));
            };
            // same relation up to a nonzero scalar
            if (s.lhs.clone() / want.clone()).as_rational().is_none() {
                return Err(format!("seed {seed}: found {s}, expected a multiple of {want}"));
            }
            exact(&r.check(s).map_err(err)?, &format!("seed {seed}: {s}"))?;
        }
    }
    Ok("Burgers and HS relations recovered and re-verified for 10 seeds each".into())
}

fn c11_characteristics() -> Outcome {
    let err = |e: tresse::Error| e.to_string();
    let e = catalog::entry("hunter-saxton").map_err(err)?;
    let mut env = Env::new();
    env.bind_lambda("g", Lambda::unary("w", p("exp(w)")));
    let exact = p("(2 - I*J)^4/(16*g(2*J/(2 - I*J)))");
    let curve = InitialCurve::at_fixed_i(0.0, p("exp(-sigma)"), 0.1, 1.0, 10);
    let error = |step: f64| -> Result<f64, String> {
        let c = characteristics_solve(&e, &curve, &CharSettings { span: 0.4, step, ..Default::default() }, &env).map_err(err)?;
        c.max_error(|i, j| exact.eval(&env.clone().with("I", i).with("J", j))).map_err(err)
    };
    let (e1, e2) = (error(0.02)?, error(0.01)?);
    let factor = e1 / e2;
    if factor >= 12.0 {
        Ok(format!("error {e1:.2e} → {e2:.2e}, factor {factor:.2}"))
    } else {
        Err(format!("error {e1:.2e} → {e2:.2e}, factor {factor:.2} < 12"))
    }
}

#[test]
fn acceptance() {
    let start = Instant::now();
    let reports = catalog::verify_all().expect("catalog verification runs");
    let verified = start.elapsed();
    let criteria: Vec<(&str, Box<dyn Fn() -> Outcome + '_>)> = vec![
        ("symmetry suite", Box::new(|| c1_symmetry(&reports))),
        ("invariance suite", Box::new(|| c2_invariance(&reports))),
        ("Tresse duality and commutation", Box::new(|| c3_frames(&reports))),
        ("syzygy suite", Box::new(|| c4_syzygies(&reports))),
        ("quotient-solution suite", Box::new(|| c5_quotient_solutions(&reports))),
        ("reconstruction suite", Box::new(c6_reconstructions)),
        ("Hunter-Saxton numeric pipeline", Box::new(c7_hs_pipeline)),
        ("Cauchy round trips", Box::new(c8_cauchy)),
        ("singular curves", Box::new(c9_singular)),
        ("syzygy discovery", Box::new(c10_discovery)),
        ("characteristics", Box::new(c11_characteristics)),
    ];
    println!("catalog verification: {:.1} s", verified.as_secs_f64());
    let mut failed = Vec::new();
    for (k, (name, run)) in criteria.iter().enumerate() {
        let n = k + 1;
        match run() {
            Ok(detail) => println!("criterion {n:>2} PASS  {name}: {detail}"),
            Err(detail) => {
                println!("criterion {n:>2} FAIL  {name}: {detail}");
                failed.push(n);
            }
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
