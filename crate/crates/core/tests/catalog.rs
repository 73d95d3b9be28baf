use proptest::prelude::*;
use tresse::catalog::{
    self, characteristics_solve, solve_quasilinear, CatalogEntry, CharSettings, EntrySpec, Flag, InitialCurve, Quasilinear, Stage,
};
use tresse::invariants::Syzygy;
use tresse::pde::{jet_of, residual_on, Check};
use tresse::sym::{Env, Lambda, Verdict};
use tresse::{parse, Error, Expr, JetVar};

fn p(s: &str) -> Expr {
    parse(s).unwrap()
}

fn unary(v: &str, body: &str) -> Lambda {
    Lambda::unary(v, p(body))
}

fn zero(e: Expr) -> bool {
    Check::of(e).unwrap().passed()
}

#[test]
fn every_entry_verifies() {
    for r in catalog::verify_all().unwrap() {
        let failed = r.items.iter().find(|i| !i.verdict.passed());
        assert!(r.passed, "{}: {:?}", r.entry, failed);
        assert!(r.items.iter().any(|i| i.stage == Stage::Syzygy), "{}", r.entry);
    }
}

#[test]
fn headline_entries_are_exact() {
    for name in ["hunter-saxton", "burgers-full", "liouville-3dim"] {
        let r = catalog::entry(name).unwrap().verify().unwrap();
        assert!(r.passed);
        for i in &r.items {
            assert_eq!(i.verdict, Verdict::Exact, "{name}: {} {}", i.stage, i.item);
        }
    }
}

#[test]
fn stages_cover_the_entry_data() {
    let e = catalog::entry("hunter-saxton").unwrap();
    let r = e.verify().unwrap();
    let count = |s: Stage| r.items.iter().filter(|i| i.stage == s).count();
    assert_eq!(count(Stage::Symmetry), 5);
    assert_eq!(count(Stage::Invariance), 3);
    assert_eq!(count(Stage::Duality), 4);
    assert_eq!(count(Stage::Commutation), 1);
    assert_eq!(count(Stage::QuotientSolution), 1);
    assert_eq!(count(Stage::Reconstruction), 2);
}

fn leak(spec: EntrySpec) -> &'static EntrySpec {
    Box::leak(Box::new(spec))
}

fn variant(name: &str, edit: impl FnOnce(&mut EntrySpec)) -> CatalogEntry {
    let s = catalog::spec(name).unwrap();
    let mut spec = EntrySpec { ..*s };
    edit(&mut spec);
    CatalogEntry::build(leak(spec)).unwrap()
}

#[test]
fn wrong_syzygy_halts_at_the_syzygy_stage() {
    let e = variant("hunter-saxton", |s| s.syzygies = &["2*H_I - J^2*H_J + 3*J*H"]);
    let r = e.verify().unwrap();
    assert!(!r.passed);
    let last = r.items.last().unwrap();
    assert_eq!((last.stage, last.verdict), (Stage::Syzygy, Verdict::NonZero));
    assert_ne!(last.residual, "0");
}

#[test]
fn wrong_quotient_solution_is_caught() {
    let e = variant("ex3.3", |s| s.solution = Some(catalog::SolutionSpec::Explicit(&[("H", "g(I)*exp(2*J)")])));
    let r = e.verify().unwrap();
    assert_eq!(r.items.last().unwrap().stage, Stage::QuotientSolution);
    assert!(!r.passed);
}

#[test]
fn wrong_symmetry_and_reconstruction_are_caught() {
    let e = variant("liouville-3dim", |s| s.gens = &[["1", "0", "0"], ["t", "0", "1"]]);
    let r = e.verify().unwrap();
    assert_eq!(r.items.last().unwrap().stage, Stage::Symmetry);
    assert!(!r.passed);
    let e = variant("ex3.3", |s| {
        s.reconstructions = &[catalog::ReconSpec { label: "bad", u: "ln(1/(C(t) + int(g(s), s, 0, x)))", bindings: &[], general: true }]
    });
    let r = e.verify().unwrap();
    assert_eq!(r.items.last().unwrap().stage, Stage::Reconstruction);
    assert!(!r.passed);
}

#[test]
fn unknown_entry() {
    assert!(matches!(catalog::entry("no-such"), Err(Error::UnknownEntry(_))));
}

#[test]
fn instantiate_ex3_3() {
    let e = catalog::entry("ex3.3").unwrap();
    let inst = e.instantiate(&[("g", unary("x", "x")), ("C", unary("t", "t"))], &[]).unwrap();
    let u = inst.solution.unwrap();
    assert!(zero(u - p("-ln(t - x^2/2)")));
    assert!(inst.residual.unwrap().passed());
    assert!(inst.constraint_residual.unwrap().passed());
    // G = u_x - x e^u
    assert!(zero(inst.constraint - p("u_x - x*exp(u)")));
}

#[test]
fn instantiate_ex4_1() {
    let e = catalog::entry("ex4.1").unwrap();
    let inst = e.instantiate(&[("g", unary("x", "x"))], &[("A", Expr::int(2))]).unwrap();
    let u = inst.solution.unwrap();
    assert!(inst.residual.unwrap().passed());
    assert!(zero(jet_of(&u, JetVar::parse("u_x").unwrap()) - p("1/(x - t)")));
    // u = ln|x - t| + C(t) up to a function of t: ∫_0^x ds/(s - t) = ln((x - t)/(-t)) for t < 0
    let env = Env::new().with("t", -1.5).with("x", 2.0);
    let mut env = env;
    env.bind_lambda("C", unary("t", "0"));
    let got = u.eval(&env).unwrap();
    assert!((got - (3.5f64 / 1.5).ln()).abs() < 1e-10, "{got}");
}

#[test]
fn instantiate_ode_reduction() {
    let e = catalog::entry("ode-reduction").unwrap();
    let inst = e.instantiate(&[], &[("A", Expr::int(0)), ("B", Expr::int(0)), ("C", Expr::int(1))]).unwrap();
    assert!(zero(inst.solution.unwrap() - p("exp(x)")));
    assert!(inst.residual.unwrap().passed());
}

#[test]
fn excluded_and_unknown_parameters() {
    let e = catalog::entry("ex4.1").unwrap();
    let err = e.instantiate(&[], &[("A", Expr::int(1))]).unwrap_err();
    assert!(err.to_string().contains("A = 1"), "{err}");
    assert!(e.instantiate(&[], &[("B", Expr::int(1))]).is_err());
    assert!(e.instantiate(&[("h", unary("x", "x"))], &[]).is_err());
    let ghs = catalog::entry("ex1.1-ghs").unwrap();
    assert!(ghs.instantiate(&[], &[("epsilon", Expr::int(0))]).is_err());
    assert!(catalog::entry("type1-general").unwrap().instantiate(&[], &[]).is_err());
}

#[test]
fn riccati_to_schrodinger() {
    let e = catalog::entry("ex2.3").unwrap();
    let g = e.constraint().unwrap();
    let got = catalog::on_first_derivative(&g, &p("-2*D(v,0,1)(t, x)/v(t, x)"));
    assert!(zero(got - p("-(2*D(v,0,2)(t, x) + g(x)*v(t, x))/v(t, x)")));
}

fn hs_env() -> Env {
    let mut env = Env::new();
    env.bind_lambda("g", unary("w", "exp(w)"));
    env
}

fn hs_exact() -> Expr {
    p("(2 - I*J)^4/(16*g(2*J/(2 - I*J)))")
}

fn hs_error(step: f64) -> f64 {
    let e = catalog::entry("hunter-saxton").unwrap();
    let curve = InitialCurve::at_fixed_i(0.0, p("exp(-sigma)"), 0.1, 1.0, 10);
    let s = CharSettings { span: 0.4, step, ..Default::default() };
    let env = hs_env();
    let c = characteristics_solve(&e, &curve, &s, &env).unwrap();
    assert!(c.crossings.is_empty());
    let exact = hs_exact();
    c.max_error(|i, j| exact.eval(&env.clone().with("I", i).with("J", j))).unwrap()
}

#[test]
fn hs_characteristics_converge_at_fourth_order() {
    let (e1, e2) = (hs_error(0.02), hs_error(0.01));
    assert!(e1 > 0.0 && e1 < 1e-6, "{e1}");
    assert!(e1 / e2 >= 12.0, "{e1} {e2}");
}

#[test]
fn step_halving_estimate_tracks_the_error() {
    let e = catalog::entry("hunter-saxton").unwrap();
    let curve = InitialCurve::at_fixed_i(0.0, p("exp(-sigma)"), 0.1, 1.0, 10);
    let s = CharSettings { span: 0.4, step: 0.02, ..Default::default() };
    let env = hs_env();
    let c = characteristics_solve(&e, &curve, &s, &env).unwrap();
    let exact = hs_exact();
    let err = c.max_error(|i, j| exact.eval(&env.clone().with("I", i).with("J", j))).unwrap();
    assert!(c.error_estimate > err / 2.0 && c.error_estimate < err * 2.0, "{} {err}", c.error_estimate);
}

#[test]
fn ex3_3_characteristics_give_exponential_growth() {
    let e = catalog::entry("ex3.3").unwrap();
    let curve = InitialCurve::at_fixed_j(0.0, p("sigma^2 + 1"), 0.0, 1.0, 6);
    let s = CharSettings { span: 1.0, step: 0.01, ..Default::default() };
    let c = characteristics_solve(&e, &curve, &s, &Env::new()).unwrap();
    let err = c.max_error(|i, j| Ok((i * i + 1.0) * j.exp())).unwrap();
    assert!(err < 1e-8, "{err}");
    assert_eq!(c.samples().count(), 6 * 101);
}

#[test]
fn ex4_1_constant_data_with_a_zero() {
    let e = catalog::entry("ex4.1").unwrap();
    let curve = InitialCurve::at_fixed_i(0.0, p("2"), -1.0, 1.0, 5);
    let c = characteristics_solve(&e, &curve, &CharSettings::default(), &Env::new().with("A", 0.0)).unwrap();
    let err = c.max_error(|i, _| Ok(2.0 + i)).unwrap();
    assert!(err < 1e-12, "{err}");
}

#[test]
fn blowup_terminates_the_characteristic() {
    // H_I = H^2 with H = 1 at I = 0 blows up at I = 1
    let e = catalog::entry("ex4.1").unwrap();
    let curve = InitialCurve::at_fixed_i(0.0, p("1"), 0.0, 1.0, 3);
    let s = CharSettings { span: 2.0, step: 0.001, blowup: 1e6, ..Default::default() };
    let c = characteristics_solve(&e, &curve, &s, &Env::new().with("A", 2.0)).unwrap();
    for curve in &c.curves {
        let last = curve.last().unwrap();
        assert_eq!(last.flag, Flag::Blowup);
        assert!((last.i - 1.0).abs() < 0.01, "{}", last.i);
        assert!(curve[..curve.len() - 1].iter().all(|p| p.flag == Flag::Ok));
    }
}

#[test]
fn converging_characteristics_report_a_crossing() {
    // H_I - H H_J = 0 with H(0, J) = J: all characteristics meet at I = 1
    let ql = Quasilinear::from_syzygy(&Syzygy::parse("H_I - H*H_J").unwrap(), "H").unwrap();
    let curve = InitialCurve::at_fixed_i(0.0, p("sigma"), 0.5, 1.0, 6);
    let s = CharSettings { span: 2.0, step: 0.01, ..Default::default() };
    let c = solve_quasilinear(&ql, &curve, &s, &Env::new()).unwrap();
    assert!(!c.crossings.is_empty());
    for x in &c.crossings {
        assert!((x.i - 1.0).abs() < 0.02 && x.j.abs() < 0.02, "{x:?}");
    }
    assert!(c.samples().any(|p| p.flag == Flag::Crossing));
}

#[test]
fn non_quasilinear_quotient_is_rejected() {
    assert!(Quasilinear::of_entry(&catalog::entry("type3-general").unwrap()).is_err());
    assert!(Quasilinear::from_syzygy(&Syzygy::parse("H_I^2 - H").unwrap(), "H").is_err());
}

#[test]
fn csv_has_the_documented_columns() {
    let e = catalog::entry("ex3.3").unwrap();
    let curve = InitialCurve::at_fixed_j(0.0, p("1"), 0.0, 1.0, 2);
    let c = characteristics_solve(&e, &curve, &CharSettings { span: 0.1, step: 0.05, ..Default::default() }, &Env::new()).unwrap();
    let csv = c.to_csv();
    assert!(csv.starts_with("I,J,H,flag\n"));
    assert_eq!(csv.lines().count(), 1 + 2 * 3);
}

fn poly(c: &[i64], v: &str) -> String {
    let terms: Vec<String> = c.iter().enumerate().map(|(k, a)| format!("({a})*{v}^{k}")).collect();
    terms.join(" + ")
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn reconstructions_solve_the_equation_for_concrete_data(
        g in proptest::collection::vec(-3i64..=3, 1..4),
        c in proptest::collection::vec(-3i64..=3, 1..3),
        a in prop_oneof![Just(2i64), Just(3), Just(-1)],
    ) {
        let gl = unary("x", &poly(&g, "x"));
        let cl = unary("t", &format!("{} + 5", poly(&c, "t")));
        for name in ["ex3.3", "disguised", "ex4.3"] {
            let e = catalog::entry(name).unwrap();
            let inst = e.instantiate(&[("g", gl.clone()), ("C", cl.clone())], &[]).unwrap();
            prop_assert!(inst.residual.unwrap().passed(), "{}", name);
        }
        let e = catalog::entry("ex4.1").unwrap();
        let inst = e.instantiate(&[("g", gl.clone()), ("C", cl.clone())], &[("A", Expr::int(a))]).unwrap();
        prop_assert!(inst.residual.unwrap().passed());
        prop_assert!(inst.constraint_residual.unwrap().passed());
    }

    #[test]
    fn explicit_quotient_solutions_hold_for_concrete_g(g in proptest::collection::vec(-3i64..=3, 1..4)) {
        let gl = unary("x", &format!("{} + 7", poly(&g, "x")));
        for name in ["ex3.3", "ex2.3", "ode-reduction", "liouville-3dim"] {
            let e = catalog::entry(name).unwrap();
            let tokens = e.solution_tokens().unwrap().unwrap();
            let mut s = tresse::sym::Subst::new();
            for (k, v) in &tokens {
                s.bind_named(k, v.clone());
            }
            s.bind_func("g", gl.clone());
            let lhs = s.apply(&e.syzygies[0].lhs);
            let lhs = { let mut t = tresse::sym::Subst::new(); t.bind_func("g", gl.clone()); t.apply(&lhs) };
            prop_assert!(zero(lhs), "{}", name);
        }
    }
}

#[test]
fn residual_on_reconstruction_matches_jet_substitution() {
    let e = catalog::entry("ode-reduction").unwrap();
    let u = p("2*x + 3 + 4*exp(x)");
    assert!(zero(residual_on(&e.manifold.f, &u)));
}
