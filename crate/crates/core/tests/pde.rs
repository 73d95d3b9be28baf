use proptest::prelude::*;
use tresse::jet::{total_derivative, VectorField};
use tresse::pde::{residual_on, PdeManifold};
use tresse::sym::{Dir, Expr, JetVar};
use tresse::{parse, Error};

fn p(s: &str) -> Expr {
    parse(s).unwrap()
}

fn assert_same(a: &Expr, b: &Expr) {
    assert!((a - b).is_zero(), "{a}  !=  {b}");
}

fn burgers() -> PdeManifold {
    PdeManifold::parse("u_xx - u_t - u*u_x", "u_t").unwrap()
}

fn hunter_saxton() -> PdeManifold {
    PdeManifold::parse("u_tx + u*u_xx + u_x^2/2", "u_tx").unwrap()
}

#[test]
fn restriction_annihilates_the_equation() {
    for m in [burgers(), hunter_saxton(), PdeManifold::parse("u_xx - u_t - u*u_x", "u_xx").unwrap()] {
        assert!(m.restrict(&m.f).unwrap().is_zero());
    }
}

#[test]
fn burgers_restrictions() {
    let m = burgers();
    assert_same(&m.restrict(&p("u_tx")).unwrap(), &p("u_xxx - u_x^2 - u*u_xx"));
    // independent oracle: substitute in the other order, through D_t of u_t
    let ut = p("u_xx - u*u_x");
    let via_t = m.restrict(&total_derivative(&ut, Dir::T, 8).unwrap()).unwrap();
    assert_same(&m.restrict(&p("u_tt")).unwrap(), &via_t);
    let via_x = m.restrict(&total_derivative(&p("u_tx"), Dir::T, 8).unwrap()).unwrap();
    let via_t2 = m.restrict(&total_derivative(&p("u_tt"), Dir::X, 8).unwrap()).unwrap();
    assert_same(&via_x, &via_t2);
}

#[test]
fn hunter_saxton_restrictions() {
    let m = hunter_saxton();
    assert_same(&m.restrict(&p("u_txx")).unwrap(), &p("-u*u_xxx - 2*u_x*u_xx"));
}

#[test]
fn burgers_symmetries() {
    let m = burgers();
    for (a, b, c) in [("1", "0", "0"), ("0", "1", "0"), ("0", "t", "1"), ("t^2", "t*x", "x - t*u"), ("2*t", "x", "-u")] {
        let chk = m.check_symmetry(&VectorField::parse(a, b, c).unwrap()).unwrap();
        assert!(chk.residual.is_zero(), "({a}, {b}, {c}): {}", chk.residual);
    }
}

#[test]
fn hunter_saxton_galilean_family() {
    let m = hunter_saxton();
    let chk = m.check_symmetry(&VectorField::parse("0", "f(t)", "f'(t)").unwrap()).unwrap();
    assert!(chk.residual.is_zero(), "{}", chk.residual);
}

#[test]
fn non_symmetry_has_residual() {
    let chk = burgers().check_symmetry(&VectorField::parse("0", "0", "1").unwrap()).unwrap();
    assert_same(&chk.residual, &p("-u_x"));
    assert!(!chk.passed());
}

#[test]
fn determining_equations_accept_known_generators() {
    let m = burgers();
    let eqs = m.determining_equations().unwrap();
    assert!(!eqs.is_empty());
    let sol = PdeManifold::instantiate_coefficients(&eqs, &p("t^2"), &p("t*x"), &p("x - t*u"));
    assert!(sol.iter().all(|e| e.is_zero()));
    let bad = PdeManifold::instantiate_coefficients(&eqs, &p("0"), &p("0"), &p("1"));
    assert!(bad.iter().any(|e| !e.is_zero()));

    let m = PdeManifold::parse("u_tx - u_t*u_x", "u_tx").unwrap();
    let eqs = m.determining_equations().unwrap();
    let sol = PdeManifold::instantiate_coefficients(&eqs, &p("f(t)"), &p("0"), &p("0"));
    assert!(sol.iter().all(|e| e.is_zero()));
}

#[test]
fn determining_equations_are_linear() {
    let eqs = burgers().determining_equations().unwrap();
    for e in eqs {
        // each equation scales linearly when a, b, c are scaled together
        let s = PdeManifold::instantiate_coefficients(&[e.clone()], &p("2*A(t,x,u)"), &p("2*B(t,x,u)"), &p("2*C(t,x,u)"));
        let one = PdeManifold::instantiate_coefficients(&[e], &p("A(t,x,u)"), &p("B(t,x,u)"), &p("C(t,x,u)"));
        assert_same(&s[0], &(Expr::int(2) * one[0].clone()));
    }
}

#[test]
fn dimensions() {
    assert_eq!(burgers().dimension(2), 7);
    assert_eq!(burgers().dimension(3), 9);
    for k in 2..=6 {
        assert_eq!(burgers().dimension(k), 3 + 2 * k as usize);
        assert_eq!(hunter_saxton().dimension(k), 3 + 2 * k as usize);
    }
}

#[test]
fn equations_must_involve_the_principal_jet() {
    assert!(matches!(PdeManifold::parse("u_xx - u", "u_tx"), Err(Error::Genericity(_))));
    assert!(PdeManifold::parse("u_tx^2 - u", "u_tx").is_err());
}

#[test]
fn residual_of_explicit_solutions() {
    // u = x/t solves Burgers
    let f = p("u_xx - u_t - u*u_x");
    assert!(residual_on(&f, &p("x/t")).is_zero());
    assert!(!residual_on(&f, &p("x")).is_zero());
}

fn jet_poly() -> impl Strategy<Value = Expr> {
    let jets = JetVar::all_up_to(3);
    let term = (-3i64..=3, prop::sample::select(jets.clone()), prop::sample::select(jets), prop::sample::select(vec!["t", "x", "1"]))
        .prop_map(|(c, a, b, v)| {
            let base = if v == "1" { Expr::one() } else { Expr::named(v) };
            Expr::int(c) * Expr::jetvar(a) * Expr::jetvar(b) * base
        });
    prop::collection::vec(term, 1..5).prop_map(|ts| ts.into_iter().fold(Expr::zero(), |a, b| a + b))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn restriction_is_idempotent(e in jet_poly()) {
        for m in [burgers(), hunter_saxton()] {
            let r = m.restrict(&e).unwrap();
            prop_assert_eq!(m.restrict(&r).unwrap(), r);
        }
    }

    #[test]
    fn restriction_commutes_with_total_derivatives(e in jet_poly()) {
        for m in [burgers(), hunter_saxton()] {
            for dir in [Dir::T, Dir::X] {
                let lhs = m.restrict(&total_derivative(&e, dir, 9).unwrap()).unwrap();
                let rhs = m.restrict(&total_derivative(&m.restrict(&e).unwrap(), dir, 20).unwrap()).unwrap();
                prop_assert!((lhs - rhs).is_zero());
            }
        }
    }
}

#[test]
fn symmetry_residual_is_linear_in_the_field() {
    let m = burgers();
    let r1 = m.check_symmetry(&VectorField::parse("0", "0", "1").unwrap()).unwrap().residual;
    let r3 = m.check_symmetry(&VectorField::parse("0", "0", "3").unwrap()).unwrap().residual;
    assert_same(&r3, &(Expr::int(3) * r1));
}
