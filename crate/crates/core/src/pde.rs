//! Equation manifolds E_k: restriction, symmetry checks and determining equations.

use std::collections::HashMap;
use std::sync::Mutex;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::jet::{apply_prolonged, Total, VectorField, DEFAULT_ORDER_CAP};
use crate::sym::{derive, is_zero, partial, Dir, Expr, JetVar, Kernel, Lambda, Subst, Var, Verdict};

/// F = 0 solved for a principal derivative; every derivative of the principal jet is
/// eliminated through total differentiation of `principal = rhs`.
pub struct PdeManifold {
    pub f: Expr,
    pub principal: JetVar,
    pub rhs: Expr,
    /// Expressions assumed nonzero (the coefficient of the principal jet, frame determinants, ...).
    pub genericity: Vec<Expr>,
    pub cap: u32,
    cache: Mutex<HashMap<JetVar, Expr>>,
}

impl Clone for PdeManifold {
    fn clone(&self) -> Self {
        PdeManifold {
            f: self.f.clone(),
            principal: self.principal,
            rhs: self.rhs.clone(),
            genericity: self.genericity.clone(),
            cap: self.cap,
            cache: Mutex::new(self.cache.lock().unwrap().clone()),
        }
    }
}

impl std::fmt::Debug for PdeManifold {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "PdeManifold({} = 0, {} = {})", self.f, self.principal, self.rhs)
    }
}

impl PdeManifold {
    pub fn new(f: Expr, principal: JetVar) -> Result<Self> {
        let k = Kernel::var(Var::Jet(principal));
        let (a, b) = f
            .affine_in(&k)
            .ok_or_else(|| Error::Unsupported(format!("{f} is not affine in {principal}")))?;
        if a.is_zero() {
            return Err(Error::Genericity(format!("{f} does not involve {principal}")));
        }
        let rhs = -(b / &a);
        if let Some(j) = rhs.jets().into_iter().find(|j| j.divisible_by(principal)) {
            return Err(Error::Unsupported(format!("{principal} = {rhs} involves {j}, a derivative of the principal jet")));
        }
        let mut genericity = Vec::new();
        if a.as_rational().is_none() {
            genericity.push(a);
        }
        Ok(PdeManifold { f, principal, rhs, genericity, cap: DEFAULT_ORDER_CAP, cache: Mutex::new(HashMap::new()) })
    }

    pub fn parse(f: &str, principal: &str) -> Result<Self> {
        let j = JetVar::parse(principal)
            .ok_or_else(|| Error::InvalidParameter(format!("`{principal}` is not a jet variable")))?;
        PdeManifold::new(crate::parse(f)?, j)
    }

    pub fn with_cap(mut self, cap: u32) -> Self {
        self.cap = cap;
        self
    }

    pub fn is_parametric(&self, j: JetVar) -> bool {
        !j.divisible_by(self.principal)
    }

    /// The restricted value of a jet coordinate.
    pub fn restricted_jet(&self, j: JetVar) -> Result<Expr> {
        let mut visiting = Vec::new();
        self.restricted_jet_inner(j, &mut visiting)
    }

    fn restricted_jet_inner(&self, j: JetVar, visiting: &mut Vec<JetVar>) -> Result<Expr> {
        if self.is_parametric(j) {
            return Ok(Expr::jetvar(j));
        }
        if j == self.principal {
            return Ok(self.rhs.clone());
        }
        if let Some(e) = self.cache.lock().unwrap().get(&j) {
            return Ok(e.clone());
        }
        if visiting.contains(&j) {
            return Err(Error::Unsupported(format!("cyclic elimination of {j}")));
        }
        visiting.push(j);
        // step down toward the principal jet, x first
        let (parent, dir) = if j.x > self.principal.x { (JetVar::new(j.t, j.x - 1), Dir::X) } else { (JetVar::new(j.t - 1, j.x), Dir::T) };
        let base = self.restricted_jet_inner(parent, visiting)?;
        let d = derive(&base, &Total(dir));
        let e = self.restrict_inner(&d, visiting)?;
        visiting.pop();
        self.cache.lock().unwrap().insert(j, e.clone());
        Ok(e)
    }

    fn restrict_inner(&self, e: &Expr, visiting: &mut Vec<JetVar>) -> Result<Expr> {
        let mut s = Subst::new();
        for j in e.jets() {
            if !self.is_parametric(j) {
                s.bind(Var::Jet(j), self.restricted_jet_inner(j, visiting)?);
            }
        }
        Ok(s.apply(e))
    }

    /// Eliminates the principal jet and all its derivatives.
    pub fn restrict(&self, e: &Expr) -> Result<Expr> {
        let got = e.max_jet_order();
        if got > self.cap {
            return Err(Error::OrderOverflow { got, cap: self.cap });
        }
        self.restrict_inner(e, &mut Vec::new())
    }

    /// Restricted total derivative D^E_y(e).
    pub fn total(&self, e: &Expr, dir: Dir) -> Result<Expr> {
        let d = crate::jet::total_derivative(e, dir, self.cap + 1)?;
        self.restrict(&d)
    }

    /// restrict(X^{(∞)}(F)) with its zero-test verdict.
    pub fn check_symmetry(&self, x: &VectorField) -> Result<Check> {
        let residual = self.restrict(&apply_prolonged(x, &self.f))?;
        Check::of(residual)
    }

    /// Coefficients of restrict(X^{(2)}F) in the parametric jets of order ≥ 1, for formal
    /// a(t,x,u), b(t,x,u), c(t,x,u). The system is returned unsolved.
    pub fn determining_equations(&self) -> Result<Vec<Expr>> {
        let args = || vec![Expr::named("t"), Expr::named("x"), Expr::jet(0, 0)];
        let x = VectorField::new(Expr::apply("a", args()), Expr::apply("b", args()), Expr::apply("c", args()));
        let residual = self.restrict(&apply_prolonged(&x, &self.f))?;
        let num = residual.numerator();
        let is_jet = |k: &Kernel| matches!(k.as_var(), Some(Var::Jet(j)) if j.order() > 0);
        Ok(num.coefficients_in(&is_jet).into_iter().map(|(_, c)| c).filter(|c| !c.is_zero()).collect())
    }

    /// dim E_k by enumeration: t, x and the jets of order ≤ k not eliminated by F and
    /// its derivatives of order ≤ k.
    pub fn dimension(&self, k: u32) -> usize {
        let f_order = self.f.max_jet_order();
        let p = self.principal.order();
        let eliminated = |j: &JetVar| j.divisible_by(self.principal) && j.order() - p + f_order <= k;
        2 + JetVar::all_up_to(k).iter().filter(|j| !eliminated(j)).count()
    }

    /// Substitutes the formal a, b, c of the determining equations by functions of (t, x, u).
    pub fn instantiate_coefficients(eqs: &[Expr], a: &Expr, b: &Expr, c: &Expr) -> Vec<Expr> {
        let params = vec![Var::named("t"), Var::named("x"), Var::jet(0, 0)];
        let mut s = Subst::new();
        s.bind_func("a", Lambda::new(params.clone(), a.clone()))
            .bind_func("b", Lambda::new(params.clone(), b.clone()))
            .bind_func("c", Lambda::new(params, c.clone()));
        eqs.iter().map(|e| s.apply(e)).collect()
    }
}

/// A residual with its zero-test verdict.
#[derive(Clone, Debug, Serialize)]
pub struct Check {
    #[serde(serialize_with = "ser_expr")]
    pub residual: Expr,
    pub verdict: Verdict,
}

fn ser_expr<S: serde::Serializer>(e: &Expr, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&e.to_string())
}

impl Check {
    pub fn of(residual: Expr) -> Result<Check> {
        let verdict = is_zero(&residual)?;
        Ok(Check { residual, verdict })
    }

    pub fn passed(&self) -> bool {
        self.verdict.passed()
    }
}

/// ∂_t^i ∂_x^j of an explicit function u(t, x).
pub fn jet_of(u: &Expr, j: JetVar) -> Expr {
    let (t, x) = (Var::named("t"), Var::named("x"));
    let mut e = u.clone();
    for _ in 0..j.t {
        e = partial(&e, &t);
    }
    for _ in 0..j.x {
        e = partial(&e, &x);
    }
    e
}

/// F evaluated on the graph of an explicit u(t, x).
pub fn residual_on(f: &Expr, u: &Expr) -> Expr {
    let mut s = Subst::new();
    for j in f.jets() {
        s.bind(Var::Jet(j), jet_of(u, j));
    }
    s.apply(f)
}
