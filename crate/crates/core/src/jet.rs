//! Total derivatives, contact forms and prolongation of point vector fields on J(ℝ², ℝ).

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::sym::{derive, parse, partial, Derivation, Dir, Expr, JetVar, Var};

/// Default jet-order cap for total derivatives.
pub const DEFAULT_ORDER_CAP: u32 = 8;

/// The total derivative D_t or D_x as a derivation on atoms.
pub struct Total(pub Dir);

impl Derivation for Total {
    fn atom(&self, v: &Var) -> Option<Expr> {
        match v {
            Var::Named(n) => match (&**n, self.0) {
                ("t", Dir::T) | ("x", Dir::X) => Some(Expr::one()),
                _ => None,
            },
            Var::Jet(j) => Some(Expr::jetvar(j.d(self.0))),
            Var::Bound(_) => None,
        }
    }
}

fn check_cap(e: &Expr, cap: u32) -> Result<()> {
    let got = e.max_jet_order() + 1;
    if got > cap {
        return Err(Error::OrderOverflow { got, cap });
    }
    Ok(())
}

/// D_t(e) or D_x(e); fails if the result would need jets above `cap`.
pub fn total_derivative(e: &Expr, dir: Dir, cap: u32) -> Result<Expr> {
    check_cap(e, cap)?;
    Ok(derive(e, &Total(dir)))
}

/// (D_t e, D_x e), the dt and dx components of the horizontal differential.
pub fn horizontal_differential(e: &Expr, cap: u32) -> Result<(Expr, Expr)> {
    Ok((total_derivative(e, Dir::T, cap)?, total_derivative(e, Dir::X, cap)?))
}

/// Coefficient of dt∧dx in dI∧dJ.
pub fn wedge(i: &Expr, j: &Expr, cap: u32) -> Result<Expr> {
    let (it, ix) = horizontal_differential(i, cap)?;
    let (jt, jx) = horizontal_differential(j, cap)?;
    Ok(it * jx - ix * jt)
}

/// du_σ − u_{σt} dt − u_{σx} dx.
#[derive(Clone, Debug, PartialEq)]
pub struct ContactForm {
    pub base: JetVar,
    pub dt: Expr,
    pub dx: Expr,
}

impl std::fmt::Display for ContactForm {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "d{} - {} dt - {} dx", self.base, self.base.dt(), self.base.dx())
    }
}

/// The contact forms on J^k: one per jet of order ≤ k − 1.
pub fn cartan_forms(k: u32) -> Vec<ContactForm> {
    if k == 0 {
        return Vec::new();
    }
    JetVar::all_up_to(k - 1)
        .into_iter()
        .map(|j| ContactForm { base: j, dt: -Expr::jetvar(j.dt()), dx: -Expr::jetvar(j.dx()) })
        .collect()
}

/// a∂_t + b∂_x + c∂_u.
#[derive(Clone, Debug, PartialEq)]
pub struct VectorField {
    pub a: Expr,
    pub b: Expr,
    pub c: Expr,
}

impl VectorField {
    pub fn new(a: Expr, b: Expr, c: Expr) -> Self {
        VectorField { a, b, c }
    }

    pub fn parse(a: &str, b: &str, c: &str) -> Result<Self> {
        Ok(VectorField { a: parse(a)?, b: parse(b)?, c: parse(c)? })
    }

    /// Checks that coefficients involve no jets beyond u; other atoms are treated as parameters.
    pub fn validate(&self) -> Result<()> {
        for e in [&self.a, &self.b, &self.c] {
            if e.max_jet_order() > 0 {
                return Err(Error::InvalidParameter(format!("point field coefficient {e} involves derivatives of u")));
            }
        }
        Ok(())
    }

    /// The base field applied to a function on J^0.
    pub fn apply(&self, e: &Expr) -> Expr {
        self.a.clone() * partial(e, &Var::named("t"))
            + self.b.clone() * partial(e, &Var::named("x"))
            + self.c.clone() * partial(e, &Var::jet(0, 0))
    }
}

impl std::fmt::Display for VectorField {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "({})∂_t + ({})∂_x + ({})∂_u", self.a, self.b, self.c)
    }
}

/// X^{(k)}: the base field plus coefficients φ^σ of ∂_{u_σ} for 1 ≤ |σ| ≤ k.
#[derive(Clone, Debug)]
pub struct ProlongedField {
    pub order: u32,
    pub base: VectorField,
    pub coeffs: BTreeMap<JetVar, Expr>,
}

impl ProlongedField {
    /// φ^σ; φ^∅ = c.
    pub fn coeff(&self, j: JetVar) -> Option<&Expr> {
        if j.order() == 0 {
            return Some(&self.base.c);
        }
        self.coeffs.get(&j)
    }

    /// Forgets coefficients of order > j.
    pub fn truncate(&self, j: u32) -> ProlongedField {
        ProlongedField {
            order: j.min(self.order),
            base: self.base.clone(),
            coeffs: self.coeffs.iter().filter(|(k, _)| k.order() <= j).map(|(k, v)| (*k, v.clone())).collect(),
        }
    }

    /// X^{(k)}(e); `e` may involve jets of order ≤ k.
    pub fn apply(&self, e: &Expr) -> Result<Expr> {
        let got = e.max_jet_order();
        if got > self.order {
            return Err(Error::OrderOverflow { got, cap: self.order });
        }
        let mut out = self.base.apply(e);
        for j in e.jets() {
            if j.order() == 0 {
                continue;
            }
            let phi = self
                .coeffs
                .get(&j)
                .ok_or_else(|| Error::Unsupported(format!("prolongation lacks the coefficient of {j}")))?;
            out = out + phi.clone() * partial(e, &Var::Jet(j));
        }
        Ok(out)
    }
}

/// Parent jet and the direction that reaches σ from it.
pub fn parent(j: JetVar) -> (JetVar, Dir) {
    if j.x > 0 {
        (JetVar::new(j.t, j.x - 1), Dir::X)
    } else {
        (JetVar::new(j.t - 1, j.x), Dir::T)
    }
}

/// φ^{σ,y} = D_y φ^σ − u_{σt} D_y a − u_{σx} D_y b.
pub fn prolong_step(x: &VectorField, sigma: JetVar, phi: &Expr, dir: Dir) -> Expr {
    let d = Total(dir);
    derive(phi, &d) - Expr::jetvar(sigma.dt()) * derive(&x.a, &d) - Expr::jetvar(sigma.dx()) * derive(&x.b, &d)
}

/// The k-th prolongation.
pub fn prolong(x: &VectorField, k: u32) -> ProlongedField {
    let mut coeffs: BTreeMap<JetVar, Expr> = BTreeMap::new();
    for j in JetVar::all_up_to(k) {
        if j.order() == 0 {
            continue;
        }
        let (p, dir) = parent(j);
        let phi_p = if p.order() == 0 { x.c.clone() } else { coeffs[&p].clone() };
        coeffs.insert(j, prolong_step(x, p, &phi_p, dir));
    }
    ProlongedField { order: k, base: x.clone(), coeffs }
}

/// Prolongation restricted to the given jets and their ancestors along the parent chain.
pub fn prolong_jets(x: &VectorField, jets: &[JetVar]) -> ProlongedField {
    fn ensure(x: &VectorField, j: JetVar, coeffs: &mut BTreeMap<JetVar, Expr>) -> Expr {
        if j.order() == 0 {
            return x.c.clone();
        }
        if let Some(e) = coeffs.get(&j) {
            return e.clone();
        }
        let (p, dir) = parent(j);
        let phi = ensure(x, p, coeffs);
        let e = prolong_step(x, p, &phi, dir);
        coeffs.insert(j, e.clone());
        e
    }
    let mut coeffs = BTreeMap::new();
    for &j in jets {
        ensure(x, j, &mut coeffs);
    }
    let order = jets.iter().map(|j| j.order()).max().unwrap_or(0);
    ProlongedField { order, base: x.clone(), coeffs }
}

/// X^{(∞)}(e), computing only the coefficients `e` needs.
pub fn apply_prolonged(x: &VectorField, e: &Expr) -> Expr {
    prolong_jets(x, &e.jets()).apply(e).expect("all coefficients present")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parents_follow_x_then_t() {
        assert_eq!(parent(JetVar::new(1, 1)), (JetVar::new(1, 0), Dir::X));
        assert_eq!(parent(JetVar::new(2, 0)), (JetVar::new(1, 0), Dir::T));
    }

    #[test]
    fn cartan_counts() {
        assert_eq!(cartan_forms(1).len(), 1);
        assert_eq!(cartan_forms(2).len(), 3);
        assert_eq!(cartan_forms(3).len(), 6);
    }
}
