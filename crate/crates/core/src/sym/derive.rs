//! Derivations: partial derivatives and anything defined by its values on atoms.

use std::collections::HashMap;

use super::expr::Expr;
use super::kernel::{Kernel, KernelKind, Var};
use super::poly::Poly;
use super::subst::Subst;
use super::Q;

/// A derivation is determined by its action on atoms; kernels follow the chain rule.
pub trait Derivation {
    /// Image of an atom; `None` means zero.
    fn atom(&self, v: &Var) -> Option<Expr>;
}

/// ∂/∂v.
pub struct Partial<'a>(pub &'a Var);

impl Derivation for Partial<'_> {
    fn atom(&self, v: &Var) -> Option<Expr> {
        (v == self.0).then(Expr::one)
    }
}

pub fn partial(e: &Expr, v: &Var) -> Expr {
    derive(e, &Partial(v))
}

/// Applies a derivation to an expression.
pub fn derive(e: &Expr, d: &dyn Derivation) -> Expr {
    let mut memo = HashMap::new();
    derive_memo(e, d, &mut memo)
}

pub(crate) fn derive_memo(e: &Expr, d: &dyn Derivation, memo: &mut HashMap<Kernel, Expr>) -> Expr {
    if e.is_zero() {
        return Expr::zero();
    }
    let dn = derive_poly(e.num(), d, memo);
    if e.den().is_empty() {
        return dn;
    }
    let inv_den = Expr::from_parts(Poly::one(), e.den().clone());
    let mut out = dn.mul(&inv_den);
    let n = Expr::from_parts(e.num().clone(), Vec::new()).mul(&inv_den);
    for (f, k) in e.den() {
        let df = derive_poly(f.poly(), d, memo);
        if df.is_zero() {
            continue;
        }
        let fe = Expr::from_parts(f.poly().clone(), Vec::new());
        // d(n/f^k) contributes -k n f'/f
        let term = n.mul(&df).div(&fe).scale(&Q::from_integer((*k as i64).into()));
        out = out.sub(&term);
    }
    out
}

fn derive_poly(p: &Poly, d: &dyn Derivation, memo: &mut HashMap<Kernel, Expr>) -> Expr {
    let mut poly_acc = Poly::zero();
    let mut rest: Vec<Expr> = Vec::new();
    for (k, dp) in p.gradient() {
        let dk = derive_kernel(&k, d, memo);
        if dk.is_zero() {
            continue;
        }
        if dk.den().is_empty() {
            poly_acc = poly_acc.add(&dp.mul(dk.num()));
        } else {
            rest.push(Expr::from_parts(dp, Vec::new()).mul(&dk));
        }
    }
    let mut out = Expr::from_parts(poly_acc, Vec::new());
    for r in rest {
        out = out.add(&r);
    }
    out
}

fn derive_kernel(k: &Kernel, d: &dyn Derivation, memo: &mut HashMap<Kernel, Expr>) -> Expr {
    if let Some(r) = memo.get(k) {
        return r.clone();
    }
    let r = match k.kind() {
        KernelKind::Var(v) => d.atom(v).unwrap_or_else(Expr::zero),
        KernelKind::Exp(a) => {
            let da = derive_memo(a, d, memo);
            if da.is_zero() {
                da
            } else {
                Expr::from_kernel(k.clone()).mul(&da)
            }
        }
        KernelKind::Ln(a) => {
            let da = derive_memo(a, d, memo);
            if da.is_zero() {
                da
            } else {
                da.div(a)
            }
        }
        KernelKind::Atanh(a) => {
            let da = derive_memo(a, d, memo);
            if da.is_zero() {
                da
            } else {
                da.div(&(Expr::one() - a * a))
            }
        }
        KernelKind::Root { base, q } => {
            let db = derive_memo(base, d, memo);
            if db.is_zero() {
                db
            } else {
                Expr::from_kernel(k.clone()).mul(&db).div(base).scale(&Q::new(1.into(), (*q).into()))
            }
        }
        KernelKind::Func { name, orders, args } => {
            let mut out = Expr::zero();
            for (i, a) in args.iter().enumerate() {
                let da = derive_memo(a, d, memo);
                if da.is_zero() {
                    continue;
                }
                let mut o = orders.clone();
                o[i] += 1;
                out = out.add(&Expr::func(name, o, args.clone()).mul(&da));
            }
            out
        }
        KernelKind::Integral { body, bound, upper } => {
            let db = derive_memo(body, d, memo);
            let mut out = Expr::integral_bound(&db, *bound, upper);
            let du = derive_memo(upper, d, memo);
            if !du.is_zero() {
                let mut s = Subst::new();
                s.bind(Var::Bound(*bound), upper.clone());
                out = out.add(&s.apply(body).mul(&du));
            }
            out
        }
    };
    memo.insert(k.clone(), r.clone());
    r
}

impl Expr {
    /// Partial derivative with respect to an atom.
    pub fn diff(&self, v: &Var) -> Expr {
        partial(self, v)
    }

    pub fn diff_named(&self, name: &str) -> Expr {
        partial(self, &Var::named(name))
    }
}
