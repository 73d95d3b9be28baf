//! Simultaneous substitution of atoms and formal functions.

use std::collections::HashMap;
use std::sync::Arc;

use super::derive::partial;
use super::expr::Expr;
use super::kernel::{Kernel, KernelKind, Var};
use super::poly::{Mono, Poly};
use super::Q;

/// A formal function body: `params ↦ body`.
#[derive(Clone, Debug)]
pub struct Lambda {
    pub params: Vec<Var>,
    pub body: Expr,
}

impl Lambda {
    pub fn new(params: Vec<Var>, body: Expr) -> Self {
        Lambda { params, body }
    }

    pub fn unary(param: &str, body: Expr) -> Self {
        Lambda { params: vec![Var::named(param)], body }
    }

    /// The body differentiated `orders[i]` times in parameter i.
    pub fn derivative(&self, orders: &[u32]) -> Expr {
        let mut e = self.body.clone();
        for (p, &o) in self.params.iter().zip(orders) {
            for _ in 0..o {
                e = partial(&e, p);
            }
        }
        e
    }

    /// Applies the lambda (with derivative orders) to arguments.
    pub fn call(&self, orders: &[u32], args: &[Expr]) -> Expr {
        let body = self.derivative(orders);
        let mut s = Subst::new();
        for (p, a) in self.params.iter().zip(args) {
            s.bind(p.clone(), a.clone());
        }
        s.apply(&body)
    }
}

#[derive(Clone, Debug, Default)]
pub struct Subst {
    vars: HashMap<Var, Expr>,
    funcs: HashMap<Arc<str>, Lambda>,
}

impl Subst {
    pub fn new() -> Self {
        Subst::default()
    }

    pub fn bind(&mut self, v: Var, e: Expr) -> &mut Self {
        self.vars.insert(v, e);
        self
    }

    pub fn bind_named(&mut self, name: &str, e: Expr) -> &mut Self {
        self.bind(Var::named(name), e)
    }

    pub fn bind_func(&mut self, name: &str, l: Lambda) -> &mut Self {
        self.funcs.insert(Arc::from(name), l);
        self
    }

    pub fn is_empty(&self) -> bool {
        self.vars.is_empty() && self.funcs.is_empty()
    }

    fn touches(&self, k: &Kernel) -> bool {
        k.vars().iter().any(|v| self.vars.contains_key(v)) || k.funcs().iter().any(|f| self.funcs.contains_key(f))
    }

    pub fn apply(&self, e: &Expr) -> Expr {
        if self.is_empty() {
            return e.clone();
        }
        let mut memo: HashMap<Kernel, Option<Expr>> = HashMap::new();
        let num = self.apply_poly(e.num(), &mut memo);
        let mut out = num;
        for (f, k) in e.den() {
            let d = self.apply_poly(f.poly(), &mut memo);
            out = out.div(&d.powi(*k as i64));
        }
        out
    }

    /// Image of a kernel, `None` if unchanged.
    fn image(&self, k: &Kernel, memo: &mut HashMap<Kernel, Option<Expr>>) -> Option<Expr> {
        if !self.touches(k) {
            return None;
        }
        if let Some(r) = memo.get(k) {
            return r.clone();
        }
        let r = match k.kind() {
            KernelKind::Var(v) => self.vars.get(v).cloned(),
            KernelKind::Exp(a) => Some(Expr::exp(&self.apply(a))),
            KernelKind::Ln(a) => Some(Expr::ln(&self.apply(a))),
            KernelKind::Atanh(a) => Some(Expr::atanh(&self.apply(a))),
            KernelKind::Root { base, q } => {
                let b = self.apply(base);
                Some(b.pow_q(&Q::new(1.into(), (*q).into())))
            }
            KernelKind::Func { name, orders, args } => {
                let args: Vec<Expr> = args.iter().map(|a| self.apply(a)).collect();
                match self.funcs.get(name) {
                    Some(l) => Some(l.call(orders, &args)),
                    None => Some(Expr::func(name, orders.clone(), args)),
                }
            }
            KernelKind::Integral { body, bound, upper } => {
                let b = self.apply(body);
                let u = self.apply(upper);
                Some(Expr::integral_bound(&b, *bound, &u))
            }
        };
        memo.insert(k.clone(), r.clone());
        r
    }

    fn apply_poly(&self, p: &Poly, memo: &mut HashMap<Kernel, Option<Expr>>) -> Expr {
        let mut poly_acc: Vec<(Mono, Q)> = Vec::new();
        let mut expr_acc: Vec<Expr> = Vec::new();
        let mut pow_cache: HashMap<(Kernel, i32), Expr> = HashMap::new();
        for (m, c) in &p.terms {
            let mut keep = Mono::new();
            let mut changed: Vec<(Kernel, i32, Expr)> = Vec::new();
            for (k, e) in m {
                match self.image(k, memo) {
                    Some(img) => changed.push((k.clone(), *e, img)),
                    None => keep.push((k.clone(), *e)),
                }
            }
            if changed.is_empty() {
                poly_acc.push((m.clone(), c.clone()));
                continue;
            }
            let mut t = Expr::from_parts(Poly::term(keep, c.clone()), Vec::new());
            for (k, e, img) in changed {
                let pw = pow_cache.entry((k, e)).or_insert_with(|| img.powi(e as i64)).clone();
                t = t.mul(&pw);
            }
            if t.den().is_empty() {
                poly_acc.extend(t.num().terms.iter().cloned());
            } else {
                expr_acc.push(t);
            }
        }
        let mut out = Expr::from_parts(Poly::from_terms(poly_acc), Vec::new());
        if let Some(t) = sum_tree(expr_acc) {
            out = out.add(&t);
        }
        out
    }
}

/// Pairwise summation to keep intermediate denominators balanced.
fn sum_tree(mut v: Vec<Expr>) -> Option<Expr> {
    if v.is_empty() {
        return None;
    }
    while v.len() > 1 {
        let mut next = Vec::with_capacity(v.len() / 2 + 1);
        let mut it = v.into_iter();
        while let Some(a) = it.next() {
            match it.next() {
                Some(b) => next.push(a.add(&b)),
                None => next.push(a),
            }
        }
        v = next;
    }
    v.pop()
}

impl Expr {
    /// Simultaneous substitution of named atoms.
    pub fn subst_vars(&self, bindings: &[(Var, Expr)]) -> Expr {
        let mut s = Subst::new();
        for (v, e) in bindings {
            s.bind(v.clone(), e.clone());
        }
        s.apply(self)
    }

    pub fn subst_named(&self, name: &str, e: &Expr) -> Expr {
        let mut s = Subst::new();
        s.bind_named(name, e.clone());
        s.apply(self)
    }
}
