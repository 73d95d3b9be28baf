//! Numeric (f64) and exact (rational) evaluation.

use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use num_traits::{One, ToPrimitive, Zero};

use super::expr::Expr;
use super::kernel::{Kernel, KernelKind, Var};
use super::poly::Poly;
use super::subst::Lambda;
use super::Q;
use crate::error::{Error, Result};
use crate::numeric::quad::{integrate, QuadSettings};

/// Numeric closure for a formal function: (derivative orders, arguments) ↦ value.
pub type NumFn = Arc<dyn Fn(&[u32], &[f64]) -> Result<f64> + Send + Sync>;

#[derive(Clone)]
pub enum FnBinding {
    /// Symbolic body; derivatives are taken symbolically and cached.
    Lambda(Lambda),
    Closure(NumFn),
}

/// Bindings for numeric evaluation.
#[derive(Clone, Default)]
pub struct Env {
    vars: HashMap<Var, f64>,
    funcs: HashMap<Arc<str>, FnBinding>,
    pub quad: QuadSettings,
    derived: Arc<Mutex<HashMap<(Arc<str>, Vec<u32>), Expr>>>,
}

impl Env {
    pub fn new() -> Self {
        Env::default()
    }

    pub fn set(&mut self, v: Var, x: f64) -> &mut Self {
        self.vars.insert(v, x);
        self
    }

    pub fn set_named(&mut self, name: &str, x: f64) -> &mut Self {
        self.set(Var::named(name), x)
    }

    pub fn with(mut self, name: &str, x: f64) -> Self {
        self.set_named(name, x);
        self
    }

    pub fn get(&self, v: &Var) -> Option<f64> {
        self.vars.get(v).copied()
    }

    pub fn bind_lambda(&mut self, name: &str, l: Lambda) -> &mut Self {
        self.funcs.insert(Arc::from(name), FnBinding::Lambda(l));
        self
    }

    pub fn bind_closure(&mut self, name: &str, f: NumFn) -> &mut Self {
        self.funcs.insert(Arc::from(name), FnBinding::Closure(f));
        self
    }

    fn lambda_derivative(&self, name: &Arc<str>, l: &Lambda, orders: &[u32]) -> Expr {
        let key = (name.clone(), orders.to_vec());
        if let Some(e) = self.derived.lock().unwrap().get(&key) {
            return e.clone();
        }
        let e = l.derivative(orders);
        self.derived.lock().unwrap().insert(key, e.clone());
        e
    }
}

struct Frame<'a> {
    env: &'a Env,
    locals: Vec<(Var, f64)>,
}

impl Frame<'_> {
    fn lookup(&self, v: &Var) -> Result<f64> {
        for (w, x) in self.locals.iter().rev() {
            if w == v {
                return Ok(*x);
            }
        }
        self.env.vars.get(v).copied().ok_or_else(|| Error::Unbound(v.name()))
    }
}

fn q_to_f64(q: &Q) -> f64 {
    q.to_f64().unwrap_or(f64::NAN)
}

fn eval_poly(p: &Poly, fr: &mut Frame, memo: &mut HashMap<Kernel, f64>) -> Result<(f64, f64)> {
    let mut sum = 0.0;
    let mut scale = 0.0;
    for (m, c) in &p.terms {
        let mut t = q_to_f64(c);
        for (k, e) in m {
            let v = eval_kernel(k, fr, memo)?;
            if *e < 0 && v == 0.0 {
                return Err(Error::Pole(k.key().to_string()));
            }
            t *= v.powi(*e);
        }
        sum += t;
        scale += t.abs();
    }
    Ok((sum, scale))
}

fn eval_expr(e: &Expr, fr: &mut Frame) -> Result<f64> {
    let mut memo = HashMap::new();
    eval_expr_memo(e, fr, &mut memo)
}

fn eval_expr_memo(e: &Expr, fr: &mut Frame, memo: &mut HashMap<Kernel, f64>) -> Result<f64> {
    let (n, _) = eval_poly(e.num(), fr, memo)?;
    let mut d = 1.0;
    for (f, k) in e.den() {
        let (v, scale) = eval_poly(f.poly(), fr, memo)?;
        if v == 0.0 || v.abs() <= 1e-14 * scale {
            return Err(Error::Pole(format!("{} = 0", f.key())));
        }
        d *= v.powi(*k as i32);
    }
    let r = n / d;
    if !r.is_finite() {
        return Err(Error::Pole(e.to_string()));
    }
    Ok(r)
}

fn eval_kernel(k: &Kernel, fr: &mut Frame, memo: &mut HashMap<Kernel, f64>) -> Result<f64> {
    if let Some(v) = memo.get(k) {
        return Ok(*v);
    }
    let v = match k.kind() {
        KernelKind::Var(v) => fr.lookup(v)?,
        KernelKind::Exp(a) => eval_expr_memo(a, fr, memo)?.exp(),
        KernelKind::Ln(a) => {
            let x = eval_expr_memo(a, fr, memo)?;
            if x <= 0.0 {
                return Err(Error::Domain(format!("ln of non-positive value {x} in {k}")));
            }
            x.ln()
        }
        KernelKind::Atanh(a) => {
            let x = eval_expr_memo(a, fr, memo)?;
            if x.abs() >= 1.0 {
                return Err(Error::Domain(format!("atanh argument {x} outside (-1, 1) in {k}")));
            }
            x.atanh()
        }
        KernelKind::Root { base, q } => {
            let x = eval_expr_memo(base, fr, memo)?;
            if x < 0.0 {
                if q % 2 == 0 {
                    return Err(Error::Domain(format!("even root of negative value {x} in {k}")));
                }
                log::debug!("real branch of odd root chosen for negative base in {k}");
                -(-x).powf(1.0 / *q as f64)
            } else {
                x.powf(1.0 / *q as f64)
            }
        }
        KernelKind::Func { name, orders, args } => {
            let mut xs = Vec::with_capacity(args.len());
            for a in args {
                xs.push(eval_expr_memo(a, fr, memo)?);
            }
            match fr.env.funcs.get(name) {
                None => return Err(Error::UnboundFunction(name.to_string())),
                Some(FnBinding::Closure(f)) => f(orders, &xs)?,
                Some(FnBinding::Lambda(l)) => {
                    let body = fr.env.lambda_derivative(name, l, orders);
                    let mut inner = Frame { env: fr.env, locals: Vec::new() };
                    for (p, x) in l.params.iter().zip(&xs) {
                        inner.locals.push((p.clone(), *x));
                    }
                    eval_expr(&body, &mut inner)?
                }
            }
        }
        KernelKind::Integral { body, bound, upper } => {
            let w = eval_expr_memo(upper, fr, memo)?;
            let quad = fr.env.quad;
            let base_locals = fr.locals.clone();
            let env = fr.env;
            let bv = Var::Bound(*bound);
            integrate(
                |v| {
                    let mut inner = Frame { env, locals: base_locals.clone() };
                    inner.locals.push((bv.clone(), v));
                    eval_expr(body, &mut inner)
                },
                0.0,
                w,
                &quad,
            )?
        }
    };
    if !v.is_finite() {
        return Err(Error::Pole(k.key().to_string()));
    }
    memo.insert(k.clone(), v);
    Ok(v)
}

impl Expr {
    /// Evaluates to f64; integrals use adaptive quadrature with `env.quad`.
    pub fn eval(&self, env: &Env) -> Result<f64> {
        let mut fr = Frame { env, locals: Vec::new() };
        eval_expr(self, &mut fr)
    }

    /// Numerator value and the sum of absolute term values (a cancellation scale).
    pub(crate) fn eval_num_with_scale(&self, env: &Env) -> Result<(f64, f64)> {
        let mut fr = Frame { env, locals: Vec::new() };
        let mut memo = HashMap::new();
        eval_poly(self.num(), &mut fr, &mut memo)
    }

    /// Exact evaluation for rational expressions in atoms. Returns `Ok(None)` on a pole.
    pub fn eval_exact(&self, env: &HashMap<Var, Q>) -> Result<Option<Q>> {
        let n = eval_poly_exact(self.num(), env)?;
        let mut d = Q::one();
        for (f, k) in self.den() {
            let v = match eval_poly_exact(f.poly(), env)? {
                Some(v) if !v.is_zero() => v,
                _ => return Ok(None),
            };
            d *= num_traits::pow(v, *k as usize);
        }
        match n {
            Some(n) => Ok(Some(n / d)),
            None => Ok(None),
        }
    }
}

fn eval_poly_exact(p: &Poly, env: &HashMap<Var, Q>) -> Result<Option<Q>> {
    let mut sum = Q::zero();
    for (m, c) in &p.terms {
        let mut t = c.clone();
        for (k, e) in m {
            let v = match k.kind() {
                KernelKind::Var(v) => env.get(v).ok_or_else(|| Error::Unbound(v.name()))?,
                _ => return Err(Error::Unsupported(format!("exact evaluation of transcendental kernel {k}"))),
            };
            if *e < 0 {
                if v.is_zero() {
                    return Ok(None);
                }
                t *= num_traits::pow(Q::one() / v, (-*e) as usize);
            } else {
                t *= num_traits::pow(v.clone(), *e as usize);
            }
        }
        sum += t;
    }
    Ok(Some(sum))
}
