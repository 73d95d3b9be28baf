//! Normalized rational functions over kernels.

use std::cmp::Ordering;
use std::collections::HashSet;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::{Arc, Mutex};

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use smallvec::smallvec;

use super::kernel::{JetVar, Kernel, KernelKind, Var};
use super::poly::{mono_inv, mono_pow, Mono, Poly};
use super::subst::Subst;
use super::Q;

/// A monic, monomial-content-free polynomial with at least two terms, used as a
/// denominator factor.
#[derive(Clone)]
pub struct Factor(Arc<FactorData>);

struct FactorData {
    poly: Poly,
    key: String,
    powers: Mutex<Vec<Poly>>,
}

impl Factor {
    fn new(poly: Poly) -> Factor {
        let key = super::display::poly_to_string(&poly);
        Factor(Arc::new(FactorData { poly: poly.clone(), key, powers: Mutex::new(vec![Poly::one(), poly]) }))
    }

    pub fn poly(&self) -> &Poly {
        &self.0.poly
    }

    pub fn key(&self) -> &str {
        &self.0.key
    }

    fn pow(&self, n: u32) -> Poly {
        let mut cache = self.0.powers.lock().unwrap();
        while cache.len() <= n as usize {
            let next = cache.last().unwrap().mul(&self.0.poly);
            cache.push(next);
        }
        cache[n as usize].clone()
    }
}

impl PartialEq for Factor {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || self.0.key == other.0.key
    }
}
impl Eq for Factor {}

impl Ord for Factor {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.key.len().cmp(&other.0.key.len()).then_with(|| self.0.key.cmp(&other.0.key))
    }
}
impl PartialOrd for Factor {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

pub type Den = Vec<(Factor, u32)>;

struct ExprData {
    num: Poly,
    den: Den,
}

/// An immutable, normalized symbolic expression.
#[derive(Clone)]
pub struct Expr(Arc<ExprData>);

impl PartialEq for Expr {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || (self.0.num == other.0.num && self.0.den == other.0.den)
    }
}
impl Eq for Expr {}

impl Hash for Expr {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.0.num.hash(state);
        for (f, e) in &self.0.den {
            f.key().hash(state);
            e.hash(state);
        }
    }
}

fn merge_den(a: &Den, b: &Den, combine: impl Fn(u32, u32) -> u32) -> Den {
    let mut out = Den::new();
    let (mut i, mut j) = (0, 0);
    while i < a.len() || j < b.len() {
        let ord = if i == a.len() {
            Ordering::Greater
        } else if j == b.len() {
            Ordering::Less
        } else {
            a[i].0.cmp(&b[j].0)
        };
        match ord {
            Ordering::Less => {
                out.push((a[i].0.clone(), combine(a[i].1, 0)));
                i += 1;
            }
            Ordering::Greater => {
                out.push((b[j].0.clone(), combine(0, b[j].1)));
                j += 1;
            }
            Ordering::Equal => {
                out.push((a[i].0.clone(), combine(a[i].1, b[j].1)));
                i += 1;
                j += 1;
            }
        }
    }
    out.retain(|(_, e)| *e > 0);
    out
}

fn den_exp(d: &Den, f: &Factor) -> u32 {
    d.iter().find(|(g, _)| g == f).map(|(_, e)| *e).unwrap_or(0)
}

fn expand_den(d: &Den) -> Poly {
    let mut p = Poly::one();
    for (f, e) in d {
        p = p.mul(&f.pow(*e));
    }
    p
}

fn q_int(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

impl Expr {
    fn raw(num: Poly, den: Den) -> Expr {
        Expr(Arc::new(ExprData { num, den }))
    }

    pub fn zero() -> Expr {
        Expr::raw(Poly::zero(), Den::new())
    }

    pub fn one() -> Expr {
        Expr::raw(Poly::one(), Den::new())
    }

    pub fn int(n: i64) -> Expr {
        Expr::rational(q_int(n))
    }

    pub fn frac(n: i64, d: i64) -> Expr {
        Expr::rational(Q::new(BigInt::from(n), BigInt::from(d)))
    }

    pub fn rational(q: Q) -> Expr {
        Expr::raw(Poly::constant(q), Den::new())
    }

    pub fn from_kernel(k: Kernel) -> Expr {
        Expr::raw(Poly::kernel(k), Den::new())
    }

    pub fn var(v: Var) -> Expr {
        Expr::from_kernel(Kernel::var(v))
    }

    pub fn named(name: &str) -> Expr {
        Expr::var(Var::named(name))
    }

    pub fn jet(t: u32, x: u32) -> Expr {
        Expr::var(Var::Jet(JetVar::new(t, x)))
    }

    pub fn jetvar(j: JetVar) -> Expr {
        Expr::var(Var::Jet(j))
    }

    pub fn from_poly(p: Poly) -> Expr {
        Expr::from_parts(p, Den::new())
    }

    pub(crate) fn num(&self) -> &Poly {
        &self.0.num
    }

    pub(crate) fn den(&self) -> &Den {
        &self.0.den
    }

    /// Numerator as an expression (denominator dropped).
    pub fn numerator(&self) -> Expr {
        Expr::raw(self.0.num.clone(), Den::new())
    }

    /// Denominator as an expression.
    pub fn denominator(&self) -> Expr {
        Expr::raw(expand_den(&self.0.den), Den::new())
    }

    /// Denominator factors with multiplicities.
    pub fn den_factors(&self) -> Vec<(Expr, u32)> {
        self.0.den.iter().map(|(f, e)| (Expr::raw(f.poly().clone(), Den::new()), *e)).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.0.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.0.den.is_empty() && self.0.num.is_one()
    }

    pub fn as_rational(&self) -> Option<Q> {
        if self.0.den.is_empty() {
            self.0.num.as_constant()
        } else {
            None
        }
    }

    pub fn as_kernel(&self) -> Option<Kernel> {
        if !self.0.den.is_empty() || self.0.num.len() != 1 {
            return None;
        }
        let (m, c) = &self.0.num.terms[0];
        if c.is_one() && m.len() == 1 && m[0].1 == 1 {
            Some(m[0].0.clone())
        } else {
            None
        }
    }

    pub fn as_var(&self) -> Option<Var> {
        self.as_kernel().and_then(|k| k.as_var().cloned())
    }

    pub fn is_polynomial(&self) -> bool {
        self.0.den.is_empty() && self.0.num.terms.iter().all(|(m, _)| m.iter().all(|(_, e)| *e >= 0))
    }

    pub fn num_terms(&self) -> usize {
        self.0.num.len()
    }

    /// All kernels appearing at top level (numerator and denominator factors).
    pub fn kernels(&self) -> Vec<Kernel> {
        let mut v = self.0.num.kernels();
        for (f, _) in &self.0.den {
            v.extend(f.poly().kernels());
        }
        v.sort();
        v.dedup();
        v
    }

    /// Free atoms, including those nested in kernels.
    pub fn free_vars(&self) -> Vec<Var> {
        let mut seen = HashSet::new();
        let mut out = Vec::new();
        for k in self.kernels() {
            for v in k.vars() {
                if seen.insert(v.clone()) {
                    out.push(v.clone());
                }
            }
        }
        out
    }

    pub fn contains_var(&self, v: &Var) -> bool {
        self.kernels().iter().any(|k| k.vars().contains(v))
    }

    pub fn func_names(&self) -> Vec<Arc<str>> {
        let mut v: Vec<Arc<str>> = self.kernels().iter().flat_map(|k| k.funcs().to_vec()).collect();
        v.sort();
        v.dedup();
        v
    }

    /// Jet variables occurring (nested included), sorted.
    pub fn jets(&self) -> Vec<JetVar> {
        let mut v: Vec<JetVar> = self.free_vars().iter().filter_map(|v| v.as_jet()).collect();
        v.sort_by_key(|j| (j.order(), j.t));
        v.dedup();
        v
    }

    pub fn max_jet_order(&self) -> u32 {
        self.jets().iter().map(|j| j.order()).max().unwrap_or(0)
    }

    /// Largest integral nesting index inside.
    pub fn depth(&self) -> u32 {
        self.kernels().iter().map(|k| k.depth()).max().unwrap_or(0)
    }

    /// Builds a normalized expression from a numerator and denominator factors:
    /// reduces root powers and cancels denominator factors dividing the numerator.
    pub(crate) fn from_parts(num: Poly, den: Den) -> Expr {
        if num.is_zero() {
            return Expr::zero();
        }
        let mut den: Den = den.into_iter().filter(|(_, e)| *e > 0).collect();
        if needs_root_reduction(&num) {
            let reduced = reduce_roots(&num);
            if den.is_empty() {
                return reduced;
            }
            let inv = Expr::raw(Poly::one(), den);
            return reduced.mul(&inv);
        }
        let mut num = num;
        for slot in den.iter_mut() {
            while slot.1 > 0 {
                match num.exact_div(slot.0.poly()) {
                    Some(q) => {
                        num = q;
                        slot.1 -= 1;
                    }
                    None => break,
                }
            }
        }
        den.retain(|(_, e)| *e > 0);
        Expr::raw(num, den)
    }

    pub fn add(&self, other: &Expr) -> Expr {
        if self.is_zero() {
            return other.clone();
        }
        if other.is_zero() {
            return self.clone();
        }
        if self.0.den == other.0.den {
            return Expr::from_parts(self.0.num.add(&other.0.num), self.0.den.clone());
        }
        let l = merge_den(&self.0.den, &other.0.den, |a, b| a.max(b));
        let scale = |e: &Expr| -> Poly {
            let mut p = e.0.num.clone();
            for (f, k) in &l {
                let d = k - den_exp(&e.0.den, f);
                if d > 0 {
                    p = p.mul(&f.pow(d));
                }
            }
            p
        };
        let num = scale(self).add(&scale(other));
        Expr::from_parts(num, l)
    }

    pub fn neg(&self) -> Expr {
        Expr::raw(self.0.num.neg(), self.0.den.clone())
    }

    pub fn sub(&self, other: &Expr) -> Expr {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Expr) -> Expr {
        if self.is_zero() || other.is_zero() {
            return Expr::zero();
        }
        if let Some(c) = other.as_rational() {
            return self.scale(&c);
        }
        if let Some(c) = self.as_rational() {
            return other.scale(&c);
        }
        let den = merge_den(&self.0.den, &other.0.den, |a, b| a + b);
        Expr::from_parts(self.0.num.mul(&other.0.num), den)
    }

    pub fn scale(&self, c: &Q) -> Expr {
        if c.is_zero() {
            return Expr::zero();
        }
        Expr::raw(self.0.num.scale(c), self.0.den.clone())
    }

    /// Multiplicative inverse, `None` for zero.
    pub fn checked_inv(&self) -> Option<Expr> {
        if self.is_zero() {
            return None;
        }
        let (c, m, p) = self.0.num.split_content();
        let num = expand_den(&self.0.den).mul_term(&mono_inv(&m), &(Q::one() / c));
        let mut den = Den::new();
        if p.len() > 1 {
            den.push((Factor::new(p), 1));
        }
        Some(Expr::from_parts(num, den))
    }

    pub fn inv(&self) -> Expr {
        self.checked_inv().expect("division by zero expression")
    }

    pub fn checked_div(&self, other: &Expr) -> Option<Expr> {
        other.checked_inv().map(|i| self.mul(&i))
    }

    pub fn div(&self, other: &Expr) -> Expr {
        self.mul(&other.inv())
    }

    pub fn powi(&self, n: i64) -> Expr {
        if n == 0 {
            return Expr::one();
        }
        if n < 0 {
            return self.inv().powi(-n);
        }
        if self.0.num.len() == 1 {
            let (m, c) = &self.0.num.terms[0];
            let num = Poly::term(mono_pow(m, n as i32), num_traits::pow(c.clone(), n as usize));
            let den = self.0.den.iter().map(|(f, e)| (f.clone(), e * n as u32)).collect();
            return Expr::from_parts(num, den);
        }
        let num = self.0.num.pow(n as u32);
        let den = self.0.den.iter().map(|(f, e)| (f.clone(), e * n as u32)).collect();
        Expr::from_parts(num, den)
    }

    /// Rational power; non-integer exponents produce root kernels (real principal branch).
    pub fn pow_q(&self, r: &Q) -> Expr {
        if r.is_integer() {
            return self.powi(r.to_integer().to_i64().expect("exponent too large"));
        }
        let p = r.numer().to_i64().expect("exponent too large");
        let q = r.denom().to_u32().expect("exponent too large");
        if self.is_zero() {
            return Expr::zero();
        }
        if let Some(c) = self.as_rational() {
            if let Some(root) = exact_root(&c, q) {
                return Expr::rational(root).powi(p);
            }
        }
        // exp(a)^(p/q) = exp(p a / q)
        if let Some(k) = self.as_kernel() {
            if let KernelKind::Exp(a) = k.kind() {
                return Expr::exp(&a.scale(r));
            }
            if let KernelKind::Root { base, q: q0 } = k.kind() {
                return base.pow_q(&(r / Q::from_integer(BigInt::from(*q0))));
            }
        }
        let k = Kernel::new(KernelKind::Root { base: self.clone(), q });
        let m: Mono = smallvec![(k, p as i32)];
        Expr::from_parts(Poly::term(m, Q::one()), Den::new())
    }

    /// General power: rational exponents via `pow_q`, otherwise exp(e·ln(self)).
    pub fn pow(&self, e: &Expr) -> Expr {
        match e.as_rational() {
            Some(r) => self.pow_q(&r),
            None => Expr::exp(&e.mul(&Expr::ln(self))),
        }
    }

    pub fn sqrt(&self) -> Expr {
        self.pow_q(&Q::new(BigInt::from(1), BigInt::from(2)))
    }

    pub fn exp(arg: &Expr) -> Expr {
        if arg.is_zero() {
            return Expr::one();
        }
        let (poly_part, rest) = if arg.0.den.is_empty() {
            (arg.0.num.clone(), Poly::zero())
        } else {
            let d = expand_den(&arg.0.den);
            let content: Mono = arg.0.num.monomial_content().into_iter().filter(|(_, e)| *e < 0).collect();
            let shifted = arg.0.num.mul_term(&mono_inv(&content), &Q::one());
            let (q, r) = shifted.div_rem(&d);
            (q.mul_term(&content, &Q::one()), r.mul_term(&content, &Q::one()))
        };
        let mut out = Expr::one();
        for (m, c) in &poly_part.terms {
            out = out.mul(&exp_term(m, c));
        }
        if !rest.is_zero() {
            let c = rest.rational_content();
            let prim = rest.scale(&(Q::one() / &c));
            let inner = Expr::from_parts(prim, arg.0.den.clone());
            out = out.mul(&exp_scaled(&inner, &c));
        }
        out
    }

    pub fn ln(arg: &Expr) -> Expr {
        assert!(!arg.is_zero(), "ln(0)");
        if arg.is_one() {
            return Expr::zero();
        }
        if arg.0.den.is_empty() && arg.0.num.len() == 1 {
            let (m, c) = &arg.0.num.terms[0];
            let all_exp = m.iter().all(|(k, _)| matches!(k.kind(), KernelKind::Exp(_)));
            if all_exp && c.is_positive() {
                let mut out = if c.is_one() {
                    Expr::zero()
                } else {
                    Expr::from_kernel(Kernel::new(KernelKind::Ln(Expr::rational(c.clone()))))
                };
                for (k, e) in m {
                    if let KernelKind::Exp(a) = k.kind() {
                        out = out.add(&a.scale(&q_int(*e as i64)));
                    }
                }
                return out;
            }
        }
        Expr::from_kernel(Kernel::new(KernelKind::Ln(arg.clone())))
    }

    pub fn atanh(arg: &Expr) -> Expr {
        if arg.is_zero() {
            return Expr::zero();
        }
        Expr::from_kernel(Kernel::new(KernelKind::Atanh(arg.clone())))
    }

    /// Formal function application with derivative orders.
    pub fn func(name: &str, orders: Vec<u32>, args: Vec<Expr>) -> Expr {
        assert_eq!(orders.len(), args.len());
        Expr::from_kernel(Kernel::new(KernelKind::Func { name: Arc::from(name), orders, args }))
    }

    /// g(args) with no derivatives.
    pub fn apply(name: &str, args: Vec<Expr>) -> Expr {
        let orders = vec![0; args.len()];
        Expr::func(name, orders, args)
    }

    /// ∫₀^upper body dv, where `v` is free in `body`.
    pub fn integral(body: &Expr, v: &Var, upper: &Expr) -> Expr {
        let d = body.depth() + 1;
        let mut s = Subst::new();
        s.bind(v.clone(), Expr::var(Var::Bound(d)));
        let b = s.apply(body);
        Expr::integral_bound(&b, d, upper)
    }

    /// ∫₀^upper body, where `Bound(bound)` is the integration variable inside `body`.
    pub fn integral_bound(body: &Expr, bound: u32, upper: &Expr) -> Expr {
        if upper.is_zero() || body.is_zero() {
            return Expr::zero();
        }
        let bv = Var::Bound(bound);
        let bk = Kernel::var(bv.clone());
        let involves = |k: &Kernel| k.vars().contains(&bv);
        let mut den_free = Den::new();
        let mut den_b = Den::new();
        for (f, e) in &body.0.den {
            if f.poly().kernels().iter().any(involves) {
                den_b.push((f.clone(), *e));
            } else {
                den_free.push((f.clone(), *e));
            }
        }
        // group numerator terms by their bound-dependent monomial
        let mut groups: Vec<(Mono, Vec<(Mono, Q)>)> = Vec::new();
        for (m, c) in &body.0.num.terms {
            let (mb, mf): (Mono, Mono) = m.iter().cloned().partition(|(k, _)| involves(k));
            match groups.iter_mut().find(|(g, _)| *g == mb) {
                Some((_, ts)) => ts.push((mf, c.clone())),
                None => groups.push((mb, vec![(mf, c.clone())])),
            }
        }
        let free_inv = Expr::raw(Poly::one(), den_free);
        let free_inv = Expr::from_parts(free_inv.0.num.clone(), free_inv.0.den.clone());
        let mut out = Expr::zero();
        for (mb, ts) in groups {
            let coef = Expr::from_parts(Poly::from_terms(ts), Den::new()).mul(&free_inv);
            let piece = if den_b.is_empty() && mb.is_empty() {
                upper.clone()
            } else if den_b.is_empty() && mb.len() == 1 && mb[0].0 == bk && mb[0].1 >= 0 {
                let k = mb[0].1 as i64;
                upper.powi(k + 1).scale(&Q::new(BigInt::one(), BigInt::from(k + 1)))
            } else {
                let h = Expr::from_parts(Poly::term(mb, Q::one()), den_b.clone());
                integral_kernel(&h, bound, upper)
            };
            out = out.add(&coef.mul(&piece));
        }
        out
    }

    /// Collects coefficients of monomials in the given kernels: returns pairs
    /// (monomial expression, coefficient expression). The denominator must be free of them.
    pub fn coefficients_in(&self, kernels: &dyn Fn(&Kernel) -> bool) -> Vec<(Expr, Expr)> {
        let mut groups: Vec<(Mono, Vec<(Mono, Q)>)> = Vec::new();
        for (m, c) in &self.0.num.terms {
            let (mb, mf): (Mono, Mono) = m.iter().cloned().partition(|(k, _)| kernels(k));
            match groups.iter_mut().find(|(g, _)| *g == mb) {
                Some((_, ts)) => ts.push((mf, c.clone())),
                None => groups.push((mb, vec![(mf, c.clone())])),
            }
        }
        let den_inv = Expr::raw(Poly::one(), self.0.den.clone());
        groups
            .into_iter()
            .map(|(mb, ts)| {
                let coef = Expr::from_parts(Poly::from_terms(ts), Den::new()).mul(&den_inv);
                (Expr::from_parts(Poly::term(mb, Q::one()), Den::new()), coef)
            })
            .collect()
    }

    /// Degree of the numerator in kernel `k` and whether `k` appears in the denominator.
    pub fn degree_in(&self, k: &Kernel) -> (i32, bool) {
        let in_den = self.0.den.iter().any(|(f, _)| f.poly().contains(k));
        (self.0.num.max_exp(k), in_den)
    }

    /// Writes `self = a·k + b` when `self` is affine in the atom kernel `k`
    /// (numerator degree ≤ 1, denominator free of k).
    pub fn affine_in(&self, k: &Kernel) -> Option<(Expr, Expr)> {
        let (deg, in_den) = self.degree_in(k);
        if in_den || deg > 1 {
            return None;
        }
        if self.0.num.terms.iter().any(|(m, _)| m.iter().any(|(kk, e)| kk == k && *e < 0)) {
            return None;
        }
        let nested = self.kernels().iter().any(|kk| kk != k && kk.vars().iter().any(|v| Some(v) == k.as_var()));
        if nested {
            return None;
        }
        let den_inv = Expr::raw(Poly::one(), self.0.den.clone());
        let a = Expr::from_parts(self.0.num.diff_kernel(k), Den::new()).mul(&den_inv);
        let b_terms = self.0.num.terms.iter().filter(|(m, _)| !m.iter().any(|(kk, _)| kk == k)).cloned();
        let b = Expr::from_parts(Poly::from_terms(b_terms), Den::new()).mul(&den_inv);
        Some((a, b))
    }

    /// Univariate view: when `self` is a ratio of Laurent polynomials in the atom `v` with
    /// rational coefficients, returns the numerator terms (exponent, coefficient) and the
    /// denominator factors with multiplicities.
    pub fn univariate(&self, v: &Var) -> Option<Univariate> {
        let k = Kernel::var(v.clone());
        let terms = |p: &Poly| -> Option<Vec<(i32, Q)>> {
            p.terms
                .iter()
                .map(|(m, c)| match m.as_slice() {
                    [] => Some((0, c.clone())),
                    [(kk, e)] if *kk == k => Some((*e, c.clone())),
                    _ => None,
                })
                .collect()
        };
        let num = terms(&self.0.num)?;
        let den = self.0.den.iter().map(|(f, e)| Some((terms(f.poly())?, *e))).collect::<Option<Vec<_>>>()?;
        Some(Univariate { num, den })
    }

    /// Canonical text form; parseable by the expression parser.
    pub fn key(&self) -> String {
        self.to_string()
    }

    /// Sum of the numerator term count and denominator factor term counts.
    pub fn size(&self) -> usize {
        self.0.num.len() + self.0.den.iter().map(|(f, _)| f.poly().len()).sum::<usize>()
    }
}

fn exact_root(c: &Q, q: u32) -> Option<Q> {
    if c.is_negative() && q % 2 == 0 {
        return None;
    }
    let n = c.numer().abs().nth_root(q);
    let d = c.denom().nth_root(q);
    let r = Q::new(if c.is_negative() { -n } else { n }, d);
    if num_traits::pow(r.clone(), q as usize) == *c {
        Some(r)
    } else {
        None
    }
}

/// exp(c·m) for a single Laurent monomial m.
fn exp_term(m: &Mono, c: &Q) -> Expr {
    if m.len() == 1 && m[0].1 == 1 {
        if let KernelKind::Ln(z) = m[0].0.kind() {
            return z.pow_q(c);
        }
    }
    let inner = Expr::from_parts(Poly::term(m.clone(), Q::one()), Den::new());
    exp_scaled(&inner, c)
}

/// exp(c·inner) as exp(inner/q)^p with c = p/q.
fn exp_scaled(inner: &Expr, c: &Q) -> Expr {
    let p = c.numer().to_i32().expect("exponent too large");
    let q = c.denom().clone();
    let arg = inner.scale(&Q::new(BigInt::one(), q));
    let k = Kernel::new(KernelKind::Exp(arg));
    let m: Mono = smallvec![(k, p)];
    Expr::from_parts(Poly::term(m, Q::one()), Den::new())
}

fn integral_kernel(h: &Expr, bound: u32, upper: &Expr) -> Expr {
    let d = h.kernels().iter().map(|k| k.depth()).max().unwrap_or(0) + 1;
    let h = if d == bound {
        h.clone()
    } else {
        let mut s = Subst::new();
        s.bind(Var::Bound(bound), Expr::var(Var::Bound(d)));
        s.apply(h)
    };
    Expr::from_kernel(Kernel::new(KernelKind::Integral { body: h, bound: d, upper: upper.clone() }))
}

fn needs_root_reduction(p: &Poly) -> bool {
    p.terms.iter().any(|(m, _)| {
        m.iter().any(|(k, e)| match k.kind() {
            KernelKind::Root { q, .. } => *e < 0 || *e >= *q as i32,
            _ => false,
        })
    })
}

fn reduce_roots(p: &Poly) -> Expr {
    let mut clean = Vec::new();
    let mut out = Expr::zero();
    for (m, c) in &p.terms {
        let mut base_pow = Expr::one();
        let mut mm = Mono::new();
        let mut dirty = false;
        for (k, e) in m {
            if let KernelKind::Root { base, q } = k.kind() {
                let q = *q as i32;
                if *e < 0 || *e >= q {
                    dirty = true;
                    let r = e.rem_euclid(q);
                    let k_out = (e - r) / q;
                    base_pow = base_pow.mul(&base.powi(k_out as i64));
                    if r != 0 {
                        mm.push((k.clone(), r));
                    }
                    continue;
                }
            }
            mm.push((k.clone(), *e));
        }
        if dirty {
            let t = Expr::from_parts(Poly::term(mm, c.clone()), Den::new());
            out = out.add(&t.mul(&base_pow));
        } else {
            clean.push((m.clone(), c.clone()));
        }
    }
    out.add(&Expr::raw(Poly::from_terms(clean), Den::new()))
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&super::display::expr_to_string(self))
    }
}

impl fmt::Debug for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&super::display::expr_to_string(self))
    }
}

macro_rules! impl_op {
    ($tr:ident, $m:ident, $f:ident) => {
        impl std::ops::$tr<&Expr> for &Expr {
            type Output = Expr;
            fn $m(self, o: &Expr) -> Expr {
                Expr::$f(self, o)
            }
        }
        impl std::ops::$tr<Expr> for Expr {
            type Output = Expr;
            fn $m(self, o: Expr) -> Expr {
                Expr::$f(&self, &o)
            }
        }
        impl std::ops::$tr<&Expr> for Expr {
            type Output = Expr;
            fn $m(self, o: &Expr) -> Expr {
                Expr::$f(&self, o)
            }
        }
        impl std::ops::$tr<Expr> for &Expr {
            type Output = Expr;
            fn $m(self, o: Expr) -> Expr {
                Expr::$f(self, &o)
            }
        }
        impl std::ops::$tr<i64> for Expr {
            type Output = Expr;
            fn $m(self, o: i64) -> Expr {
                Expr::$f(&self, &Expr::int(o))
            }
        }
        impl std::ops::$tr<i64> for &Expr {
            type Output = Expr;
            fn $m(self, o: i64) -> Expr {
                Expr::$f(self, &Expr::int(o))
            }
        }
    };
}

impl_op!(Add, add, add);
impl_op!(Sub, sub, sub);
impl_op!(Mul, mul, mul);
impl_op!(Div, div, div);

impl std::ops::Neg for Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        Expr::neg(&self)
    }
}

impl std::ops::Neg for &Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        Expr::neg(self)
    }
}

impl From<i64> for Expr {
    fn from(n: i64) -> Expr {
        Expr::int(n)
    }
}

/// See [`Expr::univariate`].
#[derive(Clone, Debug)]
pub struct Univariate {
    pub num: Vec<(i32, Q)>,
    pub den: Vec<(Vec<(i32, Q)>, u32)>,
}
