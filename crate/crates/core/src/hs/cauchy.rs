//! Cauchy data u(t0, x) = u0(x): solving for g, fitting C, and the singular curve.

use std::sync::Arc;

use serde::Serialize;

use super::{general_solution, Anchor, ParamSolution};
use crate::error::{Error, Result};
use crate::numeric::roots::{bisect, sign_changes};
use crate::sym::{partial, Env, Expr, Kernel, KernelKind, NumFn, Var, Q};

#[derive(Clone, Debug)]
pub struct CauchyProblem {
    pub t0: f64,
    /// u0 as an expression in x.
    pub u0: Expr,
    /// Working interval in x.
    pub window: (f64, f64),
}

/// An x-interval on which w(x) = 2u0'/(2 − t0 u0') is monotone, with the w-values at its ends.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct SlopeBranch {
    pub x: (f64, f64),
    /// w at x.0 and x.1 (limits when the map blows up there).
    pub w_ends: (f64, f64),
}

impl SlopeBranch {
    /// The open w-interval covered by the branch.
    pub fn w_range(&self) -> (f64, f64) {
        let (a, b) = self.w_ends;
        (a.min(b), a.max(b))
    }
}

/// g solving g(w(x)) = (2 − t0 u0')⁴/(16 u0'') on each branch.
#[derive(Clone)]
pub struct CauchyG {
    pub problem: CauchyProblem,
    /// g(w); when no elementary inverse was found this is the formal call g(w) with a numeric
    /// closure bound in `env`.
    pub g: Expr,
    pub symbolic: bool,
    pub branches: Vec<SlopeBranch>,
    pub env: Env,
    du: Expr,
    ddu: Expr,
}

impl std::fmt::Debug for CauchyG {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "CauchyG(g = {}, symbolic: {}, {} branches)", self.g, self.symbolic, self.branches.len())
    }
}

fn eval_x(e: &Expr, x: f64) -> Result<f64> {
    e.eval(&Env::new().with("x", x))
}

fn slope_w(t0: f64, du: &Expr, x: f64) -> Result<f64> {
    let s = eval_x(du, x)?;
    Ok(2.0 * s / (2.0 - t0 * s))
}

fn q(x: f64) -> Result<Q> {
    Q::from_float(x).ok_or_else(|| Error::InvalidParameter(format!("{x} is not finite")))
}

/// x as an elementary function of s = u0'(x), for u0' affine in x^{±1}, in exp(affine)^e, or
/// in ln(affine).
fn invert_slope(du: &Expr) -> Option<Expr> {
    let x = Var::named("x");
    let s = Expr::named("s");
    if du.denominator().contains_var(&x) {
        return None;
    }
    let mut cands: Vec<Kernel> = du.kernels().into_iter().filter(|k| k.vars().contains(&x)).collect();
    cands.dedup();
    for k in cands {
        let groups = du.coefficients_in(&|kk: &Kernel| kk == &k);
        if groups.len() > 2 || groups.iter().any(|(_, c)| c.contains_var(&x)) {
            continue;
        }
        let (mut a, mut b, mut mono) = (None, Expr::zero(), None);
        for (m, c) in groups {
            if m.is_one() {
                b = c;
            } else {
                mono = Some(m);
                a = Some(c);
            }
        }
        let (Some(a), Some(mono)) = (a, mono) else { continue };
        let kx = Expr::from_kernel(k.clone());
        let Some(e) = (-3i64..=3).filter(|e| *e != 0).find(|e| (mono.clone() - kx.powi(*e)).is_zero()) else { continue };
        // k^e = (s − b)/a
        let rhs = (s.clone() - b) / a;
        let inv = match k.kind() {
            KernelKind::Var(_) if e.abs() == 1 => rhs.powi(e),
            KernelKind::Exp(arg) | KernelKind::Ln(arg) => {
                let (c, d) = arg.affine_in(&Kernel::var(x.clone()))?;
                if c.contains_var(&x) || d.contains_var(&x) || c.is_zero() {
                    continue;
                }
                let inner = match k.kind() {
                    KernelKind::Exp(_) => Expr::ln(&rhs) / Expr::int(e),
                    _ if e == 1 => Expr::exp(&rhs),
                    _ => continue,
                };
                (inner - d) / c
            }
            _ => continue,
        };
        if (du.subst_named("x", &inv) - s.clone()).is_zero() {
            return Some(inv);
        }
    }
    None
}

/// Solves the functional equation for g. Branches split the window where u0'' or 2 − t0 u0'
/// changes sign; the slope map is monotone on each.
pub fn cauchy_g(p: &CauchyProblem) -> Result<CauchyG> {
    let x = Var::named("x");
    if let Some(v) = p.u0.free_vars().into_iter().find(|v| *v != x) {
        return Err(Error::InvalidParameter(format!("u0 must be a function of x alone, found {}", v.name())));
    }
    let (lo, hi) = p.window;
    if !(lo < hi) {
        return Err(Error::InvalidParameter(format!("empty window ({lo}, {hi})")));
    }
    let du = partial(&p.u0, &x);
    let ddu = partial(&du, &x);
    if ddu.is_zero() {
        return Err(Error::Genericity(
            "u0'' ≡ 0: the functional equation for g has no solution (u0''(x) ≠ 0 is necessary)".into(),
        ));
    }
    let t0 = p.t0;
    let mut cuts = vec![lo, hi];
    cuts.extend(sign_changes(|x| eval_x(&ddu, x), lo, hi, 4000, 1e-13));
    cuts.extend(sign_changes(|x| Ok(2.0 - t0 * eval_x(&du, x)?), lo, hi, 4000, 1e-13));
    cuts.sort_by(f64::total_cmp);
    cuts.dedup_by(|a, b| (*a - *b).abs() < 1e-12);
    let mut branches = Vec::new();
    for win in cuts.windows(2) {
        let (a, b) = (win[0], win[1]);
        if b - a < 1e-9 {
            continue;
        }
        let d = 1e-9 * (b - a);
        let (wa, wb) = (slope_w(t0, &du, a + d), slope_w(t0, &du, b - d));
        match (wa, wb) {
            (Ok(wa), Ok(wb)) if wa.is_finite() && wb.is_finite() => branches.push(SlopeBranch { x: (a, b), w_ends: (wa, wb) }),
            _ => log::debug!("slope map undefined near the ends of ({a}, {b}); branch dropped"),
        }
    }
    if branches.is_empty() {
        return Err(Error::Domain(format!("the slope map is undefined on ({lo}, {hi})")));
    }

    let mut env = Env::new();
    let (g, symbolic) = match invert_slope(&du) {
        Some(xs) => {
            let s = Expr::named("s");
            let t0q = Expr::rational(q(t0)?);
            let gs = (Expr::int(2) - t0q.clone() * s.clone()).powi(4) / (Expr::int(16) * ddu.subst_named("x", &xs));
            let sw = Expr::int(2) * Expr::named("w") / (t0q * Expr::named("w") + Expr::int(2));
            (gs.subst_named("s", &sw), true)
        }
        None => {
            env.bind_closure("g", numeric_g(t0, &du, &ddu, branches.clone()));
            (Expr::apply("g", vec![Expr::named("w")]), false)
        }
    };
    Ok(CauchyG { problem: p.clone(), g, symbolic, branches, env, du, ddu })
}

/// g(w) by inverting the slope map on the first of `branches` whose w-range holds w.
fn numeric_g(t0: f64, du: &Expr, ddu: &Expr, branches: Vec<SlopeBranch>) -> NumFn {
    let (du, ddu) = (du.clone(), ddu.clone());
    Arc::new(move |orders: &[u32], args: &[f64]| {
        if orders.iter().any(|o| *o != 0) {
            return Err(Error::Unsupported("derivatives of a numerically inverted g".into()));
        }
        let w = args[0];
        let b = branches
            .iter()
            .find(|b| {
                let (l, h) = b.w_range();
                w > l && w < h
            })
            .ok_or_else(|| Error::Domain(format!("w = {w} is not reached by the slope map")))?;
        let x = invert_on(t0, &du, b, w)?;
        let s = eval_x(&du, x)?;
        Ok((2.0 - t0 * s).powi(4) / (16.0 * eval_x(&ddu, x)?))
    })
}

fn invert_on(t0: f64, du: &Expr, b: &SlopeBranch, w: f64) -> Result<f64> {
    let d = 1e-12 * (b.x.1 - b.x.0);
    bisect(|x| Ok(slope_w(t0, du, x)? - w), b.x.0 + d, b.x.1 - d, 1e-15)
}

impl CauchyG {
    pub fn slope_w(&self, x: f64) -> Result<f64> {
        slope_w(self.problem.t0, &self.du, x)
    }

    /// x on `branch` with w(x) = w.
    pub fn x_of_w(&self, branch: usize, w: f64) -> Result<f64> {
        let b = self.branch(branch)?;
        invert_on(self.problem.t0, &self.du, b, w)
    }

    pub fn branch(&self, k: usize) -> Result<&SlopeBranch> {
        self.branches
            .get(k)
            .ok_or_else(|| Error::InvalidParameter(format!("branch {k} of {}", self.branches.len())))
    }

    /// u0'' at x, for reports.
    pub fn u0_xx(&self, x: f64) -> Result<f64> {
        eval_x(&self.ddu, x)
    }

    /// `env` with a numeric g restricted to one branch, since branch w-ranges may overlap.
    pub fn branch_env(&self, branch: usize) -> Result<Env> {
        let b = *self.branch(branch)?;
        let mut env = self.env.clone();
        if !self.symbolic {
            env.bind_closure("g", numeric_g(self.problem.t0, &self.du, &self.ddu, vec![b]));
        }
        Ok(env)
    }

    /// The surface for this g on one branch, before C is fixed.
    pub fn family(&self, branch: usize, anchor: Anchor) -> Result<ParamSolution> {
        self.on_branch(branch, anchor, Expr::zero())
    }

    /// The solution on `branch` with the fitted C.
    pub fn solution(&self, branch: usize, anchor: Anchor, fit: &CFit) -> Result<ParamSolution> {
        self.on_branch(branch, anchor, fit.c.clone())
    }

    fn on_branch(&self, branch: usize, anchor: Anchor, c: Expr) -> Result<ParamSolution> {
        let (lo, hi) = self.branch(branch)?.w_range();
        Ok(general_solution(self.g.clone(), c, anchor)?.with_env(self.branch_env(branch)?).with_window(lo, hi))
    }

    /// max over `n` interior points of the branch of |X(t0, w(x)) − x| and |U(t0, w(x)) − u0(x)|.
    pub fn round_trip(&self, sol: &ParamSolution, branch: usize, n: usize) -> Result<f64> {
        let b = self.branch(branch)?;
        let t0 = self.problem.t0;
        let mut m = 0f64;
        for k in 1..=n {
            let x = b.x.0 + (b.x.1 - b.x.0) * k as f64 / (n + 1) as f64;
            let w = self.slope_w(x)?;
            m = m.max((sol.x_of(t0, w)? - x).abs()).max((sol.u_of(t0, w)? - eval_x(&self.problem.u0, x)?).abs());
        }
        Ok(m)
    }
}

/// How C(t) is pinned down once C(t0) and C'(t0) are read off the data.
#[derive(Clone, Debug)]
pub enum CRule {
    Explicit(Expr),
    /// u → 0 as x → +∞ for every t.
    Decay,
    /// C(t0) + C'(t0)(t − t0).
    Linear,
}

#[derive(Clone, Debug, Serialize)]
pub struct DecayEnd {
    /// lim w(x) as x → +∞.
    pub w: f64,
    /// U(t, w_end) without C' is P t + Q.
    pub p: f64,
    pub q: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct CFit {
    #[serde(serialize_with = "ser_expr")]
    pub c: Expr,
    /// C(t0) and C'(t0) fitted from the initial slice.
    pub c_t0: f64,
    pub dc_t0: f64,
    /// Largest deviation of a sample from the fitted C(t0), C'(t0); large values mean the
    /// data does not lie on the family.
    pub spread: f64,
    /// Coefficients (a0, a1, a2) of C = a0 + a1 t + a2 t² for the decay and linear rules.
    pub coeffs: Option<[f64; 3]>,
    pub decay: Option<DecayEnd>,
    /// For an explicit C: |C(t0) − fitted| + |C'(t0) − fitted|.
    pub mismatch: Option<f64>,
}

fn ser_expr<S: serde::Serializer>(e: &Expr, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&e.to_string())
}

impl CFit {
    pub fn eval(&self, t: f64) -> Result<f64> {
        self.c.eval(&Env::new().with("t", t))
    }
}

fn poly_t(c: [f64; 3]) -> Result<Expr> {
    let t = Expr::named("t");
    Ok(Expr::rational(q(c[0])?) + Expr::rational(q(c[1])?) * t.clone() + Expr::rational(q(c[2])?) * t.powi(2))
}

/// Fits C on `branch`: C(t0) and C'(t0) are averages of x − X(t0, w(x)) and u0(x) − U(t0, w(x))
/// over interior samples; the rule extends them to all t.
pub fn fit_c(cg: &CauchyG, branch: usize, anchor: Anchor, rule: &CRule) -> Result<CFit> {
    let fam = cg.family(branch, anchor)?;
    let b = *cg.branch(branch)?;
    let t0 = cg.problem.t0;
    let n = 9;
    let (mut cs, mut ds) = (Vec::new(), Vec::new());
    for k in 1..=n {
        let x = b.x.0 + (b.x.1 - b.x.0) * k as f64 / (n + 1) as f64;
        let w = cg.slope_w(x)?;
        cs.push(x - fam.x0(t0, w)?);
        ds.push(eval_x(&cg.problem.u0, x)? - fam.u0(t0, w)?);
    }
    let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
    let (c_t0, dc_t0) = (mean(&cs), mean(&ds));
    let spread = cs.iter().map(|c| (c - c_t0).abs()).chain(ds.iter().map(|d| (d - dc_t0).abs())).fold(0.0, f64::max);
    let mut fit = CFit { c: Expr::zero(), c_t0, dc_t0, spread, coeffs: None, decay: None, mismatch: None };
    match rule {
        CRule::Explicit(c) => {
            let env = |t: f64| Env::new().with("t", t);
            let dc = partial(c, &Var::named("t"));
            fit.mismatch = Some((c.eval(&env(t0))? - c_t0).abs() + (dc.eval(&env(t0))? - dc_t0).abs());
            fit.c = c.clone();
        }
        CRule::Linear => {
            let co = [c_t0 - dc_t0 * t0, dc_t0, 0.0];
            fit.c = poly_t(co)?;
            fit.coeffs = Some(co);
        }
        CRule::Decay => {
            let inapplicable = |why: String| Error::Domain(format!("decay rule inapplicable: {why}"));
            if b.x.1 < cg.problem.window.1 {
                return Err(inapplicable("the branch does not reach the right end of the window".into()));
            }
            // walk x outward geometrically until evaluation overflows; w and U must settle
            let far = cg.problem.window.1.abs().max(1.0);
            let mut ws = Vec::new();
            for k in 1..=60 {
                match cg.slope_w(far * 2f64.powi(k)) {
                    Ok(w) if w.is_finite() => ws.push(w),
                    _ => break,
                }
            }
            let n = ws.len();
            if n < 3 || (ws[n - 1] - ws[n - 2]).abs() > 1e-6 * (1.0 + ws[n - 1].abs()) {
                return Err(inapplicable("w(x) has no finite limit as x → +∞".into()));
            }
            let w_end = ws[n - 1];
            let u_end = |t: f64| -> Result<f64> {
                let us = [fam.u0(t, ws[n - 2]), fam.u0(t, w_end)];
                match us {
                    [Ok(a), Ok(b)] if (a - b).abs() <= 1e-9 * (1.0 + b.abs()) => Ok(b),
                    _ => Err(inapplicable(format!("U has no finite limit as w → {w_end}"))),
                }
            };
            let qv = u_end(0.0)?;
            let pv = u_end(1.0)? - qv;
            // C'(t) = −(P t + Q)
            let co = [c_t0 + pv * t0 * t0 / 2.0 + qv * t0, -qv, -pv / 2.0];
            fit.c = poly_t(co)?;
            fit.coeffs = Some(co);
            fit.decay = Some(DecayEnd { w: w_end, p: pv, q: qv });
        }
    }
    Ok(fit)
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct SingularPoint {
    pub t: f64,
    pub w: f64,
    pub x: f64,
    pub u: f64,
}

/// Points where ∂X/∂w = ¼(tw+2)²g(w) vanishes, per t-slice: w = −2/t and the sign changes of g
/// inside the solution's window (clamped to [−50, 50]).
pub fn singular_curve(sol: &ParamSolution, ts: &[f64]) -> Vec<SingularPoint> {
    let (lo, hi) = sol.window.unwrap_or((f64::NEG_INFINITY, f64::INFINITY));
    let (a, b) = (lo.max(-50.0), hi.min(50.0));
    let g_zeros = if sol.degenerate || !(a < b) {
        Vec::new()
    } else {
        let d = 1e-9 * (b - a);
        sign_changes(|w| sol.g_at(w), a + d, b - d, 2000, 1e-14)
            .into_iter()
            .filter(|w| sol.g_at(*w).map(|v| v.abs() < 1e-8).unwrap_or(false))
            .collect()
    };
    let mut out = Vec::new();
    for &t in ts {
        let mut ws = g_zeros.clone();
        if t != 0.0 {
            ws.push(-2.0 / t);
        }
        for w in ws.into_iter().filter(|w| *w > lo && *w < hi) {
            match (sol.x_of(t, w), sol.u_of(t, w)) {
                (Ok(x), Ok(u)) => out.push(SingularPoint { t, w, x, u }),
                (Err(e), _) | (_, Err(e)) => log::debug!("singular candidate (t, w) = ({t}, {w}) skipped: {e}"),
            }
        }
    }
    out
}
