//! Method of characteristics for a first-order quasilinear quotient a H_I + b H_J = c.

use serde::Serialize;

use super::CatalogEntry;
use crate::error::{Error, Result};
use crate::invariants::Syzygy;
use crate::sym::{Env, Expr, Kernel, Var};

/// a H_I + b H_J = c with a, b, c functions of I, J, H.
#[derive(Clone, Debug)]
pub struct Quasilinear {
    pub base: String,
    pub a: Expr,
    pub b: Expr,
    pub c: Expr,
}

impl Quasilinear {
    /// Reads the coefficients off a syzygy that is affine in `base_I` and `base_J` and has no
    /// other derivative tokens.
    pub fn from_syzygy(s: &Syzygy, base: &str) -> Result<Self> {
        let hi = Var::named(&format!("{base}_I"));
        let hj = Var::named(&format!("{base}_J"));
        for v in s.lhs.free_vars() {
            if let Var::Named(n) = &v {
                if n.contains('_') && v != hi && v != hj {
                    return Err(Error::Unsupported(format!("{s} is not first order in {base}")));
                }
            }
        }
        let not_ql = || Error::Unsupported(format!("{s} is not quasilinear in {base}"));
        let (a, rest) = s.lhs.affine_in(&Kernel::var(hi.clone())).ok_or_else(not_ql)?;
        let (b, rest) = rest.affine_in(&Kernel::var(hj.clone())).ok_or_else(not_ql)?;
        for e in [&a, &b, &rest] {
            if e.contains_var(&hi) || e.contains_var(&hj) {
                return Err(not_ql());
            }
        }
        if a.is_zero() && b.is_zero() {
            return Err(not_ql());
        }
        Ok(Quasilinear { base: base.to_string(), a, b, c: -rest })
    }

    /// The first syzygy of the entry that is quasilinear in H.
    pub fn of_entry(entry: &CatalogEntry) -> Result<Self> {
        entry
            .syzygies
            .iter()
            .find_map(|s| Quasilinear::from_syzygy(s, "H").ok())
            .ok_or_else(|| Error::Unsupported(format!("{} has no first-order quasilinear syzygy", entry.name())))
    }

    fn field(&self, env: &mut Env, p: [f64; 3]) -> Result<[f64; 3]> {
        env.set_named("I", p[0]).set_named("J", p[1]).set_named(&self.base, p[2]);
        Ok([self.a.eval(env)?, self.b.eval(env)?, self.c.eval(env)?])
    }
}

/// Initial data (I, J, H) as functions of `sigma`, sampled at `count` evenly spaced points.
#[derive(Clone, Debug)]
pub struct InitialCurve {
    pub i: Expr,
    pub j: Expr,
    pub h: Expr,
    pub sigma: (f64, f64),
    pub count: usize,
}

impl InitialCurve {
    /// H(i0, J) = h(J) on the segment J ∈ [j0, j1].
    pub fn at_fixed_i(i0: f64, h: Expr, j0: f64, j1: f64, count: usize) -> Self {
        InitialCurve { i: Expr::rational(q(i0)), j: Expr::named("sigma"), h, sigma: (j0, j1), count }
    }

    /// H(I, j0) = h(I) on the segment I ∈ [i0, i1].
    pub fn at_fixed_j(j0: f64, h: Expr, i0: f64, i1: f64, count: usize) -> Self {
        InitialCurve { i: Expr::named("sigma"), j: Expr::rational(q(j0)), h, sigma: (i0, i1), count }
    }

    fn points(&self, env: &Env) -> Result<Vec<[f64; 3]>> {
        if self.count < 2 {
            return Err(Error::InvalidParameter("an initial curve needs at least 2 points".into()));
        }
        let mut env = env.clone();
        (0..self.count)
            .map(|k| {
                let s = self.sigma.0 + (self.sigma.1 - self.sigma.0) * k as f64 / (self.count - 1) as f64;
                env.set_named("sigma", s);
                Ok([self.i.eval(&env)?, self.j.eval(&env)?, self.h.eval(&env)?])
            })
            .collect()
    }
}

fn q(x: f64) -> crate::sym::Q {
    crate::sym::Q::from_float(x).unwrap_or_default()
}

#[derive(Clone, Copy, Debug)]
pub struct CharSettings {
    /// Length of each characteristic in its parameter s.
    pub span: f64,
    pub step: f64,
    /// |H| above this terminates a characteristic.
    pub blowup: f64,
    /// Adjacent characteristics closer than this count as crossing.
    pub crossing_tol: f64,
}

impl Default for CharSettings {
    fn default() -> Self {
        CharSettings { span: 1.0, step: 0.01, blowup: 1e8, crossing_tol: 1e-9 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Flag {
    Ok,
    Blowup,
    Crossing,
    /// The vector field could not be evaluated (pole or domain error).
    Invalid,
}

impl std::fmt::Display for Flag {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Flag::Ok => "ok",
            Flag::Blowup => "blowup",
            Flag::Crossing => "crossing",
            Flag::Invalid => "invalid",
        })
    }
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct CharSample {
    pub curve: usize,
    pub s: f64,
    #[serde(rename = "I")]
    pub i: f64,
    #[serde(rename = "J")]
    pub j: f64,
    #[serde(rename = "H")]
    pub h: f64,
    pub flag: Flag,
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct Crossing {
    pub curves: (usize, usize),
    pub s: f64,
    #[serde(rename = "I")]
    pub i: f64,
    #[serde(rename = "J")]
    pub j: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct Characteristics {
    pub step: f64,
    /// One trajectory per initial point, sampled every step.
    pub curves: Vec<Vec<CharSample>>,
    pub crossings: Vec<Crossing>,
    /// Error of the returned samples from step halving: max 16|H_h − H_{h/2}|/15 over unflagged samples.
    pub error_estimate: f64,
}

impl Characteristics {
    pub fn samples(&self) -> impl Iterator<Item = &CharSample> {
        self.curves.iter().flatten()
    }

    /// Max |H − exact(I, J)| over unflagged samples.
    pub fn max_error(&self, mut exact: impl FnMut(f64, f64) -> Result<f64>) -> Result<f64> {
        let mut m = 0f64;
        for p in self.samples().filter(|p| p.flag == Flag::Ok) {
            m = m.max((p.h - exact(p.i, p.j)?).abs());
        }
        Ok(m)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("I,J,H,flag\n");
        for p in self.samples() {
            out.push_str(&format!("{:.16e},{:.16e},{:.16e},{}\n", p.i, p.j, p.h, p.flag));
        }
        out
    }
}

fn rk4(ql: &Quasilinear, env: &mut Env, p: [f64; 3], h: f64) -> Result<[f64; 3]> {
    let add = |p: [f64; 3], k: [f64; 3], c: f64| [p[0] + c * k[0], p[1] + c * k[1], p[2] + c * k[2]];
    let k1 = ql.field(env, p)?;
    let k2 = ql.field(env, add(p, k1, h / 2.0))?;
    let k3 = ql.field(env, add(p, k2, h / 2.0))?;
    let k4 = ql.field(env, add(p, k3, h))?;
    Ok(std::array::from_fn(|i| p[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i])))
}

fn trace(ql: &Quasilinear, env: &Env, curve: usize, p0: [f64; 3], n: usize, h: f64, bound: f64) -> Vec<CharSample> {
    let mut env = env.clone();
    let sample = |k: usize, p: [f64; 3], flag| CharSample { curve, s: k as f64 * h, i: p[0], j: p[1], h: p[2], flag };
    let mut out = vec![sample(0, p0, Flag::Ok)];
    let mut p = p0;
    for k in 1..=n {
        match rk4(ql, &mut env, p, h) {
            Ok(next) if next.iter().all(|x| x.is_finite()) && next[2].abs() <= bound => {
                p = next;
                out.push(sample(k, p, Flag::Ok));
            }
            Ok(next) if next.iter().all(|x| x.is_finite()) => {
                out.push(sample(k, next, Flag::Blowup));
                break;
            }
            Ok(_) => {
                out.push(sample(k, p, Flag::Blowup));
                break;
            }
            Err(e) => {
                log::debug!("characteristic {curve} stopped at s = {}: {e}", k as f64 * h);
                out.push(sample(k, p, Flag::Invalid));
                break;
            }
        }
    }
    out
}

fn integrate(ql: &Quasilinear, env: &Env, init: &[[f64; 3]], n: usize, h: f64, s: &CharSettings) -> Result<(Vec<Vec<CharSample>>, Vec<Crossing>)> {
    let mut curves: Vec<_> = init.iter().enumerate().map(|(c, p)| trace(ql, env, c, *p, n, h, s.blowup)).collect();
    let mut crossings = Vec::new();
    let mut e = env.clone();
    for c in 0..curves.len().saturating_sub(1) {
        let len = curves[c].len().min(curves[c + 1].len());
        let mut sign0 = None;
        for k in 0..len {
            let (p, r) = (curves[c][k], curves[c + 1][k]);
            if p.flag != Flag::Ok || r.flag != Flag::Ok {
                break;
            }
            // orientation of the front against the characteristic direction; a sign change is a fold
            let d = ql.field(&mut e, [p.i, p.j, p.h])?;
            let (di, dj) = (r.i - p.i, r.j - p.j);
            let o = di * d[1] - dj * d[0];
            let sign0 = *sign0.get_or_insert(o.signum());
            if sign0 == 0.0 {
                return Err(Error::Genericity(format!("initial curve is characteristic near point {c}")));
            }
            if di.hypot(dj) < s.crossing_tol || o.signum() != sign0 {
                crossings.push(Crossing { curves: (c, c + 1), s: p.s, i: (p.i + r.i) / 2.0, j: (p.j + r.j) / 2.0 });
                for cc in [c, c + 1] {
                    for q in curves[cc][k..].iter_mut() {
                        if q.flag == Flag::Ok {
                            q.flag = Flag::Crossing;
                        }
                    }
                }
                break;
            }
        }
    }
    Ok((curves, crossings))
}

/// Integrates the characteristic system I' = a, J' = b, H' = c with fixed-step RK4 from each
/// point of the initial curve; `env` binds the entry's functions and parameters.
pub fn characteristics_solve(entry: &CatalogEntry, curve: &InitialCurve, settings: &CharSettings, env: &Env) -> Result<Characteristics> {
    let ql = Quasilinear::of_entry(entry)?;
    solve_quasilinear(&ql, curve, settings, env)
}

pub fn solve_quasilinear(ql: &Quasilinear, curve: &InitialCurve, settings: &CharSettings, env: &Env) -> Result<Characteristics> {
    if !(settings.step > 0.0 && settings.span > 0.0) {
        return Err(Error::InvalidParameter("step and span must be positive".into()));
    }
    let n = (settings.span / settings.step).round().max(1.0) as usize;
    let h = settings.span / n as f64;
    let init = curve.points(env)?;
    let (curves, crossings) = integrate(ql, env, &init, n, h, settings)?;
    let (fine, _) = integrate(ql, env, &init, 2 * n, h / 2.0, settings)?;
    let mut est = 0f64;
    for (c, f) in curves.iter().zip(&fine) {
        for p in c.iter().filter(|p| p.flag == Flag::Ok) {
            let k = (p.s / h).round() as usize;
            if let Some(q) = f.get(2 * k).filter(|q| q.flag == Flag::Ok) {
                est = est.max((p.h - q.h).abs() * 16.0 / 15.0);
            }
        }
    }
    Ok(Characteristics { step: h, curves, crossings, error_estimate: est })
}
