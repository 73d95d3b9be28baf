//! Hunter-Saxton equation u_tx + u u_xx + u_x²/2 = 0: the constraint fixing g, the general
//! solution parametrized by (t, w) with w = 2u_x/(2 − t u_x), Cauchy data, singular curves
//! and the action of the remaining symmetries on g.

mod cauchy;
mod comparison;
mod symmetry;

use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::numeric::quad::{integrate_pv, QuadSettings};
use crate::numeric::roots::poly_real_roots;
use crate::pde::PdeManifold;
use crate::sym::{parse, Env, Expr, Var, Q};

pub use cauchy::{cauchy_g, fit_c, singular_curve, CFit, CRule, CauchyG, CauchyProblem, SingularPoint, SlopeBranch};
pub use comparison::{hs_comparison, Comparison};
pub use symmetry::{flow_jet, transform_g, HsGenerator, Jet2};

pub const EQUATION: &str = "u_tx + u*u_xx + u_x^2/2";

pub fn equation() -> Expr {
    parse(EQUATION).expect("static equation parses")
}

/// The equation solved for u_tx.
pub fn manifold() -> PdeManifold {
    PdeManifold::parse(EQUATION, "u_tx").expect("static equation is affine in u_tx")
}

/// 16 g(2u_x/(2 − t u_x)) u_xx − (2 − t u_x)⁴ for g given as an expression in `w`.
pub fn constraint_g(g: &Expr) -> Expr {
    let w = parse("2*u_x/(2 - t*u_x)").expect("static");
    let g = g.subst_named("w", &w);
    Expr::int(16) * g * Expr::jet(0, 2) - parse("(2 - t*u_x)^4").expect("static")
}

/// u_x on the surface: 2w/(tw + 2).
pub fn slope(t: f64, w: f64) -> f64 {
    2.0 * w / (t * w + 2.0)
}

/// The parameter w of a slope: 2u_x/(2 − t u_x).
pub fn w_of_slope(t: f64, ux: f64) -> f64 {
    2.0 * ux / (2.0 - t * ux)
}

/// Lower limit of the antiderivatives in w. A constant change of anchor is absorbed by C and
/// C', so the anchor only matters when comparing with a particular closed form.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Anchor {
    Zero,
    At(f64),
    NegInfinity,
    PosInfinity,
    /// +∞ unless a pole of order ≥ 2 lies between w and +∞, then −∞. Simple poles on the way
    /// are crossed as principal values, which gives the ln|·| antiderivatives.
    Infinity,
}

impl Anchor {
    pub fn parse(s: &str) -> Result<Anchor> {
        Ok(match s {
            "0" | "zero" => Anchor::Zero,
            "-inf" | "neg-infinity" => Anchor::NegInfinity,
            "+inf" | "pos-infinity" => Anchor::PosInfinity,
            "inf" | "infinity" => Anchor::Infinity,
            _ => Anchor::At(s.parse().map_err(|_| Error::InvalidParameter(format!("unknown anchor `{s}`")))?),
        })
    }
}

impl fmt::Display for Anchor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Anchor::Zero => f.write_str("0"),
            Anchor::At(a) => write!(f, "{a}"),
            Anchor::NegInfinity => f.write_str("-inf"),
            Anchor::PosInfinity => f.write_str("+inf"),
            Anchor::Infinity => f.write_str("inf"),
        }
    }
}

/// Real poles of g with their orders, read off a Laurent-rational g. Other forms report none
/// and rely on quadrature failures.
fn poles_of(g: &Expr) -> Vec<(f64, u32)> {
    let Some(u) = g.univariate(&Var::named("w")) else { return Vec::new() };
    let mut out: Vec<(f64, u32)> = Vec::new();
    let mut push = |p: f64, k: u32| match out.iter_mut().find(|(q, _)| (q - p).abs() < 1e-9) {
        Some(e) => e.1 += k,
        None => out.push((p, k)),
    };
    let q = |c: &Q| num_traits::ToPrimitive::to_f64(c).unwrap_or(f64::NAN);
    let low = u.num.iter().map(|(e, _)| *e).min().unwrap_or(0);
    if low < 0 {
        push(0.0, (-low) as u32);
    }
    for (terms, mult) in &u.den {
        let shift = terms.iter().map(|(e, _)| *e).min().unwrap_or(0);
        if shift < 0 {
            push(0.0, (-shift) as u32 * mult);
        }
        let deg = terms.iter().map(|(e, _)| e - shift).max().unwrap_or(0) as usize;
        let mut c = vec![0.0; deg + 1];
        for (e, v) in terms {
            c[(e - shift) as usize] += q(v);
        }
        for (r, m) in poly_real_roots(&c) {
            push(if r.abs() < 1e-14 { 0.0 } else { r }, m * mult);
        }
    }
    out.sort_by(|a, b| a.0.total_cmp(&b.0));
    out
}

/// Order of the pole of `f` at p, estimated from |f(p + 1e−6)| / |f(p + 1e−4)| ≈ 100^k.
fn pole_order(f: &mut impl FnMut(f64) -> Result<f64>, p: f64) -> u32 {
    let near = f(p + 1e-6).map(f64::abs);
    let far = f(p + 1e-4).map(f64::abs);
    match (near, far) {
        (Ok(a), Ok(b)) if a.is_finite() && b > 0.0 => ((a / b).ln() / 100f64.ln()).round().max(0.0) as u32,
        (Ok(a), Ok(_)) if a.is_finite() => 0,
        _ => 1,
    }
}

/// Status of a surface point.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum PointFlag {
    Ok,
    /// ∂X/∂w vanishes (or nearly): a fold of the surface over the x-axis.
    Singular,
    /// Outside the validity window, or quadrature/evaluation failed.
    Excluded,
}

impl fmt::Display for PointFlag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PointFlag::Ok => "ok",
            PointFlag::Singular => "singular",
            PointFlag::Excluded => "excluded",
        })
    }
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct SurfacePoint {
    pub t: f64,
    pub w: f64,
    pub x: f64,
    pub u: f64,
    pub u_x: f64,
    pub flag: PointFlag,
}

/// Surface samples as CSV with 17 significant digits; failed points carry NaN and a flag.
pub fn surface_csv(points: &[SurfacePoint]) -> String {
    let mut out = String::from("t,w,x,u,u_x,flag\n");
    for p in points {
        out.push_str(&format!("{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{}\n", p.t, p.w, p.x, p.u, p.u_x, p.flag));
    }
    out
}

/// max |F| over a grid, with the points that were skipped.
#[derive(Clone, Debug, Serialize)]
pub struct ResidualReport {
    pub max: f64,
    pub evaluated: usize,
    /// (t, w, reason) for each excluded point.
    pub excluded: Vec<(f64, f64, String)>,
}

/// x = ¼∫(tv+2)²g dv + C(t), u = ½∫(tv+2)v g dv + C'(t), integrals from the anchor to w.
#[derive(Clone)]
pub struct ParamSolution {
    pub g: Expr,
    pub c: Expr,
    pub anchor: Anchor,
    /// g ≡ 0: the surface collapses to the curve (C(t), C'(t)).
    pub degenerate: bool,
    /// Open w-interval where the surface is defined; points outside are excluded.
    pub window: Option<(f64, f64)>,
    /// Points with |∂X/∂w| below this are treated as singular.
    pub min_xw: f64,
    pub env: Env,
    dc: Expr,
    ddc: Expr,
    xw: Expr,
    uw: Expr,
    poles: Vec<(f64, u32)>,
}

impl fmt::Debug for ParamSolution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ParamSolution(g = {}, C = {}, anchor {})", self.g, self.c, self.anchor)
    }
}

/// The parametrized solution for g(w) and C(t). Quadrature uses absolute tolerance 1e−12.
pub fn general_solution(g: Expr, c: Expr, anchor: Anchor) -> Result<ParamSolution> {
    let (t, w) = (Var::named("t"), Var::named("w"));
    for v in c.free_vars() {
        if v != t && !matches!(&v, Var::Named(_)) {
            return Err(Error::InvalidParameter(format!("C must be a function of t, got {c}")));
        }
    }
    if c.contains_var(&w) {
        return Err(Error::InvalidParameter(format!("C must not depend on w: {c}")));
    }
    let dc = crate::sym::partial(&c, &t);
    let ddc = crate::sym::partial(&dc, &t);
    let xw = parse("(t*w + 2)^2/4")? * g.clone();
    let uw = parse("(t*w + 2)*w/2")? * g.clone();
    let mut env = Env::new();
    env.quad = QuadSettings::with_tol(1e-12);
    Ok(ParamSolution {
        degenerate: g.is_zero(),
        poles: poles_of(&g),
        g,
        c,
        anchor,
        window: None,
        min_xw: 1e-6,
        env,
        dc,
        ddc,
        xw,
        uw,
    })
}

impl ParamSolution {
    /// Bindings for formal functions or parameters appearing in g and C.
    pub fn with_env(mut self, env: Env) -> Self {
        let quad = self.env.quad;
        self.env = env;
        self.env.quad = quad;
        self
    }

    pub fn with_window(mut self, lo: f64, hi: f64) -> Self {
        self.window = Some((lo, hi));
        self
    }

    pub fn with_anchor(mut self, anchor: Anchor) -> Self {
        self.anchor = anchor;
        self
    }

    /// Poles of g found symbolically, with orders.
    pub fn poles(&self) -> &[(f64, u32)] {
        &self.poles
    }

    fn eval_tw(&self, e: &Expr, t: f64, w: f64) -> Result<f64> {
        let mut env = self.env.clone();
        env.set_named("t", t).set_named("w", w);
        e.eval(&env)
    }

    pub fn g_at(&self, w: f64) -> Result<f64> {
        self.eval_tw(&self.g, 0.0, w)
    }

    /// (C(t), C'(t), C''(t)).
    pub fn c_at(&self, t: f64) -> Result<(f64, f64, f64)> {
        Ok((self.eval_tw(&self.c, t, 0.0)?, self.eval_tw(&self.dc, t, 0.0)?, self.eval_tw(&self.ddc, t, 0.0)?))
    }

    /// ∂X/∂w = ¼(tw+2)²g(w).
    pub fn x_w(&self, t: f64, w: f64) -> Result<f64> {
        self.eval_tw(&self.xw, t, w)
    }

    /// ∂U/∂w = ½(tw+2)w g(w).
    pub fn u_w(&self, t: f64, w: f64) -> Result<f64> {
        self.eval_tw(&self.uw, t, w)
    }

    fn in_window(&self, w: f64) -> Result<()> {
        match self.window {
            Some((lo, hi)) if !(w > lo && w < hi) => Err(Error::Domain(format!("w = {w} outside the window ({lo}, {hi})"))),
            _ => Ok(()),
        }
    }

    /// ∫_anchor^w of `integrand` (an expression in t, w), crossing simple poles as principal values.
    fn antiderivative(&self, integrand: &Expr, t: f64, w: f64) -> Result<f64> {
        if self.degenerate {
            return Ok(0.0);
        }
        let mut env = self.env.clone();
        env.set_named("t", t);
        let quad = env.quad;
        let mut f = |v: f64| {
            env.set_named("w", v);
            integrand.eval(&env)
        };
        let mut orders = Vec::new();
        for &(p, _) in &self.poles {
            orders.push((p, pole_order(&mut f, p)));
        }
        if let Some((p, _)) = orders.iter().find(|(p, k)| *k > 0 && *p == w) {
            return Err(Error::Pole(format!("w = {p}")));
        }
        let blocked = |lo: f64, hi: f64| orders.iter().find(|(p, k)| *k >= 2 && *p > lo && *p < hi).copied();
        let a = match self.anchor {
            Anchor::Zero => 0.0,
            Anchor::At(a) => a,
            Anchor::NegInfinity => f64::NEG_INFINITY,
            Anchor::PosInfinity => f64::INFINITY,
            Anchor::Infinity => {
                if blocked(w, f64::INFINITY).is_none() {
                    f64::INFINITY
                } else {
                    f64::NEG_INFINITY
                }
            }
        };
        let (lo, hi) = if a < w { (a, w) } else { (w, a) };
        if let Some((p, k)) = blocked(lo, hi) {
            return Err(Error::Quadrature(format!("pole of order {k} at w = {p} between the anchor {} and w = {w}", self.anchor)));
        }
        let simple: Vec<f64> = orders.iter().filter(|(p, k)| *k == 1 && *p > lo && *p < hi).map(|(p, _)| *p).collect();
        integrate_pv(f, a, w, &simple, &quad)
    }

    /// X(t, w) without C.
    pub fn x0(&self, t: f64, w: f64) -> Result<f64> {
        self.antiderivative(&self.xw, t, w)
    }

    /// U(t, w) without C'.
    pub fn u0(&self, t: f64, w: f64) -> Result<f64> {
        self.antiderivative(&self.uw, t, w)
    }

    pub fn x_of(&self, t: f64, w: f64) -> Result<f64> {
        self.in_window(w)?;
        Ok(self.x0(t, w)? + self.c_at(t)?.0)
    }

    pub fn u_of(&self, t: f64, w: f64) -> Result<f64> {
        self.in_window(w)?;
        Ok(self.u0(t, w)? + self.c_at(t)?.1)
    }

    /// U_w / X_w, the slope read off the parametrization.
    pub fn slope_ratio(&self, t: f64, w: f64) -> Result<f64> {
        let xw = self.x_w(t, w)?;
        if xw.abs() < self.min_xw {
            return Err(Error::Genericity(format!("∂X/∂w = {xw:.3e} at (t, w) = ({t}, {w})")));
        }
        Ok(self.u_w(t, w)? / xw)
    }

    pub fn point(&self, t: f64, w: f64) -> SurfacePoint {
        let excluded = SurfacePoint { t, w, x: f64::NAN, u: f64::NAN, u_x: f64::NAN, flag: PointFlag::Excluded };
        let xu = self.x_of(t, w).and_then(|x| Ok((x, self.u_of(t, w)?)));
        let Ok((x, u)) = xu else {
            log::debug!("surface point ({t}, {w}) excluded: {}", xu.unwrap_err());
            return excluded;
        };
        let singular = self.degenerate || self.x_w(t, w).map(|v| v.abs() < self.min_xw).unwrap_or(true);
        let flag = if singular { PointFlag::Singular } else { PointFlag::Ok };
        SurfacePoint { t, w, x, u, u_x: slope(t, w), flag }
    }

    /// Samples on the product grid ts × ws.
    pub fn surface(&self, ts: &[f64], ws: &[f64]) -> Vec<SurfacePoint> {
        ts.iter().flat_map(|&t| ws.iter().map(move |&w| (t, w))).map(|(t, w)| self.point(t, w)).collect()
    }

    /// F = u_tx + u u_xx + u_x²/2 at one point. u_x = φ = U_w/X_w; u_xx = φ_w/X_w and
    /// u_tx = φ_t − φ_w X_t/X_w by the chain rule through w(t, x). X_t, φ_t and φ_w are central
    /// differences with step h, Richardson-extrapolated against h/2.
    pub fn residual_at(&self, t: f64, w: f64, h: f64) -> Result<f64> {
        if self.degenerate {
            return Err(Error::Genericity("g ≡ 0: the surface is degenerate".into()));
        }
        let xw = self.x_w(t, w)?;
        if xw.abs() < self.min_xw {
            return Err(Error::Genericity(format!("|∂X/∂w| = {:.3e} below {:.1e}", xw.abs(), self.min_xw)));
        }
        let phi = |t: f64, w: f64| self.slope_ratio(t, w);
        let rich = |f: &dyn Fn(f64) -> Result<f64>| -> Result<f64> {
            let d = |h: f64| -> Result<f64> { Ok((f(h)? - f(-h)?) / (2.0 * h)) };
            let (d1, d2) = (d(h)?, d(h / 2.0)?);
            Ok((4.0 * d2 - d1) / 3.0)
        };
        let phi_w = rich(&|e| phi(t, w + e))?;
        let phi_t = rich(&|e| phi(t + e, w))?;
        let x_t = rich(&|e| Ok(self.x0(t + e, w)? + self.c_at(t + e)?.0))?;
        let u = self.u_of(t, w)?;
        let ux = phi(t, w)?;
        let uxx = phi_w / xw;
        let utx = phi_t - phi_w * x_t / xw;
        Ok(utx + u * uxx + ux * ux / 2.0)
    }

    /// max |F| over the grid; points that fail (singular Jacobian, window, quadrature) are
    /// reported rather than aborting.
    pub fn residual(&self, grid: &[(f64, f64)], h: f64) -> ResidualReport {
        let mut rep = ResidualReport { max: 0.0, evaluated: 0, excluded: Vec::new() };
        for &(t, w) in grid {
            match self.in_window(w).and_then(|_| self.residual_at(t, w, h)) {
                Ok(f) => {
                    rep.max = rep.max.max(f.abs());
                    rep.evaluated += 1;
                }
                Err(e) => rep.excluded.push((t, w, e.to_string())),
            }
        }
        rep
    }
}

/// n evenly spaced points from a to b inclusive.
pub fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![a],
        _ => (0..n).map(|k| a + (b - a) * k as f64 / (n - 1) as f64).collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn poles_of_the_cauchy_g() {
        let g = parse("-8/(w*(w+2)^3)").unwrap();
        let p = poles_of(&g);
        assert_eq!(p.len(), 2);
        assert!((p[0].0 + 2.0).abs() < 1e-9 && p[0].1 == 3);
        assert!(p[1].0 == 0.0 && p[1].1 == 1);
        assert!(poles_of(&parse("exp(w)").unwrap()).is_empty());
    }

    #[test]
    fn slope_round_trip() {
        for (t, ux) in [(0.0, 1.5), (1.0, -3.0), (2.5, 0.2)] {
            assert!((slope(t, w_of_slope(t, ux)) - ux).abs() < 1e-14);
        }
    }
}
