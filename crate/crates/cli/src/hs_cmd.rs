use clap::Args;
use serde::Serialize;
use tresse::hs::{
    cauchy_g, fit_c, flow_jet, general_solution, singular_curve, slope, surface_csv, transform_g, w_of_slope, Anchor,
    CFit, CRule, CauchyG, CauchyProblem, HsGenerator, Jet2, ParamSolution, PointFlag, ResidualReport, SingularPoint,
};
use tresse::sym::Env;
use tresse::Expr;

use crate::out::{expr, interval, num, range, usage, Fail, Outcome, Output};

#[derive(Args, Debug)]
pub struct SolveArgs {
    /// g(w).
    #[arg(long)]
    pub g: String,
    /// C(t).
    #[arg(long = "C", default_value = "0")]
    pub c: String,
    /// t samples: a, a:b or a:b:step.
    #[arg(long, default_value = "0:1", allow_hyphen_values = true)]
    pub t: String,
    /// w samples: a, a:b or a:b:step.
    #[arg(long, default_value = "-1:1", allow_hyphen_values = true)]
    pub w: String,
    /// Points per a:b range.
    #[arg(long, default_value_t = 50)]
    pub count: usize,
    /// Lower limit of the w-integrals: 0, a number, -inf, +inf or inf.
    #[arg(long, default_value = "0", allow_hyphen_values = true)]
    pub anchor: String,
    /// Open w-interval a:b outside which points are excluded.
    #[arg(long, allow_hyphen_values = true)]
    pub window: Option<String>,
    /// Finite-difference step of the PDE residual.
    #[arg(long, default_value_t = 3e-4)]
    pub h: f64,
    /// Points with |∂X/∂w| below this are flagged singular and left out of the residual.
    #[arg(long, default_value_t = 1e-3)]
    pub min_xw: f64,
    /// Residual points with |t·w + 2| below this are excluded (fold of the surface).
    #[arg(long, default_value_t = 0.05)]
    pub fold_margin: f64,
    /// Pass threshold on the max residual.
    #[arg(long, default_value_t = 1e-6)]
    pub tol: f64,
    #[arg(long, default_value = "hs_surface.csv")]
    pub out: String,
}

#[derive(Args, Debug)]
pub struct CauchyArgs {
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub t0: f64,
    /// u(t0, x) as an expression in x.
    #[arg(long)]
    pub u0: String,
    /// x-interval a:b.
    #[arg(long, default_value = "-10:10", allow_hyphen_values = true)]
    pub window: String,
    /// auto (decay when it applies, else linear), decay or linear.
    #[arg(long, default_value = "auto")]
    pub rule: String,
    /// Explicit C(t); overrides --rule.
    #[arg(long = "C")]
    pub c: Option<String>,
    #[arg(long, default_value = "inf", allow_hyphen_values = true)]
    pub anchor: String,
    /// Times for the residual and singular samples.
    #[arg(long, default_value = "0:2:0.25", allow_hyphen_values = true)]
    pub ts: String,
    /// Finite-difference step of the PDE residual.
    #[arg(long, default_value_t = 3e-4)]
    pub h: f64,
    /// Pass threshold on the initial-slice round trip.
    #[arg(long, default_value_t = 1e-7)]
    pub tol: f64,
    /// Residual points with |t·w + 2| below this are excluded (fold of the surface).
    #[arg(long, default_value_t = 0.05)]
    pub fold_margin: f64,
    /// Pass threshold on the PDE residual.
    #[arg(long, default_value_t = 1e-5)]
    pub residual_tol: f64,
    #[arg(long, default_value = "hs_cauchy.json")]
    pub out: String,
}

#[derive(Args, Debug)]
pub struct SingularArgs {
    /// Cauchy data u0(x); g and C come from the Cauchy pipeline.
    #[arg(long, conflicts_with = "g")]
    pub from_cauchy: Option<String>,
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    pub t0: f64,
    #[arg(long, default_value = "-10:10", allow_hyphen_values = true)]
    pub window: String,
    /// g(w), for a direct family instead of Cauchy data.
    #[arg(long)]
    pub g: Option<String>,
    #[arg(long = "C", default_value = "0")]
    pub c: String,
    #[arg(long, default_value = "inf", allow_hyphen_values = true)]
    pub anchor: String,
    #[arg(long, default_value = "-2:3:0.25", allow_hyphen_values = true)]
    pub t: String,
    /// Relation R(x, u) to evaluate at each sample; the max |R| is reported.
    #[arg(long)]
    pub relation: Option<String>,
    #[arg(long, default_value_t = 1e-8)]
    pub tol: f64,
    #[arg(long, default_value = "hs_singular.csv")]
    pub out: String,
}

#[derive(Args, Debug)]
pub struct TransformArgs {
    /// translation, time-scaling, space-scaling or projective.
    #[arg(long)]
    pub generator: String,
    /// Flow parameter, as an exact expression (e.g. 1/10).
    #[arg(long, allow_hyphen_values = true)]
    pub s: String,
    #[arg(long)]
    pub g: String,
    /// Also confirm that the transformed constraint follows from the original by the flow.
    #[arg(long)]
    pub check: bool,
}

fn anchor(s: &str) -> Result<Anchor, Fail> {
    Ok(Anchor::parse(s)?)
}

/// Residual with the difference step shrunk near the fold t·w + 2 = 0, where the surface
/// derivatives blow up; points closer than `margin` are excluded.
fn residual(sol: &ParamSolution, grid: &[(f64, f64)], h: f64, margin: f64) -> ResidualReport {
    let (near, far): (Vec<_>, Vec<_>) = grid.iter().partition(|(t, w)| (t * w + 2.0).abs() < margin);
    let mut rep = ResidualReport { max: 0.0, evaluated: 0, excluded: Vec::new() };
    for (t, w) in far {
        let part = sol.residual(&[(t, w)], h * (t * w + 2.0).abs().min(1.0));
        rep.max = rep.max.max(part.max);
        rep.evaluated += part.evaluated;
        rep.excluded.extend(part.excluded);
    }
    rep.excluded.extend(near.into_iter().map(|(t, w)| (t, w, format!("|t·w + 2| below {margin}"))));
    rep
}

fn report_residual(rep: &ResidualReport) {
    println!("residual: max {} over {} points, {} excluded", num(rep.max), rep.evaluated, rep.excluded.len());
    for (t, w, why) in rep.excluded.iter().take(5) {
        println!("  excluded (t, w) = ({t}, {w}): {why}");
    }
}

pub fn solve(a: &SolveArgs, out: &Output) -> Outcome {
    let ts = range(&a.t, a.count)?;
    let ws = range(&a.w, a.count)?;
    let mut sol = general_solution(expr(&a.g)?, expr(&a.c)?, anchor(&a.anchor)?)?;
    if let Some(win) = &a.window {
        let (lo, hi) = interval(win)?;
        sol = sol.with_window(lo, hi);
    }
    sol.min_xw = a.min_xw;
    let pts = sol.surface(&ts, &ws);
    out.write(&a.out, &surface_csv(&pts))?;
    let count = |f: PointFlag| pts.iter().filter(|p| p.flag == f).count();
    println!(
        "points: {} ok, {} singular, {} excluded",
        count(PointFlag::Ok),
        count(PointFlag::Singular),
        count(PointFlag::Excluded)
    );
    if sol.degenerate {
        println!("g ≡ 0: the surface degenerates to the curve (C(t), C'(t)); no residual");
        return Ok(true);
    }
    let grid: Vec<(f64, f64)> = pts.iter().filter(|p| p.flag == PointFlag::Ok).map(|p| (p.t, p.w)).collect();
    let rep = residual(&sol, &grid, a.h, a.fold_margin);
    report_residual(&rep);
    Ok(rep.evaluated > 0 && rep.max <= a.tol)
}

#[derive(Serialize)]
struct ResidualSummary {
    max: f64,
    evaluated: usize,
    excluded: usize,
}

#[derive(Serialize)]
struct BranchReport {
    index: usize,
    x: (f64, f64),
    w_range: (f64, f64),
    anchor: String,
    rule: String,
    fit: Option<CFit>,
    error: Option<String>,
    round_trip: Option<f64>,
    residual: Option<ResidualSummary>,
    singular: Vec<SingularPoint>,
}

#[derive(Serialize)]
struct CauchyReport {
    t0: f64,
    u0: String,
    window: (f64, f64),
    anchor: String,
    g: String,
    symbolic: bool,
    /// (w, g(w)) samples when g was inverted numerically.
    g_samples: Vec<(f64, f64)>,
    branches: Vec<BranchReport>,
    passed: bool,
}

fn rule_of(a: &CauchyArgs) -> Result<Vec<CRule>, Fail> {
    if let Some(c) = &a.c {
        return Ok(vec![CRule::Explicit(expr(c)?)]);
    }
    match a.rule.as_str() {
        "auto" => Ok(vec![CRule::Decay, CRule::Linear]),
        "decay" => Ok(vec![CRule::Decay]),
        "linear" => Ok(vec![CRule::Linear]),
        r => Err(usage(format!("unknown rule `{r}` (expected auto, decay or linear)"))),
    }
}

fn rule_name(r: &CRule) -> &'static str {
    match r {
        CRule::Explicit(_) => "explicit",
        CRule::Decay => "decay",
        CRule::Linear => "linear",
    }
}

/// C as a polynomial with shortest round-trip coefficients when the rule produced one.
fn c_text(fit: &CFit) -> String {
    match fit.coeffs {
        Some([a0, a1, a2]) => format!("{a0:e} + {a1:e}*t + {a2:e}*t^2"),
        None => fit.c.to_string(),
    }
}

/// First rule that fits, or the last error.
fn fit_branch(cg: &CauchyG, b: usize, an: Anchor, rules: &[CRule]) -> Result<(CFit, &'static str), (String, &'static str)> {
    let mut last = (String::new(), "none");
    for r in rules {
        match fit_c(cg, b, an, r) {
            Ok(f) => return Ok((f, rule_name(r))),
            Err(e) => {
                log::info!("branch {b}: {} rule failed: {e}", rule_name(r));
                last = (e.to_string(), rule_name(r));
            }
        }
    }
    Err(last)
}

/// A numerically inverted g exists only on the branch, so infinite anchors move to its middle.
fn branch_anchor(cg: &CauchyG, b: usize, an: Anchor) -> Anchor {
    match an {
        Anchor::Zero | Anchor::At(_) => an,
        _ if cg.symbolic => an,
        _ => {
            let x = cg.branches[b].x;
            cg.slope_w((x.0 + x.1) / 2.0).map(Anchor::At).unwrap_or(an)
        }
    }
}

/// w at interior x samples of a branch.
fn interior_ws(cg: &CauchyG, b: usize, n: usize) -> Vec<f64> {
    let x = cg.branches[b].x;
    (1..=n).filter_map(|k| cg.slope_w(x.0 + (x.1 - x.0) * k as f64 / (n + 1) as f64).ok()).collect()
}

pub fn cauchy(a: &CauchyArgs, out: &Output) -> Outcome {
    let window = interval(&a.window)?;
    let an = anchor(&a.anchor)?;
    let rules = rule_of(a)?;
    let ts = range(&a.ts, 9)?;
    let cg = cauchy_g(&CauchyProblem { t0: a.t0, u0: expr(&a.u0)?, window })?;
    println!("g(w) = {}{}", cg.g, if cg.symbolic { "" } else { " (numeric inverse)" });
    let mut g_samples = Vec::new();
    if !cg.symbolic {
        for b in 0..cg.branches.len() {
            for w in interior_ws(&cg, b, 16) {
                if let Ok(v) = cg.g.eval(&cg.env.clone().with("w", w)) {
                    g_samples.push((w, v));
                }
            }
        }
    }
    let mut passed = true;
    let mut branches = Vec::new();
    for (b, br) in cg.branches.iter().enumerate() {
        let mut rep = BranchReport {
            index: b,
            x: br.x,
            w_range: br.w_range(),
            anchor: String::new(),
            rule: String::new(),
            fit: None,
            error: None,
            round_trip: None,
            residual: None,
            singular: Vec::new(),
        };
        let an = branch_anchor(&cg, b, an);
        rep.anchor = an.to_string();
        match fit_branch(&cg, b, an, &rules) {
            Err((e, r)) => {
                println!("branch {b} x ∈ ({}, {}): no C ({r}): {e}", br.x.0, br.x.1);
                rep.rule = r.into();
                rep.error = Some(e);
                passed = false;
            }
            Ok((fit, r)) => {
                let sol = cg.solution(b, an, &fit)?;
                let rt = cg.round_trip(&sol, b, 40)?;
                let grid: Vec<(f64, f64)> =
                    ts.iter().flat_map(|&t| interior_ws(&cg, b, 8).into_iter().map(move |w| (t, w))).collect();
                let res = residual(&sol, &grid, a.h, a.fold_margin);
                let sing = singular_curve(&sol, &ts);
                println!(
                    "branch {b} x ∈ ({}, {}): C(t) = {} [{r}], spread {}, round trip {}, residual {} ({} points), {} singular samples",
                    br.x.0,
                    br.x.1,
                    c_text(&fit),
                    num(fit.spread),
                    num(rt),
                    num(res.max),
                    res.evaluated,
                    sing.len()
                );
                passed &= rt <= a.tol && res.max <= a.residual_tol;
                rep.rule = r.into();
                rep.round_trip = Some(rt);
                rep.residual = Some(ResidualSummary { max: res.max, evaluated: res.evaluated, excluded: res.excluded.len() });
                rep.singular = sing;
                rep.fit = Some(fit);
            }
        }
        branches.push(rep);
    }
    let report = CauchyReport {
        t0: a.t0,
        u0: a.u0.clone(),
        window,
        anchor: an.to_string(),
        g: cg.g.to_string(),
        symbolic: cg.symbolic,
        g_samples,
        branches,
        passed,
    };
    out.write_json(&a.out, &report)?;
    Ok(passed)
}

fn singular_solutions(a: &SingularArgs) -> Result<Vec<ParamSolution>, Fail> {
    let an = anchor(&a.anchor)?;
    match (&a.from_cauchy, &a.g) {
        (Some(u0), None) => {
            let cg = cauchy_g(&CauchyProblem { t0: a.t0, u0: expr(u0)?, window: interval(&a.window)? })?;
            let mut sols = Vec::new();
            for b in 0..cg.branches.len() {
                let an = branch_anchor(&cg, b, an);
                match fit_branch(&cg, b, an, &[CRule::Decay, CRule::Linear]) {
                    Ok((fit, _)) => sols.push(cg.solution(b, an, &fit)?),
                    Err((e, _)) => return Err(Fail::Run(format!("branch {b}: {e}"))),
                }
            }
            Ok(sols)
        }
        (None, Some(g)) => Ok(vec![general_solution(expr(g)?, expr(&a.c)?, an)?]),
        _ => Err(usage("give --from-cauchy U0 or --g G")),
    }
}

pub fn singular(a: &SingularArgs, out: &Output) -> Outcome {
    let ts = range(&a.t, 21)?;
    let rel = a.relation.as_deref().map(expr).transpose()?;
    let mut csv = String::from("t,w,x,u\n");
    let (mut n, mut worst) = (0, 0f64);
    for sol in singular_solutions(a)? {
        for p in singular_curve(&sol, &ts) {
            csv.push_str(&format!("{},{},{},{}\n", num(p.t), num(p.w), num(p.x), num(p.u)));
            n += 1;
            if let Some(r) = &rel {
                let mut env = Env::new().with("x", p.x).with("t", p.t);
                env.set(tresse::Var::jet(0, 0), p.u);
                worst = worst.max(r.eval(&env)?.abs());
            }
        }
    }
    out.write(&a.out, &csv)?;
    println!("singular samples: {n}");
    if rel.is_some() {
        println!("relation: max |R| = {}", num(worst));
        return Ok(n > 0 && worst <= a.tol);
    }
    Ok(true)
}

pub fn transform(a: &TransformArgs) -> Outcome {
    let gen = HsGenerator::parse(&a.generator)?;
    let s = expr(&a.s)?;
    let g = expr(&a.g)?;
    let gt = transform_g(gen, &s, &g);
    println!("g~(w) = {gt}");
    if !a.check {
        return Ok(true);
    }
    // jets on the constraint for g, flowed by -s, must satisfy the constraint for g~
    let sv = s.eval(&Env::new())?;
    let at = |e: &Expr, w: f64| e.eval(&Env::new().with("w", w));
    let mut worst = 0f64;
    for (t, w) in [(0.3, -0.5), (0.5, 0.4), (1.0, 1.0)] {
        let ux = slope(t, w);
        let p = Jet2 { t, x: 0.2, u: 0.1, u_x: ux, u_xx: (2.0 - t * ux).powi(4) / (16.0 * at(&g, w)?) };
        let j = flow_jet(gen, -sv, p, 200)?;
        let d = (2.0 - j.t * j.u_x).powi(4);
        let r = 16.0 * at(&gt, w_of_slope(j.t, j.u_x))? * j.u_xx - d;
        worst = worst.max(r.abs() / d.abs().max(1.0));
    }
    println!("flow check: max relative constraint residual {}", num(worst));
    Ok(worst < 1e-7)
}
