use clap::Args;
use tresse::catalog::{self, characteristics_solve, CatalogEntry, CharSettings, Characteristics, Flag, InitialCurve};
use tresse::sym::{Env, Lambda, Var};
use tresse::Expr;

use crate::out::{expr, interval, num, pair, usage, Fail, Outcome, Output};
use crate::VerifyArgs;

pub fn verify(a: &VerifyArgs, out: &Output) -> Outcome {
    let reports = match (&a.entry, a.all) {
        (Some(_), true) => return Err(usage("give an entry name or --all, not both")),
        (None, false) => return Err(usage("give an entry name or --all")),
        (Some(name), false) => vec![catalog::entry(name)?.verify()?],
        (None, true) => catalog::verify_all()?,
    };
    let mut passed = true;
    for r in &reports {
        println!("{} {}", r.entry, if r.passed { "PASS" } else { "FAIL" });
        for i in &r.items {
            println!("  [{}] {}: {:?}", i.stage, i.item, i.verdict);
            if !i.verdict.passed() {
                println!("    residual: {}", i.residual);
            }
        }
        passed &= r.passed;
    }
    if a.json {
        out.write_json("verify.json", &reports)?;
    }
    Ok(passed)
}

pub fn list() -> Outcome {
    for name in catalog::names() {
        let s = catalog::spec(name)?;
        let mut line = format!("{name:<18} {}", s.title);
        if !s.notes.is_empty() {
            line.push_str(&format!(" ({})", s.notes));
        }
        println!("{line}");
    }
    Ok(true)
}

/// `v -> body`, `a, b -> body`, or a body whose single free variable is the parameter.
fn lambda(name: &str, s: &str) -> Result<Lambda, Fail> {
    if let Some((params, body)) = s.split_once("->") {
        let vars: Vec<Var> = params.split(',').map(|p| Var::named(p.trim())).collect();
        return Ok(Lambda::new(vars, expr(body)?));
    }
    let body = expr(s)?;
    let named: Vec<Var> = body.free_vars().into_iter().filter(|v| matches!(v, Var::Named(_))).collect();
    match named.as_slice() {
        [] => Ok(Lambda::unary("x", body)),
        [v] => Ok(Lambda::new(vec![v.clone()], body)),
        _ => Err(usage(format!("{name} = {s}: several variables; write `v -> body`"))),
    }
}

/// Splits --func/--param values and the --g/--C shortcuts into function and parameter bindings.
fn bindings(
    entry: &CatalogEntry,
    g: &Option<String>,
    c: &Option<String>,
    funcs: &[String],
    params: &[String],
) -> Result<(Vec<(String, Lambda)>, Vec<(String, Expr)>), Fail> {
    let (mut fs, mut ps) = (Vec::new(), Vec::new());
    let mut take = |name: &str, v: &str| -> Result<(), Fail> {
        if entry.spec.functions.contains(&name) {
            fs.push((name.to_string(), lambda(name, v)?));
        } else if entry.spec.params.iter().any(|p| p.name == name) {
            ps.push((name.to_string(), expr(v)?));
        } else {
            return Err(usage(format!("{} has no function or parameter {name}", entry.name())));
        }
        Ok(())
    };
    for (name, v) in [("g", g), ("C", c)] {
        if let Some(v) = v {
            take(name, v)?;
        }
    }
    for f in funcs.iter().chain(params) {
        let (k, v) = pair(f)?;
        take(&k, &v)?;
    }
    Ok((fs, ps))
}

fn env_of(funcs: &[(String, Lambda)], params: &[(String, Expr)]) -> Result<Env, Fail> {
    let mut env = Env::new();
    for (n, l) in funcs {
        env.bind_lambda(n, l.clone());
    }
    for (n, e) in params {
        env.set_named(n, e.eval(&Env::new())?);
    }
    Ok(env)
}

#[derive(Args, Debug)]
pub struct SolveArgs {
    pub entry: String,
    #[arg(long)]
    pub g: Option<String>,
    #[arg(long = "C")]
    pub c: Option<String>,
    /// NAME=BODY for an arbitrary function; BODY may be `v -> expr`.
    #[arg(long = "func")]
    pub funcs: Vec<String>,
    /// NAME=VALUE for a parameter.
    #[arg(long = "param")]
    pub params: Vec<String>,
}

pub fn solve(a: &SolveArgs) -> Outcome {
    let e = catalog::entry(&a.entry)?;
    let (fs, ps) = bindings(&e, &a.g, &a.c, &a.funcs, &a.params)?;
    let fr: Vec<(&str, Lambda)> = fs.iter().map(|(n, l)| (n.as_str(), l.clone())).collect();
    let pr: Vec<(&str, Expr)> = ps.iter().map(|(n, v)| (n.as_str(), v.clone())).collect();
    let inst = e.instantiate(&fr, &pr)?;
    println!("constraint: {} = 0", inst.constraint);
    let Some(u) = &inst.solution else {
        println!("no general closed form for u; the constraint above is the reduced equation");
        return Ok(true);
    };
    println!("u = {u}");
    let mut ok = true;
    for (label, c) in [("F", &inst.residual), ("constraint", &inst.constraint_residual)] {
        if let Some(c) = c {
            println!("{label} on u: {:?} (residual {})", c.verdict, c.residual);
            ok &= c.passed();
        }
    }
    Ok(ok)
}

#[derive(Args, Debug)]
pub struct CharArgs {
    pub entry: String,
    #[arg(long, default_value_t = 0.01)]
    pub step: f64,
    /// Length of each characteristic.
    #[arg(long)]
    pub span: Option<f64>,
    #[arg(long)]
    pub g: Option<String>,
    #[arg(long = "C")]
    pub c: Option<String>,
    #[arg(long = "func")]
    pub funcs: Vec<String>,
    #[arg(long = "param")]
    pub params: Vec<String>,
    /// Initial curve on I = i0, parametrized by J = sigma.
    #[arg(long, allow_hyphen_values = true, conflicts_with = "j0")]
    pub i0: Option<f64>,
    /// Initial curve on J = j0, parametrized by I = sigma.
    #[arg(long, allow_hyphen_values = true)]
    pub j0: Option<f64>,
    /// Initial H as an expression in sigma.
    #[arg(long)]
    pub h: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub sigma: Option<String>,
    #[arg(long, default_value_t = 10)]
    pub count: usize,
    /// Closed form H(I, J) to measure the error against.
    #[arg(long)]
    pub exact: Option<String>,
    /// Pass threshold on the step-halving factor.
    #[arg(long, default_value_t = 12.0)]
    pub min_factor: f64,
    #[arg(long, default_value = "characteristics.csv")]
    pub out: String,
}

const HS: &str = "hunter-saxton";

/// max |H_h − H_{h/2}| over samples both runs kept unflagged.
fn halving_diff(a: &Characteristics, b: &Characteristics) -> f64 {
    let mut m = 0f64;
    for (ca, cb) in a.curves.iter().zip(&b.curves) {
        for (k, p) in ca.iter().enumerate() {
            if let Some(q) = cb.get(2 * k) {
                if p.flag == Flag::Ok && q.flag == Flag::Ok {
                    m = m.max((p.h - q.h).abs());
                }
            }
        }
    }
    m
}

pub fn characteristics(a: &CharArgs, out: &Output) -> Outcome {
    let e = catalog::entry(&a.entry)?;
    let hs = e.name() == HS;
    let g = a.g.clone().or_else(|| hs.then(|| "exp(w)".to_string()));
    let (fs, ps) = bindings(&e, &g, &a.c, &a.funcs, &a.params)?;
    let env = env_of(&fs, &ps)?;
    let h = match (&a.h, hs) {
        (Some(h), _) => expr(h)?,
        (None, true) => expr("exp(-sigma)")?,
        (None, false) => return Err(usage("--h is required for this entry")),
    };
    let sigma = match (&a.sigma, hs) {
        (Some(s), _) => interval(s)?,
        (None, true) => (0.1, 1.0),
        (None, false) => (0.0, 1.0),
    };
    let curve = match a.j0 {
        Some(j0) => InitialCurve::at_fixed_j(j0, h, sigma.0, sigma.1, a.count),
        None => InitialCurve::at_fixed_i(a.i0.unwrap_or(0.0), h, sigma.0, sigma.1, a.count),
    };
    let span = a.span.unwrap_or(if hs { 0.4 } else { 1.0 });
    if !(a.step > 0.0) || !(span > 0.0) {
        return Err(usage("--step and --span must be positive"));
    }
    let run = |step: f64| characteristics_solve(&e, &curve, &CharSettings { span, step, ..Default::default() }, &env);
    let runs = [run(a.step)?, run(a.step / 2.0)?, run(a.step / 4.0)?];
    out.write(&a.out, &runs[0].to_csv())?;
    let exact = match (&a.exact, hs && a.g.is_none() && a.h.is_none()) {
        (Some(x), _) => Some(expr(x)?),
        (None, true) => Some(expr("(2 - I*J)^4/(16*g(2*J/(2 - I*J)))")?),
        _ => None,
    };
    println!("step                    max |H_h - H_h/2|        error");
    let mut diffs = Vec::new();
    for k in 0..3 {
        let d = runs.get(k + 1).map(|b| halving_diff(&runs[k], b));
        let err = match &exact {
            Some(x) => Some(runs[k].max_error(|i, j| x.eval(&env.clone().with("I", i).with("J", j)))?),
            None => None,
        };
        println!(
            "{}  {}  {}",
            num(runs[k].step),
            d.map(num).unwrap_or_else(|| "-".repeat(23)),
            err.map(num).unwrap_or_else(|| "-".into())
        );
        diffs.extend(d);
    }
    let flagged = runs[0].samples().filter(|p| p.flag != Flag::Ok).count();
    println!("crossings: {}, flagged samples: {flagged}", runs[0].crossings.len());
    if diffs[1] == 0.0 {
        println!("halving changes nothing: the integrator is exact on this data");
        return Ok(true);
    }
    let factor = diffs[0] / diffs[1];
    println!("convergence factor on halving: {factor:.3}");
    Ok(factor >= a.min_factor)
}
